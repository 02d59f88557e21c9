"""JSON interchange for algebras and systems; bundled corpus lookup.

System file::

    {"rbforge-schema": 1,
     "name": "...",                                  (optional)
     "field": {"kind": "Q"} | {"kind": "Fp", "p": 2},
     "dim": n,
     "mul": n x n x n scalar strings,               mul[i][j][k]: e_k in e_i e_j
     "unit": n scalar strings,                      (optional)
     "R": n x n, "S": n x n,                        M[k][i]: e_k in image of e_i
     "omega": n x n x n}                            (optional; absent => derived from R, S)

An algebra file is the same document without ``R``, ``S`` and ``omega``.
Scalars are always strings of the form ``[-]digits[/digits]``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .algebra import Algebra
from .errors import RBForgeError
from .scalars import FieldSpec
from .system import CurvedRBSystem

SCHEMA_VERSION = 1
CORPUS_DIR = Path(__file__).parent / "corpus"


class FormatError(RBForgeError, ValueError):
    pass


def field_to_dict(F: FieldSpec) -> dict:
    return {"kind": "Q"} if F.kind == "Q" else {"kind": "Fp", "p": F.p}


def field_from_dict(d) -> FieldSpec:
    try:
        if d["kind"] == "Q":
            return FieldSpec.rationals()
        if d["kind"] == "Fp":
            return FieldSpec.prime(int(d["p"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad field description {d!r}: {exc}") from exc
    raise FormatError(f"unknown field kind in {d!r}")


def _strings_only(data, where):
    if isinstance(data, list):
        for x in data:
            _strings_only(x, where)
    elif not isinstance(data, str):
        raise FormatError(f"{where}: scalars must be JSON strings, got {data!r}")


def _array(F, data, shape, where):
    _strings_only(data, where)
    try:
        arr = F.asarray(data)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    if arr.shape != shape:
        raise FormatError(f"{where}: expected shape {shape}, got {arr.shape}")
    return arr


def algebra_to_dict(A: Algebra) -> dict:
    F = A.field
    d = {
        "rbforge-schema": SCHEMA_VERSION,
        "name": A.name,
        "field": field_to_dict(F),
        "dim": A.dim,
        "mul": F.format_array(A.mul),
    }
    if A.unit is not None:
        d["unit"] = F.format_array(A.unit)
    return d


def algebra_from_dict(d: dict) -> Algebra:
    if not isinstance(d, dict):
        raise FormatError("top-level JSON value must be an object")
    version = d.get("rbforge-schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema version {version!r}")
    F = field_from_dict(d.get("field"))
    try:
        n = int(d["dim"])
        mul = d["mul"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or bad algebra field: {exc}") from exc
    if n < 1:
        raise FormatError("dim must be positive")
    mul = _array(F, mul, (n, n, n), "mul")
    unit = d.get("unit")
    if unit is not None:
        unit = _array(F, unit, (n,), "unit")
    return Algebra(F, mul, unit=unit, name=d.get("name", ""))


def system_to_dict(sys: CurvedRBSystem, name: str = "", include_omega: bool = True) -> dict:
    F = sys.field
    d = algebra_to_dict(sys.algebra)
    d["algebra"] = d.pop("name")
    if name:
        d["name"] = name
    d["R"] = F.format_array(sys.R.matrix)
    d["S"] = F.format_array(sys.S.matrix)
    if include_omega:
        d["omega"] = F.format_array(sys.omega.tensor)
    return d


def system_from_dict(d: dict) -> CurvedRBSystem:
    if not isinstance(d, dict):
        raise FormatError("top-level JSON value must be an object")
    alg = dict(d)
    alg["name"] = d.get("algebra", d.get("name", ""))
    A = algebra_from_dict(alg)
    F, n = A.field, A.dim
    for key in ("R", "S"):
        if key not in d:
            raise FormatError(f"system file lacks {key!r}")
    R = _array(F, d["R"], (n, n), "R")
    S = _array(F, d["S"], (n, n), "S")
    omega = d.get("omega")
    if omega is not None:
        omega = _array(F, omega, (n, n, n), "omega")
    return CurvedRBSystem.build(A, R, S, omega)


def omega_was_given(d: dict) -> bool:
    return d.get("omega") is not None


def dumps(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def read_json(source: Union[str, Path]) -> dict:
    path = resolve(source)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def resolve(source: Union[str, Path]) -> Path:
    """A file path, or the name of a bundled corpus file (systems first, then algebras)."""
    p = Path(source)
    if p.is_file():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    for cand in (CORPUS_DIR / name, CORPUS_DIR / "algebras" / name):
        if cand.is_file():
            return cand
    raise FileNotFoundError(f"no file or corpus entry named {source!r}")


def load_algebra(source) -> Algebra:
    return algebra_from_dict(read_json(source))


def load_system(source) -> CurvedRBSystem:
    return system_from_dict(read_json(source))


def save_system(sys: CurvedRBSystem, path, name: str = ""):
    Path(path).write_text(dumps(system_to_dict(sys, name)))


def save_algebra(A: Algebra, path):
    Path(path).write_text(dumps(algebra_to_dict(A)))


def corpus_systems() -> list[str]:
    return sorted(p.stem for p in CORPUS_DIR.glob("*.json"))


def corpus_algebras() -> list[str]:
    return sorted(p.stem for p in (CORPUS_DIR / "algebras").glob("*.json"))
