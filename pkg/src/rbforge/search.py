"""Brute-force enumeration of operator pairs ``(R, S)`` over a small prime field.

Candidates are numbered ``0 .. q^(2 n^2) - 1``.  Index ``idx`` splits as
``idx = r * q^(n^2) + s``; ``r`` and ``s`` are read as base-``q`` numerals
whose most significant digit is the ``[0, 0]`` matrix entry (row-major), so
index order is lexicographic order on ``(R, S)``.

The curvature is never enumerated: it is derived from the R-identity.
Every flag is evaluated by vectorised kernels over a chunk of candidates;
those kernels are written independently of the per-system checks in
``system``/``prelie`` so the two can be compared.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional

import numpy as np

from . import __version__
from .algebra import Algebra
from .errors import BudgetExceededError
from .scalars import FieldSpec

FLAGS = (
    "validSystem",
    "balanced",
    "bimodule",
    "symmetricCurvature",
    "cocycle",
    "prelie",
    "equalRS",
    "starAssociative",
    "antisymCentral",
)
BIT = {name: 1 << i for i, name in enumerate(FLAGS)}

CHUNK = 2048
DEFAULT_BUDGET = 1 << 20

CLAIMS = ("starNonAssociative", "prelieFails", "leibnizFailsWhenRneqS", "literalDsquaredFails")


@dataclass(frozen=True)
class RandomSample:
    count: int
    seed: int = 0


@dataclass(frozen=True)
class SearchSpec:
    algebra: Algebra
    mode: object = "exhaustive"  # "exhaustive" or RandomSample
    filters: frozenset = frozenset()
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        unknown = set(self.filters) - set(FLAGS)
        if unknown:
            raise ValueError(f"unknown filter flags {sorted(unknown)}")
        object.__setattr__(self, "filters", frozenset(self.filters))

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @property
    def operator_count(self) -> int:
        return self.field.p ** (self.algebra.dim**2)

    @property
    def total(self) -> int:
        return self.operator_count**2

    @property
    def filter_mask(self) -> int:
        return sum(BIT[f] for f in self.filters)


def default_workers() -> int:
    env = os.environ.get("RBFORGE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- enumeration ----------------------------------------------------------


def _check_spec(spec: SearchSpec):
    if not spec.field.is_finite:
        raise ValueError("search needs a finite field; the rationals cannot be enumerated")
    if spec.total >= 1 << 62:
        raise BudgetExceededError(f"{spec.total} candidates do not fit a 64-bit index")
    if spec.mode == "exhaustive":
        if spec.total > spec.budget:
            raise BudgetExceededError(
                f"exhaustive search needs {spec.total} candidates, budget is {spec.budget}"
            )
    elif isinstance(spec.mode, RandomSample):
        if spec.mode.count > spec.budget:
            raise BudgetExceededError(f"sample of {spec.mode.count} exceeds budget {spec.budget}")
    else:
        raise ValueError(f"unknown search mode {spec.mode!r}")


def candidate_indices(spec: SearchSpec) -> np.ndarray:
    _check_spec(spec)
    if spec.mode == "exhaustive":
        return np.arange(spec.total, dtype=np.int64)
    count = min(spec.mode.count, spec.total)
    rng = random.Random(spec.mode.seed)
    return np.array(rng.sample(range(spec.total), count), dtype=np.int64)


def decode(q: int, n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Candidate indices -> stacked ``R`` and ``S`` matrices."""
    idx = np.asarray(idx, dtype=np.int64)
    per = q ** (n * n)
    r, s = np.divmod(idx, per)

    def digits(x):
        out = np.empty(x.shape + (n * n,), dtype=np.int64)
        for pos in range(n * n - 1, -1, -1):
            x, out[..., pos] = np.divmod(x, q)
        return out.reshape(x.shape + (n, n))

    return digits(r), digits(s)


def encode(q: int, R, S) -> int:
    flat_r = [int(v) for v in np.asarray(R).reshape(-1)]
    flat_s = [int(v) for v in np.asarray(S).reshape(-1)]
    r = s = 0
    for v in flat_r:
        r = r * q + v
    for v in flat_s:
        s = s * q + v
    return r * q ** len(flat_s) + s


def enumerate_pairs(spec: SearchSpec) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Deterministic stream of ``(R, S)`` raw matrices in candidate order."""
    idx = candidate_indices(spec)
    q, n = spec.field.p, spec.algebra.dim
    for start in range(0, len(idx), CHUNK):
        Rs, Ss = decode(q, n, idx[start:start + CHUNK])
        yield from zip(Rs, Ss)


# -- vectorised flag evaluation ------------------------------------------


def _mod(x, p):
    return np.mod(x, p)


def _zero(x, axes):
    return np.all(x == 0, axis=axes)


def evaluate_chunk(p: int, mul: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Bitmask of flags for each candidate index (invalid candidates get 0)."""
    c = np.asarray(mul, dtype=np.int64)
    n = c.shape[0]
    R, S = decode(p, n, idx)
    e = np.einsum

    st = _mod(e("...ai,ajk->...ijk", R, c) + e("...bj,ibk->...ijk", S, c), p)
    wr = _mod(e("...ai,...bj,abk->...ijk", R, R, c) - e("...km,...ijm->...ijk", R, st), p)
    ws = _mod(e("...ai,...bj,abk->...ijk", S, S, c) - e("...km,...ijm->...ijk", S, st), p)
    ax3 = (-3, -2, -1)
    ax4 = (-4, -3, -2, -1)
    valid = _zero(wr - ws, ax3)
    W = wr

    # a w(b, c) vs w(a, b) c
    aw = e("...bcm,amk->...abck", W, c)
    wc = e("...abm,mck->...abck", W, c)
    balanced = _zero(_mod(aw - wc, p), ax4)
    # w(ax, y) = a w(x, y) and w(x, ya) = w(x, y) a
    w_ax = e("axm,...myk->...axyk", c, W)
    a_w = e("...xym,amk->...axyk", W, c)
    w_ya = e("yam,...xmk->...axyk", c, W)
    w_a = e("...xym,mak->...axyk", W, c)
    bimodule = _zero(_mod(w_ax - a_w, p), ax4) & _zero(_mod(w_ya - w_a, p), ax4)
    symmetric = _zero(_mod(W - np.swapaxes(W, -3, -2), p), ax3)
    w_ab_c = e("abm,...mck->...abck", c, W)
    w_a_bc = e("bcm,...amk->...abck", c, W)
    cocycle = _zero(_mod(aw - w_ab_c + w_a_bc - wc, p), ax4)

    C = _mod(e("...pi,pjk->...ijk", R, c) - e("...pi,jpk->...ijk", S, c), p)
    anti = C - np.swapaxes(C, -3, -2)
    a_bc = e("...bcm,...amk->...abck", C, C)
    defect = e("...abm,...mck->...abck", anti, C) - a_bc + np.swapaxes(a_bc, -4, -3)
    prelie = _zero(_mod(defect, p), ax4)

    equal = _zero(R - S, (-2, -1))
    star_assoc = _zero(
        _mod(e("...ijm,...mkl->...ijkl", st, st) - e("...jkm,...iml->...ijkl", st, st), p), ax4
    )
    wanti = W - np.swapaxes(W, -3, -2)
    comm = e("...ijp,pck->...ijck", wanti, c) - e("...ijp,cpk->...ijck", wanti, c)
    anti_central = _zero(_mod(comm, p), ax4)

    bits = np.zeros(len(idx), dtype=np.int64)
    for name, arr in (
        ("balanced", balanced),
        ("bimodule", bimodule),
        ("symmetricCurvature", symmetric),
        ("cocycle", cocycle),
        ("prelie", prelie),
        ("equalRS", equal),
        ("starAssociative", star_assoc),
        ("antisymCentral", anti_central),
    ):
        bits |= np.where(arr, BIT[name], 0)
    bits = np.where(valid, bits | BIT["validSystem"], 0)
    return bits


def _chunk_job(args):
    p, mul, idx = args
    return evaluate_chunk(p, mul, idx)


def evaluate(spec: SearchSpec, workers: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """``(indices, bitmasks)`` for every candidate, in candidate order."""
    idx = candidate_indices(spec)
    p, mul = spec.field.p, np.asarray(spec.algebra.mul, dtype=np.int64)
    jobs = [(p, mul, idx[s:s + CHUNK]) for s in range(0, len(idx), CHUNK)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(jobs) <= 1:
        parts = [_chunk_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    masks = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return idx, masks


def flag_names(mask: int) -> tuple[str, ...]:
    return tuple(f for f in FLAGS if mask & BIT[f])


def combination_key(mask: int) -> str:
    names = flag_names(mask)
    return "+".join(names) if names else "invalid"


# -- reports --------------------------------------------------------------


@dataclass
class ClassificationReport:
    algebra: str
    field: str
    dim: int
    mode: str
    filters: list
    examined: int
    excluded: int
    counts: dict
    flag_totals: dict
    witnesses: dict
    equivalences: dict
    timings: dict = dc_field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "rbforge-schema": 1,
            "tool_version": __version__,
            "algebra": self.algebra,
            "field": self.field,
            "dim": self.dim,
            "mode": self.mode,
            "filters": self.filters,
            "examined": self.examined,
            "excluded": self.excluded,
            "counts": self.counts,
            "flag_totals": self.flag_totals,
            "witnesses": self.witnesses,
            "equivalences": self.equivalences,
        }
        if timings:
            out["timings"] = self.timings
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=2)


def _matrix_strings(M) -> list:
    return [[str(int(v)) for v in row] for row in M]


def classify(spec: SearchSpec, workers: Optional[int] = None) -> ClassificationReport:
    t0 = time.perf_counter()
    idx, masks = evaluate(spec, workers)
    t1 = time.perf_counter()
    fmask = spec.filter_mask
    keep = (masks & fmask) == fmask
    q, n = spec.field.p, spec.algebra.dim

    counts: dict[str, int] = {}
    first: dict[str, int] = {}
    kept_masks = masks[keep]
    kept_idx = idx[keep]
    uniq, first_pos, cnt = np.unique(kept_masks, return_index=True, return_counts=True)
    for m, pos, k in zip(uniq, first_pos, cnt):
        key = combination_key(int(m))
        counts[key] = int(k)
        first[key] = int(pos)
    # np.unique sorts by mask value; the first occurrence is already in candidate order
    witnesses = {}
    for key, pos in first.items():
        R, S = decode(q, n, kept_idx[pos:pos + 1])
        witnesses[key] = {
            "index": int(kept_idx[pos]),
            "R": _matrix_strings(R[0]),
            "S": _matrix_strings(S[0]),
        }
    flag_totals = {f: int(np.count_nonzero(kept_masks & BIT[f])) for f in FLAGS}

    valid = (kept_masks & BIT["validSystem"]) != 0
    vm = kept_masks[valid]

    def disagreements(a, b):
        return int(np.count_nonzero(((vm & BIT[a]) != 0) != ((vm & BIT[b]) != 0)))

    equivalences = {
        "starAssociative<->balanced": disagreements("starAssociative", "balanced"),
        "prelie<->antisymCentral": disagreements("prelie", "antisymCentral"),
    }
    mode = "exhaustive" if spec.mode == "exhaustive" else (
        f"random(count={spec.mode.count},seed={spec.mode.seed})"
    )
    return ClassificationReport(
        algebra=spec.algebra.name,
        field=str(spec.field),
        dim=n,
        mode=mode,
        filters=sorted(spec.filters),
        examined=int(len(idx)),
        excluded=int(np.count_nonzero(~keep)),
        counts=dict(sorted(counts.items())),
        flag_totals=flag_totals,
        witnesses=dict(sorted(witnesses.items())),
        equivalences=equivalences,
        timings={"evaluate_s": t1 - t0, "total_s": time.perf_counter() - t0},
    )


def valid_systems(algebra: Algebra, workers: Optional[int] = 1, require: tuple = ()):
    """Yield ``(index, mask, system)`` for every valid candidate, in order."""
    from .system import CurvedRBSystem

    spec = SearchSpec(algebra, filters=frozenset(("validSystem",) + tuple(require)))
    idx, masks = evaluate(spec, workers)
    q, n = algebra.field.p, algebra.dim
    fmask = spec.filter_mask
    for i, m in zip(idx, masks):
        if (m & fmask) == fmask:
            R, S = decode(q, n, np.array([i]))
            yield int(i), int(m), CurvedRBSystem.build(algebra, R[0], S[0])


@dataclass(frozen=True)
class Counterexample:
    claim: str
    index: int
    system: object
    detail: object = None


def _leibniz_witness(sys):
    from .cochain import basis_cochains, leibniz_residual_batch

    A = sys.algebra
    for m in range(2):
        for k in range(2):
            f, g = basis_cochains(A, m), basis_cochains(A, k)
            fi, gi = np.meshgrid(np.arange(len(f)), np.arange(len(g)), indexing="ij")
            res = leibniz_residual_batch(sys, f[fi.ravel()], g[gi.ravel()])
            rows = np.flatnonzero(np.any(res.reshape(len(res), -1) != 0, axis=1))
            if len(rows):
                r = int(rows[0])
                return {"degrees": [m, k], "f": int(fi.ravel()[r]), "g": int(gi.ravel()[r])}
    return None


def _literal_witness(sys):
    from .cochain import LITERAL, basis_cochains, d_squared_residual_batch

    res = d_squared_residual_batch(sys, basis_cochains(sys.algebra, 0), LITERAL)
    rows = np.flatnonzero(np.any(res.reshape(len(res), -1) != 0, axis=1))
    return {"degree": 0, "basis_element": int(rows[0])} if len(rows) else None


def find_counterexample(spec: SearchSpec, claim: str, workers: Optional[int] = None) -> Optional[Counterexample]:
    """First valid candidate (in candidate order) that satisfies the filters and breaks ``claim``."""
    from .system import CurvedRBSystem, check_curvature_balance, star_associativity
    from .prelie import check_prelie

    if claim not in CLAIMS:
        raise ValueError(f"unknown claim {claim!r}; expected one of {CLAIMS}")
    idx, masks = evaluate(spec, workers)
    need = spec.filter_mask | BIT["validSystem"]
    q, n = spec.field.p, spec.algebra.dim
    A = spec.algebra

    for i, m in zip(idx, masks):
        m = int(m)
        if (m & need) != need:
            continue
        if claim == "starNonAssociative" and m & BIT["starAssociative"]:
            continue
        if claim == "prelieFails" and m & BIT["prelie"]:
            continue
        if claim == "leibnizFailsWhenRneqS" and m & BIT["equalRS"]:
            continue
        R, S = decode(q, n, np.array([i]))
        sys = CurvedRBSystem.build(A, R[0], S[0])
        # re-verify through the per-system code paths
        if not sys.is_valid:
            raise AssertionError(f"search flagged an invalid system as valid at {i}")
        if claim == "starNonAssociative":
            rep = star_associativity(sys)
            assert not rep.ok
            return Counterexample(claim, int(i), sys, {
                "associator_witness": list(rep.violations[0]),
                "balanced": bool(check_curvature_balance(A, sys.omega)),
            })
        if claim == "prelieFails":
            v = check_prelie(sys)
            assert not v.ok
            return Counterexample(claim, int(i), sys, {"triple": list(v.witness)})
        if claim == "leibnizFailsWhenRneqS":
            w = _leibniz_witness(sys)
            if w is not None:
                return Counterexample(claim, int(i), sys, w)
        if claim == "literalDsquaredFails":
            w = _literal_witness(sys)
            if w is not None:
                return Counterexample(claim, int(i), sys, w)
    return None
