"""``rbforge`` command line.

Exit codes: 0 the system (or search) checks out, 1 the system is not a valid
curved Rota-Baxter system or fails the command's hypotheses, 2 input could
not be parsed or loaded, 3 an internal cross-check disagreed.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io
from .algebra import find_unit, is_bimodule_map, null_algebra
from .cochain import (
    LITERAL,
    DifferentialConvention,
    Cochain,
    degree_family,
    nonzero_rows,
    d_squared_residual_batch,
    deformed_associator,
    differential,
    is_cocycle,
    leibniz_residual_batch,
)
from .errors import (
    BudgetExceededError,
    InternalInconsistency,
    NonAssociativeError,
    PreconditionError,
    RBForgeError,
    ScalarParseError,
    ShapeError,
)
from .prelie import antisym_curvature_central, check_prelie
from .scalars import FieldSpec
from .search import CLAIMS, FLAGS, RandomSample, SearchSpec, classify, find_counterexample
from .system import (
    check_curvature_balance,
    derive_curvature,
    extract_kappa,
    star_associativity,
)
from .twistor import check_bowtie, check_omega_square, twisted_product, twistor_from_system

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


class Report(dict):
    def __init__(self, command: str, args: dict):
        super().__init__()
        self["rbforge-schema"] = io.SCHEMA_VERSION
        self["tool_version"] = __version__
        self["command"] = {"name": command, "args": args}
        self["verdicts"] = {}
        self["residuals"] = {}
        self["witnesses"] = {}


def _fmt(F, arr):
    return F.format_array(arr)


def _listify(w):
    if w is None:
        return None
    if isinstance(w, tuple):
        return [_listify(x) for x in w]
    return w


def _load(path):
    raw = io.read_json(path)
    return raw, io.system_from_dict(raw)


# -- commands -------------------------------------------------------------


def cmd_verify(args) -> tuple[Report, int]:
    raw, sys = _load(args.system)
    rep = Report("verify", {"system": str(args.system)})
    F, A = sys.field, sys.algebra
    status = sys.status
    v = rep["verdicts"]
    v["omega_derived"] = not io.omega_was_given(raw)
    if v["omega_derived"]:
        defect = derive_curvature(A, sys.R, sys.S)
        rep["residuals"]["delta"] = _fmt(F, defect.delta.tensor)
    v["valid_system"] = status.ok
    rep["residuals"]["identity_R"] = _fmt(F, status.residual_r)
    rep["residuals"]["identity_S"] = _fmt(F, status.residual_s)
    rep["witnesses"]["identity_R"] = [list(t) for t in status.violations_r]
    rep["witnesses"]["identity_S"] = [list(t) for t in status.violations_s]
    bal = check_curvature_balance(A, sys.omega)
    assoc = star_associativity(sys)
    v["balanced"] = bal.ok
    v["star_associative"] = assoc.ok
    rep["witnesses"]["balance"] = _listify(bal.witness)
    rep["witnesses"]["star_associator"] = [list(t) for t in assoc.violations]
    v["unital"] = find_unit(A) is not None
    if status.ok and bal.ok != assoc.ok:
        raise InternalInconsistency("star associativity and curvature balance disagree")
    if status.ok and v["unital"] and bal.ok:
        v["kappa"] = _fmt(F, extract_kappa(A, sys.omega).coeffs)
    return rep, EXIT_OK if status.ok else EXIT_INVALID


def cmd_derive(args) -> tuple[Report, int]:
    _, sys = _load(args.system)
    A, F = sys.algebra, sys.field
    d = derive_curvature(A, sys.R, sys.S)
    rep = Report("derive", {"system": str(args.system)})
    rep["verdicts"]["consistent"] = d.consistent
    rep["residuals"]["omega_R"] = _fmt(F, d.omega_r.tensor)
    rep["residuals"]["omega_S"] = _fmt(F, d.omega_s.tensor)
    rep["residuals"]["delta"] = _fmt(F, d.delta.tensor)
    bad = np.argwhere(d.delta.tensor != 0)
    rep["witnesses"]["delta"] = [list(t) for t in sorted({(int(r[0]), int(r[1])) for r in bad})]
    return rep, EXIT_OK if d.consistent else EXIT_INVALID


def cmd_cochain(args) -> tuple[Report, int]:
    _, sys = _load(args.system)
    conv = DifferentialConvention(args.convention)
    rep = Report("cochain-check", {
        "system": str(args.system),
        "max_degree": args.max_degree,
        "convention": conv.value,
        "seed": args.seed,
        "samples": args.samples,
    })
    if not sys.is_valid:
        rep["verdicts"]["valid_system"] = False
        return rep, EXIT_INVALID
    A, F = sys.algebra, sys.field
    v, res, wit = rep["verdicts"], rep["residuals"], rep["witnesses"]
    v["valid_system"] = True
    v["balanced"] = check_curvature_balance(A, sys.omega).ok
    bim = is_bimodule_map(A, sys.omega)
    v["bimodule"] = bim.ok
    v["equal_operators"] = sys.equal_operators
    v["curved_dga_hypotheses"] = v["balanced"] and v["bimodule"] and v["equal_operators"]

    rng = np.random.default_rng(args.seed)
    families = {n: degree_family(A, n, 256, args.samples, rng) for n in range(args.max_degree + 1)}
    dsq = {}
    for n, fam in families.items():
        r = d_squared_residual_batch(sys, fam, conv)
        rows = nonzero_rows(r)
        dsq[str(n)] = {"checked": len(fam), "nonzero": int(len(rows))}
        if len(rows):
            wit.setdefault("d_squared", {})[str(n)] = {
                "cochain": _fmt(F, fam[rows[0]]),
                "residual": _fmt(F, r[rows[0]]),
            }
    res["d_squared"] = dsq
    v["d_squared_equals_bracket"] = all(x["nonzero"] == 0 for x in dsq.values())
    if conv is LITERAL and not v["d_squared_equals_bracket"]:
        rep["note"] = "literal convention: nonzero d^2 - [omega, -] is the documented discrepancy"

    leib = {}
    for m in range(args.max_degree + 1):
        for n in range(args.max_degree + 1 - m):
            f, g = families[m], families[n]
            fi, gi = np.meshgrid(np.arange(len(f)), np.arange(len(g)), indexing="ij")
            r = leibniz_residual_batch(sys, f[fi.ravel()], g[gi.ravel()], conv)
            leib[f"{m},{n}"] = {"checked": int(r.shape[0]), "nonzero": int(len(nonzero_rows(r)))}
    res["leibniz"] = leib
    v["leibniz"] = all(x["nonzero"] == 0 for x in leib.values())
    d_omega = differential(sys, Cochain.from_bilinear(sys.omega), conv)
    res["d_omega"] = _fmt(F, d_omega.tensor)
    v["d_omega_zero"] = d_omega.is_zero()
    coc = is_cocycle(A, sys.omega)
    v["cocycle"] = coc.ok
    wit["cocycle"] = _listify(coc.witness)
    dfm = deformed_associator(A, sys.omega)
    v["infinitesimally_associative"] = dfm.infinitesimally_associative
    v["deformation_quadratic_zero"] = bool(np.all(dfm.quadratic == 0))
    if v["infinitesimally_associative"] != coc.ok:
        raise InternalInconsistency("linear associator term and cocycle test disagree")
    return rep, EXIT_OK


def cmd_prelie(args) -> tuple[Report, int]:
    _, sys = _load(args.system)
    rep = Report("prelie-check", {"system": str(args.system)})
    if not sys.is_valid:
        rep["verdicts"]["valid_system"] = False
        return rep, EXIT_INVALID
    pl = check_prelie(sys)
    ac = antisym_curvature_central(sys)
    rep["verdicts"].update(valid_system=True, prelie=pl.ok, antisym_curvature_central=ac.ok)
    rep["witnesses"]["prelie"] = _listify(pl.witness)
    rep["witnesses"]["antisym_curvature_central"] = _listify(ac.witness)
    return rep, EXIT_OK


def cmd_twistor(args) -> tuple[Report, int]:
    _, sys = _load(args.system)
    A, F = sys.algebra, sys.field
    rep = Report("twistor-check", {"system": str(args.system)})
    v = rep["verdicts"]
    v["valid_system"] = sys.is_valid
    v["omega_square"] = check_omega_square(A, sys.omega)
    try:
        T, C = twistor_from_system(sys)
    except PreconditionError as exc:
        v["precondition"] = False
        rep["witnesses"]["precondition"] = {"message": str(exc), "witness": _listify(exc.witness)}
        return rep, EXIT_INVALID
    v["precondition"] = True
    bt = check_bowtie(A, T, C, sys.omega)
    tp = twisted_product(A, T)
    v["bowtie_left"] = not bt.left_violations
    v["bowtie_right"] = not bt.right_violations
    v["twisted_product_associative"] = tp.associativity.ok
    v["twisted_product_equals_star"] = bool(np.all(tp.product.tensor == sys.star_tensor))
    rep["residuals"]["bowtie_left"] = _fmt(F, bt.left_residual)
    rep["residuals"]["bowtie_right"] = _fmt(F, bt.right_residual)
    return rep, EXIT_OK


def _search_algebra(args):
    if args.algebra:
        return io.load_algebra(args.algebra)
    if args.field and args.dim:
        return null_algebra(FieldSpec.from_name(args.field), args.dim)
    raise ValueError("search needs --algebra, or --field together with --dim")


def cmd_search(args) -> tuple[Report, int]:
    A = _search_algebra(args)
    mode = "exhaustive" if args.mode == "exhaustive" else RandomSample(args.count, args.seed)
    spec = SearchSpec(A, mode, frozenset(args.filter or ()), args.budget)
    rep = Report("search", {
        "algebra": A.name,
        "field": str(A.field),
        "dim": A.dim,
        "mode": args.mode,
        "count": args.count if args.mode == "random" else None,
        "seed": args.seed,
        "filters": sorted(spec.filters),
        "budget": args.budget,
        "claim": args.claim,
    })
    t0 = time.perf_counter()
    report = classify(spec, workers=args.workers)
    rep["classification"] = report.to_dict(timings=False)
    rep["verdicts"]["equivalences_hold"] = all(v == 0 for v in report.equivalences.values())
    if args.claim:
        ce = find_counterexample(spec, args.claim, workers=args.workers)
        rep["verdicts"]["counterexample_found"] = ce is not None
        if ce is None:
            rep["counterexample"] = None
        else:
            rep["counterexample"] = {
                "claim": ce.claim,
                "index": ce.index,
                "system": io.system_to_dict(ce.system),
                "detail": ce.detail,
            }
    if args.timings:
        rep["timings"] = dict(report.timings, command_s=time.perf_counter() - t0)
    return rep, EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "derive": cmd_derive,
    "search": cmd_search,
    "cochain-check": cmd_cochain,
    "prelie-check": cmd_prelie,
    "twistor-check": cmd_twistor,
}


def _global_flags(p, suppress=False):
    d = (lambda x: argparse.SUPPRESS) if suppress else (lambda x: x)
    p.add_argument("--output", "-o", default=d(None), help="write the JSON report here")
    p.add_argument("--workers", type=int, default=d(None), help="worker processes (default: $RBFORGE_WORKERS or CPU count)")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--timings", action="store_true", default=d(False), help="add wall-clock timings to the report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rbforge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rbforge {__version__}")
    _global_flags(ap)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    for name, help_ in (
        ("verify", "check the defining identities, balance and star associativity"),
        ("derive", "derive the curvature from R and S"),
        ("prelie-check", "left pre-Lie identity and the centrality criterion"),
        ("twistor-check", "pseudotwistor diagrams and the twisted product"),
    ):
        add(name, help_).add_argument("system", help="system JSON file or corpus name")

    p = add("cochain-check", "d^2 = [omega, -], Leibniz, d omega, cocycle and deformation checks")
    p.add_argument("system")
    p.add_argument("--max-degree", type=int, default=1)
    p.add_argument("--convention", choices=[c.value for c in DifferentialConvention], default="corrected")
    p.add_argument("--samples", type=int, default=8, help="random cochains per degree on top of the basis")

    p = add("search", "enumerate (R, S) pairs over a finite field")
    p.add_argument("--algebra", help="corpus algebra name or algebra JSON file")
    p.add_argument("--field", help="with --dim: search the null algebra of this field, e.g. F2")
    p.add_argument("--dim", type=int)
    p.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--filter", action="append", choices=FLAGS)
    p.add_argument("--budget", type=int, default=1 << 20)
    p.add_argument("--claim", choices=CLAIMS)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rep, code = COMMANDS[args.command](args)
    except (io.FormatError, ScalarParseError, NonAssociativeError, ShapeError,
            FileNotFoundError, BudgetExceededError) as exc:
        print(f"rbforge: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    except (InternalInconsistency, AssertionError) as exc:
        print(f"rbforge: internal inconsistency: {exc}", file=_sys.stderr)
        return EXIT_INTERNAL
    except (RBForgeError, ValueError) as exc:
        print(f"rbforge: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        _sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
