"""Acceptance criteria 1-11, each run at its stated scale and time limit.

Every test records one line in ``RESULTS``; ``conftest.py`` prints them at the
end of the session.  Run ``python tests/test_acceptance.py`` for the same
lines without pytest.
"""

import time

import numpy as np
import pytest

from helpers import all_pairs, dim2_algebras, valid_systems
from rbforge.algebra import (
    BilinearMap,
    LinearOperator,
    TensorSquareElement,
    casimir,
    is_bimodule_map,
    is_central,
    is_centralizing,
)
from rbforge.cochain import (
    LITERAL,
    Cochain,
    all_cochains,
    basis_cochains,
    d_squared_residual_batch,
    deformed_associator,
    differential,
    is_cocycle,
    leibniz_residual_batch,
    nonzero_rows,
    random_cochains,
)
from rbforge.corpus import corpus_algebras, corpus_systems
from rbforge.prelie import antisym_curvature_central, check_prelie, prelie_defect_tensor, circle_tensor
from rbforge.search import BIT, SearchSpec, classify, evaluate
from rbforge.system import (
    CurvedRBSystem,
    check_curvature_balance,
    check_system,
    derive_curvature,
    extract_kappa,
    from_centralizing_tensors,
    star_associativity,
)
from rbforge.twistor import check_bowtie, check_omega_square, mu_after, twistor_from_system

RESULTS = {}

ALGEBRAS = corpus_algebras()
SYSTEMS = corpus_systems()
F2_DIM2 = dim2_algebras(ALGEBRAS, 2)
F3_DIM2 = dim2_algebras(ALGEBRAS, 3)
UNITAL_F2 = [ALGEBRAS["f2_dual2"], ALGEBRAS["f2_split2"], ALGEBRAS["f2_dim1"]]


def record(key, ok, elapsed, limit, detail):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    RESULTS[key] = f"criterion {key:<14s} {status}  {elapsed:7.2f}s (limit {limit:g}s)  {detail}"
    return status == "PASS"


def _criterion1_family():
    fam = []
    for A in F2_DIM2:
        fam += valid_systems(A)
    return fam


# -- 1 --------------------------------------------------------------------


def test_criterion_01_definition_soundness():
    t0 = time.perf_counter()
    exceptions, valid = 0, 0
    for A in F2_DIM2:
        for R, S in all_pairs(A):
            d = derive_curvature(A, LinearOperator(A, R), LinearOperator(A, S))
            if not d.consistent:
                continue
            valid += 1
            sys = CurvedRBSystem.build(A, R, S, d.omega_r)
            again = derive_curvature(A, sys.R, sys.S)
            if not check_system(sys) or again.omega_r != sys.omega or again.omega_s != sys.omega:
                exceptions += 1
    elapsed = time.perf_counter() - t0
    assert record("1", exceptions == 0, elapsed, 5,
                  f"{valid} valid of {256 * len(F2_DIM2)} pairs, {exceptions} exceptions")


# -- 2 --------------------------------------------------------------------


def test_criterion_02_star_associativity_iff_balance():
    fam = _criterion1_family()
    t0 = time.perf_counter()
    disagree = sum(
        star_associativity(s).ok != bool(check_curvature_balance(s.algebra, s.omega)) for s in fam
    )
    elapsed = time.perf_counter() - t0
    assert record("2", disagree == 0, elapsed, 5, f"{len(fam)} systems, {disagree} disagreements")


# -- 3 --------------------------------------------------------------------


def test_criterion_03_unital_kappa():
    t0 = time.perf_counter()
    checked, bad = 0, 0
    for A in UNITAL_F2:
        for sys in valid_systems(A):
            if not check_curvature_balance(A, sys.omega):
                continue
            checked += 1
            kappa = extract_kappa(A, sys.omega)
            ok = bool(is_central(A, kappa))
            for a in A.basis_elements():
                for b in A.basis_elements():
                    ok &= sys.omega(a, b) == kappa * (a * b)
            bad += not ok
    elapsed = time.perf_counter() - t0
    assert record("3", bad == 0 and checked > 0, elapsed, 5, f"{checked} balanced systems, {bad} failures")


# -- 4 --------------------------------------------------------------------


def test_criterion_04_pseudotwistor():
    t0 = time.perf_counter()
    checked, bad = 0, 0
    for A in F2_DIM2 + [ALGEBRAS["f2_dim1"]]:
        for sys in valid_systems(A):
            if not check_curvature_balance(A, sys.omega):
                continue
            checked += 1
            T, C = twistor_from_system(sys)
            ok = check_bowtie(A, T, C, sys.omega).ok and check_omega_square(A, sys.omega)
            ok &= bool(np.array_equal(mu_after(A, T.rank4), sys.star_tensor))
            bad += not ok
    elapsed = time.perf_counter() - t0
    assert record("4", bad == 0 and checked > 0, elapsed, 10, f"{checked} balanced systems, {bad} failures")


# -- 5 --------------------------------------------------------------------


def test_criterion_05_d_squared_corrected():
    fam = _criterion1_family()
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    failing, failing_balanced = 0, 0
    cochains = {A.name: [all_cochains(A, 0), all_cochains(A, 1)] for A in F2_DIM2}
    deg2 = {A.name: random_cochains(A, 2, 200, rng) for A in F2_DIM2}
    for sys in fam:
        A = sys.algebra
        nonzero = any(
            len(nonzero_rows(d_squared_residual_batch(sys, f)))
            for f in cochains[A.name] + [deg2[A.name]]
        )
        if nonzero:
            failing += 1
            failing_balanced += bool(check_curvature_balance(A, sys.omega))
    elapsed = time.perf_counter() - t0
    detail = (f"{len(fam)} systems, {failing} with nonzero residual "
              f"({failing_balanced} of them balanced)")
    assert record("5", failing == 0, elapsed, 60, detail)


# -- 6 --------------------------------------------------------------------


def _literal_degree0_nonzero(sys):
    res = d_squared_residual_batch(sys, basis_cochains(sys.algebra, 0), LITERAL)
    return len(nonzero_rows(res)) > 0


def test_criterion_06_literal_convention_witness():
    t0 = time.perf_counter()
    witnesses = sorted(name for name, sys in SYSTEMS.items() if _literal_degree0_nonzero(sys))
    elapsed = time.perf_counter() - t0
    assert record("6 (existence)", bool(witnesses), elapsed, 1, f"witnesses: {', '.join(witnesses) or 'none'}")


def test_criterion_06_pinned_regression():
    t0 = time.perf_counter()
    sys = SYSTEMS["f2_dim1_idid"]
    nonzero = _literal_degree0_nonzero(sys)
    elapsed = time.perf_counter() - t0
    assert record("6 (pinned)", nonzero, elapsed, 1,
                  f"F2 dim-1 (id, id, mu) literal degree-0 residual {'nonzero' if nonzero else 'zero'}")


# -- 7 --------------------------------------------------------------------


def _leibniz_ok(sys, families):
    for m in (0, 1):
        for n in (0, 1):
            f, g = families[m], families[n]
            fi, gi = np.meshgrid(np.arange(len(f)), np.arange(len(g)), indexing="ij")
            if len(nonzero_rows(leibniz_residual_batch(sys, f[fi.ravel()], g[gi.ravel()]))):
                return False
    f2, g2 = families[2]
    return not len(nonzero_rows(leibniz_residual_batch(sys, f2, g2)))


def test_criterion_07_curved_dga():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    family = [s for s in SYSTEMS.values() if s.is_valid]
    for A in ALGEBRAS.values():
        if A.field.is_finite:
            family += [s for s in valid_systems(A) if s.equal_operators]
    checked, bad = 0, 0
    for sys in family:
        A = sys.algebra
        if not sys.equal_operators or not is_bimodule_map(A, sys.omega):
            continue
        checked += 1
        if A.field.is_finite and A.field.p ** (A.dim**2) <= 81:
            low = [all_cochains(A, 0), all_cochains(A, 1)]
        else:  # the Leibniz defect is bilinear, so the basis decides it
            low = [basis_cochains(A, 0), basis_cochains(A, 1)]
        pairs = (random_cochains(A, 2, 4, rng), random_cochains(A, 2, 4, rng))
        ok = _leibniz_ok(sys, low + [pairs])
        ok &= differential(sys, Cochain.from_bilinear(sys.omega)).is_zero()
        bad += not ok
    elapsed = time.perf_counter() - t0
    assert record("7", bad == 0 and checked > 0, elapsed, 60, f"{checked} systems, {bad} failures")


# -- 8 --------------------------------------------------------------------


def test_criterion_08_deformation_iff_cocycle():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    null = ALGEBRAS["f2_null2"]
    disagree, total = 0, 0
    for k in range(2**8):
        bits = [(k >> b) & 1 for b in range(8)]
        w = BilinearMap(null, np.array(bits, dtype=np.int64).reshape(2, 2, 2))
        disagree += deformed_associator(null, w).infinitesimally_associative != bool(is_cocycle(null, w))
        total += 1
    others = [A for name, A in sorted(ALGEBRAS.items()) if name != "f2_null2"]
    for k in range(500):
        A = others[k % len(others)]
        if A.field.is_finite:
            raw = rng.integers(0, A.field.p, size=(A.dim,) * 3)
        else:
            raw = rng.integers(-2, 3, size=(A.dim,) * 3)
        # every third sample on a unital algebra is kappa * mu, a cocycle
        if k % 3 == 0 and A.one() is not None:
            w = BilinearMap.product(A, A.element(raw.reshape(-1)[: A.dim].tolist()))
        else:
            w = BilinearMap(A, raw.tolist())
        disagree += deformed_associator(A, w).infinitesimally_associative != bool(is_cocycle(A, w))
        total += 1
    elapsed = time.perf_counter() - t0
    assert record("8", disagree == 0, elapsed, 30, f"{total} bilinear maps, {disagree} disagreements")


# -- 9 --------------------------------------------------------------------


def test_criterion_09_prelie_iff_central():
    t0 = time.perf_counter()
    fam = _criterion1_family()
    for A in F3_DIM2:
        fam += valid_systems(A)
    disagree = 0
    for sys in fam:
        F = sys.field
        defect = prelie_defect_tensor(F, circle_tensor(F, sys.algebra.mul, sys.R.matrix, sys.S.matrix))
        disagree += bool(np.all(defect == 0)) != bool(antisym_curvature_central(sys))
    # the vectorised search flags give a second, independent route
    flag_disagree = 0
    for A in F2_DIM2 + F3_DIM2:
        _, masks = evaluate(SearchSpec(A), workers=1)
        vm = masks[(masks & BIT["validSystem"]) != 0]
        flag_disagree += int(np.count_nonzero(((vm & BIT["prelie"]) != 0) != ((vm & BIT["antisymCentral"]) != 0)))
    elapsed = time.perf_counter() - t0
    non_prelie = sum(not check_prelie(s) for s in fam)
    assert record("9", disagree == 0 and flag_disagree == 0, elapsed, 120,
                  f"{len(fam)} systems ({non_prelie} not pre-Lie), {disagree}+{flag_disagree} disagreements")


# -- 10 -------------------------------------------------------------------


def test_criterion_10_casimir_example():
    t0 = time.perf_counter()
    M2 = ALGEBRAS["q_m2"]
    F = M2.field
    cas = casimir(M2)
    zero = TensorSquareElement(M2, F.zeros((4, 4)))
    ok = bool(is_centralizing(M2, cas)) and bool(is_centralizing(M2, zero))
    one = M2.one()
    for s in (zero, cas):
        sys = from_centralizing_tensors(M2, cas, s)
        ok &= check_system(sys).ok and check_prelie(sys).ok
        for a in M2.basis_elements():
            tr = a.coeffs[0] + a.coeffs[3]
            ok &= sys.R(a) == tr * one
            ok &= is_central(M2, sys.R(a)).ok and is_central(M2, sys.S(a)).ok
            for b in M2.basis_elements():
                ok &= is_central(M2, sys.omega(a, b)).ok
    elapsed = time.perf_counter() - t0
    assert record("10", ok, elapsed, 1, "r = Casimir with s = 0 and s = Casimir")


# -- 11 -------------------------------------------------------------------


def test_criterion_11_determinism():
    t0 = time.perf_counter()
    same = all(
        classify(SearchSpec(A), workers=1).to_json() == classify(SearchSpec(A), workers=8).to_json()
        for A in F3_DIM2
    )
    elapsed = time.perf_counter() - t0
    assert record("11", same, elapsed, 120, f"{len(F3_DIM2)} F3 dim-2 algebras, 1 vs 8 workers")


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS.values()))
    sys.exit(0 if all(" PASS " in line for line in RESULTS.values()) else 1)
