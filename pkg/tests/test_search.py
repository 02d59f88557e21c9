import json
from pathlib import Path

import numpy as np
import pytest

from helpers import all_pairs, dim2_algebras
from rbforge.algebra import LinearOperator, base_field_algebra, is_bimodule_map, null_algebra
from rbforge.cochain import Cochain, check_leibniz, is_cocycle
from rbforge.errors import BudgetExceededError
from rbforge.prelie import antisym_curvature_central, check_prelie
from rbforge.scalars import GF, QQ
from rbforge.search import (
    BIT,
    FLAGS,
    RandomSample,
    SearchSpec,
    candidate_indices,
    classify,
    decode,
    encode,
    enumerate_pairs,
    evaluate,
    find_counterexample,
    valid_systems,
)
from rbforge.system import CurvedRBSystem, check_curvature_balance, derive_curvature, star_associativity

FIXTURE = Path(__file__).parent / "fixtures" / "search_counts.json"


def oracle_flags(A, R, S):
    """Every search flag recomputed through the per-system modules."""
    d = derive_curvature(A, LinearOperator(A, R), LinearOperator(A, S))
    if not d.consistent:
        return set()
    sys = CurvedRBSystem.build(A, R, S)
    W = sys.omega.tensor
    flags = {"validSystem"}
    if check_curvature_balance(A, sys.omega):
        flags.add("balanced")
    if is_bimodule_map(A, sys.omega):
        flags.add("bimodule")
    if np.array_equal(W, W.swapaxes(0, 1)):
        flags.add("symmetricCurvature")
    if is_cocycle(A, sys.omega):
        flags.add("cocycle")
    if check_prelie(sys):
        flags.add("prelie")
    if sys.equal_operators:
        flags.add("equalRS")
    if star_associativity(sys).ok:
        flags.add("starAssociative")
    if antisym_curvature_central(sys):
        flags.add("antisymCentral")
    return flags


def test_enumeration_sizes():
    assert [(int(R[0, 0]), int(S[0, 0])) for R, S in enumerate_pairs(SearchSpec(null_algebra(GF(2), 1)))] == [
        (0, 0), (0, 1), (1, 0), (1, 1)
    ]
    assert sum(1 for _ in enumerate_pairs(SearchSpec(null_algebra(GF(2), 2)))) == 256
    assert sum(1 for _ in enumerate_pairs(SearchSpec(null_algebra(GF(3), 2)))) == 6561


def test_enumeration_order_is_lexicographic():
    pairs = list(enumerate_pairs(SearchSpec(null_algebra(GF(2), 2))))
    keys = [tuple(R.ravel()) + tuple(S.ravel()) for R, S in pairs]
    assert keys == sorted(keys)
    assert [encode(2, R, S) for R, S in pairs] == list(range(256))


def test_decode_encode_round_trip(rng):
    idx = rng.integers(0, 3**8, size=50)
    Rs, Ss = decode(3, 2, idx)
    assert [encode(3, R, S) for R, S in zip(Rs, Ss)] == idx.tolist()


def test_null_algebra_is_all_valid():
    rep = classify(SearchSpec(null_algebra(GF(2), 2)), workers=1)
    assert rep.flag_totals["validSystem"] == 256
    assert rep.flag_totals["symmetricCurvature"] == 256  # w = 0 everywhere


def test_equal_operators_are_valid(algebras):
    for A in dim2_algebras(algebras, 3):
        rep = classify(SearchSpec(A, filters={"equalRS"}), workers=1)
        assert rep.flag_totals["validSystem"] == rep.examined - rep.excluded == 81


def test_counts_sum_to_examined(algebras):
    for A in dim2_algebras(algebras, 2):
        rep = classify(SearchSpec(A), workers=1)
        assert sum(rep.counts.values()) == rep.examined == 256
        assert rep.excluded == 0


def test_flags_match_per_system_oracle(algebras):
    for A in dim2_algebras(algebras, 2) + [algebras["f2_dim1"], algebras["f3_tri2"]]:
        idx, masks = evaluate(SearchSpec(A), workers=1)
        # the F3 family is sampled to keep the run short
        step = 1 if A.field.p == 2 else 7
        pairs = list(all_pairs(A))
        for i in range(0, len(pairs), step):
            R, S = pairs[i]
            expected = oracle_flags(A, R, S)
            got = {f for f in FLAGS if masks[i] & BIT[f]}
            assert got == expected, (A.name, i)


def test_pinned_counts():
    pinned = json.loads(FIXTURE.read_text())
    assert pinned["provenance"].startswith("derived by rbforge")
    from rbforge.corpus import corpus_algebras

    algs = corpus_algebras()
    for name, entry in pinned["algebras"].items():
        rep = classify(SearchSpec(algs[name]), workers=1)
        assert rep.counts == entry["counts"], name
        assert rep.flag_totals == entry["flag_totals"], name
        assert {k: v["index"] for k, v in rep.witnesses.items()} == entry["witnesses"], name
    assert pinned["algebras"]["f2_dual2"]["flag_totals"]["validSystem"] == 80


def test_witnesses_reverify(algebras):
    for A in dim2_algebras(algebras, 2) + dim2_algebras(algebras, 3):
        rep = classify(SearchSpec(A), workers=1)
        for key, w in rep.witnesses.items():
            R = np.array(w["R"], dtype=np.int64)
            S = np.array(w["S"], dtype=np.int64)
            assert encode(A.field.p, R, S) == w["index"]
            flags = oracle_flags(A, R, S)
            assert ("+".join(f for f in FLAGS if f in flags) or "invalid") == key


def test_equivalences_hold(algebras):
    for A in dim2_algebras(algebras, 2) + dim2_algebras(algebras, 3):
        rep = classify(SearchSpec(A), workers=1)
        assert rep.equivalences == {"starAssociative<->balanced": 0, "prelie<->antisymCentral": 0}


def test_pre_lie_is_not_vacuous(algebras):
    rep = classify(SearchSpec(algebras["f2_tri2"]), workers=1)
    assert 0 < rep.flag_totals["prelie"] < rep.flag_totals["validSystem"]


def test_worker_count_does_not_change_report(algebras):
    spec = SearchSpec(algebras["f3_dual2"])
    assert classify(spec, workers=1).to_json() == classify(spec, workers=3).to_json()


def test_random_mode_is_seeded(algebras):
    A = algebras["f3_split2"]
    a = candidate_indices(SearchSpec(A, mode=RandomSample(100, seed=5)))
    b = candidate_indices(SearchSpec(A, mode=RandomSample(100, seed=5)))
    c = candidate_indices(SearchSpec(A, mode=RandomSample(100, seed=6)))
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert len(set(a.tolist())) == 100
    rep = classify(SearchSpec(A, mode=RandomSample(100, seed=5)), workers=1)
    assert rep.examined == 100 and rep.mode == "random(count=100,seed=5)"


def test_filters_restrict(algebras):
    A = algebras["f2_dual2"]
    full = classify(SearchSpec(A), workers=1)
    bal = classify(SearchSpec(A, filters={"balanced"}), workers=1)
    assert bal.examined - bal.excluded == full.flag_totals["balanced"]
    assert all("balanced" in k for k in bal.counts)


def test_spec_errors():
    with pytest.raises(ValueError):
        SearchSpec(null_algebra(GF(2), 2), filters={"nonsense"})
    with pytest.raises(ValueError):
        classify(SearchSpec(null_algebra(QQ, 1)))
    with pytest.raises(BudgetExceededError):
        classify(SearchSpec(null_algebra(GF(3), 2), budget=1000))
    with pytest.raises(BudgetExceededError):
        classify(SearchSpec(null_algebra(GF(2), 2), mode=RandomSample(10, 0), budget=5))
    with pytest.raises(ValueError):
        find_counterexample(SearchSpec(null_algebra(GF(2), 1)), "noSuchClaim")


def test_valid_systems_stream(algebras):
    A = algebras["f2_dual2"]
    found = list(valid_systems(A))
    assert len(found) == 80
    assert all(sys.is_valid for _, _, sys in found)
    assert [i for i, _, _ in found] == sorted(i for i, _, _ in found)


# -- counterexample mining ------------------------------------------------


def test_no_non_associative_balanced_system(algebras):
    for A in dim2_algebras(algebras, 2) + dim2_algebras(algebras, 3):
        assert find_counterexample(SearchSpec(A, filters={"balanced"}), "starNonAssociative", workers=1) is None


def test_unbalanced_systems_are_non_associative(algebras):
    cx = find_counterexample(SearchSpec(algebras["f2_dual2"]), "starNonAssociative", workers=1)
    assert cx is not None and not cx.detail["balanced"]
    assert not star_associativity(cx.system).ok


def test_no_pre_lie_failure_with_symmetric_curvature(algebras):
    for A in dim2_algebras(algebras, 2) + dim2_algebras(algebras, 3):
        spec = SearchSpec(A, filters={"symmetricCurvature"})
        assert find_counterexample(spec, "prelieFails", workers=1) is None


def test_leibniz_counterexample_reverifies(algebras):
    A = algebras["f2_tri2"]
    cx = find_counterexample(SearchSpec(A), "leibnizFailsWhenRneqS", workers=1)
    assert cx is not None and not cx.system.equal_operators
    m, n = cx.detail["degrees"]
    assert (m, n) == (0, 0)
    f = Cochain.from_element(A.basis(cx.detail["f"]))
    g = Cochain.from_element(A.basis(cx.detail["g"]))
    assert not check_leibniz(cx.system, f, g).is_zero()


def test_literal_counterexample_in_dimension_one():
    A = base_field_algebra(GF(2))
    cx = find_counterexample(SearchSpec(A), "literalDsquaredFails", workers=1)
    assert cx is not None
    assert cx.index == 1  # R = 0, S = id
    assert cx.system.R.matrix.tolist() == [[0]] and cx.system.S.matrix.tolist() == [[1]]
