"""Definitions of the bundled corpus (regenerate the JSON with scripts/build_corpus.py)."""

from __future__ import annotations

from .algebra import (
    LinearOperator,
    base_field_algebra,
    casimir,
    dual_numbers,
    left_unit_algebra,
    matrix_algebra,
    null_algebra,
    split_algebra,
)
from .scalars import QQ, GF
from .system import (
    CurvedRBSystem,
    from_centralizing_tensors,
    from_weight_curved,
)


def corpus_algebras():
    algs = []
    for F in (GF(2), GF(3)):
        algs += [null_algebra(F, 1), base_field_algebra(F), null_algebra(F, 2), dual_numbers(F), split_algebra(F), left_unit_algebra(F)]
    algs += [base_field_algebra(QQ), dual_numbers(QQ), matrix_algebra(QQ, 2)]
    return {A.name: A for A in algs}


def corpus_systems():
    F2 = GF(2)
    one = base_field_algebra(F2)
    qdual = dual_numbers(QQ)
    q1 = base_field_algebra(QQ)
    m2 = matrix_algebra(QQ, 2)
    cas = casimir(m2)
    zero_t = type(cas)(m2, QQ.zeros((4, 4)))
    # left multiplication by x = 1 + e2 on Q[x]/(x^2): derived curvature is kappa * mu, kappa = -(1 + e2)^2
    lx = LinearOperator(qdual, [[1, 0], [1, 1]])
    return {
        "f2_dim1_idid": CurvedRBSystem.build(one, [[1]], [[1]], one.mul),
        "f2_dim1_zero_id": CurvedRBSystem.build(one, [[0]], [[1]]),
        "f2_dual2_nonbalanced": CurvedRBSystem.build(dual_numbers(F2), [[0, 1], [0, 0]], [[0, 1], [0, 0]]),
        "qx2_nonbalanced": CurvedRBSystem.build(qdual, [[0, 1], [0, 0]], [[0, 1], [0, 0]]),
        "qx2_kappa": CurvedRBSystem.build(qdual, lx, lx),
        "q_dim1_weight": from_weight_curved(q1, LinearOperator(q1, [[-1]]), 1),
        "m2_casimir": from_centralizing_tensors(m2, cas, zero_t),
        "m2_casimir_rs": from_centralizing_tensors(m2, cas, cas),
    }
