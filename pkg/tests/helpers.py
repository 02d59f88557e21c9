"""Small independent oracles shared by the test modules."""

import itertools

import numpy as np

from rbforge.system import CurvedRBSystem, derive_curvature
from rbforge.algebra import LinearOperator


def operator_matrices(A):
    """Every n x n matrix over a small prime field, via itertools (not the search decoder)."""
    p, n = A.field.p, A.dim
    for flat in itertools.product(range(p), repeat=n * n):
        yield np.array(flat, dtype=np.int64).reshape(n, n)


def all_pairs(A):
    mats = list(operator_matrices(A))
    for R in mats:
        for S in mats:
            yield R, S


def valid_systems(A):
    """Per-system enumeration of valid systems with derived curvature."""
    out = []
    for R, S in all_pairs(A):
        Ro, So = LinearOperator(A, R), LinearOperator(A, S)
        if derive_curvature(A, Ro, So).consistent:
            out.append(CurvedRBSystem.build(A, Ro, So))
    return out


def dim2_algebras(algebras, p):
    return [A for name, A in sorted(algebras.items()) if name.startswith(f"f{p}_") and A.dim == 2]
