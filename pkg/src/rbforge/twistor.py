"""Curved weak pseudotwistors on ``A (x) A``.

Layout: a map ``A^(x)2 -> A^(x)2`` is an ``n^2 x n^2`` matrix whose row and
column indices are paired as ``(i, j) -> i*n + j`` (row-major), acting on
columns like every other operator in the package.  ``A^(x)3`` uses
``(i, j, k) -> (i*n + j)*n + k``.  Internally the rank-4 / rank-6 views are
``T4[k, l, i, j]`` and ``C6[k, l, m, i, j, h]`` (outputs first).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    Algebra,
    AssociativityReport,
    BilinearMap,
    Verdict,
    associativity_report,
    nonzero_indices,
)
from .errors import PreconditionError, ShapeError
from .system import CurvedRBSystem, check_curvature_balance


@dataclass(frozen=True, eq=False)
class TwoTensorMap:
    algebra: Algebra
    matrix: np.ndarray  # n^2 x n^2

    def __post_init__(self):
        m = self.algebra.field.asarray(self.matrix)
        n2 = self.algebra.dim ** 2
        if m.shape != (n2, n2):
            raise ShapeError(f"A(x)A map must be {n2} x {n2}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def rank4(self) -> np.ndarray:
        n = self.algebra.dim
        return self.matrix.reshape(n, n, n, n)


@dataclass(frozen=True, eq=False)
class ThreeTensorMap:
    algebra: Algebra
    matrix: np.ndarray  # n^3 x n^3

    def __post_init__(self):
        m = self.algebra.field.asarray(self.matrix)
        n3 = self.algebra.dim ** 3
        if m.shape != (n3, n3):
            raise ShapeError(f"A(x)A(x)A map must be {n3} x {n3}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def rank6(self) -> np.ndarray:
        return self.matrix.reshape((self.algebra.dim,) * 6)


def _flat(t: np.ndarray, n: int, k: int) -> np.ndarray:
    return t.reshape(n**k, n**k)


def twistor_tensors(A: Algebra, R: np.ndarray, S: np.ndarray):
    """Raw T4 and C6 for ``T = R(x)id + id(x)S`` and its three-term companion."""
    F, n = A.field, A.dim
    I = F.identity(n)
    T4 = F.reduce(np.einsum("ki,lj->klij", R, I) + np.einsum("ki,lj->klij", I, S))
    C6 = F.reduce(
        np.einsum("ki,lj,mh->klmijh", R, R, I)
        + np.einsum("ki,lj,mh->klmijh", R, I, S)
        + np.einsum("ki,lj,mh->klmijh", I, S, S)
    )
    return T4, C6


def twistor_from_system(sys: CurvedRBSystem) -> tuple[TwoTensorMap, ThreeTensorMap]:
    sys.require_valid()
    balance = check_curvature_balance(sys.algebra, sys.omega)
    if not balance:
        raise PreconditionError("curvature is not balanced", balance.witness)
    A, n = sys.algebra, sys.algebra.dim
    T4, C6 = twistor_tensors(A, sys.R.matrix, sys.S.matrix)
    return TwoTensorMap(A, _flat(T4, n, 2)), ThreeTensorMap(A, _flat(C6, n, 3))


@dataclass(frozen=True)
class BowtieReport:
    left_residual: np.ndarray  # [k, l, i, j, h]: outputs (k, l), inputs (i, j, h)
    right_residual: np.ndarray
    left_violations: list
    right_violations: list

    @property
    def ok(self) -> bool:
        return not self.left_violations and not self.right_violations

    def __bool__(self):
        return self.ok


def mu_after(A: Algebra, T4: np.ndarray) -> np.ndarray:
    """``mu o T`` as a bilinear tensor ``[i, j, m]``."""
    return A.field.einsum("klij,klm->ijm", T4, A.mul)


def check_bowtie(A: Algebra, T: TwoTensorMap, C: ThreeTensorMap, w: BilinearMap) -> BowtieReport:
    """Both squares of the bow-tie diagram, each evaluated on its own."""
    A.require_same(T, C, w)
    F, c, n = A.field, A.mul, A.dim
    T4, C6, W = T.rank4, C.rank6, w.tensor
    I = F.identity(n)
    P = mu_after(A, T4)

    # T o (id (x) mu T)  vs  (id (x) mu) o C - id (x) w
    lhs = F.einsum("klim,jhm->klijh", T4, P)
    rhs = F.reduce(F.einsum("klmijh,lmq->kqijh", C6, c) - np.einsum("ki,jhq->kqijh", I, W))
    left = F.reduce(lhs - rhs)

    # T o (mu T (x) id)  vs  (mu (x) id) o C - w (x) id
    lhs = F.einsum("klmh,ijm->klijh", T4, P)
    rhs = F.reduce(F.einsum("ablijh,abq->qlijh", C6, c) - np.einsum("ijq,lh->qlijh", W, I))
    right = F.reduce(lhs - rhs)
    return BowtieReport(left, right, nonzero_indices(left, 5), nonzero_indices(right, 5))


def check_omega_square(A: Algebra, w: BilinearMap) -> bool:
    """``mu o (id (x) w) = mu o (w (x) id)`` on ``A^(x)3``, built from explicit maps."""
    A.require_same(w)
    F, c, n = A.field, A.mul, A.dim
    I = F.identity(n)
    # id (x) w and w (x) id as maps A^3 -> A^2, then composed with mu
    id_w = np.einsum("xa,bcy->xyabc", I, w.tensor)
    w_id = np.einsum("aby,xc->yxabc", w.tensor, I)
    top = F.einsum("xyabc,xyk->abck", id_w, c)
    bottom = F.einsum("xyabc,xyk->abck", w_id, c)
    return bool(np.all(top == bottom))


@dataclass(frozen=True)
class TwistedProduct:
    product: BilinearMap
    associativity: AssociativityReport


def twisted_product(A: Algebra, T: TwoTensorMap) -> TwistedProduct:
    A.require_same(T)
    P = mu_after(A, T.rank4)
    return TwistedProduct(BilinearMap(A, P), associativity_report(A.field, P))


def omega_square_verdict(A: Algebra, w: BilinearMap) -> Verdict:
    return Verdict(check_omega_square(A, w))
