"""Curved Rota-Baxter systems ``(A, R, S, omega)``.

The defining identities, on all ``a, b``::

    R(a) R(b) = R(R(a) b + a S(b)) + omega(a (x) b)
    S(a) S(b) = S(R(a) b + a S(b)) + omega(a (x) b)

``R(a) b + a S(b)`` is the star product ``a * b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (
    Algebra,
    AssociativityReport,
    BilinearMap,
    Element,
    LinearOperator,
    TensorSquareElement,
    Verdict,
    associativity_report,
    central_mask,
    find_unit,
    is_central,
    is_centralizing,
    nonzero_indices,
)
from .errors import InternalInconsistency, PreconditionError
from .scalars import FieldSpec

# -- raw tensor kernels (shared with the search and cochain modules) ------


def star_tensor(F: FieldSpec, c, R, S) -> np.ndarray:
    """``[i, j, k]``: coefficient of e_k in R(e_i) e_j + e_i S(e_j)."""
    return F.reduce(F.einsum("ai,ajk->ijk", R, c) + F.einsum("bj,ibk->ijk", S, c))


def curvature_candidate(F: FieldSpec, c, T, star) -> np.ndarray:
    """``T(a) T(b) - T(a * b)`` on basis pairs, for ``T`` one of R, S."""
    return F.reduce(F.einsum("ai,bj,abk->ijk", T, T, c) - F.einsum("km,ijm->ijk", T, star))


def balance_defect(F: FieldSpec, c, w) -> np.ndarray:
    """``[a, b, c, k]``: a w(b (x) c) - w(a (x) b) c."""
    return F.reduce(F.einsum("bcm,amk->abck", w, c) - F.einsum("abm,mck->abck", w, c))


# -- reports --------------------------------------------------------------


@dataclass(frozen=True)
class SystemReport:
    residual_r: np.ndarray  # [i, j, k] residual of the R-identity on (e_i, e_j)
    residual_s: np.ndarray
    violations_r: list
    violations_s: list

    @property
    def ok(self) -> bool:
        return not self.violations_r and not self.violations_s

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class CurvatureDefect:
    omega_r: BilinearMap
    omega_s: BilinearMap
    delta: BilinearMap

    @property
    def consistent(self) -> bool:
        return self.delta.is_zero()


@dataclass(frozen=True, eq=False)
class CurvedRBSystem:
    algebra: Algebra
    R: LinearOperator
    S: LinearOperator
    omega: BilinearMap

    def __post_init__(self):
        self.algebra.require_same(self.R, self.S, self.omega)

    @classmethod
    def build(cls, algebra: Algebra, R, S, omega=None) -> "CurvedRBSystem":
        """Wrap raw matrices; a missing ``omega`` is derived from the R-identity."""
        R = R if isinstance(R, LinearOperator) else LinearOperator(algebra, R)
        S = S if isinstance(S, LinearOperator) else LinearOperator(algebra, S)
        if omega is None:
            omega = derive_curvature(algebra, R, S).omega_r
        elif not isinstance(omega, BilinearMap):
            omega = BilinearMap(algebra, omega)
        return cls(algebra, R, S, omega)

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @cached_property
    def star_tensor(self) -> np.ndarray:
        t = star_tensor(self.field, self.algebra.mul, self.R.matrix, self.S.matrix)
        t.setflags(write=False)
        return t

    @cached_property
    def status(self) -> SystemReport:
        return check_system(self)

    @property
    def is_valid(self) -> bool:
        return self.status.ok

    def require_valid(self):
        if not self.status.ok:
            bad = (self.status.violations_r or self.status.violations_s)[0]
            raise PreconditionError("not a curved Rota-Baxter system", bad)

    @property
    def equal_operators(self) -> bool:
        return self.R == self.S


def check_system(sys: CurvedRBSystem) -> SystemReport:
    F, c = sys.field, sys.algebra.mul
    star = sys.star_tensor
    w = sys.omega.tensor
    res_r = F.reduce(curvature_candidate(F, c, sys.R.matrix, star) - w)
    res_s = F.reduce(curvature_candidate(F, c, sys.S.matrix, star) - w)
    return SystemReport(res_r, res_s, nonzero_indices(res_r, 2), nonzero_indices(res_s, 2))


def star(sys: CurvedRBSystem, a: Element, b: Element) -> Element:
    sys.algebra.require_same(a, b)
    return sys.R(a) * b + a * sys.S(b)


def star_product(sys: CurvedRBSystem) -> BilinearMap:
    return BilinearMap(sys.algebra, sys.star_tensor)


def star_associativity(sys: CurvedRBSystem) -> AssociativityReport:
    return associativity_report(sys.field, sys.star_tensor)


def check_curvature_balance(A: Algebra, w: BilinearMap) -> Verdict:
    """``a w(b (x) c) = w(a (x) b) c`` on all basis triples; witness ``(a, b, c)``."""
    A.require_same(w)
    bad = nonzero_indices(balance_defect(A.field, A.mul, w.tensor), 3)
    return Verdict(not bad, bad[0] if bad else None)


def extract_kappa(A: Algebra, w: BilinearMap) -> Element:
    """The central ``kappa`` with ``w(a (x) b) = kappa a b``, read off as ``w(1 (x) 1)``."""
    one = A.one()
    if one is None:
        raise PreconditionError("algebra has no unit")
    balance = check_curvature_balance(A, w)
    if not balance:
        raise PreconditionError("curvature is not balanced", balance.witness)
    kappa = w(one, one)
    central = is_central(A, kappa)
    factored = BilinearMap.product(A, kappa)
    if not central or factored != w:
        raise InternalInconsistency(
            "balanced curvature on a unital algebra failed to factor as kappa * mu"
        )
    return kappa


def derive_curvature(A: Algebra, R: LinearOperator, S: LinearOperator) -> CurvatureDefect:
    A.require_same(R, S)
    F, c = A.field, A.mul
    st = star_tensor(F, c, R.matrix, S.matrix)
    wr = curvature_candidate(F, c, R.matrix, st)
    ws = curvature_candidate(F, c, S.matrix, st)
    return CurvatureDefect(BilinearMap(A, wr), BilinearMap(A, ws), BilinearMap(A, F.reduce(wr - ws)))


# -- constructors ---------------------------------------------------------


def weight_defect(A: Algebra, R: LinearOperator, lam) -> np.ndarray:
    """R(a)R(b) - R(R(a) b + a R(b) + lam a b) on basis pairs."""
    F, c, M = A.field, A.mul, R.matrix
    lam = F.coerce(lam)
    inner = F.reduce(star_tensor(F, c, M, M) + c * lam)
    return F.reduce(F.einsum("ai,bj,abk->ijk", M, M, c) - F.einsum("km,ijm->ijk", M, inner))


def _require_weight(A, R, lam):
    A.require_same(R)
    bad = nonzero_indices(weight_defect(A, R, lam), 2)
    if bad:
        raise PreconditionError(f"R is not a Rota-Baxter operator of weight {lam}", bad[0])


def from_weight_shift(A: Algebra, R: LinearOperator, lam) -> CurvedRBSystem:
    """``(A, R, R + lam id, 0)`` for a weight-``lam`` Rota-Baxter operator ``R``."""
    _require_weight(A, R, lam)
    S = R + lam * LinearOperator.identity(A)
    return CurvedRBSystem(A, R, S, BilinearMap.zero(A))


def from_weight_curved(A: Algebra, R: LinearOperator, lam) -> CurvedRBSystem:
    """``(A, R, R, lam R(ab))`` for a weight-``lam`` Rota-Baxter operator ``R``."""
    _require_weight(A, R, lam)
    F = A.field
    w = F.scale(lam, F.einsum("km,ijm->ijk", R.matrix, A.mul))
    return CurvedRBSystem(A, R, R, BilinearMap(A, w))


def sandwich_operator(A: Algebra, t: TensorSquareElement) -> LinearOperator:
    """``a -> sum t1 a t2``."""
    F, c = A.field, A.mul
    return LinearOperator(A, F.einsum("ij,imp,pjk->km", t.tensor, c, c))


def from_centralizing_tensors(
    A: Algebra, r: TensorSquareElement, s: TensorSquareElement
) -> CurvedRBSystem:
    for name, t in (("r", r), ("s", s)):
        v = is_centralizing(A, t)
        if not v:
            raise PreconditionError(f"{name} does not commute with e{v.witness + 1}", (name, v.witness))
    F, c = A.field, A.mul
    R = sandwich_operator(A, r)
    S = sandwich_operator(A, s)
    # omega(a (x) b) = -(sum r1 a r2)(sum s1 b s2)
    w = F.reduce(-F.einsum("pi,qj,pqk->ijk", R.matrix, S.matrix, c))
    sys = CurvedRBSystem(A, R, S, BilinearMap(A, w))
    values = np.concatenate([R.matrix.T, S.matrix.T, w.reshape(-1, A.dim)])
    if not np.all(central_mask(F, c, values)):
        raise InternalInconsistency("sandwich operators produced a non-central value")
    return sys


def unital_balanced_kappa(sys: CurvedRBSystem) -> Element | None:
    """kappa for a valid balanced system on a unital algebra, else None."""
    if find_unit(sys.algebra) is None or not check_curvature_balance(sys.algebra, sys.omega):
        return None
    return extract_kappa(sys.algebra, sys.omega)
