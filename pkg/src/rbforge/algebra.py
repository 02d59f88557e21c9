"""Finite-dimensional associative algebras given by structure constants.

Conventions (fixed for the whole package and for the JSON files):

* ``mul[i, j, k]`` is the coefficient of ``e_k`` in ``e_i e_j``.
* A linear operator is a matrix ``M`` acting on columns: ``M[k, i]`` is the
  coefficient of ``e_k`` in the image of ``e_i``.
* A bilinear map ``w`` has ``w[i, j, k]`` = coefficient of ``e_k`` in
  ``w(e_i (x) e_j)``.
* An element ``t`` of ``A (x) A`` has ``t[i, j]`` = coefficient of ``e_i (x) e_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import AlgebraMismatchError, NonAssociativeError, ShapeError
from .scalars import FieldSpec, Scalar


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome of a predicate plus the first witness of failure."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return bool(self.ok)


@dataclass(frozen=True)
class AssociativityReport:
    associator: np.ndarray  # [i, j, k, l]: coefficient of e_l in (e_i e_j) e_k - e_i (e_j e_k)
    violations: list
    max_norm: object

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def associator_tensor(F: FieldSpec, prod: np.ndarray) -> np.ndarray:
    """(e_i e_j) e_k - e_i (e_j e_k) for an arbitrary bilinear product tensor."""
    left = F.einsum("ijm,mkl->ijkl", prod, prod)
    right = F.einsum("jkm,iml->ijkl", prod, prod)
    return F.reduce(left - right)


def nonzero_indices(arr: np.ndarray, lead: int) -> list[tuple]:
    """Sorted distinct index tuples (over the first ``lead`` axes) with a nonzero entry."""
    idx = np.argwhere(arr != 0)
    return sorted({tuple(int(v) for v in row[:lead]) for row in idx})


def associativity_report(F: FieldSpec, prod: np.ndarray) -> AssociativityReport:
    assoc = associator_tensor(F, prod)
    return AssociativityReport(assoc, nonzero_indices(assoc, 3), F.norm(assoc))


@dataclass(frozen=True, eq=False)
class Algebra:
    field: FieldSpec
    mul: np.ndarray
    unit: Optional[np.ndarray] = None
    name: str = ""
    check: bool = dc_field(default=True, repr=False)

    def __post_init__(self):
        F = self.field
        mul = F.asarray(self.mul)
        if mul.ndim != 3 or len(set(mul.shape)) != 1 or mul.shape[0] < 1:
            raise ShapeError(f"structure constants must be n x n x n, got {mul.shape}")
        object.__setattr__(self, "mul", _freeze(mul))
        if self.check:
            report = associativity_report(F, mul)
            if not report.ok:
                raise NonAssociativeError(
                    f"algebra {self.name or '<anonymous>'} is not associative; "
                    f"first violating basis triple {report.violations[0]}",
                    report.violations,
                )
        if self.unit is not None:
            u = F.asarray(self.unit)
            if u.shape != (self.dim,):
                raise ShapeError(f"unit must have length {self.dim}")
            object.__setattr__(self, "unit", _freeze(u))
            if not _is_unit(F, mul, u):
                raise ValueError("declared unit is not a two-sided identity")

    @property
    def dim(self) -> int:
        return self.mul.shape[0]

    def __repr__(self):
        return f"Algebra({self.name or '<anonymous>'}, {self.field}, dim={self.dim})"

    # -- elements ---------------------------------------------------------

    def element(self, coeffs) -> "Element":
        return Element(self, coeffs)

    def basis(self, i: int) -> "Element":
        v = self.field.zeros(self.dim)
        v[i] = self.field.one
        return Element(self, v)

    def basis_elements(self) -> list["Element"]:
        return [self.basis(i) for i in range(self.dim)]

    def zero(self) -> "Element":
        return Element(self, self.field.zeros(self.dim))

    def one(self) -> Optional["Element"]:
        u = self.unit if self.unit is not None else find_unit(self, _raw=True)
        return None if u is None else Element(self, u)

    def scalar(self, x) -> Scalar:
        return Scalar(self.field.coerce(x), self.field)

    # -- raw kernels ------------------------------------------------------

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.field.einsum("i,j,ijk->k", a, b, self.mul)

    def same(self, other: "Algebra") -> bool:
        return self is other or (
            self.field == other.field
            and self.mul.shape == other.mul.shape
            and bool(np.all(self.mul == other.mul))
        )

    def require_same(self, *others):
        for o in others:
            alg = getattr(o, "algebra", o)
            if not self.same(alg):
                raise AlgebraMismatchError("operands live over different algebras")


def _is_unit(F, mul, u) -> bool:
    n = mul.shape[0]
    ident = F.identity(n)
    left = F.einsum("i,ijk->jk", u, mul)
    right = F.einsum("i,jik->jk", u, mul)
    return bool(np.all(left == ident) and np.all(right == ident))


@dataclass(frozen=True, eq=False)
class Element:
    algebra: Algebra
    coeffs: np.ndarray

    def __post_init__(self):
        c = self.algebra.field.asarray(self.coeffs)
        if c.shape != (self.algebra.dim,):
            raise ShapeError(f"element needs {self.algebra.dim} coefficients")
        object.__setattr__(self, "coeffs", _freeze(c))

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    def _wrap(self, raw) -> "Element":
        return Element(self.algebra, raw)

    def __add__(self, other: "Element") -> "Element":
        self.algebra.require_same(other)
        return self._wrap(self.field.reduce(self.coeffs + other.coeffs))

    def __sub__(self, other: "Element") -> "Element":
        self.algebra.require_same(other)
        return self._wrap(self.field.reduce(self.coeffs - other.coeffs))

    def __neg__(self) -> "Element":
        return self._wrap(self.field.reduce(-self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self._wrap(self.field.scale(other, self.coeffs))

    def __rmul__(self, other):
        return self._wrap(self.field.scale(other, self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra.same(other.algebra) and bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None

    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0))

    def __repr__(self):
        terms = [
            f"{self.field.format(c)}*e{i + 1}" for i, c in enumerate(self.coeffs) if c != 0
        ]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=False)
class LinearOperator:
    algebra: Algebra
    matrix: np.ndarray

    def __post_init__(self):
        m = self.algebra.field.asarray(self.matrix)
        n = self.algebra.dim
        if m.shape != (n, n):
            raise ShapeError(f"operator must be {n} x {n}, got {m.shape}")
        object.__setattr__(self, "matrix", _freeze(m))

    @classmethod
    def identity(cls, algebra: Algebra) -> "LinearOperator":
        return cls(algebra, algebra.field.identity(algebra.dim))

    @classmethod
    def zero(cls, algebra: Algebra) -> "LinearOperator":
        return cls(algebra, algebra.field.zeros((algebra.dim, algebra.dim)))

    def __call__(self, a: Element) -> Element:
        return apply_linear(self, a)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        self.algebra.require_same(other)
        F = self.algebra.field
        return LinearOperator(self.algebra, F.reduce(self.matrix + other.matrix))

    def __rmul__(self, s) -> "LinearOperator":
        return LinearOperator(self.algebra, self.algebra.field.scale(s, self.matrix))

    def __eq__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return self.algebra.same(other.algebra) and bool(np.all(self.matrix == other.matrix))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BilinearMap:
    algebra: Algebra
    tensor: np.ndarray

    def __post_init__(self):
        w = self.algebra.field.asarray(self.tensor)
        n = self.algebra.dim
        if w.shape != (n, n, n):
            raise ShapeError(f"bilinear map must be {n} x {n} x {n}, got {w.shape}")
        object.__setattr__(self, "tensor", _freeze(w))

    @classmethod
    def zero(cls, algebra: Algebra) -> "BilinearMap":
        return cls(algebra, algebra.field.zeros((algebra.dim,) * 3))

    @classmethod
    def product(cls, algebra: Algebra, kappa: Element | None = None) -> "BilinearMap":
        """``a (x) b -> kappa a b`` (plain multiplication when ``kappa`` is None)."""
        if kappa is None:
            return cls(algebra, algebra.mul.copy())
        F = algebra.field
        return cls(algebra, F.einsum("ijm,p,pmk->ijk", algebra.mul, kappa.coeffs, algebra.mul))

    def __call__(self, a: Element, b: Element) -> Element:
        return apply_bilinear(self, a, b)

    def __eq__(self, other):
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return self.algebra.same(other.algebra) and bool(np.all(self.tensor == other.tensor))

    __hash__ = None

    def is_zero(self) -> bool:
        return bool(np.all(self.tensor == 0))


@dataclass(frozen=True, eq=False)
class TensorSquareElement:
    algebra: Algebra
    tensor: np.ndarray

    def __post_init__(self):
        t = self.algebra.field.asarray(self.tensor)
        n = self.algebra.dim
        if t.shape != (n, n):
            raise ShapeError(f"A(x)A element must be {n} x {n}, got {t.shape}")
        object.__setattr__(self, "tensor", _freeze(t))


# -- operations -----------------------------------------------------------


def multiply(a: Element, b: Element) -> Element:
    a.algebra.require_same(b)
    return Element(a.algebra, a.algebra.product(a.coeffs, b.coeffs))


def apply_linear(R: LinearOperator, a: Element) -> Element:
    R.algebra.require_same(a)
    F = R.algebra.field
    return Element(R.algebra, F.einsum("ki,i->k", R.matrix, a.coeffs))


def apply_bilinear(w: BilinearMap, a: Element, b: Element) -> Element:
    w.algebra.require_same(a, b)
    F = w.algebra.field
    return Element(w.algebra, F.einsum("i,j,ijk->k", a.coeffs, b.coeffs, w.tensor))


def commutator(a: Element, b: Element) -> Element:
    return multiply(a, b) - multiply(b, a)


def check_associativity(A: Algebra) -> AssociativityReport:
    return associativity_report(A.field, A.mul)


def solve_linear(F: FieldSpec, M, b) -> Optional[list]:
    """One solution of ``M x = b`` by exact row reduction, or None if inconsistent."""
    rows = [[F.coerce(v) for v in row] + [F.coerce(bv)] for row, bv in zip(M, b)]
    ncols = len(rows[0]) - 1 if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, v) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    if any(row[-1] != 0 and all(v == 0 for v in row[:-1]) for row in rows):
        return None
    x = [F.zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


def find_unit(A: Algebra, _raw: bool = False):
    """The two-sided identity of ``A`` or None when the unit equations are inconsistent."""
    F, n, c = A.field, A.dim, A.mul
    # unknowns u_i; equations sum_i u_i c[i,j,k] = delta_jk and sum_i u_i c[j,i,k] = delta_jk
    M, b = [], []
    for j in range(n):
        for k in range(n):
            M.append([c[i, j, k] for i in range(n)])
            b.append(F.one if j == k else F.zero)
            M.append([c[j, i, k] for i in range(n)])
            b.append(F.one if j == k else F.zero)
    sol = solve_linear(F, M, b)
    if sol is None:
        return None
    u = F.asarray(sol)
    assert _is_unit(F, c, u), "row reduction produced a non-unit"
    return u if _raw else Element(A, u)


def is_central(A: Algebra, x: Element) -> Verdict:
    A.require_same(x)
    for i in range(A.dim):
        e = A.basis(i)
        if multiply(x, e) != multiply(e, x):
            return Verdict(False, i)
    return Verdict(True)


def central_mask(F: FieldSpec, mul: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Vectorised centrality: ``values[..., m]`` central iff the returned entry is True."""
    comm = F.reduce(
        np.einsum("...m,mik->...ik", values, mul) - np.einsum("...m,imk->...ik", values, mul)
    )
    return np.all(comm == 0, axis=(-2, -1))


def is_bimodule_map(A: Algebra, w: BilinearMap) -> Verdict:
    """Outer actions: w(a x (x) y) = a w(x (x) y) and w(x (x) y a) = w(x (x) y) a.

    Witness is ``("left" | "right", a, x, y)`` on basis indices.
    """
    A.require_same(w)
    F, c, t = A.field, A.mul, w.tensor
    left_l = F.einsum("axm,myk->axyk", c, t)
    left_r = F.einsum("xym,amk->axyk", t, c)
    bad = nonzero_indices(F.reduce(left_l - left_r), 3)
    if bad:
        return Verdict(False, ("left",) + bad[0])
    right_l = F.einsum("yam,xmk->axyk", c, t)
    right_r = F.einsum("xym,mak->axyk", t, c)
    bad = nonzero_indices(F.reduce(right_l - right_r), 3)
    if bad:
        return Verdict(False, ("right",) + bad[0])
    return Verdict(True)


def is_centralizing(A: Algebra, t: TensorSquareElement) -> Verdict:
    """``a t = t a`` in ``A (x) A`` for every basis ``a``; witness is the index of ``a``."""
    A.require_same(t)
    F, c, T = A.field, A.mul, t.tensor
    for a in range(A.dim):
        left = F.einsum("ij,ik->kj", T, c[a])  # sum (a t1) (x) t2
        right = F.einsum("ij,jk->ik", T, c[:, a, :])  # sum t1 (x) (t2 a)
        if not np.all(left == right):
            return Verdict(False, a)
    return Verdict(True)


# -- named algebras used by the corpus ------------------------------------


def null_algebra(F: FieldSpec, n: int) -> Algebra:
    return Algebra(F, F.zeros((n, n, n)), name=f"{F}_null{n}".lower())


def base_field_algebra(F: FieldSpec) -> Algebra:
    """The one-dimensional algebra e1 e1 = e1."""
    return Algebra(F, [[[1]]], unit=[1], name=f"{F}_dim1".lower())


def dual_numbers(F: FieldSpec) -> Algebra:
    """``K[x]/(x^2)`` with basis e1 = 1, e2 = x."""
    mul = F.zeros((2, 2, 2))
    mul[0, 0, 0] = mul[0, 1, 1] = mul[1, 0, 1] = F.one
    return Algebra(F, mul, unit=[1, 0], name=f"{F}_dual2".lower())


def split_algebra(F: FieldSpec) -> Algebra:
    """``K x K`` with orthogonal idempotents e1, e2."""
    mul = F.zeros((2, 2, 2))
    mul[0, 0, 0] = mul[1, 1, 1] = F.one
    return Algebra(F, mul, unit=[1, 1], name=f"{F}_split2".lower())


def left_unit_algebra(F: FieldSpec) -> Algebra:
    """Span of e11, e12 in upper-triangular 2 x 2 matrices: e1 e1 = e1, e1 e2 = e2.

    Non-commutative and without a two-sided unit (e1 is only a left identity).
    """
    mul = F.zeros((2, 2, 2))
    mul[0, 0, 0] = mul[0, 1, 1] = F.one
    return Algebra(F, mul, name=f"{F}_tri2".lower())


def matrix_algebra(F: FieldSpec, m: int = 2) -> Algebra:
    """``M_m(K)`` with matrix units ordered e11, e12, ..., e_mm (row-major)."""
    n = m * m
    mul = F.zeros((n, n, n))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                mul[i * m + j, j * m + k, i * m + k] = F.one
    unit = [1 if (x // m) == (x % m) else 0 for x in range(n)]
    return Algebra(F, mul, unit=unit, name=f"{F}_m{m}".lower())


def casimir(A: Algebra, m: int = 2) -> TensorSquareElement:
    """``sum_ij e_ij (x) e_ji`` in ``M_m``."""
    F = A.field
    t = F.zeros((A.dim, A.dim))
    for i in range(m):
        for j in range(m):
            t[i * m + j, j * m + i] = F.one
    return TensorSquareElement(A, t)
