"""The cochain algebra ``Omega(A) = sum_n Hom(A^(x)n, A)`` and its twisted differential.

A degree-``n`` cochain is a tensor of shape ``(dim,)*n + (dim,)``: the first
``n`` axes index basis inputs, the last the output coefficient.  Degree 0 is
a bare element of ``A``.

Two differential conventions are available::

    corrected:  d f(a_0..a_n) = R(a_0) f(a_1..a_n)
                                + sum_{k=1}^{n}   (-1)^k f(.., a_{k-1} * a_k, ..)
                                + (-1)^(n+1) f(a_0..a_{n-1}) S(a_n)
    literal:    inner sum stops at k = n-1, last sign (-1)^n

Only the corrected one satisfies ``d d f = [omega, f]``; ``literal`` is kept
so the discrepancy can be exhibited.  On degree 0 the corrected rule gives
``d x (a) = R(a) x - x S(a)``.

Most checks here run on a *batch* of cochains at once: a leading axis of
size ``B`` in front of the cochain axes.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, BilinearMap, Element, Verdict, is_bimodule_map, nonzero_indices
from .errors import CapacityError, PreconditionError, ShapeError
from .scalars import FieldSpec
from .system import CurvedRBSystem, check_curvature_balance

MAX_INPUT_DEGREE = 4
MAX_DEGREE = MAX_INPUT_DEGREE + 1


class DifferentialConvention(str, enum.Enum):
    CORRECTED = "corrected"
    LITERAL = "literal"


CORRECTED = DifferentialConvention.CORRECTED
LITERAL = DifferentialConvention.LITERAL


@dataclass(frozen=True, eq=False)
class Cochain:
    algebra: Algebra
    degree: int
    tensor: np.ndarray

    def __post_init__(self):
        if not 0 <= self.degree <= MAX_DEGREE:
            raise CapacityError(f"cochain degree {self.degree} exceeds the cap {MAX_DEGREE}")
        t = self.algebra.field.asarray(self.tensor)
        if t.shape != (self.algebra.dim,) * (self.degree + 1):
            raise ShapeError(f"degree-{self.degree} cochain has wrong shape {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @classmethod
    def zero(cls, A: Algebra, degree: int) -> "Cochain":
        return cls(A, degree, A.field.zeros((A.dim,) * (degree + 1)))

    @classmethod
    def from_element(cls, x: Element) -> "Cochain":
        return cls(x.algebra, 0, x.coeffs)

    @classmethod
    def from_bilinear(cls, w: BilinearMap) -> "Cochain":
        return cls(w.algebra, 2, w.tensor)

    def __call__(self, *args: Element) -> Element:
        if len(args) != self.degree:
            raise TypeError(f"degree-{self.degree} cochain takes {self.degree} arguments")
        F = self.algebra.field
        t = self.tensor
        for a in args:
            t = F.reduce(np.tensordot(a.coeffs, t, axes=([0], [0])))
        return Element(self.algebra, t)

    def is_zero(self) -> bool:
        return bool(np.all(self.tensor == 0))

    def __add__(self, other):
        self._same_degree(other)
        return Cochain(self.algebra, self.degree, self.algebra.field.reduce(self.tensor + other.tensor))

    def __sub__(self, other):
        self._same_degree(other)
        return Cochain(self.algebra, self.degree, self.algebra.field.reduce(self.tensor - other.tensor))

    def _same_degree(self, other):
        self.algebra.require_same(other)
        if other.degree != self.degree:
            raise ValueError("cochains of different degree")

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.algebra.same(other.algebra)
            and bool(np.all(self.tensor == other.tensor))
        )

    __hash__ = None


def _input_degree(*cochains):
    for f in cochains:
        if f.degree > MAX_INPUT_DEGREE:
            raise CapacityError(f"operations accept degree <= {MAX_INPUT_DEGREE}, got {f.degree}")


# -- batch kernels --------------------------------------------------------


def cup_batch(F: FieldSpec, c, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Cup products of two batches with a common leading axis."""
    B, d = f.shape[0], c.shape[0]
    ff = f.reshape(B, -1, d)
    gg = g.reshape(B, -1, d)
    out = F.einsum("bxp,byq,pqk->bxyk", ff, gg, c)
    return out.reshape((B,) + f.shape[1:-1] + g.shape[1:-1] + (d,))


def differential_batch(F: FieldSpec, c, R, S, star, f: np.ndarray, conv=CORRECTED) -> np.ndarray:
    conv = DifferentialConvention(conv)
    n = f.ndim - 2  # cochain degree
    Rc = F.einsum("pi,pqk->iqk", R, c)  # R(e_i) e_q
    cS = F.einsum("qj,pqk->pjk", S, c)  # e_p S(e_j)
    first = F.einsum("b...q,iqk->bi...k", f, Rc)
    last = F.einsum("b...p,pjk->b...jk", f, cS)
    if conv is CORRECTED:
        out = first + (-1) ** (n + 1) * last
        top = n
    else:
        out = first + (-1) ** n * last
        top = n - 1
    for k in range(1, top + 1):
        merged = np.tensordot(f, star, axes=([k], [2]))
        out = out + (-1) ** k * np.moveaxis(merged, [-2, -1], [k, k + 1])
    return F.reduce(out)


def graded_commutator_batch(F: FieldSpec, c, w: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``[w, f] = w f - (-1)^(|w||f|) f w`` with ``w`` shared by the whole batch."""
    B = f.shape[0]
    wb = np.broadcast_to(w, (B,) + w.shape)
    sign = (-1) ** ((w.ndim - 1) * (f.ndim - 2))
    return F.reduce(cup_batch(F, c, wb, f) - sign * cup_batch(F, c, f, wb))


def d_squared_residual_batch(sys: CurvedRBSystem, f: np.ndarray, conv=CORRECTED) -> np.ndarray:
    F, c = sys.field, sys.algebra.mul
    R, S, st = sys.R.matrix, sys.S.matrix, sys.star_tensor
    dd = differential_batch(F, c, R, S, st, differential_batch(F, c, R, S, st, f, conv), conv)
    return F.reduce(dd - graded_commutator_batch(F, c, sys.omega.tensor, f))


def leibniz_residual_batch(sys: CurvedRBSystem, f: np.ndarray, g: np.ndarray, conv=CORRECTED):
    F, c = sys.field, sys.algebra.mul
    R, S, st = sys.R.matrix, sys.S.matrix, sys.star_tensor
    m = f.ndim - 2

    def d(x):
        return differential_batch(F, c, R, S, st, x, conv)

    fg = cup_batch(F, c, f, g)
    return F.reduce(d(fg) - cup_batch(F, c, d(f), g) - (-1) ** m * cup_batch(F, c, f, d(g)))


def nonzero_rows(res: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.any(res.reshape(res.shape[0], -1) != 0, axis=1))


# -- cochain families -----------------------------------------------------


def basis_cochains(A: Algebra, degree: int) -> np.ndarray:
    """All elementary cochains of one degree, as a batch."""
    F, d = A.field, A.dim
    size = d ** (degree + 1)
    out = F.zeros((size, size))
    for i in range(size):
        out[i, i] = F.one
    return out.reshape((size,) + (d,) * (degree + 1))


def all_cochains(A: Algebra, degree: int, limit: int = 1 << 16) -> np.ndarray:
    """Every cochain of one degree over a finite field (lexicographic), as a batch."""
    F, d = A.field, A.dim
    if not F.is_finite:
        raise ValueError("exhaustive cochain enumeration needs a finite field")
    size = d ** (degree + 1)
    count = F.p**size
    if count > limit:
        raise CapacityError(f"{count} cochains of degree {degree} exceed the limit {limit}")
    rows = np.array(list(itertools.product(range(F.p), repeat=size)), dtype=np.int64)
    return rows.astype(F.dtype).reshape((count,) + (d,) * (degree + 1))


def random_cochains(A: Algebra, degree: int, count: int, rng: np.random.Generator) -> np.ndarray:
    F, d = A.field, A.dim
    shape = (count,) + (d,) * (degree + 1)
    if F.is_finite:
        raw = rng.integers(0, F.p, size=shape)
    else:
        raw = rng.integers(-3, 4, size=shape)
    return F.asarray(raw.tolist()) if raw.size else F.zeros(shape)


def random_cochain(A: Algebra, degree: int, rng: np.random.Generator) -> Cochain:
    return Cochain(A, degree, random_cochains(A, degree, 1, rng)[0])


# -- single-cochain API ---------------------------------------------------


def cup(f: Cochain, g: Cochain) -> Cochain:
    f.algebra.require_same(g)
    _input_degree(f, g)
    A = f.algebra
    t = cup_batch(A.field, A.mul, f.tensor[None], g.tensor[None])[0]
    return Cochain(A, f.degree + g.degree, t)


def differential(sys: CurvedRBSystem, f: Cochain, conv=CORRECTED) -> Cochain:
    sys.algebra.require_same(f)
    _input_degree(f)
    F, c = sys.field, sys.algebra.mul
    t = differential_batch(F, c, sys.R.matrix, sys.S.matrix, sys.star_tensor, f.tensor[None], conv)
    return Cochain(sys.algebra, f.degree + 1, t[0])


def graded_commutator(w, f: Cochain) -> Cochain:
    """``[w, f]``; ``w`` is a cochain or a bilinear map (a degree-2 cochain)."""
    if isinstance(w, BilinearMap):
        w = Cochain.from_bilinear(w)
    w.algebra.require_same(f)
    _input_degree(w, f)
    A = f.algebra
    t = graded_commutator_batch(A.field, A.mul, w.tensor, f.tensor[None])[0]
    return Cochain(A, w.degree + f.degree, t)


def check_d_squared(sys: CurvedRBSystem, f: Cochain, conv=CORRECTED) -> Cochain:
    """``d(d f) - [omega, f]``."""
    sys.algebra.require_same(f)
    _input_degree(f)
    t = d_squared_residual_batch(sys, f.tensor[None], conv)[0]
    return Cochain(sys.algebra, f.degree + 2, t)


def check_leibniz(sys: CurvedRBSystem, f: Cochain, g: Cochain, conv=CORRECTED) -> Cochain:
    """``d(fg) - d(f) g - (-1)^|f| f d(g)``."""
    sys.algebra.require_same(f, g)
    _input_degree(f, g)
    if f.degree + g.degree > MAX_INPUT_DEGREE:
        raise CapacityError("cup product of the arguments exceeds the degree cap")
    t = leibniz_residual_batch(sys, f.tensor[None], g.tensor[None], conv)[0]
    return Cochain(sys.algebra, f.degree + g.degree + 1, t)


def cocycle_defect(A: Algebra, w: BilinearMap) -> np.ndarray:
    """``[a, b, c, k]``: a w(b, c) - w(ab, c) + w(a, bc) - w(a, b) c."""
    F, c, W = A.field, A.mul, w.tensor
    return F.reduce(
        F.einsum("bcm,amk->abck", W, c)
        - F.einsum("abm,mck->abck", c, W)
        + F.einsum("bcm,amk->abck", c, W)
        - F.einsum("abm,mck->abck", W, c)
    )


def is_cocycle(A: Algebra, w: BilinearMap) -> Verdict:
    A.require_same(w)
    bad = nonzero_indices(cocycle_defect(A, w), 3)
    return Verdict(not bad, bad[0] if bad else None)


@dataclass(frozen=True)
class DeformedAssociator:
    """Associator ``m(a, m(b, c)) - m(m(a, b), c)`` of ``m = mu + t w`` as ``t L + t^2 Q``."""

    linear: np.ndarray
    quadratic: np.ndarray

    @property
    def infinitesimally_associative(self) -> bool:
        return bool(np.all(self.linear == 0))


def deformed_associator(A: Algebra, w: BilinearMap) -> DeformedAssociator:
    A.require_same(w)
    F, c, W = A.field, A.mul, w.tensor

    def assoc(x, y):
        # x(a, y(b, c)) - x(y(a, b), c)
        return F.reduce(F.einsum("bcm,amk->abck", y, x) - F.einsum("abm,mck->abck", y, x))

    constant = assoc(c, c)
    if np.any(constant != 0):
        raise PreconditionError("underlying product is not associative")
    linear = F.reduce(assoc(c, W) + assoc(W, c))
    quadratic = assoc(W, W)
    return DeformedAssociator(linear, quadratic)


# -- curved DGA -----------------------------------------------------------


@dataclass
class CurvedDGAReport:
    max_degree: int
    leibniz_ok: bool = True
    d_omega_zero: bool = True
    d_squared_ok: bool = True
    omega_shift_ok: bool = True  # w(ab (x) c) = w(a (x) bc)
    pairs_checked: int = 0
    cochains_checked: int = 0
    failures: list = None

    @property
    def ok(self) -> bool:
        return self.leibniz_ok and self.d_omega_zero and self.d_squared_ok and self.omega_shift_ok

    def __bool__(self):
        return self.ok


def degree_family(A: Algebra, degree: int, exhaustive_limit: int, samples: int, rng):
    """Exhaustive cochains when affordable, else the elementary basis plus random samples."""
    F = A.field
    if F.is_finite and F.p ** (A.dim ** (degree + 1)) <= exhaustive_limit:
        return all_cochains(A, degree, exhaustive_limit)
    basis = basis_cochains(A, degree)
    if samples:
        return np.concatenate([basis, random_cochains(A, degree, samples, rng)])
    return basis


def check_curved_dga(
    sys: CurvedRBSystem,
    max_degree: int = 2,
    seed: int = 0,
    samples: int = 8,
    exhaustive_limit: int = 256,
) -> CurvedDGAReport:
    """All curved-DGA identities for ``R = S`` with a balanced bimodule curvature.

    Precondition failures raise ``PreconditionError``; identity failures are
    recorded in the report.  Leibniz is checked on pairs with total degree
    at most ``max_degree``; the defect is bilinear so the elementary basis
    already decides it, and the samples are a second route.
    """
    A, F, c = sys.algebra, sys.field, sys.algebra.mul
    sys.require_valid()
    if not sys.equal_operators:
        diff = nonzero_indices(sys.field.reduce(sys.R.matrix - sys.S.matrix), 2)
        raise PreconditionError("R and S differ", diff[0])
    bim = is_bimodule_map(A, sys.omega)
    if not bim:
        raise PreconditionError("curvature is not a bimodule map", bim.witness)
    bal = check_curvature_balance(A, sys.omega)
    if not bal:
        raise PreconditionError("curvature is not balanced", bal.witness)
    if max_degree > MAX_INPUT_DEGREE:
        raise CapacityError(f"max degree is capped at {MAX_INPUT_DEGREE}")

    rng = np.random.default_rng(seed)
    report = CurvedDGAReport(max_degree, failures=[])
    W = sys.omega.tensor

    shift = F.reduce(F.einsum("abm,mck->abck", c, W) - F.einsum("bcm,amk->abck", c, W))
    bad = nonzero_indices(shift, 3)
    if bad:
        report.omega_shift_ok = False
        report.failures.append(("omega_shift", bad[0]))

    dw = differential(sys, Cochain.from_bilinear(sys.omega))
    if not dw.is_zero():
        report.d_omega_zero = False
        report.failures.append(("d_omega", nonzero_indices(dw.tensor, 3)[0]))

    families = {n: degree_family(A, n, exhaustive_limit, samples, rng) for n in range(max_degree + 1)}
    for n, fam in families.items():
        res = d_squared_residual_batch(sys, fam)
        report.cochains_checked += len(fam)
        rows = nonzero_rows(res)
        if len(rows):
            report.d_squared_ok = False
            report.failures.append(("d_squared", n, int(rows[0])))

    for m in range(max_degree + 1):
        for n in range(max_degree + 1 - m):
            f, g = families[m], families[n]
            fi, gi = np.meshgrid(np.arange(len(f)), np.arange(len(g)), indexing="ij")
            res = leibniz_residual_batch(sys, f[fi.ravel()], g[gi.ravel()])
            report.pairs_checked += res.shape[0]
            rows = nonzero_rows(res)
            if len(rows):
                report.leibniz_ok = False
                report.failures.append(("leibniz", m, n, int(rows[0])))
    return report
