"""The circle product ``a o b = R(a) b - b S(a)`` and the left pre-Lie identity.

The defect is trilinear, so checking basis triples decides the identity on
the whole algebra.
"""

from __future__ import annotations

import numpy as np

from .algebra import Element, Verdict, central_mask, nonzero_indices
from .errors import InternalInconsistency
from .scalars import FieldSpec
from .system import CurvedRBSystem


def circle_tensor(F: FieldSpec, c, R, S) -> np.ndarray:
    return F.reduce(F.einsum("pi,pjk->ijk", R, c) - F.einsum("pi,jpk->ijk", S, c))


def prelie_defect_tensor(F: FieldSpec, C) -> np.ndarray:
    """``[a, b, c, k]``: (a o b - b o a) o c - a o (b o c) + b o (a o c)."""
    anti = F.reduce(C - C.swapaxes(0, 1))
    lhs = F.einsum("abm,mck->abck", anti, C)
    a_bc = F.einsum("bcm,amk->abck", C, C)
    return F.reduce(lhs - a_bc + a_bc.swapaxes(0, 1))


def circle(sys: CurvedRBSystem, a: Element, b: Element) -> Element:
    sys.algebra.require_same(a, b)
    return sys.R(a) * b - b * sys.S(a)


def prelie_defect(sys: CurvedRBSystem, a: Element, b: Element, c: Element) -> Element:
    def o(x, y):
        return circle(sys, x, y)

    return o(o(a, b) - o(b, a), c) - o(a, o(b, c)) + o(b, o(a, c))


def antisym_curvature_central(sys: CurvedRBSystem) -> Verdict:
    """Is ``w(a (x) b) - w(b (x) a)`` central for all basis a, b?  Witness ``(i, j, c)``."""
    A, F = sys.algebra, sys.field
    W = sys.omega.tensor
    anti = F.reduce(W - W.swapaxes(0, 1))
    # comm[i, j, c] = anti(i, j) e_c - e_c anti(i, j)
    comm = F.reduce(np.einsum("ijp,pck->ijck", anti, A.mul) - np.einsum("ijp,cpk->ijck", anti, A.mul))
    bad = nonzero_indices(comm, 3)
    return Verdict(not bad, bad[0] if bad else None)


def check_prelie(sys: CurvedRBSystem) -> Verdict:
    """Left pre-Lie identity on basis triples; cross-checked against the centrality criterion."""
    sys.require_valid()
    F = sys.field
    C = circle_tensor(F, sys.algebra.mul, sys.R.matrix, sys.S.matrix)
    bad = nonzero_indices(prelie_defect_tensor(F, C), 3)
    verdict = Verdict(not bad, bad[0] if bad else None)
    if verdict.ok != antisym_curvature_central(sys).ok:
        raise InternalInconsistency(
            "pre-Lie identity and centrality of the antisymmetrised curvature disagree"
        )
    return verdict


def antisym_central_mask(F: FieldSpec, c, W: np.ndarray) -> np.ndarray:
    """Batched version over leading axes of ``W[..., i, j, k]``."""
    anti = F.reduce(W - np.swapaxes(W, -3, -2))
    return np.all(central_mask(F, c, anti), axis=(-2, -1))
