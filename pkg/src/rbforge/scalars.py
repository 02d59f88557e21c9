"""Exact scalars over the rationals and prime fields.

Tensors throughout the package store *raw* canonical values: ``Fraction`` for
the rationals, and ``int`` residues in ``[0, p)`` for ``F_p``.  ``Scalar`` wraps
one raw value together with its field and is the public face of a single
number.  Arrays of raw values are created and reduced through ``FieldSpec``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import FieldMismatchError, ScalarParseError

_SCALAR_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")

# Residues below this bound fit in int64 with room for a triple product and
# a dense sum; larger primes fall back to Python integers in object arrays.
_INT64_PRIME_BOUND = 1 << 15

_NUMBER_TYPES = (int, Fraction, np.integer)
_INT64_SAFE = 1 << 62

_numerator = np.frompyfunc(lambda x: x.numerator, 1, 1)
_denominator = np.frompyfunc(lambda x: x.denominator, 1, 1)
_over = np.frompyfunc(Fraction, 2, 1)


def _integerize(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """``arr = ints / den`` with one common denominator, ``ints`` Python ints."""
    arr = np.asarray(arr, dtype=object)
    if arr.size == 0:
        return arr, 1
    den = math.lcm(*(int(d) for d in np.unique(_denominator(arr).astype(object))))
    return _numerator(arr * den), den


def _letter_sizes(inputs: str, operands) -> dict:
    sizes = {}
    for spec, op in zip(inputs.split(","), operands):
        head, _, tail = spec.partition("...")
        for letter, size in zip(head, op.shape):
            sizes[letter] = size
        for letter, size in zip(tail, op.shape[op.ndim - len(tail):] if tail else ()):
            sizes[letter] = size
    return sizes


def _rational_einsum(subscripts: str, operands) -> np.ndarray:
    """Exact einsum over Q: contract integer numerators, in int64 when that cannot overflow."""
    pairs = [_integerize(op) for op in operands]
    ints = [i for i, _ in pairs]
    den = math.prod(d for _, d in pairs)
    inputs, _, output = subscripts.replace(" ", "").partition("->")
    sizes = _letter_sizes(inputs, ints)
    terms = math.prod(sizes[c] for c in set(sizes) - set(output))
    bound = terms * math.prod(max((abs(int(x)) for x in i.flat), default=0) for i in ints)
    if bound < _INT64_SAFE:
        raw = np.einsum(subscripts, *(i.astype(np.int64) for i in ints)).astype(object)
    else:
        raw = np.asarray(np.einsum(subscripts, *ints), dtype=object)
    return np.asarray(_over(raw, den), dtype=object)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals (``kind="Q"``) or ``F_p`` (``kind="Fp"``)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise ValueError("the rational field takes no modulus")
        elif self.kind == "Fp":
            if self.p is None or not _is_prime(int(self.p)):
                raise ValueError(f"F_p requires a prime modulus, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("Q")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("Fp", p)

    @classmethod
    def from_name(cls, name: str) -> "FieldSpec":
        """``"Q"`` or ``"F<p>"`` / ``"Fp:<p>"``."""
        name = name.strip()
        if name in ("Q", "QQ"):
            return cls.rationals()
        m = re.fullmatch(r"F(?:p:)?(\d+)", name)
        if not m:
            raise ValueError(f"cannot parse field name {name!r}")
        return cls.prime(int(m.group(1)))

    @property
    def is_finite(self) -> bool:
        return self.kind == "Fp"

    @property
    def order(self) -> int | None:
        return self.p

    def __str__(self):
        return "Q" if self.kind == "Q" else f"F{self.p}"

    # -- raw values -------------------------------------------------------

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def coerce(self, x):
        """Map an int, Fraction or Scalar into a canonical raw value."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatchError(f"scalar over {x.field} used over {self}")
            return x.value
        if isinstance(x, str):
            return parse_scalar(x, self).value
        if self.kind == "Q":
            return Fraction(x)
        x = Fraction(x)
        return (x.numerator * pow(x.denominator, -1, self.p)) % self.p

    def add(self, a, b):
        return a + b if self.kind == "Q" else (a + b) % self.p

    def neg(self, a):
        return -a if self.kind == "Q" else (-a) % self.p

    def sub(self, a, b):
        return a - b if self.kind == "Q" else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.kind == "Q" else (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self}")
        return 1 / Fraction(a) if self.kind == "Q" else pow(int(a), -1, self.p)

    def elements(self) -> Iterator[int]:
        if not self.is_finite:
            raise ValueError("the rationals cannot be enumerated")
        return iter(range(self.p))

    def format(self, a) -> str:
        return str(Fraction(a)) if self.kind == "Q" else str(int(a))

    # -- arrays -----------------------------------------------------------

    @property
    def dtype(self):
        if self.kind == "Fp" and self.p < _INT64_PRIME_BOUND:
            return np.int64
        return object

    def asarray(self, data) -> np.ndarray:
        """Canonical array from nested lists of ints, Fractions, strings or Scalars."""
        arr = np.array(data, dtype=object)
        flat = [self.coerce(x) for x in arr.reshape(-1)]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(arr.shape).astype(self.dtype)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        """Bring the result of integer arithmetic back to canonical residues."""
        if self.kind == "Q":
            return arr
        return np.mod(arr, self.p)

    def zeros(self, shape) -> np.ndarray:
        if self.kind == "Q":
            out = np.empty(shape, dtype=object)
            out[...] = Fraction(0)
            return out
        return np.zeros(shape, dtype=self.dtype)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def einsum(self, subscripts: str, *operands) -> np.ndarray:
        if self.kind == "Q" and "->" in subscripts:
            return _rational_einsum(subscripts, operands)
        return self.reduce(np.einsum(subscripts, *operands))

    def scale(self, s, arr: np.ndarray) -> np.ndarray:
        return self.reduce(arr * self.coerce(s))

    def format_array(self, arr: np.ndarray):
        """Nested lists of scalar strings (the JSON wire format)."""
        if np.ndim(arr) == 0:
            return self.format(arr[()] if isinstance(arr, np.ndarray) else arr)
        return [self.format_array(x) for x in arr]

    def norm(self, arr: np.ndarray):
        """Max absolute value; residues are read in the symmetric range."""
        if arr.size == 0:
            return self.zero
        if self.kind == "Q":
            return max(abs(Fraction(x)) for x in arr.reshape(-1))
        sym = [min(int(x), self.p - int(x)) for x in arr.reshape(-1)]
        return max(sym)


QQ = FieldSpec.rationals()


def GF(p: int) -> FieldSpec:
    return FieldSpec.prime(p)


@dataclass(frozen=True)
class Scalar:
    value: object
    field: FieldSpec

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        if not isinstance(other, (Scalar,) + _NUMBER_TYPES):
            return NotImplemented
        return Scalar(self.field.add(self.value, self._other(other)), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Scalar,) + _NUMBER_TYPES):
            return NotImplemented
        return Scalar(self.field.sub(self.value, self._other(other)), self.field)

    def __rsub__(self, other):
        if not isinstance(other, (Scalar,) + _NUMBER_TYPES):
            return NotImplemented
        return Scalar(self.field.sub(self._other(other), self.value), self.field)

    def __neg__(self):
        return Scalar(self.field.neg(self.value), self.field)

    def __mul__(self, other):
        if not isinstance(other, (Scalar,) + _NUMBER_TYPES):
            return NotImplemented
        return Scalar(self.field.mul(self.value, self._other(other)), self.field)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        return Scalar(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        return self * Scalar(self._other(other), self.field).inverse()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"Scalar({self}, {self.field})"


def parse_scalar(text: str, field: FieldSpec) -> Scalar:
    """Parse ``[-]digits[/digits]`` into a canonical scalar of ``field``."""
    m = _SCALAR_RE.match(text) if isinstance(text, str) else None
    if m is None:
        raise ScalarParseError(f"malformed scalar {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ScalarParseError(f"zero denominator in {text!r}")
    if field.kind == "Q":
        return Scalar(Fraction(num, den), field)
    if den % field.p == 0:
        raise ScalarParseError(f"denominator of {text!r} is not invertible mod {field.p}")
    return Scalar((num * pow(den, -1, field.p)) % field.p, field)


def format_scalar(x: Scalar) -> str:
    return str(x)
