"""Seeded k-wise independent hashing over the Mersenne field GF(2^61 - 1).

A hash is a random polynomial of degree ``k - 1`` evaluated at the item,
followed by a multiply-shift reduction of the 61-bit field value into
``[0, range)``.  Scalar evaluation uses Python integers; batch evaluation
uses a uint64 numpy kernel that splits products into 32-bit halves.  Both
paths are bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MERSENNE_P = (1 << 61) - 1
MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# multiply-shift needs range * (field value >> 32) to fit in 64 bits
MAX_RANGE = 1 << 32

DEFAULT_DEGREE = 4

_P = np.uint64(MERSENNE_P)
_LO32 = np.uint64(0xFFFFFFFF)
_LO29 = np.uint64((1 << 29) - 1)
_U3 = np.uint64(3)
_U29 = np.uint64(29)
_U32 = np.uint64(32)
_U60 = np.uint64(60)
_U61 = np.uint64(61)


class InvalidParameterError(ValueError):
    pass


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int, count: int) -> list[int]:
    """Return ``count`` outputs of the SplitMix64 generator started at ``state``."""
    out = []
    for _ in range(count):
        state = (state + GOLDEN_GAMMA) & MASK64
        out.append(mix64(state))
    return out


def derive_seed(seed: int, index: int) -> int:
    """Per-row seed: ``seed ^ (golden * index)`` pushed through the finalizer."""
    return mix64((seed ^ (GOLDEN_GAMMA * index)) & MASK64)


def _field_reduce(x):
    # x < 2^64; one fold gives < 2^61 + 8, final conditional subtract
    x = (x & _P) + (x >> _U61)
    return np.where(x >= _P, x - _P, x)


def _mulmod(a, b):
    """(a * b) mod 2^61-1 for uint64 arrays with entries < 2^61."""
    a_lo, a_hi = a & _LO32, a >> _U32
    b_lo, b_hi = b & _LO32, b >> _U32
    lo = a_lo * b_lo
    mid = a_hi * b_lo + a_lo * b_hi
    hi = a_hi * b_hi
    # 2^64 = 8 (mod p), 2^61 = 1 (mod p)
    s = (hi << _U3) + (mid >> _U29) + ((mid & _LO29) << _U32) + (lo & _P) + (lo >> _U61)
    return _field_reduce(s)


def _as_items(items) -> np.ndarray:
    arr = np.asarray(items)
    if arr.dtype != np.uint64:
        if arr.dtype.kind == "i" and arr.size and arr.min() < 0:
            raise InvalidParameterError("item ids must be non-negative")
        arr = arr.astype(np.uint64)
    return arr


@dataclass(frozen=True)
class KWiseHash:
    """Degree-(k-1) polynomial hash into ``[0, range)``.

    ``coefficients[j]`` multiplies ``x**j``.
    """

    coefficients: tuple[int, ...]
    range: int
    _coef_u64: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise InvalidParameterError("degree must be at least 2")
        if not 1 <= self.range <= MAX_RANGE:
            raise InvalidParameterError(f"range must be in [1, 2^32], got {self.range}")
        coefs = tuple(int(c) % MERSENNE_P for c in self.coefficients)
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "_coef_u64", np.array(coefs, dtype=np.uint64))

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def field_value(self, item: int) -> int:
        x = int(item) % MERSENNE_P
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % MERSENNE_P
        return acc

    def __call__(self, item: int) -> int:
        return (self.field_value(item) * self.range) >> 61

    def field_values(self, items) -> np.ndarray:
        x = _field_reduce(_as_items(items))
        acc = np.full(x.shape, self._coef_u64[-1], dtype=np.uint64)
        for c in self._coef_u64[-2::-1]:
            acc = _mulmod(acc, x) + c
            acc = np.where(acc >= _P, acc - _P, acc)
        return acc

    def many(self, items) -> np.ndarray:
        """Vectorised bucket indices (int64)."""
        v = self.field_values(items)
        r = np.uint64(self.range)
        a = (v >> _U32) * r
        b = (v & _LO32) * r
        out = (a >> _U29) + (((a & _LO29) + (b >> _U32)) >> _U29)
        return out.astype(np.int64)


@dataclass(frozen=True)
class SignHash:
    """Maps items to -1/+1 through a range-2 polynomial hash (0 -> -1, 1 -> +1)."""

    inner: KWiseHash

    def __post_init__(self):
        if self.inner.range != 2:
            raise InvalidParameterError("sign hash needs an inner range of 2")

    def __call__(self, item: int) -> int:
        return 2 * self.inner(item) - 1

    def many(self, items) -> np.ndarray:
        v = self.inner.field_values(items)
        return (2 * (v >> _U60).astype(np.int64)) - 1


def make_hash(seed: int, degree: int = DEFAULT_DEGREE, range: int = 2) -> KWiseHash:
    """Build the hash determined by ``(seed, degree, range)``.

    Coefficients are successive SplitMix64 outputs reduced into the field.
    """
    if degree < 2:
        raise InvalidParameterError(f"degree must be >= 2, got {degree}")
    if range < 1:
        raise InvalidParameterError(f"range must be >= 1, got {range}")
    coefs = [c % MERSENNE_P for c in splitmix64(int(seed) & MASK64, degree)]
    return KWiseHash(tuple(coefs), range)


def make_sign_hash(seed: int, degree: int = DEFAULT_DEGREE) -> SignHash:
    return SignHash(make_hash(seed, degree, 2))


def eval_hash(h: KWiseHash, item: int) -> int:
    return h(item)


def eval_sign(s: SignHash, item: int) -> int:
    return s(item)


def fingerprint64(token: str) -> int:
    """Stable 64-bit fingerprint of a text token (FNV-1a then SplitMix64 finalizer)."""
    h = 0xCBF29CE484222325
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & MASK64
    return mix64(h)
