"""Sliced-bit storage of vectors over a prime field.

A vector of ``n`` elements of F_p is stored as ``r`` bit planes, where
``r = floor(log2 p) + 1``.  Plane ``j`` holds bit ``j`` of every element, and
element ``i`` lives at bit ``i % word_width`` of word ``i // word_width``.
Bits past ``n`` in the last word are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InputError, InvariantError

WORD_WIDTHS = (32, 64)
_DTYPES = {32: np.uint32, 64: np.uint64}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Bit layout of F_p in the natural binary encoding."""

    p: int
    r: int
    is_mersenne: bool
    f: tuple[int, ...]
    one_positions: tuple[int, ...]

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p})"


@lru_cache(maxsize=None)
def field_spec(p: int) -> FieldSpec:
    """Build the :class:`FieldSpec` for a prime ``p > 2``."""
    p = int(p)
    if p < 3 or not is_prime(p):
        raise InputError(f"p must be prime >= 3, got {p}")
    if p >= 1 << 16:
        raise InputError(f"p = {p} is too large for sliced storage")
    r = p.bit_length()
    mersenne = p == (1 << r) - 1
    # Mersenne fields wrap carries by rotation, so they carry no correction vector.
    corr = 0 if mersenne else (1 << r) - p
    f = tuple((corr >> j) & 1 for j in range(r))
    ones = tuple(j for j in range(r) if (p >> j) & 1)
    return FieldSpec(p=p, r=r, is_mersenne=mersenne, f=f, one_positions=ones)


def word_dtype(word_width: int):
    try:
        return _DTYPES[word_width]
    except KeyError:
        raise InputError(f"word_width must be 32 or 64, got {word_width}") from None


def n_words(n: int, word_width: int) -> int:
    return -(-n // word_width)


@lru_cache(maxsize=256)
def _tail_mask_cached(n: int, word_width: int) -> np.ndarray:
    dt = word_dtype(word_width)
    nw = n_words(n, word_width)
    mask = np.full(nw, np.iinfo(dt).max, dtype=dt)
    rem = n % word_width
    if nw and rem:
        mask[-1] = dt((1 << rem) - 1)
    mask.flags.writeable = False
    return mask


def tail_mask(n: int, word_width: int) -> np.ndarray:
    """Per-word mask with ones exactly at the ``n`` valid lanes."""
    return _tail_mask_cached(int(n), int(word_width))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SlicedVector:
    field: FieldSpec
    n: int
    word_width: int
    planes: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        dt = word_dtype(self.word_width)
        planes = np.asarray(self.planes)
        shape = (self.field.r, n_words(self.n, self.word_width))
        if planes.shape != shape or planes.dtype != dt:
            raise InputError(f"planes must have shape {shape} and dtype {np.dtype(dt).name}")
        object.__setattr__(self, "planes", _freeze(planes))

    def __eq__(self, other):
        if not isinstance(other, SlicedVector):
            return NotImplemented
        return (self.field == other.field and self.n == other.n
                and self.word_width == other.word_width
                and np.array_equal(self.planes, other.planes))

    __hash__ = None

    def digits(self) -> list[int]:
        return unpack(self).digits.tolist()


@dataclass(frozen=True, eq=False)
class DenseVector:
    field: FieldSpec
    digits: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        d = np.asarray(self.digits, dtype=np.int64).reshape(-1)
        if d.size and (d.min() < 0 or d.max() >= self.field.p):
            raise InputError(f"digits must lie in [0, {self.field.p - 1}]")
        object.__setattr__(self, "digits", _freeze(d))

    @property
    def n(self) -> int:
        return int(self.digits.size)

    def __eq__(self, other):
        if not isinstance(other, DenseVector):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.digits, other.digits)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NonzeroMask:
    n: int
    word_width: int
    bits: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=word_dtype(self.word_width)).reshape(-1)
        if b.size != n_words(self.n, self.word_width):
            raise InputError("mask word count does not match n")
        if np.any(b & ~tail_mask(self.n, self.word_width)):
            raise InvariantError("mask has bits set beyond n")
        object.__setattr__(self, "bits", _freeze(b))

    def __eq__(self, other):
        if not isinstance(other, NonzeroMask):
            return NotImplemented
        return (self.n == other.n and self.word_width == other.word_width
                and np.array_equal(self.bits, other.bits))

    __hash__ = None

    def to_list(self) -> list[int]:
        lanes = _lanes(self.bits[None, :], self.n, self.word_width)
        return lanes[0].tolist()


def dense(p: int | FieldSpec, digits: Sequence[int]) -> DenseVector:
    fs = p if isinstance(p, FieldSpec) else field_spec(p)
    return DenseVector(fs, np.asarray(digits, dtype=np.int64))


def _lanes(words: np.ndarray, n: int, word_width: int) -> np.ndarray:
    """Expand ``(rows, nwords)`` words into ``(rows, n)`` 0/1 lanes."""
    shifts = np.arange(word_width, dtype=words.dtype)
    bits = (words[:, :, None] >> shifts) & words.dtype.type(1)
    return bits.reshape(words.shape[0], -1)[:, :n].astype(np.int64)


def pack(v: DenseVector, word_width: int = 64) -> SlicedVector:
    """Reorder a dense vector into bit planes."""
    fs = v.field
    dt = word_dtype(word_width)
    n = v.n
    nw = n_words(n, word_width)
    padded = np.zeros(nw * word_width, dtype=np.uint64)
    padded[:n] = v.digits
    lanes = padded.reshape(nw, word_width)
    weights = np.left_shift(np.uint64(1), np.arange(word_width, dtype=np.uint64))
    planes = np.empty((fs.r, nw), dtype=dt)
    for j in range(fs.r):
        bit = (lanes >> np.uint64(j)) & np.uint64(1)
        planes[j] = (bit * weights).sum(axis=1, dtype=np.uint64).astype(dt)
    return SlicedVector(fs, n, word_width, planes)


def pack_digits(p: int, digits: Sequence[int], word_width: int = 64) -> SlicedVector:
    return pack(dense(p, digits), word_width)


def unpack(s: SlicedVector) -> DenseVector:
    lanes = _lanes(s.planes, s.n, s.word_width)
    digits = (lanes << np.arange(s.field.r, dtype=np.int64)[:, None]).sum(axis=0)
    if digits.size and digits.max() >= s.field.p:
        raise InvariantError(f"decoded value {int(digits.max())} >= p = {s.field.p}")
    return DenseVector(s.field, digits)


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


def support(s: SlicedVector) -> np.ndarray:
    """Words with a one at every nonzero coordinate (OR of all planes)."""
    return np.bitwise_or.reduce(s.planes, axis=0) if s.field.r else np.zeros(0, s.planes.dtype)


def weight(s: SlicedVector) -> int:
    """Hamming weight: zero is the only all-zero column."""
    return popcount(support(s))


def weight_of_mask(m: NonzeroMask) -> int:
    return popcount(m.bits & tail_mask(m.n, m.word_width))


def support_mask(s: SlicedVector) -> NonzeroMask:
    return NonzeroMask(s.n, s.word_width, support(s))


def zeros(fs: FieldSpec, n: int, word_width: int = 64) -> SlicedVector:
    return SlicedVector(fs, n, word_width,
                        np.zeros((fs.r, n_words(n, word_width)), dtype=word_dtype(word_width)))
