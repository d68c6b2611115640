"""Element-wise arithmetic on sliced vectors using only logical word operations.

Each public function validates its operands and returns a new
:class:`~slicedgf.field.SlicedVector`.  The ``*_planes`` helpers work on raw
``(r, nwords)`` arrays and are shared with the numpy kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError
from .field import DenseVector, FieldSpec, NonzeroMask, SlicedVector, pack, tail_mask, unpack


def loop_limit(r: int) -> int:
    # Mersenne p needs at most r passes; the correction term of non-Mersenne
    # p adds a few (r + 7 below 1024).  Anything past this is a bug.
    return 2 * r + 2


@dataclass(frozen=True)
class AddTrace:
    """Result of a generic addition plus loop diagnostics."""

    result: SlicedVector
    iterations: int
    t: NonzeroMask


def _check_pair(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> FieldSpec:
    if v.field != w.field:
        raise InputError(f"field mismatch: p={v.field.p} vs p={w.field.p}")
    if field is not None and field != v.field:
        raise InputError(f"operands are over p={v.field.p}, expected p={field.p}")
    if v.n != w.n:
        raise InputError(f"length mismatch: {v.n} vs {w.n}")
    if v.word_width != w.word_width:
        raise InputError(f"word width mismatch: {v.word_width} vs {w.word_width}")
    return v.field


def _require_p(v: SlicedVector, p: int) -> None:
    if v.field.p != p:
        raise InputError(f"operation is defined for p={p}, got p={v.field.p}")


def _wrap(like: SlicedVector, planes: np.ndarray) -> SlicedVector:
    return SlicedVector(like.field, like.n, like.word_width, planes)


def _mask(like: SlicedVector, bits: np.ndarray) -> NonzeroMask:
    return NonzeroMask(like.n, like.word_width, bits)


# ---------------------------------------------------------------------------
# plane-level kernels


def fixup_all_ones(d: np.ndarray) -> np.ndarray:
    """Map the all-ones column (the value p of a Mersenne field) to zero."""
    t = np.bitwise_and.reduce(d, axis=0)
    return d ^ t


def mersenne_add_planes(v: np.ndarray, w: np.ndarray):
    """Carry loop with circular carry wrap; returns ``(planes, iterations, t)``."""
    r = v.shape[0]
    d = v ^ w
    e = v & w
    it = 0
    while e.any():
        it += 1
        if it > loop_limit(r):
            raise InvariantError("mersenne carry loop did not terminate")
        v, w = d, np.roll(e, 1, axis=0)
        d = v ^ w
        e = v & w
    t = np.bitwise_and.reduce(d, axis=0)
    return d ^ t, it, t


def generic_add_planes(v: np.ndarray, w: np.ndarray, f: tuple[int, ...]):
    """Carry loop with zero-fill shift and ``2^r - p`` injection.

    The top carry bit of each pass re-enters as the correction vector ``f``.
    The final reduction subtracts ``p`` wherever the loop result is ``>= p``;
    ``t`` marks those lanes.  Testing only for equality with ``p`` would leave
    results in ``(p, 2^r)`` unreduced (e.g. 3 + 3 over F5).
    """
    r = v.shape[0]
    fj = [j for j in range(r) if f[j]]
    d = v ^ w
    e = v & w
    it = 0
    while e.any():
        it += 1
        if it > loop_limit(r):
            raise InvariantError("carry loop did not terminate")
        eps = e[r - 1]
        v = d
        w = np.zeros_like(e)
        w[1:] = e[:-1]
        ef = np.zeros_like(e)
        ef[fj] = eps
        d = v ^ w ^ ef
        e = (v & w) | (v & ef) | (w & ef)
    # d >= p  <=>  d + (2^r - p) carries out of the top plane
    s = np.empty_like(d)
    c = np.zeros_like(d[0])
    for j in range(r):
        if f[j]:
            s[j] = ~d[j] ^ c
            c = d[j] | c
        else:
            s[j] = d[j] ^ c
            c = d[j] & c
    t = c
    return (s & t) | (d & ~t), it, t


def f3_add_planes(a: np.ndarray, b: np.ndarray, wrap=np.bitwise_xor) -> np.ndarray:
    """Straight-line F3 adder in the natural encoding.

    ``wrap`` combines the low sum with the high carry; only ``xor`` is correct
    (``and`` is kept reachable for the self-test mutation check).
    """
    s0 = a[0] ^ b[0]
    c0 = a[0] & b[0]
    s1 = a[1] ^ b[1] ^ c0
    c1 = a[1] & b[1]
    s0 = wrap(s0, c1)
    t = s0 & s1
    return np.stack((s0 ^ t, s1 ^ t))


def f7_add_planes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s0 = a[0] ^ b[0]
    c0 = a[0] & b[0]
    s1 = a[1] ^ b[1] ^ c0
    c1 = (a[1] & b[1]) | (a[1] & c0) | (b[1] & c0)
    s2 = a[2] ^ b[2] ^ c1
    c2 = (a[2] & b[2]) | (a[2] & c1) | (b[2] & c1)
    c0 = s0 & c2
    s0 = s0 ^ c2
    c1 = s1 & c0
    s1 = s1 ^ c0
    s2 = s2 ^ c1
    t = s0 & s1 & s2
    return np.stack((s0 ^ t, s1 ^ t, s2 ^ t))


def kat3_add_planes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    t0 = a[0] ^ b[0]
    t1 = a[1] ^ b[1]
    u0 = t0 ^ a[1]
    u1 = t1 ^ a[0]
    return np.stack((t1 | u0, t0 | u1))


def add_planes(field: FieldSpec, v: np.ndarray, w: np.ndarray, generic: bool = False) -> np.ndarray:
    if not generic and field.p == 3:
        return f3_add_planes(v, w)
    if not generic and field.p == 7:
        return f7_add_planes(v, w)
    if field.is_mersenne:
        return mersenne_add_planes(v, w)[0]
    return generic_add_planes(v, w, field.f)[0]


# ---------------------------------------------------------------------------
# public operations


def add(field: FieldSpec | None, v: SlicedVector, w: SlicedVector, *, generic: bool = False) -> SlicedVector:
    """Element-wise ``(v + w) mod p``.

    Uses the straight-line adders for F3 and F7 unless ``generic`` is set.
    """
    fs = _check_pair(field, v, w)
    return _wrap(v, add_planes(fs, v.planes, w.planes, generic))


def add_generic_mersenne(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> SlicedVector:
    fs = _check_pair(field, v, w)
    if not fs.is_mersenne:
        raise InputError(f"p={fs.p} is not a Mersenne prime")
    return _wrap(v, mersenne_add_planes(v.planes, w.planes)[0])


def add_generic_any(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> SlicedVector:
    fs = _check_pair(field, v, w)
    if fs.is_mersenne:
        raise InputError(f"p={fs.p} is a Mersenne prime; use add_generic_mersenne")
    return _wrap(v, generic_add_planes(v.planes, w.planes, fs.f)[0])


def trace_add(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> AddTrace:
    """Run the generic adder for the field and report loop count and ``t``."""
    fs = _check_pair(field, v, w)
    if fs.is_mersenne:
        planes, it, t = mersenne_add_planes(v.planes, w.planes)
    else:
        planes, it, t = generic_add_planes(v.planes, w.planes, fs.f)
    return AddTrace(_wrap(v, planes), it, _mask(v, t & tail_mask(v.n, v.word_width)))


def add_f3(v: SlicedVector, w: SlicedVector) -> SlicedVector:
    _check_pair(None, v, w)
    _require_p(v, 3)
    return _wrap(v, f3_add_planes(v.planes, w.planes))


def add_f7(v: SlicedVector, w: SlicedVector) -> SlicedVector:
    _check_pair(None, v, w)
    _require_p(v, 7)
    return _wrap(v, f7_add_planes(v.planes, w.planes))


# KAT encoding: 0=(1,1), 1=(0,1), 2=(1,0) as (plane0, plane1) bits.

def to_kat(v: SlicedVector) -> np.ndarray:
    """Re-encode F3 planes from the natural encoding to the KAT encoding."""
    _require_p(v, 3)
    a0, a1 = v.planes
    tm = tail_mask(v.n, v.word_width)
    return np.stack((~a0 & tm, ~a1 & tm))


def from_kat(kat: np.ndarray, like: SlicedVector) -> SlicedVector:
    k0, k1 = kat
    tm = tail_mask(like.n, like.word_width)
    return _wrap(like, np.stack((~k0 & tm, ~k1 & tm)))


def add_f3_kat(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Six-instruction F3 adder on KAT-encoded planes (benchmark reference).

    Operands and result are raw ``(2, nwords)`` planes; convert with
    :func:`to_kat` / :func:`from_kat`.  Tail lanes encode zero as ``(1, 1)``
    and are cleared by :func:`from_kat`.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] != 2 or b.shape != a.shape:
        raise InputError("KAT operands must be two-plane arrays of equal shape")
    return kat3_add_planes(a, b)


def negate(field: FieldSpec | None, v: SlicedVector) -> SlicedVector:
    fs = v.field
    if field is not None and field != fs:
        raise InputError(f"operand is over p={fs.p}, expected p={field.p}")
    if fs.p == 3:
        return _wrap(v, v.planes[::-1].copy())
    if fs.is_mersenne:
        # p - x is the bitwise complement for 0 < x < p; x = 0 maps to all ones.
        comp = ~v.planes & tail_mask(v.n, v.word_width)
        return _wrap(v, fixup_all_ones(comp))
    d = unpack(v).digits
    return pack(DenseVector(fs, (fs.p - d) % fs.p), v.word_width)


def sub(field: FieldSpec | None, v: SlicedVector, w: SlicedVector, *, generic: bool = False) -> SlicedVector:
    _check_pair(field, v, w)
    return add(field, v, negate(field, w), generic=generic)


def rotate_planes(field: FieldSpec | None, w: SlicedVector, s: int) -> SlicedVector:
    """Multiply by ``2^s`` in a Mersenne field by rotating planes upward."""
    fs = w.field
    if field is not None and field != fs:
        raise InputError(f"operand is over p={fs.p}, expected p={field.p}")
    if not fs.is_mersenne:
        raise InputError(f"plane rotation multiplies by 2^s only for Mersenne p, got p={fs.p}")
    if not 0 <= s < fs.r:
        raise InputError(f"shift must be in [0, {fs.r - 1}], got {s}")
    out = np.roll(w.planes, s, axis=0)
    if np.bitwise_and.reduce(out, axis=0).any():
        raise InvariantError("rotation produced an all-ones column")
    return _wrap(w, out)


def _mersenne_shift_for(fs: FieldSpec, h: int) -> tuple[int, bool] | None:
    """``(s, negated)`` with ``h == ±2^s mod p``, if such an ``s`` exists."""
    for s in range(fs.r):
        q = (1 << s) % fs.p
        if q == h:
            return s, False
        if (fs.p - q) == h:
            return s, True
    return None


def scale(field: FieldSpec | None, h: int, w: SlicedVector, *, generic: bool = False) -> SlicedVector:
    """``h * w`` for a scalar ``h`` in ``[0, p-1]``."""
    fs = w.field
    h = int(h)
    if not 0 <= h < fs.p:
        raise InputError(f"scalar must be in [0, {fs.p - 1}], got {h}")
    if h == 0:
        return _wrap(w, np.zeros_like(w.planes))
    if fs.is_mersenne:
        hit = _mersenne_shift_for(fs, h)
        if hit is not None:
            s, neg = hit
            rot = rotate_planes(fs, w, s)
            return negate(fs, rot) if neg else rot
        acc = None
        for s in range(fs.r):
            if (h >> s) & 1:
                term = rotate_planes(fs, w, s)
                acc = term if acc is None else add(fs, acc, term, generic=generic)
        return acc
    acc = None
    base = w
    while h:
        if h & 1:
            acc = base if acc is None else add(fs, acc, base, generic=generic)
        h >>= 1
        if h:
            base = add(fs, base, base, generic=generic)
    return acc


def combine(field: FieldSpec | None, v: SlicedVector, h: int, w: SlicedVector, *, generic: bool = False) -> SlicedVector:
    """Element-wise ``(v + h*w) mod p`` for ``1 <= h < p``.

    Mersenne fields reduce ``h*w`` to a plane rotation whenever ``h`` or
    ``p - h`` is a power of two (the second case becomes a subtraction).
    """
    fs = _check_pair(field, v, w)
    h = int(h)
    if not 1 <= h < fs.p:
        raise InputError(f"scalar must be in [1, {fs.p - 1}], got {h}")
    if fs.is_mersenne:
        hit = _mersenne_shift_for(fs, h)
        if hit is not None:
            s, neg = hit
            rot = rotate_planes(fs, w, s) if s else w
            return sub(fs, v, rot, generic=generic) if neg else add(fs, v, rot, generic=generic)
    return add(fs, v, scale(fs, h, w, generic=generic), generic=generic)


def addsub_f3(v: SlicedVector, w: SlicedVector) -> tuple[SlicedVector, SlicedVector]:
    """``(v + w, v - w)`` over F3 from a single read of each operand."""
    _check_pair(None, v, w)
    _require_p(v, 3)
    a0, a1 = v.planes
    b0, b1 = w.planes
    # v - w = v + (b1, b0): the half-sums share the same four xor/and terms.
    x00 = a0 ^ b0
    n00 = a0 & b0
    x11 = a1 ^ b1
    n11 = a1 & b1
    x01 = a0 ^ b1
    n01 = a0 & b1
    x10 = a1 ^ b0
    n10 = a1 & b0

    s0 = x00 ^ n11
    s1 = x11 ^ n00
    t = s0 & s1
    d0 = x01 ^ n10
    d1 = x10 ^ n01
    u = d0 & d1
    return (_wrap(v, np.stack((s0 ^ t, s1 ^ t))), _wrap(v, np.stack((d0 ^ u, d1 ^ u))))


def isometric_sub_mask(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> NonzeroMask:
    """Lanes where ``v - w != 0``: any plane differs."""
    _check_pair(field, v, w)
    return _mask(v, np.bitwise_or.reduce(v.planes ^ w.planes, axis=0))


def isometric_add_mask(field: FieldSpec | None, v: SlicedVector, w: SlicedVector) -> NonzeroMask:
    """Lanes where ``v + w != 0``, without computing the sum when possible."""
    fs = _check_pair(field, v, w)
    a, b = v.planes, w.planes
    if fs.p == 3:
        c = a | b
        return _mask(v, c[0] ^ c[1])
    if fs.is_mersenne:
        tm = tail_mask(v.n, v.word_width)
        differs = np.bitwise_or.reduce(~(a ^ b) & tm, axis=0)
        any_set = np.bitwise_or.reduce(a | b, axis=0)
        return _mask(v, differs & any_set)
    s = generic_add_planes(a, b, fs.f)[0]
    return _mask(v, np.bitwise_or.reduce(s, axis=0))
