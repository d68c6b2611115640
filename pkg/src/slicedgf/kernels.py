"""Hot loops of the minimum-distance search.

Two backends share one enumeration driver:

* ``JIT``: word-at-a-time helpers compiled with numba (``nogil`` so worker
  threads run in parallel);
* ``NUMPY``: the same driver running in the interpreter on top of
  whole-plane numpy operations.

``ACTIVE`` is ``JIT`` unless ``SLICEDGF_DISABLE_NUMBA=1`` or numba is missing.
"""

from __future__ import annotations

from types import FunctionType, SimpleNamespace

import numpy as np

from . import _jit
from .arith import f3_add_planes, f7_add_planes, generic_add_planes, mersenne_add_planes

KIND_F3 = 0
KIND_F7 = 1
KIND_MERSENNE = 2
KIND_GENERIC = 3

NO_WEIGHT = np.iinfo(np.int64).max
ZERO_CODEWORD = -1


def field_kind(p: int, is_mersenne: bool, force_generic: bool = False) -> int:
    if not force_generic and p == 3:
        return KIND_F3
    if not force_generic and p == 7:
        return KIND_F7
    return KIND_MERSENNE if is_mersenne else KIND_GENERIC


# ---------------------------------------------------------------------------
# word-loop helpers (compiled)


def _popcount64(x):
    x = np.uint64(x)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


_popcount64 = _jit.njit(_popcount64)


def _loop_add_into(a, b, out, kind, fvec, tm, d, e, sh):
    r = a.shape[0]
    nw = a.shape[1]
    zero = a[0, 0] ^ a[0, 0]
    if kind == KIND_F3:
        for w in range(nw):
            a0 = a[0, w]
            a1 = a[1, w]
            b0 = b[0, w]
            b1 = b[1, w]
            s0 = (a0 ^ b0) ^ (a1 & b1)
            s1 = a1 ^ b1 ^ (a0 & b0)
            t = s0 & s1
            out[0, w] = s0 ^ t
            out[1, w] = s1 ^ t
        return
    if kind == KIND_F7:
        for w in range(nw):
            a0 = a[0, w]
            a1 = a[1, w]
            a2 = a[2, w]
            b0 = b[0, w]
            b1 = b[1, w]
            b2 = b[2, w]
            s0 = a0 ^ b0
            c0 = a0 & b0
            s1 = a1 ^ b1 ^ c0
            c1 = (a1 & b1) | (a1 & c0) | (b1 & c0)
            s2 = a2 ^ b2 ^ c1
            c2 = (a2 & b2) | (a2 & c1) | (b2 & c1)
            c0 = s0 & c2
            s0 = s0 ^ c2
            c1 = s1 & c0
            s1 = s1 ^ c0
            s2 = s2 ^ c1
            t = s0 & s1 & s2
            out[0, w] = s0 ^ t
            out[1, w] = s1 ^ t
            out[2, w] = s2 ^ t
        return
    for w in range(nw):
        for j in range(r):
            d[j] = a[j, w] ^ b[j, w]
            e[j] = a[j, w] & b[j, w]
        passes = 0
        while True:
            anye = e[0]
            for j in range(1, r):
                anye |= e[j]
            if anye == 0:
                break
            passes += 1
            if passes > 2 * r + 2:
                raise RuntimeError("carry loop did not terminate")
            top = e[r - 1]
            for j in range(r - 1, 0, -1):
                sh[j] = e[j - 1]
            if kind == KIND_MERSENNE:
                sh[0] = top
                for j in range(r):
                    x = d[j]
                    y = sh[j]
                    d[j] = x ^ y
                    e[j] = x & y
            else:
                sh[0] = zero
                for j in range(r):
                    x = d[j]
                    y = sh[j]
                    z = top if fvec[j] else zero
                    d[j] = x ^ y ^ z
                    e[j] = (x & y) | (x & z) | (y & z)
        if kind == KIND_MERSENNE:
            t = d[0]
            for j in range(1, r):
                t &= d[j]
            for j in range(r):
                out[j, w] = d[j] ^ t
        else:
            c = zero
            for j in range(r):
                x = d[j]
                if fvec[j]:
                    sh[j] = ~x ^ c
                    c = x | c
                else:
                    sh[j] = x ^ c
                    c = x & c
            for j in range(r):
                out[j, w] = ((sh[j] & c) | (d[j] & ~c)) & tm[w]


def _loop_weight(x):
    r = x.shape[0]
    total = 0
    for w in range(x.shape[1]):
        acc = x[0, w]
        for j in range(1, r):
            acc |= x[j, w]
        total += _popcount64(acc)
    return total


def _loop_weight_add_mask(a, b, kind, tm):
    r = a.shape[0]
    total = 0
    if kind == KIND_F3:
        for w in range(a.shape[1]):
            total += _popcount64((a[0, w] | b[0, w]) ^ (a[1, w] | b[1, w]))
        return total
    for w in range(a.shape[1]):
        differs = ~(a[0, w] ^ b[0, w])
        anyset = a[0, w] | b[0, w]
        for j in range(1, r):
            differs |= ~(a[j, w] ^ b[j, w])
            anyset |= a[j, w] | b[j, w]
        total += _popcount64(differs & anyset & tm[w])
    return total


def _loop_weight_sub_mask(a, b):
    r = a.shape[0]
    total = 0
    for w in range(a.shape[1]):
        acc = a[0, w] ^ b[0, w]
        for j in range(1, r):
            acc |= a[j, w] ^ b[j, w]
        total += _popcount64(acc)
    return total


# ---------------------------------------------------------------------------
# whole-plane numpy helpers (fallback)


def _np_add_into(a, b, out, kind, fvec, tm, d, e, sh):
    if kind == KIND_F3:
        out[...] = f3_add_planes(a, b)
    elif kind == KIND_F7:
        out[...] = f7_add_planes(a, b)
    elif kind == KIND_MERSENNE:
        out[...] = mersenne_add_planes(a, b)[0]
    else:
        out[...] = generic_add_planes(a, b, tuple(int(x) for x in fvec))[0] & tm


def _np_weight(x):
    return int(np.bitwise_count(np.bitwise_or.reduce(x, axis=0)).sum())


def _np_weight_add_mask(a, b, kind, tm):
    if kind == KIND_F3:
        c = a | b
        return int(np.bitwise_count(c[0] ^ c[1]).sum())
    differs = np.bitwise_or.reduce(~(a ^ b), axis=0)
    anyset = np.bitwise_or.reduce(a | b, axis=0)
    return int(np.bitwise_count(differs & anyset & tm).sum())


def _np_weight_sub_mask(a, b):
    return int(np.bitwise_count(np.bitwise_or.reduce(a ^ b, axis=0)).sum())


# ---------------------------------------------------------------------------
# enumeration driver


# The driver calls its helpers through these module globals.  The numba
# build sees the compiled helpers; the numpy build is a copy of the same
# function bound to the numpy helpers (see _rebind).
_add_into = loop_add_into = _jit.njit(_loop_add_into)
_weight = _jit.njit(_loop_weight)
_weight_add_mask = _jit.njit(_loop_weight_add_mask)
_weight_sub_mask = _jit.njit(_loop_weight_sub_mask)


def _enumerate_items(mult, g, items, q, kind, fvec, tm, iso_add, use_iso):
    """Visit every combination extending each prefix in ``items``.

    ``mult[i, h]`` holds ``h * row_i``.  A combination picks row indices
    ``i_0 < ... < i_{g-1}`` with coefficient 1 on ``i_0`` and any nonzero
    coefficient elsewhere.  ``items[it, :q]`` fixes the first ``q``
    indices and ``items[it, q:2q]`` their coefficients.

    Returns ``(best_weight, visited)``; ``best_weight`` is
    ``ZERO_CODEWORD`` if a combination sums to zero.
    """
    k = mult.shape[0]
    p = mult.shape[1]
    r = mult.shape[2]
    nw = mult.shape[3]
    best = NO_WEIGHT
    visited = 0
    if g == 1:
        for i in range(k):
            wt = _weight(mult[i, 1])
            visited += 1
            if wt == 0:
                return ZERO_CODEWORD, visited
            if wt < best:
                best = wt
        return best, visited

    sums = np.zeros((g, r, nw), dtype=mult.dtype)
    tmp = np.zeros((r, nw), dtype=mult.dtype)
    d = np.zeros(r, dtype=mult.dtype)
    e = np.zeros(r, dtype=mult.dtype)
    sh = np.zeros(r, dtype=mult.dtype)
    idx = np.zeros(g, dtype=np.int64)
    coef = np.zeros(g, dtype=np.int64)
    last = g - 1

    for it in range(items.shape[0]):
        for t in range(q):
            idx[t] = items[it, t]
            coef[t] = items[it, q + t]
            if t == 0:
                sums[0, :, :] = mult[idx[0], coef[0]]
            else:
                _add_into(sums[t - 1], mult[idx[t], coef[t]], sums[t], kind, fvec, tm, d, e, sh)
        t = q
        if t < last:
            if t == 0:
                idx[0] = 0
            else:
                idx[t] = idx[t - 1] + 1
            coef[t] = 1
        while True:
            if t == last:
                prev = sums[last - 1]
                for i in range(idx[last - 1] + 1, k):
                    for h in range(1, p):
                        if use_iso:
                            if iso_add[h]:
                                wt = _weight_add_mask(prev, mult[i, h], kind, tm)
                            else:
                                wt = _weight_sub_mask(prev, mult[i, p - h])
                        else:
                            _add_into(prev, mult[i, h], tmp, kind, fvec, tm, d, e, sh)
                            wt = _weight(tmp)
                        visited += 1
                        if wt == 0:
                            return ZERO_CODEWORD, visited
                        if wt < best:
                            best = wt
                t -= 1
                if t < q:
                    break
                coef[t] += 1
                if coef[t] >= (2 if t == 0 else p):
                    coef[t] = 1
                    idx[t] += 1
                continue
            if idx[t] > k - g + t:
                t -= 1
                if t < q:
                    break
                coef[t] += 1
                if coef[t] >= (2 if t == 0 else p):
                    coef[t] = 1
                    idx[t] += 1
                continue
            if t == 0:
                sums[0, :, :] = mult[idx[0], coef[0]]
            else:
                _add_into(sums[t - 1], mult[idx[t], coef[t]], sums[t], kind, fvec, tm, d, e, sh)
            t += 1
            if t < last:
                idx[t] = idx[t - 1] + 1
                coef[t] = 1
    return best, visited


# ---------------------------------------------------------------------------
# dense brute force (independent of the sliced arithmetic)


def _brute_force_odometer(rows, p):
    """Minimum nonzero weight of all ``x @ rows mod p`` by odometer stepping.

    Stepping digit ``j`` (wrapping ``p-1 -> 0`` or incrementing) always adds
    ``rows[j]`` to the current codeword.
    """
    k = rows.shape[0]
    n = rows.shape[1]
    digits = np.zeros(k, dtype=np.int64)
    cw = np.zeros(n, dtype=np.int64)
    best = n + 1
    while True:
        j = 0
        while j < k:
            for c in range(n):
                v = cw[c] + rows[j, c]
                if v >= p:
                    v -= p
                cw[c] = v
            digits[j] += 1
            if digits[j] == p:
                digits[j] = 0
                j += 1
            else:
                break
        if j == k:
            return best
        wt = 0
        for c in range(n):
            if cw[c] != 0:
                wt += 1
        if wt < best:
            best = wt


def _brute_force_batched(rows, p, batch=1 << 14):
    k, n = rows.shape
    total = p ** k
    best = n + 1
    powers = p ** np.arange(k, dtype=np.int64)
    for start in range(1, total, batch):
        msg = np.arange(start, min(total, start + batch), dtype=np.int64)
        x = (msg[:, None] // powers) % p
        cw = (x @ rows) % p
        best = min(best, int(np.count_nonzero(cw, axis=1).min()))
    return best


def _rebind(fn, **helpers):
    """Copy of ``fn`` whose global lookups see ``helpers`` first."""
    return FunctionType(fn.__code__, {**fn.__globals__, **helpers}, fn.__name__,
                        fn.__defaults__, fn.__closure__)


JIT = SimpleNamespace(
    name="numba",
    enumerate_items=_jit.njit(_enumerate_items) if _jit.HAVE_NUMBA else None,
    brute_force=_jit.njit(_brute_force_odometer) if _jit.HAVE_NUMBA else None,
)

NUMPY = SimpleNamespace(
    name="numpy",
    enumerate_items=_rebind(_enumerate_items, _add_into=_np_add_into, _weight=_np_weight,
                            _weight_add_mask=_np_weight_add_mask, _weight_sub_mask=_np_weight_sub_mask),
    brute_force=_brute_force_batched,
)

ACTIVE = JIT if _jit.USE_NUMBA else NUMPY


def backend(name: str | None = None) -> SimpleNamespace:
    if name is None:
        return ACTIVE
    if name == "numba":
        if JIT.enumerate_items is None:
            raise RuntimeError("numba is not installed")
        return JIT
    if name == "numpy":
        return NUMPY
    raise ValueError(f"unknown backend {name!r}")
