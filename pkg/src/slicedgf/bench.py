"""Addition throughput benchmark.

Two operand sets ``A`` and ``B`` of ``vectors`` vectors with ``length``
digits each are drawn once.  Every repetition replaces ``A[i]`` by
``A[i] + B[i]`` for all ``i``, so after ``reps`` rounds ``A = A0 + reps*B``.
Only the repetition loop is timed; encoding and decoding are not.

Methods:

``sliced64`` / ``sliced32``
    bit planes in 64- or 32-bit words, added with the bitwise adders;
``contig8``
    one digit per byte, reduced by compare and subtract;
``contig8mod``
    one digit per byte, reduced with ``%``;
``contig32``
    ``32 // r`` digits packed side by side in each 32-bit word, pulled out
    with shifts and masks;
``kat3``
    F3 only: bit planes in the KAT encoding with the six-operation adder.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _jit, kernels
from .arith import add_planes, kat3_add_planes
from .errors import InputError
from .field import field_spec, n_words, tail_mask, word_dtype

METHODS = ("sliced64", "sliced32", "contig8", "contig8mod", "contig32", "kat3")

DEFAULT_LENGTH = 512
DEFAULT_VECTORS = 10_000
DEFAULT_REPS = 10_000


@dataclass(frozen=True)
class BenchResult:
    method: str
    p: int
    length: int
    vectors: int
    reps: int
    seconds: float
    checksum: int
    backend: str


HEADER = f"{'method':<12}{'p':>4}{'len':>7}{'vectors':>9}{'reps':>8}{'seconds':>12}{'checksum':>14}  backend"


def format_row(res: BenchResult) -> str:
    return (f"{res.method:<12}{res.p:>4}{res.length:>7}{res.vectors:>9}{res.reps:>8}"
            f"{res.seconds:>12.4f}{res.checksum:>14}  {res.backend}")


def operands(p: int, length: int, vectors: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, size=(vectors, length), dtype=np.uint8)
    b = rng.integers(0, p, size=(vectors, length), dtype=np.uint8)
    return a, b


def expected_checksum(p: int, a: np.ndarray, b: np.ndarray, reps: int) -> int:
    final = (a.astype(np.int64) + (reps % p) * b.astype(np.int64)) % p
    return int(final.sum())


# ---------------------------------------------------------------------------
# encodings


def _to_planes(digits: np.ndarray, r: int, word_width: int) -> np.ndarray:
    """``(V, L)`` digits -> ``(V, r, nwords)`` bit planes."""
    vecs, length = digits.shape
    nw = n_words(length, word_width)
    dt = word_dtype(word_width)
    padded = np.zeros((vecs, nw * word_width), dtype=np.uint8)
    padded[:, :length] = digits
    out = np.empty((vecs, r, nw), dtype=dt)
    for j in range(r):
        bits = ((padded >> j) & 1).reshape(vecs, nw, word_width)
        # packbits is big-endian per byte; reverse to get lane i at bit i
        by = np.packbits(bits[..., ::-1], axis=-1)
        words = np.zeros((vecs, nw), dtype=dt)
        for byte in range(word_width // 8):
            words |= by[..., -1 - byte].astype(dt) << dt(8 * byte)
        out[:, j] = words
    return out


def _from_planes(planes: np.ndarray, length: int) -> np.ndarray:
    vecs, r, nw = planes.shape
    ww = planes.dtype.itemsize * 8
    shifts = np.arange(ww, dtype=planes.dtype)
    digits = np.zeros((vecs, nw * ww), dtype=np.int64)
    for j in range(r):
        bits = (planes[:, j, :, None] >> shifts) & planes.dtype.type(1)
        digits += bits.reshape(vecs, -1).astype(np.int64) << j
    return digits[:, :length]


def _to_contig32(digits: np.ndarray, r: int) -> np.ndarray:
    per = 32 // r
    vecs, length = digits.shape
    nw = -(-length // per)
    padded = np.zeros((vecs, nw * per), dtype=np.uint32)
    padded[:, :length] = digits
    lanes = padded.reshape(vecs, nw, per)
    shifts = (np.arange(per, dtype=np.uint32) * np.uint32(r))
    return np.bitwise_or.reduce(lanes << shifts, axis=-1)


def _from_contig32(words: np.ndarray, r: int, length: int) -> np.ndarray:
    per = 32 // r
    shifts = np.arange(per, dtype=np.uint32) * np.uint32(r)
    lanes = (words[..., None] >> shifts) & np.uint32((1 << r) - 1)
    return lanes.reshape(words.shape[0], -1)[:, :length].astype(np.int64)


# ---------------------------------------------------------------------------
# compiled repetition loops


def _reps_sliced(a, b, reps, kind, fvec, tm):
    r = a.shape[1]
    zero = a[0, 0, 0] ^ a[0, 0, 0]
    d = np.full(r, zero)
    e = np.full(r, zero)
    sh = np.full(r, zero)
    for _ in range(reps):
        for i in range(a.shape[0]):
            kernels.loop_add_into(a[i], b[i], a[i], kind, fvec, tm, d, e, sh)


def _reps_f3(a, b, reps):
    for _ in range(reps):
        for i in range(a.shape[0]):
            for w in range(a.shape[2]):
                a0 = a[i, 0, w]
                a1 = a[i, 1, w]
                b0 = b[i, 0, w]
                b1 = b[i, 1, w]
                s0 = (a0 ^ b0) ^ (a1 & b1)
                s1 = a1 ^ b1 ^ (a0 & b0)
                t = s0 & s1
                a[i, 0, w] = s0 ^ t
                a[i, 1, w] = s1 ^ t


def _reps_f7(a, b, reps):
    for _ in range(reps):
        for i in range(a.shape[0]):
            for w in range(a.shape[2]):
                a0 = a[i, 0, w]
                a1 = a[i, 1, w]
                a2 = a[i, 2, w]
                b0 = b[i, 0, w]
                b1 = b[i, 1, w]
                b2 = b[i, 2, w]
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
                a[i, 0, w] = s0 ^ t
                a[i, 1, w] = s1 ^ t
                a[i, 2, w] = s2 ^ t


def _reps_kat3(a, b, reps):
    for _ in range(reps):
        for i in range(a.shape[0]):
            for w in range(a.shape[2]):
                t0 = a[i, 0, w] ^ b[i, 0, w]
                t1 = a[i, 1, w] ^ b[i, 1, w]
                u0 = t0 ^ a[i, 1, w]
                u1 = t1 ^ a[i, 0, w]
                a[i, 0, w] = t1 | u0
                a[i, 1, w] = t0 | u1


def _reps_contig8(a, b, reps, p):
    q = np.uint8(p)
    for _ in range(reps):
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                s = np.uint8(a[i, j] + b[i, j])
                if s >= q:
                    s -= q
                a[i, j] = s


def _reps_contig8mod(a, b, reps, p):
    q = np.uint8(p)
    for _ in range(reps):
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                a[i, j] = np.uint8(a[i, j] + b[i, j]) % q


def _reps_contig32(a, b, reps, p, r):
    per = 32 // r
    mask = np.uint32((1 << r) - 1)
    q = np.uint32(p)
    for _ in range(reps):
        for i in range(a.shape[0]):
            for w in range(a.shape[1]):
                x = a[i, w]
                y = b[i, w]
                out = np.uint32(0)
                for lane in range(per):
                    sft = np.uint32(lane * r)
                    s = ((x >> sft) & mask) + ((y >> sft) & mask)
                    if s >= q:
                        s -= q
                    out |= s << sft
                a[i, w] = out


_JIT_LOOPS = {
    "sliced": _jit.njit(_reps_sliced),
    "f3": _jit.njit(_reps_f3),
    "f7": _jit.njit(_reps_f7),
    "kat3": _jit.njit(_reps_kat3),
    "contig8": _jit.njit(_reps_contig8),
    "contig8mod": _jit.njit(_reps_contig8mod),
    "contig32": _jit.njit(_reps_contig32),
}


# ---------------------------------------------------------------------------
# numpy repetition loops (whole operand set per repetition)


def _np_sliced(a, b, reps, fs, generic=False):
    av = a.transpose(1, 0, 2)
    bv = b.transpose(1, 0, 2)
    for _ in range(reps):
        av[...] = add_planes(fs, av, bv, generic)


def _np_kat3(a, b, reps):
    av = a.transpose(1, 0, 2)
    bv = b.transpose(1, 0, 2)
    for _ in range(reps):
        av[...] = kat3_add_planes(av, bv)


def _np_contig8(a, b, reps, p):
    q = np.uint8(p)
    for _ in range(reps):
        np.add(a, b, out=a)
        np.subtract(a, q, out=a, where=a >= q)


def _np_contig8mod(a, b, reps, p):
    q = np.uint8(p)
    for _ in range(reps):
        np.add(a, b, out=a)
        np.remainder(a, q, out=a)


def _np_contig32(a, b, reps, p, r):
    per = 32 // r
    mask = np.uint32((1 << r) - 1)
    q = np.uint32(p)
    shifts = np.arange(per, dtype=np.uint32) * np.uint32(r)
    bl = (b[..., None] >> shifts) & mask
    for _ in range(reps):
        s = ((a[..., None] >> shifts) & mask) + bl
        s -= q * (s >= q)
        a[...] = np.bitwise_or.reduce(s << shifts, axis=-1)


# ---------------------------------------------------------------------------


def check_method(p: int, method: str) -> None:
    field_spec(p)
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method == "kat3" and p != 3:
        raise InputError("method kat3 is only defined for p = 3")


def run(p: int, method: str, length: int = DEFAULT_LENGTH, vectors: int = DEFAULT_VECTORS,
        reps: int = DEFAULT_REPS, seed: int = 0, backend: str | None = None) -> BenchResult:
    """Time ``reps`` rounds of in-place pairwise addition with ``method``."""
    check_method(p, method)
    if min(length, vectors) < 1 or reps < 0:
        raise InputError("length and vectors must be positive, reps non-negative")
    use_jit = kernels.backend(backend) is kernels.JIT
    fs = field_spec(p)
    r = fs.r
    a0, b0 = operands(p, length, vectors, seed)

    if method in ("sliced64", "sliced32", "kat3"):
        ww = 32 if method == "sliced32" else 64
        a = _to_planes(a0, r, ww)
        b = _to_planes(b0, r, ww)
        if method == "kat3":
            tm = np.asarray(tail_mask(length, ww))
            a = ~a & tm
            b = ~b & tm
    elif method == "contig32":
        a = _to_contig32(a0, r)
        b = _to_contig32(b0, r)
    else:
        a = a0.copy()
        b = b0.copy()

    start = time.perf_counter()
    if use_jit:
        if method in ("sliced64", "sliced32"):
            kind = kernels.field_kind(p, fs.is_mersenne)
            if kind == kernels.KIND_F3:
                _JIT_LOOPS["f3"](a, b, reps)
            elif kind == kernels.KIND_F7:
                _JIT_LOOPS["f7"](a, b, reps)
            else:
                tm = np.array(tail_mask(length, ww))
                _JIT_LOOPS["sliced"](a, b, reps, kind, np.array(fs.f, dtype=np.uint8), tm)
        elif method == "kat3":
            _JIT_LOOPS["kat3"](a, b, reps)
        elif method == "contig32":
            _JIT_LOOPS["contig32"](a, b, reps, p, r)
        else:
            _JIT_LOOPS[method](a, b, reps, p)
    else:
        if method in ("sliced64", "sliced32"):
            _np_sliced(a, b, reps, fs)
        elif method == "kat3":
            _np_kat3(a, b, reps)
        elif method == "contig32":
            _np_contig32(a, b, reps, p, r)
        elif method == "contig8":
            _np_contig8(a, b, reps, p)
        else:
            _np_contig8mod(a, b, reps, p)
    seconds = time.perf_counter() - start

    if method == "kat3":
        a = ~a & tm
    if method in ("sliced64", "sliced32", "kat3"):
        final = _from_planes(a, length)
    elif method == "contig32":
        final = _from_contig32(a, r, length)
    else:
        final = a.astype(np.int64)
    name = "numba" if use_jit else "numpy"
    return BenchResult(method, p, length, vectors, reps, seconds, int(final.sum()), name)


def warm_up(p: int, method: str, backend: str | None = None) -> None:
    """Trigger compilation so the timed run measures arithmetic only."""
    run(p, method, length=64, vectors=2, reps=1, backend=backend)
