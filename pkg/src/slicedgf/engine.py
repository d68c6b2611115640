"""Brouwer-Zimmermann minimum distance with saved partial sums.

For every systematic matrix of a :class:`~slicedgf.code.GammaSet` and every
information weight ``g``, the search visits the codewords
``r_{i_1} + a_2 r_{i_2} + ... + a_g r_{i_g}`` (first coefficient fixed to one,
since scalar multiples share a weight).  Partial sums of the prefix are kept
on a stack so each visit costs one vector operation; the last one only
produces the nonzero pattern when ``use_isometric`` is set.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from . import kernels
from .arith import _mersenne_shift_for, scale
from .code import GammaSet, GeneratorMatrix, gamma_set
from .errors import BudgetExceededError, InputError, InvariantError
from .field import tail_mask

log = logging.getLogger(__name__)

BRUTE_FORCE_BUDGET = 2 * 10**7


@dataclass(frozen=True)
class EngineOptions:
    threads: int = 1
    use_isometric: bool = True
    early_termination: bool = True
    word_width: int = 64
    force_generic_arith: bool = False
    backend: str | None = None

    def __post_init__(self):
        if self.threads < 1:
            raise InputError("threads must be >= 1")
        if self.word_width not in (32, 64):
            raise InputError("word_width must be 32 or 64")


@dataclass
class StageRecord:
    g: int
    j: int
    visited: int
    best: int | None


@dataclass
class BZState:
    L: int
    U: int
    g: int = 0
    stage_log: list[StageRecord] = dc_field(default_factory=list)
    snapshots: list[tuple[int, int, int]] = dc_field(default_factory=list)
    early_terminated: bool = False

    @property
    def visited(self) -> int:
        return sum(rec.visited for rec in self.stage_log)


def lower_bound(g: int, m: int, k: int, k_m: int) -> int:
    """``(m-1)(g+1) + max(0, g+1-k+k_m)``: all but the last matrix have full rank."""
    return (m - 1) * (g + 1) + max(0, g + 1 - k + k_m)


def rank_contribution(g: int, k: int, k_j: int) -> int:
    """Minimum weight on one information set of a codeword not yet seen
    after all combinations of up to ``g`` rows were visited."""
    return max(0, g + 1 - k + k_j)


def lower_bound_ranks(g: int, ranks, k: int) -> int:
    """Lower bound for any number of partial-rank matrices; 0 for ``g = 0``."""
    if g <= 0:
        return 0
    return sum(rank_contribution(g, k, kj) for kj in ranks)


def expected_visits(rows: int, g: int, p: int) -> int:
    return comb(rows, g) * (p - 1) ** (g - 1) if g >= 1 else 0


class _Prepared:
    """Per-matrix tables shared read-only by all workers."""

    def __init__(self, gamma: GammaSet, options: EngineOptions):
        fs = gamma.field
        self.field = fs
        self.kind = kernels.field_kind(fs.p, fs.is_mersenne, options.force_generic_arith)
        self.fvec = np.array(fs.f, dtype=np.uint8)
        n = gamma.n
        self.tm = np.array(tail_mask(n, gamma.word_width))
        # h uses the add-mask against h*row when h is a power of two mod p
        # (rotation products); otherwise the sub-mask against (p-h)*row.
        iso_add = np.zeros(fs.p, dtype=np.int8)
        if fs.is_mersenne:
            for h in range(1, fs.p):
                hit = _mersenne_shift_for(fs, h)
                if hit is not None and not hit[1]:
                    iso_add[h] = 1
        self.iso_add = iso_add
        self.mults = []
        generic = options.force_generic_arith
        for rows in gamma.sliced:
            k = len(rows)
            r, nw = rows[0].planes.shape
            mult = np.zeros((k, fs.p, r, nw), dtype=rows[0].planes.dtype)
            for i, row in enumerate(rows):
                for h in range(1, fs.p):
                    mult[i, h] = scale(fs, h, row, generic=generic).planes
            self.mults.append(mult)


def _work_items(k: int, g: int, p: int, threads: int):
    """Prefixes partitioning one stage; returns ``(items, depth)``."""
    if threads == 1 or g == 1:
        return np.zeros((1, 0), dtype=np.int64), 0
    if g == 2:
        i1 = np.arange(k - 1, dtype=np.int64)
        return np.stack((i1, np.ones_like(i1)), axis=1), 1
    items = [(i1, i2, 1, a2) for i1 in range(k - g + 1) for i2 in range(i1 + 1, k - g + 2)
             for a2 in range(1, p)]
    return np.array(items, dtype=np.int64).reshape(-1, 4), 2


def enumerate_stage(gamma: GammaSet, j: int, g: int, U_in: int, options: EngineOptions = EngineOptions(),
                    _prepared: _Prepared | None = None) -> tuple[int, int]:
    """Lower ``U_in`` to the lightest combination of ``g`` rows of matrix ``j``.

    Returns ``(U_out, visited)``.  Stages with ``g`` beyond the row count
    return ``(U_in, 0)``.
    """
    best, visited = _stage(_prepared or _Prepared(gamma, options), j, g, options)
    return (min(U_in, best) if best is not None else U_in), visited


def _stage(prep: _Prepared, j: int, g: int, options: EngineOptions) -> tuple[int | None, int]:
    mult = prep.mults[j]
    k = mult.shape[0]
    if g < 1 or g > k:
        return None, 0
    be = kernels.backend(options.backend)
    items, depth = _work_items(k, g, prep.field.p, options.threads)

    def run(chunk):
        return be.enumerate_items(mult, g, chunk, depth, prep.kind, prep.fvec, prep.tm,
                                  prep.iso_add, options.use_isometric)

    if options.threads == 1 or len(items) == 1:
        best, visited = run(items)
        results = [(int(best), int(visited))]
    else:
        results = _run_parallel(run, items, options.threads)

    visited = sum(v for _, v in results)
    best = min(b for b, _ in results)
    if best == kernels.ZERO_CODEWORD:
        raise InvariantError(f"rows of matrix {j} combine to the zero codeword")
    return (None if best == kernels.NO_WEIGHT else best), visited


def _run_parallel(run, items, threads):
    """Workers claim chunks of ``items`` from a shared counter."""
    n_items = len(items)
    chunk = max(1, n_items // (threads * 16))
    lock = threading.Lock()
    state = {"next": 0}
    results = []

    def worker():
        local = []
        while True:
            with lock:
                start = state["next"]
                state["next"] = start + chunk
            if start >= n_items:
                break
            best, visited = run(items[start:start + chunk])
            local.append((int(best), int(visited)))
        return local

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for fut in [pool.submit(worker) for _ in range(threads)]:
            results.extend(fut.result())
    return results or [(kernels.NO_WEIGHT, 0)]


def minimum_weight(G: GeneratorMatrix, options: EngineOptions = EngineOptions()) -> tuple[int, BZState]:
    """Minimum Hamming weight of the code generated by ``G``."""
    gamma = gamma_set(G, options.word_width)
    prep = _Prepared(gamma, options)
    k, n = G.k, G.n
    ranks = gamma.ranks
    state = BZState(L=1, U=n - k + 1)
    g = 1
    while g <= k and state.L < state.U:
        state.g = g
        for j in range(gamma.m):
            if options.early_termination and j > 0:
                # every unseen codeword has weight >= this partial bound
                partial = (lower_bound_ranks(g, ranks[:j], k)
                           + lower_bound_ranks(g - 1, ranks[j:], k))
                if state.U <= partial:
                    state.L = max(state.L, partial)
                    state.early_terminated = True
                    break
            best, visited = _stage(prep, j, g, options)
            state.stage_log.append(StageRecord(g, j, visited, best))
            if best is not None and best < state.U:
                state.U = best
        else:
            state.L = max(state.L, lower_bound_ranks(g, ranks, k))
        state.snapshots.append((g, state.L, state.U))
        log.debug("g=%d L=%d U=%d", g, state.L, state.U)
        if state.early_terminated:
            break
        g += 1
    return state.U, state


def brute_force_min_weight(G: GeneratorMatrix, budget: int = BRUTE_FORCE_BUDGET, backend: str | None = None) -> int:
    """Minimum weight over all ``p^k - 1`` nonzero messages (dense arithmetic)."""
    p, k = G.field.p, G.k
    if p**k > budget:
        raise BudgetExceededError(f"p^k = {p}^{k} exceeds the brute-force budget of {budget}")
    be = kernels.backend(backend)
    best = int(be.brute_force(np.ascontiguousarray(G.rows, dtype=np.int64), p))
    if best == 0:
        raise InvariantError("generator matrix has dependent rows")
    return best
