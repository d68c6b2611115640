import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicedgf import kernels
from slicedgf.arith import add_planes
from slicedgf.code import gamma_set, generator_matrix, random_code
from slicedgf.engine import (
    EngineOptions,
    _Prepared,
    brute_force_min_weight,
    enumerate_stage,
    expected_visits,
    lower_bound,
    lower_bound_ranks,
    minimum_weight,
)
from slicedgf.errors import BudgetExceededError, InputError
from slicedgf.field import field_spec, pack_digits, tail_mask, unpack

TETRA = [[1, 0, 1, 1], [0, 1, 1, 2]]


def dense_min_weight(G):
    """Independent reference: every message vector, plain integer arithmetic."""
    p, k = G.field.p, G.k
    best = None
    for msg in itertools.product(range(p), repeat=k):
        if any(msg):
            w = int(np.count_nonzero((np.array(msg) @ G.rows) % p))
            best = w if best is None else min(best, w)
    return best


@pytest.mark.parametrize("p, rows, d", [
    (3, np.eye(4, dtype=int), 1),
    (13, np.eye(3, dtype=int), 1),
    (7, [[1, 1, 1, 1, 1]], 5),
    (3, TETRA, 3),
])
def test_known_distances(p, rows, d):
    G = generator_matrix(p, rows)
    assert minimum_weight(G)[0] == d
    assert brute_force_min_weight(G) == d
    assert brute_force_min_weight(G, backend="numpy") == d


def test_identity_stops_after_first_stage():
    d, state = minimum_weight(generator_matrix(5, np.eye(4, 7, dtype=int)))
    assert d == 1 and state.g == 1 and state.L >= 2


def test_square_identity_needs_no_search():
    # the Singleton bound already equals the trivial lower bound
    d, state = minimum_weight(generator_matrix(5, np.eye(4, dtype=int)))
    assert d == 1 and state.visited == 0


@pytest.mark.parametrize("args, want", [((1, 1, 3, 3), 2), ((2, 2, 10, 10), 6), ((3, 2, 25, 8), 4)])
def test_lower_bound_values(args, want):
    assert lower_bound(*args) == want


def test_lower_bound_ranks_agrees_with_single_partial_form():
    for g in range(1, 6):
        for k_m in range(1, 10):
            assert lower_bound_ranks(g, (10, 10, k_m), 10) == lower_bound(g, 3, 10, k_m)
    assert lower_bound_ranks(0, (4, 4), 4) == 0


def test_brute_force_budget():
    G = random_code(7, 9, 12, 0)
    with pytest.raises(BudgetExceededError):
        brute_force_min_weight(G)
    assert brute_force_min_weight(random_code(7, 4, 12, 0), budget=7**4) > 0


def test_rank_deficient_generator_raises():
    with pytest.raises(InputError):
        minimum_weight(generator_matrix(3, [[1, 1, 0], [2, 2, 0]]))


def test_options_validation():
    with pytest.raises(InputError):
        EngineOptions(threads=0)
    with pytest.raises(InputError):
        EngineOptions(word_width=16)


@pytest.mark.parametrize("p, k, n", [(3, 7, 16), (5, 5, 14), (7, 4, 15), (11, 3, 12), (13, 3, 9)])
@pytest.mark.parametrize("threads", [1, 3])
def test_stage_visit_counts(p, k, n, threads):
    G = random_code(p, k, n, 5)
    gs = gamma_set(G)
    prep = _Prepared(gs, EngineOptions())
    for j in range(gs.m):
        for g in range(1, k + 1):
            U, visited = enumerate_stage(gs, j, g, n, EngineOptions(threads=threads), prep)
            assert visited == comb(k, g) * (p - 1) ** (g - 1) == expected_visits(k, g, p)
            assert U <= n
    assert enumerate_stage(gs, 0, k + 1, 7, EngineOptions(), prep) == (7, 0)


def test_stage_finds_lightest_combination():
    G = random_code(5, 4, 10, 3)
    gs = gamma_set(G)
    mat, p = gs.matrices[0], 5
    for g in range(1, 5):
        want = None
        for idx in itertools.combinations(range(4), g):
            for tail in itertools.product(range(1, p), repeat=g - 1):
                cw = (mat[idx[0]] + sum(c * mat[i] for c, i in zip(tail, idx[1:]))) % p
                w = int(np.count_nonzero(cw))
                want = w if want is None else min(want, w)
        assert enumerate_stage(gs, 0, g, 99)[0] == want


def check_run(G, opts):
    d, state = minimum_weight(G, opts)
    n, k = G.n, G.k
    assert d <= n - k + 1
    Ls = [L for _, L, _ in state.snapshots]
    Us = [U for _, _, U in state.snapshots]
    assert all(a < b for a, b in zip(Ls, Ls[1:]))
    assert all(a >= b for a, b in zip(Us, Us[1:]))
    assert state.L >= state.U or state.g == k
    return d, state


OPTION_GRID = [
    EngineOptions(use_isometric=iso, early_termination=et, word_width=ww, threads=th)
    for iso in (True, False) for et in (True, False) for ww in (32, 64) for th in (1, 4)
]


@pytest.mark.parametrize("seed", range(6))
def test_configuration_invariance(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.choice([3, 5, 7, 11]))
    k = int(rng.integers(2, 6))
    G = random_code(p, k, int(rng.integers(k, 25)), seed)
    want = dense_min_weight(G)
    counts = {}
    for opts in OPTION_GRID:
        d, state = check_run(G, opts)
        assert d == want, opts
        key = (opts.use_isometric, opts.early_termination, opts.word_width)
        log = [(r.g, r.j, r.visited) for r in state.stage_log]
        assert counts.setdefault(key, log) == log
    assert minimum_weight(G, EngineOptions(force_generic_arith=True))[0] == want


@pytest.mark.parametrize("p, k, n", [(3, 6, 20), (7, 4, 18), (11, 3, 14), (31, 2, 10)])
def test_numpy_backend_matches_numba(p, k, n):
    G = random_code(p, k, n, 9)
    a = minimum_weight(G, EngineOptions(backend="numba"))
    b = minimum_weight(G, EngineOptions(backend="numpy"))
    assert a[0] == b[0]
    assert [r.visited for r in a[1].stage_log] == [r.visited for r in b[1].stage_log]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 31])
@pytest.mark.parametrize("generic", [False, True])
@pytest.mark.parametrize("ww", [32, 64])
def test_compiled_adder_matches_plane_adder(p, generic, ww):
    fs = field_spec(p)
    rng = np.random.default_rng(p)
    n = 150
    a = pack_digits(p, rng.integers(0, p, n), ww).planes
    b = pack_digits(p, rng.integers(0, p, n), ww).planes
    kind = kernels.field_kind(p, fs.is_mersenne, generic)
    fvec = np.array(fs.f, dtype=np.uint8)
    tm = np.array(tail_mask(n, ww))
    scratch = [np.zeros(fs.r, dtype=a.dtype) for _ in range(3)]
    for add_into in (kernels.loop_add_into, kernels._np_add_into):
        out = np.zeros_like(a)
        add_into(a, b, out, kind, fvec, tm, *scratch)
        assert np.array_equal(out, add_planes(fs, a, b, generic))


def test_brute_force_backends_agree():
    for seed in range(5):
        G = random_code(5, 5, 12, seed)
        rows = np.ascontiguousarray(G.rows)
        assert kernels.JIT.brute_force(rows, 5) == kernels.NUMPY.brute_force(rows, 5) == dense_min_weight(G)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([3, 5, 7, 11, 13]), k=st.integers(1, 5), extra=st.integers(0, 15), seed=st.integers(0, 10**6))
def test_matches_exhaustive_search(p, k, extra, seed):
    G = random_code(p, k, k + extra, seed)
    assert check_run(G, EngineOptions())[0] == brute_force_min_weight(G)


def test_decoded_rows_of_systematic_matrices():
    gs = gamma_set(generator_matrix(3, TETRA))
    assert [unpack(s).digits.tolist() for s in gs.sliced[0]] == gs.matrices[0].tolist()
