import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicedgf.code import (
    gamma_set,
    generator_matrix,
    parse_matrix,
    random_code,
    rank_mod_p,
    read_matrix,
    serialize_matrix,
    write_matrix,
)
from slicedgf.errors import InputError
from slicedgf.field import unpack

TETRACODE = "p 3\nk 2\nn 4\n1 0 1 1\n0 1 1 2\n"


def test_parse_and_serialize_round_trip(tmp_path):
    G = parse_matrix("# tetracode\n\n" + TETRACODE)
    assert (G.field.p, G.k, G.n) == (3, 2, 4)
    assert G.rows.tolist() == [[1, 0, 1, 1], [0, 1, 1, 2]]
    assert serialize_matrix(G) == TETRACODE
    path = tmp_path / "t.mat"
    write_matrix(G, path)
    assert path.read_bytes() == TETRACODE.encode()
    assert read_matrix(path) == G


@pytest.mark.parametrize("text, fragment", [
    ("", "missing header"),
    ("k 2\np 3\nn 4\n", "expected header line 'p"),
    ("p x\nk 1\nn 1\n1\n", "bad integer"),
    ("p 4\nk 1\nn 1\n1\n", "prime"),
    ("p 3\nk 2\nn 4\n1 0 1 1\n", "k=2 but 1 rows"),
    ("p 3\nk 1\nn 4\n1 0 1\n", "expected 4 entries"),
    ("p 3\nk 1\nn 2\n1 3\n", "out of range"),
    ("p 3\nk 1\nn 2\n1 a\n", "non-integer"),
    ("p 3\nk 0\nn 2\n", "positive"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_matrix(text)


def test_generator_matrix_validation():
    with pytest.raises(InputError):
        generator_matrix(5, [[1, 2, 5]])
    with pytest.raises(InputError):
        generator_matrix(5, [[1], [2]])
    G = generator_matrix(5, [[1, 2, 3]])
    with pytest.raises(ValueError):
        G.rows[0, 0] = 0


def test_random_code_is_deterministic_and_full_rank():
    a = random_code(7, 6, 20, 11)
    assert a == random_code(7, 6, 20, 11)
    assert a != random_code(7, 6, 20, 12)
    assert rank_mod_p(a.rows, 7) == 6
    # k == n forces redraws of dependent rows
    sq = random_code(3, 8, 8, 0)
    assert rank_mod_p(sq.rows, 3) == 8


def test_random_code_rejects_bad_shape():
    with pytest.raises(InputError):
        random_code(3, 5, 4, 0)
    with pytest.raises(InputError):
        random_code(6, 2, 4, 0)


def test_rank_mod_p():
    assert rank_mod_p(np.array([[1, 2], [2, 4]]), 5) == 1
    assert rank_mod_p(np.array([[1, 2], [2, 4]]), 3) == 1
    assert rank_mod_p(np.array([[1, 2], [2, 1]]), 3) == 1
    assert rank_mod_p(np.array([[1, 2], [2, 1]]), 5) == 2


def test_gamma_set_small_example():
    gs = gamma_set(generator_matrix(3, [[1, 0, 1, 0], [0, 1, 0, 1]]))
    assert gs.m == 2
    assert gs.k_m == 2
    assert gs.info_sets == ((0, 1), (2, 3))


def test_gamma_set_rejects_rank_deficient():
    with pytest.raises(InputError, match="rank"):
        gamma_set(generator_matrix(5, [[1, 2, 3], [2, 4, 1]]))


def check_gamma(G, word_width=64):
    gs = gamma_set(G, word_width)
    p, k = G.field.p, G.k
    assert gs.ranks[0] == k
    assert list(gs.ranks) == sorted(gs.ranks, reverse=True)
    used = [c for info in gs.info_sets for c in info]
    assert len(used) == len(set(used))
    for mat, info, rank, sliced in zip(gs.matrices, gs.info_sets, gs.ranks, gs.sliced):
        assert len(info) == rank
        # identity on the information set, zero rows below the rank
        assert (mat[:rank][:, list(info)] == np.eye(rank, dtype=int)).all()
        assert not mat[rank:][:, list(info)].any()
        # same row space as G
        assert rank_mod_p(np.vstack([G.rows, mat]), p) == k
        assert [unpack(s).digits.tolist() for s in sliced] == mat.tolist()
    # the unused columns cannot hold another pivot
    rest = [c for c in range(G.n) if c not in used]
    if rest:
        assert rank_mod_p(G.rows[:, rest], p) == 0
    return gs


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from([3, 5, 7, 11]), k=st.integers(1, 8), extra=st.integers(0, 20), seed=st.integers(0, 10**6))
def test_gamma_set_properties(p, k, extra, seed):
    check_gamma(random_code(p, k, k + extra, seed), word_width=32 if seed % 2 else 64)
