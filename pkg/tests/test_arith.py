import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicedgf import arith
from slicedgf.errors import InputError, InvariantError
from slicedgf.field import field_spec, is_prime, pack_digits, support, tail_mask, unpack
from slicedgf.selftest import all_pairs

SMALL = [3, 5, 7, 11, 13, 17, 19, 31, 61, 127]


def pairs(p, ww=64):
    a, b = all_pairs(p)
    return a, b, pack_digits(p, a, ww), pack_digits(p, b, ww)


def digits(s):
    return unpack(s).digits


# -- worked examples ---------------------------------------------------------


@pytest.mark.parametrize("p, x, y, want, iters, t", [
    (7, 5, 2, 0, 0, 1),
    (7, 5, 6, 4, 3, 0),
    (11, 10, 9, 8, 4, 0),
])
def test_traced_additions(p, x, y, want, iters, t):
    tr = arith.trace_add(None, pack_digits(p, [x]), pack_digits(p, [y]))
    assert digits(tr.result).tolist() == [want]
    assert tr.iterations == iters
    assert tr.t.to_list() == [t]


def test_f7_doubling_by_rotation():
    w = pack_digits(7, [3])
    assert arith.scale(None, 2, w).digits() == [6]
    assert arith.scale(None, 4, w).digits() == [5]
    assert arith.rotate_planes(None, w, 2).digits() == [5]


# -- exhaustive tables -------------------------------------------------------


@pytest.mark.parametrize("ww", [32, 64])
@pytest.mark.parametrize("p", SMALL)
def test_add_sub_negate_tables(p, ww):
    a, b, V, W = pairs(p, ww)
    assert (digits(arith.add(None, V, W)) == (a + b) % p).all()
    assert (digits(arith.add(None, V, W, generic=True)) == (a + b) % p).all()
    assert (digits(arith.sub(None, V, W)) == (a - b) % p).all()
    assert (digits(arith.negate(None, W)) == (-b) % p).all()


@pytest.mark.parametrize("p", SMALL)
def test_combine_and_scale_all_scalars(p):
    a, b, V, W = pairs(p)
    for h in range(1, p):
        assert (digits(arith.combine(None, V, h, W)) == (a + h * b) % p).all(), h
        assert (digits(arith.combine(None, V, h, W, generic=True)) == (a + h * b) % p).all(), h
        assert (digits(arith.scale(None, h, W)) == (h * b) % p).all(), h
    assert not digits(arith.scale(None, 0, W)).any()


@pytest.mark.parametrize("p", [3, 7, 31, 127])
def test_specialised_adders_match_mersenne_loop(p):
    _, _, V, W = pairs(p)
    ref = arith.add_generic_mersenne(None, V, W)
    assert arith.add(None, V, W) == ref
    if p == 3:
        assert arith.add_f3(V, W) == ref
    if p == 7:
        assert arith.add_f7(V, W) == ref


def test_f3_kat_and_fused_addsub():
    a, b, V, W = pairs(3)
    kat = arith.add_f3_kat(arith.to_kat(V), arith.to_kat(W))
    assert (digits(arith.from_kat(kat, V)) == (a + b) % 3).all()
    # KAT zero is (1, 1)
    assert arith.to_kat(pack_digits(3, [0, 1, 2])).tolist() == [[0b101], [0b011]]
    s, d = arith.addsub_f3(V, W)
    assert (digits(s) == (a + b) % 3).all()
    assert (digits(d) == (a - b) % 3).all()


def test_f3_carry_fold_needs_xor():
    a, b, V, W = pairs(3)
    good = arith.f3_add_planes(V.planes, W.planes)
    bad = arith.f3_add_planes(V.planes, W.planes, wrap=np.bitwise_and)
    assert (digits(arith._wrap(V, good)) == (a + b) % 3).all()
    bad_digits = digits(arith._wrap(V, bad))
    wrong = {(int(x), int(y)) for x, y, z in zip(a, b, bad_digits) if z != (x + y) % 3}
    assert (2, 2) in wrong


def test_generic_reduction_of_results_above_p():
    # 3 + 3 = 6 over F5 lands strictly between p and 2^r
    assert arith.add(None, pack_digits(5, [3]), pack_digits(5, [3])).digits() == [1]


@pytest.mark.parametrize("p", [p for p in range(3, 1024) if is_prime(p)])
def test_loop_adders_every_prime_below_1024(p):
    a, b, V, W = pairs(p)
    tr = arith.trace_add(None, V, W)
    assert (digits(tr.result) == (a + b) % p).all()
    assert tr.iterations <= arith.loop_limit(field_spec(p).r)


@pytest.mark.parametrize("p", [3, 7, 31, 127])
def test_mersenne_loop_within_r_passes(p):
    _, _, V, W = pairs(p)
    assert arith.trace_add(None, V, W).iterations <= field_spec(p).r


@pytest.mark.parametrize("p", [5, 11, 13])
def test_small_generic_loop_passes(p):
    _, _, V, W = pairs(p)
    assert arith.trace_add(None, V, W).iterations <= field_spec(p).r + 1


def test_mersenne_t_marks_wrapped_lanes():
    a, b, V, W = pairs(7)
    tr = arith.trace_add(None, V, W)
    # t is set exactly where the loop produced the all-ones column (7 == 0)
    assert tr.t.to_list() == [int(x != 0 and (x + y) % 7 == 0) for x, y in zip(a, b)]


# -- masks -------------------------------------------------------------------


@pytest.mark.parametrize("p", SMALL)
def test_masks_exhaustive(p):
    a, b, V, W = pairs(p)
    assert arith.isometric_add_mask(None, V, W).to_list() == ((a + b) % p != 0).astype(int).tolist()
    assert arith.isometric_sub_mask(None, V, W).to_list() == (a != b).astype(int).tolist()


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from(SMALL), ww=st.sampled_from([32, 64]), n=st.integers(1, 300), seed=st.integers(0, 2**32 - 1))
def test_masks_match_exact_support(p, ww, n, seed):
    rng = np.random.default_rng(seed)
    V = pack_digits(p, rng.integers(0, p, n), ww)
    W = pack_digits(p, rng.integers(0, p, n), ww)
    tm = tail_mask(n, ww)
    assert np.array_equal(arith.isometric_add_mask(None, V, W).bits, support(arith.add(None, V, W)) & tm)
    assert np.array_equal(arith.isometric_sub_mask(None, V, W).bits, support(arith.sub(None, V, W)) & tm)


# -- algebraic properties ----------------------------------------------------


@st.composite
def vector_triples(draw):
    p = draw(st.sampled_from(SMALL))
    n = draw(st.integers(1, 130))
    ww = draw(st.sampled_from([32, 64]))
    vec = st.lists(st.integers(0, p - 1), min_size=n, max_size=n)
    return p, [pack_digits(p, draw(vec), ww) for _ in range(3)]


@settings(max_examples=60, deadline=None)
@given(vector_triples())
def test_field_axioms(case):
    p, (u, v, w) = case
    add, sub = arith.add, arith.sub
    assert add(None, u, v) == add(None, v, u)
    assert add(None, add(None, u, v), w) == add(None, u, add(None, v, w))
    assert not digits(add(None, u, arith.negate(None, u))).any()
    assert sub(None, add(None, u, v), v) == u
    assert add(None, u, v, generic=True) == add(None, u, v)


# -- errors ------------------------------------------------------------------


def test_operand_mismatches_raise():
    v = pack_digits(7, [1, 2, 3])
    with pytest.raises(InputError):
        arith.add(None, v, pack_digits(5, [1, 2, 3]))
    with pytest.raises(InputError):
        arith.add(None, v, pack_digits(7, [1, 2]))
    with pytest.raises(InputError):
        arith.add(None, v, pack_digits(7, [1, 2, 3], 32))
    with pytest.raises(InputError):
        arith.add(field_spec(11), v, v)


def test_field_restricted_operations_raise():
    v5 = pack_digits(5, [1])
    with pytest.raises(InputError):
        arith.add_generic_mersenne(None, v5, v5)
    with pytest.raises(InputError):
        arith.add_generic_any(None, pack_digits(7, [1]), pack_digits(7, [1]))
    with pytest.raises(InputError):
        arith.add_f3(v5, v5)
    with pytest.raises(InputError):
        arith.rotate_planes(None, v5, 1)
    with pytest.raises(InputError):
        arith.combine(None, v5, 0, v5)
    with pytest.raises(InputError):
        arith.add_f3_kat(np.zeros((3, 1), np.uint64), np.zeros((3, 1), np.uint64))


def test_rotation_rejects_non_canonical_input():
    fs = field_spec(7)
    bad = arith._wrap(pack_digits(7, [0]), np.ones((3, 1), dtype=np.uint64))
    with pytest.raises(InvariantError):
        arith.rotate_planes(fs, bad, 1)
