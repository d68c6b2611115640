import numpy as np
import pytest

from slicedgf import bench
from slicedgf.errors import InputError


def _methods(p):
    return [m for m in bench.METHODS if m != "kat3" or p == 3]


@pytest.mark.parametrize("backend", ["numba", "numpy"])
@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 31])
def test_checksums_agree_across_methods(p, backend):
    a, b = bench.operands(p, 64, 10)
    want = bench.expected_checksum(p, a, b, 10)
    for m in _methods(p):
        res = bench.run(p, m, length=64, vectors=10, reps=10, backend=backend)
        assert res.checksum == want, m
        assert res.backend == backend


@pytest.mark.parametrize("length", [1, 63, 65, 100])
def test_odd_lengths(length):
    a, b = bench.operands(7, length, 3, seed=2)
    want = bench.expected_checksum(7, a, b, 5)
    for m in _methods(7):
        assert bench.run(7, m, length, 3, 5, seed=2).checksum == want


@pytest.mark.parametrize("ww", [32, 64])
def test_plane_encoding_round_trip(ww):
    rng = np.random.default_rng(0)
    digits = rng.integers(0, 13, size=(4, 100), dtype=np.uint8)
    planes = bench._to_planes(digits, 4, ww)
    assert planes.dtype == (np.uint32 if ww == 32 else np.uint64)
    assert np.array_equal(bench._from_planes(planes, 100), digits)


def test_contig32_packs_sixteen_f3_or_ten_f7_digits():
    d3 = np.full((1, 16), 2, dtype=np.uint8)
    assert bench._to_contig32(d3, 2).shape == (1, 1)
    d7 = np.arange(10, dtype=np.uint8)[None] % 7
    w = bench._to_contig32(d7, 3)
    assert w.shape == (1, 1)
    assert np.array_equal(bench._from_contig32(w, 3, 10), d7)


def test_invalid_combinations():
    with pytest.raises(InputError):
        bench.check_method(7, "kat3")
    with pytest.raises(InputError):
        bench.check_method(3, "sliced16")
    with pytest.raises(InputError):
        bench.check_method(9, "sliced64")
    with pytest.raises(InputError):
        bench.run(3, "sliced64", length=0)


def test_row_format_is_columnar():
    res = bench.BenchResult("contig8mod", 7, 512, 10000, 100, 1.5, 123, "numba")
    row = bench.format_row(res)
    # numeric columns are right-aligned under their labels
    for label, value in (("p", "7"), ("len", "512"), ("vectors", "10000"), ("reps", "100"),
                         ("seconds", "1.5000"), ("checksum", "123")):
        end = bench.HEADER.index(label) + len(label)
        assert row[end - len(value):end] == value, label
    assert row.index("numba") == bench.HEADER.index("backend")
    assert row.split() == ["contig8mod", "7", "512", "10000", "100", "1.5000", "123", "numba"]
