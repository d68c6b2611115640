"""Exhaustive self-checks of the arithmetic and an oracle sweep of the engine.

Every adder is run on all ``p*p`` element pairs at once (one lane per pair)
and compared against integer arithmetic.  The F3 straight-line adder is also
run with ``and`` in place of ``xor`` on the line that folds the high carry
into the low sum bit; that variant must be caught.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import arith
from .code import parse_matrix, random_code, serialize_matrix
from .engine import EngineOptions, brute_force_min_weight, minimum_weight
from .field import _lanes, field_spec, pack_digits, support, tail_mask, unpack

BASE_PRIMES = (3, 5, 7)
DEEP_PRIMES = (11, 13, 31)
SWEEP_PRIMES = (3, 5, 7, 11)
SWEEP_CODES = 200


@dataclass
class Report:
    checks: int = 0
    failures: list[str] = dc_field(default_factory=list)
    lines: list[str] = dc_field(default_factory=list)

    def expect(self, name: str, got, want, pairs=None) -> bool:
        """Compare lane arrays; record the first few wrong pairs."""
        got = np.asarray(got)
        want = np.asarray(want)
        self.checks += want.size
        bad = np.nonzero(got != want)[0]
        if bad.size == 0:
            return True
        if pairs is not None:
            cases = ", ".join(f"{pairs[0][i]}+{pairs[1][i]}" for i in bad[:8])
            self.failures.append(f"{name}: {bad.size}/{want.size} wrong ({cases})")
        else:
            self.failures.append(f"{name}: {bad.size}/{want.size} wrong (first at lane {bad[0]})")
        return False

    @property
    def ok(self) -> bool:
        return not self.failures


def all_pairs(p: int):
    a = np.repeat(np.arange(p), p)
    b = np.tile(np.arange(p), p)
    return a, b


def _digits(planes: np.ndarray, n: int, ww: int) -> np.ndarray:
    lanes = _lanes(planes, n, ww)
    return (lanes << np.arange(planes.shape[0], dtype=np.int64)[:, None]).sum(axis=0)


def check_field(rep: Report, p: int, word_width: int = 64, f3_wrap=np.bitwise_xor) -> None:
    fs = field_spec(p)
    a, b = all_pairs(p)
    n = a.size
    V = pack_digits(p, a, word_width)
    W = pack_digits(p, b, word_width)
    tag = f"p={p} w={word_width}"
    pairs = (a, b)

    rep.expect(f"{tag} add", unpack(arith.add(fs, V, W)).digits, (a + b) % p, pairs)
    if fs.is_mersenne:
        rep.expect(f"{tag} mersenne adder", unpack(arith.add_generic_mersenne(fs, V, W)).digits, (a + b) % p, pairs)
    else:
        rep.expect(f"{tag} generic adder", unpack(arith.add_generic_any(fs, V, W)).digits, (a + b) % p, pairs)
    if p == 3:
        got = _digits(arith.f3_add_planes(V.planes, W.planes, wrap=f3_wrap), n, word_width)
        rep.expect(f"{tag} f3 straight-line adder", got, (a + b) % 3, pairs)
        kat = arith.from_kat(arith.add_f3_kat(arith.to_kat(V), arith.to_kat(W)), V)
        rep.expect(f"{tag} kat adder", unpack(kat).digits, (a + b) % 3, pairs)
        s, d = arith.addsub_f3(V, W)
        rep.expect(f"{tag} fused add", unpack(s).digits, (a + b) % 3, pairs)
        rep.expect(f"{tag} fused sub", unpack(d).digits, (a - b) % 3, pairs)
    if p == 7:
        rep.expect(f"{tag} f7 adder", unpack(arith.add_f7(V, W)).digits, (a + b) % 7, pairs)

    rep.expect(f"{tag} sub", unpack(arith.sub(fs, V, W)).digits, (a - b) % p, pairs)
    rep.expect(f"{tag} negate", unpack(arith.negate(fs, W)).digits, (-b) % p, pairs)
    for h in range(1, p):
        rep.expect(f"{tag} combine h={h}", unpack(arith.combine(fs, V, h, W)).digits, (a + h * b) % p, pairs)

    # masks: nonzero pattern of the exact result
    tm = tail_mask(n, word_width)
    exact_add = support(arith.add(fs, V, W))
    exact_sub = support(arith.sub(fs, V, W))
    rep.expect(f"{tag} add mask", _digits((arith.isometric_add_mask(fs, V, W).bits & tm)[None], n, word_width),
               _digits(exact_add[None], n, word_width), pairs)
    rep.expect(f"{tag} sub mask", _digits((arith.isometric_sub_mask(fs, V, W).bits & tm)[None], n, word_width),
               _digits(exact_sub[None], n, word_width), pairs)


def check_round_trips(rep: Report, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    for p in BASE_PRIMES + DEEP_PRIMES:
        for ww in (32, 64):
            for n in (1, 31, 32, 33, 64, 65, 200):
                digits = rng.integers(0, p, size=n)
                rep.expect(f"round trip p={p} w={ww} n={n}", unpack(pack_digits(p, digits, ww)).digits, digits)
    for p, k, n in ((3, 4, 9), (7, 3, 12), (13, 5, 20)):
        G = random_code(p, k, n, seed)
        back = parse_matrix(serialize_matrix(G))
        rep.expect(f"matrix text round trip p={p}", back.rows.ravel(), G.rows.ravel())


def sweep_params(count: int, seed: int = 0, max_size: int = 2 * 10**6, max_n: int = 40,
                 primes=SWEEP_PRIMES, max_k: int | None = None):
    """Seeded ``(p, k, n, seed)`` draws with ``p**k <= max_size``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        p = int(primes[i % len(primes)])
        kmax = 1
        while p ** (kmax + 1) <= max_size:
            kmax += 1
        if max_k is not None:
            kmax = min(kmax, max_k)
        k = int(rng.integers(1, kmax + 1))
        n = int(rng.integers(k, max_n + 1))
        out.append((p, k, n, int(rng.integers(0, 2**31))))
    return out


def check_oracle_sweep(rep: Report, count: int = SWEEP_CODES, seed: int = 0) -> int:
    """Compare the engine against exhaustive search; returns codes verified."""
    verified = 0
    configs = (EngineOptions(), EngineOptions(use_isometric=False, early_termination=False, word_width=32))
    for p, k, n, s in sweep_params(count, seed, max_size=10**5):
        G = random_code(p, k, n, s)
        want = brute_force_min_weight(G)
        good = True
        for opts in configs:
            d, _ = minimum_weight(G, opts)
            rep.checks += 1
            if d != want:
                rep.failures.append(f"oracle sweep p={p} k={k} n={n} seed={s}: got {d}, expected {want}")
                good = False
        verified += good
    return verified


def run(deep: bool = False, f3_wrap=np.bitwise_xor, out=print) -> bool:
    """Run the self-checks, print a summary through ``out``; True iff all pass."""
    rep = Report()
    primes = BASE_PRIMES + (DEEP_PRIMES if deep else ())
    for p in primes:
        for ww in (32, 64):
            before = (rep.checks, len(rep.failures))
            check_field(rep, p, ww, f3_wrap)
            status = "ok" if len(rep.failures) == before[1] else "FAIL"
            out(f"{status:<5}arithmetic p={p:<3} w={ww}  {rep.checks - before[0]} checks")
    before = (rep.checks, len(rep.failures))
    check_round_trips(rep)
    status = "ok" if len(rep.failures) == before[1] else "FAIL"
    out(f"{status:<5}round trips  {rep.checks - before[0]} checks")
    if deep:
        verified = check_oracle_sweep(rep)
        out(f"{'ok' if verified == SWEEP_CODES else 'FAIL':<5}oracle sweep  codes verified: {verified}")
    for msg in rep.failures:
        out(f"FAIL {msg}")
    out(f"{'PASS' if rep.ok else 'FAIL'}: {rep.checks} checks, {len(rep.failures)} failures")
    return rep.ok
