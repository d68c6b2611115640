"""Generator matrices over F_p and their systematic forms.

Matrix text format::

    # optional comments
    p 7
    k 2
    n 4
    1 0 1 1
    0 1 1 2
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import InputError
from .field import FieldSpec, SlicedVector, dense, field_spec, pack


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    field: FieldSpec
    rows: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.rows, dtype=np.int64)
        if m.ndim != 2:
            raise InputError("generator matrix must be two-dimensional")
        if m.shape[0] > m.shape[1]:
            raise InputError(f"k = {m.shape[0]} exceeds n = {m.shape[1]}")
        if m.size and (m.min() < 0 or m.max() >= self.field.p):
            raise InputError(f"entries must lie in [0, {self.field.p - 1}]")
        object.__setattr__(self, "rows", _freeze(m))

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.rows, other.rows)

    __hash__ = None

    def __repr__(self) -> str:
        return f"GeneratorMatrix(p={self.field.p}, k={self.k}, n={self.n})"


def generator_matrix(p: int, rows) -> GeneratorMatrix:
    return GeneratorMatrix(field_spec(p), np.asarray(rows, dtype=np.int64))


# ---------------------------------------------------------------------------
# text format


def parse_matrix(text: str) -> GeneratorMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    header = {}
    for key, ln in zip(("p", "k", "n"), lines[:3]):
        parts = ln.split()
        if len(parts) != 2 or parts[0] != key:
            raise InputError(f"expected header line '{key} <int>', got {ln!r}")
        try:
            header[key] = int(parts[1])
        except ValueError:
            raise InputError(f"bad integer in header line {ln!r}") from None
    if len(header) != 3:
        raise InputError("missing header lines; need 'p', 'k' and 'n'")
    fs = field_spec(header["p"])
    k, n = header["k"], header["n"]
    if k < 1 or n < 1:
        raise InputError("k and n must be positive")
    body = lines[3:]
    if len(body) != k:
        raise InputError(f"header declares k={k} but {len(body)} rows follow")
    rows = []
    for i, ln in enumerate(body):
        try:
            vals = [int(x) for x in ln.split()]
        except ValueError:
            raise InputError(f"row {i}: non-integer entry") from None
        if len(vals) != n:
            raise InputError(f"row {i}: expected {n} entries, got {len(vals)}")
        bad = [x for x in vals if not 0 <= x < fs.p]
        if bad:
            raise InputError(f"row {i}: digit {bad[0]} out of range for p={fs.p}")
        rows.append(vals)
    return GeneratorMatrix(fs, np.array(rows, dtype=np.int64).reshape(k, n))


def serialize_matrix(G: GeneratorMatrix) -> str:
    out = [f"p {G.field.p}", f"k {G.k}", f"n {G.n}"]
    out.extend(" ".join(str(int(x)) for x in row) for row in G.rows)
    return "\n".join(out) + "\n"


def read_matrix(path) -> GeneratorMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def write_matrix(G: GeneratorMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_matrix(G))


# ---------------------------------------------------------------------------
# dense linear algebra mod p


def rank_mod_p(m: np.ndarray, p: int) -> int:
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = (a[rank] * pow(int(a[rank, c]), -1, p)) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != rank]
        a[others] = (a[others] - np.outer(a[others, c], a[rank])) % p
        rank += 1
    return rank


def random_code(p: int, k: int, n: int, seed: int, max_retries: int = 1000) -> GeneratorMatrix:
    """Seeded random ``k x n`` generator matrix of full rank.

    Rows that would make the matrix rank-deficient are redrawn.
    """
    fs = field_spec(p)
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    rows: list[np.ndarray] = []
    retries = 0
    while len(rows) < k:
        cand = rng.integers(0, p, size=n, dtype=np.int64)
        if rank_mod_p(np.array(rows + [cand]), p) == len(rows) + 1:
            rows.append(cand)
        else:
            retries += 1
            if retries > max_retries:
                raise InputError(f"could not draw a rank-{k} matrix for p={p}, n={n}")
    return GeneratorMatrix(fs, np.array(rows))


# ---------------------------------------------------------------------------
# systematic matrices with disjoint information sets


@dataclass(frozen=True, eq=False)
class GammaSet:
    """Row-equivalent systematic matrices over pairwise disjoint information sets.

    Row ``t < ranks[j]`` of ``matrices[j]`` has a one at ``info_sets[j][t]``
    and zeros at the other positions of that information set.
    """

    field: FieldSpec
    matrices: tuple[np.ndarray, ...]
    info_sets: tuple[tuple[int, ...], ...]
    ranks: tuple[int, ...]
    sliced: tuple[tuple[SlicedVector, ...], ...]
    word_width: int

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def k(self) -> int:
        return self.ranks[0]

    @property
    def k_m(self) -> int:
        return self.ranks[-1]

    @property
    def n(self) -> int:
        return self.matrices[0].shape[1]


def _systematic_on(G: np.ndarray, p: int, allowed: np.ndarray):
    """Reduce ``G`` on allowed columns; returns (matrix, pivot columns).

    Pivot rows come first, in pivot order; the remaining rows are zero on
    every allowed column.
    """
    a = G.copy()
    k = a.shape[0]
    pivots: list[int] = []
    r = 0
    for c in np.nonzero(allowed)[0]:
        if r == k:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(int(c))
        r += 1
    return a, pivots


def gamma_set(G: GeneratorMatrix, word_width: int = 64) -> GammaSet:
    """Greedy construction of systematic matrices on unused columns.

    Each round eliminates over the columns no earlier round has claimed;
    the pivots become that round's information set.  Stops when a round
    finds no pivot.
    """
    p = G.field.p
    if rank_mod_p(G.rows, p) < G.k:
        raise InputError("generator matrix has rank < k")
    used = np.zeros(G.n, dtype=bool)
    mats, infos, ranks, sliced = [], [], [], []
    while not used.all():
        mat, piv = _systematic_on(G.rows, p, ~used)
        if not piv:
            break
        used[piv] = True
        mat = _freeze(mat)
        mats.append(mat)
        infos.append(tuple(piv))
        ranks.append(len(piv))
        sliced.append(tuple(pack(dense(G.field, row), word_width) for row in mat))
    return GammaSet(G.field, tuple(mats), tuple(infos), tuple(ranks), tuple(sliced), word_width)
