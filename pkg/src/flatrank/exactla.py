"""Exact sparse linear algebra: rational and prime-field scalars, labeled
sparse matrices, and deterministic rank computation.

Two rank engines are provided.  ``rank_exact`` runs a fraction-free integer
elimination (denominators are cleared row by row, updates are
cross-multiplications with per-row content reduction) and returns the true
rank over the rationals.  ``rank_modular`` reduces the matrix modulo random
word-sized primes and eliminates with a vectorized kernel; a modular rank
can only undershoot, so the result is a certified lower bound that equals
the true rank with overwhelming probability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence

import numpy as np

# Primes are drawn from [PRIME_FLOOR, PRIME_CEIL].  The floor keeps the
# per-prime collision probability negligible; the ceiling keeps (q-1)^2
# inside a signed 64-bit word so the numpy elimination kernel is exact.
PRIME_FLOOR = 2**31
PRIME_CEIL = 3037000499

# Default policy boundary: exact elimination up to this many columns,
# modular with two primes beyond it.
EXACT_COLUMN_LIMIT = 500

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def binomial(n: int, k: int) -> int:
    """C(n, k) with the out-of-range convention C(n, k) = 0 for k < 0 or k > n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random) -> int:
    """Uniform random prime in [PRIME_FLOOR, PRIME_CEIL]."""
    while True:
        candidate = rng.randrange(PRIME_FLOOR | 1, PRIME_CEIL + 1, 2)
        if is_prime(candidate):
            return candidate


class SparseMatrix:
    """Immutable sparse matrix with exact entries and optional basis labels.

    Entries are ``Fraction`` values when ``modulus`` is None, otherwise
    integer residues in [1, modulus).  Zero entries are never stored.
    Labels, when present, are opaque hashable objects, one per row/column,
    pairwise distinct.
    """

    __slots__ = ("n_rows", "n_cols", "_data", "row_labels", "col_labels", "modulus")

    def __init__(
        self,
        n_rows: int,
        n_cols: int,
        entries: Iterable[tuple[int, int, object]] = (),
        row_labels: Sequence | None = None,
        col_labels: Sequence | None = None,
        modulus: int | None = None,
    ):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.modulus = modulus
        data: dict[tuple[int, int], object] = {}
        for i, j, value in entries:
            if not (0 <= i < n_rows and 0 <= j < n_cols):
                raise ValueError(f"entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix")
            if modulus is None:
                if isinstance(value, float):
                    raise TypeError("exact matrices do not accept floats")
                value = Fraction(value)
            else:
                value = int(value) % modulus
            if (i, j) in data:
                raise ValueError(f"duplicate entry at ({i}, {j})")
            if value:
                data[i, j] = value
        self._data = data
        self.row_labels = self._check_labels(row_labels, n_rows, "row")
        self.col_labels = self._check_labels(col_labels, n_cols, "column")

    @staticmethod
    def _check_labels(labels, count, kind):
        if labels is None:
            return None
        labels = tuple(labels)
        if len(labels) != count:
            raise ValueError(f"{kind} labels have length {len(labels)}, expected {count}")
        if len(set(labels)) != count:
            raise ValueError(f"{kind} labels are not pairwise distinct")
        return labels

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, [(i, i, 1) for i in range(n)])

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        entries = []
        for i, row in enumerate(rows):
            if len(row) != n_cols:
                raise ValueError("ragged dense input")
            for j, v in enumerate(row):
                if v:
                    entries.append((i, j, v))
        return cls(n_rows, n_cols, entries)

    @property
    def nnz(self) -> int:
        return len(self._data)

    def entry(self, i: int, j: int):
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError((i, j))
        zero = Fraction(0) if self.modulus is None else 0
        return self._data.get((i, j), zero)

    def entries(self) -> list[tuple[int, int, object]]:
        return [(i, j, self._data[i, j]) for i, j in sorted(self._data)]

    def is_zero(self) -> bool:
        return not self._data

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            (self.n_rows, self.n_cols, self.modulus) == (other.n_rows, other.n_cols, other.modulus)
            and self._data == other._data
        )

    def __repr__(self) -> str:
        kind = "Q" if self.modulus is None else f"F_{self.modulus}"
        return f"SparseMatrix({self.n_rows}x{self.n_cols} over {kind}, nnz={self.nnz})"

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.n_cols,
            self.n_rows,
            [(j, i, v) for (i, j), v in self._data.items()],
            row_labels=self.col_labels,
            col_labels=self.row_labels,
            modulus=self.modulus,
        )

    def select_columns(self, indices: Sequence[int]) -> "SparseMatrix":
        pos = {old: new for new, old in enumerate(indices)}
        if len(pos) != len(indices):
            raise ValueError("repeated column index")
        entries = [
            (i, pos[j], v) for (i, j), v in self._data.items() if j in pos
        ]
        labels = None
        if self.col_labels is not None:
            labels = [self.col_labels[j] for j in indices]
        return SparseMatrix(
            self.n_rows, len(indices), entries,
            row_labels=self.row_labels, col_labels=labels, modulus=self.modulus,
        )

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n_rows != other.n_rows or self.modulus != other.modulus:
            raise ValueError("incompatible matrices for hstack")
        entries = list(self.entries())
        entries.extend((i, j + self.n_cols, v) for i, j, v in other.entries())
        return SparseMatrix(
            self.n_rows, self.n_cols + other.n_cols, entries,
            row_labels=self.row_labels, modulus=self.modulus,
        )

    def multiply(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.n_cols != other.n_rows or self.modulus != other.modulus:
            raise ValueError("incompatible matrices for multiply")
        by_row: dict[int, list[tuple[int, object]]] = {}
        for (i, j), v in other._data.items():
            by_row.setdefault(i, []).append((j, v))
        acc: dict[tuple[int, int], object] = {}
        for (i, k), v in self._data.items():
            for j, w in by_row.get(k, ()):
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        entries = [(i, j, v) for (i, j), v in acc.items() if v]
        return SparseMatrix(
            self.n_rows, other.n_cols, entries,
            row_labels=self.row_labels, col_labels=other.col_labels, modulus=self.modulus,
        )

    def to_coordinate_text(self) -> str:
        """Coordinate text dump (1-based indices, one 'row col value' line per entry)."""
        if self.modulus is not None:
            raise ValueError("only rational matrices are dumped")
        lines = ["%%flatrank coordinate rational", f"{self.n_rows} {self.n_cols} {self.nnz}"]
        for i, j, v in self.entries():
            lines.append(f"{i + 1} {j + 1} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_coordinate_text(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
        if not lines or not lines[0].startswith("%%flatrank coordinate"):
            raise ValueError("missing coordinate header")
        try:
            n_rows, n_cols, nnz = (int(tok) for tok in lines[1].split())
        except Exception as exc:
            raise ValueError("malformed size line") from exc
        if len(lines) - 2 != nnz:
            raise ValueError(f"expected {nnz} entries, found {len(lines) - 2}")
        entries = []
        for ln in lines[2:]:
            toks = ln.split()
            if len(toks) != 3:
                raise ValueError(f"malformed entry line: {ln!r}")
            entries.append((int(toks[0]) - 1, int(toks[1]) - 1, Fraction(toks[2])))
        return cls(n_rows, n_cols, entries)


@dataclass(frozen=True)
class RankResult:
    """A computed rank plus how it was obtained.

    ``method`` is ``exact_rational`` or ``modular``.  A modular rank never
    exceeds the true rank, hence ``is_certified_lower_bound``.
    """

    rank: int
    method: str
    primes_used: tuple[int, ...] = ()
    is_certified_lower_bound: bool = False
    block_ranks: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.method not in ("exact_rational", "modular"):
            raise ValueError(f"unknown rank method {self.method!r}")
        if self.method == "modular":
            if not self.primes_used:
                raise ValueError("modular result must record its primes")
            if not self.is_certified_lower_bound:
                raise ValueError("modular result is only a certified lower bound")
        else:
            if self.primes_used:
                raise ValueError("exact result must not record primes")


def _integer_rows(m: SparseMatrix) -> list[dict[int, int]]:
    """Nonzero rows as column->integer dicts, denominators cleared per row."""
    rows: list[dict[int, Fraction]] = [dict() for _ in range(m.n_rows)]
    for (i, j), v in m._data.items():
        rows[i][j] = v
    out = []
    for row in rows:
        if not row:
            continue
        scale = 1
        for v in row.values():
            scale = scale * v.denominator // gcd(scale, v.denominator)
        out.append({j: int(v * scale) for j, v in row.items()})
    return out


def _sparse_integer_rank(rows: list[dict[int, int]]) -> int:
    live = {i: row for i, row in enumerate(rows) if row}
    cols: dict[int, set[int]] = {}
    for i, row in live.items():
        for j in row:
            cols.setdefault(j, set()).add(i)
    rank = 0
    while cols:
        # Markowitz-flavored pivoting: cheapest column, then sparsest row,
        # preferring unit pivots.  Ties break on index for determinism.
        c = min(cols, key=lambda j: (len(cols[j]), j))
        r_id = min(cols[c], key=lambda i: (len(live[i]), abs(live[i][c]) != 1, i))
        prow = live.pop(r_id)
        pval = prow[c]
        for j in prow:
            hits = cols[j]
            hits.discard(r_id)
            if not hits:
                del cols[j]
        for i in list(cols.get(c, ())):
            row = live[i]
            f = row[c]
            new = {j: pval * v for j, v in row.items() if j not in prow}
            for j, pv in prow.items():
                nv = pval * row.get(j, 0) - f * pv
                if nv:
                    new[j] = nv
            g = 0
            for v in new.values():
                g = gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                new = {j: v // g for j, v in new.items()}
            for j in row:
                if j not in new:
                    hits = cols.get(j)
                    if hits is not None:
                        hits.discard(i)
                        if not hits:
                            del cols[j]
            for j in new:
                if j not in row:
                    cols.setdefault(j, set()).add(i)
            if new:
                live[i] = new
            else:
                del live[i]
        rank += 1
    return rank


def rank_exact(m: SparseMatrix) -> RankResult:
    """True rank over the rationals (deterministic, fraction-free elimination)."""
    if m.modulus is not None:
        raise ValueError("rank_exact requires rational scalars")
    return RankResult(_sparse_integer_rank(_integer_rows(m)), "exact_rational")


def _dense_mod(m: SparseMatrix, q: int) -> np.ndarray:
    """Reduce a rational matrix mod q; ValueError when a denominator vanishes."""
    a = np.zeros((m.n_rows, m.n_cols), dtype=np.int64)
    for (i, j), v in m._data.items():
        den = v.denominator % q
        a[i, j] = v.numerator % q * pow(den, -1, q) % q
    return a


def _modular_rank_dense(a: np.ndarray, q: int) -> int:
    if a.shape[0] > a.shape[1]:
        a = np.ascontiguousarray(a.T)
    n_rows, n_cols = a.shape
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p], c:] = a[[p, r], c:]
        inv = pow(int(a[r, c]), -1, q)
        a[r, c:] = a[r, c:] * inv % q
        below = np.flatnonzero(a[r + 1:, c])
        if below.size:
            idx = below + r + 1
            factors = a[idx, c][:, None]
            a[idx, c:] = (a[idx, c:] - factors * a[r, c:][None, :]) % q
        r += 1
    return r


def rank_modular(m: SparseMatrix, prime_count: int = 2, seed: int = 0) -> RankResult:
    """Max of the mod-q ranks over ``prime_count`` random primes.

    Reproducible from ``seed``; primes whose reduction hits a denominator
    are redrawn.  The result is a certified lower bound on the true rank.
    """
    if m.modulus is not None:
        raise ValueError("rank_modular reduces rational matrices itself")
    if prime_count < 1:
        raise ValueError("prime_count must be at least 1")
    rng = random.Random(seed)
    best = 0
    primes = []
    for _ in range(prime_count):
        while True:
            q = random_prime(rng)
            try:
                dense = _dense_mod(m, q)
            except ValueError:
                continue
            break
        primes.append(q)
        best = max(best, _modular_rank_dense(dense, q))
    return RankResult(best, "modular", tuple(primes), True)


def rank_auto(m: SparseMatrix, seed: int = 0, prime_count: int = 2) -> RankResult:
    """Default policy: exact up to EXACT_COLUMN_LIMIT columns, else modular."""
    if m.n_cols <= EXACT_COLUMN_LIMIT:
        return rank_exact(m)
    return rank_modular(m, prime_count, seed)


def block_rank_sum(
    blocks: Sequence[SparseMatrix],
    ranker: str = "exact",
    prime_count: int = 2,
    seed: int = 0,
) -> RankResult:
    """Sum of per-block ranks for a map whose image splits along the blocks.

    The caller asserts that the blocks restrict one linear map to a
    decomposition with independent images; under that assertion the sum is
    the rank of the assembled map.
    """
    if ranker not in ("exact", "modular"):
        raise ValueError(f"unknown ranker {ranker!r}")
    per_block = []
    primes: set[int] = set()
    for index, block in enumerate(blocks):
        if ranker == "exact":
            result = rank_exact(block)
        else:
            result = rank_modular(block, prime_count, seed + index)
            primes.update(result.primes_used)
        per_block.append(result.rank)
    if ranker == "modular" and primes:
        return RankResult(sum(per_block), "modular", tuple(sorted(primes)), True, tuple(per_block))
    return RankResult(sum(per_block), "exact_rational", (), False, tuple(per_block))
