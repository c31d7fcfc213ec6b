"""Placement delivery arrays.

A PDA is an F x K array whose entries are either the star sentinel or an
ordinary symbol in [1, S].  Stars mark packets a user caches; a repeated
ordinary symbol marks packets that share one multicast signal.  Validity
demands equal star counts per column and, for every repeated symbol, the
star-crossed 2x2 pattern (distinct rows/columns with stars at the swapped
positions).

The classic uncoded-prefetching construction is provided by
:func:`man_pda`: rows are the t-subsets of users in lexicographic order,
ordinary symbols are lexicographic ranks of (t+1)-subsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb


class PdaError(Exception):
    pass


class UnequalStarCounts(PdaError):
    pass


class SymbolGap(PdaError):
    """Some ordinary symbol in [1, S] never occurs."""


class ConditionA(PdaError):
    """Repeated symbol in the same row or column.

    Carries the two offending 1-based coordinates.
    """

    def __init__(self, first, second):
        self.first, self.second = first, second
        super().__init__(f"symbol repeated at {first} and {second} "
                         f"in the same row or column")


class ConditionB(PdaError):
    """Repeated symbol whose 2x2 sub-array is missing a star."""

    def __init__(self, first, second):
        self.first, self.second = first, second
        super().__init__(f"entries {first} and {second} lack the star-crossed "
                         f"2x2 pattern")


class _Star:
    __slots__ = ()

    def __repr__(self):
        return "*"


STAR = _Star()


def comb0(n: int, k: int) -> int:
    """Binomial coefficient that is 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class Pda:
    """A validated (K, F, Z, S) placement delivery array.

    entries[i][j] is STAR or an int in [1, S]; i, j are 0-based here while
    all reported coordinates and user/row/symbol identifiers in the public
    protocol are 1-based.  MAN-built arrays also carry `row_subsets`
    (t-subset per row) and `symbol_subsets` (s -> (t+1)-subset).
    """

    K: int
    F: int
    Z: int
    S: int
    entries: tuple
    row_subsets: tuple | None = None
    symbol_subsets: dict | None = field(default=None, hash=False, compare=False)

    def entry(self, i: int, j: int):
        """Entry at 1-based (row i, column j)."""
        return self.entries[i - 1][j - 1]

    @property
    def t(self):
        """Subset size t for MAN arrays, None otherwise."""
        if self.row_subsets is None:
            return None
        return len(self.row_subsets[0]) if self.row_subsets else 0

    def parameters(self):
        return (self.K, self.F, self.Z, self.S)

    def star_rows(self, j: int):
        """1-based rows where column j holds a star."""
        return [i + 1 for i in range(self.F) if self.entries[i][j - 1] is STAR]

    def occurrences(self, s: int):
        """All 1-based (i, j) positions of ordinary symbol s."""
        return [(i + 1, j + 1) for i in range(self.F) for j in range(self.K)
                if self.entries[i][j] is not STAR and self.entries[i][j] == s]


def validate(array) -> Pda:
    """Check the defining conditions and wrap the array as a Pda.

    `array` is a sequence of rows, each row containing STAR or positive
    integers.  Raises UnequalStarCounts, SymbolGap, ConditionA or
    ConditionB (with 1-based coordinates) on violation.
    """
    rows = tuple(tuple(row) for row in array)
    if not rows or not rows[0]:
        raise PdaError("array must be non-empty")
    F = len(rows)
    K = len(rows[0])
    if any(len(r) != K for r in rows):
        raise PdaError("rows must have equal length")
    for i, row in enumerate(rows):
        for j, a in enumerate(row):
            if a is STAR:
                continue
            if not isinstance(a, int) or isinstance(a, bool) or a < 1:
                raise PdaError(f"entry ({i + 1},{j + 1}) must be STAR or a "
                               f"positive integer, got {a!r}")

    # Pair conditions first: a violating entry pair is the most useful
    # report, and the star-count/symbol checks below presume sane pairs.
    positions = {}
    for i in range(F):
        for j in range(K):
            a = rows[i][j]
            if a is STAR:
                continue
            for (i2, j2) in positions.get(a, ()):
                if i == i2 or j == j2:
                    raise ConditionA((i2 + 1, j2 + 1), (i + 1, j + 1))
                if rows[i][j2] is not STAR or rows[i2][j] is not STAR:
                    raise ConditionB((i2 + 1, j2 + 1), (i + 1, j + 1))
            positions.setdefault(a, []).append((i, j))

    star_counts = [sum(1 for i in range(F) if rows[i][j] is STAR) for j in range(K)]
    Z = star_counts[0]
    if any(c != Z for c in star_counts):
        raise UnequalStarCounts(f"columns carry star counts {star_counts}")

    S = max(positions) if positions else 0
    missing = [s for s in range(1, S + 1) if s not in positions]
    if missing:
        raise SymbolGap(f"symbols {missing} never occur (S={S})")

    return Pda(K=K, F=F, Z=Z, S=S, entries=rows)


def parameters(pda: Pda):
    """The (K, F, Z, S) tuple."""
    return pda.parameters()


def man_pda(K: int, t: int) -> Pda:
    """The (K, C(K,t), C(K-1,t-1), C(K,t+1)) array of Maddah-Ali--Niesen type.

    Rows are indexed by the t-subsets of [K] in lexicographic order; the
    entry in row T, column j is a star when j is in T and otherwise the
    lexicographic rank of T union {j} among (t+1)-subsets.
    """
    if not 0 <= t <= K:
        raise PdaError(f"need 0 <= t <= K, got t={t}, K={K}")
    row_subsets = list(combinations(range(1, K + 1), t))
    rank = {J: r + 1 for r, J in enumerate(combinations(range(1, K + 1), t + 1))}
    entries = []
    for T in row_subsets:
        members = set(T)
        row = []
        for j in range(1, K + 1):
            if j in members:
                row.append(STAR)
            else:
                row.append(rank[tuple(sorted(members | {j}))])
        entries.append(tuple(row))
    pda = validate(entries)
    symbol_subsets = {r: J for J, r in rank.items()}
    expected = (K, comb0(K, t), comb0(K - 1, t - 1), comb0(K, t + 1))
    assert pda.parameters() == expected, (pda.parameters(), expected)
    return Pda(K=pda.K, F=pda.F, Z=pda.Z, S=pda.S, entries=pda.entries,
               row_subsets=tuple(row_subsets), symbol_subsets=symbol_subsets)


def format_pda(pda: Pda) -> str:
    """Text form: one row per line, `*` for stars, space-separated."""
    return "\n".join(" ".join("*" if a is STAR else str(a) for a in row)
                     for row in pda.entries) + "\n"


def parse_pda(text: str) -> Pda:
    """Parse and validate the text form produced by format_pda."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        row = []
        for tok in line.split():
            if tok == "*":
                row.append(STAR)
            else:
                try:
                    row.append(int(tok))
                except ValueError:
                    raise PdaError(f"bad token {tok!r}") from None
        rows.append(row)
    return validate(rows)
