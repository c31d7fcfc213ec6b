"""Dense linear algebra over a FieldSpec.

Matrices are sequences of rows, rows are sequences of canonical integer
values.  Everything here is exact and deterministic: Gaussian elimination
always picks the leftmost available pivot and, among rows, the earliest
one.
"""

from __future__ import annotations

from .gf import FieldSpec


class SingularMatrix(ValueError):
    """Square matrix has no inverse."""


def vec_add(field: FieldSpec, x, y):
    add = field.add
    return tuple(add(a, b) for a, b in zip(x, y))


def vec_sub(field: FieldSpec, x, y):
    sub = field.sub
    return tuple(sub(a, b) for a, b in zip(x, y))


def vec_scale(field: FieldSpec, c: int, x):
    if c == 0:
        return (0,) * len(x)
    if c == 1:
        return tuple(x)
    mul = field.mul
    return tuple(mul(c, a) for a in x)


def vec_lincomb(field: FieldSpec, coeffs, vectors, length=None):
    """Sum of coeffs[i] * vectors[i]; zero vector of `length` if all zero."""
    if length is None:
        length = len(vectors[0]) if vectors else 0
    add, mul = field.add, field.mul
    if length == 1:
        # packets are single symbols at the default subpacketization;
        # skip the tuple machinery on this hot path
        s = 0
        for c, v in zip(coeffs, vectors):
            if c:
                s = add(s, v[0] if c == 1 else mul(c, v[0]))
        return (s,)
    acc = None
    for c, v in zip(coeffs, vectors):
        if c == 0:
            continue
        term = v if c == 1 else tuple(mul(c, a) for a in v)
        acc = term if acc is None else tuple(add(x, y) for x, y in zip(acc, term))
    if acc is None:
        return (0,) * length
    return acc


def mat_mul(field: FieldSpec, A, B):
    add, mul = field.add, field.mul
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        Ai = A[i]
        for j in range(p):
            s = 0
            for k in range(m):
                s = add(s, mul(Ai[k], B[k][j]))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_inv(field: FieldSpec, A):
    """Invert a square matrix by Gauss-Jordan with leftmost pivots.

    Raises SingularMatrix if no inverse exists.
    """
    n = len(A)
    aug = [list(A[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    sub, mul, inv = field.sub, field.mul, field.inv
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col + 1}")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = inv(aug[col][col])
        if pv != 1:
            aug[col] = [mul(pv, a) for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                c = aug[r][col]
                prow = aug[col]
                aug[r] = [sub(a, mul(c, p)) for a, p in zip(aug[r], prow)]
    return tuple(tuple(row[n:]) for row in aug)


def independent_rows(field: FieldSpec, rows) -> list[int]:
    """Indices of a maximal independent subset, scanning rows in order.

    Keeps each row that is not in the span of the rows already kept, so
    ties always resolve to the smallest index.  Returned indices are
    0-based positions into `rows`.
    """
    basis = []  # reduced rows, each with its pivot column
    kept = []
    sub, mul, inv = field.sub, field.mul, field.inv
    for idx, row in enumerate(rows):
        work = list(row)
        for pc, brow in basis:
            if work[pc] != 0:
                c = work[pc]
                work = [sub(a, mul(c, b)) for a, b in zip(work, brow)]
        pc = next((j for j, a in enumerate(work) if a != 0), None)
        if pc is None:
            continue
        piv = inv(work[pc])
        if piv != 1:
            work = [mul(piv, a) for a in work]
        basis.append((pc, work))
        basis.sort(key=lambda t: t[0])
        kept.append(idx)
    return kept


def rank(field: FieldSpec, rows) -> int:
    return len(independent_rows(field, rows))


class SpanSolver:
    """Incremental echelon basis that can express new vectors in it.

    Feed rows with :meth:`add`; afterwards :meth:`express` returns, for a
    target vector, coefficients over the added rows whose combination
    equals the target, or None when the target lies outside the span.
    """

    def __init__(self, field: FieldSpec, length: int):
        self.field = field
        self.length = length
        self.n_rows = 0
        self._rows = []  # (pivot_col, vector, tag) with tag over added rows

    def add(self, vector):
        field = self.field
        sub, mul, inv = field.sub, field.mul, field.inv
        work = list(vector)
        tag = [0] * self.n_rows + [1]
        self.n_rows += 1
        for pc, vec, vtag in self._rows:
            if work[pc] != 0:
                c = work[pc]
                work = [sub(a, mul(c, b)) for a, b in zip(work, vec)]
                for i, b in enumerate(vtag):
                    tag[i] = sub(tag[i], mul(c, b))
        pc = next((j for j, a in enumerate(work) if a != 0), None)
        if pc is not None:
            piv = inv(work[pc])
            if piv != 1:
                work = [mul(piv, a) for a in work]
                tag = [mul(piv, a) for a in tag]
            self._rows.append((pc, work, tag))
            self._rows.sort(key=lambda t: t[0])

    def express(self, target):
        """Coefficients x with sum_i x[i] * row_i == target, else None."""
        field = self.field
        sub, mul = field.sub, field.mul
        work = list(target)
        coeff = [0] * self.n_rows
        for pc, vec, vtag in self._rows:
            if work[pc] != 0:
                c = work[pc]
                work = [sub(a, mul(c, b)) for a, b in zip(work, vec)]
                for i, b in enumerate(vtag):
                    if b != 0:
                        coeff[i] = field.add(coeff[i], mul(c, b))
        if any(a != 0 for a in work):
            return None
        return coeff
