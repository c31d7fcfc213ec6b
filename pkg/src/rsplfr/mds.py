"""(H, L) MDS codes over a FieldSpec.

An MdsCode encodes L information symbols into H coded symbols through a
generator matrix G whose every L x L column submatrix is invertible, so
any L of the H coded symbols recover the information.  Validation is
exhaustive over all column subsets; decoding inverts the selected
submatrix by Gaussian elimination with leftmost pivots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .gf import FieldSpec, field_new
from . import linalg


class MdsError(Exception):
    pass


class FieldTooSmall(MdsError):
    """Not enough distinct evaluation points for a Vandermonde code."""


class NotMds(MdsError):
    """Some L x L column submatrix is singular.

    Carries `columns`, one offending 1-based column subset.
    """

    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(f"singular column subset {self.columns}")


class LengthMismatch(MdsError):
    pass


class SingularSubmatrix(MdsError):
    """Decode hit a singular submatrix; impossible for validated codes."""


@dataclass(frozen=True)
class MdsCode:
    """Validated (H, L) MDS code; G is an L x H tuple-of-tuples."""

    field: FieldSpec
    L: int
    H: int
    G: tuple

    def column_submatrix(self, columns):
        """L x L submatrix picked by 1-based column indices."""
        return tuple(tuple(row[h - 1] for h in columns) for row in self.G)


def is_mds(G, field: FieldSpec):
    """Check the all-minors-invertible property.

    Returns (True, None) or (False, columns) with a 1-based singular
    column subset as witness.
    """
    L = len(G)
    H = len(G[0])
    for cols in combinations(range(1, H + 1), L):
        sub = tuple(tuple(row[h - 1] for h in cols) for row in G)
        try:
            linalg.mat_inv(field, sub)
        except linalg.SingularMatrix:
            return False, cols
    return True, None


def custom_code(G, field: FieldSpec, skip_validation: bool = False) -> MdsCode:
    """Wrap an explicit generator matrix, validating the MDS property."""
    G = tuple(tuple(int(v) for v in row) for row in G)
    L = len(G)
    if L == 0 or any(len(row) != len(G[0]) for row in G):
        raise LengthMismatch("generator matrix must be rectangular and non-empty")
    H = len(G[0])
    if L > H:
        raise LengthMismatch(f"L={L} exceeds H={H}")
    for row in G:
        for v in row:
            if not 0 <= v < field.q:
                raise ValueError(f"entry {v} outside {field!r}")
    if not skip_validation:
        ok, witness = is_mds(G, field)
        if not ok:
            raise NotMds(witness)
    return MdsCode(field=field, L=L, H=H, G=G)


def vandermonde_code(L: int, H: int, field: FieldSpec) -> MdsCode:
    """G[l][h] = alpha_h^(l-1) over the first H field elements.

    Requires q >= H distinct evaluation points.
    """
    if field.q < H:
        raise FieldTooSmall(f"q={field.q} < H={H}: not enough evaluation points")
    if L > H:
        raise LengthMismatch(f"L={L} exceeds H={H}")
    G = tuple(tuple(field.pow(alpha, l) for alpha in range(H))
              for l in range(L))
    return custom_code(G, field, skip_validation=True)


def encode(code: MdsCode, info):
    """Coded symbols: output[h] = sum_l G[l][h] * info[l]."""
    if len(info) != code.L:
        raise LengthMismatch(f"expected {code.L} information symbols, got {len(info)}")
    add, mul = code.field.add, code.field.mul
    out = []
    for h in range(code.H):
        s = 0
        for l in range(code.L):
            s = add(s, mul(code.G[l][h], info[l]))
        out.append(s)
    return tuple(out)


def _decode_matrix(code: MdsCode, columns):
    columns = tuple(columns)
    if len(columns) != code.L or len(set(columns)) != code.L:
        raise LengthMismatch(f"need {code.L} distinct columns, got {columns}")
    for h in columns:
        if not 1 <= h <= code.H:
            raise LengthMismatch(f"column {h} outside [1, {code.H}]")
    try:
        return linalg.mat_inv(code.field, code.column_submatrix(columns))
    except linalg.SingularMatrix as exc:
        raise SingularSubmatrix(f"columns {columns}: {exc}") from exc


def decode(code: MdsCode, columns, values):
    """Recover the L information symbols from L coded symbols.

    `columns` are the 1-based coded positions the `values` came from.
    """
    inv = _decode_matrix(code, columns)
    if len(values) != code.L:
        raise LengthMismatch(f"expected {code.L} values, got {len(values)}")
    add, mul = code.field.add, code.field.mul
    out = []
    for l in range(code.L):
        s = 0
        for j in range(code.L):
            s = add(s, mul(values[j], inv[j][l]))
        out.append(s)
    return tuple(out)


def encode_blocks(code: MdsCode, blocks):
    """Encode L equal-length symbol blocks position-wise into H blocks."""
    if len(blocks) != code.L:
        raise LengthMismatch(f"expected {code.L} blocks, got {len(blocks)}")
    columns = tuple(zip(*code.G))
    return tuple(
        linalg.vec_lincomb(code.field, columns[h], blocks, length=len(blocks[0]))
        for h in range(code.H))


def decode_blocks(code: MdsCode, columns, blocks):
    """Invert encode_blocks from any L coded blocks (1-based columns)."""
    inv = _decode_matrix(code, columns)
    if len(blocks) != code.L:
        raise LengthMismatch(f"expected {code.L} blocks, got {len(blocks)}")
    return tuple(
        linalg.vec_lincomb(code.field,
                           [inv[j][l] for j in range(code.L)],
                           blocks, length=len(blocks[0]))
        for l in range(code.L))


def to_json(code: MdsCode) -> str:
    return json.dumps({"q": code.field.q, "L": code.L, "H": code.H,
                       "G": [list(row) for row in code.G]}, sort_keys=True)


def from_json(text: str) -> MdsCode:
    d = json.loads(text)
    field = field_new(d["q"])
    code = custom_code(d["G"], field)
    if code.L != d["L"] or code.H != d["H"]:
        raise LengthMismatch("declared (L, H) disagree with the matrix shape")
    return code
