"""Closed-form memory-load tradeoff points, curves, and bounds.

All corner values are exact rationals; decimals appear only at CSV
emission.  Each protocol variant contributes a family of corner points
indexed by the caching parameter t, and the achievable curve is the lower
convex envelope of those corners (time-sharing two placements achieves any
convex combination of their points).  The variants without security also
reach the zero-memory point (0, H*N/L) by shipping the whole coded
library.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

from .pda import Pda, comb0
from .scheme import Variant


class DomainError(ValueError):
    """Argument outside the formula's domain."""


@dataclass(frozen=True)
class TradeoffPoint:
    M: Fraction
    R: Fraction
    t: int | None
    variant: Variant
    subpacketization: int | None = None


@dataclass(frozen=True)
class PiecewiseLinearCurve:
    """Convex, non-increasing curve through its corner points."""

    variant: Variant
    corners: tuple

    @property
    def domain(self):
        return (self.corners[0].M, self.corners[-1].M)

    def value_at(self, M) -> Fraction:
        M = Fraction(M)
        lo, hi = self.domain
        if not lo <= M <= hi:
            raise DomainError(f"M={M} outside domain [{lo}, {hi}]")
        pts = self.corners
        for a, b in zip(pts, pts[1:]):
            if a.M <= M <= b.M:
                if M == a.M:
                    return a.R
                return a.R + (b.R - a.R) * (M - a.M) / (b.M - a.M)
        return pts[-1].R


def lower_convex_envelope(points) -> tuple:
    """Corner points of the lower convex hull, left to right.

    Points lying on a hull segment are kept, so labeled corners that are
    merely collinear still appear on the curve.
    """
    best = {}
    for p in points:
        cur = best.get(p.M)
        if cur is None or p.R < cur.R:
            best[p.M] = p
    pts = sorted(best.values(), key=lambda p: p.M)
    hull = []
    for p in pts:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (a.M - o.M) * (p.R - o.R) - (a.R - o.R) * (p.M - o.M)
            if cross < 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return tuple(hull)


def pda_point(pda: Pda, N: int, L: int, H: int,
              variant: Variant = Variant.LSP) -> TradeoffPoint:
    """The pair (1 + Z(N-1)/F, (H/L)(S/F)) achieved from a given PDA."""
    K, F, Z, S = pda.parameters()
    return TradeoffPoint(M=1 + Fraction(Z * (N - 1), F),
                         R=Fraction(H * S, L * F),
                         t=pda.t, variant=variant, subpacketization=L * F)


def man_corners(N: int, K: int, L: int, H: int) -> list:
    """Corners (1 + t(N-1)/K, H(K-t)/(L(t+1))) for t = 0..K."""
    return [TradeoffPoint(M=1 + Fraction(t * (N - 1), K),
                          R=Fraction(H * (K - t), L * (t + 1)),
                          t=t, variant=Variant.LSP,
                          subpacketization=L * comb0(K, t))
            for t in range(K + 1)]


def man_curve(N: int, K: int, L: int, H: int) -> PiecewiseLinearCurve:
    return PiecewiseLinearCurve(Variant.LSP,
                                lower_convex_envelope(man_corners(N, K, L, H)))


def _pruned_corner_load(N: int, K: int, L: int, H: int, t: int, r: int) -> Fraction:
    return Fraction(H * (comb0(K, t + 1) - comb0(K - r, t + 1)),
                    L * comb0(K, t))


def lp_corners(N: int, K: int, L: int, H: int) -> list:
    """Privacy-only linear retrieval: worst-case query rank min(K, N)."""
    pts = [TradeoffPoint(M=Fraction(0), R=Fraction(H * N, L), t=None,
                         variant=Variant.LP)]
    for t in range(K + 1):
        pts.append(TradeoffPoint(
            M=1 + Fraction(t * (N - 1), K),
            R=_pruned_corner_load(N, K, L, H, t, min(K, N)),
            t=t, variant=Variant.LP, subpacketization=L * comb0(K, t)))
    return pts


def fp_corners(N: int, K: int, L: int, H: int) -> list:
    """Privacy-only file retrieval: worst-case query rank min(K, N-1)."""
    pts = [TradeoffPoint(M=Fraction(0), R=Fraction(H * N, L), t=None,
                         variant=Variant.FP)]
    for t in range(K + 1):
        pts.append(TradeoffPoint(
            M=1 + Fraction(t * (N - 1), K),
            R=_pruned_corner_load(N, K, L, H, t, min(K, N - 1)),
            t=t, variant=Variant.FP, subpacketization=L * comb0(K, t)))
    return pts


def l_corners(N: int, K: int, L: int, H: int) -> list:
    """Correctness only: no keys, so M_t = tN/K."""
    return [TradeoffPoint(M=Fraction(t * N, K),
                          R=_pruned_corner_load(N, K, L, H, t, min(K, N)),
                          t=t, variant=Variant.L,
                          subpacketization=L * comb0(K, t))
            for t in range(K + 1)]


def lp_curve(N, K, L, H) -> PiecewiseLinearCurve:
    return PiecewiseLinearCurve(Variant.LP,
                                lower_convex_envelope(lp_corners(N, K, L, H)))


def fp_curve(N, K, L, H) -> PiecewiseLinearCurve:
    return PiecewiseLinearCurve(Variant.FP,
                                lower_convex_envelope(fp_corners(N, K, L, H)))


def l_curve(N, K, L, H) -> PiecewiseLinearCurve:
    return PiecewiseLinearCurve(Variant.L,
                                lower_convex_envelope(l_corners(N, K, L, H)))


def variant_curve(variant: Variant, N, K, L, H) -> PiecewiseLinearCurve:
    return {Variant.LSP: man_curve, Variant.LP: lp_curve,
            Variant.FP: fp_curve, Variant.L: l_curve}[variant](N, K, L, H)


def pda_lower_bound(M, N: int, K: int, L: int, H: int) -> Fraction:
    """Least load any PDA-based scheme can reach at memory M.

    R >= HK(N-M) / (L(N-1+K(M-1))), valid for 1 <= M <= N; the corner
    points of the MAN family meet it with equality.
    """
    M = Fraction(M)
    if M < 1 or M > N:
        raise DomainError(f"bound defined for 1 <= M <= N, got M={M}")
    return Fraction(H * K, L) * (N - M) / (N - 1 + K * (M - 1))


def envelope_regime(N: int, K: int) -> str:
    """Classify (N, K) by the zero-memory point's effect on the envelope.

    "a": N >= (K+1+sqrt(3K^2+1))/2 -- the zero-memory point changes
         nothing on [1, N];
    "b": K < N below that threshold -- it improves a left sliver;
    "c": N <= K -- pruning and the zero-memory point both matter.
    The comparison is done exactly on squared integers.
    """
    if N <= K:
        return "c"
    lhs = 2 * N - K - 1
    if lhs >= 0 and lhs * lhs >= 3 * K * K + 1:
        return "a"
    return "b"


FIG2_SETS = (("fig2a", (30, 10, 15, 20)),
             ("fig2b", (25, 20, 15, 20)),
             ("fig2c", (10, 30, 15, 20)))


def _fmt(x: Fraction) -> str:
    return f"{float(x):.12g}"


def curve_rows(curve: PiecewiseLinearCurve, samples: int = 256) -> list:
    """CSV rows: the corners plus an even sampling of the curve."""
    rows = []
    lo, hi = curve.domain
    sample_ms = {lo + (hi - lo) * Fraction(j, samples - 1)
                 for j in range(samples)} if samples > 1 else {lo}
    corner_ms = {p.M for p in curve.corners}
    for p in curve.corners:
        rows.append({"variant": curve.variant.value, "M": _fmt(p.M),
                     "R": _fmt(p.R), "t": "" if p.t is None else str(p.t),
                     "is_corner": "1"})
    for m in sorted(sample_ms - corner_ms):
        rows.append({"variant": curve.variant.value, "M": _fmt(m),
                     "R": _fmt(curve.value_at(m)), "t": "", "is_corner": "0"})
    rows.sort(key=lambda r: float(r["M"]))
    return rows


def write_curve_csv(path, curve: PiecewiseLinearCurve, samples: int = 256):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["variant", "M", "R", "t", "is_corner"])
        writer.writeheader()
        for row in curve_rows(curve, samples):
            writer.writerow(row)
    return path
