import csv
import random
from fractions import Fraction

import pytest

from rsplfr import tradeoff
from rsplfr.gf import field_new
from rsplfr.mds import vandermonde_code
from rsplfr.pda import man_pda
from rsplfr.scheme import SchemeConfig, Variant, measured_tradeoff, run_scheme
from rsplfr.tradeoff import (DomainError, envelope_regime, fp_curve, l_curve,
                             lower_convex_envelope, lp_corners, lp_curve,
                             man_corners, man_curve, pda_lower_bound,
                             pda_point)


def test_pda_point_toy():
    p = pda_point(man_pda(3, 1), N=4, L=2, H=3)
    assert (p.M, p.R) == (2, Fraction(3, 2))
    assert p.subpacketization == 6


def test_pda_point_spot_value():
    p = pda_point(man_pda(10, 2), N=30, L=15, H=20)
    assert p.M == 1 + Fraction(2 * 29, 10) == Fraction(34, 5)
    assert p.R == Fraction(32, 9)


def test_pda_point_full_cache():
    p = pda_point(man_pda(6, 6), N=9, L=2, H=3)
    assert (p.M, p.R) == (9, 0)


def test_man_curve_corners():
    curve = man_curve(4, 3, 2, 3)
    by_t = {p.t: p for p in curve.corners}
    assert (by_t[1].M, by_t[1].R) == (2, Fraction(3, 2))
    assert (by_t[3].M, by_t[3].R) == (4, 0)
    curve = man_curve(30, 10, 15, 20)
    by_t = {p.t: p for p in curve.corners}
    assert (by_t[0].M, by_t[0].R) == (1, Fraction(40, 3))


def test_lp_spot_value():
    pts = {p.t: p for p in lp_corners(10, 30, 15, 20)}
    assert pts[1].M == Fraction(13, 10)
    assert pts[1].R == Fraction(98, 9)
    assert pts[None].M == 0 and pts[None].R == Fraction(20 * 10, 15)


def test_fp_vs_lp_binomial_monotonicity():
    for (N, K) in [(3, 5), (10, 30), (5, 5), (30, 10)]:
        lp = {p.t: p.R for p in lp_corners(N, K, 2, 3) if p.t is not None}
        fp = {p.t: p.R
              for p in tradeoff.fp_corners(N, K, 2, 3) if p.t is not None}
        same_rank = min(K, N - 1) == min(K, N)
        for t in range(K + 1):
            assert fp[t] <= lp[t]
            if same_rank:
                assert fp[t] == lp[t]


def test_l_curve_zero_memory_point():
    # at t=0 the denominator is L*C(K,0) = L, so R = H*min(K,N)/L;
    # with H=L=1 and N >= K this is the classic zero-memory point (0, K)
    for (N, K, L, H) in [(3, 5, 2, 3), (10, 30, 15, 20), (30, 10, 15, 20)]:
        pts = {p.t: p for p in tradeoff.l_corners(N, K, L, H)}
        assert pts[0].M == 0
        assert pts[0].R == Fraction(H * min(K, N), L)
    single = {p.t: p for p in tradeoff.l_corners(10, 6, 1, 1)}
    assert single[0].R == 6


def test_pda_lower_bound_values():
    assert pda_lower_bound(2, 4, 3, 2, 3) == Fraction(3, 2)
    assert pda_lower_bound(4, 4, 3, 2, 3) == 0
    with pytest.raises(DomainError):
        pda_lower_bound(Fraction(1, 2), 4, 3, 2, 3)
    with pytest.raises(DomainError):
        pda_lower_bound(5, 4, 3, 2, 3)


def test_man_corners_meet_bound_with_equality():
    for K in range(1, 11):
        for (N, L, H) in [(4, 2, 3), (30, 15, 20), (10, 15, 20)]:
            for p in man_corners(N, K, L, H):
                assert pda_lower_bound(p.M, N, K, L, H) == p.R


def test_envelope_regimes():
    assert envelope_regime(30, 10) == "a"
    assert envelope_regime(25, 20) == "b"
    assert envelope_regime(10, 30) == "c"


def test_envelope_drops_dominated_points():
    pts = [
        tradeoff.TradeoffPoint(Fraction(0), Fraction(10), None, Variant.LP),
        tradeoff.TradeoffPoint(Fraction(1), Fraction(9), 0, Variant.LP),
        tradeoff.TradeoffPoint(Fraction(2), Fraction(1), 1, Variant.LP),
        tradeoff.TradeoffPoint(Fraction(3), Fraction(0), 2, Variant.LP),
    ]
    hull = lower_convex_envelope(pts)
    assert [p.t for p in hull] == [None, 1, 2]  # (1, 9) lies above the chord


def test_envelope_keeps_collinear_corners():
    pts = [
        tradeoff.TradeoffPoint(Fraction(0), Fraction(4), 0, Variant.L),
        tradeoff.TradeoffPoint(Fraction(1), Fraction(3), 1, Variant.L),
        tradeoff.TradeoffPoint(Fraction(2), Fraction(2), 2, Variant.L),
    ]
    assert len(lower_convex_envelope(pts)) == 3


def test_envelope_convexity_and_monotonicity():
    for (N, K, L, H) in [(30, 10, 15, 20), (25, 20, 15, 20), (10, 30, 15, 20)]:
        for make in (man_curve, lp_curve, fp_curve, l_curve):
            corners = make(N, K, L, H).corners
            for a, b in zip(corners, corners[1:]):
                assert a.M < b.M
                assert a.R >= b.R
            slopes = [(b.R - a.R) / (b.M - a.M)
                      for a, b in zip(corners, corners[1:])]
            for s1, s2 in zip(slopes, slopes[1:]):
                assert s2 >= s1


def test_curve_dominance_order():
    rng = random.Random(5)
    for (N, K, L, H) in [(30, 10, 15, 20), (25, 20, 15, 20), (10, 30, 15, 20)]:
        curves = [l_curve(N, K, L, H), fp_curve(N, K, L, H),
                  lp_curve(N, K, L, H), man_curve(N, K, L, H)]
        for _ in range(200):
            M = 1 + Fraction(rng.randrange(0, 10 ** 6), 10 ** 6) * (N - 1)
            values = [c.value_at(M) for c in curves]
            assert values[0] <= values[1] <= values[2] <= values[3]


def test_scaling_law_h_over_l():
    # every curve is the single-server curve scaled by H/L
    for make in (man_curve, lp_curve, fp_curve, l_curve):
        multi = make(10, 6, 3, 5)
        single = make(10, 6, 1, 1)
        assert len(multi.corners) == len(single.corners)
        for pm, ps in zip(multi.corners, single.corners):
            assert pm.M == ps.M
            assert pm.R == Fraction(5, 3) * ps.R


def test_curve_measurement_agreement():
    f = field_new(5)
    N, K, L, H = 3, 4, 2, 4
    curve_points = {p.t: p for p in man_corners(N, K, L, H)}
    for t in range(K + 1):
        cfg = SchemeConfig(N=N, K=K, L=L, H=H, field=f, pda=man_pda(K, t),
                           code=vandermonde_code(L, H, f), variant="LSP")
        run = run_scheme(cfg, [(1, 0, 0)] * K, decode=False)
        mt = measured_tradeoff(run)
        assert mt.R_payload_only == curve_points[t].R
        assert mt.M_payload_only == curve_points[t].M


def test_value_at_domain_errors():
    curve = man_curve(4, 3, 2, 3)
    with pytest.raises(DomainError):
        curve.value_at(Fraction(1, 2))
    with pytest.raises(DomainError):
        curve.value_at(5)
    assert curve.value_at(2) == Fraction(3, 2)
    assert curve.value_at(Fraction(5, 2)) == (Fraction(3, 2) + Fraction(1, 2)) / 2


def test_csv_emission(tmp_path):
    curve = lp_curve(10, 30, 15, 20)
    path = tmp_path / "lp.csv"
    tradeoff.write_curve_csv(str(path), curve, samples=32)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0].keys() == {"variant", "M", "R", "t", "is_corner"}
    corners = [r for r in rows if r["is_corner"] == "1"]
    assert len(corners) == len(curve.corners)
    assert all(r["variant"] == "LP" for r in rows)
    ms = [float(r["M"]) for r in rows]
    assert ms == sorted(ms)
