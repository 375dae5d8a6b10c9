import math

import mpmath
import pytest

from sturmlab.paramgeo import (
    CandidateBuilder, LinExpr, TooLarge, compare, csv_rows, duality_check,
    minima_bruteforce, minima_candidates, predicted_system, svg_plot,
    traj_eval, validate_3system,
)


@pytest.fixture(scope="module")
def P_bl(bl12):
    return predicted_system(bl12, (3, 10))


@pytest.fixture(scope="module")
def cb_bl(bl12):
    return CandidateBuilder(bl12, prec=256)


@pytest.fixture(scope="module")
def cb_roy(roy212):
    return CandidateBuilder(roy212, prec=256)


# --- symbolic layer ----------------------------------------------------------

def test_linexpr_algebra():
    x = LinExpr.anchor(0, 2) + LinExpr.anchor(1, 3)
    y = x.mul_delta_poly({0: 1, 1: -1})      # (1 - delta) x
    assert y.eval(1, 1, 0) == 5
    assert y.eval(1, 1, 1) == 0
    from fractions import Fraction
    assert x.scale(Fraction(1, 2)).eval(2, 4, 0) == 8
    assert (x - x) == LinExpr()


def test_sum_rule_symbolic(P_bl):
    for k in range(P_bl.k_lo, P_bl.k_hi - 1):
        assert P_bl.sum_rule_exact(k)


def test_key_values_symbolic(P_bl):
    for i in P_bl.window_index_range():
        assert P_bl.key_values_exact(i)


def test_delta_resolution(P_bl, roy212):
    assert P_bl.delta == 0
    assert "unimodular" in P_bl.delta_source
    assert not P_bl.invalid_delta
    R = predicted_system(roy212, (3, 7))
    assert "bracket midpoint" in R.delta_source
    assert R.invalid_delta           # midpoint ~0.39 >= sigma/(1+sigma) ~0.382


def test_hat_rescaling_tracks_log_norms(P_bl, bl12):
    with mpmath.workprec(256):
        rho = P_bl.hat_scale
        for k in range(P_bl.k_lo, P_bl.k_hi + 1):
            hat = P_bl.hatw.log(k) / rho
            assert abs(hat - bl12.seq.log_norm(k, 256)) < 0.5


# --- windows and the map P ---------------------------------------------------

def test_windows_tile_the_span(P_bl):
    ws = P_bl.pieces()
    lo, hi = P_bl.span
    assert abs(float(ws[0].q_lo - lo)) < 1e-20
    assert abs(float(ws[-1].q_hi - hi)) < 1e-20
    for a, b in zip(ws, ws[1:]):
        assert abs(float(a.q_hi - b.q_lo)) < 1e-20
        assert a.q_lo < a.q_hi


def test_P_sums_to_q_and_is_sorted(P_bl):
    lo, hi = (float(x) for x in P_bl.span)
    for t in range(12):
        q = lo + (hi - lo) * (t + 0.3) / 12
        p = P_bl.P(q)
        assert p[0] <= p[1] <= p[2]
        assert abs(float(p[0] + p[1] + p[2]) - q) < 1e-9
        assert p[0] >= -1e-9
    with pytest.raises(ValueError):
        P_bl.P(hi + 100)


def test_breakpoint_kinds(P_bl):
    bp = P_bl.breakpoints()
    for kind in ("q_t", "c_t", "c_end", "d", "a_t", "b_t", "q_t1"):
        assert bp[kind], kind
    lo, hi = (float(x) for x in P_bl.span)
    for kind, pts in bp.items():
        for k, q in pts:
            assert lo - 1e-9 <= float(q) <= hi + 1e-9, (kind, k, float(q))


def test_I_intervals_inside_windows(P_bl):
    # delta = 0: I_i = [a_i, b_i] has positive width (1 - 2 delta) log Y_i
    ivs = P_bl.I_intervals()
    assert ivs
    for i, a, b in ivs:
        assert b > a
    # gray intervals degenerate to points at delta = 0
    for _, b, a in P_bl.gray_intervals():
        assert abs(float(a - b)) < 1e-20


def test_gray_positive_width_for_roy(roy212):
    R = predicted_system(roy212, (3, 7), delta=mpmath.mpf("0.3"))
    widths = [float(a - b) for _, b, a in R.gray_intervals()]
    assert widths and min(widths) > 0


# --- validity ----------------------------------------------------------------

def test_bl_system_is_valid(P_bl):
    rep = validate_3system(P_bl, tol=1e-9)
    assert rep.def_conditions_ok, rep.failures[:3]
    assert rep.shape_ok, rep.shape_failures[:3]
    assert rep.valid


def test_forced_half_delta_is_invalid(bl12):
    # delta = 1/2 collapses the I_i intervals; the ordering/sum/slope conditions still pass
    # numerically, so the verdict has to come from the shape checks
    P = predicted_system(bl12, (3, 10), delta=mpmath.mpf("0.5"))
    rep = validate_3system(P, tol=1e-9)
    assert not rep.valid
    assert not rep.shape_ok
    kinds = {f[0] for f in rep.shape_failures}
    assert kinds & {"boundary_mid_below", "gap_negative", "I_empty"}


def test_fake_system_rejected(P_bl):
    class Fake:
        def pieces(self, q_span=None):
            ws = P_bl.pieces(q_span)
            out = []
            for w in ws:
                class F:
                    def __init__(self, q):  # constant third of q: slope 1/3
                        self.q = q

                    def value(self, q):
                        return q / 3

                    def slope(self, q):
                        return 0.3333333333333333

                    def kinks_in(self, a, b):
                        return []
                out.append(type(w)(q_lo=w.q_lo, q_hi=w.q_hi,
                                   funcs=[F(0), F(1), F(2)], meta=w.meta))
            return out
    rep = validate_3system(Fake(), q_span=tuple(float(x) for x in P_bl.span),
                           tol=1e-9)
    assert not rep.valid
    assert not rep.slope_ok


# --- minima ------------------------------------------------------------------

def test_traj_eval_monotone(cb_bl):
    u = cb_bl.u(256)
    from sturmlab.exactlin import SymVec
    x = SymVec(1, 0, 0)
    with mpmath.workprec(256):
        L0, Ls0 = traj_eval(x, u, mpmath.mpf(1))
        L1, Ls1 = traj_eval(x, u, mpmath.mpf(5))
        assert L1 >= L0            # L is non-decreasing in q
        assert Ls1 <= Ls0 + 1e-30  # L* non-increasing for this point


def test_candidates_match_bruteforce_bl(cb_bl):
    for q in (2.0, 5.0, 8.0):
        cand = minima_candidates(cb_bl, mpmath.mpf(q))
        brute = minima_bruteforce(cb_bl, mpmath.mpf(q))
        for j in range(3):
            assert abs(float(cand.L[j] - brute.L[j])) < 1e-9, (q, j)
        assert brute.method == "bruteforce"


def test_candidates_match_bruteforce_roy(cb_roy):
    for q in (3.0, 7.0):
        cand = minima_candidates(cb_roy, mpmath.mpf(q))
        brute = minima_bruteforce(cb_roy, mpmath.mpf(q))
        for j in range(3):
            assert abs(float(cand.L[j] - brute.L[j])) < 1e-9, (q, j)


def test_minima_are_ordered_and_independent(cb_bl):
    s = minima_candidates(cb_bl, mpmath.mpf(6))
    assert float(s.L[0]) <= float(s.L[1]) <= float(s.L[2])
    assert len(s.points) == 3
    from sturmlab.exactlin import det3
    assert det3(*s.points) != 0


def test_bruteforce_radius_guard(cb_bl):
    with pytest.raises(TooLarge):
        minima_bruteforce(cb_bl, mpmath.mpf(40), R_max=100)


def test_duality(cb_bl):
    rep = duality_check(cb_bl, [2.0, 4.0, 6.0, 8.0])
    for j in (1, 2, 3):
        assert math.isfinite(rep.per_j[j])
        assert rep.per_j[j] < 5.0
    assert rep.non_growing


def test_compare_and_export(P_bl, cb_bl):
    samples = [minima_candidates(cb_bl, mpmath.mpf(q), P=P_bl)
               for q in (6.0, 9.0, 12.0, 15.0)]
    rep = compare(P_bl, samples)
    assert rep.rows and len(rep.rows[0]) == 8
    rows = csv_rows(P_bl, samples)
    assert rows[0].startswith("q,")
    assert len(rows) == 1 + len(samples)
    svg = svg_plot(P_bl, samples, config_note="test run")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "test run" in svg
