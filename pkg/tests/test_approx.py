from fractions import Fraction

import pytest

from sturmlab.approx import (
    BadIndex, FibonacciOnly, contents_report, gray_fan, make_bundle,
    verify_identities, z_dot_y_identity,
)
from sturmlab.exactlin import det3
from sturmlab.matseq import bl_family, roy_family
from sturmlab.sturm import SturmianProgram

EXPECTED_CHECKS = {
    "step", "square_step", "psi_step", "block_power", "commutation",
    "trace_recurrence", "trace_congruence", "y_recurrence_boundary",
    "y_recurrence_block", "y_wedge_power", "z_recurrence_boundary",
    "z_wedge", "det3_triple", "ladder_coprime", "ladder_primitive",
    "y_content_divides_detN", "coprimality_hypothesis",
}


def test_identity_suite_roy(roy212):
    rep = verify_identities(roy212, roy212.prog.t(10))
    assert rep.ok, rep.failures[:3]
    assert EXPECTED_CHECKS <= set(rep.checks)
    assert all(n > 0 for n in rep.checks.values())
    assert "ok" in rep.summary()


def test_identity_suite_all_seeds(roy313, bl12, roy212_p2):
    for bundle in (roy313, bl12, roy212_p2):
        i_max = bundle.prog.t(9)
        rep = verify_identities(bundle, i_max)
        assert rep.ok, (bundle.seed.family, rep.failures[:3])


def test_y_boundary_values(bl12):
    seed = bl12.seed
    assert bl12.ys.mat(-2) == seed.w0 @ seed.N.transpose()
    assert bl12.ys.mat(-1) == seed.w1 @ seed.N
    with pytest.raises(BadIndex):
        bl12.ys.mat(-3)


def test_y_symmetric_and_content(roy212):
    dN = abs(roy212.seed.det_N)
    for i in range(-2, 20):
        m = roy212.ys.mat(i)
        assert m.is_symmetric()
        assert dN % roy212.ys.content(i) == 0


def test_z_integerized(roy212):
    for j in range(0, 15):
        v = roy212.zs.integerized(j)
        assert not v.is_zero()
    with pytest.raises(BadIndex):
        roy212.zs.at(-1)


def test_z_orthogonal_to_leading_y(bl12):
    # z_j is (1/det w_k) y_{psi(t_{k+1})} ^ y_j, so it is orthogonal to both
    prog = bl12.prog
    for j in range(0, 12):
        k, _ = prog.block_of(j)
        lead = bl12.ys.at(prog.psi(prog.t(k + 1)))
        z = bl12.zs.at(j)
        assert z.dot(type(z).from_sym(lead)) == 0
        assert z.dot(type(z).from_sym(bl12.ys.at(j))) == 0


def test_contents_report(roy212, bl12):
    for bundle in (roy212, bl12):
        rep = contents_report(bundle, bundle.prog.t(10))
        assert rep.y_divides_detN
        assert rep.z_integral
        assert rep.z_divides_bound
        assert rep.content_bound > 0


def test_z_dot_y_identity(roy212, bl12):
    for bundle in (roy212, bl12):
        for i in range(1, 12):
            lhs, rhs = z_dot_y_identity(bundle, i)
            assert lhs == rhs
            assert isinstance(lhs, Fraction)


def test_det3_of_consecutive_ys_nonzero(roy212):
    # consecutive y-triples span Z^3 up to the determinant factor
    ys = roy212.ys
    for i in range(-1, 10):
        assert det3(ys.at(i - 1), ys.at(i), ys.at(i + 1)) != 0


def test_gray_fan_endpoints_and_wedge(roy212):
    for i in (3, 4, 5, 6):
        fan = gray_fan(roy212, i)
        assert fan.endpoints_ok
        assert fan.recurrence_ok
        assert fan.wedge_ok
        assert fan.content_gcd_ok
        assert fan.decomposition_ok
        assert fan.content_pairs_relaxed_ok
        assert len(fan.points) == len(fan.contents) >= 2


def test_gray_fan_known_counterexample(roy212):
    # c_m c_{m+1} | d_i fails at i = 3 (content 16 vs d_3 = 8) while the
    # relaxed divisibility through content(d_i z_{i+1}) still holds
    fan = gray_fan(roy212, 3)
    assert not fan.content_pairs_ok
    assert fan.content_pairs_relaxed_ok


def test_gray_fan_fibonacci_only(roy212_p2):
    with pytest.raises(FibonacciOnly):
        gray_fan(roy212_p2, 4)


def test_bundle_shares_sequences(bl12):
    assert bl12.ys.seq is bl12.seq
    assert bl12.zs.ys is bl12.ys
    assert bl12.prog.is_fibonacci


def test_failure_reporting():
    # sanity of the reporting path: an impossible index range reports cleanly
    bundle = make_bundle(roy_family(2, 1, 3), SturmianProgram.all_ones())
    rep = verify_identities(bundle, bundle.prog.t(6))
    assert rep.ok
    assert rep.i_max == bundle.prog.t(6)
