from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.exactlin import (
    IntMat2, J, RatVec, SymVec, ZeroObject, det3, det3_trace_form,
    rat_dot, rat_wedge,
)

ints = st.integers(min_value=-10 ** 9, max_value=10 ** 9)
mats = st.builds(IntMat2, ints, ints, ints, ints)
vecs = st.builds(SymVec, ints, ints, ints)


def test_J_basics():
    assert J.det() == 1
    assert (J @ J) == IntMat2(-1, 0, 0, -1)
    assert J.transpose() == -J
    assert J.tr_J() == -2  # Tr(J@J) = -2


def test_identity_and_adj():
    m = IntMat2(3, 1, 4, 1)
    assert m @ IntMat2.identity() == m
    assert m @ m.adj() == m.det() * IntMat2.identity()
    assert (m ** 5) == m @ m @ m @ m @ m
    assert (m ** 0) == IntMat2.identity()


@given(mats)
def test_adj_identity(m):
    assert m @ m.adj() == m.det() * IntMat2.identity()
    assert m.adj() @ m == m.det() * IntMat2.identity()


@given(mats, mats)
def test_det_multiplicative(m, n):
    assert (m @ n).det() == m.det() * n.det()


@given(mats)
def test_tr_J_is_antisymmetric_part(m):
    assert m.tr_J() == (J @ m).trace()
    assert m.is_symmetric() == (m.tr_J() == 0)


@given(vecs)
def test_symvec_matrix_alias(x):
    m = x.as_mat()
    assert m.is_symmetric()
    assert SymVec.from_mat(m) == x
    assert m.det() == x.det()
    assert m.trace() == x.trace()


@given(vecs)
def test_symmetric_mJm(x):
    # for symmetric m: m (J m J) = -det(m) I, since J m J = -adj(m)
    m = x.as_mat()
    assert J @ m @ J == -m.adj()


@given(vecs, vecs)
def test_wedge_antisymmetric_orthogonal(x, y):
    w = x.wedge(y)
    assert w == -(y.wedge(x))
    assert x.dot(w) == 0
    assert y.dot(w) == 0


@given(vecs, vecs)
def test_lagrange_identity(x, y):
    w = x.wedge(y)
    assert w.norm_sq() == x.norm_sq() * y.norm_sq() - x.dot(y) ** 2


@given(vecs, vecs, vecs)
def test_det3_both_ways(x, y, z):
    d = det3(x, y, z)
    assert d == det3_trace_form(x, y, z)
    # alternating
    assert det3(y, x, z) == -d
    assert det3(x, x, z) == 0


@given(vecs, vecs, vecs, vecs)
def test_det3_multilinear(x, y, z, w):
    assert det3(x + w, y, z) == det3(x, y, z) + det3(w, y, z)


def test_content_primitive():
    v = SymVec(6, -9, 15)
    assert v.content() == 3
    assert v.primitive() == SymVec(2, -3, 5)
    assert v.primitive().content() == 1
    with pytest.raises(ZeroObject):
        SymVec(0, 0, 0).content()


def test_norms():
    v = SymVec(-3, 4, 0)
    assert v.sup_norm() == 4
    assert v.norm_sq() == 25
    assert float(v.eucl_norm()) == 5.0


@given(vecs)
def test_json_round_trip(x):
    assert SymVec.from_json(x.to_json()) == x


def test_json_big_integers():
    big = 10 ** 120 + 7
    v = SymVec(big, -big, 1)
    assert SymVec.from_json(v.to_json()) == v


def test_ratvec_consistency():
    a = RatVec.make(SymVec(2, 0, -3), 4)     # (1/2, 0, -3/4)
    b = RatVec.make(SymVec(6, 1, 15), 3)     # (2, 1/3, 5)
    w = rat_wedge(a, b)
    assert rat_dot(a, w) == 0
    assert rat_dot(b, w) == 0
    # scales like the integer wedge: (4a) ^ (3b) = 12 (a ^ b)
    wi = SymVec(2, 0, -3).wedge(SymVec(6, 1, 15))
    scaled = w.scale(12)
    assert scaled.is_integral() and scaled.to_sym() == wi


def test_ratvec_reduction():
    v = RatVec.make(SymVec(2, 4, 6), -4)
    assert v.den == 2 and v.num == SymVec(-1, -2, -3)
    assert v.components() == (Fraction(-1, 2), Fraction(-1), Fraction(-3, 2))
    assert RatVec.make(SymVec(3, 0, 0), 1).is_integral()
