import numpy as np
import pytest

from sturmlab import kernels


XI = 0.7204846676321325
XI2 = XI * XI


def _sorted(pts, lam):
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    return pts[order], lam[order]


def _run(fn, xi, xi2, q, R, cutoff):
    pts = np.empty((kernels._CAP, 3), dtype=np.int64)
    lam = np.empty(kernels._CAP, dtype=np.float64)
    n = fn(xi, xi2, q, R, cutoff, pts, lam)
    assert n >= 0
    return _sorted(pts[:n].copy(), lam[:n].copy())


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba not importable")
@pytest.mark.parametrize("q,R,cutoff", [(2.0, 12, 8.0), (5.0, 40, 30.0)])
def test_primal_numpy_matches_njit(q, R, cutoff):
    p1, l1 = _run(kernels._primal_numpy, XI, XI2, q, R, cutoff)
    p2, l2 = _run(kernels._primal_njit, XI, XI2, q, R, cutoff)
    assert p1.shape == p2.shape
    assert np.array_equal(p1, p2)
    assert np.allclose(l1, l2, rtol=1e-12)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba not importable")
@pytest.mark.parametrize("q,R0,cutoff", [(2.0, 10, 2.0), (6.0, 300, 1.5)])
def test_dual_numpy_matches_njit(q, R0, cutoff):
    p1, l1 = _run(kernels._dual_numpy, XI, XI2, q, R0, cutoff)
    p2, l2 = _run(kernels._dual_njit, XI, XI2, q, R0, cutoff)
    assert np.array_equal(p1, p2)
    assert np.allclose(l1, l2, rtol=1e-12)


def test_collect_primal_filters():
    q, R, cutoff = 3.0, 15, 10.0
    pts, lam = kernels.collect_primal(XI, XI2, q, R, cutoff)
    assert len(pts) == len(lam) > 0
    assert (np.abs(pts[:, :2]) <= R).all()
    assert (lam <= cutoff).all()
    # no zero vector
    assert (np.abs(pts).sum(axis=1) > 0).all()
    # lam really is the max of |x| and e^q |x . u|
    u = np.array([1.0, XI, XI2])
    for x, l in zip(pts[:20], lam[:20]):
        norm = np.sqrt(float(x @ x))
        proj = abs(float(x @ u)) * np.exp(q)
        assert abs(l - max(norm, proj)) < 1e-9 * max(1.0, l)


def test_collect_dual_filters():
    pts, lam = kernels.collect_dual(XI, XI2, 4.0, 60, 2.5)
    assert len(pts) > 0
    assert (lam <= 2.5).all()


def test_env_flag_reflected():
    import os
    if os.environ.get("STURMLAB_NO_NUMBA"):
        assert not kernels.USE_NUMBA
    else:
        assert kernels.USE_NUMBA == kernels.HAS_NUMBA
