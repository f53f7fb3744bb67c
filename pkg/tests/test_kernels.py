"""The two kernel backends must agree to rounding error."""

import numpy as np
import pytest

import infoloss as il
from infoloss import kernels
from infoloss.backend import NUMBA_ENABLED

pytestmark = pytest.mark.skipif(not NUMBA_ENABLED,
                                reason="numba backend disabled or unavailable")


def _random_inputs(rng):
    nx, ny, nz = (int(v) for v in rng.integers(2, 9, size=3))
    px = rng.dirichlet(np.ones(nx))
    pyx = rng.dirichlet(np.ones(ny), size=nx)
    qyx = rng.dirichlet(np.ones(ny), size=nx)
    pzx = rng.dirichlet(np.ones(nz), size=nx)
    return px, pyx, qyx, pzx


def test_backends_agree():
    rng = np.random.default_rng(0)
    for _ in range(200):
        px, pyx, qyx, pzx = _random_inputs(rng)
        joint = px[:, None] * pyx
        for name, args in (
            ("entropy_bits", (px,)),
            ("kl_nats", (pyx[0], qyx[0])),
            ("joint_mi_bits", (joint,)),
            ("cond_tv", (px, pyx, qyx)),
            ("cond_ce_nats", (px, pyx, qyx)),
        ):
            fast = kernels.NUMBA_IMPLS[name](*args)
            slow = kernels.NUMPY_IMPLS[name](*args)
            assert fast == pytest.approx(slow, rel=1e-12, abs=1e-13), name
        fast = kernels.NUMBA_IMPLS["model_mis"](px, pyx, pzx)
        slow = kernels.NUMPY_IMPLS["model_mis"](px, pyx, pzx)
        for a, b in zip(fast, slow):
            assert a == pytest.approx(b, rel=1e-12, abs=1e-13)


def test_sparse_inputs_with_exact_zeros():
    px = np.array([0.5, 0.5, 0.0])
    pyx = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    qyx = np.array([[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]])
    pzx = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    for name, args in (
        ("entropy_bits", (px,)),
        ("joint_mi_bits", (px[:, None] * pyx,)),
        ("cond_tv", (px, pyx, qyx)),
        ("cond_ce_nats", (px, pyx, qyx)),
        ("model_mis", (px, pyx, pzx)),
    ):
        fast = kernels.NUMBA_IMPLS[name](*args)
        slow = kernels.NUMPY_IMPLS[name](*args)
        assert np.allclose(fast, slow, rtol=1e-12, atol=1e-13), name


def test_env_flag_documented_in_backend():
    from infoloss import backend
    assert "INFOLOSS_NUMBA" in backend.__doc__
