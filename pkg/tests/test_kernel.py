import os
import subprocess
import sys

import numpy as np
import pytest

from dopid import kernel
from dopid.atoms import decompose
from dopid.prob import from_array
from conftest import random_dist


def test_backend_registry():
    assert "python" in kernel.BACKENDS
    assert kernel.BACKEND in kernel.BACKENDS
    with pytest.raises(ValueError):
        kernel.get_backend("fortran")


@pytest.mark.skipif("cython" not in kernel.BACKENDS, reason="compiled kernel not built")
def test_backend_parity(rng):
    for shape in [(2, 2, 2), (3, 3, 3), (4, 4, 4), (2, 5, 3)]:
        for _ in range(20):
            d = random_dist(rng, shape)
            a = decompose(d, backend="cython")
            b = decompose(d, backend="python")
            np.testing.assert_allclose(a.atoms, b.atoms, rtol=0, atol=1e-13)
            tc = kernel.compute_terms(d.p, 1.0, "cython")
            tp = kernel.compute_terms(d.p, 1.0, "python")
            np.testing.assert_allclose(tc.x, tp.x, rtol=0, atol=1e-13)
            np.testing.assert_allclose(tc.joint_a_y, tp.joint_a_y, rtol=0, atol=1e-15)


def test_sparse_input(rng):
    p = np.zeros((3, 3, 3))
    p[0, 1, 2] = 0.4
    p[2, 0, 2] = 0.6
    for name in kernel.BACKENDS:
        t = kernel.compute_terms(p, 1.0, name)
        assert np.all(np.isfinite(t.x)) and np.all(np.isfinite(t.y))


def test_joint_transpose_relation(rng):
    d = random_dist(rng, (3, 4, 2))
    t = kernel.compute_terms(d.p, 1.0)
    np.testing.assert_array_equal(t.joint_x_b.shape, (3, 4))
    assert np.max(np.abs(t.joint_a_y - t.joint_x_b)) <= 1e-12


def test_pure_python_env():
    code = "import dopid.kernel as k; print(k.BACKEND)"
    env = dict(os.environ, DOPID_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(kernel.BACKENDS))
def test_tiny_marginals_stay_finite(name):
    # products of these marginals underflow to zero; the logs must not
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.0 - 1e-9
    p[1, 1, 1] = 1e-9 * (1.0 - 1e-300)
    p[1, 1, 0] = 1e-9 * 1e-300
    t = kernel.compute_terms(p, 1.0, name)
    assert np.all(np.isfinite(t.x)) and np.all(np.isfinite(t.y)) and np.all(np.isfinite(t.shannon))


@pytest.mark.parametrize("name", sorted(kernel.BACKENDS))
def test_subnormal_z_mass_does_not_overflow(name):
    # Pr(Y=1) is twice Pr(Z=1), so the member target over Pr(Z=z) is ~1e313
    tiny = 2.225e-313
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.0
    p[1, 1, 0] = p[1, 1, 1] = tiny
    t = kernel.compute_terms(p, 1.0, name)
    assert np.all(np.isfinite(t.x)) and np.all(np.isfinite(t.y))
    r = decompose(from_array(p), backend=name)
    assert all(np.isfinite(r.atoms))
