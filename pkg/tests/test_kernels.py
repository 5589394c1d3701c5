import numpy as np
import pytest

from bergmanlab._kernels import BACKEND, jacobi_singular_values
from bergmanlab._kernels._jacobi_py import (
    jacobi_singular_values as jacobi_py,
)

try:
    from bergmanlab._kernels._jacobi_cy import (
        jacobi_singular_values as jacobi_cy,
    )
except ImportError:
    jacobi_cy = None

BACKENDS = [("py", jacobi_py)] + ([("cy", jacobi_cy)] if jacobi_cy else [])


def test_backend_selected():
    assert BACKEND in ("py", "cy")
    assert callable(jacobi_singular_values)


@pytest.mark.parametrize("name,fn", BACKENDS)
def test_against_library_svd(name, fn):
    rng = np.random.default_rng(42)
    for shape in [(8, 8), (12, 7), (30, 30), (65, 50)]:
        a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        got = fn(a)
        want = np.linalg.svd(a, compute_uv=False)
        assert np.abs(got - want[: len(got)]).max() < 1e-10


@pytest.mark.parametrize("name,fn", BACKENDS)
def test_real_matrices(name, fn):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(40, 40))
    got = fn(a)
    want = np.linalg.svd(a, compute_uv=False)
    assert np.allclose(got, want, atol=1e-10)


@pytest.mark.parametrize("name,fn", BACKENDS)
def test_zero_and_rank_deficient(name, fn):
    assert np.allclose(fn(np.zeros((5, 3))), 0.0)
    a = np.zeros((6, 4))
    a[0, 0] = 2.0
    sv = fn(a)
    assert sv[0] == pytest.approx(2.0)
    assert np.allclose(sv[1:], 0.0)


@pytest.mark.parametrize("name,fn", BACKENDS)
def test_tiny_singular_values_relative_accuracy(name, fn):
    # graded diagonal scaled by a random orthogonal factor: one-sided
    # Jacobi keeps small values accurate in the relative sense
    rng = np.random.default_rng(9)
    d = 10.0 ** -np.arange(0, 13, dtype=float)
    q, _ = np.linalg.qr(rng.normal(size=(13, 13)))
    a = q @ np.diag(d)
    sv = fn(a)
    assert np.abs(sv / d - 1.0).max() < 1e-10


def test_backends_agree():
    if jacobi_cy is None:
        pytest.skip("compiled kernel unavailable")
    rng = np.random.default_rng(17)
    a = rng.normal(size=(45, 31)) + 1j * rng.normal(size=(45, 31))
    assert np.abs(jacobi_cy(a) - jacobi_py(a)).max() < 1e-11
