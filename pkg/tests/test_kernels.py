import importlib
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distopt import _fallback, kernels

compiled = pytest.importorskip("distopt._kernels")


def quad_case(seed, n=6, steps=40, noisy=True):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    H = A @ A.T / n + np.eye(n)
    b = rng.standard_normal(n)
    x = rng.standard_normal(n)
    h = np.full(steps, 0.05)
    noise = rng.standard_normal((steps, n)) if noisy else np.empty((0, n))
    marks = np.array(sorted(set(rng.integers(0, steps, 5).tolist()) | {steps - 1}), dtype=np.int64)
    return H, b, x, h, noise, marks


@pytest.mark.parametrize("noisy", [True, False])
def test_quad_sgd_backends_agree(noisy):
    H, b, x, h, noise, marks = quad_case(0, noisy=noisy)
    xa, sa = x.copy(), np.zeros_like(x)
    xb, sb = x.copy(), np.zeros_like(x)
    ra = compiled.quad_sgd(H, b, xa, sa, h, noise, marks)
    rb = _fallback.quad_sgd(H, b, xb, sb, h, noise, marks)
    for a, c in zip(ra, rb):
        np.testing.assert_allclose(a, c, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(xa, xb, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(sa, sb, rtol=1e-12, atol=1e-14)


def test_quad_sgd_single_step_by_hand():
    H = np.diag([2.0, 1.0])
    b = np.array([1.0, 0.0])
    for impl in (compiled, _fallback):
        x = np.array([1.0, 1.0])
        s = np.zeros(2)
        ox, os_ = impl.quad_sgd(H, b, x, s, np.array([0.5]), np.empty((0, 2)), np.array([0], dtype=np.int64))
        # x - 0.5 (H x - b) = [1 - 0.5, 1 - 0.5]
        np.testing.assert_allclose(ox[0], [0.5, 0.5])
        np.testing.assert_allclose(os_[0], [0.5, 0.5])


@given(st.integers(1, 8), st.integers(0, 40), st.floats(0.0, 1.0), st.booleans(), st.integers(0, 2**31 - 1))
def test_sliding_l1_backends_agree(n, T, weight, zo, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(n)
    x = rng.standard_normal(n)
    dirs = rng.standard_normal((T, n)) if zo else np.empty((0, n))
    if zo:
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    a = compiled.sliding_l1(g, x, 3.0, T, weight, dirs, 1e-3)
    b = _fallback.sliding_l1(g, x, 3.0, T, weight, dirs, 1e-3)
    for u, v in zip(a, b):
        np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-12)


def test_sliding_l1_zero_steps_returns_start():
    x = np.array([0.3, -0.2])
    for impl in (compiled, _fallback):
        u, ut = impl.sliding_l1(np.zeros(2), x, 1.0, 0, 0.1, np.empty((0, 2)), 0.0)
        np.testing.assert_array_equal(u, x)
        np.testing.assert_array_equal(ut, x)


def test_backend_selection():
    assert kernels.BACKEND == "cython"
    code = "import distopt.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={"DISTOPT_PURE_PYTHON": "1", "PATH": ""})
    assert out.stdout.strip() == "python", out.stderr


def test_fallback_reload(monkeypatch):
    monkeypatch.setenv("DISTOPT_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.quad_sgd is _fallback.quad_sgd
    finally:
        monkeypatch.delenv("DISTOPT_PURE_PYTHON")
        importlib.reload(kernels)
