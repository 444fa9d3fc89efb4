import math

import numpy as np
import pytest

from arago.numerics import (
    NumericsError,
    QuadratureSpec,
    bessel_j0,
    bisect,
    integrate_adaptive,
)


def test_smooth_exponential():
    res = integrate_adaptive(lambda x: np.exp(x), 0.0, 1.0)
    assert res.converged
    assert res.value == pytest.approx(math.e - 1.0, rel=1e-12)


def test_oscillatory_damped():
    # int_0^T exp(-x) sin(b x) dx = (b - exp(-T)(sin bT + b cos bT)) / (1 + b^2)
    b, T = 50.0, 10.0
    exact = (b - math.exp(-T) * (math.sin(b * T) + b * math.cos(b * T))) / (1 + b * b)
    res = integrate_adaptive(lambda x: np.exp(-x) * np.sin(b * x), 0.0, T)
    assert res.converged
    assert res.value == pytest.approx(exact, rel=1e-9)


def test_complex_integrand():
    w = 37.0
    exact = (np.exp(1j * w) - 1.0) / (1j * w)
    res = integrate_adaptive(lambda x: np.exp(1j * w * x), 0.0, 1.0)
    assert res.converged
    assert abs(res.value - exact) < 1e-10


def test_vector_valued():
    # componentwise closed forms over [0, 2]; integrands return (n, m)
    res = integrate_adaptive(
        lambda x: np.stack([x, x * x, np.cos(x)], axis=-1), 0.0, 2.0)
    assert res.converged
    assert res.value.shape == (3,)
    assert np.allclose(res.value, [2.0, 8.0 / 3.0, math.sin(2.0)], rtol=1e-11)
    assert res.error.shape == (3,)


def test_error_bound_honest():
    # random smooth integrands with analytic antiderivatives: the reported
    # error estimate must bound the true error (with a small safety factor)
    rng = np.random.RandomState(7)
    for _ in range(10):
        c0, c1, c2 = rng.uniform(-2, 2, size=3)
        amp = rng.uniform(0.5, 2.0)
        om = rng.uniform(1.0, 30.0)
        a, b = sorted(rng.uniform(-3, 3, size=2))

        def f(x):
            return c0 + c1 * x + c2 * x * x + amp * np.cos(om * x)

        def F(x):
            return c0 * x + c1 * x * x / 2 + c2 * x ** 3 / 3 \
                + amp * np.sin(om * x) / om

        res = integrate_adaptive(f, a, b)
        true_err = abs(res.value - (F(b) - F(a)))
        assert res.converged
        assert true_err <= max(float(res.error) * 10.0, 1e-13)


def test_breakpoint_seeding():
    # kink at x = 0.3; exact value 0.29
    res = integrate_adaptive(lambda x: np.abs(x - 0.3), 0.0, 1.0,
                             points=(0.3,))
    assert res.converged
    assert res.value == pytest.approx(0.29, rel=1e-12)


def test_budget_exhaustion_flagged():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=2)
    res = integrate_adaptive(lambda x: np.sin(1000.0 * x), 0.0, 10.0, spec=spec)
    assert not res.converged
    with pytest.raises(NumericsError, match="hopeless"):
        res.require_converged("hopeless integral")


def test_empty_interval():
    res = integrate_adaptive(lambda x: np.exp(x), 1.0, 1.0)
    assert res.value == 0.0


def test_reversed_interval_rejected():
    with pytest.raises(ValueError):
        integrate_adaptive(lambda x: x, 1.0, 0.0)


def test_bessel_j0_small_argument():
    # series 1 - x^2/4 + x^4/64 - x^6/2304
    x = 0.5
    series = 1 - x**2 / 4 + x**4 / 64 - x**6 / 2304
    assert bessel_j0(x) == pytest.approx(series, abs=2e-7)
    assert bessel_j0(0.0) == 1.0


def test_bessel_j0_first_zero():
    root = bisect(bessel_j0, 2.0, 3.0, 1e-12)
    assert root == pytest.approx(2.404825557695773, abs=1e-9)


def test_bessel_j0_vectorized():
    x = np.linspace(0.0, 20.0, 7)
    y = bessel_j0(x)
    assert y.shape == x.shape
    assert abs(y[0] - 1.0) < 1e-15


def test_bisect_basic():
    root = bisect(math.cos, 0.0, 2.0, 1e-12)
    assert root == pytest.approx(math.pi / 2.0, abs=1e-10)


def test_bisect_endpoint_root():
    root = bisect(lambda x: x, 0.0, 1.0, 1e-12)
    assert abs(root) < 1e-10


def test_bisect_no_sign_change():
    with pytest.raises(ValueError, match="sign"):
        bisect(lambda x: 1.0 + x * x, 0.0, 1.0, 1e-10)
