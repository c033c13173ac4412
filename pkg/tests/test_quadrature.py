"""Adaptive integration: analytic examples, honesty, spectral overlaps."""

import numpy as np
import pytest

from greenrate.errors import ConvergenceError, CoverageError
from greenrate.quadrature import (
    QuadratureSpec,
    integrate_product_spectrum,
    integrate_segmented,
)
from greenrate.rates import KernelCurve, LineSet
from oracles import lorentzian_squared_overlap


def test_exponential_tail():
    res = integrate_segmented(lambda x: np.exp(-x), 0.0, np.inf, tail_decay=1.0)
    assert res.value == pytest.approx(1.0, abs=1e-10)


def test_inverse_sqrt_with_breakpoint():
    spec = QuadratureSpec(rel_tol=1e-9, breakpoints=[0.0])
    res = integrate_segmented(
        lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, spec, sqrt_singularities=[0.0]
    )
    assert res.value == pytest.approx(2.0, abs=1e-8)


def test_bessel_laplace_transform():
    from scipy.special import j0

    res = integrate_segmented(lambda x: j0(x) * np.exp(-x), 0.0, np.inf, tail_decay=1.0)
    # closed-form Laplace transform of J0 at s = 1: 1/sqrt(2)
    assert res.value == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-8)


def test_vector_integrand():
    def f(x):
        return np.stack([np.exp(-x), 2.0 * np.exp(-2.0 * x)], axis=-1)

    res = integrate_segmented(f, 0.0, np.inf, tail_decay=1.0)
    assert np.allclose(res.value, [1.0, 1.0], atol=1e-9)


def test_scalar_unvectorized_callable():
    res = integrate_segmented(lambda x: x * x, 0.0, 3.0, vectorized=False)
    assert res.value == pytest.approx(9.0, rel=1e-12)


# Honest-error smoke suite: (name, f, a, b, exact, kwargs)
_SUITE = [
    ("poly2", lambda x: x**2, 0.0, 3.0, 9.0, {}),
    ("poly5", lambda x: x**5, -1.0, 2.0, (2.0**6 - 1.0) / 6.0, {}),
    ("exp", lambda x: np.exp(-x), 0.0, np.inf, 1.0, {"tail_decay": 1.0}),
    ("gauss", lambda x: np.exp(-(x**2)), 0.0, np.inf, np.sqrt(np.pi) / 2, {"tail_decay": 1.0}),
    ("sin10", lambda x: np.sin(10 * x), 0.0, 1.0, (1 - np.cos(10.0)) / 10.0, {}),
    ("cos_exp", lambda x: np.cos(x) * np.exp(-x), 0.0, np.inf, 0.5, {"tail_decay": 1.0}),
    ("x_exp", lambda x: x * np.exp(-x), 0.0, np.inf, 1.0, {"tail_decay": 1.0}),
    (
        "isqrt",
        lambda x: 1 / np.sqrt(x),
        0.0,
        1.0,
        2.0,
        {"spec": QuadratureSpec(breakpoints=[0.0]), "sqrt_singularities": [0.0]},
    ),
    (
        "isqrt_upper",
        lambda x: 1 / np.sqrt(1 - x),
        0.0,
        1.0,
        2.0,
        {"spec": QuadratureSpec(breakpoints=[1.0]), "sqrt_singularities": [1.0]},
    ),
    ("log", lambda x: np.log(x), 0.0, 1.0, -1.0, {"spec": QuadratureSpec(breakpoints=[0.0])}),
    (
        "lorentz",
        lambda x: (1e-3 / np.pi) / ((x - 0.5) ** 2 + 1e-6),
        0.0,
        1.0,
        2 * np.arctan(500.0) / np.pi,
        {"spec": QuadratureSpec(breakpoints=[0.5])},
    ),
    ("cosh_tail", lambda x: np.exp(-2 * x) * np.cosh(x), 0.0, np.inf, 2.0 / 3.0, {"tail_decay": 1.0}),
    ("bump", lambda x: np.exp(-100 * (x - 0.7) ** 2), 0.0, 2.0, np.sqrt(np.pi) / 10.0, {}),
    ("runge", lambda x: 1.0 / (1.0 + 25 * x**2), -1.0, 1.0, 2 * np.arctan(5.0) / 5.0, {}),
    ("sqrt", lambda x: np.sqrt(x), 0.0, 4.0, 16.0 / 3.0, {"spec": QuadratureSpec(breakpoints=[0.0])}),
    ("cube_osc", lambda x: x**3 * np.sin(x), 0.0, np.pi, np.pi**3 - 6 * np.pi, {}),
    ("exp_osc", lambda x: np.exp(-x) * np.sin(5 * x), 0.0, np.inf, 5.0 / 26.0, {"tail_decay": 1.0}),
    ("rational", lambda x: 1.0 / (1.0 + x) ** 3, 0.0, 3.0, 0.5 * (1 - 1.0 / 16.0), {}),
    ("piecewise", lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.5 * (0.3**2 + 0.7**2), {"spec": QuadratureSpec(breakpoints=[0.3])}),
    ("exp_shift", lambda x: np.exp(-(x - 2.0)), 2.0, np.inf, 1.0, {"tail_decay": 1.0}),
]


@pytest.mark.parametrize("name,f,a,b,exact,kwargs", _SUITE, ids=[s[0] for s in _SUITE])
def test_error_estimate_is_honest(name, f, a, b, exact, kwargs):
    res = integrate_segmented(f, a, b, **kwargs)
    true_err = abs(res.value - exact)
    assert true_err <= max(10.0 * res.error, 1e-13 * max(1.0, abs(exact)))
    # and the result meets the requested tolerance
    assert true_err <= max(1e-7 * abs(exact), 1e-10)


def test_refinement_stays_within_prior_estimate():
    from scipy.special import j0

    f = lambda x: j0(3 * x) * np.exp(-0.7 * x)
    loose = integrate_segmented(f, 0.0, np.inf, QuadratureSpec(rel_tol=1e-6), tail_decay=0.7)
    tight = integrate_segmented(f, 0.0, np.inf, QuadratureSpec(rel_tol=1e-7), tail_decay=0.7)
    assert abs(loose.value - tight.value) <= max(loose.error, 1e-14)


def test_convergence_error_carries_partial():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=6)
    with pytest.raises(ConvergenceError) as exc:
        integrate_segmented(lambda x: np.abs(np.sin(40 * x)) ** 0.3, 0.0, 3.0, spec)
    assert exc.value.value is not None
    assert exc.value.estimate is not None and exc.value.estimate > 0


def test_breakpoints_must_be_finite():
    with pytest.raises(ValueError):
        QuadratureSpec(breakpoints=[np.inf])


def test_infinite_limit_needs_decay():
    with pytest.raises(ValueError):
        integrate_segmented(lambda x: np.exp(-x), 0.0, np.inf)


class TestProductSpectrum:
    def test_lorentzian_squared_oracle(self):
        eta = 1e-3
        line = LineSet(lines=((1.0, 1.0),), width=eta)
        grid = np.linspace(0.2, 1.8, 41)
        curve = KernelCurve(grid, np.full_like(grid, 3.7))
        got = integrate_product_spectrum(curve, line, line)
        assert got == pytest.approx(3.7 * lorentzian_squared_overlap(eta), rel=1e-6)

    def test_disjoint_lines_vanish(self):
        eta = 1e-4
        em = LineSet(lines=((0.8, 1.0),), width=eta)
        ab = LineSet(lines=((1.2, 1.0),), width=eta)
        grid = np.linspace(0.5, 1.5, 21)
        curve = KernelCurve(grid, np.ones_like(grid))
        got = integrate_product_spectrum(curve, em, ab)
        single = integrate_product_spectrum(curve, em, em)
        assert got < 1e-6 * single

    def test_narrowband_factorization(self):
        # slowly varying kernel: overlap = kernel(omega_A) * sigma within 1%
        eta = 1e-3
        em = LineSet(lines=((1.0, 1.0),), width=eta)
        grid = np.linspace(0.2, 1.8, 81)
        kernel = 2.0 + 0.001 * (grid - 1.0)  # < 1% variation over the support
        curve = KernelCurve(grid, kernel)
        got = integrate_product_spectrum(curve, em, em)
        sigma = lorentzian_squared_overlap(eta)
        assert got == pytest.approx(2.0 * sigma, rel=0.01)

    def test_coverage_error(self):
        em = LineSet(lines=((1.0, 1.0),), width=0.05)
        grid = np.linspace(0.9, 1.1, 11)  # narrower than 10 half-widths
        curve = KernelCurve(grid, np.ones_like(grid))
        with pytest.raises(CoverageError):
            integrate_product_spectrum(curve, em, em)
