import math
from dataclasses import replace

import numpy as np
import pytest

from curveclass.errors import ZeroTau
from curveclass.numerics import FunctionOnGrid, Grid, inner_product
from curveclass.theory import (
    BUILTIN_SCENARIOS,
    H1_ORDER,
    TheoryInputs,
    builtin_scenario,
    case_one_minimizer,
    classify_regime,
    compute_constants,
    covariance_from_eigenpairs,
    expansion_predict,
    second_derivative,
)

GRID = Grid(0.0, 1.0, 201)
T = GRID.points


def make_inputs(
    amp=1.0,
    theta0=0.5,
    theta1=0.5,
    sd0_sq=0.25,
    sd1_sq=0.25,
    pi0=0.5,
    nu0=1000.0,
    nu1=1000.0,
    **overrides,
):
    """Constant mean difference + single sine eigenfunction: every constant
    has a short closed form used by the tests below."""
    psi = FunctionOnGrid(GRID, np.sqrt(2.0) * np.sin(np.pi * T))
    zero = FunctionOnGrid(GRID, np.zeros(201))
    base = dict(
        mu0=zero,
        mu1=FunctionOnGrid(GRID, amp * np.ones(201)),
        mu0_dd=zero,
        mu1_dd=zero,
        cov0=covariance_from_eigenpairs(GRID, [(theta0, psi)]),
        cov1=covariance_from_eigenpairs(GRID, [(theta1, psi)]),
        sigma_eps0_sq=sd0_sq,
        sigma_eps1_sq=sd1_sq,
        pi0=pi0,
        nu0=nu0,
        nu1=nu1,
    )
    base.update(overrides)
    return TheoryInputs(**base)


def phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


class TestComputeConstantsClosedForm:
    def test_constant_difference_case(self):
        # mu1 - mu0 = a: b00 = -a^2; tau_k^2 = 4 kappa2 theta_k a^2 (int psi)^2
        a, theta = 0.8, 0.5
        c = compute_constants(make_inputs(amp=a, theta0=theta, theta1=theta))
        assert c.b00 == pytest.approx(-(a**2), rel=1e-6)
        int_psi = 2.0 * math.sqrt(2.0) / math.pi  # integral of sqrt2 sin(pi t)
        tau_sq = 4.0 * 0.2 * theta * (a * int_psi) ** 2
        assert c.tau0_sq == pytest.approx(tau_sq, rel=1e-4)
        assert c.tau1_sq == pytest.approx(tau_sq, rel=1e-4)
        tau = math.sqrt(tau_sq)
        assert c.alpha0 == pytest.approx(phi(-(a**2) / tau) / tau, rel=1e-4)
        assert c.alpha1 == pytest.approx(-c.alpha0, rel=1e-4)

    def test_flat_means_have_zero_curvature_constants(self):
        c = compute_constants(make_inputs())
        assert c.c0 == c.c1 == c.c01 == c.c11 == 0.0
        assert c.c_agg == 0.0 and c.c1_agg == 0.0

    def test_noise_constants_scale_linearly_in_error_variance(self):
        base = make_inputs(sd0_sq=0.25, sd1_sq=0.1)
        doubled = make_inputs(sd0_sq=0.5, sd1_sq=0.1)
        c0 = compute_constants(base)
        c2 = compute_constants(doubled)
        assert c2.d00 == 2.0 * c0.d00
        assert c2.d10 == 2.0 * c0.d10
        assert c2.d01 == c0.d01  # population-1 noise untouched
        assert c2.d11 == c0.d11

    def test_uniform_flag_matches_explicit_constant_density(self):
        flat = FunctionOnGrid(GRID, np.ones(201) / GRID.length)
        a = compute_constants(make_inputs())
        b = compute_constants(
            make_inputs(uniform_design=False, f_x=flat)
        )
        assert a.d00 == pytest.approx(b.d00, rel=1e-12)
        assert a.d_agg == pytest.approx(b.d_agg, rel=1e-12)

    def test_exact_negation_of_b10(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        assert c.b10 == -c.b00  # bitwise, not approximately

    def test_zero_tau_for_equal_means(self):
        with pytest.raises(ZeroTau):
            compute_constants(make_inputs(amp=0.0))

    def test_curvature_constants_sign_structure(self):
        # mu1 = a sin(pi t) has mu1'' = -pi^2 mu1: c1 and c11 pick up the
        # curvature integral with opposite alpha signs
        psi = FunctionOnGrid(GRID, np.sqrt(2.0) * np.sin(np.pi * T))
        mu1 = FunctionOnGrid(GRID, 0.7 * np.sin(np.pi * T))
        c = compute_constants(
            make_inputs(
                mu1=mu1,
                mu1_dd=FunctionOnGrid(GRID, -(np.pi**2) * mu1.values),
            )
        )
        # int Delta mu1'' < 0 and alpha1 < 0, so c1 = kappa2 alpha1 int > 0
        assert c.c1 > 0
        assert c.c01 > 0  # c01 = -kappa2 alpha0 int, alpha0 > 0
        assert c.c0 == 0.0 and c.c11 == 0.0  # mu0'' = 0
        del psi


class TestRegimes:
    def test_symmetric_builtin_is_exactly_degenerate(self):
        inputs, _ = builtin_scenario("builtin-symmetric")
        c = compute_constants(inputs)
        assert c.d_agg == 0.0
        regime, order = classify_regime(c)
        assert regime == "Degenerate-d0"
        assert order == H1_ORDER["Degenerate-d0"]

    def test_asymmetric_builtin_is_regime_one(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        assert c.c1_agg > 0 and c.d_agg > 0
        assert c.regime == "I"
        assert classify_regime(c) == ("I", "nu0^(-1/3)")

    def test_sign_cases(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        cases = {
            (1.0, 1.0): "I",
            (-1.0, -1.0): "II",
            (1.0, -1.0): "III",
            (-1.0, 1.0): "IV",
        }
        for (c1_agg, d_agg), want in cases.items():
            fake = replace(c, c1_agg=c1_agg, d_agg=d_agg, d_scale=1.0)
            assert classify_regime(fake)[0] == want
        tiny = replace(c, d_agg=1e-20, d_scale=1.0)
        assert classify_regime(tiny)[0] == "Degenerate-d0"


class TestExpansionPredict:
    def test_formula(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        err0, h, h1, nu0 = 0.2, 0.05, 0.08, 2000.0
        want = (
            err0
            + c.c_agg * h * h
            + c.c1_agg * h1 * h1
            + c.d_agg / (nu0 * h1)
        )
        assert expansion_predict(c, err0, h, h1, nu0) == want

    def test_bandwidth_validation(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        with pytest.raises(ValueError):
            expansion_predict(c, 0.2, 0.0, 0.1, 100.0)
        with pytest.raises(ValueError):
            expansion_predict(c, 0.2, 0.1, -1.0, 100.0)

    def test_minimizer_matches_numeric_optimum(self):
        inputs, _ = builtin_scenario("builtin-gaussian-1")
        c = compute_constants(inputs)
        nu0 = inputs.nu0
        h1_star = case_one_minimizer(c, nu0)
        grid = np.geomspace(h1_star / 50, h1_star * 50, 20_001)
        vals = c.c1_agg * grid**2 + c.d_agg / (nu0 * grid)
        assert grid[np.argmin(vals)] == pytest.approx(h1_star, rel=1e-3)

    def test_minimizer_requires_positive_aggregates(self):
        inputs, _ = builtin_scenario("builtin-symmetric")
        c = compute_constants(inputs)
        with pytest.raises(ValueError):
            case_one_minimizer(c, 1000.0)


class TestHelpers:
    def test_second_derivative_exact_for_quadratics(self):
        f = FunctionOnGrid(GRID, 3.0 * T**2 - T + 2.0)
        dd = second_derivative(f)
        assert np.allclose(dd.values, 6.0, atol=1e-8)

    def test_covariance_from_eigenpairs(self):
        g = Grid(0.0, 1.0, 5)
        psi = FunctionOnGrid(g, np.array([1.0, -1.0, 1.0, -1.0, 1.0]))
        cov = covariance_from_eigenpairs(g, [(2.0, psi)])
        assert cov.entries[0, 0] == 2.0
        assert cov.entries[0, 1] == -2.0

    def test_inputs_validation(self):
        with pytest.raises(ValueError):
            make_inputs(pi0=0.0)
        with pytest.raises(ValueError):
            make_inputs(sd0_sq=0.0)
        with pytest.raises(ValueError):
            make_inputs(nu0=-1.0)
        with pytest.raises(ValueError):
            make_inputs(uniform_design=False)  # f_x missing

    def test_builtin_names(self):
        with pytest.raises(ValueError):
            builtin_scenario("builtin-nope")
        for name in BUILTIN_SCENARIOS:
            inputs, scenario = builtin_scenario(name)
            assert scenario.pi0 == inputs.pi0
            assert scenario.sigma_eps0**2 == pytest.approx(inputs.sigma_eps0_sq)
            psi = scenario.eigenfunctions(0)[0]
            assert inner_product(psi, psi) == pytest.approx(1.0, abs=1e-9)
