import numpy as np
import pytest

from curveclass.errors import DegenerateFit, InsufficientData
from curveclass.numerics import Grid, RandomStream
from curveclass.smoothing import (
    EPANECHNIKOV,
    BandwidthPlan,
    SampledCurve,
    kernel_moments,
    local_linear_fit,
    no_smoothing_interpolant,
    plugin_bandwidth,
    smooth_with_plan,
)

GRID = Grid(0.0, 1.0, 51)


def direct_local_linear(curve, h, x_eval, kernel=EPANECHNIKOV):
    """Straightforward per-point evaluation of the local linear ratio."""
    m = curve.n_points
    out = np.empty(len(x_eval))
    for j, x in enumerate(x_eval):
        u = (x - curve.x) / h
        kh = kernel.weights(u) / h
        u0 = np.sum(kh) / m
        u1 = np.sum(u * kh) / m
        u2 = np.sum(u * u * kh) / m
        v0 = np.sum(curve.y * kh) / m
        v1 = np.sum(curve.y * u * kh) / m
        out[j] = (u2 * v0 - u1 * v1) / (u2 * u0 - u1 * u1)
    return out


def noisy_curve(seed, m=60, sd=0.3, fn=lambda t: np.sin(2 * np.pi * t)):
    stream = RandomStream(seed)
    x = np.sort(stream.uniform(0.0, 1.0, m))
    y = fn(x) + stream.normal(0.0, sd, m)
    return SampledCurve(id=f"c{seed}", x=x, y=y)


class TestKernel:
    def test_moments(self):
        kappa2, kappa = kernel_moments()
        assert kappa2 == pytest.approx(0.2)
        assert kappa == pytest.approx(0.6)

    def test_moment_formula(self):
        assert EPANECHNIKOV.moment(0) == pytest.approx(1.0)
        assert EPANECHNIKOV.moment(1) == 0.0
        assert EPANECHNIKOV.moment(2) == pytest.approx(0.2)
        assert EPANECHNIKOV.moment(4) == pytest.approx(3.0 / 35.0)

    def test_weights_support(self):
        u = np.array([-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
        w = EPANECHNIKOV.weights(u)
        assert w[0] == w[-1] == 0.0
        assert w[2] == pytest.approx(0.75)


class TestSampledCurve:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampledCurve("a", [0.0], [1.0])
        with pytest.raises(ValueError):
            SampledCurve("a", [0.0, 1.0], [np.inf, 1.0])
        with pytest.raises(ValueError):
            SampledCurve("a", [0.0, 1.0], [0.0, 1.0], label=2)

    def test_from_points(self):
        c = SampledCurve.from_points("a", [(0.0, 1.0), (1.0, 2.0)], label=1)
        assert c.n_points == 2 and c.label == 1


class TestLocalLinearFit:
    def test_affine_reproduction(self):
        # a local linear fit reproduces affine data exactly
        x = np.linspace(0, 1, 40)
        curve = SampledCurve("aff", x, 3.0 * x - 1.2)
        fit = local_linear_fit(curve, 0.15, GRID)
        assert np.max(np.abs(fit.values - (3.0 * GRID.points - 1.2))) < 1e-9

    def test_matches_direct_evaluation(self):
        curve = noisy_curve(2)
        for h in (0.08, 0.2, 0.5):
            fit = local_linear_fit(curve, h, GRID)
            direct = direct_local_linear(curve, h, GRID.points)
            assert np.max(np.abs(fit.values - direct)) < 1e-12

    def test_degenerate_window(self):
        curve = SampledCurve("two", [0.0, 1.0], [0.0, 1.0])
        with pytest.raises(DegenerateFit) as exc:
            local_linear_fit(curve, 0.05, GRID)
        assert 0.0 <= exc.value.x <= 1.0

    def test_positive_bandwidth_required(self):
        curve = noisy_curve(1)
        with pytest.raises(ValueError):
            local_linear_fit(curve, 0.0, GRID)

    def test_recovers_smooth_function(self):
        curve = noisy_curve(5, m=400, sd=0.05)
        fit = local_linear_fit(curve, 0.08, GRID)
        truth = np.sin(2 * np.pi * GRID.points)
        interior = slice(5, -5)
        assert np.max(np.abs(fit.values[interior] - truth[interior])) < 0.1


class TestPluginBandwidth:
    def test_requires_ten_points(self):
        c = SampledCurve("s", np.linspace(0, 1, 9), np.zeros(9))
        with pytest.raises(InsufficientData):
            plugin_bandwidth(c)

    def test_within_caps(self):
        c = noisy_curve(3)
        h = plugin_bandwidth(c)
        xs = np.sort(c.x)
        gaps = np.diff(xs)
        assert 2.0 * np.median(gaps[gaps > 0]) <= h <= (xs[-1] - xs[0]) / 2

    def test_noise_scaling_one_fifth_power(self):
        # h_PI ~ sigma^(2/5): doubling the noise variance scales h by 2^(1/5)
        stream = RandomStream(9)
        x = np.sort(stream.uniform(0.0, 1.0, 400))
        signal = np.sin(2 * np.pi * x)
        noise = stream.normal(0.0, 1.0, 400)
        ratios = []
        for rep in range(5):
            shift = np.roll(noise, rep * 37)
            h1 = plugin_bandwidth(SampledCurve("a", x, signal + 0.2 * shift))
            h2 = plugin_bandwidth(
                SampledCurve("b", x, signal + 0.2 * np.sqrt(2) * shift)
            )
            ratios.append(h2 / h1)
        assert np.mean(ratios) == pytest.approx(2 ** 0.2, rel=0.1)

    def test_zero_noise_linear_hits_upper_cap(self):
        x = np.linspace(0, 1, 60)
        c = SampledCurve("lin", x, 2.0 * x + 1.0)
        assert plugin_bandwidth(c) == pytest.approx(0.5)

    def test_ise_bracketing(self):
        # the plug-in bandwidth beats gross under- and oversmoothing in ISE
        truth = lambda t: np.sin(2 * np.pi * t)
        w = GRID.trapezoid_weights
        ise = {"pi": [], "lo": [], "hi": []}
        for seed in range(12):
            c = noisy_curve(100 + seed, m=150, sd=0.4, fn=truth)
            h_pi = plugin_bandwidth(c)
            for name, h in (("pi", h_pi), ("lo", h_pi / 12), ("hi", 0.5)):
                while True:
                    try:
                        fit = local_linear_fit(c, h, GRID)
                        break
                    except DegenerateFit:
                        h *= 2.0
                err = fit.values - truth(GRID.points)
                ise[name].append(float(w @ (err * err)))
        assert np.mean(ise["pi"]) < np.mean(ise["lo"])
        assert np.mean(ise["pi"]) < np.mean(ise["hi"])


class TestNoSmoothingInterpolant:
    def test_passes_through_points(self):
        grid = Grid(0.0, 1.0, 5)
        c = SampledCurve("i", [0.0, 0.5, 1.0], [1.0, 2.0, 0.0])
        f = no_smoothing_interpolant(c, grid)
        assert f.values[0] == 1.0 and f.values[2] == 2.0 and f.values[4] == 0.0

    def test_duplicate_x_averaged(self):
        grid = Grid(0.0, 1.0, 3)
        c = SampledCurve("d", [0.0, 0.0, 1.0], [1.0, 3.0, 0.0])
        f = no_smoothing_interpolant(c, grid)
        assert f.values[0] == pytest.approx(2.0)

    def test_constant_extrapolation(self):
        grid = Grid(0.0, 1.0, 11)
        c = SampledCurve("e", [0.4, 0.6], [5.0, 7.0])
        f = no_smoothing_interpolant(c, grid)
        assert f.values[0] == 5.0 and f.values[-1] == 7.0


class TestBandwidthPlan:
    def test_mode_validation(self):
        with pytest.raises(ValueError):
            BandwidthPlan(mode="bogus")
        with pytest.raises(ValueError):
            BandwidthPlan.fixed(h=0.0, h1=0.1)
        with pytest.raises(ValueError):
            BandwidthPlan.scaled_plug_in(gamma=-1.0, gamma1=1.0)

    def test_smooth_with_plan_roles(self):
        c = noisy_curve(4)
        plan = BandwidthPlan.fixed(h=0.3, h1=0.15)
        new = smooth_with_plan(c, plan, GRID, "new")
        train = smooth_with_plan(c, plan, GRID, "training")
        assert not np.array_equal(new.values, train.values)
        assert np.array_equal(
            new.values, local_linear_fit(c, 0.3, GRID).values
        )

    def test_scaled_plan_uses_plugin(self):
        c = noisy_curve(6)
        h = plugin_bandwidth(c)
        got = smooth_with_plan(
            c, BandwidthPlan.scaled_plug_in(2.0, 1.0), GRID, "new"
        )
        assert np.array_equal(got.values, local_linear_fit(c, 2 * h, GRID).values)

    def test_no_smoothing_plan(self):
        c = noisy_curve(8)
        got = smooth_with_plan(c, BandwidthPlan.no_smoothing(), GRID, "new")
        assert np.array_equal(got.values, no_smoothing_interpolant(c, GRID).values)

    def test_escalation_recovers_sparse_window(self):
        # h too small for the design gap: doubling rescues the fit
        x = np.array([0.0, 0.45, 0.5, 0.55, 1.0])
        c = SampledCurve("sparse", x, np.sin(x))
        plan = BandwidthPlan.fixed(h=0.04, h1=0.04)
        fit = smooth_with_plan(c, plan, GRID, "new")
        assert np.all(np.isfinite(fit.values))

    def test_role_validation(self):
        c = noisy_curve(4)
        with pytest.raises(ValueError):
            smooth_with_plan(c, BandwidthPlan.no_smoothing(), GRID, "test")
