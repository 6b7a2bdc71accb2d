"""Data generators for the six benchmark models, the Monte Carlo experiment
runner, Gaussian Karhunen-Loeve scenarios and the bandwidth-sweep harness."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classifiers import TrainedClassifier, classify
from .errors import CurveClassError, NonOrthonormalBasis
from .numerics import (
    RNG_ALGORITHM_ID,
    FunctionOnGrid,
    Grid,
    RandomStream,
    inner_product,
)
from .population import estimate_population
from .smoothing import (
    EPANECHNIKOV,
    BandwidthPlan,
    Kernel,
    SampledCurve,
    no_smoothing_interpolant,
    plugin_bandwidth,
    smooth_with_plan,
)
from .tuning import TuningConfig, cv_error_fixed_smoothing, cv_error_surfaces

#: Domain shared by all six models: the fixed design 2i-1, i = 1..50 spans it.
DOMAIN = (0.0, 100.0)
DEFAULT_GRID_POINTS = 251

STRATEGIES = ("cv", "pi", "ns")


def _phi(x, sigma):
    return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def _mu_a0(t):
    return _phi(t - 5.0, 10.0)


def _mu_a1(t):
    return _mu_a0(t) + 0.3 * np.cos(t / 5.0) + 0.1


def _mu_b0(t):
    return 30.0 * (
        0.2 * _phi(t - 5.0, 4.0)
        + 0.1 * _phi(t - 10.0, 4.0)
        + 0.4 * _phi(t - 20.0, 6.0)
        + 0.4 * _phi(t - 35.0, 6.0)
        + 0.6 * _phi(t - 55.0, 7.0)
        + 0.6 * _phi(t - 80.0, 7.0)
    )


def _mu_b1(t):
    return _mu_b0(t) + 4.0 / ((t - 50.0) ** 2 + 10.0)


def _mu_c0(t):
    return 15.0 * _phi(t - 65.0, 17.0) * np.cos(t / 7.0)


def _mu_c1(t):
    return _mu_c0(t) + 5.0 * _phi(t - 50.0, 20.0)


@dataclass(frozen=True)
class _ModelDef:
    mu: Tuple  # callables mu_k(t)
    envelope: Tuple  # callables e_k(t) multiplying the random score Z
    z_halfwidth: Tuple[float, float]  # Z ~ U[-hw_k, hw_k]
    pi0: float
    noise_kind: str  # "normal" or "centered-exp"
    noise_scale: Tuple  # noise_scale[version-1][k] (sd for normal kind)
    jitter: bool


def _normal_scales(den):
    # noise versions scale variance by 1, 2, 4 over 1/den(k)^2
    return tuple(
        tuple(math.sqrt(mult) / den(k) for k in (0, 1)) for mult in (1.0, 2.0, 4.0)
    )


_MODELS: Dict[str, _ModelDef] = {
    "A": _ModelDef(
        mu=(_mu_a0, _mu_a1),
        envelope=(
            lambda t: np.sqrt(3.0 * t + 100.0),
            lambda t: np.sqrt(3.0 * t + 100.0) * np.cos(t / 50.0),
        ),
        z_halfwidth=(1.0 / 30.0, 1.0 / 20.0),
        pi0=1.0 / 3.0,
        noise_kind="normal",
        noise_scale=_normal_scales(lambda k: 4.0 - 2.0 * k),
        jitter=False,
    ),
    "B": _ModelDef(
        mu=(_mu_b0, _mu_b1),
        envelope=(
            lambda t: np.sqrt(3.0 * t + 100.0),
            lambda t: np.sqrt(3.0 * t + 100.0),
        ),
        z_halfwidth=(1.0 / 60.0, 1.0 / 75.0),
        pi0=2.0 / 5.0,
        noise_kind="centered-exp",
        # multiplier applied to Exp(0.5) - 2, by version then population
        noise_scale=(
            (1.0 / 2.0, 1.0 / 4.0),
            (math.sqrt(2.0) / 2.0, math.sqrt(2.0) / 4.0),
            (1.0, 1.0 / 2.0),
        ),
        jitter=False,
    ),
    "C": _ModelDef(
        mu=(_mu_c0, _mu_c1),
        envelope=(
            lambda t: np.sqrt(3.0 * t + 100.0),
            lambda t: t + 5.0,
        ),
        z_halfwidth=(1.0 / 50.0, 1.0 / 40.0),
        pi0=2.0 / 3.0,
        noise_kind="normal",
        noise_scale=tuple(
            tuple(math.sqrt((4.0 - k) ** 2 / c) for k in (0, 1))
            for c in (100.0, 50.0, 25.0)
        ),
        jitter=False,
    ),
}
_MODELS["D"] = replace(_MODELS["A"], jitter=True)
_MODELS["E"] = replace(_MODELS["B"], jitter=True)
_MODELS["F"] = replace(_MODELS["C"], jitter=True)


def model_mean(model: str, k: int, t: np.ndarray) -> np.ndarray:
    """Mean function mu_k of a benchmark model evaluated at t."""
    return _MODELS[model].mu[k](np.asarray(t, dtype=float))


@dataclass(frozen=True)
class SimulationSpec:
    """One Monte Carlo configuration of the benchmark models."""

    model: str
    noise_version: int
    n_tr: int
    B: int
    seed: int
    n_test: int = 100
    m: int = 50
    jitter_sd: float = 0.5  # sd of the design jitter in models D-F
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.noise_version not in (1, 2, 3):
            raise ValueError("noise_version must be 1, 2 or 3")
        if self.n_tr < 6:
            raise ValueError("n_tr must be at least 6")
        if self.n_test < 1:
            raise ValueError("n_test must be at least 1")
        if self.B < 1:
            raise ValueError("B must be at least 1")

    @property
    def grid(self) -> Grid:
        return Grid(DOMAIN[0], DOMAIN[1], self.grid_points)

    @property
    def pi0(self) -> float:
        return _MODELS[self.model].pi0


@dataclass(frozen=True)
class GeneratedCurve:
    """A synthetic noisy curve plus its generating truth."""

    curve: SampledCurve
    true_label: int
    true_function: FunctionOnGrid


def _design_points(m: int) -> np.ndarray:
    # 2i - 1 for i = 1..50; the same mid-cell layout for other m.
    return (2.0 * np.arange(1, m + 1) - 1.0) * (50.0 / m)


def draw_noise(model: str, noise_version: int, k: int, stream: RandomStream, size: int):
    """Experimental errors for one curve of the given model and population."""
    mdef = _MODELS[model]
    scale = mdef.noise_scale[noise_version - 1][k]
    if mdef.noise_kind == "normal":
        return stream.normal(0.0, scale, size)
    return scale * (stream.exponential(0.5, size) - 2.0)


def _generate_curve(spec, k, index, stream, grid, prefix) -> GeneratedCurve:
    mdef = _MODELS[spec.model]
    hw = mdef.z_halfwidth[k]
    z = float(stream.uniform(-hw, hw))
    x = _design_points(spec.m)
    if mdef.jitter:
        x = x + stream.normal(0.0, spec.jitter_sd, spec.m)
        x = np.clip(x, DOMAIN[0], DOMAIN[1])
    g_at_x = mdef.mu[k](x) + mdef.envelope[k](x) * z
    y = g_at_x + draw_noise(spec.model, spec.noise_version, k, stream, spec.m)
    truth = FunctionOnGrid(
        grid, mdef.mu[k](grid.points) + mdef.envelope[k](grid.points) * z
    )
    curve = SampledCurve(id=f"{prefix}{index}", x=x, y=y, label=k)
    return GeneratedCurve(curve=curve, true_label=k, true_function=truth)


def generate_dataset(
    spec: SimulationSpec, stream: RandomStream
) -> Tuple[List[GeneratedCurve], List[GeneratedCurve]]:
    """One training sample (n_tr curves) and one test sample (n_test curves).

    Labels are Bernoulli with the model's priors. Training label vectors
    leaving fewer than 3 curves in either group are redrawn, so leave-one-out
    cross-validation is always well defined.
    """
    pi0 = spec.pi0
    grid = spec.grid
    while True:
        labels = (stream.uniform(0.0, 1.0, spec.n_tr) >= pi0).astype(int)
        if labels.sum() >= 3 and spec.n_tr - labels.sum() >= 3:
            break
    training = [
        _generate_curve(spec, int(k), i, stream, grid, "train-")
        for i, k in enumerate(labels)
    ]
    test_labels = (stream.uniform(0.0, 1.0, spec.n_test) >= pi0).astype(int)
    test = [
        _generate_curve(spec, int(k), i, stream, grid, "test-")
        for i, k in enumerate(test_labels)
    ]
    return training, test


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated Monte Carlo results of one simulation configuration."""

    spec: SimulationSpec
    strategies: Tuple[str, ...]
    classifiers: Tuple[str, ...]
    percent_correct: Dict[Tuple[str, str], float]  # (classifier, strategy)
    standard_error: Dict[Tuple[str, str], float]
    mean_selected: Dict[str, Tuple[float, float, Optional[float]]]
    mean_cv_surface: Dict[str, Dict[Tuple, float]]
    replicates_used: int
    replicates_excluded: int
    generator: str = RNG_ALGORITHM_ID

    def to_json_dict(self) -> dict:
        def surf_key(key):
            if len(key) == 3:
                return f"gamma={key[0]},gamma1={key[1]},p={key[2]}"
            return f"gamma={key[0]},gamma1={key[1]}"

        return {
            "schema": 1,
            "generator": self.generator,
            "spec": {
                "model": self.spec.model,
                "noise_version": self.spec.noise_version,
                "n_tr": self.spec.n_tr,
                "n_test": self.spec.n_test,
                "B": self.spec.B,
                "seed": self.spec.seed,
                "m": self.spec.m,
                "jitter_sd": self.spec.jitter_sd,
                "grid_points": self.spec.grid_points,
            },
            "strategies": list(self.strategies),
            "classifiers": list(self.classifiers),
            "replicates_used": self.replicates_used,
            "replicates_excluded": self.replicates_excluded,
            "percent_correct": {
                f"{kind}/{strat}": self.percent_correct[(kind, strat)]
                for kind, strat in sorted(self.percent_correct)
            },
            "standard_error": {
                f"{kind}/{strat}": self.standard_error[(kind, strat)]
                for kind, strat in sorted(self.standard_error)
            },
            "mean_selected": {
                kind: {
                    "gamma": sel[0],
                    "gamma1": sel[1],
                    "p": sel[2],
                }
                for kind, sel in sorted(self.mean_selected.items())
            },
            "mean_cv_surface": {
                kind: {surf_key(k): v for k, v in sorted(surface.items())}
                for kind, surface in sorted(self.mean_cv_surface.items())
            },
        }

    def to_tsv(self) -> str:
        cols = [
            (kind, strat)
            for kind in self.classifiers
            for strat in self.strategies
        ]
        header = ["model", "noise", "n_tr", "B"] + [
            f"{kind}_{strat}" for kind, strat in cols
        ]
        row = [
            self.spec.model,
            str(self.spec.noise_version),
            str(self.spec.n_tr),
            str(self.replicates_used),
        ] + [repr(self.percent_correct[c]) for c in cols]
        return "\t".join(header) + "\n" + "\t".join(row) + "\n"


def _smooth_group(curves, factor, grid, kernel, h_pi):
    plan = BandwidthPlan.scaled_plug_in(factor, factor)
    return [
        smooth_with_plan(gc.curve, plan, grid, "training", kernel, h_plugin=h)
        for gc, h in zip(curves, h_pi)
    ]


def _classify_test(clf: TrainedClassifier, test_fns, test_labels) -> float:
    ok = sum(
        1 for fn, lbl in zip(test_fns, test_labels) if classify(fn, clf) == lbl
    )
    return 100.0 * ok / len(test_fns)


def _qda_p_capped(p, pop0, pop1):
    return max(1, min(p, pop0.usable_rank, pop1.usable_rank))


def _run_replicate(
    spec: SimulationSpec,
    r: int,
    strategies: Sequence[str],
    kinds: Sequence[str],
    tuning: TuningConfig,
    kernel: Kernel = EPANECHNIKOV,
):
    grid = spec.grid
    stream = RandomStream(spec.seed).child(r)
    training, test = generate_dataset(spec, stream)
    train_curves = [gc.curve for gc in training]
    test_labels = [gc.true_label for gc in test]
    groups = ([gc for gc in training if gc.true_label == 0],
              [gc for gc in training if gc.true_label == 1])

    need_plugin = "pi" in strategies or "cv" in strategies
    if need_plugin:
        h_pi_train = {
            k: [plugin_bandwidth(gc.curve, kernel) for gc in groups[k]]
            for k in (0, 1)
        }
        h_pi_test = [plugin_bandwidth(gc.curve, kernel) for gc in test]
    pmax_default = max(tuning.p_grid)

    percent: Dict[Tuple[str, str], float] = {}
    selected: Dict[str, Tuple] = {}
    cv_surfaces: Dict[str, Dict[Tuple, float]] = {}

    def build_and_score(strategy, train_fns_by_group, test_fns, p_by_kind):
        pops = [
            estimate_population(train_fns_by_group[k], k, max_components=pmax_default)
            for k in (0, 1)
        ]
        for kind in kinds:
            if kind == "qda":
                p = _qda_p_capped(p_by_kind["qda"], pops[0], pops[1])
                clf = TrainedClassifier("qda", pops[0], pops[1], p=p)
            else:
                clf = TrainedClassifier(kind, pops[0], pops[1])
            percent[(kind, strategy)] = _classify_test(clf, test_fns, test_labels)

    for strategy in strategies:
        if strategy == "ns":
            train_fns = {
                k: [no_smoothing_interpolant(gc.curve, grid) for gc in groups[k]]
                for k in (0, 1)
            }
            test_fns = [no_smoothing_interpolant(gc.curve, grid) for gc in test]
            p_by_kind = {"qda": _select_p_fixed(train_fns, tuning, grid)}
            build_and_score("ns", train_fns, test_fns, p_by_kind)
        elif strategy == "pi":
            train_fns = {
                k: _smooth_group(groups[k], 1.0, grid, kernel, h_pi_train[k])
                for k in (0, 1)
            }
            plan = BandwidthPlan.plug_in()
            test_fns = [
                smooth_with_plan(gc.curve, plan, grid, "new", kernel, h_plugin=h)
                for gc, h in zip(test, h_pi_test)
            ]
            p_by_kind = {"qda": _select_p_fixed(train_fns, tuning, grid)}
            build_and_score("pi", train_fns, test_fns, p_by_kind)
        elif strategy == "cv":
            h_map = {}
            for k in (0, 1):
                for gc, h in zip(groups[k], h_pi_train[k]):
                    h_map[id(gc.curve)] = h
            surfaces, _ = cv_error_surfaces(
                train_curves, kinds, tuning, grid, kernel, h_plugin=h_map
            )
            for kind in kinds:
                surface = surfaces[kind]
                best = min(sorted(surface), key=lambda key: (surface[key], key))
                selected[kind] = best
                cv_surfaces[kind] = surface
                gamma, gamma1 = best[0], best[1]
                train_fns = {
                    k: _smooth_group(groups[k], gamma1, grid, kernel, h_pi_train[k])
                    for k in (0, 1)
                }
                plan = BandwidthPlan.scaled_plug_in(gamma, 1.0)
                test_fns = [
                    smooth_with_plan(gc.curve, plan, grid, "new", kernel, h_plugin=h)
                    for gc, h in zip(test, h_pi_test)
                ]
                pops = [
                    estimate_population(train_fns[k], k, max_components=pmax_default)
                    for k in (0, 1)
                ]
                if kind == "qda":
                    p = _qda_p_capped(best[2], pops[0], pops[1])
                    clf = TrainedClassifier("qda", pops[0], pops[1], p=p)
                else:
                    clf = TrainedClassifier(kind, pops[0], pops[1])
                percent[(kind, "cv")] = _classify_test(clf, test_fns, test_labels)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")

    return {"percent": percent, "selected": selected, "surfaces": cv_surfaces}


def _select_p_fixed(train_fns_by_group, tuning: TuningConfig, grid: Grid) -> int:
    """Choose the qda truncation by leave-one-out CV with smoothing fixed."""
    arrays = tuple(
        np.stack([f.values for f in train_fns_by_group[k]]) for k in (0, 1)
    )
    errs = cv_error_fixed_smoothing(
        arrays, arrays, ["qda"], tuning.p_grid, tuning.priors, grid
    )["qda"]
    return min(sorted(errs), key=lambda p: (errs[p], p))


def _replicate_worker(args):
    return _run_replicate(*args)


def run_experiment(
    spec: SimulationSpec,
    strategies: Sequence[str] = STRATEGIES,
    classifiers: Sequence[str] = ("centroid", "scaled-centroid", "qda"),
    tuning: Optional[TuningConfig] = None,
    workers: int = 1,
) -> ExperimentReport:
    """Monte Carlo experiment over B replicates.

    Each replicate draws fresh training and test samples from an independent
    child stream, fits every requested classifier under every smoothing
    strategy and scores percent-correct on the test sample. Replicates that
    fail with unrecoverable smoothing degeneracy are excluded; more than 5%
    exclusions is an error. Results are identical for any worker count.
    """
    for s in strategies:
        if s not in STRATEGIES:
            raise ValueError(f"unknown strategy {s!r}")
    tuning = tuning if tuning is not None else TuningConfig()
    args = [(spec, r, tuple(strategies), tuple(classifiers), tuning) for r in range(spec.B)]
    results: List[Optional[dict]] = [None] * spec.B
    failures = 0
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_replicate_worker_safe, args))
    else:
        outcomes = [_replicate_worker_safe(a) for a in args]
    for r, out in enumerate(outcomes):
        if out is None:
            failures += 1
        else:
            results[r] = out
    if failures > 0.05 * spec.B:
        raise CurveClassError(
            f"{failures} of {spec.B} replicates failed to smooth; aborting"
        )
    used = [res for res in results if res is not None]
    n_used = len(used)

    percent: Dict[Tuple[str, str], float] = {}
    se: Dict[Tuple[str, str], float] = {}
    for kind in classifiers:
        for strat in strategies:
            vals = np.array([res["percent"][(kind, strat)] for res in used])
            percent[(kind, strat)] = float(vals.mean())
            se[(kind, strat)] = (
                float(vals.std(ddof=1) / math.sqrt(n_used)) if n_used > 1 else 0.0
            )
    mean_selected: Dict[str, Tuple[float, float, Optional[float]]] = {}
    mean_cv_surface: Dict[str, Dict[Tuple, float]] = {}
    if "cv" in strategies:
        for kind in classifiers:
            sels = [res["selected"][kind] for res in used]
            g = float(np.mean([s[0] for s in sels]))
            g1 = float(np.mean([s[1] for s in sels]))
            p = float(np.mean([s[2] for s in sels])) if kind == "qda" else None
            mean_selected[kind] = (g, g1, p)
            keys = used[0]["surfaces"][kind].keys()
            mean_cv_surface[kind] = {
                key: float(np.mean([res["surfaces"][kind][key] for res in used]))
                for key in keys
            }
    return ExperimentReport(
        spec=spec,
        strategies=tuple(strategies),
        classifiers=tuple(classifiers),
        percent_correct=percent,
        standard_error=se,
        mean_selected=mean_selected,
        mean_cv_surface=mean_cv_surface,
        replicates_used=n_used,
        replicates_excluded=failures,
    )


def _replicate_worker_safe(args):
    try:
        return _run_replicate(*args)
    except CurveClassError:
        return None


@dataclass(frozen=True)
class GaussianScenario:
    """Gaussian populations with known mean and Karhunen-Loeve structure.

    ``sigma_eps0``/``sigma_eps1`` are experimental-error standard deviations;
    curves are sampled at ``m`` regular design points.
    """

    grid: Grid
    mu0: FunctionOnGrid
    mu1: FunctionOnGrid
    eigenvalues0: Tuple[float, ...]
    eigenfunctions0: Tuple[FunctionOnGrid, ...]
    eigenvalues1: Tuple[float, ...]
    eigenfunctions1: Tuple[FunctionOnGrid, ...]
    sigma_eps0: float
    sigma_eps1: float
    m: int
    pi0: float

    def eigenvalues(self, k):
        return self.eigenvalues0 if k == 0 else self.eigenvalues1

    def eigenfunctions(self, k):
        return self.eigenfunctions0 if k == 0 else self.eigenfunctions1

    def mean(self, k):
        return self.mu0 if k == 0 else self.mu1

    def design(self) -> np.ndarray:
        step = self.grid.length / self.m
        return self.grid.lower + step * (np.arange(self.m) + 0.5)

    def sample_true_function(self, k: int, stream: RandomStream) -> FunctionOnGrid:
        vals = self.mean(k).values.copy()
        thetas = self.eigenvalues(k)
        if thetas:
            z = stream.normal(0.0, 1.0, len(thetas))
            for zl, th, psi in zip(z, thetas, self.eigenfunctions(k)):
                if th > 0:
                    vals = vals + zl * math.sqrt(th) * psi.values
        return FunctionOnGrid(self.grid, vals)

    def sample_curve(self, k: int, index: int, stream: RandomStream) -> GeneratedCurve:
        g = self.sample_true_function(k, stream)
        x = self.design()
        sd = self.sigma_eps0 if k == 0 else self.sigma_eps1
        y = np.interp(x, self.grid.points, g.values)
        if sd > 0:
            y = y + stream.normal(0.0, sd, self.m)
        curve = SampledCurve(id=f"g{k}-{index}", x=x, y=y, label=k)
        return GeneratedCurve(curve=curve, true_label=k, true_function=g)


def gaussian_scenario(
    mu0: FunctionOnGrid,
    mu1: FunctionOnGrid,
    eigenpairs0: Sequence[Tuple[float, FunctionOnGrid]],
    eigenpairs1: Sequence[Tuple[float, FunctionOnGrid]],
    sigma_eps0: float,
    sigma_eps1: float,
    m: int,
    pi0: float,
) -> GaussianScenario:
    """Validated Gaussian scenario; eigenfunctions must be orthonormal under
    quadrature to 1e-6."""
    grid = mu0.grid
    for pairs in (eigenpairs0, eigenpairs1):
        funcs = [psi for _, psi in pairs]
        for th, _ in pairs:
            if th < 0:
                raise ValueError("eigenvalues must be nonnegative")
        for i, f in enumerate(funcs):
            for j in range(i, len(funcs)):
                target = 1.0 if i == j else 0.0
                if abs(inner_product(f, funcs[j]) - target) > 1e-6:
                    raise NonOrthonormalBasis(
                        f"eigenfunctions {i} and {j} fail orthonormality"
                    )
    return GaussianScenario(
        grid=grid,
        mu0=mu0,
        mu1=mu1,
        eigenvalues0=tuple(th for th, _ in eigenpairs0),
        eigenfunctions0=tuple(psi for _, psi in eigenpairs0),
        eigenvalues1=tuple(th for th, _ in eigenpairs1),
        eigenfunctions1=tuple(psi for _, psi in eigenpairs1),
        sigma_eps0=sigma_eps0,
        sigma_eps1=sigma_eps1,
        m=m,
        pi0=pi0,
    )


def bandwidth_sweep(
    scenario: GaussianScenario,
    h_grid: Sequence[float],
    h1_grid: Sequence[float],
    B: int,
    n0: int,
    n1: int,
    n_test_per_class: int,
    seed: int,
    kind: str = "centroid",
    p: Optional[int] = None,
    kernel: Kernel = EPANECHNIKOV,
) -> List[dict]:
    """Monte Carlo error surface err(h, h1) under fixed bandwidths.

    Each replicate reuses one training and test draw across every (h, h1)
    pair (common random numbers), so surface comparisons are paired.
    Returns a row per pair with the weighted error, its standard error over
    replicates, and the per-replicate errors (``errs``) so callers can form
    paired-difference statistics between rows.
    """
    if kind == "qda" and (p is None or p < 1):
        raise ValueError("qda needs a truncation parameter p >= 1")
    root = RandomStream(seed)
    pairs = [(h, h1) for h in h_grid for h1 in h1_grid]
    errs = np.zeros((B, len(pairs)))
    pi0 = scenario.pi0
    for b in range(B):
        stream = root.child(b)
        train = {
            k: [scenario.sample_curve(k, i, stream) for i in range(n0 if k == 0 else n1)]
            for k in (0, 1)
        }
        tests = {
            k: [scenario.sample_curve(k, i, stream) for i in range(n_test_per_class)]
            for k in (0, 1)
        }
        train_smooth: Dict[float, dict] = {}
        test_smooth: Dict[float, dict] = {}
        for idx, (h, h1) in enumerate(pairs):
            plan = BandwidthPlan.fixed(h=h, h1=h1)
            if h1 not in train_smooth:
                train_smooth[h1] = {
                    k: [
                        smooth_with_plan(gc.curve, plan, scenario.grid, "training", kernel)
                        for gc in train[k]
                    ]
                    for k in (0, 1)
                }
            if h not in test_smooth:
                test_smooth[h] = {
                    k: [
                        smooth_with_plan(gc.curve, plan, scenario.grid, "new", kernel)
                        for gc in tests[k]
                    ]
                    for k in (0, 1)
                }
            pops = [
                estimate_population(
                    train_smooth[h1][k], k, max_components=(p or 0)
                )
                for k in (0, 1)
            ]
            if kind == "qda":
                clf = TrainedClassifier(
                    "qda", pops[0], pops[1], p=_qda_p_capped(p, pops[0], pops[1])
                )
            else:
                clf = TrainedClassifier(kind, pops[0], pops[1])
            err_k = []
            for k in (0, 1):
                wrong = sum(
                    1 for fn in test_smooth[h][k] if classify(fn, clf) != k
                )
                err_k.append(wrong / n_test_per_class)
            errs[b, idx] = pi0 * err_k[0] + (1.0 - pi0) * err_k[1]
    rows = []
    for idx, (h, h1) in enumerate(pairs):
        col = errs[:, idx]
        se = float(col.std(ddof=1) / math.sqrt(B)) if B > 1 else 0.0
        rows.append(
            {
                "h": h,
                "h1": h1,
                "err": float(col.mean()),
                "se": se,
                "errs": tuple(float(v) for v in col),
            }
        )
    return rows
