"""Leave-one-out cross-validation of classification error and grid search
over the bandwidth scale factors (gamma, gamma1) and the truncation p."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classifiers import _qda_terms_from_pops, decide
from .errors import CurveClassError, DegenerateFit, TooFewCurves
from .numerics import FunctionOnGrid, Grid
from .population import estimate_population
from .smoothing import (
    EPANECHNIKOV,
    BandwidthPlan,
    Kernel,
    SampledCurve,
    plugin_bandwidth,
    smooth_with_plan,
)

DEFAULT_SCALE_GRID = (0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0, 3.0, 5.0)


@dataclass(frozen=True)
class TuningConfig:
    """Candidate grids for the CV search; the defaults span heavy under- to
    heavy oversmoothing around the plug-in bandwidth."""

    gamma_grid: Tuple[float, ...] = DEFAULT_SCALE_GRID
    gamma1_grid: Tuple[float, ...] = DEFAULT_SCALE_GRID
    p_grid: Tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    priors: Tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        for name in ("gamma_grid", "gamma1_grid", "p_grid"):
            g = getattr(self, name)
            if len(g) == 0:
                raise ValueError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ValueError(f"{name} must be strictly ascending")
            if g[0] <= 0:
                raise ValueError(f"{name} entries must be positive")
        if abs(self.priors[0] + self.priors[1] - 1.0) > 1e-12:
            raise ValueError("priors must sum to 1")


@dataclass(frozen=True)
class TuningResult:
    """Winning candidate of a CV grid search plus the full error surface."""

    best: Tuple
    cv_error: float
    surface: Dict[Tuple, float]
    skipped: Tuple[Tuple, ...] = ()


def _split_groups(curves: Sequence[SampledCurve]):
    groups: Tuple[List[SampledCurve], List[SampledCurve]] = ([], [])
    for c in curves:
        if c.label not in (0, 1):
            raise ValueError(f"curve {c.id!r} has no 0/1 label")
        groups[c.label].append(c)
    if len(groups[0]) < 3 or len(groups[1]) < 3:
        raise TooFewCurves(
            "leave-one-out needs at least 3 curves per population, got "
            f"{len(groups[0])} and {len(groups[1])}"
        )
    return groups


class _SmoothCache:
    """Smooths each curve at factor * h_plugin, caching by factor."""

    def __init__(self, curves, grid, kernel, h_plugin):
        self.curves = curves
        self.grid = grid
        self.kernel = kernel
        self.h_plugin = h_plugin
        self._by_factor: Dict[float, np.ndarray] = {}
        self.bad_factors: set = set()

    def get(self, factor: float) -> Optional[np.ndarray]:
        """(n, n_grid) array of smoothed curves, or None if some curve is
        degenerate at this factor even after bandwidth escalation."""
        if factor in self.bad_factors:
            return None
        cached = self._by_factor.get(factor)
        if cached is not None:
            return cached
        plan = BandwidthPlan.scaled_plug_in(gamma=factor, gamma1=factor)
        rows = []
        try:
            for c, h in zip(self.curves, self.h_plugin):
                rows.append(
                    smooth_with_plan(
                        c, plan, self.grid, "training", self.kernel, h_plugin=h
                    ).values
                )
        except DegenerateFit:
            self.bad_factors.add(factor)
            return None
        arr = np.stack(rows)
        self._by_factor[factor] = arr
        return arr


def _rank_cap(full_pop, fold_pop) -> int:
    return min(
        min(p.usable_rank for p in fold_pop[0] + fold_pop[1]),
        full_pop[0].usable_rank,
        full_pop[1].usable_rank,
    )


def _loo_weighted_errors(
    tests, kinds, p_grid, priors, grid, full_pop, fold_pop, rank_cap
):
    """One leave-one-out pass: weighted error per kind, per-p array for qda.

    ``tests`` holds the held-out versions of the training curves (per group,
    row i matching fold i); ``fold_pop[k][i]`` is population k re-estimated
    without curve i and ``full_pop`` the full-sample estimates.
    """
    pmax = max(p_grid) if "qda" in kinds else 0
    n = (len(fold_pop[0]), len(fold_pop[1]))
    wrong = {kind: 0.0 for kind in kinds}
    wrong_qda = np.zeros(len(p_grid)) if pmax else None
    w = grid.trapezoid_weights
    for k in (0, 1):
        other = full_pop[1 - k]
        for i in range(n[k]):
            vals = tests[k][i]
            held = fold_pop[k][i]
            pops = (held, other) if k == 0 else (other, held)
            if "centroid" in kinds or "scaled-centroid" in kinds:
                d0 = vals - pops[0].mean.values
                d1 = vals - pops[1].mean.values
                q0 = float(w @ (d0 * d0))
                q1 = float(w @ (d1 * d1))
                if "centroid" in kinds:
                    if decide(q0 - q1) != k:
                        wrong["centroid"] += priors[k] / n[k]
                if "scaled-centroid" in kinds:
                    s0 = pops[0].scale_sq
                    s1 = pops[1].scale_sq
                    sc = q0 / s0 - q1 / s1 + float(np.log(s0 / s1))
                    if decide(sc) != k:
                        wrong["scaled-centroid"] += priors[k] / n[k]
            if pmax:
                p_eff = max(1, min(rank_cap, pmax))
                terms = _qda_terms_from_pops(vals, pops[0], pops[1], p_eff)
                cum = np.cumsum(terms)
                for j, p in enumerate(p_grid):
                    sc = cum[min(p, p_eff) - 1]
                    if decide(float(sc)) != k:
                        wrong_qda[j] += priors[k] / n[k]
    return wrong, wrong_qda


def cv_error_fixed_smoothing(
    trains: Tuple[np.ndarray, np.ndarray],
    tests: Tuple[np.ndarray, np.ndarray],
    kinds: Sequence[str],
    p_grid: Sequence[int],
    priors: Tuple[float, float],
    grid: Grid,
) -> Dict[str, object]:
    """Leave-one-out CV errors when the smoothing is already fixed.

    ``trains[k]`` is the (n_k, n_grid) array of smoothed training curves of
    population k and ``tests[k]`` the held-out versions of the same curves
    (identical to ``trains[k]`` when training and new curves share one
    bandwidth). Returns a float per non-qda kind and a dict p -> error for
    qda.
    """
    for k in (0, 1):
        if trains[k].shape[0] < 3:
            raise TooFewCurves(
                "leave-one-out needs at least 3 curves per population"
            )
    pmax = max(p_grid) if "qda" in kinds else 0
    full_pop = []
    fold_pop = []
    for k in (0, 1):
        fog = [FunctionOnGrid(grid, row) for row in trains[k]]
        full_pop.append(estimate_population(fog, k, max_components=pmax))
        fold_pop.append(
            [
                estimate_population(fog[:i] + fog[i + 1 :], k, max_components=pmax)
                for i in range(len(fog))
            ]
        )
    rank_cap = _rank_cap(full_pop, fold_pop) if pmax else 0
    wrong, wrong_qda = _loo_weighted_errors(
        [tests[0], tests[1]], kinds, p_grid, priors, grid,
        full_pop, fold_pop, rank_cap,
    )
    out: Dict[str, object] = {}
    for kind in kinds:
        if kind == "qda":
            out["qda"] = {p: float(wrong_qda[j]) for j, p in enumerate(p_grid)}
        else:
            out[kind] = wrong[kind]
    return out


def cv_error_surfaces(
    curves: Sequence[SampledCurve],
    kinds: Sequence[str],
    config: TuningConfig,
    grid: Grid,
    kernel: Kernel = EPANECHNIKOV,
    h_plugin: Optional[Dict[int, float]] = None,
):
    """Leave-one-out CV error surfaces for several classifier kinds at once.

    Returns ``(surfaces, skipped)`` where ``surfaces[kind]`` maps
    (gamma, gamma1) -- or (gamma, gamma1, p) for qda -- to the weighted CV
    error, and ``skipped`` lists (gamma, gamma1) pairs dropped because some
    curve could not be smoothed there.

    For each held-out curve the affected population is re-estimated from
    scratch; the other population keeps its full-sample estimate. Training
    curves use factor gamma1, the held-out curve its own factor gamma.
    """
    for kind in kinds:
        if kind not in ("centroid", "scaled-centroid", "qda"):
            raise ValueError(f"unknown classifier kind {kind!r}")
    groups = _split_groups(curves)
    n = (len(groups[0]), len(groups[1]))
    pri = config.priors
    pmax = max(config.p_grid) if "qda" in kinds else 0

    caches = []
    for k in (0, 1):
        if h_plugin is None:
            h_pi = [plugin_bandwidth(c, kernel) for c in groups[k]]
        else:
            h_pi = [h_plugin[id(c)] for c in groups[k]]
        caches.append(_SmoothCache(groups[k], grid, kernel, h_pi))

    surfaces: Dict[str, Dict[Tuple, float]] = {kind: {} for kind in kinds}
    skipped: List[Tuple] = []

    for gamma1 in config.gamma1_grid:
        trains = [caches[k].get(gamma1) for k in (0, 1)]
        if trains[0] is None or trains[1] is None:
            skipped.extend((g, gamma1) for g in config.gamma_grid)
            continue
        full_pop = []
        fold_pop = []
        for k in (0, 1):
            fog = [FunctionOnGrid(grid, row) for row in trains[k]]
            full_pop.append(estimate_population(fog, k, max_components=pmax))
            fold_pop.append(
                [
                    estimate_population(fog[:i] + fog[i + 1 :], k, max_components=pmax)
                    for i in range(n[k])
                ]
            )
        rank_cap = _rank_cap(full_pop, fold_pop) if pmax else 0
        for gamma in config.gamma_grid:
            tests = [caches[k].get(gamma) for k in (0, 1)]
            if tests[0] is None or tests[1] is None:
                skipped.append((gamma, gamma1))
                continue
            wrong, wrong_qda = _loo_weighted_errors(
                tests, kinds, config.p_grid, pri, grid,
                full_pop, fold_pop, rank_cap,
            )
            for kind in kinds:
                if kind == "qda":
                    for j, p in enumerate(config.p_grid):
                        surfaces["qda"][(gamma, gamma1, p)] = wrong_qda[j]
                else:
                    surfaces[kind][(gamma, gamma1)] = wrong[kind]
    for kind in kinds:
        if not surfaces[kind]:
            raise CurveClassError("every tuning candidate failed to smooth")
    return surfaces, tuple(skipped)


def cv_error(
    curves: Sequence[SampledCurve],
    kind: str,
    gamma: float,
    gamma1: float,
    p: Optional[int] = None,
    grid: Optional[Grid] = None,
    priors: Tuple[float, float] = (0.5, 0.5),
    kernel: Kernel = EPANECHNIKOV,
) -> float:
    """Leave-one-out CV estimate of weighted classification error for one
    (gamma, gamma1[, p]) candidate."""
    if grid is None:
        raise ValueError("grid is required")
    config = TuningConfig(
        gamma_grid=(gamma,),
        gamma1_grid=(gamma1,),
        p_grid=(p,) if p is not None else (1,),
        priors=priors,
    )
    if kind == "qda" and p is None:
        raise ValueError("qda needs a truncation parameter p")
    surfaces, _ = cv_error_surfaces(curves, [kind], config, grid, kernel)
    key = (gamma, gamma1, p) if kind == "qda" else (gamma, gamma1)
    try:
        return surfaces[kind][key]
    except KeyError:
        raise CurveClassError("candidate failed to smooth") from None


def select_tuning(
    curves: Sequence[SampledCurve],
    kind: str,
    config: TuningConfig,
    grid: Grid,
    kernel: Kernel = EPANECHNIKOV,
    h_plugin: Optional[Dict[int, float]] = None,
) -> TuningResult:
    """Exhaustive CV search over the candidate grids.

    Ties break toward the smallest gamma, then gamma1, then p.
    """
    surfaces, skipped = cv_error_surfaces(
        curves, [kind], config, grid, kernel, h_plugin
    )
    surface = surfaces[kind]
    best_key = None
    best_err = np.inf
    for key in sorted(surface):
        if surface[key] < best_err:
            best_key = key
            best_err = surface[key]
    return TuningResult(
        best=best_key, cv_error=best_err, surface=surface, skipped=skipped
    )
