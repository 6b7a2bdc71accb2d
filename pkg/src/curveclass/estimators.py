"""Scikit-learn style estimator wrapping smoothing, tuning and classification."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .classifiers import KINDS, TrainedClassifier, decide
from .classifiers import score as score_fn
from .numerics import Grid
from .population import estimate_population
from .smoothing import (
    EPANECHNIKOV,
    BandwidthPlan,
    SampledCurve,
    no_smoothing_interpolant,
    plugin_bandwidth,
    smooth_with_plan,
)
from .tuning import TuningConfig, cv_error_fixed_smoothing, select_tuning

_STRATEGIES = ("cv", "pi", "ns")


def _as_curves(X, y=None) -> Sequence[SampledCurve]:
    curves = list(X)
    for c in curves:
        if not isinstance(c, SampledCurve):
            raise ValueError("X must be a sequence of SampledCurve objects")
    if y is None:
        return curves
    y = np.asarray(y)
    if y.shape != (len(curves),):
        raise ValueError("y must have one label per curve")
    return [
        SampledCurve(id=c.id, x=c.x, y=c.y, label=int(lbl))
        for c, lbl in zip(curves, y)
    ]


class CurveClassifier(BaseEstimator, ClassifierMixin):
    """Binary classifier for discretely sampled noisy curves.

    Parameters
    ----------
    kind : str
        One of ``"centroid"``, ``"scaled-centroid"`` or ``"qda"``.
    strategy : str
        Smoothing strategy: ``"cv"`` tunes bandwidth scale factors (and the
        qda truncation) by leave-one-out cross-validation, ``"pi"`` uses the
        per-curve plug-in bandwidths unscaled, ``"ns"`` skips smoothing and
        interpolates.
    gamma, gamma1 : float, optional
        Explicit scale factors on the plug-in bandwidth for new and training
        curves; only valid with ``strategy="pi"``.
    p : int, optional
        Truncation for the quadratic discriminant. When omitted under
        ``"pi"``/``"ns"`` it is chosen by cross-validation with the
        smoothing fixed.
    grid_points : int
        Resolution of the internal function grid.
    grid_range : tuple, optional
        (lower, upper) of the grid; defaults to the span of the training
        designs.
    tuning : TuningConfig, optional
        Candidate grids for the cross-validated search.

    Attributes
    ----------
    classifier_ : TrainedClassifier
        The fitted populations and decision rule.
    tuning_result_ : TuningResult or None
        Search details when ``strategy="cv"``.
    """

    def __init__(
        self,
        kind: str = "centroid",
        strategy: str = "pi",
        gamma: Optional[float] = None,
        gamma1: Optional[float] = None,
        p: Optional[int] = None,
        grid_points: int = 251,
        grid_range: Optional[tuple] = None,
        tuning: Optional[TuningConfig] = None,
    ):
        self.kind = kind
        self.strategy = strategy
        self.gamma = gamma
        self.gamma1 = gamma1
        self.p = p
        self.grid_points = grid_points
        self.grid_range = grid_range
        self.tuning = tuning

    def _validate_params_(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy != "pi" and (self.gamma is not None or self.gamma1 is not None):
            raise ValueError("explicit gamma/gamma1 require strategy='pi'")
        if self.strategy == "cv" and self.p is not None:
            raise ValueError("p is chosen by CV under strategy='cv'")

    def _grid(self, curves) -> Grid:
        if self.grid_range is not None:
            lo, hi = self.grid_range
        else:
            lo = min(float(c.x.min()) for c in curves)
            hi = max(float(c.x.max()) for c in curves)
        return Grid(lo, hi, self.grid_points)

    def fit(self, X, y=None) -> "CurveClassifier":
        """Fit from labeled curves.

        ``X`` is a sequence of :class:`SampledCurve`; labels come from ``y``
        or, when ``y`` is None, from each curve's own label field.
        """
        self._validate_params_()
        curves = _as_curves(X, y)
        for c in curves:
            if c.label is None:
                raise ValueError(f"training curve {c.id!r} is unlabeled")
        grid = self._grid(curves)
        tuning = self.tuning if self.tuning is not None else TuningConfig()
        groups = ([c for c in curves if c.label == 0],
                  [c for c in curves if c.label == 1])
        if min(len(groups[0]), len(groups[1])) < 2:
            raise ValueError("each population needs at least 2 training curves")

        p = self.p
        tuning_result = None
        if self.strategy == "ns":
            train_fns = {
                k: [no_smoothing_interpolant(c, grid) for c in groups[k]]
                for k in (0, 1)
            }
            self._test_plan_ = BandwidthPlan.no_smoothing()
        elif self.strategy == "pi":
            gamma = self.gamma if self.gamma is not None else 1.0
            gamma1 = self.gamma1 if self.gamma1 is not None else 1.0
            plan = BandwidthPlan.scaled_plug_in(gamma, gamma1)
            train_fns = {
                k: [smooth_with_plan(c, plan, grid, "training") for c in groups[k]]
                for k in (0, 1)
            }
            self._test_plan_ = plan
        else:
            result = select_tuning(curves, self.kind, tuning, grid)
            tuning_result = result
            gamma, gamma1 = result.best[0], result.best[1]
            if self.kind == "qda":
                p = result.best[2]
            plan = BandwidthPlan.scaled_plug_in(gamma, gamma1)
            train_fns = {
                k: [smooth_with_plan(c, plan, grid, "training") for c in groups[k]]
                for k in (0, 1)
            }
            self._test_plan_ = plan
        if self.kind == "qda" and p is None:
            arrays = tuple(
                np.stack([f.values for f in train_fns[k]]) for k in (0, 1)
            )
            errs = cv_error_fixed_smoothing(
                arrays, arrays, ["qda"], tuning.p_grid, tuning.priors, grid
            )["qda"]
            p = min(sorted(errs), key=lambda q: (errs[q], q))

        pmax = max(tuning.p_grid) if self.kind == "qda" else 0
        pops = [
            estimate_population(train_fns[k], k, max_components=pmax)
            for k in (0, 1)
        ]
        if self.kind == "qda":
            p = max(1, min(p, pops[0].usable_rank, pops[1].usable_rank))
            self.p_ = p
            self.classifier_ = TrainedClassifier("qda", pops[0], pops[1], p=p)
        else:
            self.p_ = None
            self.classifier_ = TrainedClassifier(self.kind, pops[0], pops[1])
        self.grid_ = grid
        self.tuning_result_ = tuning_result
        self.classes_ = np.array([0, 1])
        return self

    def _check_fitted(self):
        if not hasattr(self, "classifier_"):
            raise NotFittedError("fit must be called before prediction")

    def _smooth_new(self, curve: SampledCurve):
        if self._test_plan_.mode == "no-smoothing":
            return no_smoothing_interpolant(curve, self.grid_)
        h = plugin_bandwidth(curve)
        return smooth_with_plan(
            curve, self._test_plan_, self.grid_, "new", EPANECHNIKOV, h_plugin=h
        )

    def decision_function(self, X) -> np.ndarray:
        """Classifier scores; negative or zero favors population 0."""
        self._check_fitted()
        curves = _as_curves(X)
        return np.array(
            [score_fn(self._smooth_new(c), self.classifier_) for c in curves]
        )

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        return np.array([decide(s) for s in self.decision_function(X)])
