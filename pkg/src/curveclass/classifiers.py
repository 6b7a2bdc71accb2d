"""Centroid, scaled-centroid and quadratic discriminant scores and rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import GridMismatch, NonFiniteScore, RankDeficient, ZeroScale
from .numerics import FunctionOnGrid
from .population import EIGENVALUE_FLOOR_REL, PopulationEstimate

KINDS = ("centroid", "scaled-centroid", "qda")


@dataclass(frozen=True)
class TrainedClassifier:
    """A classifier kind plus the two plugged-in population estimates."""

    kind: str
    pop0: PopulationEstimate
    pop1: PopulationEstimate
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.pop0.grid != self.pop1.grid:
            raise GridMismatch("populations must share a grid")
        if self.kind == "qda":
            if self.p is None or self.p < 1:
                raise ValueError("qda requires a truncation parameter p >= 1")
            for pop in (self.pop0, self.pop1):
                if self.p > pop.usable_rank:
                    raise RankDeficient(pop.k, pop.usable_rank + 1)


def _check_grid(g: FunctionOnGrid, c: TrainedClassifier):
    if g.grid != c.pop0.grid:
        raise GridMismatch("curve grid differs from classifier grid")


def centroid_score(g: FunctionOnGrid, c: TrainedClassifier) -> float:
    """int (g - mu0)^2 - int (g - mu1)^2; negative favors population 0."""
    _check_grid(g, c)
    w = g.grid.trapezoid_weights
    d0 = g.values - c.pop0.mean.values
    d1 = g.values - c.pop1.mean.values
    return float(w @ (d0 * d0) - w @ (d1 * d1))


def scaled_centroid_score(g: FunctionOnGrid, c: TrainedClassifier) -> float:
    """Centroid distances reweighted by the population scales s_k^2, plus
    the log-ratio penalty log(s0^2 / s1^2)."""
    _check_grid(g, c)
    s0 = c.pop0.scale_sq
    s1 = c.pop1.scale_sq
    if min(s0, s1) <= 1e-12 * max(s0, s1) or max(s0, s1) <= 0:
        raise ZeroScale("population scale estimate is numerically zero")
    w = g.grid.trapezoid_weights
    d0 = g.values - c.pop0.mean.values
    d1 = g.values - c.pop1.mean.values
    return float(
        (w @ (d0 * d0)) / s0 - (w @ (d1 * d1)) / s1 + math.log(s0 / s1)
    )


def _qda_terms_from_pops(values, pop0, pop1, p) -> np.ndarray:
    w = pop0.grid.trapezoid_weights
    d0 = (values - pop0.mean.values) * w
    d1 = (values - pop1.mean.values) * w
    terms = np.empty(p)
    for ell in range(p):
        a0 = float(d0 @ pop0.eigenfunctions[ell].values)
        a1 = float(d1 @ pop1.eigenfunctions[ell].values)
        t0 = pop0.eigenvalues[ell]
        t1 = pop1.eigenvalues[ell]
        terms[ell] = a0 * a0 / t0 - a1 * a1 / t1 + math.log(t0 / t1)
    return terms


def qda_terms(g: FunctionOnGrid, c: TrainedClassifier) -> np.ndarray:
    """Per-component bracketed terms of the quadratic discriminant; the
    score for truncation p' <= p is the sum of the first p' entries."""
    _check_grid(g, c)
    if c.kind != "qda":
        raise ValueError("classifier kind must be 'qda'")
    return _qda_terms_from_pops(g.values, c.pop0, c.pop1, c.p)


def qda_score(g: FunctionOnGrid, c: TrainedClassifier) -> float:
    """Quadratic discriminant score truncated at the classifier's p."""
    return float(qda_terms(g, c).sum())


@dataclass(frozen=True)
class TruePopulation:
    """Analytically known mean and eigenstructure of one population."""

    mean: FunctionOnGrid
    eigenvalues: np.ndarray
    eigenfunctions: Sequence[FunctionOnGrid]

    @property
    def grid(self):
        return self.mean.grid


def oracle_qda_score(
    g: FunctionOnGrid, truth0: TruePopulation, truth1: TruePopulation, p: int
) -> float:
    """Quadratic discriminant evaluated with the true population laws."""
    if g.grid != truth0.grid or g.grid != truth1.grid:
        raise GridMismatch("curve grid differs from the supplied laws")
    if p < 1:
        raise ValueError("p must be >= 1")
    for k, truth in enumerate((truth0, truth1)):
        if p > len(truth.eigenfunctions):
            raise RankDeficient(k, len(truth.eigenfunctions) + 1)
        lead = truth.eigenvalues[0]
        if truth.eigenvalues[p - 1] <= EIGENVALUE_FLOOR_REL * lead:
            raise RankDeficient(k, p)
    return float(_qda_terms_from_pops(g.values, truth0, truth1, p).sum())


def decide(score: float) -> int:
    """Label 0 iff score <= 0 (ties go to population 0)."""
    if not math.isfinite(score):
        raise NonFiniteScore(f"score is {score!r}")
    return 0 if score <= 0 else 1


def score(g: FunctionOnGrid, c: TrainedClassifier) -> float:
    """Score ``g`` with whichever statistic the classifier uses."""
    if c.kind == "centroid":
        return centroid_score(g, c)
    if c.kind == "scaled-centroid":
        return scaled_centroid_score(g, c)
    return qda_score(g, c)


def classify(g: FunctionOnGrid, c: TrainedClassifier) -> int:
    return decide(score(g, c))
