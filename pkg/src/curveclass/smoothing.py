"""Local linear kernel smoothing of raw curves onto a grid.

Covers the per-curve plug-in bandwidth rule (direct plug-in with a blocked
quartic pilot), scaled-bandwidth plans and the no-smoothing interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateFit, DegeneratePilot, InsufficientData
from .numerics import FunctionOnGrid, Grid

# Relative threshold below which the local linear denominator counts as
# singular (fewer than two distinct design points carry kernel weight).
_DEGENERACY_RTOL = 1e-12

#: Bandwidth-doubling attempts before a degenerate fit is surfaced.
_ESCALATION_TRIES = 6


@dataclass(frozen=True)
class Kernel:
    """Symmetric probability-density kernel supported on [-1, 1]."""

    name: str
    kappa2: float  # second moment, int u^2 K(u) du
    kappa: float  # roughness, int K(u)^2 du

    def weights(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def moment(self, ell: int) -> float:
        raise NotImplementedError


class _Epanechnikov(Kernel):
    def __init__(self):
        super().__init__(name="epanechnikov", kappa2=1.0 / 5.0, kappa=3.0 / 5.0)

    def weights(self, u: np.ndarray) -> np.ndarray:
        return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)

    def moment(self, ell: int) -> float:
        # int u^ell * 3/4 (1 - u^2) du over [-1, 1]
        if ell % 2 == 1:
            return 0.0
        return 3.0 / ((ell + 1) * (ell + 3))


EPANECHNIKOV: Kernel = _Epanechnikov()


def kernel_moments(kernel: Kernel = EPANECHNIKOV) -> Tuple[float, float]:
    """Return (kappa2, kappa) for the kernel."""
    return kernel.kappa2, kernel.kappa


@dataclass(frozen=True)
class SampledCurve:
    """One individual's raw observations {(x_i, y_i)}."""

    id: str
    x: np.ndarray
    y: np.ndarray
    label: Optional[int] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if x.size < 2:
            raise ValueError("a curve needs at least 2 points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("curve observations must be finite")
        if self.label is not None and self.label not in (0, 1):
            raise ValueError("label must be 0, 1 or None")
        x = x.copy()
        y = y.copy()
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_points(self) -> int:
        return self.x.size

    @classmethod
    def from_points(cls, id, points, label=None) -> "SampledCurve":
        pts = np.asarray(points, dtype=float)
        return cls(id=id, x=pts[:, 0], y=pts[:, 1], label=label)


@dataclass(frozen=True)
class BandwidthPlan:
    """How to turn raw curves into grid functions.

    Modes: ``plug-in`` (per-curve direct plug-in bandwidth),
    ``scaled-plug-in`` (plug-in times gamma for new curves, gamma1 for
    training curves), ``fixed`` (explicit h for new curves, h1 for training
    curves) and ``no-smoothing`` (piecewise-linear interpolant).
    """

    mode: str
    gamma: float = 1.0
    gamma1: float = 1.0
    h: Optional[float] = None
    h1: Optional[float] = None

    _MODES = ("plug-in", "scaled-plug-in", "fixed", "no-smoothing")

    def __post_init__(self):
        if self.mode not in self._MODES:
            raise ValueError(f"unknown bandwidth mode {self.mode!r}")
        if self.mode == "scaled-plug-in" and not (self.gamma > 0 and self.gamma1 > 0):
            raise ValueError("scale factors must be strictly positive")
        if self.mode == "fixed":
            if self.h is None or self.h1 is None or self.h <= 0 or self.h1 <= 0:
                raise ValueError("fixed mode requires h > 0 and h1 > 0")

    @classmethod
    def plug_in(cls) -> "BandwidthPlan":
        return cls(mode="plug-in")

    @classmethod
    def scaled_plug_in(cls, gamma: float, gamma1: float) -> "BandwidthPlan":
        return cls(mode="scaled-plug-in", gamma=gamma, gamma1=gamma1)

    @classmethod
    def fixed(cls, h: float, h1: float) -> "BandwidthPlan":
        return cls(mode="fixed", h=h, h1=h1)

    @classmethod
    def no_smoothing(cls) -> "BandwidthPlan":
        return cls(mode="no-smoothing")


def local_linear_fit(
    curve: SampledCurve,
    h: float,
    grid: Grid,
    kernel: Kernel = EPANECHNIKOV,
) -> FunctionOnGrid:
    """Local linear regression of the curve's points, evaluated on the grid.

    At each grid point x the estimate is
    (U2 V0 - U1 V1) / (U2 U0 - U1^2) with moment sums
    U_l = m^-1 sum ((x - X_i)/h)^l K_h(x - X_i) and
    V_l = m^-1 sum Y_i ((x - X_i)/h)^l K_h(x - X_i).

    Raises :class:`DegenerateFit` at the first grid point whose kernel
    window does not contain two distinct design points.
    """
    if not h > 0:
        raise ValueError("bandwidth must be strictly positive")
    x = grid.points
    u = (x[:, None] - curve.x[None, :]) / h
    k = kernel.weights(u) / h  # K_h(x - X_i)
    m = curve.n_points
    u0 = k.sum(axis=1) / m
    uk = u * k
    u1 = uk.sum(axis=1) / m
    u2 = (u * uk).sum(axis=1) / m
    v0 = (k @ curve.y) / m
    v1 = (uk @ curve.y) / m
    denom = u2 * u0 - u1 * u1
    bad = denom <= _DEGENERACY_RTOL * u0 * u0
    if np.any(bad):
        raise DegenerateFit(float(x[np.argmax(bad)]))
    return FunctionOnGrid(grid, (u2 * v0 - u1 * v1) / denom)


def _blocked_quartic_pilot(xs, ys, n_blocks):
    """Blocked quartic OLS pilot: residual sum of squares and curvature sum."""
    edges = np.array_split(np.arange(xs.size), n_blocks)
    rss = 0.0
    curv_sq = 0.0
    for idx in edges:
        bx = xs[idx]
        by = ys[idx]
        z = bx - bx.mean()  # centered for conditioning
        design = np.vander(z, 5, increasing=True)
        coef, _, rank, _ = np.linalg.lstsq(design, by, rcond=None)
        if rank < 5:
            raise DegeneratePilot("singular quartic pilot design")
        fit = design @ coef
        rss += float(((by - fit) ** 2).sum())
        dd = 2.0 * coef[2] + 6.0 * coef[3] * z + 12.0 * coef[4] * z * z
        curv_sq += float((dd * dd).sum())
    return rss, curv_sq


def plugin_bandwidth(
    curve: SampledCurve,
    kernel: Kernel = EPANECHNIKOV,
    max_blocks: int = 5,
) -> float:
    """Direct plug-in regression bandwidth for this curve.

    A blocked quartic pilot (block count chosen by Mallows Cp over
    1..max_blocks) supplies the curvature functional int g''^2 and the error
    variance; the returned bandwidth is
    [kappa sigma^2 |I| / (kappa2^2 theta22 m)]^(1/5),
    capped into [2 * median x-gap, |I| / 2].
    """
    m = curve.n_points
    if m < 10:
        raise InsufficientData(f"plug-in bandwidth needs >= 10 points, got {m}")
    order = np.argsort(curve.x, kind="stable")
    xs = curve.x[order]
    ys = curve.y[order]
    span = float(xs[-1] - xs[0])
    if span <= 0:
        raise DegeneratePilot("all design points coincide")
    gaps = np.diff(xs)
    h_lo = 2.0 * float(np.median(gaps[gaps > 0])) if np.any(gaps > 0) else span / m
    h_hi = span / 2.0
    if h_lo > h_hi:
        h_lo = h_hi

    # Candidate block counts need >= 6 points per block and residual df.
    candidates = [
        nb
        for nb in range(1, max_blocks + 1)
        if m // nb >= 6 and m - 5 * nb >= 2
    ]
    if not candidates:
        candidates = [1]
    fits = {}
    for nb in candidates:
        try:
            fits[nb] = _blocked_quartic_pilot(xs, ys, nb)
        except DegeneratePilot:
            continue
    if not fits:
        return h_hi  # oversmoothed fallback
    nb_max = max(fits)
    rss_max, _ = fits[nb_max]
    sigma_sq_max = rss_max / (m - 5 * nb_max)
    if sigma_sq_max > 0:
        def cp(nb):
            rss, _ = fits[nb]
            return rss / sigma_sq_max - (m - 10 * nb)

        nb_best = min(fits, key=lambda nb: (cp(nb), nb))
    else:
        nb_best = nb_max
    rss, curv_sq = fits[nb_best]
    sigma_sq = rss / (m - 5 * nb_best)
    theta22 = curv_sq / m
    # Floors are relative to the data scale so that exact (noise-free or
    # curvature-free) inputs resolve to the caps instead of amplifying
    # least-squares roundoff through the 1/5-power ratio.
    y_scale = float(np.max(np.abs(ys - np.mean(ys)))) or 1.0
    if theta22 <= (1e-9 * y_scale / span**2) ** 2:
        return h_hi  # curvature-free limit: oversmoothed cap
    if sigma_sq <= (1e-9 * y_scale) ** 2:
        return h_lo
    kappa2, kappa = kernel.kappa2, kernel.kappa
    h = (kappa * sigma_sq * span / (kappa2**2 * theta22 * m)) ** 0.2
    return float(min(max(h, h_lo), h_hi))


def no_smoothing_interpolant(curve: SampledCurve, grid: Grid) -> FunctionOnGrid:
    """Piecewise-linear interpolant of the raw points on the grid.

    Points are sorted by x, y values at duplicate x are averaged, and the
    interpolant extends constantly beyond the data range.
    """
    order = np.argsort(curve.x, kind="stable")
    xs = curve.x[order]
    ys = curve.y[order]
    ux, inv = np.unique(xs, return_inverse=True)
    sums = np.zeros(ux.size)
    counts = np.zeros(ux.size)
    np.add.at(sums, inv, ys)
    np.add.at(counts, inv, 1.0)
    uy = sums / counts
    return FunctionOnGrid(grid, np.interp(grid.points, ux, uy))


def smooth_with_plan(
    curve: SampledCurve,
    plan: BandwidthPlan,
    grid: Grid,
    role: str,
    kernel: Kernel = EPANECHNIKOV,
    h_plugin: Optional[float] = None,
) -> FunctionOnGrid:
    """Smooth one curve according to a bandwidth plan.

    ``role`` is ``"new"`` for the curve being classified and ``"training"``
    for training curves; it selects between (gamma, h) and (gamma1, h1).
    ``h_plugin`` can supply a precomputed plug-in bandwidth for the curve.
    On a degenerate fit the bandwidth is doubled up to six times before the
    error propagates.
    """
    if role not in ("new", "training"):
        raise ValueError("role must be 'new' or 'training'")
    if plan.mode == "no-smoothing":
        return no_smoothing_interpolant(curve, grid)
    if plan.mode == "fixed":
        h = plan.h if role == "new" else plan.h1
    else:
        h = h_plugin if h_plugin is not None else plugin_bandwidth(curve, kernel)
        if plan.mode == "scaled-plug-in":
            h *= plan.gamma if role == "new" else plan.gamma1
    last = None
    for attempt in range(_ESCALATION_TRIES + 1):
        try:
            return local_linear_fit(curve, h * 2.0**attempt, grid, kernel)
        except DegenerateFit as exc:
            last = exc
    raise last
