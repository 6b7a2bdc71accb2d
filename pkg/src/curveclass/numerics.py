"""Uniform grids, trapezoid quadrature, symmetric eigensolver and seeded RNG.

Everything downstream represents functions as values on a shared uniform
grid; integrals are trapezoid sums and the covariance eigenproblem is a
dense symmetric one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import ConvergenceFailure, GridMismatch

#: Identifier of the random stream recorded in reports. PCG64 is the
#: underlying bit generator; normals come from a Box-Muller transform of its
#: uniforms and exponentials from inverse-cdf, so the whole draw sequence is
#: fixed by the seed alone.
RNG_ALGORITHM_ID = "pcg64/boxmuller-invcdf-v1"


@dataclass(frozen=True)
class Grid:
    """Equally spaced points on [lower, upper], endpoints included."""

    lower: float
    upper: float
    n_points: int
    _points: np.ndarray = field(init=False, repr=False, compare=False)
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("grid needs at least 2 points")
        if not (self.upper > self.lower):
            raise ValueError("grid upper bound must exceed lower bound")
        pts = np.linspace(self.lower, self.upper, self.n_points)
        pts.setflags(write=False)
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.setflags(write=False)
        object.__setattr__(self, "_points", pts)
        object.__setattr__(self, "_weights", w)

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights spacing * (1/2, 1, ..., 1, 1/2)."""
        return self._weights


@dataclass(frozen=True)
class FunctionOnGrid:
    """A function discretized on a uniform grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "FunctionOnGrid":
        return cls(grid, np.asarray(fn(grid.points), dtype=float))


def integrate(f: FunctionOnGrid) -> float:
    """Trapezoid-rule integral of ``f`` over its grid interval."""
    return float(f.grid.trapezoid_weights @ f.values)


def inner_product(f: FunctionOnGrid, g: FunctionOnGrid) -> float:
    """Trapezoid-rule value of the L2 inner product of ``f`` and ``g``."""
    if f.grid != g.grid:
        raise GridMismatch("inner_product requires identical grids")
    return float(f.grid.trapezoid_weights @ (f.values * g.values))


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense symmetric matrix; only the lower triangle of the input is used,
    so stored entries satisfy entries[i, j] == entries[j, i] exactly."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("entries must be a square matrix of dim >= 1")
        lower = np.tril(a)
        sym = lower + lower.T - np.diag(np.diag(a))
        sym.setflags(write=False)
        object.__setattr__(self, "entries", sym)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def symmetric_eigen(m: SymmetricMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns).

    Each eigenvector is scaled so that its entry of largest absolute value
    is positive, which makes the decomposition deterministic.
    """
    try:
        lam, vec = np.linalg.eigh(m.entries)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vec = vec[:, order]
    idx = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[idx, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    vec = vec * signs
    return lam, vec


class RandomStream:
    """Deterministic random stream with explicit, documented transforms.

    Identical seed (and spawn key) gives a bitwise-identical draw sequence.
    Parallel work derives independent child streams via :meth:`child`, so
    results do not depend on scheduling.
    """

    algorithm = RNG_ALGORITHM_ID

    def __init__(self, seed: int, spawn_key: Tuple[int, ...] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def child(self, index: int) -> "RandomStream":
        """Independent stream keyed by (seed, spawn_key + (index,))."""
        return RandomStream(self.seed, self.spawn_key + (int(index),))

    def _u(self, size):
        return self._gen.random(size)

    def uniform(self, a: float, b: float, size: Optional[int] = None):
        """Draw from U[a, b); values lie in [a, b)."""
        if not b > a:
            raise ValueError("uniform requires b > a")
        return a + (b - a) * self._u(size)

    def normal(self, mean: float = 0.0, sd: float = 1.0, size: Optional[int] = None):
        """Box-Muller transform of two uniform draws per value."""
        if not sd > 0:
            raise ValueError("normal requires sd > 0")
        u1 = 1.0 - self._u(size)  # in (0, 1]
        u2 = self._u(size)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        return mean + sd * z

    def exponential(self, rate: float, size: Optional[int] = None):
        """Inverse-cdf draw; mean is 1/rate (so Exp(0.5) has mean 2)."""
        if not rate > 0:
            raise ValueError("exponential requires rate > 0")
        return -np.log(1.0 - self._u(size)) / rate

    def integers(self, low: int, high: int, size: Optional[int] = None):
        return self._gen.integers(low, high, size=size)
