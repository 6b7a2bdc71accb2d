"""Per-population functional statistics from smoothed training curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import GridMismatch, TooFewCurves
from .numerics import FunctionOnGrid, Grid, SymmetricMatrix, symmetric_eigen

#: Eigenvalues below this fraction of the leading one are unusable for the
#: quadratic discriminant (division by theta).
EIGENVALUE_FLOOR_REL = 1e-8

# Components smaller than this fraction of the leading eigenvalue get no
# eigenfunction; they are numerically zero.
_COMPONENT_CUTOFF_REL = 1e-12


@dataclass(frozen=True)
class PopulationEstimate:
    """Mean, covariance, eigenstructure and scale of one population.

    ``eigenvalues`` holds all n_curves Gram eigenvalues in descending order
    (clipped at zero); ``eigenfunctions`` holds the quadrature-normalized
    eigenfunctions of the numerically nonzero components only.
    """

    k: int
    grid: Grid
    mean: FunctionOnGrid
    scale_sq: float
    eigenvalues: np.ndarray
    eigenfunctions: List[FunctionOnGrid]
    n_curves: int
    _centered: np.ndarray = field(repr=False)

    @property
    def covariance(self) -> SymmetricMatrix:
        """Covariance matrix on the grid, G(u, v) = n^-1 sum_j c_j(u) c_j(v)."""
        c = self._centered
        return SymmetricMatrix(c.T @ c / self.n_curves)

    @property
    def usable_rank(self) -> int:
        """Number of eigenvalues above the quadratic-discriminant floor."""
        if self.eigenvalues[0] <= 0:
            return 0
        floor = EIGENVALUE_FLOOR_REL * self.eigenvalues[0]
        usable = int(np.sum(self.eigenvalues > floor))
        return min(usable, len(self.eigenfunctions))


def estimate_population(
    smoothed: Sequence[FunctionOnGrid],
    k: int,
    max_components: Optional[int] = None,
) -> PopulationEstimate:
    """Estimate mean, covariance eigenstructure and scale from curves.

    The eigenproblem of the quadrature-weighted operator W^1/2 G W^1/2 is
    solved in the n x n Gram space (the operator has rank <= n_curves), and
    eigenvectors are mapped back to grid functions normalized so that the
    trapezoid integral of psi^2 is 1.
    """
    n = len(smoothed)
    if n < 2:
        raise TooFewCurves(f"population estimation needs >= 2 curves, got {n}")
    grid = smoothed[0].grid
    for f in smoothed[1:]:
        if f.grid != grid:
            raise GridMismatch("all curves must share one grid")
    a = np.stack([f.values for f in smoothed])
    # Canonical row order makes the estimate bit-for-bit invariant to the
    # ordering of the training curves.
    a = a[np.lexsort(a.T[::-1])]
    mean = a.mean(axis=0)
    centered = a - mean
    w = grid.trapezoid_weights
    sw = np.sqrt(w)
    b = centered * sw  # rows are W^1/2-weighted centered curves
    gram = SymmetricMatrix(b @ b.T / n)
    lam, vec = symmetric_eigen(gram)
    lam = np.clip(lam, 0.0, None)
    scale_sq = float((centered * centered @ w).sum() / n)

    eigenfunctions: List[FunctionOnGrid] = []
    if lam[0] > 0:
        cutoff = _COMPONENT_CUTOFF_REL * lam[0]
        limit = lam.size if max_components is None else min(max_components, lam.size)
        for ell in range(limit):
            if lam[ell] <= cutoff:
                break
            v = b.T @ vec[:, ell] / np.sqrt(n * lam[ell])
            psi = v / sw
            i = int(np.argmax(np.abs(psi)))
            if psi[i] < 0:
                psi = -psi
            eigenfunctions.append(FunctionOnGrid(grid, psi))

    return PopulationEstimate(
        k=k,
        grid=grid,
        mean=FunctionOnGrid(grid, mean),
        scale_sq=scale_sq,
        eigenvalues=lam,
        eigenfunctions=eigenfunctions,
        n_curves=n,
        _centered=centered,
    )


def scale_sq_identity_check(pop: PopulationEstimate) -> float:
    """|scale_sq - sum of eigenvalues|; zero up to roundoff by the trace
    identity of the weighted covariance operator."""
    return abs(pop.scale_sq - float(pop.eigenvalues.sum()))
