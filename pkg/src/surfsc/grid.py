"""Uniform half-line grids with quadrature and finite-difference derivatives.

All 1D solvers share these primitives.  Grids are uniform: every profile in
the surface regime decays like a Gaussian away from the boundary, so there
is nothing to gain from mesh grading at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

MIN_CELLS = 128


@dataclass(frozen=True)
class HalfLineGrid:
    """Nodes t_i = i*h for i = 0..n_cells on [0, T] with T = h*n_cells."""

    h: float
    n_cells: int

    @property
    def T(self) -> float:
        return self.h * self.n_cells

    @property
    def size(self) -> int:
        return self.n_cells + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.h

    def refined(self, factor: int = 2) -> "HalfLineGrid":
        """Same interval with `factor` times as many cells."""
        return HalfLineGrid(h=self.h / factor, n_cells=self.n_cells * factor)


def make_grid(T: float, n_cells: int) -> HalfLineGrid:
    """Build a uniform grid on [0, T] with spacing h = T/n_cells."""
    if not np.isfinite(T) or T <= 0:
        raise InvalidParameterError(f"truncation length must be positive, got T={T}")
    if n_cells < MIN_CELLS:
        raise InvalidParameterError(
            f"n_cells must be at least {MIN_CELLS}, got {n_cells}"
        )
    return HalfLineGrid(h=T / n_cells, n_cells=int(n_cells))


def _check_samples(samples: np.ndarray, grid: HalfLineGrid) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.size,):
        raise InvalidParameterError(
            f"expected {grid.size} samples, got shape {samples.shape}"
        )
    if not np.all(np.isfinite(samples)):
        raise InvalidParameterError("samples contain non-finite values")
    return samples


def integrate(samples: np.ndarray, grid: HalfLineGrid) -> float:
    """Composite quadrature of nodal samples over [0, T].

    Composite Simpson when n_cells is even (exact through cubics),
    trapezoid fallback otherwise.  Deterministic: a fixed dot product.
    """
    samples = _check_samples(samples, grid)
    n = grid.n_cells
    if n % 2 == 0:
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return float(np.dot(w, samples) * (grid.h / 3.0))
    return float(np.trapezoid(samples, dx=grid.h))


def differentiate(samples: np.ndarray, grid: HalfLineGrid) -> np.ndarray:
    """Second-order first derivative at the nodes.

    Central differences in the interior, one-sided three-point stencils at
    the endpoints.  Built from successive first differences, which keeps the
    cancellation error at the round-off of the differences themselves.
    """
    samples = _check_samples(samples, grid)
    d = np.diff(samples)  # d_i = f_{i+1} - f_i, exact for close neighbours
    out = np.empty_like(samples)
    out[1:-1] = (d[1:] + d[:-1]) / (2.0 * grid.h)
    out[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * grid.h)
    out[-1] = (3.0 * samples[-1] - 4.0 * samples[-2] + samples[-3]) / (2.0 * grid.h)
    return out


def integrate_upto(samples: np.ndarray, grid: HalfLineGrid, t_cut: float) -> float:
    """Quadrature of the samples restricted to [0, t_cut].

    The cut is snapped to the nearest node; intended for tail-truncation
    studies where the integrand is negligible near the cut.
    """
    samples = _check_samples(samples, grid)
    if not 0.0 < t_cut <= grid.T + 0.5 * grid.h:
        raise InvalidParameterError(f"t_cut={t_cut} outside (0, T={grid.T}]")
    j = min(int(round(t_cut / grid.h)), grid.n_cells)
    if j < MIN_CELLS:
        raise InvalidParameterError(f"t_cut={t_cut} leaves fewer than {MIN_CELLS} cells")
    sub = HalfLineGrid(h=grid.h, n_cells=j)
    return integrate(samples[: j + 1], sub)
