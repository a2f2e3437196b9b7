"""Linear half-line oscillator shifted by a phase offset.

The lowest Neumann eigenvalue mu(alpha) of -d^2/dt^2 + (t+alpha)^2 on
[0, inf) controls where superconductivity can nucleate at a flat boundary.
Its minimum over alpha is the de Gennes constant theta0, reached at
alpha_opt = -sqrt(theta0); the inverse 1/theta0 is the upper edge of the
surface regime in the dimensionless field b.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import BracketError, NonConvergenceError, TruncationError
from .errors import InvalidParameterError
from .grid import HalfLineGrid, integrate, make_grid

# Bracket wide enough to contain -sqrt(theta0) for any plausible theta0 in
# (0.3, 1).  A minimum escaping it is an error, never silently widened.
ALPHA_BRACKET = (-1.2, -0.3)

DEFAULT_GRID = make_grid(T=20.0, n_cells=25000)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LinearMode:
    """Lowest eigenpair of the shifted oscillator, L2-normalized, u(0) > 0."""

    alpha: float
    mu: float
    u: np.ndarray
    grid: HalfLineGrid
    neumann_residual: float


@dataclass(frozen=True)
class Theta0Result:
    """De Gennes constant with its minimizing shift and ground mode."""

    theta0: float
    alpha_opt: float
    mode: LinearMode
    u0_at_0: float
    u0_l4_pow4: float

    @property
    def critical_b(self) -> float:
        """Upper edge of the surface regime, 1/theta0."""
        return 1.0 / self.theta0


def _sym_tridiag(alpha: float, grid: HalfLineGrid) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized tridiagonal for -u'' + (t+alpha)^2 u, Neumann 0 / Dirichlet T.

    Unknowns are u_0..u_{n-1} (u_n = 0).  The ghost-node Neumann row at t=0
    is symmetrized by the similarity diag(1/sqrt(2), 1, ..., 1); eigenvalues
    are unchanged and u_0 = sqrt(2) v_0 recovers the eigenvector.
    """
    n = grid.n_cells
    t = grid.nodes[:n]
    inv_h2 = 1.0 / grid.h**2
    diag = 2.0 * inv_h2 + (t + alpha) ** 2
    off = np.full(n - 1, -inv_h2)
    off[0] = -math.sqrt(2.0) * inv_h2
    return diag, off


def _rayleigh(v: np.ndarray, alpha: float, grid: HalfLineGrid) -> float:
    """Rayleigh quotient of the symmetrized matrix, evaluated stably.

    Uses the equivalent finite-volume form (squared first differences plus
    the potential term, half weight at the Neumann node), which has no 1/h^2
    cancellation and is accurate to round-off near convergence.
    """
    n = grid.n_cells
    u = np.empty(n + 1)
    u[:n] = v
    u[0] = math.sqrt(2.0) * v[0]
    u[-1] = 0.0
    t = grid.nodes
    kinetic = float(np.sum(np.diff(u) ** 2)) / grid.h**2
    pot = (t + alpha) ** 2 * u * u
    mass = u * u
    num = kinetic + float(np.sum(pot[1:-1])) + 0.5 * pot[0]
    den = float(np.sum(mass[1:-1])) + 0.5 * mass[0]
    return num / den


def _solve_shifted(diag, off, shift, rhs):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    return sla.solve_banded((1, 1), ab, rhs)


def lowest_mode(
    alpha: float,
    grid: HalfLineGrid = DEFAULT_GRID,
    *,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> LinearMode:
    """Lowest Neumann eigenpair of -d^2/dt^2 + (t+alpha)^2 on [0, T].

    Inverse iteration on the symmetric tridiagonal discretization, with
    Rayleigh-quotient shifts once the iterate has settled, to relative
    eigenvalue tolerance `tol`.
    """
    if grid.T < 4.0 * (1.0 + abs(alpha)):
        raise InvalidParameterError(
            f"T={grid.T} too short for alpha={alpha}; need T >= 4*(1+|alpha|)"
        )
    diag, off = _sym_tridiag(alpha, grid)
    t = grid.nodes[: grid.n_cells]
    v = np.exp(-0.5 * (t + alpha) ** 2)
    v /= np.linalg.norm(v)
    lam = _rayleigh(v, alpha, grid)
    shift = 0.0
    converged = False
    for it in range(max_iter):
        try:
            w = _solve_shifted(diag, off, shift, v)
        except np.linalg.LinAlgError:  # exactly singular shift: nudge it
            w = _solve_shifted(diag, off, shift * (1.0 + 1e-12) + 1e-300, v)
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            break
        v = w / norm
        lam_new = _rayleigh(v, alpha, grid)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            converged = True
            break
        lam = lam_new
        if it >= 3:  # iterate is ground-dominated by now; cubic RQ phase
            shift = lam
    if not converged:
        raise NonConvergenceError(
            f"inverse iteration did not converge in {max_iter} steps (alpha={alpha})"
        )
    # Undo the symmetrizing similarity, append the Dirichlet node, normalize.
    u = np.empty(grid.size)
    u[: grid.n_cells] = v
    u[0] = math.sqrt(2.0) * v[0]
    u[-1] = 0.0
    u /= math.sqrt(integrate(u * u, grid))
    if u[0] < 0.0:
        u = -u
    if abs(u[-2]) > 1e-8:
        raise TruncationError(
            f"mode not decayed at T={grid.T}: |u(T-h)|={abs(u[-2]):.2e}"
        )
    neumann = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * grid.h)
    return LinearMode(
        alpha=alpha, mu=lam, u=u, grid=grid, neumann_residual=float(neumann)
    )


def compute_theta0(
    grid: HalfLineGrid = DEFAULT_GRID, tol: float = 1e-7
) -> Theta0Result:
    """Minimize mu(alpha) over the standard bracket by golden section.

    Returns the de Gennes constant, the minimizing shift, the ground mode and
    its boundary value / quartic norm.  The identity alpha_opt = -sqrt(theta0)
    is enforced to 10*tol as a discretization-quality check.
    """
    if tol < 1e-10:
        raise InvalidParameterError(f"tol must be >= 1e-10, got {tol}")

    cache: dict[float, float] = {}

    def mu(a: float) -> float:
        if a not in cache:
            cache[a] = lowest_mode(a, grid).mu
        return cache[a]

    lo, hi = ALPHA_BRACKET
    mid = 0.5 * (lo + hi)
    if not (mu(mid) < mu(lo) and mu(mid) < mu(hi)):
        raise BracketError(
            "mu(alpha) not unimodal with interior minimum on "
            f"[{lo}, {hi}]; grid too coarse"
        )
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    while b - a > tol:
        if mu(c) < mu(d):
            b, d = d, c
            c = b - _GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + _GOLDEN * (b - a)
    alpha_opt = 0.5 * (a + b)
    mode = lowest_mode(alpha_opt, grid)
    theta0 = mode.mu
    if abs(alpha_opt + math.sqrt(theta0)) > 10.0 * tol:
        raise BracketError(
            f"optimality check failed: |alpha_opt + sqrt(theta0)| = "
            f"{abs(alpha_opt + math.sqrt(theta0)):.3e} > {10.0 * tol:.1e}; "
            "refine the grid"
        )
    return Theta0Result(
        theta0=theta0,
        alpha_opt=alpha_opt,
        mode=mode,
        u0_at_0=float(mode.u[0]),
        u0_l4_pow4=float(integrate(mode.u**4, grid)),
    )


@functools.lru_cache(maxsize=8)
def _reference_theta0(h: float, n_cells: int, tol: float) -> Theta0Result:
    return compute_theta0(HalfLineGrid(h=h, n_cells=n_cells), tol=tol)


def reference_theta0(grid: HalfLineGrid = DEFAULT_GRID, tol: float = 1e-7) -> Theta0Result:
    """Cached theta0 used for regime checks and near-critical flags."""
    return _reference_theta0(grid.h, grid.n_cells, tol)
