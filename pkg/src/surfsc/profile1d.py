"""Nonlinear boundary-layer profiles on the half-line.

Two variational problems over (f, alpha):

* the flat-boundary (half-plane) energy
      int_0^inf |f'|^2 + (t+alpha)^2 f^2 - (1/2b)(2f^2 - f^4) dt,
* the curvature-weighted energy with weight (1 - eps*k*t) and potential
      (t + alpha - eps*k*t^2/2)^2 / (1 - eps*k*t)^2,
  truncated at T = c0*|log eps|.

The inner profile solve is a damped Newton iteration on the Euler-Lagrange
equation; the outer phase solve finds the root of the first moment
int (t+alpha) f^2 dt, which characterizes the optimal alpha and is sharper
numerically than comparing energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .errors import BracketError, InvalidParameterError, NonConvergenceError
from .grid import HalfLineGrid, MIN_CELLS, differentiate, integrate, make_grid
from .spectral import lowest_mode, reference_theta0

DEFAULT_GRID = make_grid(T=20.0, n_cells=80000)

# Linear level at or above the nonlinear threshold: the only minimizer is 0.
ZERO_PROFILE_MARGIN = 1e-12

NEWTON_RESID_TOL = 1e-10
NEWTON_MAX_ITER = 80
DAMPING_FLOOR = 2.0**-20

ALPHA_MOMENT_TOL = 1e-8


def residual_floor(f: np.ndarray, grid: HalfLineGrid) -> float:
    """Round-off floor of the max-norm EL residual on this grid.

    The stored profile's last-bit rounding alone perturbs the second
    difference by ~4*eps*|f|/h^2, so no double-precision profile can satisfy
    the discrete EL equation below this level.  Convergence targets
    max(tolerance, floor).
    """
    return 8.0 * np.finfo(float).eps * float(np.max(np.abs(f))) / grid.h**2


@dataclass(frozen=True)
class ModelParams:
    """Field strength b plus the curvature data (eps, k, c0) when relevant.

    The flat problem uses eps = k = 0.  For a curved boundary, eps > 0 is the
    layer width and k the signed curvature (k < 0 for a concave boundary);
    c0 fixes the truncation T = c0*|log eps|.
    """

    b: float
    eps: float = 0.0
    k: float = 0.0
    c0: float = 6.0
    allow_outside_regime: bool = False

    def __post_init__(self):
        if not np.isfinite(self.b) or self.b <= 0.0:
            raise InvalidParameterError(f"b must be positive, got {self.b}")
        if self.eps < 0.0 or not np.isfinite(self.eps):
            raise InvalidParameterError(f"eps must be >= 0, got {self.eps}")
        if self.k != 0.0 and self.eps == 0.0:
            raise InvalidParameterError("curved problem (k != 0) requires eps > 0")
        if self.c0 <= 0.0:
            raise InvalidParameterError(f"c0 must be positive, got {self.c0}")

    @property
    def applied_field(self) -> float:
        """Field strength b/eps^2 in unscaled units."""
        if self.eps == 0.0:
            raise InvalidParameterError("applied_field undefined for eps = 0")
        return self.b / self.eps**2


@dataclass(frozen=True)
class HalfPlaneSolution:
    """Joint minimizer (alpha0, f0) of the flat-boundary problem."""

    params: ModelParams
    grid: HalfLineGrid
    alpha: float
    profile: np.ndarray
    energy: float
    residual_norm: float
    alpha_moment: float

    @property
    def boundary_density(self) -> float:
        """f0(0)^2, the pair density at the boundary."""
        return float(self.profile[0] ** 2)

    @property
    def is_zero(self) -> bool:
        return bool(np.max(np.abs(self.profile)) < 1e-12)


@dataclass(frozen=True)
class CurvedSolution:
    """Joint minimizer (alpha_k, f_k) of the curvature-weighted problem."""

    params: ModelParams
    grid: HalfLineGrid
    alpha: float
    profile: np.ndarray
    energy: float
    residual_norm: float
    alpha_moment: float


def curved_grid(eps: float, c0: float = 6.0, h: float | None = None) -> HalfLineGrid:
    """Grid on [0, c0*|log eps|] with spacing close to h (default solver h)."""
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError(f"eps must be in (0, 1), got {eps}")
    T = c0 * abs(math.log(eps))
    if h is None:
        h = DEFAULT_GRID.h
    n = max(MIN_CELLS, int(math.ceil(T / h)))
    n += n % 2  # keep Simpson weights available
    return make_grid(T, n)


def _weight(t: np.ndarray, params: ModelParams) -> np.ndarray:
    if params.k == 0.0:
        return np.ones_like(t)
    return 1.0 - params.eps * params.k * t


def _potential(t: np.ndarray, alpha: float, params: ModelParams) -> np.ndarray:
    if params.k == 0.0:
        return (t + alpha) ** 2
    w = _weight(t, params)
    return (t + alpha - 0.5 * params.eps * params.k * t**2) ** 2 / w**2


def _polish(f, alpha, params, grid, steps=2):
    """Mixed-precision refinement of a converged Newton iterate.

    The double-precision residual floor leaves a smooth error of size
    J^{-1} * (stopping residual), which matters near the critical field where
    the linearized gap is small.  Evaluating the residual in extended
    precision and correcting with the double-precision Jacobian drives the
    smooth component down to round-off, so the returned (double) profile is
    the correctly rounded discrete solution.
    """
    fl = f.astype(np.longdouble)
    ab = _jacobian_banded(f, alpha, params, grid)
    t_l = grid.nodes.astype(np.longdouble)
    n, h = grid.n_cells, grid.h
    V = _potential(t_l[:n], alpha, params)
    c = (
        params.eps * params.k / _weight(t_l[:n], params)
        if params.k != 0.0
        else None
    )
    for _ in range(steps):
        d = np.diff(fl)
        out = np.empty(n, dtype=np.longdouble)
        out[1:] = -(d[1:] - d[:-1]) / h**2
        out[0] = -2.0 * d[0] / h**2
        if c is not None:
            out[1:] += c[1:] * (d[1:] + d[:-1]) / (2.0 * h)
        fn = fl[:n]
        out += (V - 1.0 / params.b) * fn + fn**3 / params.b
        step = sla.solve_banded((1, 1), ab, -out.astype(float))
        fl[:-1] += step
    return np.asarray(fl, dtype=float)


def _check_weight(params: ModelParams, grid: HalfLineGrid) -> None:
    if params.k != 0.0 and 1.0 - params.eps * params.k * grid.T <= 0.0:
        raise InvalidParameterError(
            f"weight 1 - eps*k*t nonpositive at T={grid.T} "
            f"(eps={params.eps}, k={params.k})"
        )


def _check_regime(params: ModelParams) -> None:
    if params.allow_outside_regime:
        return
    b_max = reference_theta0().critical_b
    if not 1.0 < params.b < b_max:
        raise InvalidParameterError(
            f"b={params.b} outside the surface regime (1, {b_max:.6f}); "
            "set allow_outside_regime to study the boundary cases"
        )


def energy_functional(
    f: np.ndarray, alpha: float, params: ModelParams, grid: HalfLineGrid
) -> float:
    """Value of the (possibly weighted) functional at profile f."""
    t = grid.nodes
    w = _weight(t, params)
    V = _potential(t, alpha, params)
    df = differentiate(f, grid)
    dens = w * (df**2 + V * f**2 - (f**2 - 0.5 * f**4) / params.b)
    return integrate(dens, grid)


def energy_breakdown(
    f: np.ndarray, alpha: float, params: ModelParams, grid: HalfLineGrid
) -> dict[str, float]:
    """Kinetic / potential / nonlinear quadratures; their sum is the energy."""
    t = grid.nodes
    w = _weight(t, params)
    V = _potential(t, alpha, params)
    df = differentiate(f, grid)
    kinetic = integrate(w * df**2, grid)
    potential = integrate(w * V * f**2, grid)
    nonlinear = integrate(-w * (f**2 - 0.5 * f**4) / params.b, grid)
    return {
        "kinetic": kinetic,
        "potential": potential,
        "nonlinear": nonlinear,
        "total": kinetic + potential + nonlinear,
    }


def alpha_moment(
    f: np.ndarray, alpha: float, params: ModelParams, grid: HalfLineGrid
) -> float:
    """First-order optimality integral in alpha; vanishes at the optimum.

    Half of d/dalpha of the functional at fixed f:
    int (t + alpha - eps*k*t^2/2) f^2 / (1 - eps*k*t) dt.
    """
    t = grid.nodes
    if params.k == 0.0:
        return integrate((t + alpha) * f**2, grid)
    w = _weight(t, params)
    return integrate((t + alpha - 0.5 * params.eps * params.k * t**2) * f**2 / w, grid)


def _el_residual(
    f: np.ndarray, alpha: float, params: ModelParams, grid: HalfLineGrid
) -> np.ndarray:
    """Euler-Lagrange residual at the unknowns (nodes 0..n-1; f(T) = 0).

    -f'' + (eps*k/w) f' + V f - (1/b)(1 - f^2) f, with the Neumann node
    handled by ghost reflection.  Second differences are built from repeated
    first differences so the round-off floor sits well below the Newton
    tolerance even on fine grids.
    """
    n = grid.n_cells
    h = grid.h
    t = grid.nodes[:n]
    V = _potential(t, alpha, params)
    d = np.diff(f)
    out = np.empty(n)
    out[1:] = -(d[1:] - d[:-1]) / h**2
    out[0] = -2.0 * d[0] / h**2
    if params.k != 0.0:
        c = params.eps * params.k / _weight(t, params)
        out[1:] += c[1:] * (d[1:] + d[:-1]) / (2.0 * h)
        # ghost reflection kills the centered first derivative at t = 0
    fn = f[:n]
    out += (V - 1.0 / params.b) * fn + fn**3 / params.b
    return out


def _jacobian_banded(
    f: np.ndarray, alpha: float, params: ModelParams, grid: HalfLineGrid
) -> np.ndarray:
    n = grid.n_cells
    h = grid.h
    t = grid.nodes[:n]
    V = _potential(t, alpha, params)
    inv_h2 = 1.0 / h**2
    ab = np.zeros((3, n))
    ab[1] = 2.0 * inv_h2 + V - 1.0 / params.b + 3.0 * f[:n] ** 2 / params.b
    ab[0, 1:] = -inv_h2  # upper diagonal
    ab[0, 1] = -2.0 * inv_h2  # ghost Neumann row
    ab[2, :-1] = -inv_h2  # lower diagonal
    if params.k != 0.0:
        c = params.eps * params.k / _weight(t, params)
        ab[0, 2:] += c[1:-1] / (2.0 * h)
        ab[2, :-1] -= c[1:] / (2.0 * h)
    return ab


def solve_f_given_alpha(
    alpha: float,
    params: ModelParams,
    grid: HalfLineGrid,
    f_init: np.ndarray | None = None,
) -> np.ndarray:
    """Nonnegative profile solving the EL equation at fixed alpha.

    Neumann at 0, Dirichlet at T.  Cold starts use the linear mode scaled so
    the cubic term balances; when the linear level b*mu(alpha) reaches 1 the
    zero profile is returned (no nontrivial minimizer exists).  Damped Newton,
    max-norm residual below 1e-10 on exit.
    """
    _check_weight(params, grid)
    if f_init is None:
        mode = lowest_mode(alpha, grid)
        if params.b * mode.mu >= 1.0 - ZERO_PROFILE_MARGIN:
            return np.zeros(grid.size)
        amp2 = (1.0 - params.b * mode.mu) / integrate(mode.u**4, grid)
        f = math.sqrt(amp2) * mode.u
    else:
        f = np.asarray(f_init, dtype=float).copy()
        if f.shape != (grid.size,):
            raise InvalidParameterError("f_init shape does not match grid")
        f[-1] = 0.0
        if np.max(np.abs(f)) < 1e-12:
            # warm start collapsed to zero: re-classify via the linear level
            return solve_f_given_alpha(alpha, params, grid, f_init=None)

    energy = energy_functional(f, alpha, params, grid)
    for _ in range(NEWTON_MAX_ITER):
        resid = _el_residual(f, alpha, params, grid)
        if np.max(np.abs(resid)) <= max(NEWTON_RESID_TOL, residual_floor(f, grid)):
            return _polish(f, alpha, params, grid)
        ab = _jacobian_banded(f, alpha, params, grid)
        step = sla.solve_banded((1, 1), ab, -resid)
        s = 1.0
        norm0 = np.max(np.abs(resid))
        while True:
            trial = f.copy()
            trial[:-1] += s * step
            e_new = energy_functional(trial, alpha, params, grid)
            r_new = np.max(np.abs(_el_residual(trial, alpha, params, grid)))
            if e_new <= energy + 1e-13 * (1.0 + abs(energy)) or r_new <= 0.5 * norm0:
                f, energy = trial, e_new
                break
            s *= 0.5
            if s < DAMPING_FLOOR:
                raise NonConvergenceError(
                    "newton-divergence: damping floor reached "
                    f"(alpha={alpha}, b={params.b}); refine the grid or continue "
                    "from a nearby solution"
                )
    raise NonConvergenceError(
        f"newton iteration cap reached (alpha={alpha}, b={params.b})"
    )


def _joint_minimize(params, grid, alpha_hint=None, f_hint=None):
    """Minimize over (f, alpha): golden section on energy, then moment root."""
    _check_weight(params, grid)
    theta = reference_theta0()
    lo, hi = theta.alpha_opt - 0.5, 0.0

    # Warm starts only help between nearby alphas; a distant profile is a
    # worse Newton init than the scaled linear mode.
    warm: list = [None if f_hint is None else (alpha_hint, np.asarray(f_hint, float))]
    cache: dict[float, tuple[np.ndarray, float, float]] = {}

    def evaluate(a: float):
        if a not in cache:
            f_init = None
            if warm[0] is not None:
                a_last, f_last = warm[0]
                if a_last is None or abs(a - a_last) <= 0.05:
                    f_init = f_last
            f = solve_f_given_alpha(a, params, grid, f_init=f_init)
            if np.max(np.abs(f)) > 0.0:
                warm[0] = (a, f)
            cache[a] = (
                f,
                energy_functional(f, a, params, grid),
                alpha_moment(f, a, params, grid),
            )
        return cache[a]

    golden = (math.sqrt(5.0) - 1.0) / 2.0

    def golden_center() -> float:
        a, b = lo, hi
        c = b - golden * (b - a)
        d = a + golden * (b - a)
        while b - a > 1e-3:
            if evaluate(c)[1] < evaluate(d)[1]:
                b, d = d, c
                c = b - golden * (b - a)
            else:
                a, c = c, d
                d = a + golden * (b - a)
        return 0.5 * (a + b)

    center = alpha_hint if alpha_hint is not None else golden_center()

    if np.max(np.abs(evaluate(center)[0])) < 1e-12:
        # No nontrivial profile anywhere: flat zero landscape.
        zero = np.zeros(grid.size)
        return theta.alpha_opt, zero, 0.0, 0.0, 0.0

    def nonzero(a: float) -> bool:
        return bool(np.max(np.abs(evaluate(a)[0])) > 0.0)

    def probe_sign(direction: int) -> float:
        """Nearest alpha on `direction`'s side of center where the moment has
        that sign and the profile is nontrivial.

        The nontrivial branch lives on an interval; beyond it the profile is
        identically zero and the moment degenerates to 0, so a probe landing
        there is bisected back toward center.  The moment tends to a nonzero
        limit of the wanted sign at the branch edge, so the bisection
        terminates.
        """
        inner = center
        step = 1e-3
        for _ in range(40):
            cand = center + direction * step
            cand = min(hi, max(lo, cand))
            if nonzero(cand):
                if direction * evaluate(cand)[2] > 0.0:
                    return cand
                inner = cand
                if cand in (lo, hi):
                    break
                step *= 2.0
            else:
                outer = cand
                for _ in range(60):
                    mid = 0.5 * (inner + outer)
                    if nonzero(mid):
                        if direction * evaluate(mid)[2] > 0.0:
                            return mid
                        inner = mid
                    else:
                        outer = mid
                break
        raise BracketError(
            "no-root: optimality moment has no sign change on the alpha "
            f"bracket [{lo:.4f}, {hi:.4f}] (b={params.b}); grid too coarse"
        )

    m_center = evaluate(center)[2]
    if m_center == 0.0:
        a1 = a2 = center
    elif m_center > 0.0:
        a1, a2 = probe_sign(-1), center
    else:
        a1, a2 = center, probe_sign(+1)

    if a1 == a2:
        alpha0 = a1
    else:
        alpha0 = brentq(lambda a: evaluate(a)[2], a1, a2, xtol=1e-12, rtol=8.9e-16)
    f, energy, moment = evaluate(alpha0)
    mass = integrate(f**2, grid)
    if abs(moment) > ALPHA_MOMENT_TOL * mass:
        raise BracketError(
            f"alpha optimality residual {abs(moment):.2e} exceeds "
            f"{ALPHA_MOMENT_TOL:.0e} * mass"
        )
    resid = float(np.max(np.abs(_el_residual(f, alpha0, params, grid))))
    return alpha0, f, energy, moment, resid


def optimize_alpha_halfplane(
    b: float,
    grid: HalfLineGrid = DEFAULT_GRID,
    *,
    allow_outside_regime: bool = False,
    alpha_hint: float | None = None,
    f_hint: np.ndarray | None = None,
) -> HalfPlaneSolution:
    """Jointly minimize the flat-boundary functional over (f, alpha)."""
    params = ModelParams(b=b, allow_outside_regime=allow_outside_regime)
    _check_regime(params)
    alpha0, f, energy, moment, resid = _joint_minimize(
        params, grid, alpha_hint=alpha_hint, f_hint=f_hint
    )
    return HalfPlaneSolution(
        params=params,
        grid=grid,
        alpha=alpha0,
        profile=f,
        energy=energy,
        residual_norm=resid,
        alpha_moment=moment,
    )


def solve_curved(
    params: ModelParams,
    grid: HalfLineGrid,
    *,
    alpha_hint: float | None = None,
    f_hint: np.ndarray | None = None,
) -> CurvedSolution:
    """Jointly minimize the curvature-weighted functional over (f, alpha).

    The caller builds the grid on [0, c0*|log eps|] (see `curved_grid`); at
    k = 0 the result matches the flat problem up to the exponentially small
    truncation discrepancy.
    """
    if params.eps <= 0.0:
        raise InvalidParameterError("curved problem requires eps > 0")
    _check_regime(params)
    _check_weight(params, grid)
    alpha_k, f, energy, moment, resid = _joint_minimize(
        params, grid, alpha_hint=alpha_hint, f_hint=f_hint
    )
    return CurvedSolution(
        params=params,
        grid=grid,
        alpha=alpha_k,
        profile=f,
        energy=energy,
        residual_norm=resid,
        alpha_moment=moment,
    )
