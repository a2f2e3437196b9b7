"""Curvature coefficients of the boundary quartic mass.

For each field strength b in the surface regime the flat-boundary solve
yields the pair of coefficients

    C1(b) = -2 b E0 = int f0^4      (leading, per unit boundary length)
    C2(b) =  2 b * E_corr           (curvature correction)

entering the two-term expansion of the quartic mass along the boundary.
This module builds per-b rows, sweeps with warm-start continuation, scans
the sign of C2, checks the near-critical scaling laws, and verifies the
first-order perturbative expansion of the curved 1D energy against the
directly computed correction.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .grid import HalfLineGrid, integrate
from .identities import correction_closed
from .profile1d import (
    DEFAULT_GRID,
    HalfPlaneSolution,
    ModelParams,
    curved_grid,
    optimize_alpha_halfplane,
    solve_curved,
)
from .spectral import Theta0Result, reference_theta0

NEAR_CRITICAL_BAND = 1e-3
C1_CROSS_TOL = 1e-6


@dataclass(frozen=True)
class CoefficientRow:
    """Per-b record of the flat solve and the two curvature coefficients."""

    b: float
    alpha0: float
    energy: float
    boundary_density: float
    correction: float
    c1: float
    c2: float
    c1_cross_residual: float
    converged: bool
    near_critical: bool


@dataclass(frozen=True)
class PerturbationDiagnostics:
    """Curved-energy samples against the first-order expansion.

    `slope` is the linear coefficient of an unweighted least-squares fit of
    E*(eps) - E0 to s*eps + q*eps^2; the quadratic term absorbs the smooth
    remainder of the expansion, whose size `curvature` is reported alongside.
    Deviations d(eps) = |E*(eps) - (E0 - eps*k*E_corr)| quantify the
    remainder directly.
    """

    b: float
    k: float
    eps_list: tuple[float, ...]
    e_star: tuple[float, ...]
    e0: float
    e_corr: float
    deviations: tuple[float, ...]
    slope: float
    curvature: float
    slope_target: float

    @property
    def slope_rel_err(self) -> float:
        return abs(self.slope - self.slope_target) / (abs(self.slope_target) + 1e-30)


@dataclass(frozen=True)
class SignScanResult:
    """Outcome of a C2 sign scan: a bracketed root, or none if C2 > 0."""

    b_scanned: tuple[float, ...]
    c2_scanned: tuple[float, ...]
    root: float | None
    bracket: tuple[float, float] | None


@dataclass(frozen=True)
class LimitingRow:
    """Near-critical scaling ratios; both tend to 1 as b approaches 1/theta0."""

    b: float
    delta: float
    rho1: float
    rho2: float
    alpha_gap: float


def _row_from_solution(sol: HalfPlaneSolution, theta: Theta0Result) -> CoefficientRow:
    b = sol.params.b
    corr = correction_closed(sol)
    c1 = -2.0 * b * sol.energy
    c1_alt = integrate(sol.profile**4, sol.grid)
    cross = abs(c1 - c1_alt) / (abs(c1) + 1e-30)
    return CoefficientRow(
        b=b,
        alpha0=sol.alpha,
        energy=sol.energy,
        boundary_density=sol.boundary_density,
        correction=corr.via_boundary,
        c1=c1,
        c2=2.0 * b * corr.via_boundary,
        c1_cross_residual=cross,
        converged=bool(cross <= C1_CROSS_TOL),
        near_critical=(1.0 - b * theta.theta0) < NEAR_CRITICAL_BAND,
    )


def coefficient_row(
    b: float,
    grid: HalfLineGrid = DEFAULT_GRID,
    *,
    theta: Theta0Result | None = None,
    alpha_hint: float | None = None,
    f_hint: np.ndarray | None = None,
) -> CoefficientRow:
    """Solve the flat problem at b and assemble its coefficient row.

    C1 is computed both as -2 b E0 and as the quartic integral; their
    relative mismatch is recorded and gates the `converged` flag.
    """
    if theta is None:
        theta = reference_theta0()
    if not 1.0 < b < theta.critical_b:
        raise InvalidParameterError(
            f"b={b} outside the surface regime (1, {theta.critical_b:.6f})"
        )
    sol = optimize_alpha_halfplane(b, grid, alpha_hint=alpha_hint, f_hint=f_hint)
    return _row_from_solution(sol, theta)


def sweep(
    b_min: float,
    b_max: float,
    steps: int,
    grid: HalfLineGrid = DEFAULT_GRID,
    *,
    cold_start: bool = False,
    max_workers: int = 1,
) -> list[CoefficientRow]:
    """Coefficient rows on a uniform b grid.

    Sequential sweeps warm-start each solve from the previous row's profile
    and phase, which keeps near-critical continuation cheap; `cold_start=True`
    audits that path, and `max_workers > 1` solves rows independently (cold)
    in parallel.  Output order is ascending b either way.
    """
    theta = reference_theta0()
    if not (1.0 < b_min < b_max < theta.critical_b):
        raise InvalidParameterError(
            f"invalid-range: need 1 < b_min < b_max < {theta.critical_b:.6f}, "
            f"got ({b_min}, {b_max})"
        )
    if steps < 2:
        raise InvalidParameterError(f"invalid-range: steps must be >= 2, got {steps}")
    b_values = np.linspace(b_min, b_max, steps)

    if max_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(
                pool.map(
                    lambda b: coefficient_row(float(b), grid, theta=theta), b_values
                )
            )

    rows = []
    alpha_hint: float | None = None
    f_hint: np.ndarray | None = None
    for b in b_values:
        sol = optimize_alpha_halfplane(
            float(b),
            grid,
            alpha_hint=None if cold_start else alpha_hint,
            f_hint=None if cold_start else f_hint,
        )
        rows.append(_row_from_solution(sol, theta))
        alpha_hint = sol.alpha
        f_hint = sol.profile
    return rows


def sign_scan(
    window: tuple[float, float],
    resolution: float,
    grid: HalfLineGrid = DEFAULT_GRID,
) -> SignScanResult:
    """Locate a sign change of C2(b) inside `window`, if there is one.

    Scans at a spacing no finer than needed to seed a bisection, then
    bisects any sign-change bracket down to `resolution`.  Returns no root
    when C2 keeps one sign throughout, which is the expected outcome.
    """
    b_lo, b_hi = window
    theta = reference_theta0()
    if not (1.0 < b_lo < b_hi < theta.critical_b):
        raise InvalidParameterError(
            f"invalid-range: window {window} not inside (1, {theta.critical_b:.6f})"
        )
    if resolution <= 0.0:
        raise InvalidParameterError(f"resolution must be positive, got {resolution}")

    n_scan = max(3, min(17, int(math.ceil((b_hi - b_lo) / resolution)) + 1))
    b_values = np.linspace(b_lo, b_hi, n_scan)
    cache: dict[float, float] = {}

    def c2(b: float) -> float:
        if b not in cache:
            cache[b] = coefficient_row(b, grid, theta=theta).c2
        return cache[b]

    scanned = [(float(b), c2(float(b))) for b in b_values]
    root = None
    bracket = None
    for (b1, v1), (b2, v2) in zip(scanned, scanned[1:]):
        if v1 == 0.0:
            root, bracket = b1, (b1, b1)
            break
        if v1 * v2 < 0.0:
            lo, hi = b1, b2
            while hi - lo > resolution:
                mid = 0.5 * (lo + hi)
                if c2(lo) * c2(mid) <= 0.0:
                    hi = mid
                else:
                    lo = mid
            root, bracket = 0.5 * (lo + hi), (lo, hi)
            break
    return SignScanResult(
        b_scanned=tuple(b for b, _ in scanned),
        c2_scanned=tuple(v for _, v in scanned),
        root=root,
        bracket=bracket,
    )


def limiting_check(
    b_list: list[float],
    theta: Theta0Result | None = None,
    grid: HalfLineGrid = DEFAULT_GRID,
) -> list[LimitingRow]:
    """Near-critical scaling ratios along a list of b values.

    rho1 compares f0(0)^2 with its linear-mode prediction
    (1 - b*theta0) u0(0)^2 / ||u0||_4^4, rho2 does the same for the quartic
    integral against (1 - b*theta0)^2 / ||u0||_4^4; both tend to 1 from the
    scaling of the profile near the critical field.
    """
    if theta is None:
        theta = reference_theta0()
    rows = []
    for b in b_list:
        delta = 1.0 - b * theta.theta0
        if not 1e-3 < delta < 0.1:
            raise InvalidParameterError(
                f"b={b} gives 1 - b*theta0 = {delta:.4f}, outside (1e-3, 0.1)"
            )
        sol = optimize_alpha_halfplane(b, grid)
        quartic = integrate(sol.profile**4, grid)
        rho1 = sol.boundary_density * theta.u0_l4_pow4 / (delta * theta.u0_at_0**2)
        rho2 = quartic * theta.u0_l4_pow4 / delta**2
        rows.append(
            LimitingRow(
                b=b,
                delta=delta,
                rho1=rho1,
                rho2=rho2,
                alpha_gap=abs(sol.alpha + math.sqrt(theta.theta0)),
            )
        )
    return rows


def perturbation_check(
    b: float,
    k: float,
    eps_list: list[float],
    c0: float = 6.0,
    grid: HalfLineGrid = DEFAULT_GRID,
) -> PerturbationDiagnostics:
    """Verify the first-order expansion of the curved energy in eps*k.

    Solves the curved problem along `eps_list`, fits E*(eps) - E0 with an
    unweighted least-squares model s*eps + q*eps^2, and compares s against
    -k*E_corr.  A straight-line fit would be biased by the smooth quadratic
    remainder (|q| is comparable to E_corr here), so the model carries the
    eps^2 term explicitly and reports it.
    """
    if len(eps_list) < 3:
        raise InvalidParameterError("eps_list needs at least 3 entries")
    eps_arr = [float(e) for e in eps_list]
    if any(e <= 0.0 for e in eps_arr):
        raise InvalidParameterError("eps values must be positive")
    if any(e2 >= e1 for e1, e2 in zip(eps_arr, eps_arr[1:])):
        raise InvalidParameterError("eps_list must be strictly decreasing")

    flat = optimize_alpha_halfplane(b, grid)
    e0 = flat.energy
    e_corr = correction_closed(flat).via_boundary

    e_star = []
    for eps in eps_arr:
        params = ModelParams(b=b, eps=eps, k=k, c0=c0)
        cg = curved_grid(eps, c0, h=grid.h)
        sol = solve_curved(params, cg, alpha_hint=flat.alpha)
        e_star.append(sol.energy)

    deviations = tuple(
        abs(es - (e0 - eps * k * e_corr)) for es, eps in zip(e_star, eps_arr)
    )
    x = np.asarray(eps_arr)
    y = np.asarray(e_star) - e0
    if k == 0.0:
        slope, curvature = 0.0, 0.0
    else:
        design = np.column_stack([x, x * x])
        (slope, curvature), *_ = np.linalg.lstsq(design, y, rcond=None)
    return PerturbationDiagnostics(
        b=b,
        k=k,
        eps_list=tuple(eps_arr),
        e_star=tuple(float(v) for v in e_star),
        e0=e0,
        e_corr=e_corr,
        deviations=deviations,
        slope=float(slope),
        curvature=float(curvature),
        slope_target=-k * e_corr,
    )
