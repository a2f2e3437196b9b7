"""Independent oracles used by the tests.

Everything here deliberately avoids the package's finite-difference grids:
the eigenvalue oracle integrates the ODE with an adaptive Runge-Kutta
scheme and locates the Neumann-compatible level by root finding, and the
variational oracle evaluates Rayleigh quotients of explicit trial functions
with adaptive quadrature.  Agreement between these and the grid solvers is
evidence, not circularity.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq, minimize_scalar


def shooting_log_derivative(mu: float, alpha: float, t_far: float) -> float:
    """u'(0)/u(0) for the decaying solution of -u'' + (t+alpha)^2 u = mu u.

    Integrates backward from t_far with the asymptotic decay data; the
    decaying branch grows in the backward direction, which keeps the
    integration stable.
    """

    def rhs(t, y):
        return [y[1], ((t + alpha) ** 2 - mu) * y[0]]

    u0 = 1.0
    du0 = (-(t_far + alpha) + (mu - 1.0) / (2.0 * (t_far + alpha))) * u0
    sol = solve_ivp(
        rhs, (t_far, 0.0), [u0, du0], method="DOP853", rtol=1e-12, atol=1e-300
    )
    return float(sol.y[1, -1] / sol.y[0, -1])


def shooting_mu(alpha: float, bracket: tuple[float, float] = (0.3, 1.3)) -> float:
    """Lowest Neumann level of the shifted oscillator by shooting."""
    t_far = max(8.0, 4.0 * (1.0 + abs(alpha)))

    def mismatch(mu):
        return shooting_log_derivative(mu, alpha, t_far)

    grid = np.linspace(bracket[0], bracket[1], 21)
    values = [mismatch(m) for m in grid]
    for lo, hi, vlo, vhi in zip(grid, grid[1:], values, values[1:]):
        if vlo == 0.0:
            return float(lo)
        if vlo * vhi < 0.0:
            return float(brentq(mismatch, lo, hi, xtol=1e-13, rtol=8.9e-16))
    raise RuntimeError(f"no Neumann level bracketed for alpha={alpha}")


@lru_cache(maxsize=1)
def shooting_theta0() -> tuple[float, float]:
    """(theta0, alpha_opt) from the shooting oracle alone."""
    res = minimize_scalar(
        shooting_mu, bounds=(-1.0, -0.5), method="bounded",
        options={"xatol": 1e-6},
    )
    return float(res.fun), float(res.x)


def trial_rayleigh_quotient(alpha: float, shift: float) -> float:
    """Rayleigh quotient of the Gaussian trial exp(-(t+shift)^2/2).

    An upper bound for the lowest Neumann level at `alpha`; evaluated by
    adaptive quadrature of closed-form integrands.
    """

    def density(t):
        u = math.exp(-0.5 * (t + shift) ** 2)
        du = -(t + shift) * u
        return du * du + (t + alpha) ** 2 * u * u

    def mass(t):
        u = math.exp(-0.5 * (t + shift) ** 2)
        return u * u

    top, _ = quad(density, 0.0, 12.0 + abs(shift), epsabs=1e-13, epsrel=1e-13)
    bottom, _ = quad(mass, 0.0, 12.0 + abs(shift), epsabs=1e-13, epsrel=1e-13)
    return top / bottom
