import math

import numpy as np
import pytest

from surfsc import (
    InvalidParameterError,
    TruncationError,
    compute_theta0,
    integrate,
    lowest_mode,
    make_grid,
)
from oracles import shooting_mu, shooting_theta0, trial_rayleigh_quotient

GRID = make_grid(20.0, 12800)


def test_mu_at_zero_shift_is_one():
    # even extension of the full-line oscillator ground state
    mode = lowest_mode(0.0, GRID)
    assert mode.mu == pytest.approx(1.0, abs=1e-6)


def test_mode_at_zero_shift_is_gaussian():
    mode = lowest_mode(0.0, GRID)
    gauss = np.exp(-0.5 * GRID.nodes**2)
    gauss /= math.sqrt(integrate(gauss**2, GRID))
    assert np.max(np.abs(mode.u - gauss)) < 1e-5


def test_mode_is_normalized_positive_decayed():
    mode = lowest_mode(-0.7, GRID)
    assert integrate(mode.u**2, GRID) == pytest.approx(1.0, abs=1e-10)
    assert mode.u[0] > 0.0
    assert abs(mode.u[-2]) <= 1e-8
    assert abs(mode.neumann_residual) < 1e-4


def test_negative_shift_lowers_level():
    """Variational oracle: the Gaussian trial already certifies mu(-0.7) < 1."""
    bound = trial_rayleigh_quotient(-0.7, shift=-0.7)
    assert bound < 1.0
    mode = lowest_mode(-0.7, GRID)
    assert mode.mu < 1.0
    assert mode.mu <= bound + 1e-6


def test_mu_matches_shooting_oracle_at_fixed_alpha():
    mode = lowest_mode(-0.7, GRID)
    assert mode.mu == pytest.approx(shooting_mu(-0.7), abs=5e-7)


def test_short_truncation_rejected():
    with pytest.raises(InvalidParameterError):
        lowest_mode(-1.2, make_grid(6.0, 600))


def test_undecayed_mode_detected():
    with pytest.raises(TruncationError):
        lowest_mode(0.0, make_grid(4.5, 512))


def test_theta0_range_and_consistency():
    res = compute_theta0(GRID)
    assert 0.5 < res.theta0 < 0.7
    assert abs(res.alpha_opt + math.sqrt(res.theta0)) <= 1e-6
    assert res.u0_at_0 > 0.0
    assert res.u0_l4_pow4 > 0.0


def test_theta0_against_shooting_oracle():
    res = compute_theta0(make_grid(20.0, 25000))
    ref, alpha_ref = shooting_theta0()
    assert res.theta0 == pytest.approx(ref, abs=1e-7)
    assert res.alpha_opt == pytest.approx(alpha_ref, abs=1e-4)


def test_theta0_minimality():
    res = compute_theta0(GRID)
    for delta in (-0.05, 0.05):
        assert res.theta0 <= lowest_mode(res.alpha_opt + delta, GRID).mu


def test_first_order_optimality_moment():
    # d(mu)/d(alpha) = 2 int (t+alpha) u^2, zero at the minimizer
    res = compute_theta0(GRID)
    t = GRID.nodes
    moment = integrate((t + res.alpha_opt) * res.mode.u**2, GRID)
    assert abs(moment) <= 1e-6


def test_theta0_stable_under_refinement():
    coarse = compute_theta0(make_grid(20.0, 25000))
    fine = compute_theta0(make_grid(20.0, 50000))
    assert abs(coarse.theta0 - fine.theta0) <= 1e-7


def test_theta0_rejects_tight_tolerance():
    with pytest.raises(InvalidParameterError):
        compute_theta0(GRID, tol=1e-11)
