import dataclasses

import numpy as np
import pytest

from surfsc import (
    UnconvergedInputError,
    correction_closed,
    correction_direct,
    make_grid,
    optimize_alpha_halfplane,
    verify_all,
)

from conftest import UNIT_GRID


def test_all_identities_hold_at_moderate_grid(sol_b15_unit):
    rep = verify_all(sol_b15_unit, tol=1e-5)
    assert rep.boundary_applicable
    assert rep.all_pass, rep.residuals
    assert all(np.isfinite(v) for v in rep.residuals.values())


def test_residuals_shrink_under_refinement():
    b = 1.25
    coarse = verify_all(optimize_alpha_halfplane(b, make_grid(20.0, 16000)))
    fine = verify_all(optimize_alpha_halfplane(b, make_grid(20.0, 32000)))
    for name in ("virial", "boundary", "energy", "thirdmoment", "gradient"):
        r1, r2 = coarse.residuals[name], fine.residuals[name]
        assert r2 <= max(r1 / 3.0, 1e-11), (name, r1, r2)
    # the optimality moment is a root-finding target, pinned at round-off
    assert fine.residuals["opt"] <= 1e-9


def test_zero_profile_degenerates_gracefully():
    sol = optimize_alpha_halfplane(2.0, UNIT_GRID, allow_outside_regime=True)
    rep = verify_all(sol)
    assert not rep.boundary_applicable
    assert rep.r_opt == 0.0
    assert rep.r_virial == 0.0
    assert rep.r_energy == 0.0
    assert rep.r_thirdmoment == 0.0
    assert rep.r_gradient == 0.0
    assert rep.all_pass


def test_low_field_end_of_regime():
    rep = verify_all(optimize_alpha_halfplane(1.1, UNIT_GRID), tol=1e-5)
    assert rep.all_pass, rep.residuals


def test_unconverged_input_rejected(sol_b15_unit):
    broken = dataclasses.replace(sol_b15_unit, residual_norm=1.0)
    with pytest.raises(UnconvergedInputError):
        verify_all(broken)
    with pytest.raises(UnconvergedInputError):
        correction_direct(broken)
    with pytest.raises(UnconvergedInputError):
        correction_closed(broken)


def test_correction_zero_profile():
    sol = optimize_alpha_halfplane(2.0, UNIT_GRID, allow_outside_regime=True)
    assert correction_direct(sol) == 0.0
    closed = correction_closed(sol)
    assert closed.via_boundary == 0.0
    assert closed.via_f4 == 0.0


def test_correction_routes_agree(sol_b15):
    direct = correction_direct(sol_b15)
    closed = correction_closed(sol_b15)
    assert direct == pytest.approx(closed.via_boundary, rel=1e-6)
    assert closed.via_boundary == pytest.approx(closed.via_f4, abs=1e-8)


def test_correction_tail_is_negligible(sol_b15):
    full = correction_direct(sol_b15)
    cut = correction_direct(sol_b15, t_cut=sol_b15.grid.T / 1.5)
    assert abs(full - cut) <= 1e-8


def test_correction_positive_near_critical(theta):
    b = (1.0 - 0.01) / theta.theta0
    sol = optimize_alpha_halfplane(b, UNIT_GRID)
    closed = correction_closed(sol)
    assert closed.via_boundary > 0.0
    assert closed.via_f4 > 0.0
