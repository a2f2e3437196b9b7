import numpy as np
import pytest

from surfsc import (
    InvalidParameterError,
    coefficient_row,
    integrate,
    limiting_check,
    make_grid,
    optimize_alpha_halfplane,
    perturbation_check,
    sign_scan,
    sweep,
)

from conftest import UNIT_GRID


def test_row_basics(coeff_b15):
    row = coeff_b15
    assert row.c1 > 0.0
    assert row.converged
    assert not row.near_critical
    assert row.c1_cross_residual <= 1e-6
    assert row.c2 == pytest.approx(2.0 * 1.5 * row.correction, rel=1e-14)


def test_row_rejects_out_of_regime():
    with pytest.raises(InvalidParameterError):
        coefficient_row(2.0, UNIT_GRID)


def test_c2_positive_near_critical(theta):
    b = (1.0 - 0.01) / theta.theta0
    row = coefficient_row(b, UNIT_GRID)
    assert row.c2 > 0.0


def test_near_critical_flag(theta):
    b = (1.0 - 5e-4) / theta.theta0
    row = coefficient_row(b, UNIT_GRID)
    assert row.near_critical


def test_c1_against_refined_cold_solve(coeff_b15):
    fine = make_grid(20.0, 160000)
    sol = optimize_alpha_halfplane(1.5, fine)
    quartic = integrate(sol.profile**4, fine)
    assert coeff_b15.c1 == pytest.approx(quartic, abs=1e-5)


def test_sweep_rows_and_monotone_c1():
    rows = sweep(1.1, 1.6, 6, UNIT_GRID)
    assert len(rows) == 6
    assert [r.b for r in rows] == pytest.approx(list(np.linspace(1.1, 1.6, 6)))
    c1 = [r.c1 for r in rows]
    assert all(a > b for a, b in zip(c1, c1[1:]))


def test_sweep_warm_matches_cold():
    warm = sweep(1.3, 1.5, 3, UNIT_GRID)
    cold = sweep(1.3, 1.5, 3, UNIT_GRID, cold_start=True)
    for w, c in zip(warm, cold):
        assert w.c1 == pytest.approx(c.c1, rel=1e-9)
        assert w.c2 == pytest.approx(c.c2, rel=1e-8)


def test_sweep_parallel_matches_serial():
    serial = sweep(1.3, 1.5, 3, UNIT_GRID, cold_start=True)
    parallel = sweep(1.3, 1.5, 3, UNIT_GRID, max_workers=3)
    for s, p in zip(serial, parallel):
        assert s.b == p.b
        assert s.c1 == pytest.approx(p.c1, rel=1e-12)


def test_sweep_invalid_range():
    with pytest.raises(InvalidParameterError):
        sweep(1.5, 1.5, 1, UNIT_GRID)
    with pytest.raises(InvalidParameterError):
        sweep(1.5, 1.4, 3, UNIT_GRID)
    with pytest.raises(InvalidParameterError):
        sweep(1.3, 1.5, 1, UNIT_GRID)


def test_sign_scan_no_root_near_critical(theta):
    hi = theta.critical_b
    res = sign_scan((hi - 0.1, hi - 0.005), resolution=0.02, grid=UNIT_GRID)
    assert res.root is None
    assert res.bracket is None
    assert all(v > 0.0 for v in res.c2_scanned)


def test_sign_scan_is_stable_at_doubled_resolution():
    res1 = sign_scan((1.2, 1.5), resolution=0.1, grid=UNIT_GRID)
    res2 = sign_scan((1.2, 1.5), resolution=0.05, grid=UNIT_GRID)
    assert res1.root is None and res2.root is None
    assert all(v > 0.0 for v in res1.c2_scanned + res2.c2_scanned)


def test_sign_scan_degenerate_window():
    with pytest.raises(InvalidParameterError):
        sign_scan((1.4, 1.4), resolution=0.01, grid=UNIT_GRID)


def test_limiting_check_preconditions(theta):
    with pytest.raises(InvalidParameterError):
        limiting_check([(1.0 - 0.5) / theta.theta0], theta, UNIT_GRID)
    with pytest.raises(InvalidParameterError):
        limiting_check([(1.0 - 1e-4) / theta.theta0], theta, UNIT_GRID)


def test_limiting_ratios_approach_one(theta):
    deltas = (0.04, 0.02)
    rows = limiting_check([(1.0 - d) / theta.theta0 for d in deltas], theta, UNIT_GRID)
    for row in rows:
        assert row.rho1 == pytest.approx(1.0, abs=0.1)
        assert row.rho2 == pytest.approx(1.0, abs=0.1)
    assert abs(rows[1].rho1 - 1.0) < abs(rows[0].rho1 - 1.0)
    assert rows[1].alpha_gap < rows[0].alpha_gap


def test_perturbation_zero_curvature():
    diag = perturbation_check(1.5, 0.0, [1e-2, 3e-3, 1e-3], grid=UNIT_GRID)
    assert all(d <= 1e-8 for d in diag.deviations)
    assert diag.slope == 0.0


def test_perturbation_validation():
    with pytest.raises(InvalidParameterError):
        perturbation_check(1.5, 1.0, [1e-2, 3e-3], grid=UNIT_GRID)
    with pytest.raises(InvalidParameterError):
        perturbation_check(1.5, 1.0, [1e-3, 3e-3, 1e-2], grid=UNIT_GRID)
    with pytest.raises(InvalidParameterError):
        perturbation_check(1.5, 1.0, [1e-2, 3e-3, -1e-3], grid=UNIT_GRID)
