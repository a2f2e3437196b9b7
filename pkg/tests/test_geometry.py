import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad

from surfsc import (
    BoundarySegment,
    CircleDescriptor,
    EllipseDescriptor,
    FourierRadialDescriptor,
    GeometryError,
    UnconvergedInputError,
    curvature_integral,
    curve_from_descriptor,
    parse_curve_descriptor,
    predict_density_per_arclength,
    predict_quartic_mass,
)

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def circle():
    return curve_from_descriptor(CircleDescriptor(radius=2.0))


@pytest.fixture(scope="module")
def ellipse():
    return curve_from_descriptor(EllipseDescriptor(a=2.0, b_axis=1.0))


@pytest.fixture(scope="module")
def wavy():
    return curve_from_descriptor(FourierRadialDescriptor(coeffs=((2, 0.05),)))


def test_circle_length_and_curvature(circle):
    assert abs(circle.length - 4.0 * math.pi) <= 1e-10
    theta = np.linspace(0.0, TWO_PI, 100)
    assert np.max(np.abs(circle.curvature(theta) - 0.5)) <= 1e-10


def test_total_turning(circle, ellipse, wavy):
    for curve in (circle, ellipse, wavy):
        assert abs(curve.total_turning() - TWO_PI) <= 1e-8


def test_circle_segment_integrals(circle):
    full = curvature_integral(circle, BoundarySegment(0.0, circle.length))
    half = curvature_integral(circle, BoundarySegment(0.0, circle.length / 2))
    assert abs(full - TWO_PI) <= 1e-9
    assert abs(half - math.pi) <= 1e-9


def test_ellipse_quarter_against_riemann(ellipse):
    quarter = curvature_integral(ellipse, BoundarySegment(0.0, ellipse.length / 4))
    n = 10**6
    s_mid = (np.arange(n) + 0.5) * (ellipse.length / 4) / n
    theta = np.interp(s_mid, ellipse.s_table, ellipse.theta_table)
    riemann = float(np.sum(ellipse.curvature(theta)) * (ellipse.length / 4) / n)
    assert quarter == pytest.approx(riemann, abs=1e-7)


def test_wavy_curvature_peaks_on_long_axis(wavy):
    theta = np.linspace(0.0, TWO_PI, 200001)
    k = wavy.curvature(theta)
    peak = theta[np.argmax(k)]
    distance = min(peak, abs(peak - math.pi), abs(peak - TWO_PI))
    assert distance <= 1e-3


def test_segment_additivity(ellipse, coeff_b15):
    s_mid = 0.37 * ellipse.length
    first = predict_quartic_mass(ellipse, BoundarySegment(0.0, s_mid), 0.05, coeff_b15)
    second = predict_quartic_mass(
        ellipse, BoundarySegment(s_mid, ellipse.length), 0.05, coeff_b15
    )
    full = predict_quartic_mass(
        ellipse, BoundarySegment(0.0, ellipse.length), 0.05, coeff_b15
    )
    assert first.total + second.total == pytest.approx(full.total, abs=1e-12)


def test_unit_circle_prediction_closed_form(coeff_b15):
    curve = curve_from_descriptor(CircleDescriptor(radius=1.0))
    eps = 0.05
    pred = predict_quartic_mass(curve, BoundarySegment(0.0, curve.length), eps, coeff_b15)
    assert pred.leading == pytest.approx(TWO_PI * eps * coeff_b15.c1, rel=1e-10)
    assert pred.correction == pytest.approx(TWO_PI * eps**2 * coeff_b15.c2, rel=1e-9)
    assert pred.total == pytest.approx(
        TWO_PI * (eps * coeff_b15.c1 + eps**2 * coeff_b15.c2), rel=1e-9
    )


def test_density_constant_on_circle(coeff_b15, circle):
    values = [
        predict_density_per_arclength(circle, s, 0.05, coeff_b15)
        for s in np.linspace(0.0, circle.length, 7)
    ]
    assert np.ptp(values) <= 1e-12


def test_density_tracks_curvature_on_ellipse(coeff_b15, ellipse):
    # curvature is maximal at theta = 0 (long-axis end) for a > b
    dense = predict_density_per_arclength(ellipse, 0.0, 0.05, coeff_b15)
    sparse = predict_density_per_arclength(ellipse, ellipse.length / 4, 0.05, coeff_b15)
    assert dense > sparse


def test_density_integrates_to_mass(coeff_b15, ellipse):
    seg = BoundarySegment(0.0, ellipse.length)
    pred = predict_quartic_mass(ellipse, seg, 0.05, coeff_b15)
    total, _ = quad(
        lambda s: predict_density_per_arclength(ellipse, s, 0.05, coeff_b15),
        0.0,
        ellipse.length,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    assert total == pytest.approx(pred.total, abs=1e-9)


def test_reparametrization_invariance():
    for samples in (8192, 16384):
        pass
    coarse = curve_from_descriptor(EllipseDescriptor(a=2.0, b_axis=1.0), samples=8192)
    fine = curve_from_descriptor(EllipseDescriptor(a=2.0, b_axis=1.0), samples=16384)
    assert abs(coarse.length - fine.length) <= 1e-9
    assert abs(coarse.total_turning() - fine.total_turning()) <= 1e-9


def test_smoothness_violation_rejected():
    with pytest.raises(GeometryError):
        curve_from_descriptor(FourierRadialDescriptor(coeffs=((5, 0.03),)))


def test_descriptor_validation():
    with pytest.raises(GeometryError):
        curve_from_descriptor(CircleDescriptor(radius=-1.0))
    with pytest.raises(GeometryError):
        curve_from_descriptor(EllipseDescriptor(a=0.0, b_axis=1.0))
    with pytest.raises(GeometryError):
        curve_from_descriptor(FourierRadialDescriptor(coeffs=()))
    with pytest.raises(GeometryError):
        curve_from_descriptor(FourierRadialDescriptor(coeffs=((0, 0.1),)))


def test_segment_validation(circle, coeff_b15):
    with pytest.raises(GeometryError):
        curvature_integral(circle, BoundarySegment(1.0, 0.5))
    with pytest.raises(GeometryError):
        curvature_integral(circle, BoundarySegment(0.0, circle.length + 1.0))
    with pytest.raises(GeometryError):
        predict_density_per_arclength(circle, circle.length + 1.0, 0.05, coeff_b15)


def test_eps_range_guard(circle, coeff_b15):
    seg = BoundarySegment(0.0, 1.0)
    with pytest.raises(GeometryError):
        predict_quartic_mass(circle, seg, 0.25, coeff_b15)
    with pytest.raises(GeometryError):
        predict_quartic_mass(circle, seg, 0.0, coeff_b15)


def test_unconverged_row_rejected(circle, coeff_b15):
    broken = dataclasses.replace(coeff_b15, converged=False)
    with pytest.raises(UnconvergedInputError):
        predict_quartic_mass(circle, BoundarySegment(0.0, 1.0), 0.05, broken)


def test_parse_curve_descriptor():
    assert parse_curve_descriptor("circle:R=2") == CircleDescriptor(radius=2.0)
    assert parse_curve_descriptor("ellipse:a=2,b=1") == EllipseDescriptor(
        a=2.0, b_axis=1.0
    )
    assert parse_curve_descriptor("fourier:a2=0.05,a3=0.01") == FourierRadialDescriptor(
        coeffs=((2, 0.05), (3, 0.01))
    )
    with pytest.raises(GeometryError):
        parse_curve_descriptor("square:side=1")
    with pytest.raises(GeometryError):
        parse_curve_descriptor("ellipse:a=2")
    with pytest.raises(GeometryError):
        parse_curve_descriptor("fourier:b2=0.05")
