"""Smooth closed boundary curves and the boundary quartic-mass prediction.

Curves come from analytic descriptors (circle, ellipse, radial Fourier
perturbation of the unit circle), so arclength, curvature and segment
integrals are evaluated from closed-form derivatives; dense tables are kept
for lookups and plotting.  Predictions combine a coefficient row with
segment geometry:

    mass(segment)  = eps * C1 * |segment| + eps^2 * C2 * int_segment k ds
    density(s)     = eps * C1 + eps^2 * C2 * k(s)    per unit arclength

Segments are arclength intervals: they correspond to regions meeting the
boundary at right angles, the only shape of region for which the two-term
expansion holds.  Oblique regions are deliberately not representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from shapely.geometry import LineString

from .coefficients import CoefficientRow
from .errors import GeometryError, UnconvergedInputError

TABLE_SAMPLES = 8192
GAUSS_BONNET_TOL = 1e-8
FOURIER_SMOOTHNESS_BOUND = 0.5


@dataclass(frozen=True)
class CircleDescriptor:
    radius: float

    def validate(self) -> None:
        if not np.isfinite(self.radius) or self.radius <= 0.0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class EllipseDescriptor:
    a: float
    b_axis: float

    def validate(self) -> None:
        if min(self.a, self.b_axis) <= 0.0:
            raise GeometryError(
                f"ellipse semi-axes must be positive, got ({self.a}, {self.b_axis})"
            )


@dataclass(frozen=True)
class FourierRadialDescriptor:
    """r(theta) = 1 + sum a_m cos(m*theta); coeffs maps m -> a_m."""

    coeffs: tuple[tuple[int, float], ...]

    def validate(self) -> None:
        if not self.coeffs:
            raise GeometryError("fourier descriptor needs at least one coefficient")
        for m, _ in self.coeffs:
            if m < 1:
                raise GeometryError(f"fourier mode index must be >= 1, got {m}")
        weight = sum(m * m * abs(a) for m, a in self.coeffs)
        if weight >= FOURIER_SMOOTHNESS_BOUND:
            raise GeometryError(
                "smoothness-violation: sum m^2 |a_m| = "
                f"{weight:.4f} >= {FOURIER_SMOOTHNESS_BOUND}"
            )


Descriptor = CircleDescriptor | EllipseDescriptor | FourierRadialDescriptor


@dataclass(frozen=True)
class BoundarySegment:
    """Arclength interval [s_a, s_b] on the boundary, 0 <= s_a < s_b <= L."""

    s_a: float
    s_b: float

    def validate(self, length: float) -> None:
        if not (0.0 <= self.s_a < self.s_b <= length + 1e-12):
            raise GeometryError(
                f"segment-out-of-range: [{self.s_a}, {self.s_b}] not inside "
                f"[0, {length}]"
            )


class BoundaryCurve:
    """Closed plane curve with arclength and curvature tables.

    Construct through `curve_from_descriptor`, which runs the smoothness,
    simplicity and total-turning checks.
    """

    def __init__(self, descriptor: Descriptor, samples: int = TABLE_SAMPLES):
        self.descriptor = descriptor
        self.samples = samples
        step = 2.0 * math.pi / samples
        theta = np.arange(samples + 1) * step
        speeds = self.speed(theta)
        mids = self.speed(theta[:-1] + 0.5 * step)
        # cumulative Simpson with analytic midpoints: O(step^4) arclength
        increments = (step / 6.0) * (speeds[:-1] + 4.0 * mids + speeds[1:])
        s = np.concatenate([[0.0], np.cumsum(increments)])
        self.theta_table = theta
        self.s_table = s
        self.k_table = self.curvature(theta)
        self.length = float(s[-1])

    # analytic geometry of the supported descriptor families

    def point(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.descriptor
        theta = np.asarray(theta, dtype=float)
        if isinstance(d, CircleDescriptor):
            return d.radius * np.cos(theta), d.radius * np.sin(theta)
        if isinstance(d, EllipseDescriptor):
            return d.a * np.cos(theta), d.b_axis * np.sin(theta)
        r = self._radial(theta)
        return r * np.cos(theta), r * np.sin(theta)

    def _radial(self, theta, order: int = 0):
        d = self.descriptor
        out = np.ones_like(theta) if order == 0 else np.zeros_like(theta)
        for m, a in d.coeffs:
            if order == 0:
                out = out + a * np.cos(m * theta)
            elif order == 1:
                out = out - a * m * np.sin(m * theta)
            else:
                out = out - a * m * m * np.cos(m * theta)
        return out

    def speed(self, theta) -> np.ndarray:
        d = self.descriptor
        theta = np.asarray(theta, dtype=float)
        if isinstance(d, CircleDescriptor):
            return np.full_like(theta, d.radius)
        if isinstance(d, EllipseDescriptor):
            return np.sqrt(
                d.a**2 * np.sin(theta) ** 2 + d.b_axis**2 * np.cos(theta) ** 2
            )
        r = self._radial(theta)
        dr = self._radial(theta, 1)
        return np.sqrt(r * r + dr * dr)

    def curvature(self, theta) -> np.ndarray:
        """Signed curvature, positive for a convex domain traversed
        counterclockwise."""
        d = self.descriptor
        theta = np.asarray(theta, dtype=float)
        if isinstance(d, CircleDescriptor):
            return np.full_like(theta, 1.0 / d.radius)
        if isinstance(d, EllipseDescriptor):
            return d.a * d.b_axis / self.speed(theta) ** 3
        r = self._radial(theta)
        dr = self._radial(theta, 1)
        ddr = self._radial(theta, 2)
        return (r * r + 2.0 * dr * dr - r * ddr) / (r * r + dr * dr) ** 1.5

    # arclength parametrization

    def arclength_at(self, theta: float) -> float:
        """Arclength from 0 to theta, table node plus a local Gauss rule."""
        theta = float(theta)
        step = 2.0 * math.pi / self.samples
        j = min(int(theta / step), self.samples - 1)
        base = self.s_table[j]
        lo = self.theta_table[j]
        if theta <= lo:
            return float(base)
        # 4-point Gauss-Legendre on [lo, theta]
        xg = np.array([-0.8611363115940526, -0.3399810435848563,
                       0.3399810435848563, 0.8611363115940526])
        wg = np.array([0.3478548451374538, 0.6521451548625461,
                       0.6521451548625461, 0.3478548451374538])
        half = 0.5 * (theta - lo)
        mid = 0.5 * (theta + lo)
        return float(base + half * np.dot(wg, self.speed(mid + half * xg)))

    def theta_of_s(self, s: float) -> float:
        """Invert the (monotone) arclength map to machine precision."""
        if not 0.0 <= s <= self.length + 1e-12:
            raise GeometryError(f"arclength {s} outside [0, {self.length}]")
        s = min(max(s, 0.0), self.length)
        theta = float(np.interp(s, self.s_table, self.theta_table))
        for _ in range(8):
            err = self.arclength_at(theta) - s
            if abs(err) <= 1e-14 * max(1.0, self.length):
                break
            theta -= err / float(self.speed(theta))
            theta = min(max(theta, 0.0), 2.0 * math.pi)
        return theta

    def curvature_of_s(self, s: float) -> float:
        return float(self.curvature(self.theta_of_s(s)))

    def total_turning(self) -> float:
        """Integral of k ds around the whole boundary; 2*pi for any simple
        closed curve, kept as a construction self-test."""
        return curvature_integral(self, BoundarySegment(0.0, self.length))


def curve_from_descriptor(
    descriptor: Descriptor, samples: int = TABLE_SAMPLES
) -> BoundaryCurve:
    """Build a curve, rejecting non-smooth or self-intersecting descriptors."""
    descriptor.validate()
    if samples < 4096:
        raise GeometryError(f"need at least 4096 samples, got {samples}")
    curve = BoundaryCurve(descriptor, samples)
    theta = np.linspace(0.0, 2.0 * math.pi, 2048, endpoint=False)
    x, y = curve.point(theta)
    ring = LineString(np.column_stack([np.append(x, x[0]), np.append(y, y[0])]))
    if not ring.is_simple:
        raise GeometryError("non-simple-curve: boundary self-intersects")
    turning = curve.total_turning()
    if abs(turning - 2.0 * math.pi) > GAUSS_BONNET_TOL:
        raise GeometryError(
            f"total turning {turning!r} deviates from 2*pi by "
            f"{abs(turning - 2.0 * math.pi):.2e}"
        )
    return curve


def curvature_integral(curve: BoundaryCurve, segment: BoundarySegment) -> float:
    """int k(s) ds over the segment, by adaptive quadrature in theta."""
    segment.validate(curve.length)
    theta_a = curve.theta_of_s(segment.s_a)
    theta_b = curve.theta_of_s(segment.s_b)
    value, _ = quad(
        lambda th: float(curve.curvature(th) * curve.speed(th)),
        theta_a,
        theta_b,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=200,
    )
    return float(value)


@dataclass(frozen=True)
class QuarticMassPrediction:
    """Two-term boundary-mass prediction over a segment."""

    leading: float
    correction: float

    @property
    def total(self) -> float:
        return self.leading + self.correction


def _require_row(coeff: CoefficientRow) -> None:
    if not coeff.converged:
        raise UnconvergedInputError(
            f"coefficient row at b={coeff.b} is not converged"
        )


def predict_quartic_mass(
    curve: BoundaryCurve,
    segment: BoundarySegment,
    eps: float,
    coeff: CoefficientRow,
) -> QuarticMassPrediction:
    """Predicted quartic mass of the layer over a boundary segment.

    Pure formula evaluation: eps*C1*|segment| + eps^2*C2*int k ds.
    """
    if not 0.0 < eps < 0.2:
        raise GeometryError(f"eps must be in (0, 0.2), got {eps}")
    _require_row(coeff)
    segment.validate(curve.length)
    leading = eps * coeff.c1 * (segment.s_b - segment.s_a)
    correction = eps**2 * coeff.c2 * curvature_integral(curve, segment)
    return QuarticMassPrediction(leading=leading, correction=correction)


def predict_density_per_arclength(
    curve: BoundaryCurve, s: float, eps: float, coeff: CoefficientRow
) -> float:
    """Quartic mass per unit arclength at boundary position s."""
    if not 0.0 < eps < 0.2:
        raise GeometryError(f"eps must be in (0, 0.2), got {eps}")
    _require_row(coeff)
    return eps * coeff.c1 + eps**2 * coeff.c2 * curve.curvature_of_s(s)


def parse_curve_descriptor(text: str) -> Descriptor:
    """Parse CLI syntax: circle:R=1 | ellipse:a=2,b=1 | fourier:a2=0.05,a3=0.01."""
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    fields: dict[str, float] = {}
    if body:
        for item in body.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise GeometryError(f"bad curve field {item!r} in {text!r}")
            try:
                fields[key.strip()] = float(val)
            except ValueError as exc:
                raise GeometryError(f"bad curve value {item!r} in {text!r}") from exc
    if kind == "circle":
        return CircleDescriptor(radius=fields.get("R", fields.get("r", 1.0)))
    if kind == "ellipse":
        if "a" not in fields or "b" not in fields:
            raise GeometryError("ellipse descriptor needs a= and b=")
        return EllipseDescriptor(a=fields["a"], b_axis=fields["b"])
    if kind == "fourier":
        coeffs = []
        for key, val in fields.items():
            if not key.startswith("a") or not key[1:].isdigit():
                raise GeometryError(f"bad fourier coefficient name {key!r}")
            coeffs.append((int(key[1:]), val))
        return FourierRadialDescriptor(coeffs=tuple(sorted(coeffs)))
    raise GeometryError(f"unknown curve kind {kind!r}")
