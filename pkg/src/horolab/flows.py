"""Geodesic and horocycle flows on frames, the annulus model, Busemann functions.

A frame is a :class:`MoebiusTransform`; the flows act by right
multiplication.  The annulus is the plane minus the origin modulo +-1, the
quotient of the frame space by the horocycle flow, and the projection to it
keeps the first column of the frame matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FlowOverflow, PreconditionError
from .moebius import (
    INF,
    MoebiusTransform,
    apply_boundary,
    apply_uhp,
    is_infinite,
    uhp_distance,
)

Frame = MoebiusTransform

MAX_FLOW_TIME = 1400.0


def geodesic_flow(f: Frame, t: float) -> Frame:
    if abs(t) > MAX_FLOW_TIME:
        raise FlowOverflow(f"|t| = {abs(t)} exceeds {MAX_FLOW_TIME}")
    e = math.exp(t / 2.0)
    return MoebiusTransform.from_unit_entries(f.a * e, f.b / e, f.c * e, f.d / e)


def horocycle_flow(f: Frame, s: float) -> Frame:
    return MoebiusTransform.from_unit_entries(f.a, f.a * s + f.b, f.c, f.c * s + f.d)


def project_base(f: Frame) -> complex:
    return apply_uhp(f, 1j)


def frame_endpoint(f: Frame) -> float:
    return apply_boundary(f, INF)


def frame_toward(z: complex, xi: float) -> Frame:
    """Frame based at ``z`` whose geodesic runs toward ``xi``."""
    sy = math.sqrt(z.imag)
    if is_infinite(xi):
        theta = 0.0
    else:
        theta = math.atan2(1.0, (xi - z.real) / z.imag)
    ct, st = math.cos(theta), math.sin(theta)
    # translate-scale (sends i to z) times rotation (sends infinity to the local target)
    return MoebiusTransform(sy * ct + z.real / sy * st, -sy * st + z.real / sy * ct, st / sy, ct / sy)


def ray_point(z: complex, xi: float, t: float) -> complex:
    """Point at arclength ``t`` on the unit-speed geodesic ray from ``z`` toward ``xi``."""
    return project_base(geodesic_flow(frame_toward(z, xi), t))


def frame_angle(f: Frame) -> float:
    """Euclidean direction angle of the frame's tangent vector at its base point."""
    return math.pi / 2.0 - 2.0 * math.atan2(f.c, f.d)


def frame_distance(f1: Frame, f2: Frame) -> float:
    """Base-point distance plus the wrapped difference of direction angles."""
    da = math.remainder(frame_angle(f1) - frame_angle(f2), 2.0 * math.pi)
    return uhp_distance(project_base(f1), project_base(f2)) + abs(da)


@dataclass(frozen=True)
class AnnulusPoint:
    """Nonzero vector modulo +-1, stored with ``p2 > 0`` or ``p2 == 0, p1 > 0``."""

    p1: float
    p2: float

    def __post_init__(self):
        p1, p2 = float(self.p1), float(self.p2)
        if p1 == 0.0 and p2 == 0.0:
            raise PreconditionError("annulus point must be nonzero")
        if p2 < 0.0 or (p2 == 0.0 and p1 < 0.0):
            p1, p2 = -p1, -p2
        object.__setattr__(self, "p1", p1 + 0.0)
        object.__setattr__(self, "p2", p2 + 0.0)

    @classmethod
    def toward(cls, xi: float, norm: float = 1.0) -> "AnnulusPoint":
        """The point of norm ``norm`` on the ray lying over ``xi``."""
        if is_infinite(xi):
            return cls(norm, 0.0)
        h = math.hypot(xi, 1.0)
        return cls(norm * xi / h, norm / h)

    @classmethod
    def from_angle(cls, theta: float, norm: float = 1.0) -> "AnnulusPoint":
        return cls(norm * math.cos(theta), norm * math.sin(theta))

    @property
    def norm(self) -> float:
        return math.hypot(self.p1, self.p2)

    @property
    def angle(self) -> float:
        """Polar angle in ``[0, pi)``."""
        return math.atan2(self.p2, self.p1) % math.pi

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2])

    def scaled(self, lam: float) -> "AnnulusPoint":
        return AnnulusPoint(lam * self.p1, lam * self.p2)

    def moved_by(self, m: MoebiusTransform) -> "AnnulusPoint":
        """Linear action of ``m`` on the column vector."""
        return AnnulusPoint(m.a * self.p1 + m.b * self.p2, m.c * self.p1 + m.d * self.p2)


def project_annulus(f: Frame) -> AnnulusPoint:
    return AnnulusPoint(f.a, f.c)


def annulus_to_boundary(p: AnnulusPoint) -> float:
    if p.p2 == 0.0:
        return INF
    return p.p1 / p.p2


def busemann(xi: float, z: complex) -> float:
    """Busemann function toward ``xi``, normalized to vanish at ``i``."""
    x, y = z.real, z.imag
    if is_infinite(xi):
        return -math.log(y)
    if abs(xi) > 1.0:
        # divide through by xi^2 so huge xi neither overflows nor cancels
        u, v, inv = x / xi, y / xi, 1.0 / xi
        return math.log(((u - 1.0) ** 2 + v * v) / ((inv * inv + 1.0) * y))
    return math.log(((x - xi) ** 2 + y * y) / ((1.0 + xi * xi) * y))


def busemann_arrays(xi: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if is_infinite(xi):
        return -np.log(y)
    if abs(xi) > 1.0:
        u, v, inv = x / xi, y / xi, 1.0 / xi
        return np.log(((u - 1.0) ** 2 + v * v) / ((inv * inv + 1.0) * y))
    return np.log(((x - xi) ** 2 + y * y) / ((1.0 + xi * xi) * y))


def busemann_limit_estimate(xi: float, z: complex, t: float) -> float:
    """``d(z, ray(t)) - t`` for the unit-speed ray from ``i`` toward ``xi``."""
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")
    return uhp_distance(z, ray_point(1j, xi, t)) - t


def signed_horocycle_distance(p: AnnulusPoint) -> float:
    """Signed distance from ``i`` to the horocycle of ``p`` (negative inside)."""
    return 2.0 * math.log(p.norm)


def horodisk_contains(p: AnnulusPoint, z: complex) -> bool:
    return busemann(annulus_to_boundary(p), z) < -signed_horocycle_distance(p)


def asymptotic_offset(z1: complex, z2: complex, xi: float) -> float:
    """Time shift ``r`` with ``d(ray_z1(t + r), ray_z2(t)) -> 0`` for rays toward ``xi``."""
    return busemann(xi, z1) - busemann(xi, z2)
