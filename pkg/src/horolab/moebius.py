"""PSL(2,R) matrix algebra and upper-half-plane geometry.

Points of the hyperbolic plane are Python complex numbers with positive
imaginary part.  Points of the circle at infinity are floats, with
``math.inf`` standing for the point at infinity (``-inf`` is accepted and
means the same point).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrix, NotHyperbolic, NumericUnderflow, PreconditionError

DET_TOL = 1e-12
CLASSIFY_TOL = 1e-9
_TINY = 1e-300
# |det - 1| below rtol * (|ad| + |bc|) is rounding noise, not drift worth rescaling;
# products of unit matrices get a looser rtol because their error accumulates
INPUT_DET_RTOL = 8.0 * float(np.finfo(float).eps)
PRODUCT_DET_RTOL = 1e-9

INF = math.inf


def is_infinite(xi: float) -> bool:
    return math.isinf(xi)


def uhp_point(x: float, y: float) -> complex:
    if not y > 0:
        raise PreconditionError(f"upper half plane point needs y > 0, got y={y!r}")
    return complex(x, y)


def _canonical_sign(a, b, c, d):
    tr = a + d
    if abs(tr) <= DET_TOL:
        for v in (c, a, b):
            if v != 0.0:
                flip = v < 0
                break
        else:
            flip = False
    else:
        flip = tr < 0
    if flip:
        return -a, -b, -c, -d
    return a, b, c, d


def _normalize(a, b, c, d, rtol=INPUT_DET_RTOL):
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c) and math.isfinite(d)):
        raise DegenerateMatrix(f"non-finite entries {(a, b, c, d)!r}")
    ad, bc = a * d, b * c
    det = ad - bc
    # for large entries the computed det is dominated by cancellation error;
    # rescaling by it would corrupt entries that are themselves accurate
    if abs(det - 1.0) > rtol * (abs(ad) + abs(bc)):
        if not det > _TINY:
            raise DegenerateMatrix(f"determinant {det!r} is not positive")
        s = math.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    return _canonical_sign(a, b, c, d)


@dataclass(frozen=True)
class MoebiusTransform:
    """Sign-normalized unit-determinant real 2x2 matrix ``[[a, b], [c, d]]``.

    Construction rescales by ``sqrt(det)`` unless ``det`` is within rounding
    noise of 1, and picks the representative of ``+-M`` with positive trace
    (ties broken on the first nonzero of c, a, b).
    Also used as a frame of the unit tangent bundle: the matrix sends the
    upward unit vector at ``i`` to the frame.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = _normalize(float(self.a), float(self.b), float(self.c), float(self.d))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_unit_entries(cls, a, b, c, d) -> "MoebiusTransform":
        """Build from entries of a product of unit-determinant matrices."""
        out = object.__new__(cls)
        for name, v in zip("abcd", _normalize(float(a), float(b), float(c), float(d), PRODUCT_DET_RTOL)):
            object.__setattr__(out, name, v)
        return out

    @classmethod
    def from_array(cls, m) -> "MoebiusTransform":
        m = np.asarray(m, dtype=float).reshape(4)
        return cls(m[0], m[1], m[2], m[3])

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MoebiusTransform") -> "MoebiusTransform":
        return compose(self, other)

    def inverse(self) -> "MoebiusTransform":
        return inverse(self)

    def __call__(self, z):
        if isinstance(z, complex):
            return apply_uhp(self, z)
        return apply_boundary(self, z)

    def power(self, n: int) -> "MoebiusTransform":
        base = self if n >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(n)):
            out = out @ base
        return out


IDENTITY = MoebiusTransform(1.0, 0.0, 0.0, 1.0)


def compose(m1: MoebiusTransform, m2: MoebiusTransform) -> MoebiusTransform:
    """Matrix product ``m1 @ m2``, renormalized."""
    a = m1.a * m2.a + m1.b * m2.c
    b = m1.a * m2.b + m1.b * m2.d
    c = m1.c * m2.a + m1.d * m2.c
    d = m1.c * m2.b + m1.d * m2.d
    return MoebiusTransform.from_unit_entries(a, b, c, d)


def inverse(m: MoebiusTransform) -> MoebiusTransform:
    return MoebiusTransform.from_unit_entries(m.d, -m.b, -m.c, m.a)


def apply_uhp(m: MoebiusTransform, z: complex) -> complex:
    den = m.c * z + m.d
    den2 = den.real * den.real + den.imag * den.imag
    if not 0.0 < den2 < math.inf:
        raise NumericUnderflow(f"denominator |cz + d|^2 = {den2!r} out of range")
    y = z.imag / den2
    if not y > _TINY:
        raise NumericUnderflow(f"image point has Im = {y!r}")
    num = (m.a * z + m.b) * den.conjugate()
    return complex(num.real / den2, y)


def apply_boundary(m: MoebiusTransform, xi: float) -> float:
    if is_infinite(xi):
        return INF if m.c == 0.0 else m.a / m.c
    den = m.c * xi + m.d
    if den == 0.0:
        return INF
    return (m.a * xi + m.b) / den


class Kind(enum.Enum):
    IDENTITY = "identity"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class IsometryClass:
    kind: Kind
    translation_length: float | None = None

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind is Kind.HYPERBOLIC


def classify(m: MoebiusTransform) -> IsometryClass:
    tr = abs(m.trace)
    if (abs(m.a - 1.0) <= CLASSIFY_TOL and abs(m.d - 1.0) <= CLASSIFY_TOL
            and abs(m.b) <= CLASSIFY_TOL and abs(m.c) <= CLASSIFY_TOL):
        return IsometryClass(Kind.IDENTITY)
    if tr > 2.0 + CLASSIFY_TOL:
        return IsometryClass(Kind.HYPERBOLIC, translation_length(m))
    if tr >= 2.0 - CLASSIFY_TOL:
        return IsometryClass(Kind.PARABOLIC)
    return IsometryClass(Kind.ELLIPTIC)


def translation_length(m: MoebiusTransform) -> float:
    tr = abs(m.trace)
    return 2.0 * math.acosh(max(tr / 2.0, 1.0))


def fixed_points(m: MoebiusTransform) -> tuple[float, float]:
    """Return ``(attracting, repelling)`` boundary fixed points of a hyperbolic ``m``."""
    if not classify(m).is_hyperbolic:
        raise NotHyperbolic(f"{m} is not hyperbolic")
    a, b, c, d = m.a, m.b, m.c, m.d
    tr = a + d
    s = math.sqrt((tr - 2.0) * (tr + 2.0))
    amd = a - d

    # (lambda - d) and (lambda - a) are computed in whichever form avoids cancellation
    def root(sign):
        lam = (tr + sign * s) / 2.0
        if sign * amd >= 0.0:
            num = (amd + sign * s) / 2.0
            return INF if c == 0.0 else num / c
        den = (-amd + sign * s) / 2.0
        return b / den if den != 0.0 else (INF if c == 0.0 else (lam - d) / c)

    return root(1.0) + 0.0, root(-1.0) + 0.0


def uhp_distance(z: complex, w: complex) -> float:
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


# Vectorized helpers over arrays of shape (..., 4) holding (a, b, c, d).

def normalize_rows(m: np.ndarray, rtol: float = INPUT_DET_RTOL) -> np.ndarray:
    """Renormalize determinant (when off by more than rounding) and canonicalize sign, row-wise."""
    m = np.asarray(m, dtype=float)
    ad, bc = m[..., 0] * m[..., 3], m[..., 1] * m[..., 2]
    det = ad - bc
    if not np.all(np.isfinite(m)):
        raise DegenerateMatrix("non-finite entries in matrix batch")
    fix = np.abs(det - 1.0) > rtol * (np.abs(ad) + np.abs(bc))
    if np.any(fix & ~(det > _TINY)):
        raise DegenerateMatrix("non-positive determinant in matrix batch")
    out = m / np.where(fix, np.sqrt(np.where(fix, det, 1.0)), 1.0)[..., None]
    tr = out[..., 0] + out[..., 3]
    tie = np.abs(tr) <= DET_TOL
    flip = tr < 0
    if np.any(tie):
        first = np.where(out[..., 2] != 0, out[..., 2], np.where(out[..., 0] != 0, out[..., 0], out[..., 1]))
        flip = np.where(tie, first < 0, flip)
    return np.where(flip[..., None], -out, out)


def compose_rows(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Row-wise products ``m1 @ m2`` (broadcasting), not normalized."""
    a = m1[..., 0] * m2[..., 0] + m1[..., 1] * m2[..., 2]
    b = m1[..., 0] * m2[..., 1] + m1[..., 1] * m2[..., 3]
    c = m1[..., 2] * m2[..., 0] + m1[..., 3] * m2[..., 2]
    d = m1[..., 2] * m2[..., 1] + m1[..., 3] * m2[..., 3]
    return np.stack([a, b, c, d], axis=-1)


def inverse_rows(m: np.ndarray) -> np.ndarray:
    return np.stack([m[..., 3], -m[..., 1], -m[..., 2], m[..., 0]], axis=-1)


def orbit_of_i(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Images ``x + iy`` of ``i`` under each row."""
    a, b, c, d = m[..., 0], m[..., 1], m[..., 2], m[..., 3]
    den = c * c + d * d
    return (a * c + b * d) / den, 1.0 / den


def uhp_distance_arrays(x1, y1, x2, y2) -> np.ndarray:
    chord = np.hypot(x1 - x2, y1 - y2)
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(y1 * y2)))
