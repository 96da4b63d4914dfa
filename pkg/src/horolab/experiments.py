"""Finite-truncation experiments: return scalars, ray concatenation, orbit density.

All searches run over the ball's active set (the kernel slice for kernel
specs).  Every function here is deterministic given its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyBall, LoopTooLong, PreconditionError
from .flows import (
    AnnulusPoint,
    Frame,
    busemann,
    frame_toward,
    geodesic_flow,
    project_base,
)
from .groups import GroupBall, Word
from .moebius import (
    IDENTITY,
    MoebiusTransform,
    apply_boundary,
    apply_uhp,
    classify,
    compose_rows,
    fixed_points,
    is_infinite,
    orbit_of_i,
    translation_length,
    uhp_distance_arrays,
)

DEFAULT_C_LOW = 3.0
DEFAULT_C_HIGH = 3.2
DEFAULT_DECAY_GRID = tuple(float(t) for t in range(11))


def _active(ball: GroupBall) -> np.ndarray:
    if len(ball) == 0:
        raise EmptyBall("ball has no entries")
    return ball.active()


def _mod_pi_gap(a, b):
    d = np.abs(a - b) % np.pi
    return np.minimum(d, np.pi - d)


# ---------------------------------------------------------------- return scalars

@dataclass(frozen=True)
class ReturnCandidate:
    word: Word
    r: float
    angular_error: float


def lemma41_scan(ball: GroupBall, xi: float, angle_tol: float) -> list[ReturnCandidate]:
    """Active ``gamma`` that send the unit vector over ``xi`` close to its own ray, outward.

    ``r = 2 log|gamma p|`` and the angular error is the angle between
    ``gamma p`` and ``p`` modulo pi.  Candidates need ``r > 0`` and error
    below ``angle_tol``; they are sorted by error, ties in enumeration order.
    """
    if not 0.0 < angle_tol:
        raise PreconditionError(f"angle_tol must be positive, got {angle_tol}")
    rows = _active(ball)
    p = AnnulusPoint.toward(xi)
    m = ball.matrices[rows]
    q1 = m[:, 0] * p.p1 + m[:, 1] * p.p2
    q2 = m[:, 2] * p.p1 + m[:, 3] * p.p2
    r = np.log(q1 * q1 + q2 * q2)
    err = _mod_pi_gap(np.arctan2(q2, q1), p.angle)
    keep = np.flatnonzero((r > 0.0) & (err < angle_tol))
    keep = keep[np.argsort(err[keep], kind="stable")]
    return [ReturnCandidate(ball.word(int(rows[k])), float(r[k]), float(err[k])) for k in keep]


def return_candidate_check(ball: GroupBall, cand: ReturnCandidate, xi: float) -> tuple[float, float]:
    """Recompute ``(r, angular_error)`` from the word alone."""
    g = ball.spec.evaluate(cand.word)
    p = AnnulusPoint.toward(xi)
    q1, q2 = g.a * p.p1 + g.b * p.p2, g.c * p.p1 + g.d * p.p2
    r = math.log(q1 * q1 + q2 * q2)
    err = float(_mod_pi_gap(math.atan2(q2, q1), p.angle))
    return r, err


# ---------------------------------------------------------------- concatenation

def offset_floor_b(c: float) -> float:
    """Busemann gain toward the tangency point after ``c / 2`` along a tangent geodesic.

    Model: the horocycle ``{y = 1}`` based at infinity, tangent point ``i``;
    the geodesic through ``i`` tangent to it is the unit circle.  The frame
    at ``i`` pointing horizontally is flowed for ``c / 2``.
    """
    if not c > 0:
        raise PreconditionError(f"c must be positive, got {c}")
    s = math.sqrt(0.5)
    horizontal = MoebiusTransform(s, -s, s, s)
    w = project_base(geodesic_flow(horizontal, c / 2.0))
    return busemann(math.inf, w)


@dataclass(frozen=True)
class AxisCrossing:
    point: complex | None
    distance: float
    angle: float
    forward: bool


def axis_crossing(gamma: MoebiusTransform, xi: float) -> AxisCrossing:
    """Where the ray from ``i`` toward ``xi`` meets the axis of ``gamma``, and at what angle.

    ``angle`` is between the ray direction and the translation direction of
    ``gamma`` at the crossing; ``forward`` says it is at most pi/2.  With no
    crossing, ``point`` is None and ``angle`` is nan.
    """
    f = frame_toward(1j, xi)
    finv = f.inverse()
    att, rep = fixed_points(gamma)
    u1, u2 = apply_boundary(finv, att), apply_boundary(finv, rep)
    # in these coordinates the ray is {i y : y >= 1}
    if is_infinite(u1) or is_infinite(u2):
        u = u2 if is_infinite(u1) else u1
        if u != 0.0:
            return AxisCrossing(None, math.nan, math.nan, False)
        up = is_infinite(u1)
        return AxisCrossing(apply_uhp(f, 1j), 0.0, 0.0 if up else math.pi, up)
    prod = u1 * u2
    if not prod < 0.0 or math.sqrt(-prod) < 1.0:
        return AxisCrossing(None, math.nan, math.nan, False)
    y0 = math.sqrt(-prod)
    mid = (u1 + u2) / 2.0
    vertical = mid if u1 > u2 else -mid
    angle = math.acos(max(-1.0, min(1.0, vertical / math.hypot(y0, mid))))
    return AxisCrossing(apply_uhp(f, complex(0.0, y0)), math.log(y0), angle, vertical >= 0.0)


@dataclass(frozen=True)
class ConcatenationResult:
    xi: float
    loop: Word
    loop_length: float
    v: Frame
    v_n: Frame
    r_n: float
    chord_offset: float
    angle: float
    angle_ok: bool
    t: np.ndarray
    decay: np.ndarray

    def rows(self):
        return list(zip(self.t.tolist(), self.decay.tolist()))


def _frame_distance_rows(mats: np.ndarray, target: Frame, chunk: int = 1 << 20) -> float:
    """Minimum over rows ``eta`` of the frame distance from ``eta @ frame`` to ``target``."""
    tz = project_base(target)
    tang = math.pi / 2.0 - 2.0 * math.atan2(target.c, target.d)
    best = math.inf
    for s in range(0, len(mats), chunk):
        m = mats[s:s + chunk]
        x, y = orbit_of_i(m)
        ang = np.pi / 2.0 - 2.0 * np.arctan2(m[:, 2], m[:, 3])
        da = np.abs(np.remainder(ang - tang + np.pi, 2.0 * np.pi) - np.pi)
        d = uhp_distance_arrays(x, y, tz.real, tz.imag) + da
        best = min(best, float(d.min()))
    return best


def lemma42_construct(
    ball: GroupBall,
    xi: float,
    loop: Word,
    c: float = DEFAULT_C_LOW,
    C: float = DEFAULT_C_HIGH,
    t_grid=DEFAULT_DECAY_GRID,
) -> ConcatenationResult:
    """Build the frame ``v_n`` obtained by going around ``loop`` and measure how it shadows ``v``.

    ``v`` is the frame at ``i`` toward ``xi`` and ``v_n`` the frame at ``i``
    toward ``gamma xi``.  The loop direction is flipped when that makes its
    angle with the ray at most pi/2, and a loop shorter than ``c`` is
    replaced by its smallest power of length at least ``c``.  ``r_n`` is
    ``B_xi(gamma^-1 i)``, the time shift making the two rays asymptotic;
    ``chord_offset`` is the same shift measured from the crossing point of
    the ray with the loop axis.  ``decay(t)`` is the minimum over active
    ``eta`` of the frame distance between ``eta g^{t + r_n}(v_n)`` and
    ``g^t(v)``.
    """
    if not 0.0 < c <= C:
        raise PreconditionError(f"need 0 < c <= C, got c={c}, C={C}")
    rows = _active(ball)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0 or np.any(np.diff(t_grid) <= 0):
        raise PreconditionError("t_grid must be a nonempty increasing sequence")
    v = frame_toward(1j, xi)
    gamma = ball.spec.evaluate(loop)
    angle, angle_ok, ell, chord = 0.0, True, 0.0, 0.0
    if classify(gamma).is_hyperbolic:
        ell = translation_length(gamma)
        if ell > C:
            raise LoopTooLong(f"loop {loop} has translation length {ell:.6g} > C = {C}")
        k = max(1, math.ceil(c / ell - 1e-12))
        if k * ell > C:
            raise LoopTooLong(f"no power of {loop} (length {ell:.6g}) lies in [{c}, {C}]")
        loop = loop ** k
        gamma = ball.spec.evaluate(loop)
        ell = translation_length(gamma)
        cross = axis_crossing(gamma, xi)
        if cross.point is not None and not cross.forward:
            loop = loop.inverse()
            gamma = ball.spec.evaluate(loop)
            cross = axis_crossing(gamma, xi)
        angle = cross.angle
        angle_ok = cross.point is not None and cross.forward
        if cross.point is not None:
            a = cross.point
            chord = busemann(xi, apply_uhp(gamma.inverse(), a)) - busemann(xi, a)
        else:
            chord = math.nan
    elif gamma != IDENTITY:
        raise PreconditionError(f"loop {loop} is not hyperbolic")
    v_n = frame_toward(1j, apply_boundary(gamma, xi))
    r_n = busemann(xi, apply_uhp(gamma.inverse(), 1j))

    mats = ball.matrices[rows]
    decay = np.empty(len(t_grid))
    for k, t in enumerate(t_grid):
        moved = geodesic_flow(v_n, t + r_n)
        target = geodesic_flow(v, t)
        prod = compose_rows(mats, np.array(moved.as_tuple()))
        decay[k] = _frame_distance_rows(prod, target)
    return ConcatenationResult(xi, loop, ell, v, v_n, r_n, chord, angle, angle_ok, t_grid, decay)


def auto_loops(
    ball: GroupBall,
    xi: float,
    count: int,
    c: float = DEFAULT_C_LOW,
    C: float = DEFAULT_C_HIGH,
) -> list[Word]:
    """First ``count`` active words (enumeration order) whose axis crosses the ray toward ``xi``
    and whose length, or that of a power, lies in ``[c, C]``.  Inverse pairs are kept once."""
    rows = _active(ball)
    out: list[Word] = []
    seen: set[Word] = set()
    for r in rows:
        m = ball.matrix(int(r))
        if not classify(m).is_hyperbolic:
            continue
        ell = translation_length(m)
        k = max(1, math.ceil(c / ell - 1e-12))
        if k * ell > C:
            continue
        w = ball.word(int(r))
        if w.inverse() in seen:
            continue
        if axis_crossing(m, xi).point is None:
            continue
        seen.add(w)
        out.append(w)
        if len(out) == count:
            break
    return out


# ---------------------------------------------------------------- orbit density

def _orbit_vectors(ball: GroupBall, p: AnnulusPoint) -> np.ndarray:
    m = ball.matrices[_active(ball)]
    return np.stack([m[:, 0] * p.p1 + m[:, 1] * p.p2, m[:, 2] * p.p1 + m[:, 3] * p.p2], axis=1)


@dataclass(frozen=True)
class DensityReport:
    covering_radius: float
    grid: np.ndarray
    distance: np.ndarray

    def rows(self):
        return [(float(g[0]), float(g[1]), float(d)) for g, d in zip(self.grid, self.distance)]


def density_probe(
    ball: GroupBall,
    p: AnnulusPoint,
    window: tuple[float, float, float, float],
    grid: int,
) -> DensityReport:
    """Distance from each point of a ``grid x grid`` window to the orbit ``{gamma p}``.

    ``window`` is ``(p1_lo, p1_hi, p2_lo, p2_hi)``.  Distances are Euclidean
    in the plane with both signs of every orbit vector present, which is the
    distance in the annulus.
    """
    if grid < 2:
        raise PreconditionError(f"grid must be >= 2, got {grid}")
    lo1, hi1, lo2, hi2 = window
    if not (hi1 > lo1 and hi2 > lo2):
        raise PreconditionError(f"degenerate window {window}")
    pts = _orbit_vectors(ball, p)
    tree = cKDTree(np.concatenate([pts, -pts]))
    g1, g2 = np.meshgrid(np.linspace(lo1, hi1, grid), np.linspace(lo2, hi2, grid), indexing="ij")
    q = np.stack([g1.ravel(), g2.ravel()], axis=1)
    dist, _ = tree.query(q)
    return DensityReport(float(dist.max()), q, dist)


def horocyclic_zero_probe(ball: GroupBall, p: AnnulusPoint) -> float:
    """Smallest ``|gamma p|`` over the active set."""
    pts = _orbit_vectors(ball, p)
    return float(np.sqrt(np.min(pts[:, 0] ** 2 + pts[:, 1] ** 2)))
