"""Horocyclic versus nonhorocyclic boundary points, at finite truncation.

Every verdict here is relative to a word ball: the orbit of ``i`` is replaced
by its points ``gamma i`` for the ball's active entries (the kernel slice for
tight specs).  A point that is never penetrated is evidence of being
nonhorocyclic, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBall, NotHyperbolic, PreconditionError
from .flows import AnnulusPoint, busemann_arrays, ray_point
from .groups import GroupBall, Word
from .moebius import INF, MoebiusTransform, classify, fixed_points, orbit_of_i, uhp_distance, uhp_distance_arrays


@dataclass(frozen=True)
class ClassificationResult:
    xi: float
    depth: float
    radius: int
    horocyclic: bool
    min_busemann: float
    witness: Word | None = None

    @property
    def verdict(self) -> str:
        return "HorocyclicAtDepth" if self.horocyclic else "NotPenetratedAtDepth"


@dataclass(frozen=True)
class DefectCurve:
    t: np.ndarray
    defect: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(self.defect))

    def rows(self):
        return list(zip(self.t.tolist(), self.defect.tolist()))


@dataclass(frozen=True)
class ScanRow:
    disk_angle: float
    xi: float
    min_busemann: float
    clearance: float
    candidate: bool
    ray_in_domain: bool


def _active_orbit(ball: GroupBall):
    if len(ball) == 0:
        raise EmptyBall("ball has no entries")
    rows = ball.active()
    x, y = orbit_of_i(ball.matrices[rows])
    return rows, x, y


def orbit_busemann(ball: GroupBall, xi: float) -> tuple[np.ndarray, np.ndarray]:
    """Active row indices and ``B_xi(gamma i)`` for each of them."""
    rows, x, y = _active_orbit(ball)
    return rows, busemann_arrays(xi, x, y)


def classify_boundary(ball: GroupBall, xi: float, depth: float) -> ClassificationResult:
    if not depth > 0:
        raise PreconditionError(f"depth must be positive, got {depth}")
    rows, b = orbit_busemann(ball, xi)
    j = int(np.argmin(b))
    hit = bool(b[j] < -depth)
    return ClassificationResult(
        xi=xi,
        depth=depth,
        radius=ball.radius,
        horocyclic=hit,
        min_busemann=float(b[j]),
        witness=ball.word(int(rows[j])) if hit else None,
    )


def quasi_minimizer_defect(ball: GroupBall, xi: float, T: float, steps: int) -> DefectCurve:
    """``t - d_quotient(i, ray(t))`` along the ray from ``i`` toward ``xi``.

    The quotient distance is the minimum over the active set of
    ``d(gamma i, ray(t))``, which equals the minimum of ``d(i, gamma ray(t))``
    because the active set is closed under inverses.
    """
    if not T > 0:
        raise PreconditionError(f"T must be positive, got {T}")
    if steps < 2:
        raise PreconditionError(f"steps must be >= 2, got {steps}")
    _, x, y = _active_orbit(ball)
    inv_y = 1.0 / y
    ts = np.linspace(0.0, T, steps)
    out = np.empty(steps)
    dx, dy = np.empty_like(x), np.empty_like(y)
    for k, t in enumerate(ts):
        w = ray_point(1j, xi, t) if t > 0 else 1j
        # distance is increasing in |z - w|^2 / (Im z Im w), so minimize that and convert once
        np.subtract(x, w.real, out=dx)
        np.subtract(y, w.imag, out=dy)
        np.multiply(dx, dx, out=dx)
        np.multiply(dy, dy, out=dy)
        np.add(dx, dy, out=dx)
        np.multiply(dx, inv_y, out=dx)
        q = float(dx.min()) / w.imag
        out[k] = t - 2.0 * math.asinh(math.sqrt(q) / 2.0)
    return DefectCurve(ts, out)


def dirichlet_contains(ball: GroupBall, z: complex, tol: float = 1e-9) -> bool:
    _, x, y = _active_orbit(ball)
    others = ~((x == 0.0) & (y == 1.0))
    d0 = uhp_distance(z, 1j)
    return bool(np.all(d0 <= uhp_distance_arrays(z.real, z.imag, x[others], y[others]) + tol))


def disk_angle_to_boundary(phi: float) -> float:
    """Boundary point at disk angle ``phi`` under the Cayley map (angle 0 is infinity)."""
    phi = phi % (2.0 * math.pi)
    if phi == 0.0:
        return INF
    return -1.0 / math.tan(phi / 2.0)


def _arc_scan(x, y, theta0, h, n, ray_xi, ray_T, tol, clearance_cap, chunk):
    """Clearance and exit flags on the annulus-angle grid ``theta0 + h j``, ``j < n``.

    Writing a sample as the annulus angle theta, ``exp B`` of an orbit point
    at distance ``D`` from ``i`` is ``cosh D + sinh D cos(2 theta - psi)``, so
    each orbit point can only bring ``B`` below the cap on a short arc.
    """
    theta = theta0 + h * np.arange(n)
    st, ct = np.sin(theta), np.cos(theta)
    ray_x = np.empty(n)
    ray_y = np.empty(n)
    for j in range(n):
        w = ray_point(1j, ray_xi[j], ray_T)
        ray_x[j], ray_y[j] = w.real, w.imag

    clearance = np.full(n, clearance_cap)
    leaves = np.zeros(n, dtype=bool)
    cap_v = math.exp(clearance_cap)
    for s in range(0, len(x), chunk):
        cx, cy = x[s:s + chunk], y[s:s + chunk]
        p_coef = 1.0 / cy
        q_coef = (cx * cx + cy * cy) / cy
        r_coef = cx / cy
        mean = (p_coef + q_coef) / 2.0
        amp = np.hypot((p_coef - q_coef) / 2.0, r_coef)
        psi = np.arctan2(-r_coef, (p_coef - q_coef) / 2.0)
        kappa = (cap_v - mean) / amp
        live = kappa > -1.0
        if not np.any(live):
            continue
        cx, cy, kappa, psi = cx[live], cy[live], kappa[live], psi[live]
        half = (np.pi - np.arccos(np.clip(kappa, -1.0, 1.0))) / 2.0
        half = half * 1.001 + 1e-9
        center = theta0 + (((psi + np.pi) / 2.0 - theta0) % np.pi)
        for shift in (-np.pi, 0.0, np.pi):
            lo = np.maximum(np.ceil((center + shift - half - theta0) / h), 0).astype(np.int64)
            hi = np.minimum(np.floor((center + shift + half - theta0) / h), n - 1).astype(np.int64)
            counts = np.maximum(hi - lo + 1, 0)
            if counts.sum() == 0:
                continue
            pt = np.repeat(np.arange(len(cx)), counts)
            j = np.arange(len(pt)) + np.repeat(lo - np.cumsum(counts) + counts, counts)
            px, py = cx[pt], cy[pt]
            v = ((px * st[j] - ct[j]) ** 2 + (py * st[j]) ** 2) / py
            b = np.log(v)
            np.minimum.at(clearance, j, b)
            neg = b < 0.0
            if np.any(neg):
                jn = j[neg]
                d = uhp_distance_arrays(ray_x[jn], ray_y[jn], px[neg], py[neg])
                np.logical_or.at(leaves, jn, d < ray_T - tol)
    return clearance, leaves


def _scan_orbit(ball: GroupBall):
    _, x, y = _active_orbit(ball)
    others = ~((x == 0.0) & (y == 1.0))
    return x[others], y[others]


def _row(phi, clearance, leaves, tol):
    mb = min(0.0, float(clearance))
    return ScanRow(phi, disk_angle_to_boundary(phi), mb, float(clearance), mb >= -tol, not bool(leaves))


def dirichlet_boundary_scan(
    ball: GroupBall,
    samples: int,
    ray_T: float,
    tol: float = 1e-9,
    clearance_cap: float = 1.0,
    order_seed: int | None = None,
    chunk: int = 1 << 18,
) -> list[ScanRow]:
    """Scan boundary points uniform in disk angle for orbit penetration of ``{B < 0}``.

    For each sample: ``min_busemann`` is the minimum of ``B_xi(gamma i)`` over
    the active set (identity included, so it is at most 0); ``clearance`` is
    the same minimum without the identity, capped at ``clearance_cap``; a
    candidate has ``min_busemann >= -tol``; ``ray_in_domain`` tells whether
    the ray from ``i`` stays in the truncated Dirichlet domain up to
    ``ray_T``.  Rows come in increasing disk angle unless ``order_seed``
    permutes them.
    """
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    x, y = _scan_orbit(ball)
    n = samples
    # annulus angle pi j / n is disk angle phi_k with j = (n - k) mod n
    phis = 2.0 * math.pi * np.arange(n) / n
    jj = (n - np.arange(n)) % n
    ray_xi = [disk_angle_to_boundary(phis[(n - j) % n]) for j in range(n)]
    clearance, leaves = _arc_scan(x, y, 0.0, math.pi / n, n, ray_xi, ray_T, tol, clearance_cap, chunk)
    order = range(n) if order_seed is None else np.random.default_rng(order_seed).permutation(n)
    return [_row(float(phis[k]), clearance[jj[k]], leaves[jj[k]], tol) for k in map(int, order)]


def dirichlet_window_scan(
    ball: GroupBall,
    phi_lo: float,
    phi_hi: float,
    samples: int,
    ray_T: float,
    tol: float = 1e-9,
    clearance_cap: float = 1.0,
    chunk: int = 1 << 18,
) -> list[ScanRow]:
    """Same as :func:`dirichlet_boundary_scan` on ``samples`` evenly spaced disk angles in ``[phi_lo, phi_hi]``."""
    if samples < 2:
        raise PreconditionError("window scan needs samples >= 2")
    if not phi_hi > phi_lo:
        raise PreconditionError("window must have phi_hi > phi_lo")
    x, y = _scan_orbit(ball)
    n = samples
    phis = np.linspace(phi_lo, phi_hi, n)
    # annulus angle pi - phi / 2 decreases along the window, so index it backwards
    h = (phi_hi - phi_lo) / (2.0 * (n - 1))
    ray_xi = [disk_angle_to_boundary(phis[n - 1 - m]) for m in range(n)]
    clearance, leaves = _arc_scan(x, y, math.pi - phi_hi / 2.0, h, n, ray_xi, ray_T, tol, clearance_cap, chunk)
    return [_row(float(phis[k]), clearance[n - 1 - k], leaves[n - 1 - k], tol) for k in range(n)]


def refine_candidates(
    ball: GroupBall,
    rows: list[ScanRow],
    count: int,
    ray_T: float,
    zoom_samples: int = 65,
    tol: float = 1e-9,
) -> list[ScanRow]:
    """Pick ``count`` candidates, zooming into the arc around each coarse candidate.

    Each coarse candidate seeds a window one coarse spacing wide on either
    side.  Candidates from all windows are ranked by clearance (ties by disk
    angle) and taken round-robin across windows so that every cluster is
    represented.
    """
    seeds = sorted((r for r in rows if r.candidate), key=lambda r: r.disk_angle)
    if not seeds:
        return []
    spacing = 2.0 * math.pi / len(rows)
    groups = []
    for r in seeds:
        found = dirichlet_window_scan(ball, r.disk_angle - spacing, r.disk_angle + spacing,
                                      zoom_samples, ray_T, tol=tol)
        found = [f for f in found if f.candidate]
        found.sort(key=lambda f: (-f.clearance, f.disk_angle))
        groups.append(found)
    out, seen = [], set()
    depth = 0
    while len(out) < count and any(depth < len(g) for g in groups):
        for g in groups:
            if depth < len(g) and len(out) < count:
                key = round(g[depth].disk_angle % (2.0 * math.pi), 12)
                if key not in seen:
                    seen.add(key)
                    out.append(g[depth])
        depth += 1
    return out


def unstable_direction(gamma: MoebiusTransform) -> AnnulusPoint:
    """Unit vector spanning the expanding eigenline (lies over the attracting fixed point)."""

    return AnnulusPoint.toward(fixed_points(gamma)[0])


def inverse_orbit_norms(gamma: MoebiusTransform, q: AnnulusPoint, n: int) -> list[float]:
    """Norms ``|gamma^-k q|`` for ``k = 1..n`` by plain iteration of ``gamma^-1``."""
    inv = gamma.inverse()
    v1, v2 = q.p1, q.p2
    out = []
    for _ in range(n):
        v1, v2 = inv.a * v1 + inv.b * v2, inv.c * v1 + inv.d * v2
        out.append(math.hypot(v1, v2))
    return out


def unstable_ray_contract(gamma: MoebiusTransform, q: AnnulusPoint, n: int, tol: float = 1e-9) -> list[float]:
    """Norms ``|gamma^-k q|`` for ``k = 1..n``, with ``q`` on the unstable ray of ``gamma``.

    Plain iteration multiplies the rounding error along the stable line by
    ``lambda^2`` per step, so ``q`` is projected onto the expanding eigenline
    (it must lie within ``tol`` radians of it) and ``gamma^-k`` acts there as
    the scalar ``lambda^-k``.
    """
    if not classify(gamma).is_hyperbolic:
        raise NotHyperbolic(f"{gamma} is not hyperbolic")
    u = unstable_direction(gamma)
    off = abs(u.p1 * q.p2 - u.p2 * q.p1) / q.norm
    if off > tol:
        raise PreconditionError(f"q is {off:.3g} rad off the unstable line")
    tr = abs(gamma.trace)
    lam = (tr + math.sqrt((tr - 2.0) * (tr + 2.0))) / 2.0
    return [q.norm * lam ** -k for k in range(1, n + 1)]


def short_loop_endpoints(ball: GroupBall, n: int) -> list[tuple[Word, float]]:
    """Attracting fixed points of the first ``n`` active hyperbolic entries, enumeration order.

    Entries whose attracting point repeats an earlier one (within 1e-9) are skipped.
    """
    if len(ball) == 0:
        raise EmptyBall("ball has no entries")
    out: list[tuple[Word, float]] = []
    for r in ball.active():
        m = ball.matrix(int(r))
        if not classify(m).is_hyperbolic:
            continue
        xi = fixed_points(m)[0]
        if any(xi == q or abs(xi - q) <= 1e-9 for _, q in out):
            continue
        out.append((ball.word(int(r)), xi))
        if len(out) == n:
            break
    return out
