"""Command-line front end.

``horolab <command> --config run.json [overrides]``.  Every command writes
CSV (and usually SVG) files into the output directory and prints progress
and timing lines to stdout; CSV contents never include timings, so reruns
with the same config are byte-identical.  Errors print one line
``ERROR <code> <message>`` and exit with that code.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import flows
from . import groups as gr
from . import limitpoints as lp
from .errors import ConfigError, HorolabError
from .moebius import INF, MoebiusTransform
from .report import Panel, Polyline, emit_csv, emit_svg, emit_svg_sheet, read_csv

COMMANDS = ("ball", "flow", "classify", "quasimin", "orbit", "lemma41", "lemma42", "report")
U64_MAX = (1 << 64) - 1


@dataclass
class RunConfig:
    group: str = "octagon"
    weights: list[int] | None = None
    L: int = 4
    depth: float = 8.0
    T: float = 20.0
    angle_tol: float = 0.05
    c: float = ex.DEFAULT_C_LOW
    C: float = ex.DEFAULT_C_HIGH
    samples: int = 720
    seed: int = 0
    out_dir: str = "out"
    cache_dir: str = "cache"
    steps: int = 201
    ray_T: float = 10.0
    xi: list | None = None
    points: int = 10
    frame: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.0, 1.0])
    p: list[float] = field(default_factory=lambda: [1.0, 0.0])
    window: list[float] = field(default_factory=lambda: [-2.0, 2.0, 0.0, 2.0])
    grid: int = 41
    loops: list[list[int]] | None = None
    loop_count: int = 5

    def validate(self) -> "RunConfig":
        def need(ok, msg):
            if not ok:
                raise ConfigError(msg)

        need(self.group in ("octagon", "tight", "schottky"), f"group must be octagon, tight or schottky, got {self.group!r}")
        need(isinstance(self.L, int) and 0 <= self.L <= gr.MAX_RADIUS, f"L must satisfy 0 <= L <= {gr.MAX_RADIUS}, got {self.L}")
        need(self.depth > 0, f"depth k must be > 0, got {self.depth}")
        need(self.T > 0, f"T must be > 0, got {self.T}")
        need(0 < self.angle_tol < math.pi / 2, f"angle_tol must lie in (0, pi/2), got {self.angle_tol}")
        need(0 < self.c <= self.C, f"need 0 < c <= C, got c={self.c}, C={self.C}")
        need(isinstance(self.samples, int) and self.samples >= 1, f"samples must be >= 1, got {self.samples}")
        need(isinstance(self.seed, int) and 0 <= self.seed <= U64_MAX, f"seed must be an unsigned 64-bit integer, got {self.seed}")
        need(isinstance(self.steps, int) and self.steps >= 2, f"steps must be >= 2, got {self.steps}")
        need(self.ray_T > 0, f"ray_T must be > 0, got {self.ray_T}")
        need(isinstance(self.points, int) and self.points >= 1, f"points must be >= 1, got {self.points}")
        need(len(self.frame) == 4, "frame must list a, b, c, d")
        need(len(self.p) == 2 and any(self.p), "p must be a nonzero pair")
        need(len(self.window) == 4 and self.window[1] > self.window[0] and self.window[3] > self.window[2],
             "window must be [p1_lo, p1_hi, p2_lo, p2_hi] with lo < hi")
        need(isinstance(self.grid, int) and self.grid >= 2, f"grid must be >= 2, got {self.grid}")
        need(isinstance(self.loop_count, int) and self.loop_count >= 1, "loop_count must be >= 1")
        return self

    def boundary_points(self) -> list[float] | None:
        if self.xi is None:
            return None
        return [_parse_boundary(v) for v in self.xi]


def _parse_boundary(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "+inf", "-inf"):
        return INF
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise ConfigError(f"bad boundary point {v!r}; use a number or \"inf\"")


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- context

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="horolab", description="Hyperbolic dynamics experiments on word balls of Fuchsian groups.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON file with RunConfig fields")
    ap.add_argument("--group", help="octagon, tight or schottky")
    ap.add_argument("--len", dest="L", type=int, help="word-ball radius")
    ap.add_argument("--depth", type=float, help="horodisk depth k")
    ap.add_argument("--T", dest="T", type=float, help="time horizon")
    ap.add_argument("--out", dest="out_dir", help="output directory")
    ap.add_argument("--cache", dest="cache_dir", help="ball cache directory")
    ap.add_argument("--seed", type=int, help="unsigned 64-bit seed (boundary-scan row order)")
    return ap


class Context:
    def __init__(self, cfg: RunConfig, stdout):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.stdout = stdout
        self._ball = None
        self._scan = None

    def log(self, msg: str) -> None:
        print(msg, file=self.stdout)

    def spec(self) -> gr.GroupSpec:
        return gr.catalog(self.cfg.group, self.cfg.weights)

    def ball(self) -> gr.GroupBall:
        if self._ball is None:
            self._ball = load_or_build_ball(self.spec(), self.cfg.L, Path(self.cfg.cache_dir), self.log)
        return self._ball

    def scan(self) -> list[lp.ScanRow]:
        if self._scan is None:
            self._scan = lp.dirichlet_boundary_scan(self.ball(), self.cfg.samples, self.cfg.ray_T)
        return self._scan

    def boundary_points(self) -> list[tuple[str, float]]:
        """Configured points, or fixed points of short active loops plus refined Dirichlet candidates."""
        given = self.cfg.boundary_points()
        if given is not None:
            return [("config", xi) for xi in given]
        pts = [("fixed-point", xi) for _, xi in lp.short_loop_endpoints(self.ball(), self.cfg.points)]
        cands = lp.refine_candidates(self.ball(), self.scan(), self.cfg.points, self.cfg.ray_T)
        return pts + [("dirichlet", r.xi) for r in cands]

    def target_point(self) -> float:
        given = self.cfg.boundary_points()
        if given:
            return given[0]
        cands = lp.refine_candidates(self.ball(), self.scan(), 1, self.cfg.ray_T)
        if not cands:
            raise ConfigError("no Dirichlet candidate found; set xi in the config")
        return cands[0].xi


def cache_path(spec: gr.GroupSpec, radius: int, cache_dir: Path, kernel_only: bool) -> Path:
    stem = re.sub(r"[^A-Za-z0-9.-]+", "_", spec.label)
    return cache_dir / f"{stem}{'_kernel' if kernel_only else ''}_L{radius}.ball"


def load_or_build_ball(spec: gr.GroupSpec, radius: int, cache_dir: Path, log=print) -> gr.GroupBall:
    """Read the ball from the cache, or enumerate and store it.

    Kernel specs switch to kernel-only enumeration when the full ball would
    exceed the size guard.
    """
    kernel_only = spec.is_kernel and gr.projected_entry_count(spec, radius) > gr.MAX_BALL_ENTRIES
    path = cache_path(spec, radius, cache_dir, kernel_only)
    t0 = time.perf_counter()
    if path.exists():
        ball = gr.ball_load(path, spec)
        source = "cache"
    else:
        ball = gr.enumerate_ball(spec, radius, kernel_only=kernel_only)
        cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        gr.ball_save(ball, tmp)
        tmp.replace(path)
        source = "built"
    log(f"ball label={ball.label} L={radius} entries={len(ball)} source={source} "
        f"seconds={time.perf_counter() - t0:.3f}")
    return ball


def _xi_cell(xi: float) -> str:
    return "inf" if math.isinf(xi) else format(xi, ".17g")


# ---------------------------------------------------------------- commands

def cmd_ball(ctx: Context) -> None:
    ball = ctx.ball()
    lengths = ball.lengths
    rows = []
    for n in range(ball.radius + 1):
        sel = lengths == n
        rows.append((n, int(sel.sum()), int((sel & ball.in_kernel).sum())))
    emit_csv(rows, ctx.out / "ball.csv", ["word_length", "entries", "weight_zero"])


def cmd_flow(ctx: Context) -> None:
    cfg = ctx.cfg
    f = MoebiusTransform(*cfg.frame)
    ts = np.linspace(0.0, cfg.T, cfg.steps)
    geo, hor = [], []
    for t in ts:
        g = flows.geodesic_flow(f, float(t))
        z = flows.project_base(g)
        p = flows.project_annulus(g)
        geo.append((float(t), z.real, z.imag, p.p1, p.p2))
        h = flows.horocycle_flow(f, float(t))
        z = flows.project_base(h)
        p = flows.project_annulus(h)
        hor.append((float(t), z.real, z.imag, p.p1, p.p2))
    emit_csv(geo, ctx.out / "geodesic.csv", ["t", "x", "y", "p1", "p2"])
    emit_csv(hor, ctx.out / "horocycle.csv", ["s", "x", "y", "p1", "p2"])
    emit_svg(
        [Polyline([(r[1], r[2]) for r in geo], "geodesic"), Polyline([(r[1], r[2]) for r in hor], "horocycle")],
        ctx.out / "flow.svg", title="base points of g^t f and h^s f", xlabel="x", ylabel="y",
    )


def cmd_classify(ctx: Context) -> None:
    cfg = ctx.cfg
    ball = ctx.ball()
    rows = []
    for source, xi in ctx.boundary_points():
        res = lp.classify_boundary(ball, xi, cfg.depth)
        witness = ",".join(str(s) for s in res.witness.signed()) if res.witness is not None else ""
        rows.append((source, _xi_cell(xi), res.verdict, res.min_busemann, witness))
    emit_csv(rows, ctx.out / "classify.csv", ["source", "xi", "verdict", "min_busemann", "witness"])
    scan = lp.dirichlet_boundary_scan(ball, cfg.samples, cfg.ray_T, order_seed=cfg.seed)
    emit_csv(
        [(r.disk_angle, _xi_cell(r.xi), r.min_busemann, r.clearance, r.candidate, r.ray_in_domain) for r in scan],
        ctx.out / "scan.csv",
        ["disk_angle", "xi", "min_busemann", "clearance", "candidate", "ray_in_domain"],
    )
    ordered = sorted(scan, key=lambda r: r.disk_angle)
    emit_svg([Polyline([(r.disk_angle, r.clearance) for r in ordered], "clearance")],
             ctx.out / "scan.svg", title="boundary scan clearance", xlabel="disk angle", ylabel="min B over orbit minus i")
    ctx.log(f"classify points={len(rows)} candidates={sum(r.candidate for r in scan)}/{len(scan)}")


def cmd_quasimin(ctx: Context) -> None:
    cfg = ctx.cfg
    rows, lines = [], []
    for source, xi in ctx.boundary_points():
        curve = lp.quasi_minimizer_defect(ctx.ball(), xi, cfg.T, cfg.steps)
        rows.extend((source, _xi_cell(xi), t, d) for t, d in curve.rows())
        lines.append(Polyline(curve.rows(), f"{source} {_xi_cell(xi)}"))
    emit_csv(rows, ctx.out / "quasimin.csv", ["source", "xi", "t", "defect"])
    emit_svg(lines, ctx.out / "quasimin.svg", title="defect t - d(i, ray(t)) on the quotient", xlabel="t", ylabel="defect")


def cmd_orbit(ctx: Context) -> None:
    cfg = ctx.cfg
    p = flows.AnnulusPoint(*cfg.p)
    rep = ex.density_probe(ctx.ball(), p, tuple(cfg.window), cfg.grid)
    emit_csv(rep.rows(), ctx.out / "orbit.csv", ["p1", "p2", "distance"])
    zero = ex.horocyclic_zero_probe(ctx.ball(), p)
    emit_csv([(ctx.ball().radius, rep.covering_radius, zero, p.norm)], ctx.out / "orbit_summary.csv",
             ["L", "covering_radius", "min_norm", "norm_p"])


def cmd_lemma41(ctx: Context) -> None:
    xi = ctx.target_point()
    cands = ex.lemma41_scan(ctx.ball(), xi, ctx.cfg.angle_tol)
    rows = [(k, ",".join(str(s) for s in c.word.signed()), c.r, c.angular_error) for k, c in enumerate(cands)]
    emit_csv(rows, ctx.out / "lemma41.csv", ["rank", "word", "r", "angular_error"])
    emit_svg([Polyline([(c.r, c.angular_error) for c in sorted(cands, key=lambda c: (c.r, c.angular_error))], "candidates")],
             ctx.out / "lemma41.svg", title=f"return scalars at xi = {_xi_cell(xi)}", xlabel="r", ylabel="angular error")
    ctx.log(f"lemma41 xi={_xi_cell(xi)} candidates={len(cands)}")


LEMMA42_NOTE = ("loops are word stand-ins for exhaustion boundary curves; "
                "the exit time is replaced by the Busemann offset r_n")


def cmd_lemma42(ctx: Context) -> None:
    cfg = ctx.cfg
    xi = ctx.target_point()
    ball = ctx.ball()
    if cfg.loops is not None:
        loops = [gr.Word.from_signed(w) for w in cfg.loops]
    else:
        loops = ex.auto_loops(ball, xi, cfg.loop_count, cfg.c, cfg.C)
    b = ex.offset_floor_b(cfg.c)
    t_grid = np.linspace(0.0, cfg.T, cfg.steps)
    rows, lines = [], []
    for w in loops:
        res = ex.lemma42_construct(ball, xi, w, cfg.c, cfg.C, t_grid)
        name = ",".join(str(s) for s in res.loop.signed())
        for t, d in res.rows():
            rows.append((name, res.loop_length, res.r_n, res.chord_offset, b, res.angle, res.angle_ok, t, d))
        lines.append(Polyline(res.rows(), name))
    emit_csv(rows, ctx.out / "lemma42.csv",
             ["loop", "length", "r_n", "chord_offset", "b", "angle", "angle_ok", "t", "decay"])
    emit_svg(lines, ctx.out / "lemma42.svg", title=f"shadowing decay at xi = {_xi_cell(xi)}", xlabel="t", ylabel="decay",
             note=LEMMA42_NOTE)


_REPORT_SOURCES = {
    # file: (title, x label, y label, series column, x column, y column, sort by x)
    "geodesic.csv": ("geodesic base points", "x", "y", None, 1, 2, False),
    "horocycle.csv": ("horocycle base points", "x", "y", None, 1, 2, False),
    "scan.csv": ("boundary scan clearance", "disk angle", "clearance", None, 0, 3, True),
    "quasimin.csv": ("quasi-minimizer defect", "t", "defect", 1, 2, 3, False),
    "lemma41.csv": ("return scalars", "r", "angular error", None, 2, 3, True),
    "lemma42.csv": ("shadowing decay", "t", "decay", 0, 7, 8, False),
}


def cmd_report(ctx: Context) -> None:
    panels = []
    for name, (title, xl, yl, key, xc, yc, by_x) in _REPORT_SOURCES.items():
        path = ctx.out / name
        if not path.exists():
            continue
        _, body = read_csv(path)
        series: dict[str, list[tuple[float, float]]] = {}
        for row in body:
            series.setdefault(row[key] if key is not None else name, []).append((float(row[xc]), float(row[yc])))
        lines = [Polyline(sorted(pts) if by_x else pts, label) for label, pts in series.items()]
        panels.append(Panel(title, lines, xl, yl, LEMMA42_NOTE if name == "lemma42.csv" else ""))
    if not panels:
        raise ConfigError(f"no experiment CSV files in {ctx.out}")
    emit_svg_sheet(panels, ctx.out / "report.svg")
    ctx.log(f"report panels={len(panels)}")


_DISPATCH = {
    "ball": cmd_ball,
    "flow": cmd_flow,
    "classify": cmd_classify,
    "quasimin": cmd_quasimin,
    "orbit": cmd_orbit,
    "lemma41": cmd_lemma41,
    "lemma42": cmd_lemma42,
    "report": cmd_report,
}


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        for name in ("group", "L", "depth", "T", "out_dir", "cache_dir", "seed"):
            v = getattr(args, name)
            if v is not None:
                setattr(cfg, name, v)
        cfg.validate()
        t0 = time.perf_counter()
        _DISPATCH[args.command](Context(cfg, stdout))
        print(f"done command={args.command} seconds={time.perf_counter() - t0:.3f}", file=stdout)
        return 0
    except HorolabError as exc:
        code = exc.exit_code
        msg = str(exc)
    except OSError as exc:
        code = 2
        msg = f"{type(exc).__name__}: {exc}"
    print(f"ERROR {code} {' '.join(msg.split())}", file=stderr)
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
