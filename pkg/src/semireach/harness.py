"""Benchmark harness: convergence sweeps, attractor studies and cost accounting.

All experiments emit flat CSV ('.' decimals, LF endings) so results can be
post-processed without this package. The error statistic is the maximum over
time nodes of the Hausdorff distance between the computed lattice tube and
the reference reachable set; references are the problem's exact oracle when
available (densified at rho/2, so the sampling error stays below rho/4) and a
fine-resolution self-convergence run (h/8, rho=(h/8)^2) otherwise.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .convex import Box, sample_convex
from .implicit import solve_implicit
from .problems import Problem, affine_control, dahlquist, nonconvex_example, stiff_linear
from .schemes import (
    DiscretizationSchedule,
    ReachTube,
    TimeGrid,
    initial_set,
    reach,
    step_set,
)
from .sets import GridSpec, LatticeSet, dist_hausdorff, project_points

__all__ = [
    "RunConfig",
    "ConvergenceRow",
    "ErrorReport",
    "AttractorRow",
    "AttractorReport",
    "CostCalibration",
    "build_problem",
    "parse_matrix",
    "run_convergence",
    "run_attractor",
    "run_reach",
    "calibrate_cost_model",
    "cost_model_estimate",
    "measure_step_costs",
    "loglog_slope",
]


@dataclass
class RunConfig:
    problem: str = "dahlquist"
    x0: tuple = (5.0,)
    T: float = 5.0
    h: tuple = (0.5, 0.25, 0.125, 0.0625)
    schemes: tuple = ("parameterized", "split")
    rho_rule: str = "h2"
    eps_rule: str = "h"
    out: str = "out"
    seed: int = 0
    threads: int = 1
    lam: float = -50.0
    radius: float = 1.0
    max_steps: int = 20000
    timing_min_s: float = 0.0  # re-run fast configurations until timings stabilize
    # affine-control problem pieces (constants only): f = lam*x + A*U
    a_matrix: str = ""
    u_lower: tuple = ()
    u_upper: tuple = ()

    def __post_init__(self):
        self.x0 = tuple(float(v) for v in np.atleast_1d(np.asarray(self.x0, dtype=float)))
        self.h = tuple(float(v) for v in np.atleast_1d(np.asarray(self.h, dtype=float)))
        if isinstance(self.schemes, str):
            self.schemes = (self.schemes,)
        self.schemes = tuple(self.schemes)
        self.u_lower = tuple(float(v) for v in self.u_lower)
        self.u_upper = tuple(float(v) for v in self.u_upper)
        if any(v <= 0 for v in self.h):
            raise ValueError("step sizes must be positive")


def parse_matrix(text: str) -> np.ndarray:
    """'a11,a12;a21,a22' -> (d, m) array."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";") if row]
        A = np.asarray(rows, dtype=float)  # raises on ragged rows
    except ValueError as exc:
        raise ValueError(f"malformed matrix {text!r}; expected 'a11,a12;a21,a22'") from exc
    if A.ndim != 2 or A.size == 0:
        raise ValueError(f"malformed matrix {text!r}; expected 'a11,a12;a21,a22'")
    return A


def _affine_from_config(cfg: RunConfig) -> Problem:
    if not cfg.a_matrix or not cfg.u_lower or not cfg.u_upper:
        raise ValueError(
            "problem=affine needs a-matrix, u-lower and u-upper "
            "(constant matrix entries and a box control set)"
        )
    A = parse_matrix(cfg.a_matrix)
    U = Box(cfg.u_lower, cfg.u_upper)
    if A.shape[1] != U.dim:
        raise ValueError(f"A has {A.shape[1]} columns but U lives in R^{U.dim}")
    lam = cfg.lam
    d = A.shape[0]
    if lam >= 0:
        raise ValueError("the affine problem's drift rate lam must be negative")
    return affine_control(
        lambda t, x: lam * x,
        A,
        U,
        l_f=lam,
        jac_f=(lambda t, x: lam) if d == 1 else (lambda t, x: lam * np.eye(d)),
        L=abs(lam),
        C=max(np.abs(cfg.x0).max() if cfg.x0 else 1.0, 1.0),
        name="affine",
    )


def build_problem(cfg: RunConfig) -> Problem:
    name = cfg.problem
    if name == "dahlquist":
        return dahlquist(cfg.x0[0])
    if name == "nonconvex":
        return nonconvex_example()
    if name == "stiff_linear":
        return stiff_linear(cfg.lam, cfg.radius, x0_ref=cfg.x0[0])
    if name == "affine":
        return _affine_from_config(cfg)
    raise ValueError(
        f"unknown problem {name!r}; available: dahlquist, nonconvex, stiff_linear, affine"
    )


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def loglog_slope(hs, errs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if len(hs) < 2:
        raise ValueError("need at least two step sizes for a regression slope")
    if np.any(errs <= 0):
        raise ValueError("errors must be positive for a log-log regression")
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


# ---------------------------------------------------------------------------
# Convergence sweep
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceRow:
    scheme: str
    h: float
    rho: float
    eps: float
    n_steps: int
    max_err: float
    temporal_bound: float
    spatial_bound: float
    solver_calls: int
    newton_iters: int
    wall_s: float
    reference: str


@dataclass
class ErrorReport:
    rows: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    per_node: dict = field(default_factory=dict)  # (scheme, h) -> list of rows
    tubes: dict = field(default_factory=dict)  # (scheme, h) -> ReachTube

    COLUMNS = [
        "scheme", "h", "rho", "eps", "n_steps", "max_err",
        "temporal_bound", "spatial_bound", "solver_calls", "newton_iters",
        "wall_s", "reference",
    ]

    def to_csv(self, path) -> None:
        _write_csv(path, self.COLUMNS, [
            [r.scheme, r.h, r.rho, r.eps, r.n_steps, r.max_err,
             r.temporal_bound, r.spatial_bound, r.solver_calls, r.newton_iters,
             r.wall_s, r.reference]
            for r in self.rows
        ])

    def rows_for(self, scheme: str) -> list:
        return [r for r in self.rows if r.scheme == scheme]


def _reference_clouds(problem: Problem, x0, grid: TimeGrid,
                      sched: DiscretizationSchedule, cfg: RunConfig, scheme: str):
    """Reference point clouds per node plus a label (exact vs self-convergence)."""
    if problem.exact_reach is not None:
        clouds = []
        for n, t in enumerate(grid.nodes):
            desc = problem.exact_reach(t, np.asarray(x0))
            clouds.append(sample_convex(desc, max(sched.rho[n] / 2.0, 1e-9)))
        return clouds, "exact"
    fine_grid = TimeGrid.uniform(grid.T, grid.n_steps * 8)
    fine_h = float(fine_grid.steps[0])
    fine_sched = DiscretizationSchedule.from_rules(
        fine_grid, rho_rule=f"const:{fine_h ** 2}", eps_rule=cfg.eps_rule
    )
    fine = reach(problem, np.asarray(x0), fine_grid, fine_sched, scheme,
                 workers=cfg.threads)
    clouds = [fine.sets[8 * n].points() for n in range(len(grid.nodes))]
    return clouds, "self-convergence"


def _measure_tube(tube: ReachTube, ref_clouds) -> np.ndarray:
    return np.array([
        dist_hausdorff(lat.points(), ref)
        for lat, ref in zip(tube.sets, ref_clouds)
    ])


def _temporal_bounds(scheme: str, grid: TimeGrid, moduli) -> np.ndarray:
    """Per-node temporal bound: max of the two one-sided estimates.

    No bounds are claimed for the explicit baseline; its columns read NaN.
    """
    if scheme == "explicit":
        return np.full(len(grid.nodes), np.nan)
    if scheme == "parameterized":
        direct = bounds.apriori_parameterized_all(grid, moduli)
    else:
        direct = bounds.apriori_split_all(grid, moduli)
    reverse = np.array([
        bounds.apriori_filippov_continuous(n, grid, moduli, num=1024)
        for n in range(len(grid.nodes))
    ])
    return np.maximum(direct, reverse)


def _spatial_bounds(scheme: str, grid: TimeGrid, sched, moduli, dim: int) -> np.ndarray:
    if scheme == "explicit":
        return np.full(len(grid.nodes), np.nan)
    if scheme == "parameterized":
        return bounds.apriori_spatial_parameterized_all(grid, sched, moduli, dim)
    return bounds.apriori_spatial_split_all(grid, sched, moduli, dim)


def _timed_reach(problem, x0, grid, sched, scheme, cfg: RunConfig) -> ReachTube:
    """Run reach; re-run fast configurations and keep the best-timed tube."""
    tube = reach(problem, np.asarray(x0), grid, sched, scheme, workers=cfg.threads)
    reps = 0
    best = tube
    while best.wall_s < cfg.timing_min_s and reps < 4:
        again = reach(problem, np.asarray(x0), grid, sched, scheme, workers=cfg.threads)
        if again.wall_s < best.wall_s:
            best = again
        reps += 1
    return best


def run_convergence(cfg: RunConfig, write: bool = True) -> ErrorReport:
    """Error/bound/cost sweep over cfg.h for every configured scheme.

    Emits report.csv plus one per-node CSV per run; a solver failure aborts
    only the affected row.
    """
    problem = build_problem(cfg)
    report = ErrorReport()
    x0 = np.asarray(cfg.x0[: problem.dim])
    out_dir = cfg.out
    if write:
        os.makedirs(out_dir, exist_ok=True)
    for scheme in cfg.schemes:
        hs, errs = [], []
        for h in cfg.h:
            n_steps = int(round(cfg.T / h))
            grid = TimeGrid.uniform(cfg.T, n_steps)
            sched = DiscretizationSchedule.from_rules(grid, cfg.rho_rule, cfg.eps_rule)
            try:
                tube = _timed_reach(problem, x0, grid, sched, scheme, cfg)
            except Exception as exc:  # noqa: BLE001 - row-level isolation
                print(f"[convergence] scheme={scheme} h={h} failed: {exc}")
                continue
            ref_clouds, ref_label = _reference_clouds(problem, x0, grid, sched, cfg, scheme)
            per_node_err = _measure_tube(tube, ref_clouds)
            temporal = _temporal_bounds(scheme, grid, problem.moduli)
            spatial = _spatial_bounds(scheme, grid, sched, problem.moduli, problem.dim)
            row = ConvergenceRow(
                scheme=scheme,
                h=h,
                rho=float(sched.rho[-1]),
                eps=float(sched.eps[0]),
                n_steps=n_steps,
                max_err=float(per_node_err.max()),
                temporal_bound=float(temporal.max()),
                spatial_bound=float(spatial.max()),
                solver_calls=tube.solver_calls,
                newton_iters=sum(r.newton_iters for r in tube.records),
                wall_s=tube.wall_s,
                reference=ref_label,
            )
            report.rows.append(row)
            report.tubes[(scheme, h)] = tube
            node_rows = [
                [n, grid.nodes[n], len(tube.sets[n]), per_node_err[n],
                 temporal[n], spatial[n], tube.records[n].solver_calls,
                 tube.records[n].wall_s]
                for n in range(len(grid.nodes))
            ]
            report.per_node[(scheme, h)] = node_rows
            if write:
                _write_csv(
                    os.path.join(out_dir, f"pernode_{scheme}_{h!r}.csv"),
                    ["node", "t", "cells", "measured", "temporal_bound",
                     "spatial_bound", "solver_calls", "wall_s"],
                    node_rows,
                )
            hs.append(h)
            errs.append(row.max_err)
        if len(hs) >= 2 and all(e > 0 for e in errs):
            report.slopes[scheme] = loglog_slope(hs, errs)
    if write:
        report.to_csv(os.path.join(out_dir, "report.csv"))
        with open(os.path.join(out_dir, "manifest.txt"), "w", newline="") as fh:
            fh.write(f"command=convergence\n{_config_echo(cfg)}")
            for scheme, slope in report.slopes.items():
                fh.write(f"slope scheme={scheme} value={slope!r}\n")
            if problem.moduli.estimated:
                fh.write("moduli=estimated (non-rigorous bounds)\n")
    return report


def _config_echo(cfg: RunConfig) -> str:
    h_txt = ",".join(repr(v) for v in cfg.h)
    x0_txt = ",".join(repr(v) for v in cfg.x0)
    return (
        f"problem={cfg.problem}\nx0={x0_txt}\nT={cfg.T!r}\nh={h_txt}\n"
        f"scheme={','.join(cfg.schemes)}\nrho-rule={cfg.rho_rule}\n"
        f"eps-rule={cfg.eps_rule}\nseed={cfg.seed}\nthreads={cfg.threads}\n"
    )


# ---------------------------------------------------------------------------
# Attractor study
# ---------------------------------------------------------------------------


@dataclass
class AttractorRow:
    scheme: str
    h: float
    rho: float
    eps: float
    steps: int
    converged: bool
    lower: float
    upper: float
    solver_calls: int
    wall_s: float


@dataclass
class AttractorReport:
    rows: list = field(default_factory=list)

    COLUMNS = ["scheme", "h", "rho", "eps", "steps", "converged", "lower",
               "upper", "solver_calls", "wall_s"]

    def to_csv(self, path) -> None:
        _write_csv(path, self.COLUMNS, [
            [r.scheme, r.h, r.rho, r.eps, r.steps, int(r.converged), r.lower,
             r.upper, r.solver_calls, r.wall_s]
            for r in self.rows
        ])


def run_attractor(cfg: RunConfig, write: bool = True) -> AttractorReport:
    """Iterate until the node sets stop moving; report the limiting hull.

    Convergence: Hausdorff distance between consecutive node sets below rho/2
    for 10 consecutive steps. Non-convergence within cfg.max_steps flags the
    row instead of failing.
    """
    problem = build_problem(cfg)
    if problem.dim != 1:
        raise ValueError("attractor studies are defined for 1-d problems")
    report = AttractorReport()
    x0 = np.asarray(cfg.x0[:1])
    for scheme in cfg.schemes:
        for h in cfg.h:
            rho = h * h if cfg.rho_rule == "h2" else float(cfg.rho_rule.split(":", 1)[1])
            eps = h if cfg.eps_rule == "h" else float(cfg.eps_rule.split(":", 1)[1])
            spec = GridSpec(rho, tuple(x0), 1)
            cur = initial_set(problem, x0, rho)
            streak = 0
            n = 0
            calls = 0
            wall = 0.0
            converged = False
            while n < cfg.max_steps:
                nxt, rec = step_set(problem, n * h, h, cur, eps, spec, scheme,
                                    workers=cfg.threads)
                calls += rec.solver_calls
                wall += rec.wall_s
                moved = dist_hausdorff(nxt.points(), cur.points())
                streak = streak + 1 if moved < rho / 2.0 else 0
                cur = nxt
                n += 1
                if streak >= 10:
                    converged = True
                    break
            lo, hi = cur.interval_hull()
            report.rows.append(AttractorRow(
                scheme=scheme, h=h, rho=rho, eps=eps, steps=n,
                converged=converged, lower=float(lo[0]), upper=float(hi[0]),
                solver_calls=calls, wall_s=wall,
            ))
    if write:
        os.makedirs(cfg.out, exist_ok=True)
        report.to_csv(os.path.join(cfg.out, "attractor.csv"))
        with open(os.path.join(cfg.out, "manifest.txt"), "w", newline="") as fh:
            fh.write(f"command=attractor\n{_config_echo(cfg)}")
    return report


# ---------------------------------------------------------------------------
# Single reach run
# ---------------------------------------------------------------------------


def run_reach(cfg: RunConfig, write: bool = True) -> dict:
    """One reach run per (scheme, h); dumps tube CSVs + manifest per run."""
    problem = build_problem(cfg)
    x0 = np.asarray(cfg.x0[: problem.dim])
    tubes = {}
    for scheme in cfg.schemes:
        for h in cfg.h:
            n_steps = int(round(cfg.T / h))
            grid = TimeGrid.uniform(cfg.T, n_steps)
            sched = DiscretizationSchedule.from_rules(grid, cfg.rho_rule, cfg.eps_rule)
            tube = reach(problem, x0, grid, sched, scheme, workers=cfg.threads)
            tubes[(scheme, h)] = tube
            if write:
                tube.write_dir(os.path.join(cfg.out, f"reach_{scheme}_h{h!r}"))
    return tubes


# ---------------------------------------------------------------------------
# Cost model
# ---------------------------------------------------------------------------


@dataclass
class CostCalibration:
    """Per-operation costs in seconds, measured by micro-runs.

    c_scan: one lattice membership test; c_newton: one implicit solve on the
    calibration problem; c_eval: projecting one point to the lattice.
    """

    c_scan: float
    c_newton: float
    c_eval: float


def calibrate_cost_model(problem: Problem, reps: int = 10000) -> CostCalibration:
    """Time ``reps`` membership scans, implicit solves and point projections."""
    d = problem.dim
    spec = GridSpec(0.01, tuple(np.zeros(d)), d)
    cells = np.repeat(np.arange(1000, dtype=np.int64)[:, None], d, axis=1)
    lat = LatticeSet(spec, cells)
    probe = (0,) * d
    t0 = time.perf_counter()
    hit = False
    for _ in range(reps):
        hit = probe in lat
    c_scan = (time.perf_counter() - t0) / reps
    assert hit  # the probe cell is part of the synthetic state

    x = np.zeros(d)
    m = problem.M(0.0, x).center()
    n_solves = max(1, reps // 10)
    t0 = time.perf_counter()
    for _ in range(n_solves):
        solve_implicit(0.0, x, 0.1, m, problem.f, problem.jac_f,
                       lf_tph=problem.lf_at(0.1))
    c_newton = (time.perf_counter() - t0) / n_solves

    pts = np.random.default_rng(0).normal(size=(reps, d))
    t0 = time.perf_counter()
    project_points(pts, spec)
    c_eval = (time.perf_counter() - t0) / reps
    return CostCalibration(c_scan=c_scan, c_newton=c_newton, c_eval=c_eval)


def cost_model_estimate(calib: CostCalibration, state_size: int, image_vol: float,
                        domain_cells: int | None = None) -> dict:
    """Predicted per-step times for both semi-implicit schemes.

    The parameterized scheme pays one solve per (state cell, velocity sample),
    the split scheme one solve per state cell plus one projection per image
    sample; both scan the domain once.
    """
    if domain_cells is None:
        domain_cells = state_size
    scan = calib.c_scan * domain_cells
    time_par = scan + (calib.c_newton + calib.c_eval) * image_vol * state_size
    time_split = scan + (calib.c_newton + calib.c_eval * image_vol) * state_size
    return {
        "time_par": time_par,
        "time_split": time_split,
        "ratio": time_par / time_split if time_split > 0 else float("nan"),
    }


def measure_step_costs(problem: Problem, h: float, eps: float, state_size: int,
                       workers: int = 1) -> dict:
    """Wall times of one real step of each scheme on a synthetic state.

    The state is a contiguous run of ``state_size`` cells along the first
    axis; returns measured times and their ratio for comparison against
    cost_model_estimate.
    """
    d = problem.dim
    rho = h * h
    spec = GridSpec(rho, tuple(np.zeros(d)), d)
    cells = np.zeros((max(1, state_size), d), dtype=np.int64)
    cells[:, 0] = np.arange(max(1, state_size))
    state = LatticeSet(spec, cells)
    out = {}
    for scheme in ("parameterized", "split"):
        _, rec = step_set(problem, 0.0, h, state, eps, spec, scheme, workers=workers)
        out[f"measured_{scheme}"] = rec.wall_s
        out[f"calls_{scheme}"] = rec.solver_calls
    out["measured_ratio"] = (
        out["measured_parameterized"] / out["measured_split"]
        if out["measured_split"] > 0 else float("nan")
    )
    return out
