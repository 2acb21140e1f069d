"""One-step maps and reachable-set iteration on a spatial lattice.

Three step maps are provided:

* ``parameterized`` — implicit in the single-valued part: for every velocity
  sample m of M(t,x) solve z = x + h f(t+h, z) + h m, then project the
  solutions to the lattice. One implicit solve per (state point, sample).
* ``split`` — solve z = x + h f(t+h, z) once, then add h M(t,x) by sampling
  the image set and project. One implicit solve per state point.
* ``explicit`` — forward Euler baseline x + h f(t,x) + h M(t,x), no solves.

Reachable sets are iterated by applying the chosen step map to every grid
point of the current node set and merging the projected images; merging is a
lattice-cell union, so overlapping images collapse and the merge order is
irrelevant.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import cdist

from .convex import ConvexSet, minkowski_point_set, sample_convex
from .implicit import (
    NoConvergence,
    SolveConfig,
    StepSizeViolation,
    _solve_scalar,
    _solve_vector,
    scheme_solve_config,
)
from .sets import GridSpec, LatticeSet, as_cloud, project_points

__all__ = [
    "SCHEMES",
    "TimeGrid",
    "DiscretizationSchedule",
    "StepRecord",
    "ReachTube",
    "step_parameterized",
    "step_split",
    "step_explicit",
    "step_set",
    "initial_set",
    "reach",
    "diameter",
]

SCHEMES = ("explicit", "parameterized", "split")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nodes 0 = t_0 < ... < t_N = T."""

    nodes: tuple

    def __post_init__(self):
        nodes = tuple(float(t) for t in np.atleast_1d(np.asarray(self.nodes, dtype=float)))
        if len(nodes) < 1:
            raise ValueError("time grid needs at least one node")
        if nodes[0] != 0.0:
            raise ValueError(f"time grid must start at 0, got {nodes[0]}")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("time grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, T: float, n_steps: int) -> "TimeGrid":
        if n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if n_steps == 0:
            if T != 0:
                raise ValueError("a 0-step grid must have T = 0")
            return cls((0.0,))
        return cls(tuple(np.linspace(0.0, float(T), n_steps + 1)))

    @property
    def steps(self) -> np.ndarray:
        return np.diff(np.asarray(self.nodes))

    @property
    def n_steps(self) -> int:
        return len(self.nodes) - 1

    @property
    def T(self) -> float:
        return self.nodes[-1]

    def validate(self, moduli) -> None:
        """Check the step-size condition l_f(t_{n+1}) h_n < 1 on every step."""
        nodes = self.nodes
        for n, h in enumerate(self.steps):
            lf = moduli.l_f(nodes[n + 1])
            if lf * h >= 1.0:
                raise StepSizeViolation(
                    f"step {n}: l_f({nodes[n + 1]}) * {h} = {lf * h} >= 1"
                )


def _parse_value_rule(rule: str, kind: str) -> float:
    try:
        return float(rule.split(":", 1)[1])
    except (IndexError, ValueError):
        raise ValueError(f"malformed {kind} rule {rule!r}; expected 'const:<value>'")


@dataclass(frozen=True)
class DiscretizationSchedule:
    """Grid widths rho_0..rho_N and velocity sampling widths eps_0..eps_{N-1}."""

    rho: tuple
    eps: tuple

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho)
        eps = tuple(float(e) for e in self.eps)
        if any(r <= 0 for r in rho) or any(e <= 0 for e in eps):
            raise ValueError("all rho and eps values must be positive")
        if len(rho) != len(eps) + 1:
            raise ValueError("need one rho per node and one eps per step")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def from_rules(cls, grid: TimeGrid, rho_rule: str = "h2",
                   eps_rule: str = "h") -> "DiscretizationSchedule":
        """Build a schedule from the CLI-style rules.

        rho rules: ``h2`` (rho = h^2, the first-order choice) or ``const:<v>``.
        eps rules: ``h`` or ``const:<v>``.
        """
        steps = grid.steps
        if len(steps) == 0:
            h0 = 1.0
            steps = np.array([h0])
        if rho_rule == "h2":
            rho = (float(steps[0]) ** 2,) + tuple(float(h) ** 2 for h in steps)
        elif rho_rule.startswith("const:"):
            v = _parse_value_rule(rho_rule, "rho")
            rho = (v,) * (len(steps) + 1)
        else:
            raise ValueError(f"unknown rho rule {rho_rule!r}")
        if eps_rule == "h":
            eps = tuple(float(h) for h in steps)
        elif eps_rule.startswith("const:"):
            v = _parse_value_rule(eps_rule, "eps")
            eps = (v,) * len(steps)
        else:
            raise ValueError(f"unknown eps rule {eps_rule!r}")
        if len(grid.steps) == 0:
            return cls(rho[:1], ())
        return cls(rho, eps)


@dataclass
class StepRecord:
    """Per-step cost accounting for one reach iteration."""

    solver_calls: int
    newton_iters: int
    damped_iters: int
    points_in: int
    velocity_samples: int
    wall_s: float


@dataclass
class ReachTube:
    grid: TimeGrid
    sched: DiscretizationSchedule
    scheme: str
    sets: list
    records: list

    def __post_init__(self):
        if len(self.sets) != len(self.grid.nodes):
            raise ValueError("one lattice set per time node required")

    @property
    def solver_calls(self) -> int:
        return sum(r.solver_calls for r in self.records)

    @property
    def wall_s(self) -> float:
        return sum(r.wall_s for r in self.records)

    def write_dir(self, out_dir) -> None:
        """tube_<n>.csv per node plus a manifest with times and costs."""
        import os

        os.makedirs(out_dir, exist_ok=True)
        for n, lat in enumerate(self.sets):
            lat.to_csv(os.path.join(out_dir, f"tube_{n}.csv"))
        with open(os.path.join(out_dir, "manifest.txt"), "w", newline="") as fh:
            fh.write(f"scheme={self.scheme}\n")
            fh.write(f"nodes={len(self.sets)}\n")
            for n, (lat, rec) in enumerate(zip(self.sets, self.records)):
                fh.write(
                    f"node={n} t={self.grid.nodes[n]!r} cells={len(lat)} "
                    f"solver_calls={rec.solver_calls} newton_iters={rec.newton_iters} "
                    f"damped_iters={rec.damped_iters} wall_s={rec.wall_s:.6f}\n"
                )


def _solve_many_scalar(t, h, xs, ms, f, jac_f, cfg, lf):
    """Solve the implicit equation for each (x, m) pair; dim == 1 fast path."""
    zs = np.empty(len(xs))
    ni = nd = 0
    for i, (x, m) in enumerate(zip(xs.tolist(), ms.tolist())):
        z, n1, n2, rn, ok = _solve_scalar(t, x, h, m, f, jac_f, cfg, lf)
        if not ok:
            raise NoConvergence(
                f"implicit solve failed (residual {rn:.3e}) [t={t}, x={x}, m={m}]"
            )
        zs[i] = z
        ni += n1
        nd += n2
    return zs, ni, nd


def _solve_many_vector(t, h, xs, ms, f, jac_f, cfg, lf):
    d = xs.shape[1]
    zs = np.empty((len(xs), d))
    ni = nd = 0
    for i in range(len(xs)):
        z, n1, n2, rn, ok = _solve_vector(t, xs[i], h, ms[i], f, jac_f, cfg, lf)
        if not ok:
            raise NoConvergence(
                f"implicit solve failed (residual {rn:.3e}) [t={t}, x={xs[i]}, m={ms[i]}]"
            )
        zs[i] = z
        ni += n1
        nd += n2
    return zs, ni, nd


def _solve_pairs(t, h, xs, ms, problem, cfg, lf, workers: int = 1):
    """Solve all (state point, velocity) pairs; pure per pair, so chunks may
    run concurrently — results are merged in chunk order, deterministically."""
    d = problem.dim
    runner = _solve_many_scalar if d == 1 else _solve_many_vector
    if d == 1:
        xs_in = np.asarray(xs, dtype=float).reshape(-1)
        ms_in = np.asarray(ms, dtype=float).reshape(-1)
    else:
        xs_in, ms_in = np.asarray(xs, dtype=float), np.asarray(ms, dtype=float)
    if workers <= 1 or len(xs_in) < 64:
        zs, ni, nd = runner(t, h, xs_in, ms_in, problem.f, problem.jac_f, cfg, lf)
    else:
        chunks = np.array_split(np.arange(len(xs_in)), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(runner, t, h, xs_in[c], ms_in[c], problem.f,
                            problem.jac_f, cfg, lf)
                for c in chunks if len(c)
            ]
            parts = [f.result() for f in futs]
        zs = np.concatenate([p[0] for p in parts])
        ni = sum(p[1] for p in parts)
        nd = sum(p[2] for p in parts)
    if d == 1:
        zs = zs.reshape(-1, 1)
    return zs, ni, nd


def _check_a3(problem, t: float, h: float) -> float:
    lf = problem.lf_at(t + h)
    if lf * h >= 1.0:
        raise StepSizeViolation(f"l_f({t + h}) * {h} = {lf * h} >= 1")
    return lf


def _velocity_samples(problem, t, pts, eps):
    """Velocity samples per state point; shared when M is x-independent."""
    if problem.m_state_independent:
        s = sample_convex(problem.M(t, pts[0]), eps)
        return [s] * len(pts), len(s)
    samples = [sample_convex(problem.M(t, p), eps) for p in pts]
    return samples, max(len(s) for s in samples)


def _cloud_parameterized(problem, t, h, pts, eps, cfg, workers):
    lf = _check_a3(problem, t, h)
    samples, k = _velocity_samples(problem, t, pts, eps)
    xs = np.repeat(pts, [len(s) for s in samples], axis=0)
    ms = np.concatenate(samples, axis=0)
    zs, ni, nd = _solve_pairs(t, h, xs, ms, problem, cfg, lf, workers)
    return zs, len(xs), ni, nd, k


def _cloud_split(problem, t, h, pts, eps_image, cfg, workers):
    lf = _check_a3(problem, t, h)
    zeros = np.zeros_like(pts)
    zs, ni, nd = _solve_pairs(t, h, pts, zeros, problem, cfg, lf, workers)
    if h == 0.0:
        return zs, len(pts), ni, nd, 1
    if problem.m_state_independent:
        samples = sample_convex(problem.M(t, pts[0]), eps_image)
        cloud = (zs[:, None, :] + h * samples[None, :, :]).reshape(-1, problem.dim)
        k = len(samples)
    else:
        parts = [minkowski_point_set(z, h, problem.M(t, p), eps_image)
                 for z, p in zip(zs, pts)]
        cloud = np.concatenate(parts, axis=0)
        k = max(len(p) for p in parts)
    return cloud, len(pts), ni, nd, k


def _cloud_explicit(problem, t, h, pts, eps):
    vel = np.asarray(problem.f(t, pts), dtype=float).reshape(pts.shape)
    base = pts + h * vel
    if h == 0.0:
        return base, 0, 0, 0, 1
    samples, k = _velocity_samples(problem, t, pts, eps)
    if problem.m_state_independent:
        cloud = (base[:, None, :] + h * samples[0][None, :, :]).reshape(-1, problem.dim)
    else:
        cloud = np.concatenate(
            [b[None, :] + h * s for b, s in zip(base, samples)], axis=0
        )
    return cloud, 0, 0, 0, k


def _step_cloud(scheme, problem, t, h, pts, eps, rho_next, cfg, workers):
    if scheme == "parameterized":
        return _cloud_parameterized(problem, t, h, pts, eps, cfg, workers)
    if scheme == "split":
        eps_image = rho_next / h if h > 0 else 1.0
        return _cloud_split(problem, t, h, pts, eps_image, cfg, workers)
    if scheme == "explicit":
        return _cloud_explicit(problem, t, h, pts, eps)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _default_spec(rho, dim, grid_spec):
    if grid_spec is not None:
        return grid_spec
    return GridSpec(rho, tuple(np.zeros(dim)), dim)


def step_parameterized(t, x, h, rho, eps, problem, cfg=None, grid_spec=None) -> LatticeSet:
    """One parameterized semi-implicit step from a single point, projected.

    Solves one implicit equation per velocity sample of M(t,x); the image is
    the lattice projection of the solution cloud.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cfg = cfg or scheme_solve_config(rho)
    cloud, *_ = _cloud_parameterized(problem, t, h, x.reshape(1, -1), eps, cfg, 1)
    return project_points(cloud, _default_spec(rho, problem.dim, grid_spec))


def step_split(t, x, h, rho, eps_image, problem, cfg=None, grid_spec=None) -> LatticeSet:
    """One split semi-implicit step from a single point, projected.

    Exactly one implicit solve (velocity 0), then the Minkowski image
    z + h M(t,x) is sampled at eps_image and projected.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cfg = cfg or scheme_solve_config(rho)
    cloud, *_ = _cloud_split(problem, t, h, x.reshape(1, -1), eps_image, cfg, 1)
    return project_points(cloud, _default_spec(rho, problem.dim, grid_spec))


def step_explicit(t, x, h, rho, eps, problem, grid_spec=None) -> LatticeSet:
    """One explicit Euler step from a single point, projected (baseline)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cloud, *_ = _cloud_explicit(problem, t, h, x.reshape(1, -1), eps)
    return project_points(cloud, _default_spec(rho, problem.dim, grid_spec))


def step_set(problem, t: float, h: float, state: LatticeSet, eps: float,
             spec_next: GridSpec, scheme: str, cfg: SolveConfig | None = None,
             workers: int = 1) -> tuple[LatticeSet, StepRecord]:
    """Apply one step map to every grid point of ``state`` and merge.

    Returns the projected union of the per-point images together with the
    cost record of the step. The per-point maps are pure; with ``workers > 1``
    they are evaluated concurrently and merged deterministically (the merge is
    a cell union, unaffected by ordering).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    cfg = cfg or scheme_solve_config(spec_next.rho)
    pts = state.points()
    t_start = time.perf_counter()
    cloud, calls, ni, nd, k = _step_cloud(
        scheme, problem, t, h, pts, eps, spec_next.rho, cfg, workers
    )
    new_set = project_points(cloud, spec_next)
    wall = time.perf_counter() - t_start
    return new_set, StepRecord(calls, ni, nd, len(pts), k, wall)


def initial_set(problem, x0, rho0: float, center=None) -> LatticeSet:
    """Project a point or convex-set initial value onto the rho_0 lattice.

    The lattice is centered at x0 (or the set's center) by default, which
    removes the initial projection error for point initial values.
    """
    d = problem.dim
    if isinstance(x0, ConvexSet):
        init_cloud = sample_convex(x0, rho0)
        ctr = x0.center() if center is None else np.asarray(center, dtype=float)
    else:
        init_cloud = as_cloud(np.atleast_1d(np.asarray(x0, dtype=float)).reshape(1, -1), d)
        ctr = init_cloud[0] if center is None else np.asarray(center, dtype=float)
    return project_points(init_cloud, GridSpec(rho0, tuple(ctr), d))


def reach(problem, x0, grid: TimeGrid, sched: DiscretizationSchedule, scheme: str,
          cfg: SolveConfig | None = None, workers: int = 1, center=None) -> ReachTube:
    """Iterate the chosen step map over the time grid from x0.

    x0 may be a point or a convex initial-set descriptor (sampled at rho_0
    before projection). The lattice is centered at x0 (or the set's center),
    which removes the initial projection error for point initial values; a
    different ``center`` may be supplied to override.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if len(sched.rho) != len(grid.nodes):
        raise ValueError("schedule length does not match the time grid")
    if scheme != "explicit":
        grid.validate(problem.moduli)
    node0 = initial_set(problem, x0, sched.rho[0], center)
    ctr = node0.spec.center
    sets = [node0]
    records = [StepRecord(0, 0, 0, len(node0), 0, 0.0)]
    nodes = grid.nodes
    for n in range(grid.n_steps):
        t, h = nodes[n], float(grid.steps[n])
        spec_next = GridSpec(sched.rho[n + 1], ctr, problem.dim)
        try:
            new_set, rec = step_set(
                problem, t, h, sets[n], sched.eps[n], spec_next, scheme,
                cfg, workers
            )
        except NoConvergence as exc:
            raise NoConvergence(f"{exc} [node={n}]", stats=exc.stats) from None
        sets.append(new_set)
        records.append(rec)
    return ReachTube(grid, sched, scheme, sets, records)


def _hull_diameter(pts: np.ndarray) -> float:
    try:
        hull = ConvexHull(pts)
        vertices = pts[hull.vertices]
    except QhullError:
        # degenerate (lower-dimensional) sets: project onto the spanned
        # subspace and retry, or fall back to the 1-d extent
        mean = pts.mean(axis=0)
        _, s, Vt = np.linalg.svd(pts - mean, full_matrices=False)
        rank = int(np.sum(s > 1e-12 * max(1.0, s[0] if len(s) else 1.0)))
        if rank <= 1:
            proj = (pts - mean) @ Vt[0]
            return float(proj.max() - proj.min())
        reduced = (pts - mean) @ Vt[:rank].T
        hull = ConvexHull(reduced)
        vertices = pts[hull.vertices]
    return float(cdist(vertices, vertices).max())


def diameter(lat: LatticeSet) -> float:
    """Max pairwise Euclidean distance between the grid points of a set."""
    pts = lat.points()
    if pts.shape[0] == 1:
        return 0.0
    if lat.spec.dim == 1:
        return float(pts.max() - pts.min())
    if pts.shape[0] <= 3000:
        return float(cdist(pts, pts).max())
    return _hull_diameter(pts)
