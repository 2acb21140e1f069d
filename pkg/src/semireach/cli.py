"""Command-line front end.

Subcommands: ``convergence``, ``attractor``, ``reach``, ``cost``. Every flag
can also be given in a flat key=value config file (--config); explicit flags
override file values. Outputs land in --out as report.csv / attractor.csv /
tube_<n>.csv / manifest.txt.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    RunConfig,
    build_problem,
    calibrate_cost_model,
    cost_model_estimate,
    run_attractor,
    run_convergence,
    run_reach,
)

_LIST_KEYS = {"h", "scheme", "x0"}


def load_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment; keys mirror the flags."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--problem", choices=["dahlquist", "nonconvex", "stiff_linear", "affine"])
    p.add_argument("--scheme", action="append",
                   choices=["explicit", "parameterized", "split"],
                   help="repeatable; default: parameterized and split")
    p.add_argument("--x0", help="initial point, comma separated for d > 1")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--h", action="append", type=float, help="step size (repeatable)")
    p.add_argument("--rho-rule", dest="rho_rule",
                   help="state grid width rule: h2 or const:<v>")
    p.add_argument("--eps-rule", dest="eps_rule",
                   help="velocity sampling width rule: h or const:<v>")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="recorded for reproducibility")
    p.add_argument("--threads", type=int, help="worker threads for step maps")
    p.add_argument("--lam", type=float, help="stiff_linear decay rate (negative)")
    p.add_argument("--radius", type=float, help="stiff_linear disturbance radius")
    p.add_argument("--max-steps", dest="max_steps", type=int,
                   help="attractor iteration cap")
    p.add_argument("--timing-min-s", dest="timing_min_s", type=float,
                   help="re-run fast configurations until this much wall time")
    p.add_argument("--a-matrix", dest="a_matrix",
                   help="affine problem: constant control matrix 'a11,a12;a21,a22'")
    p.add_argument("--u-lower", dest="u_lower",
                   help="affine problem: control box lower corner 'c1,c2'")
    p.add_argument("--u-upper", dest="u_upper",
                   help="affine problem: control box upper corner 'c1,c2'")


def _parse_list(val: str, cast) -> tuple:
    return tuple(cast(v) for v in str(val).split(",") if v != "")


def _merged_config(args: argparse.Namespace) -> RunConfig:
    defaults = RunConfig()
    file_vals = load_config_file(args.config) if args.config else {}

    def pick(flag_val, key, cast, default):
        if flag_val is not None:
            return flag_val
        if key in file_vals:
            return cast(file_vals[key])
        return default

    schemes = args.scheme
    if schemes is None and "scheme" in file_vals:
        schemes = _parse_list(file_vals["scheme"], str)
    if schemes is None:
        schemes = defaults.schemes

    h = tuple(args.h) if args.h else None
    if h is None and "h" in file_vals:
        h = _parse_list(file_vals["h"], float)
    if h is None:
        h = defaults.h

    x0 = args.x0
    if x0 is None and "x0" in file_vals:
        x0 = file_vals["x0"]
    x0 = _parse_list(x0, float) if x0 is not None else defaults.x0

    u_lower = pick(args.u_lower, "u-lower", str, "")
    u_upper = pick(args.u_upper, "u-upper", str, "")
    return RunConfig(
        problem=pick(args.problem, "problem", str, defaults.problem),
        x0=x0,
        T=pick(args.T, "T", float, defaults.T),
        h=h,
        schemes=tuple(schemes),
        rho_rule=pick(args.rho_rule, "rho-rule", str, defaults.rho_rule),
        eps_rule=pick(args.eps_rule, "eps-rule", str, defaults.eps_rule),
        out=pick(args.out, "out", str, defaults.out),
        seed=pick(args.seed, "seed", int, defaults.seed),
        threads=pick(args.threads, "threads", int, defaults.threads),
        lam=pick(args.lam, "lam", float, defaults.lam),
        radius=pick(args.radius, "radius", float, defaults.radius),
        max_steps=pick(args.max_steps, "max-steps", int, defaults.max_steps),
        timing_min_s=pick(args.timing_min_s, "timing-min-s", float,
                          defaults.timing_min_s),
        a_matrix=pick(args.a_matrix, "a-matrix", str, ""),
        u_lower=_parse_list(u_lower, float) if u_lower else (),
        u_upper=_parse_list(u_upper, float) if u_upper else (),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="semireach",
        description="Reachable sets of differential inclusions via "
                    "semi-implicit Euler schemes on a spatial lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in [
        ("convergence", "error/bound/cost sweep over step sizes"),
        ("attractor", "iterate to the limiting set and report its hull"),
        ("reach", "single reachable-set run, dumped as tube CSVs"),
        ("cost", "calibrate the cost model and print predictions"),
    ]:
        p = sub.add_parser(name, help=descr)
        _add_common(p)
        if name == "cost":
            p.add_argument("--state-size", dest="state_size", type=int, default=1000,
                           help="current-state cell count for the prediction")
            p.add_argument("--image-vol", dest="image_vol", type=float, default=None,
                           help="velocity samples per state cell; default |P_eps(M)|")
    args = parser.parse_args(argv)
    cfg = _merged_config(args)

    if args.command == "convergence":
        report = run_convergence(cfg)
        for row in report.rows:
            print(f"scheme={row.scheme} h={row.h} max_err={row.max_err:.6g} "
                  f"temporal={row.temporal_bound:.6g} spatial={row.spatial_bound:.6g} "
                  f"calls={row.solver_calls} wall={row.wall_s:.3f}s")
        for scheme, slope in report.slopes.items():
            print(f"slope {scheme}: {slope:.3f}")
        print(f"wrote {cfg.out}/report.csv")
    elif args.command == "attractor":
        report = run_attractor(cfg)
        for row in report.rows:
            state = "converged" if row.converged else "NOT CONVERGED"
            print(f"scheme={row.scheme} h={row.h} {state} after {row.steps} steps: "
                  f"hull [{row.lower:.6g}, {row.upper:.6g}]")
        print(f"wrote {cfg.out}/attractor.csv")
    elif args.command == "reach":
        tubes = run_reach(cfg)
        for (scheme, h), tube in tubes.items():
            print(f"scheme={scheme} h={h}: {len(tube.sets)} nodes, "
                  f"final cells={len(tube.sets[-1])}, calls={tube.solver_calls}")
        print(f"wrote tube dumps under {cfg.out}/")
    elif args.command == "cost":
        import os

        import numpy as np

        from .convex import sample_convex
        from .harness import measure_step_costs

        problem = build_problem(cfg)
        calib = calibrate_cost_model(problem)
        h = cfg.h[0]
        if args.image_vol is None:
            m_set = problem.M(0.0, np.zeros(problem.dim))
            image_vol = float(len(sample_convex(m_set, h)))
        else:
            image_vol = args.image_vol
        pred = cost_model_estimate(calib, args.state_size, image_vol)
        meas = measure_step_costs(problem, h, h, args.state_size, workers=cfg.threads)
        print(f"calibration: c_scan={calib.c_scan:.3e}s "
              f"c_newton={calib.c_newton:.3e}s c_eval={calib.c_eval:.3e}s")
        print(f"state_size={args.state_size} image_vol={image_vol}")
        print(f"predicted time_par={pred['time_par']:.3e}s "
              f"time_split={pred['time_split']:.3e}s ratio={pred['ratio']:.2f}")
        print(f"measured  time_par={meas['measured_parameterized']:.3e}s "
              f"time_split={meas['measured_split']:.3e}s "
              f"ratio={meas['measured_ratio']:.2f}")
        print(f"predicted/measured: par "
              f"{pred['time_par'] / meas['measured_parameterized']:.2f}, split "
              f"{pred['time_split'] / meas['measured_split']:.2f}")
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, "cost.csv"), "w", newline="") as fh:
            fh.write("state_size,image_vol,pred_par,pred_split,pred_ratio,"
                     "meas_par,meas_split,meas_ratio\n")
            fh.write(f"{args.state_size},{image_vol!r},{pred['time_par']!r},"
                     f"{pred['time_split']!r},{pred['ratio']!r},"
                     f"{meas['measured_parameterized']!r},"
                     f"{meas['measured_split']!r},{meas['measured_ratio']!r}\n")
        print(f"wrote {cfg.out}/cost.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
