"""Newton-based solver for the per-parameter implicit equation.

Each semi-implicit step needs the unique solution z of

    z = x + h f(t+h, z) + h m

for a velocity sample m. Under the step-size condition l_f(t+h) h < 1 the
solution exists and is unique, and the residual map z -> x + h f(t+h,z) + hm - z
has Jacobian h J_f - I, close to -I for small h, so a damped Newton iteration
from the explicit-Euler predictor is fast and safe. If Newton stalls (f is
only one-sided Lipschitz, possibly nonsmooth), a damped fixed-point fallback
z <- z + tau r(z) finishes the job.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SolveConfig",
    "SolveStats",
    "NoConvergence",
    "StepSizeViolation",
    "residual",
    "solve_implicit",
]


class StepSizeViolation(ValueError):
    """Raised when l_f(t+h) * h >= 1 and the moduli are known."""


class NoConvergence(RuntimeError):
    """Raised when the iteration caps are exhausted; h is probably too large."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class SolveConfig:
    abs_tol: float = 1e-10
    max_newton_iters: int = 50
    max_damped_iters: int = 2000
    fd_step: float = 1e-7

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_newton_iters < 1 or self.max_damped_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


@dataclass(frozen=True)
class SolveStats:
    newton_iters: int
    damped_iters: int
    final_residual: float
    converged: bool


DEFAULT_CONFIG = SolveConfig()


def scheme_solve_config(rho: float) -> SolveConfig:
    """Residual target for scheme steps: solver error below grid error."""
    return SolveConfig(abs_tol=max(1e-10, 1e-3 * rho))


def residual(t, x, h, m, z, f):
    """x + h f(t+h, z) + h m - z (zero exactly at the implicit solution)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    m = np.atleast_1d(np.asarray(m, dtype=float))
    return x + h * np.atleast_1d(np.asarray(f(t + h, z), dtype=float)) + h * m - z


def _damping_factor(lf_tph, h: float) -> float:
    if lf_tph is None:
        return 0.25
    return 0.5 * (1.0 - lf_tph * h) / (1.0 + abs(lf_tph) * h)


def _check_a3(lf_tph, h: float) -> None:
    if lf_tph is not None and lf_tph * h >= 1.0:
        raise StepSizeViolation(
            f"step-size condition violated: l_f(t+h)*h = {lf_tph * h!r} >= 1"
        )


def _solve_scalar(t, x, h, m, f, jac_f, cfg, lf_tph, z0=None):
    """Fast path for dim == 1; plain-float arithmetic throughout.

    Returns (z, newton_iters, damped_iters, |residual|, converged).
    """
    x = float(x)
    m = float(m)
    if h == 0.0:
        return x, 0, 0, 0.0, True
    tp = t + h
    tol = cfg.abs_tol
    # explicit predictor (O(h^2) off) unless a start is supplied
    z = x + h * (float(f(t, x)) + m) if z0 is None else float(z0)
    base = x + h * m
    r = base + h * float(f(tp, z)) - z
    n_newton = 0
    for _ in range(cfg.max_newton_iters):
        if abs(r) <= tol:
            return z, n_newton, 0, abs(r), True
        if jac_f is not None:
            j = float(jac_f(tp, z))
        else:
            s = max(cfg.fd_step, cfg.fd_step * abs(z))
            j = (float(f(tp, z + s)) - float(f(tp, z - s))) / (2.0 * s)
        denom = h * j - 1.0
        if denom == 0.0:
            break
        step = -r / denom
        lam = 1.0
        accepted = False
        for _ in range(9):
            z_new = z + lam * step
            r_new = base + h * float(f(tp, z_new)) - z_new
            if abs(r_new) < abs(r):
                z, r = z_new, r_new
                accepted = True
                break
            lam *= 0.5
        n_newton += 1
        if not accepted:
            break
    if abs(r) <= tol:
        return z, n_newton, 0, abs(r), True
    # damped fixed-point fallback, monotone-contractive in the OSL sense
    tau = _damping_factor(lf_tph, h)
    n_damped = 0
    for _ in range(cfg.max_damped_iters):
        z = z + tau * r
        r = base + h * float(f(tp, z)) - z
        n_damped += 1
        if abs(r) <= tol:
            return z, n_newton, n_damped, abs(r), True
    return z, n_newton, n_damped, abs(r), False


def _fd_jacobian(f, tp, z, base_step):
    d = z.shape[0]
    J = np.empty((d, d))
    for i in range(d):
        s = max(base_step, base_step * abs(z[i]))
        zp = z.copy()
        zm = z.copy()
        zp[i] += s
        zm[i] -= s
        J[:, i] = (np.asarray(f(tp, zp), dtype=float) - np.asarray(f(tp, zm), dtype=float)) / (2 * s)
    return J


def _solve_vector(t, x, h, m, f, jac_f, cfg, lf_tph, z0=None):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = np.atleast_1d(np.asarray(m, dtype=float))
    d = x.shape[0]
    if h == 0.0:
        return x.copy(), 0, 0, 0.0, True
    tp = t + h
    tol = cfg.abs_tol
    base = x + h * m
    if z0 is None:
        z = x + h * (np.asarray(f(t, x), dtype=float) + m)
    else:
        z = np.atleast_1d(np.asarray(z0, dtype=float)).copy()
    r = base + h * np.asarray(f(tp, z), dtype=float) - z
    rn = float(np.linalg.norm(r))
    eye = np.eye(d)
    n_newton = 0
    for _ in range(cfg.max_newton_iters):
        if rn <= tol:
            return z, n_newton, 0, rn, True
        if jac_f is not None:
            J = np.asarray(jac_f(tp, z), dtype=float).reshape(d, d)
        else:
            J = _fd_jacobian(f, tp, z, cfg.fd_step)
        A = h * J - eye
        try:
            step = np.linalg.solve(A, -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        accepted = False
        for _ in range(9):
            z_new = z + lam * step
            r_new = base + h * np.asarray(f(tp, z_new), dtype=float) - z_new
            rn_new = float(np.linalg.norm(r_new))
            if rn_new < rn:
                z, r, rn = z_new, r_new, rn_new
                accepted = True
                break
            lam *= 0.5
        n_newton += 1
        if not accepted:
            break
    if rn <= tol:
        return z, n_newton, 0, rn, True
    tau = _damping_factor(lf_tph, h)
    n_damped = 0
    for _ in range(cfg.max_damped_iters):
        z = z + tau * r
        r = base + h * np.asarray(f(tp, z), dtype=float) - z
        rn = float(np.linalg.norm(r))
        n_damped += 1
        if rn <= tol:
            return z, n_newton, n_damped, rn, True
    return z, n_newton, n_damped, rn, False


def solve_implicit(t, x, h, m, f, jac_f=None, cfg=None, lf_tph=None, z0=None):
    """Solve z = x + h f(t+h, z) + h m.

    Parameters
    ----------
    t, x, h, m : step data; x and m are points in R^d (floats allowed for d=1)
    f : right-hand side, f(t, x) -> R^d
    jac_f : optional Jacobian oracle, jac_f(t, x) -> (d, d); finite
        differences are used when absent
    cfg : SolveConfig
    lf_tph : optional value of the OSL modulus l_f at t+h; enables the
        step-size assertion and a sharper damping factor
    z0 : optional starting point (default: explicit Euler predictor); the
        solution is unique, so any converged start agrees to tolerance

    Returns
    -------
    (z, stats) : solution as an (d,) array and SolveStats

    Raises
    ------
    StepSizeViolation : if lf_tph*h >= 1
    NoConvergence : if both iteration phases exhaust their caps
    """
    cfg = cfg or DEFAULT_CONFIG
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    _check_a3(lf_tph, h)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if x_arr.shape[0] == 1:
        m_arr = np.atleast_1d(np.asarray(m, dtype=float))
        z0s = None if z0 is None else float(np.atleast_1d(np.asarray(z0, dtype=float))[0])
        z, ni, nd, rn, ok = _solve_scalar(t, x_arr[0], h, m_arr[0], f, jac_f, cfg,
                                          lf_tph, z0s)
        z_out = np.array([z])
    else:
        z_out, ni, nd, rn, ok = _solve_vector(t, x_arr, h, m, f, jac_f, cfg, lf_tph, z0)
    stats = SolveStats(ni, nd, rn, ok)
    if not ok:
        raise NoConvergence(
            f"implicit solve failed at t={t}, h={h}: residual {rn:.3e} > {cfg.abs_tol:.3e} "
            f"after {ni} Newton and {nd} damped iterations",
            stats=stats,
        )
    return z_out, stats
