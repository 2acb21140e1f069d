"""A-priori and a-posteriori error bounds for the semi-implicit schemes.

All bounds are driven by a small set of problem moduli: the one-sided
Lipschitz modulus l_f(t) of the single-valued part, the Lipschitz modulus
L_M(t) of the set-valued part, moduli of continuity tau_f, chi_f, tau_M on
the relevant compact, the velocity bound P and the trajectory bound C.

The temporal bounds accumulate the per-step consistency error

    Gamma(h, t) = tau_f(h) + chi_f(P h) + tau_M(h) + L_M(t) P h

with exponential weights exp(l_f h/(1 - l_f h) + L_M h) per step; the split
scheme uses the modified term Gamma_tilde and plain products of
1/(1 - l_f h) + L_M h. The spatial bounds are exact product sums in the grid
widths rho_k and the velocity sampling widths eps_k. Everything is evaluated
by the defining recursions (no closed-form shortcuts), so the values are the
displayed sums to machine precision; the *_constant helpers provide the
equivalent geometric closed forms for constant data, and the remark_*
functions the exponential simplifications usually quoted for that case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convex import point_set_distance

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

__all__ = [
    "ModuliSpec",
    "gamma",
    "gamma_tilde",
    "apriori_parameterized",
    "apriori_parameterized_all",
    "apriori_filippov_continuous",
    "apriori_spatial_parameterized",
    "apriori_spatial_parameterized_all",
    "apriori_split",
    "apriori_split_all",
    "apriori_spatial_split",
    "apriori_spatial_split_all",
    "filippov_discrete_bound",
    "apriori_parameterized_constant",
    "apriori_filippov_constant",
    "apriori_spatial_parameterized_constant",
    "apriori_split_constant",
    "apriori_spatial_split_constant",
    "remark_parameterized_constant",
    "remark_split_constant",
]

_QUAD_N = 8192  # trapezoid subintervals; 256 is too coarse for 1e-6 agreement


@dataclass(frozen=True)
class ModuliSpec:
    """Problem moduli feeding the error-bound formulas.

    ``l_f`` may be negative (that is the whole point of the semi-implicit
    construction); ``L_M`` and the moduli of continuity are nonnegative and
    vanish at 0. ``l_f_const``/``L_M_const`` are set when the corresponding
    function is constant, enabling closed-form inner integrals.
    """

    l_f: Callable[[float], float]
    L_M: Callable[[float], float]
    tau_f: Callable[[float], float]
    chi_f: Callable[[float], float]
    tau_M: Callable[[float], float]
    P: float
    C: float
    L: float | None = None
    l_f_const: float | None = None
    L_M_const: float | None = None
    estimated: bool = False

    @classmethod
    def constant(cls, l_f: float, L_M: float, L: float, P: float, C: float,
                 estimated: bool = False) -> "ModuliSpec":
        """Constant-coefficient, L-Lipschitz data: all moduli are L*delta."""
        return cls(
            l_f=lambda t: l_f,
            L_M=lambda t: L_M,
            tau_f=lambda d: L * d,
            chi_f=lambda d: L * d,
            tau_M=lambda d: L * d,
            P=P,
            C=C,
            L=L,
            l_f_const=l_f,
            L_M_const=L_M,
            estimated=estimated,
        )


def _nodes_steps(grid):
    nodes = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    return nodes, np.diff(nodes)


def gamma(h: float, t: float, moduli: ModuliSpec) -> float:
    """Per-step consistency error of the parameterized scheme."""
    if h < 0:
        raise ValueError("h must be >= 0")
    P = moduli.P
    return (
        moduli.tau_f(h)
        + moduli.chi_f(P * h)
        + moduli.tau_M(h)
        + moduli.L_M(t) * P * h
    )


def _drift_integral(t0: float, t1: float, moduli: ModuliSpec, num: int = 129) -> float:
    """integral_{t0}^{t1} exp(integral_s^{t1} l(u) du) P ds with l = l_f + L_M."""
    if t1 <= t0:
        return 0.0
    if moduli.l_f_const is not None and moduli.L_M_const is not None:
        l = moduli.l_f_const + moduli.L_M_const
        h = t1 - t0
        if l == 0.0:
            return moduli.P * h
        return moduli.P * (np.exp(l * h) - 1.0) / l
    s = np.linspace(t0, t1, num)
    l_vals = np.array([moduli.l_f(u) + moduli.L_M(u) for u in s])
    # E[i] = integral_{s_i}^{t1} l du via right-to-left cumulative trapezoid
    seg = 0.5 * (l_vals[1:] + l_vals[:-1]) * np.diff(s)
    E = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return float(_trapezoid(np.exp(E) * moduli.P, s))


def gamma_tilde(h: float, t: float, moduli: ModuliSpec) -> float:
    """Per-step consistency error of the split scheme."""
    if h < 0:
        raise ValueError("h must be >= 0")
    if h == 0:
        return 0.0
    P = moduli.P
    lf = moduli.l_f(t + h)
    return (
        (moduli.tau_f(h) + moduli.chi_f(P * h)) / (1.0 - lf * h)
        + moduli.chi_f(_drift_integral(t, t + h, moduli))
        + moduli.tau_M(h)
        + moduli.L_M(t) * P * h
    )


def _check_a3(lf_val: float, h: float) -> None:
    if lf_val * h >= 1.0:
        raise ValueError(f"step-size condition violated: l_f*h = {lf_val * h} >= 1")


def apriori_parameterized_all(grid, moduli: ModuliSpec, upto: int | None = None) -> np.ndarray:
    """apriori_parameterized evaluated at every node 0..n in one pass."""
    nodes, steps = _nodes_steps(grid)
    n = len(steps) if upto is None else upto
    out = np.zeros(n + 1)
    S = 0.0
    for k in range(n):
        h = steps[k]
        lf = moduli.l_f(nodes[k + 1])
        _check_a3(lf, h)
        a = lf * h / (1.0 - lf * h)
        b = moduli.L_M(nodes[k]) * h
        S = np.exp(a + b) * S + np.exp(a) * h * gamma(h, nodes[k], moduli)
        out[k + 1] = S
    return out


def apriori_parameterized(n: int, grid, moduli: ModuliSpec) -> float:
    """Temporal bound for the parameterized scheme at node n.

    sum_{k<n} exp(sum_{j=k}^{n-1} a_j + sum_{j=k+1}^{n-1} b_j) h_k Gamma(h_k, t_k)
    with a_j = l_f(t_{j+1}) h_j / (1 - l_f(t_{j+1}) h_j), b_j = L_M(t_j) h_j,
    evaluated by the recursion S_{k+1} = e^{a_k + b_k} S_k + e^{a_k} h_k Gamma_k.
    """
    return float(apriori_parameterized_all(grid, moduli, upto=n)[n])


def apriori_filippov_continuous(n: int, grid, moduli: ModuliSpec,
                                num: int = _QUAD_N) -> float:
    """Reverse-direction temporal bound (continuous stability estimate).

    integral_0^{t_n} exp(integral_t^{t_n} l_f + L_M ds) Gamma(h_max, t) dt,
    trapezoid quadrature with ``num`` subintervals.
    """
    nodes, steps = _nodes_steps(grid)
    if n == 0:
        return 0.0
    t_n = nodes[n]
    h_max = float(steps[:n].max())
    s = np.linspace(0.0, t_n, num + 1)
    l_vals = np.array([moduli.l_f(u) + moduli.L_M(u) for u in s])
    seg = 0.5 * (l_vals[1:] + l_vals[:-1]) * np.diff(s)
    E = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    g_vals = np.array([gamma(h_max, u, moduli) for u in s])
    return float(_trapezoid(np.exp(E) * g_vals, s))


def apriori_spatial_parameterized_all(grid, sched, moduli: ModuliSpec, dim: int = 1,
                                      upto: int | None = None) -> np.ndarray:
    """apriori_spatial_parameterized at every node 0..n in one pass."""
    nodes, steps = _nodes_steps(grid)
    rho = np.asarray(sched.rho, dtype=float)
    eps = np.asarray(sched.eps, dtype=float)
    half = 0.5 * np.sqrt(dim)
    n = len(steps) if upto is None else upto
    out = np.zeros(n + 1)
    E = half * rho[0]
    out[0] = E
    for k in range(n):
        h = steps[k]
        lf = moduli.l_f(nodes[k + 1])
        _check_a3(lf, h)
        beta = (1.0 + moduli.L_M(nodes[k]) * h) / (1.0 - lf * h)
        E = beta * E + half * (rho[k + 1] + eps[k] * h / (1.0 - lf * h))
        out[k + 1] = E
    return out


def apriori_spatial_parameterized(n: int, grid, sched, moduli: ModuliSpec,
                                  dim: int = 1) -> float:
    """Spatial bound for the fully discretized parameterized scheme at node n.

    sqrt(d)/2 [ rho_0 prod_k beta_k
                + sum_k (prod_{j>k} beta_j)(rho_{k+1} + eps_k h_k/(1-l_f h_k)) ]
    with beta_k = (1 + L_M(t_k) h_k) / (1 - l_f(t_{k+1}) h_k).
    """
    return float(apriori_spatial_parameterized_all(grid, sched, moduli, dim, upto=n)[n])


def apriori_split_all(grid, moduli: ModuliSpec, upto: int | None = None) -> np.ndarray:
    """apriori_split at every node 0..n in one pass."""
    nodes, steps = _nodes_steps(grid)
    n = len(steps) if upto is None else upto
    out = np.zeros(n + 1)
    S = 0.0
    for k in range(n):
        h = steps[k]
        lf = moduli.l_f(nodes[k + 1])
        _check_a3(lf, h)
        g = 1.0 / (1.0 - lf * h) + moduli.L_M(nodes[k]) * h
        S = g * S + h * gamma_tilde(h, nodes[k], moduli)
        out[k + 1] = S
    return out


def apriori_split(n: int, grid, moduli: ModuliSpec) -> float:
    """Temporal bound for the split scheme at node n.

    sum_{k<n} (prod_{j=k+1}^{n-1} g_j) h_k Gamma_tilde(h_k, t_k) with
    g_j = 1/(1 - l_f(t_{j+1}) h_j) + L_M(t_j) h_j.
    """
    return float(apriori_split_all(grid, moduli, upto=n)[n])


def apriori_spatial_split_all(grid, sched, moduli: ModuliSpec, dim: int = 1,
                              upto: int | None = None) -> np.ndarray:
    """apriori_spatial_split at every node 0..n in one pass."""
    nodes, steps = _nodes_steps(grid)
    rho = np.asarray(sched.rho, dtype=float)
    half = 0.5 * np.sqrt(dim)
    n = len(steps) if upto is None else upto
    out = np.zeros(n + 1)
    B = half * rho[0]
    out[0] = B
    for k in range(n):
        h = steps[k]
        lf = moduli.l_f(nodes[k + 1])
        _check_a3(lf, h)
        g = 1.0 / (1.0 - lf * h) + moduli.L_M(nodes[k]) * h
        B = g * B + half * rho[k + 1]
        out[k + 1] = B
    return out


def apriori_spatial_split(n: int, grid, sched, moduli: ModuliSpec,
                          dim: int = 1) -> float:
    """Spatial bound for the fully discretized split scheme at node n.

    sqrt(d)/2 sum_{k=0}^{n} (prod_{j=k}^{n-1} g_j) rho_k; note the initial
    grid projection also gets amplified, hence n+1 terms.
    """
    return float(apriori_spatial_split_all(grid, sched, moduli, dim, upto=n)[n])


def filippov_discrete_bound(x_seq, grid, problem, moduli: ModuliSpec,
                            initial_gap: float = 0.0) -> np.ndarray:
    """Discrete stability bound along an arbitrary sequence.

    For the defects g_k = dist((x_{k+1}-x_k)/h_k, f(t_{k+1},x_{k+1}) + M(t_k,x_k))
    there is a scheme trajectory within

        exp(sum a_k + b_k) |x_0 - y_0|
        + sum_k exp(sum_{j>=k} a_j + sum_{j>k} b_j) h_k g_k

    of the sequence at every node; returns that bound per node.
    """
    nodes, steps = _nodes_steps(grid)
    x_seq = np.atleast_2d(np.asarray(x_seq, dtype=float))
    if x_seq.shape[0] == 1 and len(nodes) > 1:
        x_seq = x_seq.T  # allow 1-d sequences for scalar problems
    if x_seq.shape[0] != len(nodes):
        raise ValueError(f"sequence has {x_seq.shape[0]} points, grid has {len(nodes)} nodes")
    out = np.empty(len(nodes))
    out[0] = initial_gap
    S = 0.0
    W = initial_gap
    for k in range(len(steps)):
        h = steps[k]
        t_next = nodes[k + 1]
        lf = moduli.l_f(t_next)
        _check_a3(lf, h)
        v = (x_seq[k + 1] - x_seq[k]) / h
        target = v - np.asarray(problem.f(t_next, x_seq[k + 1]), dtype=float)
        g = point_set_distance(target, problem.M(nodes[k], x_seq[k]))
        a = lf * h / (1.0 - lf * h)
        b = moduli.L_M(nodes[k]) * h
        S = np.exp(a + b) * S + np.exp(a) * h * g
        W = np.exp(a + b) * W
        out[k + 1] = W + S
    return out


# ---------------------------------------------------------------------------
# Constant-data closed forms (geometric sums; equal to the loops above)
# ---------------------------------------------------------------------------


def apriori_parameterized_constant(n: int, h: float, l_f: float, L_M: float,
                                   gamma_value: float) -> float:
    """Closed form of apriori_parameterized for constant data."""
    a = l_f * h / (1.0 - l_f * h)
    b = L_M * h
    r = np.exp(a)
    w = np.exp(a + b)
    if abs(w - 1.0) < 1e-14:
        return float(n * h * gamma_value * r)
    return float(h * gamma_value * r * (w**n - 1.0) / (w - 1.0))


def apriori_filippov_constant(t_n: float, h: float, l_f: float, L_M: float,
                              L: float, P: float) -> float:
    """Constant-data value of the continuous stability bound.

    2L(1+P)h (e^{(l_f+L_M) t_n} - 1)/(l_f+L_M), with the limit
    2L(1+P)h t_n at l_f + L_M = 0.
    """
    alpha = l_f + L_M
    g = 2.0 * L * (1.0 + P) * h
    if abs(alpha) < 1e-14:
        return float(g * t_n)
    return float(g * (np.exp(alpha * t_n) - 1.0) / alpha)


def apriori_spatial_parameterized_constant(n: int, h: float, rho0: float,
                                           rho: float, eps: float, l_f: float,
                                           L_M: float, dim: int = 1) -> float:
    """Closed form of apriori_spatial_parameterized for constant schedules."""
    half = 0.5 * np.sqrt(dim)
    beta = (1.0 + L_M * h) / (1.0 - l_f * h)
    per_step = rho + eps * h / (1.0 - l_f * h)
    if abs(beta - 1.0) < 1e-14:
        return float(half * (rho0 + n * per_step))
    return float(half * (rho0 * beta**n + per_step * (beta**n - 1.0) / (beta - 1.0)))


def apriori_split_constant(n: int, h: float, l_f: float, L_M: float,
                           gamma_tilde_value: float) -> float:
    """Closed form of apriori_split for constant data."""
    g = 1.0 / (1.0 - l_f * h) + L_M * h
    if abs(g - 1.0) < 1e-14:
        return float(n * h * gamma_tilde_value)
    return float(h * gamma_tilde_value * (g**n - 1.0) / (g - 1.0))


def apriori_spatial_split_constant(n: int, h: float, rho: float, l_f: float,
                                   L_M: float, dim: int = 1) -> float:
    """Closed form of apriori_spatial_split for constant schedules.

    The geometric sum has n+1 terms: the projection of the initial value is
    amplified along with the per-step projections.
    """
    half = 0.5 * np.sqrt(dim)
    g = 1.0 / (1.0 - l_f * h) + L_M * h
    if abs(g - 1.0) < 1e-14:
        return float(half * (n + 1) * rho)
    return float(half * rho * (g ** (n + 1) - 1.0) / (g - 1.0))


def remark_parameterized_constant(t_n: float, h: float, l_f: float, L_M: float,
                                  L: float, P: float) -> float:
    """Exponential simplification 2L(1+P)h e^{(l_f/(1-l_f h)+L_M) t_n}.

    This is the commonly quoted constant-data form; it is an exponential
    approximation of the geometric sum, not equal to it, and is provided for
    reporting only.
    """
    return float(2.0 * L * (1.0 + P) * h * np.exp((l_f / (1.0 - l_f * h) + L_M) * t_n))


def remark_split_constant(t_n: float, h: float, l_f: float, L_M: float,
                          L: float, P: float) -> float:
    """Exponential simplification of the split-scheme constant-data bound."""
    delta = l_f / (1.0 - l_f * h) + L_M
    lead = t_n if abs(delta) < 1e-14 else (np.exp(delta * t_n) - 1.0) / delta
    mid = h if l_f == 0.0 else (np.exp(l_f * h) - 1.0) / l_f
    per_step = L * (1.0 + P) * h / (1.0 - l_f * h) + mid + (L + L_M * P) * h
    return float(lead * per_step)
