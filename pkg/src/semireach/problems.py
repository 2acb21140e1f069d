"""Problem definitions: right-hand-side splittings F = f + M with moduli.

A problem bundles the single-valued one-sided Lipschitz part f, the
set-valued Lipschitz part M, their moduli, and (when available) an exact
reachable-set oracle used by the benchmark harness to measure true errors.

Conventions: ``f(t, x)`` must accept ``x`` with shape ``(..., d)`` and return
the same shape; for ``dim == 1`` it must additionally accept and return plain
floats (the hot scalar solver path relies on it). ``jac_f(t, x)`` returns a
``(d, d)`` array, or a plain float for ``dim == 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bounds import ModuliSpec
from .convex import Box, ConvexSet, linear_image

__all__ = ["Problem", "dahlquist", "nonconvex_example", "affine_control", "stiff_linear"]


@dataclass(frozen=True)
class Problem:
    name: str
    dim: int
    f: Callable
    M: Callable[[float, np.ndarray], ConvexSet]
    moduli: ModuliSpec
    jac_f: Optional[Callable] = None
    exact_reach: Optional[Callable] = None
    # True when M(t, x) does not depend on x: one velocity sampling per step.
    m_state_independent: bool = False

    def lf_at(self, t: float) -> float:
        return float(self.moduli.l_f(t))


def dahlquist(x0: float = 5.0) -> Problem:
    """Scalar test inclusion dx in -x + [-1, 1].

    Monotone, with explicit upper/lower solutions
    x_plus(t) = e^{-t}(x0 - 1) + 1 and x_minus(t) = e^{-t}(x0 + 1) - 1,
    so the exact reachable set is the interval between them; [-1, 1] is the
    global attractor.
    """
    x0 = float(x0)
    box = Box((-1.0,), (1.0,))
    C = max(abs(x0), 2.0)

    def exact(t: float, x_init=None) -> Box:
        xi = x0 if x_init is None else float(np.atleast_1d(x_init)[0])
        lo = np.exp(-t) * (xi + 1.0) - 1.0
        hi = np.exp(-t) * (xi - 1.0) + 1.0
        return Box((min(lo, hi),), (max(lo, hi),))

    moduli = ModuliSpec(
        l_f=lambda t: -1.0,
        L_M=lambda t: 0.0,
        tau_f=lambda d: 0.0,  # f is autonomous
        chi_f=lambda d: d,    # |f(x) - f(x')| = |x - x'|
        tau_M=lambda d: 0.0,  # M is constant
        P=C + 1.0,
        C=C,
        L=1.0,
        l_f_const=-1.0,
        L_M_const=0.0,
    )
    return Problem(
        name="dahlquist",
        dim=1,
        f=lambda t, x: -x,
        jac_f=lambda t, x: -1.0,
        M=lambda t, x: box,
        moduli=moduli,
        exact_reach=exact,
        m_state_independent=True,
    )


def nonconvex_example() -> Problem:
    """Planar inclusion whose one-step image is a non-convex curve.

    f(x) = (1/2)(-x1 - x2, x1 - x2 - x2^3) is -1/2 one-sided Lipschitz
    (the cross terms cancel and the cubic only helps), and M = [0, 13/2] x {0}
    is constant. The image of a unit step from the origin is parameterized
    over m in [0, 13/2]; three exactly solvable parameters land on
    (0,0), (13/8, 1/2) and (4, 1), which are not collinear.
    """
    box = Box((0.0, 0.0), (6.5, 0.0))

    def f(t, x):
        x = np.asarray(x, dtype=float)
        x1 = x[..., 0]
        x2 = x[..., 1]
        return 0.5 * np.stack([-x1 - x2, x1 - x2 - x2**3], axis=-1)

    def jac(t, x):
        x = np.asarray(x, dtype=float)
        x2 = x[..., 1]
        return 0.5 * np.array([[-1.0, -1.0], [1.0, -1.0 - 3.0 * x2**2]])

    C = 13.0  # d|x|/dt <= -|x|/2 + 6.5, so |x| <= max(|x0|, 13) from the origin
    # |f(x)| <= (1/2) sqrt((2C)^2 + (2C + C^3)^2) on B_C(0)
    f_max = 0.5 * float(np.hypot(2 * C, 2 * C + C**3))
    chi_slope = float(np.linalg.norm(
        0.5 * np.array([[-1.0, -1.0], [1.0, -1.0 - 3.0 * C**2]]), 2
    ))
    moduli = ModuliSpec(
        l_f=lambda t: -0.5,
        L_M=lambda t: 0.0,
        tau_f=lambda d: 0.0,
        chi_f=lambda d, s=chi_slope: s * d,
        tau_M=lambda d: 0.0,
        P=f_max + 6.5,
        C=C,
        L=chi_slope,
        l_f_const=-0.5,
        L_M_const=0.0,
    )
    return Problem(
        name="nonconvex",
        dim=2,
        f=f,
        jac_f=jac,
        M=lambda t, x: box,
        moduli=moduli,
        m_state_independent=True,
    )


def affine_control(f, A, U: ConvexSet, *, l_f, jac_f=None, L_A: float = 0.0,
                   dim: int | None = None, C: float = 10.0, P: float | None = None,
                   L: float | None = None, name: str = "affine_control") -> Problem:
    """Control system dx = f(t,x) + A(t,x) u, u in U, as a splitting.

    ``A`` is either a constant matrix or a callable ``(t, x) -> (d, m)``.
    The induced set-valued part M(t,x) = A(t,x) U is x-Lipschitz with modulus
    L_A * ||U||. Representable combinations: box/polytope control sets under
    any matrix (vertex images), ball control sets under scalar multiples of
    the identity.
    """
    A_const = not callable(A)
    A_mat = np.atleast_2d(np.asarray(A, dtype=float)) if A_const else None
    if A_const:
        # fail fast on unsupported combinations
        M0 = linear_image(A_mat, U)
        d = A_mat.shape[0]
    else:
        d = dim
        if d is None:
            raise ValueError("dim is required when A is a callable")

    def M(t, x):
        if A_const:
            return M0
        return linear_image(np.asarray(A(t, x), dtype=float), U)

    u_norm = U.norm_max()
    L_M_val = L_A * u_norm
    lf_val = float(l_f) if not callable(l_f) else None
    moduli = ModuliSpec(
        l_f=(lambda t: float(l_f)) if not callable(l_f) else l_f,
        L_M=lambda t: L_M_val,
        tau_f=lambda s: 0.0,
        chi_f=lambda s, slope=(L or 1.0): slope * s,
        tau_M=lambda s: 0.0,
        P=P if P is not None else C + u_norm,
        C=C,
        L=L,
        l_f_const=lf_val,
        L_M_const=L_M_val,
        estimated=P is None,
    )
    return Problem(
        name=name,
        dim=d,
        f=f,
        jac_f=jac_f,
        M=M,
        moduli=moduli,
        m_state_independent=A_const,
    )


def stiff_linear(lam: float, radius: float, x0_ref: float = 1.0) -> Problem:
    """Scalar stiff inclusion dx in lam*x + [-radius, radius], lam < 0.

    The exact reachable set from x0 is the interval
    e^{lam t} x0 -/+ (radius/|lam|)(1 - e^{lam t}); its limiting diameter is
    2 radius/|lam|. Explicit stepping amplifies by |1 + lam h| per step, so
    for |1 + lam h| > 1 the explicit tube blows up while the semi-implicit
    tubes contract.
    """
    lam = float(lam)
    radius = float(radius)
    if lam >= 0:
        raise ValueError("stiff_linear expects lam < 0")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    box = Box((-radius,), (radius,))
    C = max(abs(x0_ref), 2.0 * radius / abs(lam), 1.0)

    def exact(t: float, x_init=None) -> Box:
        xi = x0_ref if x_init is None else float(np.atleast_1d(x_init)[0])
        mid = np.exp(lam * t) * xi
        spread = (radius / abs(lam)) * (1.0 - np.exp(lam * t))
        return Box((mid - spread,), (mid + spread,))

    moduli = ModuliSpec(
        l_f=lambda t: lam,
        L_M=lambda t: 0.0,
        tau_f=lambda d: 0.0,
        chi_f=lambda d: abs(lam) * d,
        tau_M=lambda d: 0.0,
        P=abs(lam) * C + radius,
        C=C,
        L=abs(lam),
        l_f_const=lam,
        L_M_const=0.0,
    )
    return Problem(
        name="stiff_linear",
        dim=1,
        f=lambda t, x: lam * x,
        jac_f=lambda t, x: lam,
        M=lambda t, x: box,
        moduli=moduli,
        exact_reach=exact,
        m_state_independent=True,
    )
