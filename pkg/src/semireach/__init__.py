"""Reachable sets of ordinary differential inclusions dx in f(t,x) + M(t,x).

The right-hand side is split into a single-valued one-sided Lipschitz part f
(treated implicitly) and a set-valued Lipschitz part M (treated explicitly).
Two semi-implicit Euler step maps iterate reachable-set approximations on a
spatial lattice; a-priori error bounds and a benchmark harness verify the
first-order convergence and the stiffness robustness the construction buys.
"""

from .bounds import (
    ModuliSpec,
    apriori_filippov_continuous,
    apriori_parameterized,
    apriori_spatial_parameterized,
    apriori_spatial_split,
    apriori_split,
    filippov_discrete_bound,
    gamma,
    gamma_tilde,
)
from .convex import Ball, Box, Polytope, linear_image, minkowski_point_set, sample_convex
from .implicit import (
    NoConvergence,
    SolveConfig,
    SolveStats,
    StepSizeViolation,
    residual,
    solve_implicit,
)
from .problems import Problem, affine_control, dahlquist, nonconvex_example, stiff_linear
from .schemes import (
    DiscretizationSchedule,
    ReachTube,
    TimeGrid,
    diameter,
    reach,
    step_explicit,
    step_parameterized,
    step_set,
    step_split,
)
from .sets import (
    GridSpec,
    LatticeSet,
    dist_hausdorff,
    dist_one_sided,
    project_point,
    project_set,
)

__version__ = "0.1.0"

__all__ = [
    "ModuliSpec", "apriori_filippov_continuous", "apriori_parameterized",
    "apriori_spatial_parameterized", "apriori_spatial_split", "apriori_split",
    "filippov_discrete_bound", "gamma", "gamma_tilde",
    "Ball", "Box", "Polytope", "linear_image", "minkowski_point_set", "sample_convex",
    "NoConvergence", "SolveConfig", "SolveStats", "StepSizeViolation",
    "residual", "solve_implicit",
    "Problem", "affine_control", "dahlquist", "nonconvex_example", "stiff_linear",
    "DiscretizationSchedule", "ReachTube", "TimeGrid", "diameter", "reach",
    "step_explicit", "step_parameterized", "step_set", "step_split",
    "GridSpec", "LatticeSet", "dist_hausdorff", "dist_one_sided",
    "project_point", "project_set",
]
