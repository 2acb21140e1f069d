"""Compact convex set descriptors: boxes, balls and vertex polytopes.

These carry the set-valued right-hand-side values M(t,x), control sets and
initial sets. Every descriptor supports exact metric projection of points,
finite sampling with a guaranteed covering radius, and the handful of
geometric quantities (diameter, max norm, extreme points) the schemes and
bounds need.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np
from scipy.optimize import nnls
from scipy.spatial.distance import cdist

__all__ = [
    "Box",
    "Ball",
    "Polytope",
    "ConvexSet",
    "sample_convex",
    "minkowski_point_set",
    "point_set_distance",
    "linear_image",
]

_MAX_SAMPLES = 2_000_000  # guard against accidentally dense meshes


def _mesh_axis(lo: float, hi: float, anchor: float, eps: float) -> np.ndarray:
    """Anchor-aligned 1-d mesh of spacing eps on [lo, hi], endpoints included."""
    if hi - lo <= 0:
        return np.array([lo])
    k_lo = int(np.ceil((lo - anchor) / eps - 1e-12))
    k_hi = int(np.floor((hi - anchor) / eps + 1e-12))
    vals = anchor + eps * np.arange(k_lo, k_hi + 1) if k_hi >= k_lo else np.empty(0)
    vals = np.concatenate([[lo], vals, [hi]])
    return np.unique(vals)


class ConvexSet:
    """Common interface of the three descriptor variants."""

    dim: int

    def center(self) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def extreme_points(self) -> np.ndarray:
        raise NotImplementedError

    def project(self, points: np.ndarray) -> np.ndarray:
        """Metric projection of each row onto the set."""
        raise NotImplementedError

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        proj = self.project(pts)
        return np.linalg.norm(pts - proj, axis=1) <= tol

    def diam(self) -> float:
        ext = self.extreme_points()
        if ext.shape[0] == 1:
            return 0.0
        return float(cdist(ext, ext).max())

    def norm_max(self) -> float:
        """sup |a| over the set."""
        return float(np.linalg.norm(self.extreme_points(), axis=1).max())

    def is_singleton(self, tol: float = 0.0) -> bool:
        return self.diam() <= tol


@dataclass(frozen=True)
class Box(ConvexSet):
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower/upper must be vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("box needs lower <= upper componentwise")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))

    @property
    def dim(self) -> int:
        return len(self.lower)

    def _lo(self) -> np.ndarray:
        return np.asarray(self.lower)

    def _hi(self) -> np.ndarray:
        return np.asarray(self.upper)

    def center(self) -> np.ndarray:
        return 0.5 * (self._lo() + self._hi())

    def bounding_box(self):
        return self._lo(), self._hi()

    def extreme_points(self) -> np.ndarray:
        if self.dim > 16:
            raise ValueError("refusing to enumerate corners of a box with dim > 16")
        corners = np.array(list(product(*zip(self.lower, self.upper))), dtype=float)
        return np.unique(corners, axis=0)

    def project(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.clip(pts, self._lo(), self._hi())

    def diam(self) -> float:
        return float(np.linalg.norm(self._hi() - self._lo()))


@dataclass(frozen=True)
class Ball(ConvexSet):
    center_point: tuple
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center_point, dtype=float))
        if self.radius < 0:
            raise ValueError("ball radius must be >= 0")
        object.__setattr__(self, "center_point", tuple(float(v) for v in c))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return len(self.center_point)

    def center(self) -> np.ndarray:
        return np.asarray(self.center_point)

    def bounding_box(self):
        c = self.center()
        return c - self.radius, c + self.radius

    def extreme_points(self) -> np.ndarray:
        # axis poles; enough for diam/norm_max of a ball
        c = self.center()
        if self.radius == 0:
            return c.reshape(1, -1)
        eye = np.eye(self.dim)
        return np.vstack([c + self.radius * eye, c - self.radius * eye])

    def project(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        diff = pts - self.center()
        norms = np.linalg.norm(diff, axis=1)
        out = pts.copy()
        outside = norms > self.radius
        if np.any(outside):
            scale = self.radius / norms[outside]
            out[outside] = self.center() + diff[outside] * scale[:, None]
        return out

    def diam(self) -> float:
        return 2.0 * self.radius

    def norm_max(self) -> float:
        return float(np.linalg.norm(self.center()) + self.radius)


@dataclass(frozen=True)
class Polytope(ConvexSet):
    vertices: tuple

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise ValueError("polytope needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(tuple(float(x) for x in row) for row in v))

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def _V(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def center(self) -> np.ndarray:
        return self._V().mean(axis=0)

    def bounding_box(self):
        V = self._V()
        return V.min(axis=0), V.max(axis=0)

    def extreme_points(self) -> np.ndarray:
        return np.unique(self._V(), axis=0)

    def _member(self, p: np.ndarray, scale: float) -> bool:
        # p in conv(V) iff the homogenized NNLS system has ~zero residual;
        # recompute the residual (nnls's reported rnorm is unreliable in
        # some scipy releases)
        V = self._V()
        W = np.vstack([V.T, np.full(V.shape[0], scale)])
        b = np.concatenate([p, [scale]])
        mu, _ = nnls(W, b)
        return float(np.linalg.norm(W @ mu - b)) <= 1e-9 * (1.0 + scale)

    def project(self, points) -> np.ndarray:
        """Exact projection onto conv(vertices).

        The projection lies in the relative interior of a face spanned by at
        most d+1 vertices (Caratheodory), and is then the orthogonal
        projection onto that face's affine hull. Enumerating all vertex
        subsets of size <= d+1 therefore produces the true projection among
        the candidates; hull membership of each candidate is verified by NNLS.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        V = self._V()
        k, d = V.shape
        if k == 1:
            return np.repeat(V, pts.shape[0], axis=0)
        scale = 1.0 + float(np.abs(V).max())
        subsets = [list(c) for r in range(2, min(k, d + 1) + 1) for c in combinations(range(k), r)]
        out = np.empty_like(pts)
        for i, p in enumerate(pts):
            best = None
            best_d2 = np.inf
            # vertices are always feasible candidates
            d2v = ((V - p) ** 2).sum(axis=1)
            j = int(np.argmin(d2v))
            best, best_d2 = V[j], d2v[j]
            for idx in subsets:
                v0 = V[idx[0]]
                B = (V[idx[1:]] - v0).T  # (d, r-1)
                coef, *_ = np.linalg.lstsq(B, p - v0, rcond=None)
                cand = v0 + B @ coef
                d2 = float(((cand - p) ** 2).sum())
                if d2 < best_d2 - 1e-15 and self._member(cand, scale):
                    best, best_d2 = cand, d2
            out[i] = best
        return out


def point_set_distance(x, S: ConvexSet) -> float:
    """Euclidean distance from a point to a convex descriptor (0 if inside)."""
    p = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    return float(np.linalg.norm(p - S.project(p)))


def _dedupe(points: np.ndarray) -> np.ndarray:
    return np.unique(points, axis=0)


def sample_convex(S: ConvexSet, eps: float) -> np.ndarray:
    """Finite cloud D inside S with dist_H(S, D) <= sqrt(d)/2 * eps.

    The mesh is anchored at the descriptor's own center so sampling is
    translation equivariant; extreme points are always included. Mesh points
    just outside S are replaced by their metric projection onto S — projection
    is nonexpansive, so the covering radius of the mesh is preserved.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    d = S.dim
    half = 0.5 * np.sqrt(d) * eps

    if isinstance(S, Box):
        axes = [
            _mesh_axis(lo, hi, anchor, eps)
            for lo, hi, anchor in zip(S.lower, S.upper, S.center())
        ]
        count = int(np.prod([len(a) for a in axes]))
        if count > _MAX_SAMPLES:
            raise ValueError(f"eps={eps} would create {count} samples for {S}")
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        return _dedupe(np.vstack([pts, S.extreme_points()]))

    if isinstance(S, Ball) and S.radius == 0:
        return S.center().reshape(1, -1)

    # Ball / Polytope: mesh the (slightly enlarged) bounding box, keep interior
    # points, project near-boundary points onto the set.
    lo, hi = S.bounding_box()
    anchor = S.center()
    axes = [_mesh_axis(l - half, h + half, a, eps) for l, h, a in zip(lo, hi, anchor)]
    count = int(np.prod([len(a) for a in axes]))
    if count > _MAX_SAMPLES:
        raise ValueError(f"eps={eps} would create {count} samples for {S}")
    grids = np.meshgrid(*axes, indexing="ij")
    mesh = np.stack([g.ravel() for g in grids], axis=-1)
    proj = S.project(mesh)
    dist = np.linalg.norm(mesh - proj, axis=1)
    keep = proj[dist <= half + 1e-12]
    return _dedupe(np.vstack([keep, S.extreme_points()]))


def minkowski_point_set(z, h: float, S: ConvexSet, eps: float) -> np.ndarray:
    """Samples of z + h*S, i.e. the split-scheme image cloud."""
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if h == 0:
        return z.reshape(1, -1)
    return z + h * sample_convex(S, eps)


def linear_image(A: np.ndarray, S: ConvexSet) -> ConvexSet:
    """Descriptor of A*S for the representable (A, S) combinations.

    Boxes and polytopes map through their vertices; balls map only under
    scalar multiples of the identity (the uncertainty-radius case).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if isinstance(S, Ball):
        d = A.shape[0]
        if A.shape[0] != A.shape[1]:
            raise ValueError("ball control sets need a square scaling matrix")
        s = A[0, 0]
        if not np.allclose(A, s * np.eye(d)):
            raise ValueError(
                "ball control sets are representable only for A = r*Identity; "
                "use a Box or Polytope control set otherwise"
            )
        return Ball(tuple(s * S.center()), abs(s) * S.radius)
    if isinstance(S, (Box, Polytope)):
        verts = S.extreme_points() @ A.T
        if verts.shape[1] == 1:
            return Box((float(verts.min()),), (float(verts.max()),))
        return Polytope(tuple(map(tuple, verts)))
    raise ValueError(f"unsupported control set type {type(S).__name__}")
