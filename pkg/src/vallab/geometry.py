"""Convex polytopes given by vertex lists.

Every body in the package is a :class:`Polytope`.  Smooth bodies (the unit
ball in particular) are approximated by inscribed polytopes from
:func:`ball_polytope`.  Hulls, volumes and facets come from Qhull via
``scipy.spatial.ConvexHull``; degenerate (lower-dimensional) inputs are
handled here before Qhull ever sees them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import InputError

DEDUP_TOL = 1e-12
RANK_TOL = 1e-10
FRAME_TOL = 1e-9

# smallest accepted resolution for ball_polytope, by dimension; 2n for n >= 4
MIN_BALL_RESOLUTION = {1: 2, 2: 3, 3: 8}

_BALL_SEED = 20240611


def _hull(points):
    try:
        return ConvexHull(points)
    except QhullError:
        return ConvexHull(points, qhull_options="QJ")


def _affine_frame(points):
    """Return (centroid, orthonormal basis rows of the affine hull)."""
    center = points.mean(axis=0)
    centered = points - center
    if len(points) == 1:
        return center, np.zeros((0, points.shape[1]))
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.abs(points).max()))
    rank = int(np.sum(s > RANK_TOL * scale))
    return center, vt[:rank]


def _dedupe(points):
    pairs = cKDTree(points).query_pairs(DEDUP_TOL, p=np.inf, output_type="ndarray")
    if len(pairs) == 0:
        return points
    drop = np.zeros(len(points), dtype=bool)
    drop[pairs.max(axis=1)] = True
    return points[~drop]


class Polytope:
    """Convex hull of a finite point set in R^dim.

    The constructor canonicalizes: the stored ``vertices`` are exactly the
    extreme points, deduplicated and sorted lexicographically, so two
    polytopes built from different generating sets of the same body compare
    equal.
    """

    def __init__(self, points, dim: int | None = None):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1) if dim is None else pts.reshape(-1, dim)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InputError("a polytope needs a non-empty list of points")
        if dim is not None and pts.shape[1] != dim:
            raise InputError(f"points have {pts.shape[1]} coordinates, expected {dim}")
        if not np.all(np.isfinite(pts)):
            raise InputError("vertex coordinates must be finite")
        self.dim = pts.shape[1]
        verts, vol, affine_dim = self._canonical(pts)
        verts = verts[np.lexsort(verts.T[::-1])]
        verts.setflags(write=False)
        self.vertices = verts
        self.volume = vol
        self.affine_dim = affine_dim

    def _canonical(self, pts):
        n = self.dim
        center, basis = _affine_frame(pts)
        r = basis.shape[0]
        if r == 0:
            return center.reshape(1, n), 0.0, 0
        if r == 1:
            t = (pts - center) @ basis[0]
            ext = pts[[int(np.argmin(t)), int(np.argmax(t))]]
            length = float(t.max() - t.min())
            return _dedupe(ext), (length if n == 1 else 0.0), 1
        if r == n:
            hull = _hull(pts)
            return _dedupe(pts[hull.vertices]), float(hull.volume), n
        coords = (pts - center) @ basis.T
        hull = _hull(coords)
        return _dedupe(pts[hull.vertices]), 0.0, r

    @classmethod
    def _trusted(cls, vertices, volume, affine_dim):
        # vertices already extreme and deduplicated (image of a canonical set
        # under an invertible linear map); skip the hull
        obj = cls.__new__(cls)
        verts = np.array(vertices, dtype=float)
        verts = verts[np.lexsort(verts.T[::-1])]
        verts.setflags(write=False)
        obj.dim = verts.shape[1]
        obj.vertices = verts
        obj.volume = float(volume)
        obj.affine_dim = affine_dim
        return obj

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    @cached_property
    def _facets(self):
        n = self.dim
        if n == 1:
            lo, hi = self.vertices[0, 0], self.vertices[-1, 0]
            return np.array([[-1.0], [1.0]]), np.array([-lo, hi]), np.array([1.0, 1.0])
        hull = _hull(self.vertices)
        eq = hull.equations
        simp = self.vertices[hull.simplices]               # (F, n, n)
        edges = simp[:, 1:, :] - simp[:, :1, :]            # (F, n-1, n)
        gram = edges @ np.swapaxes(edges, 1, 2)
        areas = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None)) / math.factorial(n - 1)
        keys = np.round(eq, 9) + 0.0
        _, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        groups = inverse.max() + 1
        mass = np.bincount(inverse, weights=areas, minlength=groups)
        normals = np.zeros((groups, n))
        offsets = np.zeros(groups)
        np.add.at(normals, inverse, eq[:, :n] * areas[:, None])
        np.add.at(offsets, inverse, eq[:, n] * areas)
        good = mass > 0
        normals, offsets, mass = normals[good], offsets[good], mass[good]
        norms = np.linalg.norm(normals, axis=1)
        return normals / norms[:, None], -offsets / mass, mass

    def support(self, u) -> float:
        """Support function h_P(u) = max over vertices of <v, u>."""
        return float(np.max(self.vertices @ np.asarray(u, dtype=float)))

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return (self.dim == other.dim and self.vertices.shape == other.vertices.shape
                and bool(np.allclose(self.vertices, other.vertices, rtol=0, atol=1e-9)))

    def __hash__(self):
        return hash((self.dim, self.vertices.shape))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, n_vertices={len(self.vertices)}, volume={self.volume:.6g})"


@dataclass(frozen=True)
class SurfaceMeasure:
    """Atoms of the top-degree area measure: outward unit normals and facet areas."""
    normals: np.ndarray
    masses: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def integrate(self, f) -> float:
        """Integrate a function of the normal, vectorized over rows."""
        return float(np.sum(np.asarray(f(self.normals)) * self.masses))

    def __len__(self):
        return len(self.masses)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    if P.dim != Q.dim:
        raise InputError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    pts = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim)
    return Polytope(pts)


def minkowski_combination(coeffs, bodies) -> Polytope:
    """Polytope sum_i coeffs[i] * bodies[i] with non-negative coefficients."""
    bodies = list(bodies)
    if not bodies:
        raise InputError("need at least one body")
    out = scale(bodies[0], coeffs[0])
    for c, B in zip(coeffs[1:], bodies[1:]):
        out = minkowski_sum(out, scale(B, c))
    return out


def scale(P: Polytope, t: float) -> Polytope:
    if t < 0:
        raise InputError("scale factor must be non-negative; use reflect for -P")
    if t == 1:
        return P
    if t == 0:
        return point(P.dim)
    return Polytope._trusted(P.vertices * float(t), P.volume * float(t) ** P.dim, P.affine_dim)


def reflect(P: Polytope) -> Polytope:
    return Polytope._trusted(-P.vertices, P.volume, P.affine_dim)


def translate(P: Polytope, x) -> Polytope:
    x = np.asarray(x, dtype=float)
    if x.shape != (P.dim,):
        raise InputError("translation vector has the wrong length")
    return Polytope._trusted(P.vertices + x, P.volume, P.affine_dim)


def volume(P: Polytope) -> float:
    """n-dimensional volume; 0 for lower-dimensional bodies."""
    return P.volume


def frame_columns(E) -> np.ndarray:
    """Extract and validate the orthonormal column matrix of a frame-like object."""
    cols = np.asarray(getattr(E, "columns", E), dtype=float)
    if cols.ndim != 2:
        raise InputError("a frame is an n x k matrix")
    dev = np.abs(cols.T @ cols - np.eye(cols.shape[1])).max() if cols.shape[1] else 0.0
    if dev > FRAME_TOL:
        raise InputError(f"frame columns are not orthonormal (Gram deviation {dev:.2e})")
    return cols


def project(P: Polytope, E) -> Polytope:
    """Orthogonal projection onto span(E), in the coordinates of the frame."""
    cols = frame_columns(E)
    if cols.shape[0] != P.dim:
        raise InputError("frame lives in a different ambient dimension")
    return Polytope(P.vertices @ cols)


def ball_polytope(n: int, r: float = 1.0, resolution: int = 256) -> Polytope:
    """Inscribed polytope approximating the ball of radius r in R^n.

    Points are placed at equal angles (n=2), on a Fibonacci lattice (n=3), or
    drawn from a fixed-seed rotation-invariant stream (n >= 4, nested in the
    resolution so volume increases monotonically).
    """
    if n < 1:
        raise InputError("dimension must be positive")
    minimum = MIN_BALL_RESOLUTION.get(n, 2 * n)
    if resolution < minimum:
        raise InputError(f"resolution {resolution} below minimum {minimum} for n={n}")
    if r < 0:
        raise InputError("radius must be non-negative")
    if n == 1:
        pts = np.array([[-1.0], [1.0]])
    elif n == 2:
        theta = 2 * np.pi * np.arange(resolution) / resolution
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    elif n == 3:
        i = np.arange(resolution)
        z = 1 - (2 * i + 1) / resolution
        rho = np.sqrt(1 - z * z)
        phi = i * np.pi * (3 - np.sqrt(5))
        pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        g = np.random.default_rng(_BALL_SEED + n).standard_normal((resolution, n))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    return Polytope(pts * float(r))


def surface_area_measure(P: Polytope) -> SurfaceMeasure:
    if not P.is_full_dimensional:
        raise InputError("surface area measure needs a full-dimensional body")
    normals, _, masses = P._facets
    return SurfaceMeasure(normals=normals, masses=masses)


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def box(edges, origin=None) -> Polytope:
    """Axis-aligned box [0, e_1] x ... x [0, e_n] (shifted by origin)."""
    edges = np.asarray(edges, dtype=float)
    n = len(edges)
    corners = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1) * edges
    if origin is not None:
        corners = corners + np.asarray(origin, dtype=float)
    return Polytope(corners)


def unit_cube(n: int) -> Polytope:
    return box(np.ones(n))


def standard_simplex(n: int) -> Polytope:
    return Polytope(np.vstack([np.zeros(n), np.eye(n)]))


def point(n: int, x=None) -> Polytope:
    return Polytope(np.zeros((1, n)) if x is None else np.asarray(x, dtype=float).reshape(1, n))


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def polytope_to_dict(P: Polytope) -> dict:
    return {"dim": P.dim, "vertices": P.vertices.tolist()}


def polytope_from_dict(d) -> Polytope:
    try:
        dim = int(d["dim"])
        verts = d["vertices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polytope record: {exc}") from None
    if not verts or any(len(v) != dim for v in verts):
        raise InputError("every vertex must have exactly `dim` coordinates")
    return Polytope(verts, dim=dim)


def dumps_polytope(P: Polytope) -> str:
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(polytope_to_dict(P))


def loads_polytope(text: str) -> Polytope:
    return polytope_from_dict(json.loads(text))
