"""Mixed volumes, intrinsic volumes and the convolution-Lefschetz derivative.

Mixed volumes are read off the volume polynomial

    vol(l_1 K_1 + ... + l_d K_d) = sum_{|a| = n} n!/a! V(K_1[a_1], ..., K_d[a_d]) l^a

of the *distinct* bodies in a request, fitted from exact polytope volumes.
Homogeneity lets us pin l_d = 1, which removes one grid dimension.

Intrinsic volumes use the polytopal ball B = ``ball_polytope(n, 1, res)`` as
gauge.  B is treated as the ball of its volume-equivalent radius
s = (vol B / kappa_n)^(1/n), so coefficient j of vol(P + l B) is divided by
kappa_j s^j.  This makes mu_0 = 1 exactly and removes the leading
ball-approximation bias.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import InputError, NumericalError
from .geometry import Polytope, ball_polytope, minkowski_combination, minkowski_sum, scale

COND_LIMIT = 1e12

# default polytopal-ball resolution per dimension (hull cost grows fast with n)
DEFAULT_BALL_RESOLUTION = {1: 2, 2: 1024, 3: 1024, 4: 160, 5: 80, 6: 48}

_FIT_SEED = 8675309


def kappa(j: int) -> float:
    """Volume of the j-dimensional unit ball."""
    return math.pi ** (j / 2) / math.gamma(j / 2 + 1)


def default_ball_resolution(n: int) -> int:
    return DEFAULT_BALL_RESOLUTION.get(n, 2 * n)


@lru_cache(maxsize=32)
def _cached_ball(n: int, resolution: int) -> Polytope:
    return ball_polytope(n, 1.0, resolution)


def gauge_ball(n: int, resolution: int | None = None) -> Polytope:
    """The polytopal unit ball used wherever a formula calls for D."""
    return _cached_ball(n, resolution or default_ball_resolution(n))


@dataclass(frozen=True)
class MixedVolumeRequest:
    """Arguments of V(K_1, ..., K_n).

    Entries of ``bodies`` may be the string ``"ball"``, which resolves to
    the polytopal ball at ``ball_resolution``.
    """
    bodies: tuple
    fit_grid: int | None = None
    ball_resolution: int | None = None

    def __post_init__(self):
        bodies = tuple(self.bodies)
        object.__setattr__(self, "bodies", bodies)
        concrete = [B for B in bodies if isinstance(B, Polytope)]
        if len(concrete) + sum(1 for B in bodies if B == "ball") != len(bodies):
            raise InputError("bodies must be Polytopes or the string 'ball'")
        if not concrete:
            raise InputError("at least one body must be a Polytope")
        n = concrete[0].dim
        if any(B.dim != n for B in concrete):
            raise InputError("all bodies must live in the same dimension")
        if len(bodies) != n:
            raise InputError(f"need exactly n={n} bodies, got {len(bodies)}")
        if self.fit_grid is not None and self.fit_grid < n + 1:
            raise InputError(f"fit_grid must be at least n+1={n + 1}")

    @property
    def n(self) -> int:
        return next(B.dim for B in self.bodies if isinstance(B, Polytope))

    def resolved(self) -> list:
        ball = gauge_ball(self.n, self.ball_resolution)
        return [ball if isinstance(B, str) else B for B in self.bodies]


def _group(bodies):
    """Distinct bodies with multiplicities, in an order independent of input order."""
    groups: list[list] = []
    for B in bodies:
        for g in groups:
            if g[0] == B:
                g[1] += 1
                break
        else:
            groups.append([B, 1])
    groups.sort(key=lambda g: (g[1], g[0].vertices.shape, g[0].vertices.tobytes()))
    return [g[0] for g in groups], [g[1] for g in groups]


def _monomials(n: int, d: int) -> list[tuple]:
    """Exponents a in N^(d-1) with |a| <= n (the pinned last variable absorbs the rest)."""
    return [a for a in itertools.product(range(n + 1), repeat=d - 1) if sum(a) <= n]


def _fit_nodes(d: int, g: int, count: int) -> np.ndarray:
    if d - 1 <= 2:
        axis = np.arange(1, g + 1) / g
        return np.array(list(itertools.product(axis, repeat=d - 1)), dtype=float).reshape(-1, d - 1)
    rng = np.random.default_rng(_FIT_SEED + d)
    return rng.uniform(0.1, 1.0, size=(3 * count, d - 1))


def _solve(design: np.ndarray, values: np.ndarray) -> np.ndarray:
    col = np.linalg.norm(design, axis=0)
    col[col == 0] = 1.0
    scaled = design / col
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(f"volume-polynomial fit is ill-conditioned (condition number {cond:.3e})")
    coef, *_ = np.linalg.lstsq(scaled, values, rcond=None)
    return coef / col


def volume_polynomial(bodies, multiplicity_target, fit_grid=None):
    """Coefficient of l^a in vol(sum_i l_i bodies[i]), a = ``multiplicity_target``."""
    d = len(bodies)
    n = bodies[0].dim
    if d == 1:
        return bodies[0].volume
    g = fit_grid or n + 1
    monos = _monomials(n, d)
    nodes = _fit_nodes(d, g, len(monos))
    design = np.array([[np.prod(x ** np.array(a)) for a in monos] for x in nodes])
    values = np.array([minkowski_combination(list(x) + [1.0], bodies).volume for x in nodes])
    coef = _solve(design, values)
    return float(coef[monos.index(tuple(multiplicity_target[:-1]))])


def mixed_volume(req, fit_grid: int | None = None) -> float:
    """V(K_1, ..., K_n) from the volume polynomial of the distinct bodies.

    ``req`` is a :class:`MixedVolumeRequest` or a sequence of bodies.
    """
    if not isinstance(req, MixedVolumeRequest):
        req = MixedVolumeRequest(tuple(req), fit_grid=fit_grid)
    bodies = req.resolved()
    n = req.n
    total = bodies[0]
    for B in bodies[1:]:
        total = minkowski_sum(total, B)
    if not total.is_full_dimensional:
        raise InputError("bodies are not jointly full-dimensional")
    distinct, mult = _group(bodies)
    coef = volume_polynomial(distinct, mult, req.fit_grid or fit_grid)
    factor = math.prod(math.factorial(a) for a in mult) / math.factorial(n)
    return coef * factor


def box_mixed_volume_oracle(edges) -> float:
    """Mixed volume of axis-aligned boxes: perm(edges) / n!.  Row i holds the edges of box i."""
    a = np.asarray(edges, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("edges must be a square matrix")
    if np.any(a < 0):
        raise InputError("edge lengths must be non-negative")
    return _kernels.permanent(a) / math.factorial(a.shape[0])


@dataclass(frozen=True)
class SteinerCoefficients:
    """Intrinsic volumes mu_0, ..., mu_n of one body."""
    n: int
    mu: tuple
    ball_resolution: int | None = field(default=None, compare=False)
    fit_grid: int | None = field(default=None, compare=False)

    def __post_init__(self):
        mu = tuple(float(x) for x in self.mu)
        object.__setattr__(self, "mu", mu)
        if len(mu) != self.n + 1:
            raise InputError(f"expected {self.n + 1} intrinsic volumes, got {len(mu)}")

    def __getitem__(self, k):
        return self.mu[k]


def steiner_polynomial(P: Polytope, ball: Polytope, fit_grid: int | None = None) -> np.ndarray:
    """Coefficients c_0..c_n of l -> vol(P + l ball).

    c_0 = vol(P) and c_n = vol(ball) are known exactly, so only the interior
    coefficients are fitted.
    """
    n = P.dim
    c = np.zeros(n + 1)
    c[0], c[n] = P.volume, ball.volume
    if n == 1:
        return c
    g = fit_grid or n + 1
    lam = np.arange(1, g + 1) / g
    vals = np.array([minkowski_sum(P, scale(ball, t)).volume for t in lam])
    rhs = vals - c[0] - c[n] * lam ** n
    design = lam[:, None] ** np.arange(1, n)
    c[1:n] = _solve(design, rhs)
    return c


def intrinsic_volumes(P: Polytope, ball_resolution: int | None = None,
                      fit_grid: int | None = None) -> SteinerCoefficients:
    n = P.dim
    if not P.is_full_dimensional:
        raise InputError("intrinsic_volumes needs a full-dimensional body")
    if fit_grid is not None and fit_grid < n + 1:
        raise InputError(f"fit_grid must be at least n+1={n + 1}")
    res = ball_resolution or default_ball_resolution(n)
    ball = gauge_ball(n, res)
    c = steiner_polynomial(P, ball, fit_grid)
    s = (ball.volume / kappa(n)) ** (1.0 / n)
    mu = [c[n - k] / (kappa(n - k) * s ** (n - k)) for k in range(n + 1)]
    return SteinerCoefficients(n, tuple(mu), res, fit_grid)


def mu_ball(n: int, k: int) -> float:
    """mu_k of the Euclidean unit ball: binom(n, k) kappa_n / kappa_{n-k}."""
    if not 0 <= k <= n:
        raise InputError(f"need 0 <= k <= n, got k={k}")
    return math.comb(n, k) * kappa(n) / kappa(n - k)


def intrinsic_volume_functional(k: int, ball_resolution=None, fit_grid=None):
    """Body functional K -> mu_k(K)."""
    def phi(K):
        if k == K.dim:
            return K.volume
        return intrinsic_volumes(K, ball_resolution, fit_grid).mu[k]
    return phi


def lefschetz_derivative(phi, K: Polytope, h: float = 0.05,
                         ball_resolution: int | None = None) -> float:
    """1/2 d/dl phi(K + l D) at l = 0, D the polytopal ball.

    One-sided differences at h and h/2 combined by Richardson extrapolation.
    """
    if h <= 0:
        raise InputError("step h must be positive")
    ball = gauge_ball(K.dim, ball_resolution)
    base = float(phi(K))

    def diff(step):
        val = float(phi(minkowski_sum(K, scale(ball, step))))
        return 0.5 * (val - base) / step

    d1, d2 = diff(h), diff(h / 2)
    out = 2 * d2 - d1
    if not np.isfinite(out):
        raise NumericalError("non-finite functional value in lefschetz_derivative")
    return out
