"""Real spherical harmonics on S^{n-1}, orthonormal for the uniform probability measure.

Basis construction (recursive in the dimension d = 2, ..., n).  On S^1 the
degree-q basis is sqrt(2) Re z^q, sqrt(2) Im z^q with z = x_1 + i x_2 (just
1 for q = 0).  On S^{d-1}, with t = x_d and x' the first d-1 coordinates,

    Y_{q,l,j}(x) = N_{q,l} C^{(l + (d-2)/2)}_{q-l}(t) H_{l,j}(x')

where H_{l,j} is the homogeneous degree-l harmonic polynomial of the
(d-1)-dimensional basis and C^{(a)} is a Gegenbauer polynomial.  Indices run
over l = 0..q (outer) and j (inner), which fixes the ordering.  N_{q,l} is
known in closed form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import InputError

MAX_DEGREE = 12
UNIT_TOL = 1e-10
PARITY_TOL = 1e-10


def sph_dim(n: int, q: int) -> int:
    """Dimension of the space of degree-q spherical harmonics on S^{n-1}."""
    if n < 2 or q < 0:
        raise InputError("need n >= 2 and q >= 0")
    if q < 2:
        return 1 if q == 0 else n
    return math.comb(n + q - 1, q) - math.comb(n + q - 3, q - 2)


def total_dim(n: int, Q: int) -> int:
    return sum(sph_dim(n, q) for q in range(Q + 1))


@lru_cache(maxsize=None)
def _norm(d: int, q: int, l: int) -> float:
    # 1 / sqrt(E[(1-t^2)^l C_m^a(t)^2]) for t = x_d under the uniform measure on S^{d-1}
    m, a = q - l, l + (d - 2) / 2
    log_h = (math.log(math.pi) + (1 - 2 * a) * math.log(2) + math.lgamma(m + 2 * a)
             - math.lgamma(m + 1) - math.log(m + a) - 2 * math.lgamma(a))
    log_b = 0.5 * math.log(math.pi) + math.lgamma((d - 1) / 2) - math.lgamma(d / 2)
    return math.exp(-0.5 * (log_h - log_b))


def _gegenbauer_h(m: int, a: float, t, r2):
    """Homogeneous form r^m C_m^(a)(t / r), via the three-term recurrence."""
    prev, cur = np.zeros_like(t), np.ones_like(t)
    for j in range(1, m + 1):
        prev, cur = cur, (2 * t * (j + a - 1) * cur - r2 * (j + 2 * a - 2) * prev) / j
    return cur


def _blocks(d: int, Q: int, X: np.ndarray) -> list[np.ndarray]:
    """Homogeneous harmonic polynomials of degree 0..Q at the rows of X (N, d)."""
    if d == 2:
        z = X[:, 0] + 1j * X[:, 1]
        out = [np.ones((len(X), 1))]
        zq = np.ones(len(X), dtype=complex)
        for _ in range(Q):
            zq = zq * z
            out.append(math.sqrt(2) * np.column_stack([zq.real, zq.imag]))
        return out
    inner = _blocks(d - 1, Q, X[:, :d - 1])
    t = X[:, d - 1]
    r2 = np.einsum("ij,ij->i", X, X)
    out = []
    for q in range(Q + 1):
        parts = []
        for l in range(q + 1):
            g = _gegenbauer_h(q - l, l + (d - 2) / 2, t, r2)
            parts.append(_norm(d, q, l) * g[:, None] * inner[l])
        out.append(np.hstack(parts))
    return out


def _unit_rows(X, n) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != n:
        raise InputError(f"points must have {n} coordinates")
    if np.abs(np.linalg.norm(X, axis=1) - 1).max() > UNIT_TOL:
        raise InputError("points must lie on the unit sphere")
    return X


def basis_blocks(n: int, Q: int, X) -> list[np.ndarray]:
    """Per-degree basis matrices [(N, sph_dim(n, q)) for q = 0..Q]."""
    if Q < 0 or Q > MAX_DEGREE:
        raise InputError(f"degree must be in 0..{MAX_DEGREE}")
    return _blocks(n, Q, _unit_rows(X, n))


def basis_matrix(n: int, Q: int, X) -> np.ndarray:
    return np.hstack(basis_blocks(n, Q, X))


def basis_eval(n: int, q: int, j: int, x) -> float:
    """Value of the j-th orthonormal harmonic of degree q at the unit vector x."""
    if not 0 <= j < sph_dim(n, q):
        raise InputError(f"index j={j} out of range for degree {q}")
    return float(basis_blocks(n, q, x)[q][0, j])


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _design(n: int, Q: int):
    if n == 2:
        M = 2 * Q + 2
        phi = 2 * np.pi * (np.arange(M) + 0.5) / M
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(M, 1.0 / M)
    a = (n - 3) / 2
    t, w = roots_jacobi(Q + 1, a, a)
    w = w / w.sum()
    Y, v = _design(n - 1, Q)
    rho = np.sqrt(1 - t * t)
    X = np.concatenate([np.column_stack([r * Y, np.full(len(Y), ti)]) for r, ti in zip(rho, t)])
    W = np.outer(w, v).ravel()
    return X, W


def sphere_design(n: int, Q: int):
    """Product quadrature (points, probability weights) exact up to degree 2Q + 1.

    Uniform angles on the circle, then one Gauss-Gegenbauer factor per extra
    dimension (Gauss-Legendre for S^2).
    """
    if n < 2 or Q < 0:
        raise InputError("need n >= 2 and Q >= 0")
    X, W = _design(n, Q)
    return X.copy(), W.copy()


def design_size(n: int, Q: int) -> int:
    return (2 * Q + 2) * (Q + 1) ** (n - 2)


# --------------------------------------------------------------------------
# expansions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicExpansion:
    """Coefficients of f = sum_q f^(q) in the fixed orthonormal basis."""
    n: int
    coeffs: tuple
    residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise InputError("need n >= 2")
        blocks = []
        for q, c in enumerate(self.coeffs):
            c = np.array(c, dtype=float).reshape(-1)
            if len(c) != sph_dim(self.n, q):
                raise InputError(f"degree {q} block has length {len(c)}, expected {sph_dim(self.n, q)}")
            c.setflags(write=False)
            blocks.append(c)
        if not blocks:
            raise InputError("expansion needs at least the degree-0 block")
        object.__setattr__(self, "coeffs", tuple(blocks))

    def __eq__(self, other):
        if not isinstance(other, HarmonicExpansion):
            return NotImplemented
        return (self.n == other.n and len(self.coeffs) == len(other.coeffs)
                and all(np.array_equal(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    __hash__ = None

    @classmethod
    def zeros(cls, n: int, Q: int) -> "HarmonicExpansion":
        return cls(n, tuple(np.zeros(sph_dim(n, q)) for q in range(Q + 1)))

    @classmethod
    def unit(cls, n: int, q: int, j: int, Q: int | None = None) -> "HarmonicExpansion":
        Q = q if Q is None else Q
        blocks = [np.zeros(sph_dim(n, r)) for r in range(Q + 1)]
        blocks[q][j] = 1.0
        return cls(n, tuple(blocks))

    @classmethod
    def from_vector(cls, n: int, Q: int, vec) -> "HarmonicExpansion":
        vec = np.asarray(vec, dtype=float)
        cuts = np.cumsum([sph_dim(n, q) for q in range(Q + 1)])[:-1]
        return cls(n, tuple(np.split(vec, cuts)))

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    def block(self, q: int) -> np.ndarray:
        if q > self.max_degree:
            return np.zeros(sph_dim(self.n, q))
        return self.coeffs[q]

    def vector(self) -> np.ndarray:
        return np.concatenate(self.coeffs)

    def with_block(self, q: int, values) -> "HarmonicExpansion":
        blocks = list(self.coeffs) + [np.zeros(sph_dim(self.n, r))
                                      for r in range(self.max_degree + 1, q + 1)]
        blocks[q] = np.asarray(values, dtype=float)
        return HarmonicExpansion(self.n, tuple(blocks))

    def is_zero(self, tol: float = PARITY_TOL) -> bool:
        return all(np.abs(c).max(initial=0.0) <= tol for c in self.coeffs)

    def parity(self, tol: float = PARITY_TOL):
        """0 for even, 1 for odd, None for mixed; the zero expansion counts as even."""
        odd = any(np.abs(c).max(initial=0.0) > tol for q, c in enumerate(self.coeffs) if q % 2)
        even = any(np.abs(c).max(initial=0.0) > tol for q, c in enumerate(self.coeffs) if not q % 2)
        if odd and even:
            return None
        return 1 if odd else 0

    def parity_part(self, s: int) -> "HarmonicExpansion":
        return HarmonicExpansion(self.n, tuple(
            c if q % 2 == s else np.zeros_like(c) for q, c in enumerate(self.coeffs)))

    def __call__(self, X) -> np.ndarray:
        """Synthesize f at unit vectors (rows of X)."""
        return basis_matrix(self.n, self.max_degree, X) @ self.vector()

    def _aligned(self, other):
        if self.n != other.n:
            raise InputError("expansions live on different spheres")
        Q = max(self.max_degree, other.max_degree)
        return [self.block(q) for q in range(Q + 1)], [other.block(q) for q in range(Q + 1)]

    def __add__(self, other):
        a, b = self._aligned(other)
        return HarmonicExpansion(self.n, tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, t):
        return HarmonicExpansion(self.n, tuple(float(t) * c for c in self.coeffs))

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {"n": self.n, "coeffs": [c.tolist() for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d) -> "HarmonicExpansion":
        try:
            return cls(int(d["n"]), tuple(d["coeffs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed harmonic expansion: {exc}") from None


def dumps_expansion(e: HarmonicExpansion) -> str:
    return json.dumps(e.to_dict())


def loads_expansion(text: str) -> HarmonicExpansion:
    return HarmonicExpansion.from_dict(json.loads(text))


def random_expansion(n: int, degrees, rng, unit_norm: bool = False) -> HarmonicExpansion:
    """Gaussian coefficients in the listed degrees, zero elsewhere."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    degrees = sorted(set(degrees))
    Q = max(degrees)
    blocks = [rng.standard_normal(sph_dim(n, q)) if q in degrees else np.zeros(sph_dim(n, q))
              for q in range(Q + 1)]
    e = HarmonicExpansion(n, tuple(blocks))
    if unit_norm:
        e = e * (1.0 / np.linalg.norm(e.vector()))
    return e


def project(samples, n: int, Q: int, weights=None) -> HarmonicExpansion:
    """Least-squares harmonic coefficients up to degree Q from (points, values).

    ``samples`` is a pair (X, values) or a list of (unit vector, value).
    Pass the weights of a quadrature design (see :func:`sphere_design`) to get
    the exact orthogonal projection; the residual norm is attached.
    """
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[0]) == 2:
        X, y = samples
    else:
        X = np.array([s[0] for s in samples], dtype=float)
        y = np.array([s[1] for s in samples], dtype=float)
    X = _unit_rows(X, n)
    y = np.asarray(y, dtype=float).reshape(-1)
    A = basis_matrix(n, Q, X)
    if A.shape[0] < A.shape[1]:
        raise InputError(f"{A.shape[0]} samples cannot determine {A.shape[1]} coefficients")
    sw = np.ones(len(y)) if weights is None else np.sqrt(np.asarray(weights, dtype=float))
    coef, _, rank, _ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)
    if rank < A.shape[1]:
        raise InputError("sample set does not determine all coefficients (rank deficient)")
    resid = float(np.linalg.norm((A @ coef - y) * sw))
    e = HarmonicExpansion.from_vector(n, Q, coef)
    return HarmonicExpansion(n, e.coeffs, residual=resid)


def degree_norm_sq(e: HarmonicExpansion, q: int) -> float:
    """Squared L2 norm (probability measure) of the degree-q component."""
    if q < 0 or q > e.max_degree:
        raise InputError(f"degree {q} outside 0..{e.max_degree}")
    return float(np.dot(e.coeffs[q], e.coeffs[q]))
