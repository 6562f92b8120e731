"""Functions on Grassmannians and their integral transforms.

Subspaces are carried by orthonormal frames.  A *function on Gr_k* is any
callable that accepts stacked frames of shape ``(..., n, k)`` and returns
values of shape ``(...)``; every quantity here is basis independent, so the
frame chosen for a subspace never matters.

The transforms (Radon, cosine, Crofton) are estimated by Monte Carlo over
Haar-distributed frames with reproducible substreams (see ``_random``).
Positive normalizing constants that are only known to exist are set to 1,
so the exported contracts are signs and ratios.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from ._random import as_generator, batched_mean
from .errors import InputError, NumericalError
from .geometry import Polytope, surface_area_measure

GRAM_TOL = 1e-10
DEFAULT_SAMPLES = 200_000
DISPERSION_LIMIT = 0.2
IMAG_LIMIT = 0.05


@dataclass(frozen=True)
class Frame:
    """Orthonormal n x k matrix whose columns span a point of Gr_k(R^n)."""
    columns: np.ndarray

    def __post_init__(self):
        cols = np.array(self.columns, dtype=float)
        if cols.ndim != 2 or cols.shape[1] > cols.shape[0]:
            raise InputError("a frame is an n x k matrix with k <= n")
        if cols.shape[1] and np.abs(cols.T @ cols - np.eye(cols.shape[1])).max() > GRAM_TOL:
            raise InputError("frame columns are not orthonormal")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return self.columns.shape[1]

    @classmethod
    def span(cls, vectors) -> "Frame":
        """Orthonormalize the given column vectors (n x k)."""
        q, _ = np.linalg.qr(np.asarray(vectors, dtype=float))
        return cls(q)

    @classmethod
    def coordinate(cls, n: int, indices) -> "Frame":
        """Frame spanned by the standard basis vectors e_i (0-based indices)."""
        return cls(np.eye(n)[:, list(indices)])


def _cols(E) -> np.ndarray:
    return E.columns if isinstance(E, Frame) else np.asarray(E, dtype=float)


@dataclass(frozen=True)
class HighestWeight:
    """Highest weight lambda = (2 m_1, ..., 2 m_k, 0, ..., 0) of SO(n) on Gr_k.

    Membership in Lambda_k^0 is checked on construction: m_1 >= ... >=
    m_{k-1} >= |m_k|, and m_k < 0 only when n = 2k.
    """
    n: int
    k: int
    m: tuple

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        object.__setattr__(self, "m", m)
        n, k = self.n, self.k
        if not 1 <= k <= n // 2:
            raise InputError(f"need 1 <= k <= n/2, got n={n}, k={k}")
        if len(m) != k:
            raise InputError(f"weight must have k={k} entries, got {len(m)}")
        if any(m[i] < m[i + 1] for i in range(k - 2)) or (k >= 2 and m[k - 2] < abs(m[k - 1])):
            raise InputError(f"weight {m} is not dominant")
        if k >= 2 and m[0] < 0:
            raise InputError(f"weight {m} is not dominant")
        if m[-1] < 0 and 2 * k != n:
            raise InputError(f"negative last entry only allowed for n = 2k (weight {m})")

    @classmethod
    def from_lambda(cls, n, k, lam) -> "HighestWeight":
        lam = [int(x) for x in lam]
        if any(x % 2 for x in lam):
            raise InputError("weights in Lambda_k^0 have even entries")
        if any(lam[k:]):
            raise InputError("entries beyond position k must vanish")
        lam = lam[:k] + [0] * (k - len(lam))
        return cls(n, k, tuple(x // 2 for x in lam))

    @classmethod
    def pi_weight(cls, n, k, m, sign=1) -> "HighestWeight":
        """The weight (2m, 2, ..., 2, +-2) of Pi_k^0; (2m) when k = 1."""
        if k == 1:
            return cls(n, 1, (sign * m,))
        return cls(n, k, (m,) + (1,) * (k - 2) + (sign,))

    @property
    def lam(self) -> tuple:
        return tuple(2 * x for x in self.m)

    @property
    def in_pi(self) -> bool:
        return self.m[-1] != 0 and (self.k < 2 or abs(self.m[1]) <= 1)

    @property
    def exponents(self) -> tuple:
        a = [abs(x) for x in self.m]
        return tuple(a[l] - a[l + 1] for l in range(self.k - 1)) + (a[-1],)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

def haar_frames(n: int, k: int, size: int, rng) -> np.ndarray:
    """``size`` Haar-random frames stacked as an array of shape (size, n, k)."""
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")
    g = as_generator(rng).standard_normal((size, n, k))
    q, r = np.linalg.qr(g)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    return q * d[:, None, :]


def haar_frame(n: int, k: int, rng) -> Frame:
    return Frame(haar_frames(n, k, 1, rng)[0])


def subframe_within(E, k: int, rng) -> Frame:
    """Haar-random k-dimensional subspace of span(E)."""
    cols = _cols(E)
    l = cols.shape[1]
    if k > l:
        raise InputError(f"cannot pick a {k}-plane inside a {l}-plane")
    return Frame(cols @ haar_frames(l, k, 1, rng)[0])


# --------------------------------------------------------------------------
# basic span-level functions
# --------------------------------------------------------------------------

def cos_abs(E, F):
    """|cos(E, F)| = |det(E^t F)|; broadcasts over stacked frames."""
    a, b = _cols(E), _cols(F)
    if a.shape[-1] != b.shape[-1]:
        raise InputError("cos(E, F) needs subspaces of equal dimension")
    m = np.swapaxes(a, -1, -2) @ b
    if m.ndim == 2:
        return float(abs(np.linalg.det(m)))
    return _kernels.abs_det(m)


def perp(E) -> Frame:
    """Orthonormal frame of the orthogonal complement."""
    cols = _cols(E)
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    return Frame(u[:, cols.shape[1]:])


def perp_stack(frames: np.ndarray) -> np.ndarray:
    k = frames.shape[-1]
    u, _, _ = np.linalg.svd(frames, full_matrices=True)
    return u[..., k:]


def hw_vector(w: HighestWeight, E):
    """Highest-weight vector h_lambda evaluated at a frame (or stacked frames).

    A[l] collects the complex coordinates x_{2r-1} + i x_{2r} (r <= l) of the
    basis vectors; h_lambda is the product of powers of det(A[l] A[l]^t), with
    the last determinant conjugated when m_k < 0.
    """
    cols = _cols(E)
    if cols.shape[-1] != w.k or cols.shape[-2] != w.n:
        raise InputError(f"frame shape {cols.shape[-2:]} does not match weight (n={w.n}, k={w.k})")
    single = cols.ndim == 2
    stack = cols.reshape((-1, w.n, w.k))
    vals = _kernels.hw_values(stack, np.array(w.exponents), w.m[-1] < 0)
    if single:
        return complex(vals[0])
    return vals.reshape(cols.shape[:-2])


def hw_function(w: HighestWeight):
    """h_lambda as a function on Gr_k (stacked-frame convention)."""
    return lambda frames: hw_vector(w, frames)


def constant_function(c=1.0):
    return lambda frames: np.full(np.shape(frames)[:-2], c, dtype=float)


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def _check_samples(N):
    if N <= 0:
        raise InputError("sample count must be positive")


def _radon(f, k, E, N, rng):
    cols = _cols(E)
    l = cols.shape[1]

    def draw(gen, size):
        return f(cols @ haar_frames(l, k, size, gen))

    return batched_mean(draw, N, rng)


def radon_estimate(f, k: int, l: int, E, N: int, rng):
    """(R_{k,l} f)(E): average of f over the k-planes inside the l-plane E."""
    cols = _cols(E)
    if cols.shape[1] != l:
        raise InputError(f"E must have rank l={l}")
    if k > l:
        raise InputError("the Radon transform here needs k <= l")
    _check_samples(N)
    if k == l:
        return complex(f(cols[None])[0])
    return complex(_radon(f, k, cols, N, rng)[0])


def _cosine(f, k, E, N, rng):
    cols = _cols(E)
    n = cols.shape[0]

    def draw(gen, size):
        F = haar_frames(n, k, size, gen)
        return cos_abs(cols, F) * f(F)

    return batched_mean(draw, N, rng)


def cosine_transform_estimate(f, k: int, E, N: int, rng):
    """(T_k f)(E): Haar average of |cos(E, F)| f(F) over F in Gr_k."""
    if _cols(E).shape[1] != k:
        raise InputError(f"E must have rank k={k}")
    _check_samples(N)
    return complex(_cosine(f, k, E, N, rng)[0])


def klain_of_crofton(f, k: int, E, N: int, rng):
    """Klain function of the Crofton valuation with density f, evaluated at E.

    Identical to :func:`cosine_transform_estimate`: Klain composed with the
    Crofton map is the cosine transform.
    """
    return cosine_transform_estimate(f, k, E, N, rng)


def lefschetz_on_crofton(f, k: int, l: int, E, N: int, rng):
    """T_{k+l}(R_{k,k+l} f)(E): Klain function of Cr(f) * mu_l, up to a positive constant."""
    cols = _cols(E)
    n = cols.shape[0]
    if cols.shape[1] != k + l or k + l > n:
        raise InputError("E must have rank k+l <= n")
    if l == 0:
        return klain_of_crofton(f, k, cols, N, rng)
    _check_samples(N)

    def draw(gen, size):
        G = haar_frames(n, k + l, size, gen)
        F = G @ haar_frames(k + l, k, size, gen)
        return cos_abs(cols, G) * f(F)

    return complex(batched_mean(draw, N, rng)[0])


def projection_volumes(K: Polytope, frames: np.ndarray) -> np.ndarray:
    """vol_k of the projection of K onto each frame in a stack (size, n, k)."""
    n, k = frames.shape[-2], frames.shape[-1]
    if k == n:
        return np.full(frames.shape[0], K.volume)
    if k == 1:
        t = np.einsum("vi,si->sv", K.vertices, frames[:, :, 0])
        return t.max(axis=1) - t.min(axis=1)
    if k == n - 1 and K.is_full_dimensional:
        # Cauchy projection formula over the facets of K
        sm = surface_area_measure(K)
        nu = perp_stack(frames)[:, :, 0]
        return 0.5 * np.abs(nu @ sm.normals.T) @ sm.masses
    return np.array([Polytope(K.vertices @ F).volume for F in frames])


def crofton_evaluate(f, k: int, K: Polytope, N: int, rng):
    """Cr(f)(K): Haar average of f(E) vol_k(projection of K onto E)."""
    n = K.dim
    if not 1 <= k <= n:
        raise InputError("need 1 <= k <= n")
    _check_samples(N)

    def draw(gen, size):
        E = haar_frames(n, k, size, gen)
        return f(E) * projection_volumes(K, E)

    mean = batched_mean(draw, N, rng)[0]
    if np.iscomplexobj(mean):
        return complex(mean)
    return float(mean)


# --------------------------------------------------------------------------
# exact eigenvalues
# --------------------------------------------------------------------------

def pochhammer(nu, k: int):
    """Rising product nu (nu+1) ... (nu+k-1); 1 for k = 0.  Exact for Fractions."""
    if k < 0:
        raise InputError("Pochhammer index must be non-negative")
    out = 1 if isinstance(nu, (int, Fraction)) else 1.0
    for j in range(k):
        out = out * (nu + j)
    return out


def cosine_eigenvalue(n: int, k: int, w, exact: bool = False):
    """Eigenvalue of T_k on H_lambda with the normalizing constant set to 1.

    ``w`` is a :class:`HighestWeight` or the tuple (m_1, ..., m_k).  With
    ``exact=True`` the value is returned as a Fraction.
    """
    if not isinstance(w, HighestWeight):
        w = HighestWeight(n, k, tuple(w))
    if (w.n, w.k) != (n, k):
        raise InputError("weight was built for a different (n, k)")
    value = Fraction(1)
    half = Fraction(1, 2)
    for j, mj in enumerate(w.m, start=1):
        a = abs(mj)
        num = pochhammer(1 + j * half - a, a)
        den = pochhammer(1 + n * half - j * half, a)
        value *= num / den
    return value if exact else float(value)


# --------------------------------------------------------------------------
# Monte-Carlo sign verification
# --------------------------------------------------------------------------

@dataclass
class TransformSignReport:
    """Monte-Carlo estimate of a transform eigenvalue on H_lambda.

    ``estimated_ratio[t]`` is the transform of h_lambda at test point t
    divided by the reference value there; by Schur's lemma all ratios agree.
    ``rel_stddev`` combines the spread across test points with the
    Monte-Carlo standard error, relative to |mean|.
    """
    name: str
    weight: HighestWeight
    test_points: list
    estimated_ratio: list
    mean_scale: complex
    sign: int
    expected_sign: int
    rel_stddev: float
    std_error: float
    samples: int
    passed: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.weight.n,
            "k": self.weight.k,
            "weight": list(self.weight.lam),
            "estimated_ratio": [[r.real, r.imag] for r in self.estimated_ratio],
            "mean_scale": [self.mean_scale.real, self.mean_scale.imag],
            "sign": self.sign,
            "expected_sign": self.expected_sign,
            "rel_stddev": self.rel_stddev,
            "std_error": self.std_error,
            "samples": self.samples,
            "pass": self.passed,
        }


def _test_frames(w, count, rng, pool_factor=200):
    pool = haar_frames(w.n, w.k, pool_factor * count, rng)
    h = np.abs(hw_vector(w, pool))
    order = np.argsort(-h, kind="stable")
    chosen = [i for i in order[:count] if h[i] >= 0.1 * h.max()]
    if len(chosen) < count or h.max() < 1e-12:
        raise NumericalError(f"could not find {count} test frames with |h| bounded away from 0")
    return pool[chosen]


def _report(name, w, test_frames, ratios, stderrs, expected, samples):
    ratios = np.asarray(ratios, dtype=complex)
    mean = complex(ratios.mean())
    scale = abs(mean.real)
    spread = float(np.std(ratios.real, ddof=1)) if len(ratios) > 1 else 0.0
    se = float(np.sqrt(np.mean(np.square(stderrs))))
    rel = float(np.hypot(spread, se) / scale) if scale > 0 else float("inf")
    sign = int(np.sign(mean.real))
    passed = (sign == expected and rel < DISPERSION_LIMIT
              and abs(mean.imag) < IMAG_LIMIT * scale)
    return TransformSignReport(
        name=name, weight=w, test_points=[Frame(E) for E in test_frames],
        estimated_ratio=list(ratios), mean_scale=mean, sign=sign,
        expected_sign=expected, rel_stddev=rel, std_error=se, samples=samples,
        passed=bool(passed))


def _pi_weight(n, k, m, sign):
    if not 1 <= k <= n // 2:
        raise InputError(f"need 1 <= k <= n/2, got n={n}, k={k}")
    if m < 1:
        raise InputError("m must be >= 1")
    return HighestWeight.pi_weight(n, k, m, sign)


def verify_sign_radon(n, k, m, samples=DEFAULT_SAMPLES, test_points=5, rng=None, sign=1):
    """Estimate (R_{k,n-k} h)(E^perp) / h(E); expected sign (-1)^(m-1+k)."""
    w = _pi_weight(n, k, m, sign)
    rng = as_generator(rng)
    _check_samples(samples)
    tests = _test_frames(w, test_points, rng)
    complements = perp_stack(tests)                       # (T, n, n-k)
    href = hw_vector(w, tests)

    def draw(gen, size):
        U = haar_frames(n - k, k, size, gen)
        F = np.einsum("tij,sjk->stik", complements, U)
        return hw_vector(w, F)

    mean, se = batched_mean(draw, samples, rng)
    return _report("signR", w, tests, mean / href, se / np.abs(href),
                   (-1) ** (m - 1 + k), samples)


def torus_character(w: HighestWeight) -> np.ndarray:
    """Integer frequencies c with h(t F) = exp(i <c, theta>) h(F).

    t rotates the coordinate plane (e_{2r-1}, e_{2r}) by theta_r; the array
    has one entry per plane (floor(n/2) of them).
    """
    c = np.zeros(w.n // 2, dtype=int)
    conj = w.m[-1] < 0
    for l, e in enumerate(w.exponents, start=1):
        c[:l] += 2 * e * (-1 if (conj and l == w.k) else 1)
    return c


def torus_rotate(X: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Apply the torus element with angles theta (..., P) to stacked frames (..., n, p)."""
    shape = np.broadcast_shapes(X.shape[:-2], theta.shape[:-1]) + X.shape[-2:]
    out = np.array(np.broadcast_to(X, shape), dtype=float)
    for r in range(theta.shape[-1]):
        c = np.cos(theta[..., r])[..., None]
        s = np.sin(theta[..., r])[..., None]
        a, b = X[..., 2 * r, :], X[..., 2 * r + 1, :]
        out[..., 2 * r, :] = c * a - s * b
        out[..., 2 * r + 1, :] = s * a + c * b
    return out


def _torus_grid(w):
    # stratified grid per coordinate plane; enough nodes to resolve the
    # character frequency in that plane
    c = torus_character(w)
    counts = 2 * np.abs(c) + 2
    axes = [np.arange(M) / M for M in counts]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(counts))
    return c, counts, mesh


def _kernel_filtered(w, tests, G, gen):
    """Torus-orbit average of chi(t) |cos(tests, t G)| for each sample.

    Since (F, G) -> (tF, tG) preserves the sampling law and h(tF) = chi(t) h(F),
    E[|cos(W, G)| h(F)] = E[h(F) * avg_t chi(t) |cos(W, tG)|]; the orbit
    average is taken on a randomly shifted grid, which keeps it unbiased.
    """
    c, counts, mesh = _torus_grid(w)
    size = G.shape[0]
    shift = gen.random((size, 1, len(counts)))
    theta = 2 * np.pi * (mesh[None] + shift / counts)         # (size, J, P)
    chi = np.exp(1j * theta @ c)                               # (size, J)
    tG = torus_rotate(G[:, None], theta)                       # (size, J, n, p)
    m = np.einsum("tij,sqik->sqtjk", tests, tG)                # (size, J, T, p, p)
    kern = _kernels.abs_det(m)
    return np.einsum("sq,sqt->st", chi, kern) / mesh.shape[0]


def _batch_for(w, tests, target=4_000_000):
    per_sample = _torus_grid(w)[2].shape[0] * tests.shape[0] * tests.shape[2] ** 2
    return int(max(100, min(10_000, target // max(1, per_sample))))


def verify_sign_cosine(n, k, m, samples=DEFAULT_SAMPLES, test_points=5, rng=None,
                       sign=1, torus_average=True):
    """Estimate (T_k h)(E) / h(E); expected sign (-1)^(m-1)."""
    w = _pi_weight(n, k, m, sign)
    rng = as_generator(rng)
    _check_samples(samples)
    tests = _test_frames(w, test_points, rng)
    href = hw_vector(w, tests)

    def draw(gen, size):
        F = haar_frames(n, k, size, gen)
        if torus_average:
            c = _kernel_filtered(w, tests, F, gen)
        else:
            c = cos_abs(tests[None], F[:, None])           # (size, T)
        return c * hw_vector(w, F)[:, None]

    batch = _batch_for(w, tests) if torus_average else 10_000
    mean, se = batched_mean(draw, samples, rng, batch_size=batch)
    return _report("signT", w, tests, mean / href, se / np.abs(href),
                   (-1) ** (m - 1), samples)


def verify_signTR(n, k, m, samples=DEFAULT_SAMPLES, test_points=5, rng=None,
                  sign=1, torus_average=True):
    """Estimate (T_{n-k} R_{k,n-k} h)(W) / h(W^perp) at W = E^perp; expected sign (-1)^k."""
    w = _pi_weight(n, k, m, sign)
    rng = as_generator(rng)
    _check_samples(samples)
    tests = _test_frames(w, test_points, rng)
    complements = perp_stack(tests)
    href = hw_vector(w, tests)

    def draw(gen, size):
        G = haar_frames(n, n - k, size, gen)
        F = G @ haar_frames(n - k, k, size, gen)
        if torus_average:
            c = _kernel_filtered(w, complements, G, gen)
        else:
            c = cos_abs(complements[None], G[:, None])     # (size, T)
        return c * hw_vector(w, F)[:, None]

    batch = _batch_for(w, complements) if torus_average else 10_000
    mean, se = batched_mean(draw, samples, rng, batch_size=batch)
    return _report("signTR", w, tests, mean / href, se / np.abs(href),
                   (-1) ** k, samples)
