"""Spherical valuations mu_{k,f} at the level of harmonic coefficients.

A spherical valuation is stored as its homogeneity degree k and the
expansion of f.  Degree-1 harmonics give the zero valuation, so that block
is always cleared.  Positive normalizing constants are fixed to 1; every
contract here is a sign, a zero pattern or a ratio.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ContractError, InputError
from .geometry import Polytope, surface_area_measure
from .harmonics import HarmonicExpansion, degree_norm_sq, random_expansion, sph_dim

PRIMITIVE_TOL = 1e-10


@dataclass(frozen=True)
class SphericalValuation:
    n: int
    k: int
    f: HarmonicExpansion

    def __post_init__(self):
        if self.f.n != self.n:
            raise InputError(f"expansion is on S^{self.f.n - 1}, valuation needs S^{self.n - 1}")
        if not 0 <= self.k <= self.n - 1:
            raise InputError(f"degree k must lie in 0..{self.n - 1}")
        if self.f.max_degree >= 1 and np.any(self.f.coeffs[1] != 0):
            raise InputError("degree-1 block must vanish; build through make_valuation")

    @property
    def parity(self):
        return self.f.parity()

    def is_zero(self) -> bool:
        return self.f.is_zero()

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "coeffs": [c.tolist() for c in self.f.coeffs]}

    @classmethod
    def from_dict(cls, d) -> "SphericalValuation":
        try:
            k = int(d["k"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed valuation record: {exc}") from None
        e = HarmonicExpansion.from_dict(d)
        return make_valuation(e.n, k, e)


def dumps_valuation(v: SphericalValuation) -> str:
    return json.dumps(v.to_dict())


def loads_valuation(text: str) -> SphericalValuation:
    return SphericalValuation.from_dict(json.loads(text))


def make_valuation(n: int, k: int, e: HarmonicExpansion) -> SphericalValuation:
    """mu_{k,f}: clears the degree-1 block of f, which lies in the kernel."""
    if e.n != n:
        raise InputError("expansion dimension does not match n")
    if e.max_degree >= 1:
        e = e.with_block(1, np.zeros(sph_dim(n, 1)))
    return SphericalValuation(n, k, e)


def evaluate_top(v: SphericalValuation, K: Polytope) -> float:
    """mu_{n-1,f}(K) = sum over facets of f(normal) * facet area."""
    if v.k != v.n - 1:
        raise InputError("evaluation is available in top degree k = n-1 only")
    if K.dim != v.n:
        raise InputError("body and valuation live in different dimensions")
    sm = surface_area_measure(K)
    return float(np.dot(v.f(sm.normals), sm.masses))


def lefschetz_up(v: SphericalValuation) -> SphericalValuation:
    """mu_1 . mu_{k,f} = mu_{k+1,f} (positive constant set to 1)."""
    if v.k >= v.n - 1:
        raise InputError("cannot raise the degree beyond n-1")
    return SphericalValuation(v.n, v.k + 1, v.f)


def lefschetz_down(v: SphericalValuation) -> SphericalValuation:
    """mu_{n-1} * mu_{k,f} = mu_{k-1,f} (positive constant set to 1)."""
    if v.k <= 0:
        raise InputError("cannot lower the degree below 0")
    return SphericalValuation(v.n, v.k - 1, v.f)


def is_primitive_deg1(v: SphericalValuation) -> bool:
    """For k = 1: primitive iff the constant part of f vanishes."""
    if v.k != 1:
        raise InputError("primitivity criterion is for degree-1 valuations")
    return bool(abs(v.f.coeffs[0][0]) <= PRIMITIVE_TOL)


def pairing_factor_exact(n: int, q: int) -> Fraction:
    if q == 1:
        raise InputError("degree-1 harmonics carry no valuation")
    if n < 2 or q < 0:
        raise InputError("need n >= 2 and q >= 0")
    return (-1) ** q * (1 - Fraction(q * (n + q - 2), n - 1))


def pairing_sign_factor(n: int, q: int) -> float:
    """(-1)^q (1 - q(n+q-2)/(n-1)), the degree-q weight of the pairing."""
    return float(pairing_factor_exact(n, q))


@dataclass(frozen=True)
class HRCertificate:
    """Sign certificate for Q(phi, phi) on one parity class.

    ``per_degree`` holds (q, sign, magnitude) for every nonzero block; the
    total sign must equal ``claimed_sign`` = (-1)^(1+s).  ``passed`` is None
    for the zero valuation.
    """
    n: int
    s: int
    per_degree: tuple
    total: float
    total_sign: int
    claimed_sign: int
    passed: bool | None

    def to_dict(self) -> dict:
        return {
            "n": self.n, "s": self.s,
            "per_degree": [{"q": q, "sign": sg, "magnitude": m} for q, sg, m in self.per_degree],
            "total": self.total, "total_sign": self.total_sign,
            "claimed_sign": self.claimed_sign, "pass": self.passed,
        }


def _certificate(n: int, s: int, f: HarmonicExpansion) -> HRCertificate:
    rows, total = [], 0.0
    for q in range(2, f.max_degree + 1):
        norm = degree_norm_sq(f, q)
        if norm <= PRIMITIVE_TOL ** 2:
            continue
        factor = pairing_factor_exact(n, q)
        sign = 1 if factor > 0 else -1
        rows.append((q, sign, abs(float(factor)) * norm))
        total += float(factor) * norm
    total_sign = int(np.sign(total))
    claimed = (-1) ** (1 + s)
    passed = None if not rows else total_sign == claimed
    return HRCertificate(n, s, tuple(rows), total, total_sign, claimed, passed)


def hr_form(v: SphericalValuation):
    """Degree-1 Hodge-Riemann form Q(v, v) as a sign certificate.

    Pure parity gives one :class:`HRCertificate`; mixed parity gives the pair
    (even, odd), since the form is block diagonal across parity.
    """
    if v.k != 1 or not is_primitive_deg1(v):
        raise ContractError("hr_form needs a primitive valuation of degree 1")
    s = v.parity
    if s is not None:
        return _certificate(v.n, s, v.f)
    return (_certificate(v.n, 0, v.f.parity_part(0)),
            _certificate(v.n, 1, v.f.parity_part(1)))


def poincare_pair(v: SphericalValuation, w: SphericalValuation) -> float:
    """sum_q pairing_sign_factor(n, q) <f^(q), g^(q)> for complementary degrees."""
    if v.n != w.n:
        raise InputError("valuations live in different dimensions")
    if v.k + w.k != v.n:
        raise InputError(f"degrees {v.k} and {w.k} are not complementary in n={v.n}")
    total = 0.0
    for q in range(min(v.f.max_degree, w.f.max_degree) + 1):
        if q == 1:
            continue
        total += pairing_sign_factor(v.n, q) * float(np.dot(v.f.coeffs[q], w.f.coeffs[q]))
    return total


def random_primitive(n: int, degrees, rng, unit_norm: bool = False) -> SphericalValuation:
    """Degree-1 valuation with Gaussian coefficients in the given degrees (all >= 2)."""
    if any(q < 2 for q in degrees):
        raise InputError("primitive degree-1 valuations use harmonic degrees >= 2")
    return make_valuation(n, 1, random_expansion(n, degrees, rng, unit_norm))
