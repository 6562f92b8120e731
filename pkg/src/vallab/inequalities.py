"""Aleksandrov-Fenchel, Minkowski's second inequality, the isoperimetric chain,
and the eta / xi certificates that reduce them to Hodge-Riemann signs.

Tolerances are relative to max(1, rhs).  Paths that involve the polytopal
ball default to 1e-3, exact-oracle paths to 1e-6.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._random import as_generator, ordered_map
from .errors import InputError
from .geometry import Polytope, ball_polytope, box, minkowski_sum, point, polytope_to_dict
from .mixed import (MixedVolumeRequest, default_ball_resolution, gauge_ball,
                    intrinsic_volumes, mixed_volume, mu_ball,
                    steiner_polynomial)

TOL_EXACT = 1e-6
TOL_BALL = 1e-3
MAX_RETRIES = 20
BODY_KINDS = ("box", "random-hull", "zonotope", "ball")


@dataclass(frozen=True)
class InequalityConfig:
    tol: float | None = None
    ball_resolution: int | None = None
    fit_grid: int | None = None
    seed: int | None = None

    def tol_for(self, ball_path: bool) -> float:
        if self.tol is not None:
            return self.tol
        return TOL_BALL if ball_path else TOL_EXACT

    def resolution(self, n: int) -> int:
        return self.ball_resolution or default_ball_resolution(n)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _report(name, lhs, rhs, tol, inputs):
    slack = lhs - rhs
    return InequalityReport(name, float(lhs), float(rhs), float(slack),
                            bool(slack >= -tol * max(1.0, abs(rhs))), float(tol), inputs)


def _descr(K: Polytope) -> dict:
    return {"dim": K.dim, "n_vertices": int(len(K.vertices)), "volume": K.volume}


def _af_values(bodies, cfg):
    rest = tuple(bodies[2:])
    K1, K2 = bodies[0], bodies[1]

    def V(a, b):
        return mixed_volume(MixedVolumeRequest((a, b) + rest, cfg.fit_grid, cfg.ball_resolution))

    return V(K1, K2), V(K1, K1), V(K2, K2)


def af_check(bodies, cfg: InequalityConfig = InequalityConfig()) -> InequalityReport:
    """V(K1,K2,K3..)^2 >= V(K1,K1,K3..) V(K2,K2,K3..)."""
    bodies = list(bodies)
    if len(bodies) < 2 or any(B.dim != len(bodies) for B in bodies):
        raise InputError("af_check needs n bodies in R^n, n >= 2")
    v12, v11, v22 = _af_values(bodies, cfg)
    inputs = {"bodies": [_descr(B) for B in bodies], "seed": cfg.seed,
              "V12": v12, "V11": v11, "V22": v22}
    return _report("aleksandrov_fenchel", v12 ** 2, v11 * v22, cfg.tol_for(False), inputs)


def _ball_mixed(K: Polytope, cfg):
    # V(K, D[n-1]), V(K, K, D[n-2]) and vol(D) from one Steiner fit
    n = K.dim
    D = gauge_ball(n, cfg.resolution(n))
    c = steiner_polynomial(K, D, cfg.fit_grid)
    v1 = c[n - 1] / n
    v2 = c[n - 2] / math.comb(n, 2)
    return v1, v2, D.volume


def minkowski2_ball(K: Polytope, cfg: InequalityConfig = InequalityConfig()) -> InequalityReport:
    """V(K, D[n-1])^2 >= V(K, K, D[n-2]) vol(D), D the polytopal ball."""
    if not K.is_full_dimensional or K.dim < 2:
        raise InputError("minkowski2_ball needs a full-dimensional body, n >= 2")
    v1, v2, vd = _ball_mixed(K, cfg)
    n = K.dim
    # same inequality in intrinsic-volume form: (mu_1/mu_1(D))^2 >= mu_2/mu_2(D)
    r1 = v1 / vd
    r2 = v2 / vd
    inputs = {"body": _descr(K), "seed": cfg.seed, "ball_resolution": cfg.resolution(n),
              "V_K_D": v1, "V_KK_D": v2, "vol_D": vd,
              "intrinsic_form": {"lhs": r1 ** 2, "rhs": r2}}
    return _report("minkowski_second", v1 ** 2, v2 * vd, cfg.tol_for(True), inputs)


@dataclass(frozen=True)
class IsoChainReport:
    ratios: tuple
    monotone: bool
    log_concave: bool
    steps: tuple
    inputs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.monotone

    def to_dict(self) -> dict:
        return {"name": "isoperimetric_chain", "ratios": list(self.ratios),
                "monotone": self.monotone, "log_concave": self.log_concave,
                "steps": [s.to_dict() for s in self.steps], "inputs": self.inputs,
                "pass": self.passed}


def iso_chain(K: Polytope, cfg: InequalityConfig = InequalityConfig()) -> IsoChainReport:
    """(mu_k(K) / mu_k(D))^(1/k), k = 1..n, and its monotonicity."""
    if not K.is_full_dimensional:
        raise InputError("iso_chain needs a full-dimensional body")
    n = K.dim
    tol = cfg.tol_for(True)
    mu = intrinsic_volumes(K, cfg.resolution(n), cfg.fit_grid).mu
    r = [mu[k] / mu_ball(n, k) for k in range(n + 1)]
    ratios = tuple(max(r[k], 0.0) ** (1.0 / k) for k in range(1, n + 1))
    steps = tuple(_report(f"chain_{k}_{k + 1}", ratios[k - 1], ratios[k], tol, {})
                  for k in range(1, n))
    lc = all(r[k] ** 2 >= r[k - 1] * r[k + 1] - tol * max(1.0, r[k - 1] * r[k + 1])
             for k in range(1, n))
    inputs = {"body": _descr(K), "seed": cfg.seed, "ball_resolution": cfg.resolution(n),
              "mu": list(mu)}
    return IsoChainReport(ratios, all(s.passed for s in steps), bool(lc), steps, inputs)


@dataclass(frozen=True)
class Certificate:
    name: str
    coprimitivity_residual: float
    qtilde_value: float
    threshold: float
    passed: bool
    equivalent_slack: float | None = None
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def eta_certificate(K: Polytope, cfg: InequalityConfig = InequalityConfig()) -> Certificate:
    """Q~(eta, eta) up to a positive factor: V(K,K,D[n-2]) - V(K,D[n-1])^2 / vol(D).

    The certificate holds iff this is <= 0 up to the tolerance, which is
    exactly the statement of :func:`minkowski2_ball`.
    """
    if not K.is_full_dimensional or K.dim < 2:
        raise InputError("eta_certificate needs a full-dimensional body, n >= 2")
    v1, v2, vd = _ball_mixed(K, cfg)
    residual = v1 - (v1 / vd) * vd
    q = v2 - v1 ** 2 / vd
    tol = cfg.tol_for(True)
    threshold = tol * max(1.0, abs(v2 * vd)) / vd
    inputs = {"body": _descr(K), "seed": cfg.seed, "ball_resolution": cfg.resolution(K.dim)}
    return Certificate("eta", float(residual), float(q), float(threshold), bool(q <= threshold),
                       float(v1 ** 2 - v2 * vd), inputs)


def xi_certificate(bodies, cfg: InequalityConfig = InequalityConfig()) -> Certificate:
    """V(K1,K1,K3..) - V(K1,K2,K3..)^2 / V(K2,K2,K3..); <= 0 iff Aleksandrov-Fenchel holds."""
    bodies = list(bodies)
    if len(bodies) < 2 or any(B.dim != len(bodies) for B in bodies):
        raise InputError("xi_certificate needs n bodies in R^n, n >= 2")
    v12, v11, v22 = _af_values(bodies, cfg)
    tol = cfg.tol_for(False)
    if v22 <= tol:
        raise InputError(f"V(K2,K2,K3,...) = {v22:.3e} is too small for the xi certificate")
    residual = v12 - (v12 / v22) * v22
    q = v11 - v12 ** 2 / v22
    threshold = tol * max(1.0, abs(v11 * v22)) / v22
    inputs = {"bodies": [_descr(B) for B in bodies], "seed": cfg.seed}
    return Certificate("xi", float(residual), float(q), float(threshold), bool(q <= threshold),
                       float(v12 ** 2 - v11 * v22), inputs)


# --------------------------------------------------------------------------
# random instances
# --------------------------------------------------------------------------

def random_body(n: int, kind: str, rng, params: dict | None = None) -> Polytope:
    """Seeded random convex body.

    box: ``edges`` (default uniform in [0.2, 2]); random-hull: ``m`` Gaussian
    points (default 2n+2); zonotope: ``m`` segments (default n+1);
    ball: ``radius`` and ``resolution``.  Degenerate draws are redrawn.
    """
    params = dict(params or {})
    gen = as_generator(rng)
    if kind not in BODY_KINDS:
        raise InputError(f"unknown body kind {kind!r}; choose from {BODY_KINDS}")
    if kind == "ball":
        return ball_polytope(n, params.get("radius", 1.0),
                             params.get("resolution", default_ball_resolution(n)))
    for _ in range(MAX_RETRIES):
        if kind == "box":
            edges = params.get("edges")
            edges = gen.uniform(0.2, 2.0, n) if edges is None else np.asarray(edges, dtype=float)
            K = box(edges, params.get("origin"))
        elif kind == "random-hull":
            m = int(params.get("m", 2 * n + 2))
            K = Polytope(gen.standard_normal((m, n)))
        else:
            m = int(params.get("m", n + 1))
            K = point(n)
            for v in gen.standard_normal((m, n)):
                K = minkowski_sum(K, Polytope(np.vstack([np.zeros(n), v])))
        if K.is_full_dimensional and K.volume > 1e-9:
            return K
        if kind == "box" and params.get("edges") is not None:
            break
    raise InputError(f"could not draw a full-dimensional {kind} in R^{n}")


def instance_seeds(seed: int, count: int) -> list[int]:
    """Independent per-instance seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for c in children]


def af_batch(n: int, count: int, seed: int = 42, kind: str = "random-hull",
             cfg: InequalityConfig = InequalityConfig()) -> list[InequalityReport]:
    """af_check on ``count`` random n-tuples; instance i uses its own derived seed."""
    def run(s):
        gen = np.random.default_rng(s)
        bodies = [random_body(n, kind, gen) for _ in range(n)]
        return af_check(bodies, InequalityConfig(cfg.tol, cfg.ball_resolution, cfg.fit_grid, s))
    return ordered_map(run, instance_seeds(seed, count))


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Polytope):
        return polytope_to_dict(x)
    return x


def reports_to_json(reports) -> str:
    return json.dumps([_jsonable(r.to_dict()) for r in reports], sort_keys=True)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "lhs", "rhs", "slack", "pass", "seed"])
    for r in reports:
        seed = r.inputs.get("seed")
        w.writerow([r.name, repr(r.lhs), repr(r.rhs), repr(r.slack),
                    str(r.passed).lower(), "" if seed is None else seed])
    return buf.getvalue()
