"""Command-line interface: ``vallab <subcommand> ...``.

Exit codes: 0 all checks passed, 1 a checked inequality or sign failed,
2 input error, 3 numerical error (ill-conditioning, dispersion too large).
Structured output is deterministic for a fixed seed: keys are sorted and no
timing information is written.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import grassmann as gr
from .errors import ContractError, InputError, NumericalError
from .geometry import Polytope, polytope_from_dict
from .harmonics import sph_dim
from .inequalities import InequalityConfig, af_batch, af_check, iso_chain
from .mixed import MixedVolumeRequest, intrinsic_volumes, mixed_volume
from .spherical import SphericalValuation, hr_form, random_primitive

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    samples: int = gr.DEFAULT_SAMPLES
    tol: float | None = None
    format: str = "json"
    output: str | None = None


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _read_bodies(path) -> list[Polytope]:
    data = _read_json(path)
    if isinstance(data, dict) and "bodies" in data:
        data = data["bodies"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise InputError("expected a polytope record or a list of them")
    return [polytope_from_dict(d) for d in data]


def _read_body(path) -> Polytope:
    bodies = _read_bodies(path)
    if len(bodies) != 1:
        raise InputError(f"expected one body, found {len(bodies)}")
    return bodies[0]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _weight_from_lambda(n, k, text) -> gr.HighestWeight:
    lam = _int_list(text)
    if len(lam) > k and any(lam[k:]):
        raise InputError("weight has nonzero entries beyond position k")
    return gr.HighestWeight.from_lambda(n, k, lam[:k])


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _render(payload, fmt: str) -> str:
    payload = _clean(payload)
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        rows = payload.get("reports") if isinstance(payload, dict) else None
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows and all("lhs" in r for r in rows):
            w.writerow(["name", "lhs", "rhs", "slack", "pass", "seed"])
            for r in rows:
                w.writerow([r["name"], repr(r["lhs"]), repr(r["rhs"]), repr(r["slack"]),
                            str(r["pass"]).lower(), r.get("inputs", {}).get("seed", "")])
        else:
            w.writerow(["key", "value"])
            for key in sorted(payload):
                w.writerow([key, json.dumps(payload[key], sort_keys=True)])
        return buf.getvalue()
    lines = [f"{key}: {json.dumps(payload[key], sort_keys=True)}" for key in sorted(payload)]
    return "\n".join(lines) + "\n"


def _config_record(args) -> dict:
    rec = {"seed": args.seed, "samples": args.samples, "tol": args.tol}
    for key in ("ball_resolution", "fit_grid", "test_points"):
        if getattr(args, key, None) is not None:
            rec[key] = getattr(args, key)
    return rec


def _ineq_cfg(args, seed=None) -> InequalityConfig:
    return InequalityConfig(args.tol, getattr(args, "ball_resolution", None),
                            getattr(args, "fit_grid", None), seed)


# --------------------------------------------------------------------------
# subcommands; each returns (payload, exit code)
# --------------------------------------------------------------------------

def cmd_mixedvol(args):
    bodies = _read_bodies(args.bodies)
    req = MixedVolumeRequest(tuple(bodies), args.fit_grid, args.ball_resolution)
    return {"mixed_volume": mixed_volume(req)}, EXIT_OK


def cmd_intrinsic(args):
    st = intrinsic_volumes(_read_body(args.body), args.ball_resolution, args.fit_grid)
    return {"n": st.n, "mu": list(st.mu), "ball_resolution": st.ball_resolution}, EXIT_OK


def cmd_af(args):
    if args.random:
        n, count = args.random
        if n < 2 or count < 1:
            raise InputError("--random needs n >= 2 and count >= 1")
        reports = af_batch(n, count, args.seed, args.kind, _ineq_cfg(args))
    elif args.bodies:
        reports = [af_check(_read_bodies(args.bodies), _ineq_cfg(args, args.seed))]
    else:
        raise InputError("af needs a bodies file or --random N COUNT")
    failed = sum(not r.passed for r in reports)
    payload = {"reports": [r.to_dict() for r in reports],
               "summary": {"count": len(reports), "failed": failed}}
    return payload, EXIT_FAIL if failed else EXIT_OK


def cmd_iso(args):
    rep = iso_chain(_read_body(args.body), _ineq_cfg(args, args.seed))
    return rep.to_dict(), EXIT_OK if rep.passed else EXIT_FAIL


def cmd_hr_sign(args):
    if args.random_harmonic:
        n, q = args.random_harmonic
        if q < 2:
            raise InputError("--random-harmonic needs q >= 2 (q = 0 is not primitive, q = 1 is zero)")
        if n < 2:
            raise InputError("need n >= 2")
        v = random_primitive(n, [q], np.random.default_rng(args.seed), unit_norm=True)
    elif args.valuation:
        v = SphericalValuation.from_dict(_read_json(args.valuation))
    else:
        raise InputError("hr-sign needs a valuation file or --random-harmonic N Q")
    certs = hr_form(v)
    certs = list(certs) if isinstance(certs, tuple) else [certs]
    payload = {"n": v.n, "certificates": [c.to_dict() for c in certs],
               "harmonic_dims": [sph_dim(v.n, q) for q in range(v.f.max_degree + 1)]}
    failed = any(c.passed is False for c in certs)
    return payload, EXIT_FAIL if failed else EXIT_OK


def cmd_cosine_eig(args):
    w = _weight_from_lambda(args.n, args.k, args.weight)
    exact = gr.cosine_eigenvalue(args.n, args.k, w, exact=True)
    payload = {"n": args.n, "k": args.k, "weight": list(w.lam), "m": list(w.m),
               "eigenvalue": float(exact), "eigenvalue_exact": str(exact),
               "sign": (exact > 0) - (exact < 0)}
    if w.in_pi:
        payload["expected_sign"] = (-1) ** (abs(w.m[0]) - 1)
    return payload, EXIT_OK


_VERIFIERS = {"signR": gr.verify_sign_radon, "signT": gr.verify_sign_cosine,
              "signTR": gr.verify_signTR}


def cmd_grassmann_verify(args):
    fn = _VERIFIERS[args.lemma]
    rep = fn(args.n, args.k, args.m, samples=args.samples, test_points=args.test_points,
             rng=np.random.default_rng(args.seed), sign=-1 if args.negative else 1)
    payload = rep.to_dict()
    if rep.passed:
        return payload, EXIT_OK
    if rep.sign != rep.expected_sign and rep.rel_stddev < gr.DISPERSION_LIMIT:
        return payload, EXIT_FAIL
    return payload, EXIT_NUMERIC


def cmd_crofton(args):
    K = _read_body(args.body)
    density = args.density.strip()
    if density == "1":
        f = gr.constant_function(1.0)
    elif density.startswith("hw:"):
        f = gr.hw_function(_weight_from_lambda(K.dim, args.k, density[3:]))
    else:
        raise InputError("density must be '1' or 'hw:<lambda entries>'")
    val = gr.crofton_evaluate(f, args.k, K, args.samples, np.random.default_rng(args.seed))
    return {"k": args.k, "density": density, "value": val}, EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="master random seed (default 42)")
    common.add_argument("--samples", type=int, default=gr.DEFAULT_SAMPLES,
                        help="Monte-Carlo sample count (default 200000)")
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance (default depends on the subcommand)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", "-o", default=None, help="write output here instead of stdout")

    geo = argparse.ArgumentParser(add_help=False)
    geo.add_argument("--ball-resolution", type=int, default=None)
    geo.add_argument("--fit-grid", type=int, default=None)

    p = argparse.ArgumentParser(prog="vallab", description="Valuation-theory numerics and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mixedvol", parents=[common, geo], help="mixed volume of n bodies")
    s.add_argument("bodies", help="JSON file with a list of polytopes ('-' for stdin)")
    s.set_defaults(func=cmd_mixedvol)

    s = sub.add_parser("intrinsic", parents=[common, geo], help="intrinsic volumes of a body")
    s.add_argument("body")
    s.set_defaults(func=cmd_intrinsic)

    s = sub.add_parser("af", parents=[common, geo], help="Aleksandrov-Fenchel check")
    s.add_argument("bodies", nargs="?")
    s.add_argument("--random", nargs=2, type=int, metavar=("N", "COUNT"))
    s.add_argument("--kind", default="random-hull", choices=("box", "random-hull", "zonotope"))
    s.set_defaults(func=cmd_af)

    s = sub.add_parser("iso", parents=[common, geo], help="isoperimetric chain of a body")
    s.add_argument("body")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("hr-sign", parents=[common], help="degree-1 Hodge-Riemann sign certificate")
    s.add_argument("valuation", nargs="?")
    s.add_argument("--random-harmonic", nargs=2, type=int, metavar=("N", "Q"))
    s.set_defaults(func=cmd_hr_sign)

    s = sub.add_parser("cosine-eig", parents=[common], help="exact cosine-transform eigenvalue")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--weight", required=True, help="lambda entries, e.g. 2,2 (all even)")
    s.set_defaults(func=cmd_cosine_eig)

    s = sub.add_parser("grassmann-verify", parents=[common], help="Monte-Carlo transform sign check")
    s.add_argument("--lemma", choices=sorted(_VERIFIERS), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--negative", action="store_true", help="use last weight entry -2 (n = 2k only)")
    s.add_argument("--test-points", type=int, default=5)
    s.set_defaults(func=cmd_grassmann_verify)

    s = sub.add_parser("crofton", parents=[common], help="Crofton valuation of a body")
    s.add_argument("density", help="'1' or 'hw:<lambda entries>'")
    s.add_argument("body")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_crofton)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.samples <= 0:
            raise InputError("--samples must be positive")
        if not 0 <= args.seed < 2 ** 64:
            raise InputError("--seed must be an unsigned 64-bit integer")
        payload, code = args.func(args)
    except (InputError, ContractError) as exc:
        print(f"vallab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"vallab: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    run = RunConfig(args.seed, args.samples, args.tol, args.format, args.output)
    if isinstance(payload, dict):
        payload = dict(payload, config=_config_record(args), command=args.command)
    text = _render(payload, run.format)
    if run.output:
        with open(run.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
