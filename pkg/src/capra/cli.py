"""Command-line front end: norm evaluation, envelope surfaces, verification.

The CLI performs no arithmetic of its own; every printed value comes from a
library call.  Exit codes: 0 success, 1 failed verification checks, 2 usage
or parse errors, 3 domain errors (the message names the violated
precondition).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys


def _cap_threads() -> None:
    # CAPRA_THREADS caps the BLAS/OpenMP pools; must be set before numpy
    # loads, which is why library imports are deferred to the handlers.
    cap = os.environ.get("CAPRA_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _fmt(value: float) -> str:
    if value == math.inf:
        return "+inf"
    if value == -math.inf:
        return "-inf"
    return f"{value:.12g}"


def _parse_point(text: str):
    import numpy as np

    try:
        return np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ValueError(f"could not parse point {text!r}: {exc}") from None


def _parse_exponent(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    return float(t)


def _parse_nu(text: str):
    from .norms import NormalizationSpec

    if not text.startswith("lp:"):
        raise ValueError(f"normalization must be 'lp:<p>' (got {text!r})")
    return NormalizationSpec.lp(_parse_exponent(text[3:]))


def _parse_phi(text: str, dim: int):
    from .norms import PhiSpec

    t = text.strip().lower()
    if t == "id":
        return PhiSpec.identity(dim)
    if t.endswith("*id"):
        return PhiSpec.scaled_identity(float(t[:-3]), dim)
    return PhiSpec.from_values([_parse_exponent(tok) for tok in text.split(",")])


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def cmd_norm(args) -> int:
    from .norms import (PhiSpec, SourceNormSpec, best_norm_object,
                        k_support_norm, parse_config, top_k_norm)

    x = _parse_point(args.x)
    d = x.size
    config = parse_config(_load_config(args.config), dim=d)
    if args.kind == "topk":
        if args.q is None or args.k is None:
            raise ValueError("topk needs --q and --k")
        value = top_k_norm(x, _parse_exponent(args.q), args.k)
    elif args.kind == "ksupport":
        if args.p is None or args.k is None:
            raise ValueError("ksupport needs --p and --k")
        value = k_support_norm(x, _parse_exponent(args.p), args.k)
    elif args.kind == "best":
        if args.p is not None:
            source = SourceNormSpec.lp(_parse_exponent(args.p), d)
        elif config["source"] is not None:
            source = config["source"]
        else:
            raise ValueError("best needs --p or a config source norm")
        if args.phi is not None:
            phi = _parse_phi(args.phi, d)
        elif config["phi"] is not None:
            phi = config["phi"]
        else:
            phi = PhiSpec.identity(d)
        value = best_norm_object(phi, source).value(x)
    else:
        raise ValueError(f"unknown norm kind {args.kind!r}")
    print(_fmt(value))
    return 0


def cmd_envelope(args) -> int:
    import numpy as np

    from .conjugacy import ZeroHomFnSpec
    from .envelope import ball_box_grid, tightest_convex_on_ball, write_surface_json
    from .numerics import write_sample_csv

    nu = _parse_nu(args.nu)
    dim = args.dim
    if args.f == "l0":
        f = ZeroHomFnSpec.l0(dim)
    elif args.f == "zero":
        f = ZeroHomFnSpec.constant_zero()
    elif args.f.startswith("phi:"):
        f = ZeroHomFnSpec.phi_l0(_parse_phi(args.f[4:], dim))
    else:
        raise ValueError(f"unknown function {args.f!r} (use l0, zero, or phi:<weights>)")
    grid = ball_box_grid(dim, args.grid)
    env = tightest_convex_on_ball(f, nu, grid)

    checkpoints = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        checkpoints.append(e / nu.value(e))
    ones = np.ones(dim)
    checkpoints.append(ones / nu.value(ones))
    for pt in checkpoints:
        coords = ",".join(_fmt(c) for c in pt)
        print(f"value near ({coords}): {_fmt(env.value_near(pt))}")
    if args.out:
        write_sample_csv(env, args.out)
        print(f"surface written to {args.out}")
    if args.json:
        write_surface_json(env, args.json, checkpoints)
        print(f"summary written to {args.json}")
    return 0


def _oracle_function(args):
    from .conjugacy import ZeroHomFnSpec

    dim = args.dim
    if args.f == "l0":
        f = ZeroHomFnSpec.l0(dim)
    elif args.f == "zero":
        f = ZeroHomFnSpec.constant_zero()
    elif args.f.startswith("phi:"):
        f = ZeroHomFnSpec.phi_l0(_parse_phi(args.f[4:], dim))
    else:
        raise ValueError(f"unknown function {args.f!r}")
    return f


def cmd_oracle(args) -> int:
    """Re-run a brute-force oracle so derived reference values are
    regenerable from the command line."""
    import numpy as np

    from . import oracle as orc
    from .conjugacy import conjugate_at_points
    from .envelope import BALL_TOL, ball_box_grid
    from .norms import (PhiSpec, SourceNormSpec, dual_coordinate_k_norm,
                        phi_dual_gauge)
    from .numerics import FunctionSample, build_grid, write_sample_csv

    seed = int(args.seed, 0)
    if args.oracle == "topk-enum":
        from .norms import conj_exponent

        x = _parse_point(args.x)
        q = _parse_exponent(args.q or "2")
        src = SourceNormSpec.lp(conj_exponent(q), x.size)
        value = dual_coordinate_k_norm(x, src, args.k, method="enumerate")
        print(_fmt(value))
        return 0
    if args.oracle == "ksupport":
        x = _parse_point(args.x)
        dirs = orc.default_direction_set(x.size, args.count, seed=seed)
        print(_fmt(orc.k_support_bruteforce(x, _parse_exponent(args.p), args.k, dirs)))
        return 0
    if args.oracle == "support-phi":
        x = _parse_point(args.x)
        d = x.size
        src = SourceNormSpec.lp(_parse_exponent(args.p), d)
        phi = _parse_phi(args.phi or "id", d)
        cand = build_grid([(-1.25, 1.25)] * d, [11] * d).nodes
        value = orc.support_function_bruteforce(
            x, lambda y: phi_dual_gauge(y, phi, src) <= 1.0 + 1e-12, cand)
        print(_fmt(value))
        return 0
    if args.oracle in ("conjugate", "envelope2d"):
        f = _oracle_function(args)
        nu = _parse_nu(args.nu)
        grid = ball_box_grid(args.dim, args.grid)
        masked = np.where(nu.batch(grid.nodes) <= 1.0 + BALL_TOL,
                          f.batch(grid.nodes), math.inf)
        sample = FunctionSample(grid, masked)
        if args.oracle == "conjugate":
            at = _parse_point(args.at)
            print(_fmt(float(conjugate_at_points(sample, at[None, :])[0])))
            return 0
        ref = orc.convex_envelope_2d(sample)
        if args.at:
            at = _parse_point(args.at)
            print(f"value near ({args.at}): {_fmt(ref.value_near(at))}")
        if args.out:
            write_sample_csv(ref, args.out)
            print(f"surface written to {args.out}")
        return 0
    raise ValueError(f"unknown oracle {args.oracle!r}")


def cmd_verify(args) -> int:
    from .verification import report_dict, run_suite

    if args.oracle:
        return cmd_oracle(args)
    if not args.suite:
        raise ValueError("verify needs --suite or --oracle")
    seed = int(args.seed, 0)
    results = run_suite(args.suite, seed)
    for r in results:
        print(r.line())
    report = report_dict(args.suite, seed, results)
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"report written to {args.report}")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capra",
        description="Capra conjugacy toolkit: sparsity norms, conjugates, "
                    "and convex lower envelopes on unit balls.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    p_norm = sub.add_parser("norm", help="evaluate a norm at a point", **fmt)
    p_norm.add_argument("--kind", required=True, choices=("topk", "ksupport", "best"))
    p_norm.add_argument("--p", help="source/k-support exponent in [1, inf] (default from config)")
    p_norm.add_argument("--q", help="top-k exponent in [1, inf]")
    p_norm.add_argument("--k", type=int, help="number of active components")
    p_norm.add_argument("--phi", help="sparsity weights: 'id', '<c>*id', or comma list")
    p_norm.add_argument("--x", required=True, help="point, comma separated")
    p_norm.add_argument("--config", help="JSON config file; flags override it")
    p_norm.set_defaults(func=cmd_norm)

    p_env = sub.add_parser("envelope", help="tightest convex envelope surface on a ball", **fmt)
    p_env.add_argument("--f", default="l0", help="l0, zero, or phi:<weights>")
    p_env.add_argument("--nu", required=True, help="normalization, e.g. lp:2 or lp:inf")
    p_env.add_argument("--grid", type=int, default=201, help="nodes per axis (odd)")
    p_env.add_argument("--dim", type=int, default=2, help="ambient dimension")
    p_env.add_argument("--out", help="CSV output path")
    p_env.add_argument("--json", help="JSON summary output path")
    p_env.set_defaults(func=cmd_envelope)

    p_ver = sub.add_parser("verify", help="run verification suites or oracles", **fmt)
    p_ver.add_argument("--suite",
                       choices=("norms", "conjugacy", "envelope", "acceptance", "all"))
    p_ver.add_argument("--seed", default="0x5EED", help="rng seed (int or hex)")
    p_ver.add_argument("--report", help="JSON report output path")
    p_ver.add_argument("--oracle",
                       choices=("topk-enum", "ksupport", "support-phi",
                                "conjugate", "envelope2d"),
                       help="re-run a brute-force oracle instead of a suite")
    p_ver.add_argument("--x", help="point for point-wise oracles")
    p_ver.add_argument("--at", help="evaluation point for grid oracles")
    p_ver.add_argument("--p", help="source exponent for oracle norms")
    p_ver.add_argument("--q", help="restricted-norm exponent for topk-enum")
    p_ver.add_argument("--k", type=int, help="active-component count")
    p_ver.add_argument("--phi", help="sparsity weights for support-phi")
    p_ver.add_argument("--count", type=int, default=100_000,
                       help="direction count for sampled oracles")
    p_ver.add_argument("--f", default="l0", help="function for grid oracles")
    p_ver.add_argument("--nu", default="lp:2", help="normalization for grid oracles")
    p_ver.add_argument("--grid", type=int, default=101, help="grid nodes per axis")
    p_ver.add_argument("--dim", type=int, default=2, help="ambient dimension")
    p_ver.add_argument("--out", help="CSV output for envelope2d")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    _cap_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
