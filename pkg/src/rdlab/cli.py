"""Command-line front end: ``rdlab <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 solver non-convergence. Commands that write files put a ``manifest.json``
next to their CSV outputs. All numbers are printed with 17 significant digits.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, verify
from .channels import CQChannel, channel_mutual_info_solution, divergence_radius_solution
from .coding import DecoderSpec, hayashi_rhs, simulate, theorem1_rhs
from .ea import QuantumChannel, position_based_error, theorem3_rhs
from .exceptions import ConvergenceError
from .exponents import (
    DEFAULT_ALPHAS,
    FULL_ALPHAS,
    classical_reference,
    ea_lower_bound_curve,
    emit_csv,
    hayashi_curve,
    new_lower_bound_curve,
    radius_table,
    sphere_packing_curve,
    stochastic_matrix,
)
from .io import load_json, read_channel, read_matrix, read_probs
from .renyi import divergence

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
CQ_FAMILIES = ("new_lower", "hayashi_lower", "sphere_packing_upper", "classical_reference")


class UsageError(Exception):
    """Bad flag or configuration content."""


def _fmt(x):
    return format(float(x), ".17g")


def _write_manifest(out_dir, command, config_path, seed):
    manifest = {
        "command": command,
        "config_path": os.path.abspath(config_path) if config_path else None,
        "seed": seed,
        "output_dir": os.path.abspath(out_dir),
        "tool_version": __version__,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _config(path):
    cfg = load_json(path)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg, os.path.dirname(os.path.abspath(path))


def _require(cfg, key):
    if key not in cfg:
        raise UsageError(f"config is missing {key!r}")
    return cfg[key]


def _prepare_out(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _rates(spec):
    if isinstance(spec, dict):
        return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
    rates = np.asarray(spec, dtype=float)
    if rates.ndim != 1 or rates.size == 0:
        raise UsageError("'rates' must be a non-empty list or {start, stop, num}")
    return np.sort(rates)


# commands -----------------------------------------------------------------------


def cmd_divergence(args):
    if args.kind != "umegaki" and args.alpha is None:
        raise UsageError("--alpha is required for this kind")
    rho, sigma = read_matrix(args.rho), read_matrix(args.sigma)
    alpha = 1.0 if args.kind == "umegaki" else args.alpha
    print(_fmt(divergence(rho.entries, sigma.entries, alpha, args.kind)))
    return EXIT_OK


def cmd_radius(args):
    cfg, base = _config(args.config)
    W = read_channel(_require(cfg, "channel"), base)
    if not isinstance(W, CQChannel):
        raise UsageError("radius needs a cq channel")
    alphas = np.atleast_1d(np.asarray(_require(cfg, "alpha"), dtype=float))
    kinds = cfg.get("kind", "sandwiched")
    kinds = [kinds] if isinstance(kinds, str) else list(kinds)
    rows = []
    for kind in kinds:
        for a in alphas:
            rad = divergence_radius_solution(W, a, kind)
            cmi = channel_mutual_info_solution(W, a, kind)
            rows.append([_fmt(a), kind, _fmt(rad.value), _fmt(cmi.value), _fmt(abs(rad.value - cmi.value)),
                         _fmt(rad.gap), " ".join(_fmt(p) for p in cmi.P)])
    out = _prepare_out(args.out)
    _write_rows(os.path.join(out, "radius.csv"),
                ["alpha", "kind", "radius", "mutual_information", "difference", "certificate_gap", "optimal_input"],
                rows)
    _write_manifest(out, "radius", args.config, None)
    return EXIT_OK


def cmd_curve(args):
    cfg, base = _config(args.config)
    W = read_channel(_require(cfg, "channel"), base)
    rates = _rates(_require(cfg, "rates"))
    user_alphas = cfg.get("alphas")
    curves = []
    if isinstance(W, QuantumChannel):
        families = cfg.get("families", ["ea_lower"])
        if list(families) != ["ea_lower"]:
            raise UsageError("quantum channels support only the ea_lower family")
        curves.append(ea_lower_bound_curve(W, rates, user_alphas or DEFAULT_ALPHAS))
    else:
        families = cfg.get("families", list(CQ_FAMILIES))
        unknown = set(families) - set(CQ_FAMILIES)
        if unknown:
            raise UsageError(f"unknown families {sorted(unknown)}")
        sandwiched = radius_table(W, "sandwiched")
        for fam in families:
            if fam == "new_lower":
                curves.append(new_lower_bound_curve(W, rates, user_alphas or DEFAULT_ALPHAS, table=sandwiched))
            elif fam == "hayashi_lower":
                curves.append(hayashi_curve(W, rates, user_alphas or FULL_ALPHAS))
            elif fam == "sphere_packing_upper":
                curves.append(sphere_packing_curve(W, rates, user_alphas or FULL_ALPHAS))
            elif fam == "classical_reference":
                T = stochastic_matrix(W)
                if T is None:
                    if "families" in cfg:
                        raise UsageError("classical_reference needs commuting channel states")
                    continue
                curves.append(classical_reference(T, rates, user_alphas or DEFAULT_ALPHAS))
    out = _prepare_out(args.out)
    emit_csv(curves, os.path.join(out, "curves.csv"))
    _write_manifest(out, "curve", args.config, None)
    return EXIT_OK


def cmd_simulate_cq(args):
    cfg, base = _config(args.config)
    W = read_channel(_require(cfg, "channel"), base)
    if not isinstance(W, CQChannel):
        raise UsageError("simulate-cq needs a cq channel")
    P = read_probs(_require(cfg, "P"), W.size, base)
    M = int(_require(cfg, "M"))
    alpha = float(_require(cfg, "alpha"))
    trials = int(_require(cfg, "trials"))
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    if trials < 1:
        raise UsageError("trials must be at least 1")
    if M < 2:
        raise UsageError("M must be at least 2")
    spec = DecoderSpec(cfg.get("decoder", "quotient"), alpha)
    res = simulate(W, P, M, spec, trials, seed)
    bound = theorem1_rhs(W, P, M, alpha)
    hay = hayashi_rhs(W, P, M, alpha)
    out = _prepare_out(args.out)
    _write_rows(os.path.join(out, "trials.csv"), ["trial", "p_err"],
                [[t, _fmt(e)] for t, e in enumerate(res.errors)])
    _write_rows(os.path.join(out, "summary.csv"), ["mean", "stderr", "theorem1_tight", "theorem1_mi", "hayashi_rhs"],
                [[_fmt(res.mean), _fmt(res.stderr), _fmt(bound.tight), _fmt(bound.mi_form), _fmt(hay)]])
    _write_manifest(out, "simulate-cq", args.config, seed)
    return EXIT_OK


def cmd_simulate_ea(args):
    cfg, base = _config(args.config)
    N = read_channel(_require(cfg, "channel"), base)
    if not isinstance(N, QuantumChannel):
        raise UsageError("simulate-ea needs a channel given by Kraus operators")
    rho_a = read_matrix(_require(cfg, "rho_A"), base).entries
    M = int(_require(cfg, "M"))
    alpha = float(_require(cfg, "alpha"))
    y_choice = cfg.get("decoder", "power_alpha")
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    if M < 2:
        raise UsageError("M must be at least 2")
    p_err = position_based_error(N, rho_a, M, alpha, y_choice)
    rhs = theorem3_rhs(N, rho_a, M, alpha)
    out = _prepare_out(args.out)
    _write_rows(os.path.join(out, "summary.csv"), ["M", "alpha", "decoder", "p_err", "rhs"],
                [[M, _fmt(alpha), y_choice, _fmt(p_err), _fmt(min(1.0, rhs))]])
    _write_manifest(out, "simulate-ea", args.config, seed)
    return EXIT_OK


def cmd_verify(args):
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    if args.n == 0:
        print("warning: --n 0 checks no instances", file=sys.stderr)
        return EXIT_OK
    ok = True
    for res in verify.run(args.suite, args.n, args.seed):
        print("\n".join(res.lines()))
        ok &= res.passed
    return EXIT_OK if ok else EXIT_VERIFY


# parser -------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="rdlab", description="Rényi-divergence coding laboratory.")
    parser.add_argument("--version", action="version", version=f"rdlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", help="Rényi divergence of two states in bits")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--kind", required=True, choices=["petz", "sandwiched", "measured", "umegaki"])
    p.set_defaults(func=cmd_divergence)

    for name, func, help_ in [
        ("radius", cmd_radius, "divergence radius and channel mutual information"),
        ("curve", cmd_curve, "error-exponent curves as CSV"),
        ("simulate-cq", cmd_simulate_cq, "random-coding simulation over a cq channel"),
        ("simulate-ea", cmd_simulate_ea, "entanglement-assisted position-based coding"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        if name.startswith("simulate"):
            p.add_argument("--seed", type=int, help="overrides the config seed")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="seeded property suites")
    p.add_argument("--suite", default="all", choices=("all",) + verify.SUITES)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"rdlab: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"rdlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
