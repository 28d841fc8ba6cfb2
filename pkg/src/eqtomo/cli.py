"""Command-line interface: ``eqtomo <subcommand> ...``.

Exit codes: 0 ok, 1 usage, 2 domain error (spectrum, singular system,
even dimension, ...), 3 I/O or document error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import tomo_io
from .density import fidelity, maximally_mixed, random_density, trace_distance
from .equidistant import (
    EquidistantConfig,
    build_state_set,
    povm_completeness_defect,
    sic_check,
)
from .errors import DocumentError, EqtomoError, EvenDimension
from .measurement import born_probabilities, estimate_probabilities, sample_counts
from .tomography import even_dim_defect, reconstruct

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3
OUTPUT_DIR_ENV = "EQTOMO_OUTPUT_DIR"

_PI_RE = re.compile(r"^\s*(?:(\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_theta(text: str) -> float:
    """Radians, or a multiple of pi such as ``pi``, ``pi/2`` or ``2pi/3``."""
    m = _PI_RE.match(text.lower())
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid theta {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _alpha_grid(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha grid must be lo:hi:steps, got {text!r}") from None
    if steps < 1:
        raise argparse.ArgumentTypeError("alpha grid needs at least one step")
    return np.linspace(lo, hi, steps)


def _out_path(given, default_name: str) -> Path:
    if given is not None:
        return Path(given)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _config(args) -> EquidistantConfig:
    if args.dim % 2 == 0 and getattr(args, "require_odd", False):
        raise EvenDimension(args.dim)
    return EquidistantConfig(args.dim, args.alpha_mod, args.theta)


def _add_config_flags(p, dim_required=True):
    p.add_argument("--dim", type=_positive_int, required=dim_required)
    p.add_argument("--alpha-mod", type=float, required=True)
    p.add_argument("--theta", type=parse_theta, required=True)


def _fmt_matrix(m) -> str:
    return np.array2string(np.asarray(m), precision=6, suppress_small=True, max_line_width=120)


# -- subcommands ------------------------------------------------------------

def cmd_states(args) -> int:
    config = _config(args)
    states = build_state_set(config)
    out = tomo_io.write_document(states, _out_path(args.out, "states.eqt.json"))
    print(f"POVM completeness defect: {povm_completeness_defect(states):.3e}")
    print(f"SIC: {'yes' if sic_check(states) else 'no'}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_probe(args) -> int:
    config = _config(args)
    if args.state is not None:
        rho = tomo_io.read_document(args.state, "density")
    elif args.random is not None:
        rank, seed = args.random
        rho = random_density(config.dim, rank, seed)
    else:
        rho = maximally_mixed(config.dim)
    table = born_probabilities(rho, build_state_set(config))
    out = tomo_io.write_document(table, _out_path(args.out, "probabilities.eqt.json"))
    print(f"sum of probabilities: {table.values.sum():.15f} (expected {config.dim})")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    table = tomo_io.read_document(args.probs, "probabilities")
    counts = sample_counts(table, args.shots, args.seed)
    out = tomo_io.write_document(counts, _out_path(args.out, "counts.eqt.json"))
    print(f"total counts: {int(counts.counts.sum())}")
    print(f"wrote {out}")
    if args.probs_out is not None:
        est = tomo_io.write_document(estimate_probabilities(counts), args.probs_out)
        print(f"wrote {est}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    args.require_odd = True
    config = _config(args)
    table = tomo_io.read_document(args.probs, "probabilities")
    report = reconstruct(table, config, project=not args.no_project)
    out = tomo_io.write_document(report, _out_path(args.out, "report.eqt.json"))
    print("rho_raw =")
    print(_fmt_matrix(report.rho_raw))
    print(f"residual: {report.residual:.3e}")
    print("condition numbers: " + ", ".join(f"{c:.6g}" for c in report.condition_numbers))
    if report.rho_physical is None:
        print("projection: disabled")
    else:
        print(f"projection: {report.projection}")
    if args.truth is not None:
        truth = tomo_io.read_document(args.truth, "density")
        est = report.best_estimate()
        print(f"fidelity: {fidelity(truth, est):.12f}")
        print(f"trace distance: {trace_distance(truth, est):.3e}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_demo_even(args) -> int:
    demo = even_dim_defect(args.dim, args.alpha_mod, args.theta, args.epsilon)
    half = args.dim // 2
    print(f"dim={args.dim}: two states differing only in Im(rho[{half},0]) (and its conjugate)")
    print("rho_plus =")
    print(_fmt_matrix(demo.rho_plus.entries))
    print("rho_minus =")
    print(_fmt_matrix(demo.rho_minus.entries))
    print("P(rho_plus) =")
    print(_fmt_matrix(demo.table_plus.values))
    print("P(rho_minus) =")
    print(_fmt_matrix(demo.table_minus.values))
    print(f"max state difference: {demo.state_difference:.3e}")
    print(f"max probability difference: {demo.max_difference:.3e}")
    return EXIT_OK


def _trial_seeds(seed: int, trial: int) -> tuple[int, int]:
    state_ss, sample_ss = np.random.SeedSequence([seed, trial]).spawn(2)
    return int(state_ss.generate_state(1)[0]), int(sample_ss.generate_state(1)[0])


def sweep_rows(dim, theta, alphas, shots, trials, seed, rank=None):
    """Rows of (alpha_mod, mean fidelity, mean trace distance, max condition, status)."""
    rank = dim if rank is None else rank
    seeds = [_trial_seeds(seed, t) for t in range(trials)]
    truths = [random_density(dim, rank, s) for s, _ in seeds]
    rows = []
    for alpha in alphas:
        try:
            config = EquidistantConfig(dim, float(alpha), theta)
            states = build_state_set(config)
            fids, dists, conds = [], [], []
            for truth, (_, sample_seed) in zip(truths, seeds):
                table = born_probabilities(truth, states)
                if shots:
                    table = estimate_probabilities(sample_counts(table, shots, sample_seed))
                report = reconstruct(table, config)
                fids.append(fidelity(truth, report.rho_physical))
                dists.append(trace_distance(truth, report.rho_physical))
                conds.append(max(report.condition_numbers))
            rows.append((float(alpha), float(np.mean(fids)), float(np.mean(dists)), float(max(conds)), "ok"))
        except EqtomoError as exc:
            rows.append((float(alpha), math.nan, math.nan, math.inf, type(exc).__name__))
    return rows


def cmd_sweep(args) -> int:
    if args.shots < 0:
        print("eqtomo: error: --shots must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    if args.dim % 2 == 0:
        raise EvenDimension(args.dim)
    rows = sweep_rows(args.dim, args.theta, args.alpha_grid, args.shots, args.trials, args.seed, args.rank)
    out = _out_path(args.out, "sweep.csv")
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["alpha_mod", "mean_fidelity", "mean_trace_distance", "max_condition_number", "status"])
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def _rank_seed(text: str) -> tuple[int, int]:
    try:
        rank, seed = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--random expects RANK,SEED, got {text!r}") from None
    return rank, seed


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eqtomo", description="Equidistant-state quantum tomography.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("states", help="build the N^2 states and check the POVM")
    _add_config_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("probe", help="exact Born probabilities of a state")
    _add_config_flags(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", help="density document")
    src.add_argument("--random", type=_rank_seed, metavar="RANK,SEED")
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("simulate", help="sample finite-shot counts from exact probabilities")
    p.add_argument("--probs", required=True)
    p.add_argument("--shots", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--probs-out", help="also write the estimated probability table")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="invert a probability table")
    p.add_argument("--probs", required=True)
    _add_config_flags(p)
    p.add_argument("--no-project", action="store_true", help="skip the nearest-physical projection")
    p.add_argument("--truth", help="density document to compare against")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("demo-even", help="show that even dimensions are not identifiable")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--alpha-mod", type=float, default=0.3)
    p.add_argument("--theta", type=parse_theta, default=0.0)
    p.add_argument("--epsilon", type=float, default=None)
    p.set_defaults(func=cmd_demo_even)

    p = sub.add_parser("sweep", help="fidelity and conditioning over a grid of |alpha|")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--theta", type=parse_theta, required=True)
    p.add_argument("--alpha-grid", type=_alpha_grid, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--shots", type=int, default=0, help="0 means exact probabilities")
    p.add_argument("--trials", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=_positive_int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"eqtomo: document error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"eqtomo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EqtomoError as exc:
        print(f"eqtomo: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"eqtomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
