"""Command-line interface: build strategies, analyze their performance,
simulate verification runs, evaluate the adversarial scenario, and compute
property-testing round counts.

Exit codes: 0 success, 2 validation failure, 3 numeric fault.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, hypergraph, property_testing, simulate, stabilizer
from .channels import channel_from_json, matrix_from_lists
from .errors import NumericFault, ValidationError
from .strategies import (
    Strategy,
    g_mub_strategy,
    omega_from_strategy,
    optimal_strategy,
    spectral_gap,
    strategy_from_json,
    strategy_to_json,
)

NAMED_GATES = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
}


def _target_matrix(args) -> np.ndarray:
    if args.matrix:
        with open(args.matrix) as fh:
            return matrix_from_lists(json.load(fh))
    name = args.gate.upper()
    if name in NAMED_GATES and args.d == 2:
        return NAMED_GATES[name]
    if name == "I":
        return np.eye(args.d, dtype=complex)
    raise ValidationError(
        f"unknown gate {args.gate!r} for d={args.d}; pass --matrix for a custom unitary"
    )


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text + ("\n" if not text.endswith("\n") else ""))


def cmd_strategy(args) -> int:
    if args.clifford:
        with open(args.clifford) as fh:
            circuit = stabilizer.parse_circuit(fh.read())
        if args.mode == "full":
            strat = stabilizer.full_stabilizer_strategy(circuit)
        else:
            strat = stabilizer.generator_strategy(circuit)
    elif args.gate and args.gate.upper() in ("CZ", "CCZ", "CNZ", "CNX"):
        name = args.gate.upper()
        n = args.n or {"CZ": 2, "CCZ": 3}.get(name)
        if n is None:
            raise ValidationError(f"gate {name} needs --n")
        kind = "cnx" if name == "CNX" else "cnz"
        strat = hypergraph.color_strategy(n, kind)
    else:
        target = _target_matrix(args)
        d = target.shape[0]
        if args.mode == "gmub":
            strat = g_mub_strategy(target, d, args.g)
        else:
            strat = optimal_strategy(target, d)
    omega = omega_from_strategy(strat)
    meta = {"gap": spectral_gap(omega), "n_pairs": len(strat.pairs)}
    _write(args.out, strategy_to_json(strat, meta=meta))
    return 0


def cmd_analyze(args) -> int:
    with open(args.strategy) as fh:
        strat = strategy_from_json(fh.read())
    omega = omega_from_strategy(strat)
    try:
        spectrum = analysis.target_frame_spectrum(omega, strat.target)
    except ValidationError:
        spectrum = None
    adversarial = None
    if args.adversarial_lambda is not None:
        hs = analysis.HomogeneousStrategy(d=omega.d, lam=args.adversarial_lambda)
        n_adv = analysis.adversarial_trial_count(args.epsilon, args.delta, hs)
        adversarial = {
            "lambda": hs.lam,
            "F": analysis.adversarial_fidelity_bound(n_adv, args.delta, hs),
            "N": n_adv,
        }
    report = analysis.analysis_report(
        omega, args.epsilon, args.delta, spectrum=spectrum, adversarial=adversarial
    )
    _write(args.out, json.dumps(report, indent=2))
    return 0


def cmd_simulate(args) -> int:
    with open(args.strategy) as fh:
        strat = strategy_from_json(fh.read())
    if args.sweep:
        return _sweep(args, strat)
    with open(args.channel) as fh:
        channel = channel_from_json(fh.read())
    run = simulate.run_verification(channel, strat, args.rounds, args.seed)
    verdict_obj = None
    if args.epsilon is not None and args.delta is not None:
        omega = omega_from_strategy(strat)
        verdict_obj = simulate.verdict(run, args.epsilon, args.delta, omega)
    if args.out_csv:
        with open(args.out_csv, "w", newline="") as fh:
            simulate.run_to_csv(run, fh)
    _write(args.out, json.dumps(simulate.run_summary(run, verdict_obj), indent=2))
    return 0


def _sweep(args, strat: Strategy) -> int:
    if args.delta is None:
        raise ValidationError("--sweep needs --delta")
    try:
        param, spec = args.sweep
        start, stop, count = spec.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ValidationError(f"bad sweep spec {args.sweep!r}: {exc}") from exc
    if param != "epsilon":
        raise ValidationError(f"unsupported sweep parameter {param!r}")
    omega = omega_from_strategy(strat)
    lines = ["epsilon,N"]
    for eps in grid:
        lines.append(f"{eps},{analysis.trial_count(float(eps), args.delta, omega)}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_adversarial(args) -> int:
    hs = analysis.HomogeneousStrategy(d=args.d, lam=args.lam)
    report: dict = {"inputs": {"d": args.d, "lambda": args.lam, "delta": args.delta}}
    if args.rounds is not None:
        report["F"] = analysis.adversarial_fidelity_bound(args.rounds, args.delta, hs)
        report["N"] = args.rounds
        report["optimal_lambda"] = analysis.optimal_lambda(args.rounds, args.delta)
    elif args.epsilon is not None:
        n_adv = analysis.adversarial_trial_count(args.epsilon, args.delta, hs)
        report["N"] = n_adv
        report["F"] = analysis.adversarial_fidelity_bound(n_adv, args.delta, hs)
        report["inputs"]["epsilon"] = args.epsilon
    else:
        raise ValidationError("pass either --rounds or --epsilon")
    _write(args.out, json.dumps(report, indent=2))
    return 0


def cmd_property(args) -> int:
    if args.mode == "EP_detect":
        rounds = property_testing.ep_detection_rounds(args.d, args.delta)
    elif args.mode == "EP_2MUB":
        rounds = property_testing.ep_two_mub_rounds(args.d, args.delta)
    else:
        rounds = property_testing.robustness_rounds(args.d, args.delta, args.r)
    report = property_testing.PropertyReport(
        d=args.d, delta=args.delta, mode=args.mode, rounds=rounds, r_target=args.r
    )
    _write(args.out, json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gateverify",
        description="verification strategies for qudit unitary gates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("strategy", help="construct a strategy and write its JSON")
    p.add_argument("--gate", help="named gate (I X Y Z H S T, CZ, CCZ, CnZ, CnX)")
    p.add_argument("--matrix", help="JSON file with a custom target unitary")
    p.add_argument("--clifford", help="Clifford circuit text file")
    p.add_argument("--d", type=int, default=2, help="qudit dimension (prime)")
    p.add_argument("--n", type=int, help="qubit count for multi-controlled gates")
    p.add_argument("--g", type=int, default=2, help="number of MUBs for --mode gmub")
    p.add_argument("--mode", default="optimal",
                   choices=["optimal", "gmub", "generators", "full", "coloring"])
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.set_defaults(func=cmd_strategy)

    p = sub.add_parser("analyze", help="spectral gap, pass probability, trial count")
    p.add_argument("--strategy", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--adversarial-lambda", type=float, dest="adversarial_lambda")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo protocol simulation")
    p.add_argument("--strategy", required=True)
    p.add_argument("--channel", help="channel JSON file")
    p.add_argument("--rounds", type=int, default=0)
    p.add_argument("--seed", type=int, help="required for simulation runs")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--sweep", nargs=2, metavar=("PARAM", "START:STOP:COUNT"),
                   help="emit a CSV of (epsilon, N) instead of simulating")
    p.add_argument("--out-csv", dest="out_csv", help="per-round log CSV path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("adversarial", help="correlated-rounds fidelity bound")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--lambda", type=float, dest="lam", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--rounds", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_adversarial)

    p = sub.add_parser("property", help="entanglement-preservation / robustness rounds")
    p.add_argument("--mode", required=True, choices=list(property_testing.MODES))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_property)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not args.sweep and args.seed is None:
        parser.error("simulate requires an explicit --seed")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericFault as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
