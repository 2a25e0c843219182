"""Command-line entry point.

Subcommands: train-pso, train-adam, evaluate, prune, export-qasm,
report.  Training flags override config-file values, which override
defaults.  SWARMVQC_THREADS caps internal worker parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit import circuit_to_qasm, text_to_circuit
from .experiment import (
    collect_results,
    config_from_sources,
    evaluate,
    load_config_file,
    run_experiment,
)
from .metrics import render_results_table
from .prune import format_prune_report, prune_dead_gates
from .simulator import READOUT_QUBIT


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="key = value config file")
    parser.add_argument("--dataset", type=str, help="dataset name for reports")
    parser.add_argument("--train-csv", dest="train_csv", type=str)
    parser.add_argument("--val-csv", dest="val_csv", type=str)
    parser.add_argument("--test-csv", dest="test_csv", type=str)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--shots", type=int,
                        help="also re-evaluate with sampled readout")
    parser.add_argument("--out", dest="out_dir", type=str, help="run directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmvqc",
        description="Structure search and gradient baselines for small "
                    "quantum circuit classifiers",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train_pso = commands.add_parser("train-pso", help="swarm structure search")
    _add_train_flags(train_pso)
    train_pso.add_argument("--dims", dest="dimensions", type=int,
                           help="particle dimensions (4 slots per gate)")
    train_pso.add_argument("--particles", dest="n_particles", type=int)
    train_pso.add_argument("--iterations", type=int)
    train_pso.add_argument("--fitness-mode", dest="fitness_mode",
                           choices=["error_rate", "cross_entropy"])

    train_adam = commands.add_parser("train-adam", help="fixed-ansatz gradient baseline")
    _add_train_flags(train_adam)
    train_adam.add_argument("--epochs", type=int)
    train_adam.add_argument("--batch", dest="batch_size", type=int)
    train_adam.add_argument("--lr", dest="learning_rate", type=float)

    evaluate_cmd = commands.add_parser("evaluate", help="re-evaluate a stored run")
    evaluate_cmd.add_argument("--run", required=True, help="run directory")
    evaluate_cmd.add_argument("--split", default="test",
                              choices=["train", "val", "test"])
    evaluate_cmd.add_argument("--csv", default=None, help="override split CSV path")
    evaluate_cmd.add_argument("--shots", type=int, default=None)
    evaluate_cmd.add_argument("--seed", type=int, default=0)

    prune_cmd = commands.add_parser("prune", help="report causally dead gates")
    prune_cmd.add_argument("--circuit", required=True, help="circuit text file")
    prune_cmd.add_argument("--readout", type=int, default=READOUT_QUBIT)

    qasm_cmd = commands.add_parser("export-qasm", help="emit OpenQASM 2.0")
    qasm_cmd.add_argument("--circuit", required=True, help="circuit text file")
    qasm_cmd.add_argument("--out", default=None, help="output path (default stdout)")

    report_cmd = commands.add_parser("report", help="tabulate stored run metrics")
    report_cmd.add_argument("--runs", nargs="+", required=True, help="run directories")
    report_cmd.add_argument("--split", default="test")
    return parser


_TRAIN_FIELDS = (
    "dataset", "train_csv", "val_csv", "test_csv", "seed", "shots", "out_dir",
    "dimensions", "n_particles", "iterations", "fitness_mode",
    "epochs", "batch_size", "learning_rate",
)


def _run_training(args: argparse.Namespace, method: str) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    flag_values = {name: getattr(args, name, None) for name in _TRAIN_FIELDS}
    flag_values["method"] = method
    config = config_from_sources(file_values, flag_values)
    run_dir = run_experiment(config)
    print(f"run artifacts written to {run_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train-pso":
            return _run_training(args, "pso")
        if args.command == "train-adam":
            return _run_training(args, "adam")
        if args.command == "evaluate":
            record = evaluate(args.run, args.split, shots=args.shots,
                              seed=args.seed, csv_path=args.csv)
            print(json.dumps(record, indent=2, sort_keys=True))
            return 0
        if args.command == "prune":
            circuit = text_to_circuit(Path(args.circuit).read_text(encoding="utf-8"))
            print(format_prune_report(prune_dead_gates(circuit, args.readout)), end="")
            return 0
        if args.command == "export-qasm":
            circuit = text_to_circuit(Path(args.circuit).read_text(encoding="utf-8"))
            qasm = circuit_to_qasm(circuit)
            if args.out:
                Path(args.out).write_text(qasm, encoding="utf-8")
            else:
                print(qasm, end="")
            return 0
        if args.command == "report":
            rows = collect_results(args.runs, args.split)
            print(render_results_table(rows), end="")
            return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
