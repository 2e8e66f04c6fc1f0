"""Command-line entry point.

Exit codes: 0 success, 1 validation error, 2 simulation cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from progbench import runner
from progbench.architecture import load_architecture, validate_architecture_dict
from progbench.circuit import circuit_stats, parse_circuit
from progbench.errors import SimulationCapError, ValidationError
from progbench.hamiltonian import (
    HermitianOperator,
    cycle_walk_hamiltonian,
    pauli_decompose,
    trotter_circuit,
    trotter_reps,
)


def _cmd_run(args: argparse.Namespace) -> int:
    spec = runner.load_experiment(args.experiment)
    spec = runner.with_overrides(
        spec,
        seed=args.seed,
        shots=args.shots,
        machine_file=args.machine,
        output_dir=args.out,
        device_counts=args.counts,
    )
    record = runner.run_experiment(spec)
    print(runner.format_table([record.report]))
    if record.device_source.get("kind") == "synthetic":
        print(f"\ndevice: {runner.SYNTHETIC_LABEL}")
    if spec.output_dir:
        print(f"artifacts written to {spec.output_dir}")
    return 0


def _cmd_suite(args: argparse.Namespace) -> int:
    records = runner.run_suite(
        args.preset,
        machines=args.machine or runner.DEFAULT_MACHINES,
        shots=args.shots or runner.DEFAULT_SHOTS,
        seed=args.seed or 0,
        output_dir=args.out,
        perturbation_sigma=args.sigma,
        workers=args.workers,
    )
    print(runner.format_table([r.report for r in records]))
    print(f"\ndevice: {runner.SYNTHETIC_LABEL}")
    bad = [r.report for r in records if not r.report.satisfies_triangle()]
    if bad:
        print(f"triangle inequality violated in {len(bad)} report(s)", file=sys.stderr)
        return 1
    return 0


def _load_hamiltonian(path: str) -> HermitianOperator:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read Hamiltonian file {path}: {exc}") from None
    if "real" in data:
        m = np.asarray(data["real"], dtype=complex)
        if "imag" in data:
            m = m + 1j * np.asarray(data["imag"], dtype=float)
    elif "matrix" in data:
        m = np.asarray(data["matrix"], dtype=complex)
    else:
        raise ValidationError("Hamiltonian file needs 'matrix' or 'real'/'imag' entries")
    return HermitianOperator.from_matrix(m)


def _cmd_decompose(args: argparse.Namespace) -> int:
    if (args.cycle is None) == (args.hamiltonian is None):
        raise ValidationError("give exactly one of a Hamiltonian file or --cycle N")
    h = cycle_walk_hamiltonian(args.cycle) if args.cycle is not None else _load_hamiltonian(args.hamiltonian)
    terms = pauli_decompose(h)
    if args.reps is not None:
        r = args.reps
    else:
        r = trotter_reps(terms, args.time, args.eps) if args.time > 0 else 1
    stats = circuit_stats(trotter_circuit(terms, args.time, r))
    out = json.loads(terms.to_json())
    out.update({"time": args.time, "reps": r, "circuit": vars(stats)})
    text = json.dumps(out, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    try:
        text = Path(args.circuit).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read circuit file: {exc}") from None
    stats = circuit_stats(parse_circuit(text))
    print(json.dumps(vars(stats)))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    record = runner.load_record(args.run_dir)
    runner.emit_plot_data(record, args.out or args.run_dir)
    print(runner.format_table([record.report]))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.architecture).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {args.architecture}: {exc}") from None
    problems = validate_architecture_dict(data)
    if not problems:
        load_architecture(args.architecture)
    for p in problems:
        print(p)
    if problems:
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="progbench", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment file")
    run.add_argument("experiment")
    run.add_argument("--seed", type=int)
    run.add_argument("--shots", type=int)
    run.add_argument("--machine", help="architecture file or shipped machine name")
    run.add_argument("--out", help="output directory")
    run.add_argument("--counts", help="device counts file to ingest")
    run.set_defaults(func=_cmd_run)

    suite = sub.add_parser("suite", help="run a preset over shipped machines")
    suite.add_argument("preset", nargs="?", default="table3")
    suite.add_argument("--machine", action="append", help="repeatable; default: bogota santiago casablanca")
    suite.add_argument("--seed", type=int)
    suite.add_argument("--shots", type=int)
    suite.add_argument("--out")
    suite.add_argument("--sigma", type=float, default=runner.DEFAULT_SIGMA, help="stand-in device drift")
    suite.add_argument("--workers", type=int, default=1)
    suite.set_defaults(func=_cmd_suite)

    dec = sub.add_parser("decompose", help="Pauli decomposition and Trotter repetitions")
    dec.add_argument("hamiltonian", nargs="?")
    dec.add_argument("--cycle", type=int, metavar="N")
    dec.add_argument("--time", type=float, required=True)
    group = dec.add_mutually_exclusive_group()
    group.add_argument("--eps", type=float, default=0.01)
    group.add_argument("--reps", type=int)
    dec.add_argument("--out")
    dec.set_defaults(func=_cmd_decompose)

    stats = sub.add_parser("stats", help="gate count, workspace and depth of a circuit file")
    stats.add_argument("circuit")
    stats.set_defaults(func=_cmd_stats)

    rep = sub.add_parser("report", help="re-render tables from a run directory")
    rep.add_argument("run_dir")
    rep.add_argument("--out")
    rep.set_defaults(func=_cmd_report)

    val = sub.add_parser("validate", help="check an architecture file against the schema")
    val.add_argument("architecture")
    val.set_defaults(func=_cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
