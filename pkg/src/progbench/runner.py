"""End-to-end benchmarking runs.

One run: build the circuit, load the machine, obtain device counts (ingested,
or drawn from a synthetic stand-in device), simulate the calibrated noise model
and the ideal circuit exactly, then score the three distributions.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from progbench.algorithms import AlgorithmConfig, build, load_preset
from progbench.architecture import ArchitectureSpec, NoiseParameters, load_architecture
from progbench.errors import ValidationError
from progbench.metrics import BenchmarkReport, TABLE_COLUMNS, compute_benchmarks, counts_to_distribution
from progbench.noisy import run_noisy
from progbench.statevector import Counts, OutcomeDistribution, label_of, measure_distribution, sample

log = logging.getLogger(__name__)

DEFAULT_SHOTS = 100_000
DEFAULT_SIGMA = 0.2
DEFAULT_MACHINES = ("bogota", "santiago", "casablanca")
SYNTHETIC_LABEL = "synthetic stand-in device (log-normally perturbed noise model)"


@dataclass(frozen=True)
class ExperimentSpec:
    algorithm: AlgorithmConfig
    machine_file: str
    device_counts: str | None = None
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    layout: tuple[int, ...] | None = None
    output_dir: str | None = None
    perturbation_sigma: float = DEFAULT_SIGMA
    exact_device: bool = False  # stand-in device reports its exact distribution instead of sampling

    def __post_init__(self) -> None:
        if self.shots <= 0:
            raise ValidationError("shots must be positive")
        if self.perturbation_sigma < 0:
            raise ValidationError("perturbation sigma must be nonnegative")
        if self.layout is not None:
            object.__setattr__(self, "layout", tuple(int(p) for p in self.layout))

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm.to_dict(),
            "machine": self.machine_file,
            "device_counts": self.device_counts,
            "shots": self.shots,
            "seed": self.seed,
            "layout": list(self.layout) if self.layout is not None else None,
            "output_dir": self.output_dir,
            "perturbation_sigma": self.perturbation_sigma,
            "exact_device": self.exact_device,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: Path | None = None) -> "ExperimentSpec":
        data = dict(data)
        if "algorithm" not in data:
            raise ValidationError("experiment needs an 'algorithm' object")
        machine = data.get("machine", data.get("machine_file"))
        if machine is None:
            raise ValidationError("experiment needs a 'machine'")

        def resolve(p: str | None) -> str | None:
            if p is None or base_dir is None or Path(p).is_absolute():
                return p
            candidate = base_dir / p
            return str(candidate) if candidate.exists() else p

        layout = data.get("layout")
        if isinstance(layout, Mapping):
            layout = [layout[str(q)] if str(q) in layout else layout[q] for q in range(len(layout))]
        return cls(
            algorithm=AlgorithmConfig.from_dict(data["algorithm"]),
            machine_file=resolve(machine),
            device_counts=resolve(data.get("device_counts")),
            shots=int(data.get("shots", DEFAULT_SHOTS)),
            seed=int(data.get("seed", 0)),
            layout=layout,
            output_dir=data.get("output_dir"),
            perturbation_sigma=float(data.get("perturbation_sigma", DEFAULT_SIGMA)),
            exact_device=bool(data.get("exact_device", False)),
        )


def load_experiment(path: str | Path) -> ExperimentSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read experiment file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return ExperimentSpec.from_dict(data, base_dir=path.parent)


@dataclass
class RunRecord:
    spec: ExperimentSpec
    distributions: dict[str, OutcomeDistribution]
    report: BenchmarkReport
    wall_times: dict[str, float] = field(default_factory=dict)
    device_source: dict[str, Any] = field(default_factory=dict)
    device_counts: Counts | None = None

    def __post_init__(self) -> None:
        widths = {d.num_clbits for d in self.distributions.values()}
        if len(widths) > 1:
            raise ValidationError(f"distribution widths differ: {sorted(widths)}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "distributions": {
                k: {"num_clbits": d.num_clbits, "probs": dict(sorted(d.probs.items()))}
                for k, d in self.distributions.items()
            },
            "report": self.report.to_dict(),
            "wall_times": self.wall_times,
            "device_source": self.device_source,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunRecord":
        return cls(
            spec=ExperimentSpec.from_dict(data["spec"]),
            distributions={
                k: OutcomeDistribution(v["probs"], v["num_clbits"]) for k, v in data["distributions"].items()
            },
            report=BenchmarkReport.from_dict(data["report"]),
            wall_times=dict(data.get("wall_times", {})),
            device_source=dict(data.get("device_source", {})),
        )


def ingest_counts(path: str | Path) -> Counts:
    """Read a counts file: ``{"shots": N, "counts": {"0101": n, ...}, ...metadata}``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read counts file {path}: {exc}") from None
    return Counts.from_json(text)


def perturb_noise(noise: NoiseParameters, sigma: float, rng: np.random.Generator) -> NoiseParameters:
    """Multiply every noise parameter by an independent log-normal factor ``exp(sigma * N(0, 1))``.

    Probabilities are clipped to 1 and T2 to 2*T1 after scaling.
    """

    def scale(v: float) -> float:
        return v * math.exp(sigma * rng.standard_normal())

    def prob(v: float) -> float:
        return min(1.0, scale(v))

    one_q = {q: {k: prob(p) for k, p in sorted(t.items())} for q, t in sorted(noise.gate_error_1q.items())}
    two_q = {e: {k: prob(p) for k, p in sorted(t.items())} for e, t in sorted(noise.gate_error_2q.items())}
    prep = {q: prob(p) for q, p in sorted(noise.prep_error.items())}
    meas = {q: prob(p) for q, p in sorted(noise.meas_error.items())}
    t1 = {q: scale(t) for q, t in sorted(noise.t1.items())}
    t2 = {q: min(scale(t), 2 * t1.get(q, math.inf)) for q, t in sorted(noise.t2.items())}
    return NoiseParameters(one_q, two_q, prep, meas, t1, t2)


def _seeds(seed: int) -> tuple[int, int]:
    perturb, shots = np.random.SeedSequence(seed).generate_state(2)
    return int(perturb), int(shots)


def run_experiment(spec: ExperimentSpec, arch: ArchitectureSpec | None = None, write: bool = True) -> RunRecord:
    times: dict[str, float] = {}

    def timed(stage: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        times[stage] = time.perf_counter() - t0
        return out

    circuit = timed("build", build, spec.algorithm)
    if arch is None:
        arch = timed("load_machine", load_architecture, spec.machine_file)
    layout = list(spec.layout) if spec.layout is not None else None
    if circuit.num_qubits > arch.num_qubits:
        raise ValidationError(
            f"{spec.algorithm.name} needs {circuit.num_qubits} qubits, {arch.name} has {arch.num_qubits}"
        )

    if spec.device_counts is not None:
        counts = timed("device", ingest_counts, spec.device_counts)
        if counts.num_clbits != circuit.num_clbits:
            raise ValidationError(
                f"width mismatch: counts have {counts.num_clbits} bits, circuit measures {circuit.num_clbits}"
            )
        device = counts_to_distribution(counts)
        source = {"kind": "ingested", "path": str(spec.device_counts), **counts.metadata}
        shots = counts.shots
    else:
        perturb_seed, shot_seed = _seeds(spec.seed)
        drifted = perturb_noise(arch.noise, spec.perturbation_sigma, np.random.default_rng(perturb_seed))
        t0 = time.perf_counter()
        exact = run_noisy(circuit, arch.with_noise(drifted), layout)
        if spec.exact_device:
            counts = None
            device = exact
        else:
            counts = sample(exact, spec.shots, shot_seed, machine=f"{arch.name} (synthetic)", synthetic=True)
            device = counts_to_distribution(counts)
        times["device"] = time.perf_counter() - t0
        source = {"kind": "synthetic", "description": SYNTHETIC_LABEL, "sigma": spec.perturbation_sigma}
        shots = spec.shots

    noisy = timed("noisy", run_noisy, circuit, arch, layout)
    ideal = timed("ideal", measure_distribution, circuit)
    report = timed(
        "benchmarks",
        compute_benchmarks,
        device,
        noisy,
        ideal,
        machine=arch.name,
        algorithm=spec.algorithm.name,
        shots=shots,
    )
    record = RunRecord(
        spec=spec,
        distributions={"device": device, "noisy": noisy, "ideal": ideal},
        report=report,
        wall_times=times,
        device_source=source,
        device_counts=counts,
    )
    if write and spec.output_dir:
        write_record(record, spec.output_dir)
    return record


# ---------------------------------------------------------------------------
# artifacts


def write_record(record: RunRecord, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    body = record.to_dict()
    body["written_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    paths = [out / "record.json", out / "report.json"]
    paths[0].write_text(json.dumps(body, indent=2) + "\n")
    paths[1].write_text(record.report.to_json() + "\n")
    if record.device_counts is not None:
        record.device_counts.save(out / "device_counts.json")
        paths.append(out / "device_counts.json")
    paths += emit_plot_data(record, out)
    return paths


_COMPARISONS = {
    "device_vs_ideal": ("device", "ideal"),
    "device_vs_noisy": ("device", "noisy"),
    "noisy_vs_ideal": ("noisy", "ideal"),
}


def emit_plot_data(record: RunRecord, out_dir: str | Path) -> list[Path]:
    """Per-comparison probability tables plus a benchmarks summary, as CSV.

    Every table lists all ``2**width`` states by decimal label.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dists = record.distributions
    width = next(iter(dists.values())).num_clbits
    paths = []
    for name, (a, b) in _COMPARISONS.items():
        path = out / f"{name}.csv"
        with path.open("w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["state", "bits", f"p_{a}", f"p_{b}"])
            for s in range(2**width):
                w.writerow([s, label_of(s, width), repr(dists[a].prob_of_state(s)), repr(dists[b].prob_of_state(s))])
        paths.append(path)
    path = out / "distributions.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["state", "bits", "p_device", "p_noisy", "p_ideal"])
        for s in range(2**width):
            w.writerow([s, label_of(s, width), *(repr(dists[k].prob_of_state(s)) for k in ("device", "noisy", "ideal"))])
    paths.append(path)
    r = record.report
    path = out / "benchmarks.csv"
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["machine", "algorithm", "metric", "value"])
        for metric in ("alpha", "beta", "gamma"):
            w.writerow([r.machine, r.algorithm, metric, repr(getattr(r, metric))])
    paths.append(path)
    return paths


def write_table(reports: Sequence[BenchmarkReport], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TABLE_COLUMNS)
        for r in reports:
            w.writerow(r.row(digits=6))
    return path


def format_table(reports: Sequence[BenchmarkReport]) -> str:
    header = ["machine", "algorithm", "alpha", "beta", "gamma", "|a-g|", "estimation", "confidence", "shots"]
    rows = [header] + [r.row() for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(wd) for cell, wd in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * wd for wd in widths))
    return "\n".join(lines)


def load_record(run_dir: str | Path) -> RunRecord:
    path = Path(run_dir) / "record.json"
    try:
        return RunRecord.from_dict(json.loads(path.read_text()))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    except (KeyError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path} is not a run record ({exc})") from None


# ---------------------------------------------------------------------------
# suites


def _experiment_seed(seed: int, machine: str, algorithm: str) -> int:
    return int(np.random.SeedSequence([seed, zlib.crc32(f"{machine}/{algorithm}".encode())]).generate_state(1)[0])


def run_suite(
    preset: str = "table3",
    machines: Sequence[str] = DEFAULT_MACHINES,
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
    output_dir: str | Path | None = None,
    perturbation_sigma: float = DEFAULT_SIGMA,
    workers: int = 1,
) -> list[RunRecord]:
    """Every preset configuration on every machine wide enough to hold it."""
    configs = load_preset(preset)
    jobs: list[tuple[ExperimentSpec, ArchitectureSpec]] = []
    for machine in machines:
        arch = load_architecture(machine)
        for cfg in configs:
            width = build(cfg).num_qubits
            if width > arch.num_qubits:
                log.info("skipping %s on %s: needs %d qubits", cfg.name, arch.name, width)
                continue
            sub = None
            if output_dir is not None:
                sub = str(Path(output_dir) / arch.name / cfg.name)
            spec = ExperimentSpec(
                algorithm=cfg,
                machine_file=machine,
                shots=shots,
                seed=_experiment_seed(seed, arch.name, cfg.name),
                output_dir=sub,
                perturbation_sigma=perturbation_sigma,
            )
            jobs.append((spec, arch))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: run_experiment(*job), jobs))
    else:
        records = [run_experiment(spec, arch) for spec, arch in jobs]
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_table([r.report for r in records], out / "table.csv")
        (out / "table.txt").write_text(format_table([r.report for r in records]) + "\n")
    return records


def with_overrides(spec: ExperimentSpec, **overrides: Any) -> ExperimentSpec:
    return replace(spec, **{k: v for k, v in overrides.items() if v is not None})
