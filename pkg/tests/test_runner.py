import csv
import json
import math

import numpy as np
import pytest

from progbench.algorithms import AlgorithmConfig, build, load_preset
from progbench.architecture import load_architecture
from progbench.errors import ValidationError
from progbench.metrics import compute_benchmarks
from progbench.noisy import run_noisy
from progbench.runner import (
    ExperimentSpec,
    RunRecord,
    emit_plot_data,
    ingest_counts,
    load_experiment,
    load_record,
    perturb_noise,
    run_experiment,
    run_suite,
)
from progbench.statevector import OutcomeDistribution, exact_counts

DTQW = AlgorithmConfig.from_dict({"kind": "DTQW", "state_qubits": 2, "steps": 1})
QPE = AlgorithmConfig.from_dict({"kind": "QPE", "state_qubits": 3, "phase_radians": 2 * math.pi / 3})


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_degenerate_chain(tmp_path):
    arch = load_architecture("bogota")
    noisy = run_noisy(build(QPE), arch)
    counts = exact_counts(noisy, 10**14)
    counts.save(tmp_path / "counts.json")
    spec = ExperimentSpec(QPE, "bogota", device_counts=str(tmp_path / "counts.json"))
    rep = run_experiment(spec).report
    assert rep.beta < 1e-6
    assert abs(rep.alpha - rep.gamma) < 1e-6


@pytest.mark.parametrize("cfg", load_preset("table3"), ids=lambda c: c.name)
def test_noiseless_machine(cfg):
    shots = 100_000
    rep = run_experiment(ExperimentSpec(cfg, "noiseless", shots=shots, seed=3)).report
    assert rep.gamma == 0.0
    assert rep.alpha == rep.beta
    assert rep.alpha <= 3 / math.sqrt(shots)


def test_dtqw_on_bogota_satisfies_triangle():
    rep = run_experiment(ExperimentSpec(DTQW, "bogota", seed=11)).report
    assert rep.satisfies_triangle()
    assert all(0.0 <= v <= 1.0 for v in (rep.alpha, rep.beta, rep.gamma))


def test_determinism():
    spec = ExperimentSpec(QPE, "santiago", shots=5000, seed=42)
    a, b = run_experiment(spec), run_experiment(spec)
    assert a.distributions == b.distributions
    assert a.report == b.report
    c = run_experiment(ExperimentSpec(QPE, "santiago", shots=5000, seed=43))
    assert c.distributions["device"] != a.distributions["device"]


def test_stand_in_coherence():
    spec = ExperimentSpec(QPE, "casablanca", perturbation_sigma=0.0, exact_device=True)
    rep = run_experiment(spec).report
    assert rep.beta == 0.0 and rep.alpha == rep.gamma


def test_perturbation_respects_bounds():
    noise = load_architecture("casablanca").noise
    for seed in range(20):
        out = perturb_noise(noise, 2.0, np.random.default_rng(seed))
        for q, t2 in out.t2.items():
            assert t2 <= 2 * out.t1[q] + 1e-9
        assert all(0 <= p <= 1 for p in out.meas_error.values())


def test_ingest_counts_examples(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"shots": 4, "counts": {"00": 1, "11": 3}}))
    c = ingest_counts(path)
    assert c.shots == 4 and c.counts == {"00": 1, "11": 3}
    path.write_text(json.dumps({"shots": 5, "counts": {"00": 1, "11": 3}}))
    with pytest.raises(ValidationError, match="shots mismatch"):
        ingest_counts(path)
    with pytest.raises(ValidationError):
        ingest_counts(tmp_path / "missing.json")


def test_ingest_large_round_trip(tmp_path):
    dist = OutcomeDistribution({"000": 0.3, "011": 0.6875, "111": 0.0125}, 3)
    original = exact_counts(dist, 100_000, machine="exported")
    original.save(tmp_path / "c.json")
    back = ingest_counts(tmp_path / "c.json")
    assert back.counts == original.counts and back.shots == 100_000


def test_width_mismatch_counts(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"shots": 2, "counts": {"0": 1, "1": 1}}))
    with pytest.raises(ValidationError, match="width"):
        run_experiment(ExperimentSpec(DTQW, "bogota", device_counts=str(tmp_path / "c.json")))


def test_bell_plot_rows(tmp_path):
    bell = OutcomeDistribution({"00": 0.5, "11": 0.5}, 2)
    rep = compute_benchmarks(bell, bell, bell)
    record = RunRecord(ExperimentSpec(DTQW, "noiseless"), {"device": bell, "noisy": bell, "ideal": bell}, rep)
    emit_plot_data(record, tmp_path)
    rows = read_csv(tmp_path / "device_vs_ideal.csv")
    assert len(rows) == 4
    assert sum(float(r["p_ideal"]) > 0 for r in rows) == 2


def test_dtqw_record_artifacts(tmp_path):
    out = tmp_path / "run"
    run_experiment(ExperimentSpec(DTQW, "bogota", shots=2000, output_dir=str(out)))
    for name in ("record.json", "report.json", "device_counts.json", "noisy_vs_ideal.csv", "device_vs_noisy.csv"):
        assert (out / name).exists()
    rows = read_csv(out / "noisy_vs_ideal.csv")
    assert [float(r["p_ideal"]) for r in rows] == pytest.approx([0, 0.5, 0, 0.5], abs=1e-12)
    record = load_record(out)
    assert record.report.to_dict() == json.loads((out / "report.json").read_text())
    assert json.loads((out / "device_counts.json").read_text())["synthetic"] is True


def test_experiment_file(tmp_path):
    (tmp_path / "exp.json").write_text(
        json.dumps({"algorithm": {"kind": "QSn", "state_qubits": 4, "marked": 10, "iterations": 3}, "machine": "bogota", "shots": 100, "seed": 5})
    )
    spec = load_experiment(tmp_path / "exp.json")
    assert spec.shots == 100 and spec.algorithm.marked_item == 10
    assert ExperimentSpec.from_dict(spec.to_dict()) == spec


def test_experiment_file_errors(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ValidationError):
        load_experiment(tmp_path / "bad.json")
    with pytest.raises(ValidationError):
        ExperimentSpec.from_dict({"machine": "bogota"})
    with pytest.raises(ValidationError):
        ExperimentSpec(DTQW, "bogota", shots=0)


def test_too_narrow_machine():
    qsa = AlgorithmConfig.from_dict({"kind": "QSa", "state_qubits": 4, "marked": 10, "iterations": 3})
    with pytest.raises(ValidationError):
        run_experiment(ExperimentSpec(qsa, "bogota"))


def test_small_suite(tmp_path):
    records = run_suite("table3", machines=["bogota"], shots=2000, seed=1, output_dir=tmp_path)
    assert {r.report.algorithm for r in records} == {"DTQW", "CTQW", "PD", "QPE", "QSn"}
    assert all(r.report.satisfies_triangle() for r in records)
    assert (tmp_path / "table.csv").exists() and (tmp_path / "bogota" / "QPE" / "record.json").exists()
