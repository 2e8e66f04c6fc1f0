import json
import math

import numpy as np
import pytest

from progbench.algorithms import build_ctqw_exact, build_dtqw
from progbench.circuit import Circuit, Gate, GateKind
from progbench.errors import SimulationCapError, ValidationError
from progbench.statevector import (
    Counts,
    OutcomeDistribution,
    StateVector,
    apply_gate,
    exact_counts,
    measure_distribution,
    run_ideal,
    sample,
)

from conftest import random_circuit
from oracles import ideal_distribution

H, CX = GateKind.H, GateKind.CX
R2 = 1 / math.sqrt(2)


def bell(measure=True):
    gates = [Gate(H, (0,)), Gate(CX, (0, 1))]
    if measure:
        gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in range(2)]
    return Circuit(2, 2 if measure else 0, tuple(gates))


def test_empty_circuit_amplitudes():
    assert np.allclose(run_ideal(Circuit(1)).amplitudes, [1, 0])


def test_hadamard_amplitudes():
    assert np.allclose(run_ideal(Circuit(1, 0, (Gate(H, (0,)),))).amplitudes, [R2, R2], atol=1e-15)


def test_bell_amplitudes():
    assert np.allclose(run_ideal(bell(False)).amplitudes, [R2, 0, 0, R2], atol=1e-15)


def test_bell_distribution():
    assert measure_distribution(bell()).probs == pytest.approx({"00": 0.5, "11": 0.5}, abs=1e-12)


def test_dtqw_distribution():
    assert measure_distribution(build_dtqw(2, 1)).probs == pytest.approx({"01": 0.5, "11": 0.5}, abs=1e-12)


def test_ctqw_position_two():
    d = measure_distribution(build_ctqw_exact(2, 3.0))
    assert d.prob_of_state(2) == pytest.approx(((math.cos(3) - 1) / 2) ** 2, abs=1e-12)


def test_norm_preserved_after_every_gate(rng):
    for _ in range(10):
        c = random_circuit(rng, 4, 30)
        psi = np.zeros(16, dtype=complex)
        psi[0] = 1
        for g in c.gates:
            if g.kind is GateKind.MEASURE:
                continue
            psi = apply_gate(psi, g, 4)
            assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_matches_dense_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        c = random_circuit(rng, n, int(rng.integers(1, 15)))
        got = measure_distribution(c).as_array()
        assert abs(got.sum() - 1) < 1e-9
        assert np.max(np.abs(got - ideal_distribution(c))) < 1e-10


def test_partial_measurement_marginalizes():
    c = Circuit(2, 1, (Gate(H, (0,)), Gate(CX, (0, 1)), Gate(GateKind.MEASURE, (1,), classical_target=0)))
    assert measure_distribution(c).probs == pytest.approx({"0": 0.5, "1": 0.5})


def test_mid_circuit_measurement_rejected():
    c = Circuit(1, 1, (Gate(GateKind.MEASURE, (0,), classical_target=0), Gate(H, (0,))))
    with pytest.raises(ValidationError):
        measure_distribution(c)


def test_qubit_cap():
    with pytest.raises(SimulationCapError):
        run_ideal(Circuit(5, 0, (Gate(H, (4,)),)), max_qubits=4)


def test_statevector_rejects_unnormalized():
    with pytest.raises(ValidationError):
        StateVector(np.array([1.0, 1.0], dtype=complex), 1)


def test_distribution_validation():
    with pytest.raises(ValidationError):
        OutcomeDistribution({"0": 0.5}, 1)
    with pytest.raises(ValidationError):
        OutcomeDistribution({"012": 1.0}, 3)


def test_sample_point_mass():
    c = sample(OutcomeDistribution({"01": 1.0}, 2), 100, seed=1)
    assert c.counts == {"01": 100} and c.shots == 100


@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_sample_binomial_concentration(seed):
    c = sample(OutcomeDistribution({"0": 0.5, "1": 0.5}, 1), 100_000, seed=seed)
    sigma = math.sqrt(100_000 * 0.25)
    assert abs(c.counts["0"] - 50_000) < 5 * sigma
    assert c.counts["0"] + c.counts["1"] == 100_000


def test_sample_deterministic():
    d = measure_distribution(build_dtqw(2, 1))
    assert sample(d, 1000, seed=7).counts == sample(d, 1000, seed=7).counts


def test_exact_counts_sum():
    d = measure_distribution(build_ctqw_exact(2, 3.0))
    c = exact_counts(d, 1001)
    assert sum(c.counts.values()) == 1001


def test_counts_file_round_trip(tmp_path):
    c = sample(measure_distribution(bell()), 500, seed=3, machine="test")
    path = tmp_path / "counts.json"
    c.save(path)
    back = Counts.from_json(path.read_text())
    assert back.counts == c.counts and back.shots == 500 and back.metadata["machine"] == "test"


def test_counts_shots_mismatch():
    with pytest.raises(ValidationError, match="shots mismatch"):
        Counts.from_json(json.dumps({"shots": 5, "counts": {"00": 1, "11": 3}}))
