import math

import numpy as np
import pytest

from progbench.circuit import Circuit, Gate, GateKind, ONE_QUBIT, PARAMETERIZED
from progbench.architecture import ArchitectureSpec, NoiseParameters

from oracles import random_unitary


def random_circuit(rng: np.random.Generator, n: int, depth: int, macros: bool = True, unitaries: bool = True) -> Circuit:
    """Random gate sequence over every kind the simulators support, then measure all."""
    kinds = list(ONE_QUBIT)
    if n >= 2:
        kinds += [GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.SWAP]
        if unitaries:
            kinds.append(GateKind.UNITARY)
    if n >= 3 and macros:
        kinds += [GateKind.CCX, GateKind.MCX]
    gates = []
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ONE_QUBIT:
            arity = 1
        elif kind is GateKind.CCX:
            arity = 3
        elif kind is GateKind.MCX:
            arity = int(rng.integers(2, n + 1))
        elif kind is GateKind.UNITARY:
            arity = int(rng.integers(1, min(n, 3) + 1))
        else:
            arity = 2
        ops = tuple(int(q) for q in rng.permutation(n)[:arity])
        angle = float(rng.uniform(-2 * math.pi, 2 * math.pi)) if kind in PARAMETERIZED else None
        matrix = random_unitary(2**arity, rng) if kind is GateKind.UNITARY else None
        gates.append(Gate(kind, ops, angle=angle, matrix=matrix))
    gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in range(n)]
    return Circuit(n, n, tuple(gates))


@pytest.fixture
def rng():
    return np.random.default_rng(20210518)


def uniform_noise(num_qubits: int, edges, p1=0.0, p2=0.0, prep=0.0, meas=0.0, t1=math.inf, t2=math.inf) -> NoiseParameters:
    return NoiseParameters(
        gate_error_1q={q: {"*": p1} for q in range(num_qubits)},
        gate_error_2q={tuple(sorted(e)): {"*": p2} for e in edges},
        prep_error={q: prep for q in range(num_qubits)},
        meas_error={q: meas for q in range(num_qubits)},
        t1={q: t1 for q in range(num_qubits)},
        t2={q: t2 for q in range(num_qubits)},
    )


def all_to_all(num_qubits: int, **noise) -> ArchitectureSpec:
    edges = [(a, b) for a in range(num_qubits) for b in range(a + 1, num_qubits)]
    return ArchitectureSpec("test", num_qubits, frozenset(edges), uniform_noise(num_qubits, edges, **noise))
