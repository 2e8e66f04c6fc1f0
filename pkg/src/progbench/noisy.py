"""Architecture-aware noisy simulation by exact density-matrix evolution.

Three error sources, applied in this order around every gate:

1. the ideal gate unitary;
2. a depolarizing channel with the calibrated gate error ``p_r`` of that gate
   kind on that qubit or coupler;
3. thermal relaxation (amplitude damping with T1, pure dephasing for the
   remainder of T2) on every operand for the gate's duration.

State preparation error ``p_m`` is a bit flip on each active qubit at the
start; measurement error ``p_s`` is a classical flip of each read-out bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from progbench.architecture import ArchitectureSpec, NoiseParameters, edge_key
from progbench.circuit import Circuit, Gate, GateKind, gate_matrix
from progbench.errors import SimulationCapError, ValidationError
from progbench.routing import route_tracked
from progbench.statevector import (
    OutcomeDistribution,
    apply_matrix,
    marginal,
    measure_distribution,
    split_measurements,
)

DEFAULT_MAX_QUBITS = 12
UNITARY_CHARGE_FACTOR = 1.0

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise ValidationError("Kraus operators must share one square shape")
        total = sum(k.conj().T @ k for k in ops)
        if not np.allclose(total, np.eye(dim), atol=1e-10):
            raise ValidationError(f"channel {self.label!r} is not trace preserving")
        object.__setattr__(self, "operators", ops)

    @property
    def num_qubits(self) -> int:
        return int(math.log2(self.operators[0].shape[0]))

    def is_identity(self) -> bool:
        return len(self.operators) == 1 and np.allclose(self.operators[0], np.eye(self.operators[0].shape[0]))


def depolarizing(p: float, arity: int = 1) -> KrausChannel:
    """Uniform Pauli channel: total weight ``p`` spread over the non-identity Paulis."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing probability {p} outside [0, 1]")
    if arity not in (1, 2):
        raise ValidationError("depolarizing arity must be 1 or 2")
    dim = 2**arity
    if p == 0:
        return KrausChannel((np.eye(dim, dtype=complex),), f"depolarizing{arity}(0)")
    others = dim * dim - 1
    ops = [math.sqrt(1 - p) * np.eye(dim, dtype=complex)] if p < 1 else []
    for word in itertools.product("IXYZ", repeat=arity):
        if set(word) == {"I"}:
            continue
        mat = np.array([[1.0 + 0j]])
        for ch in word:
            mat = np.kron(mat, _PAULI[ch])
        ops.append(math.sqrt(p / others) * mat)
    return KrausChannel(tuple(ops), f"depolarizing{arity}({p})")


def thermal_relaxation(t1: float, t2: float, duration: float) -> KrausChannel:
    """Amplitude damping followed by pure dephasing; all times in one unit.

    Off-diagonal elements decay by ``exp(-duration/T2)`` overall: the damping
    step contributes ``exp(-duration/(2*T1))`` and the dephasing step
    ``exp(-duration/T_phi)`` with ``1/T_phi = 1/T2 - 1/(2*T1)``.
    """
    if not (t1 > 0 and t2 > 0):
        raise ValidationError(f"relaxation times must be positive (T1={t1}, T2={t2})")
    if t2 > 2 * t1 * (1 + 1e-12):
        raise ValidationError(f"T2 = {t2} exceeds 2*T1 = {2 * t1}")
    if duration < 0:
        raise ValidationError("duration must be nonnegative")
    if duration == 0:
        return KrausChannel((np.eye(2, dtype=complex),), "relax(0)")
    gamma = -math.expm1(-duration / t1)
    inv_tphi = max(1 / t2 - 1 / (2 * t1), 0.0)
    lam = -math.expm1(-duration * inv_tphi)
    damp = [
        np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
        np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex),
    ]
    # phase flip with probability lam/2 scales coherences by (1 - lam)
    dephase = [math.sqrt(1 - lam / 2) * _PAULI["I"], math.sqrt(lam / 2) * _PAULI["Z"]]
    ops = tuple(d @ a for d in dephase for a in damp if np.any(d @ a))
    return KrausChannel(ops, f"relax(T1={t1}, T2={t2}, t={duration})")


class DensityMatrix:
    """Mixed state of ``num_qubits`` qubits, stored as a ``[2]*2n`` tensor.

    Ket axes come first; both halves use the big-endian reshape of the
    little-endian basis index, as in the statevector simulator.
    """

    def __init__(self, entries: np.ndarray, num_qubits: int):
        n = num_qubits
        self.num_qubits = n
        self._t = np.asarray(entries, dtype=complex).reshape((2,) * (2 * n))

    @classmethod
    def zero_state(cls, num_qubits: int) -> "DensityMatrix":
        t = np.zeros((2,) * (2 * num_qubits), dtype=complex)
        t[(0,) * (2 * num_qubits)] = 1.0
        return cls(t, num_qubits)

    @property
    def entries(self) -> np.ndarray:
        dim = 2**self.num_qubits
        return self._t.reshape(dim, dim)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diagonal(self.entries)).copy()

    def apply_unitary(self, mat: np.ndarray, qubits: Sequence[int]) -> None:
        n = self.num_qubits
        t = apply_matrix(self._t, mat, tuple(qubits), n)
        self._t = apply_matrix(t, mat.conj(), tuple(qubits), n, offset=n)

    def apply_channel(self, channel: KrausChannel, qubits: Sequence[int]) -> None:
        if channel.num_qubits != len(qubits):
            raise ValidationError(f"{channel.num_qubits}-qubit channel applied to {len(qubits)} qubits")
        if channel.is_identity():
            return
        n = self.num_qubits
        qubits = tuple(qubits)
        acc = np.zeros_like(self._t)
        for k in channel.operators:
            t = apply_matrix(self._t, k, qubits, n)
            acc += apply_matrix(t, k.conj(), qubits, n, offset=n)
        self._t = acc


def readout_confusion(probs: np.ndarray, flips: Mapping[int, float]) -> np.ndarray:
    """Flip classical bit ``c`` with probability ``flips[c]``, independently per bit."""
    probs = np.asarray(probs, dtype=float)
    idx = np.arange(len(probs))
    for cbit, p in flips.items():
        if p:
            probs = (1 - p) * probs + p * probs[idx ^ (1 << cbit)]
    return probs


def _gate_error(noise: NoiseParameters, g: Gate, charge: float) -> float:
    if g.kind is not GateKind.UNITARY:
        return noise.gate_error(g)
    table = (
        noise.gate_error_1q.get(g.operands[0], {})
        if g.num_qubits == 1
        else noise.gate_error_2q.get(edge_key(*g.operands), {})
    )
    if "unitary" in table:
        return table["unitary"]
    # aggregate charge: one application of the native entangler's error
    native = Gate(GateKind.CX, g.operands) if g.num_qubits == 2 else Gate(GateKind.X, g.operands)
    return min(1.0, charge * noise.gate_error(native))


def _relaxation(noise: NoiseParameters, q: int, duration_ns: float) -> KrausChannel | None:
    t1 = noise.t1.get(q, math.inf)
    t2 = noise.t2.get(q, min(2 * t1, math.inf))
    if duration_ns == 0 or (math.isinf(t1) and math.isinf(t2)):
        return None
    return thermal_relaxation(t1, t2, duration_ns * 1e-3)  # ns -> us


def evolve_density(
    c: Circuit,
    arch: ArchitectureSpec,
    active: Sequence[int],
    unitary_charge: float = UNITARY_CHARGE_FACTOR,
) -> tuple[DensityMatrix, dict[int, int]]:
    """Noisy evolution of a routed, physical-index circuit on its active qubits.

    Returns the pre-readout state over ``active`` (compact indices) and the
    ``clbit -> physical qubit`` measurement map.
    """
    noise = arch.noise
    compact = {p: i for i, p in enumerate(active)}
    body, measured = split_measurements(c)
    m = len(active)
    rho = DensityMatrix.zero_state(m)
    for p in active:
        pm = noise.prep_error.get(p, 0.0)
        if pm:
            rho.apply_channel(KrausChannel((math.sqrt(1 - pm) * _PAULI["I"], math.sqrt(pm) * _PAULI["X"])), (compact[p],))
    for g in body.gates:
        if g.kind is GateKind.RESET:
            raise ValidationError("reset is not supported by the noisy simulator")
        if g.kind is GateKind.UNITARY and g.num_qubits > 2:
            raise ValidationError("noisy mode accepts opaque unitaries of at most 2 qubits")
        local = tuple(compact[q] for q in g.operands)
        rho.apply_unitary(gate_matrix(g), local)
        p = _gate_error(noise, g, unitary_charge)
        if p:
            rho.apply_channel(depolarizing(p, g.num_qubits), local)
        duration = arch.duration_ns(g)
        for q in g.operands:
            relax = _relaxation(noise, q, duration)
            if relax is not None:
                rho.apply_channel(relax, (compact[q],))
    for q in sorted(set(measured.values())):
        relax = _relaxation(noise, q, arch.duration_ns(Gate(GateKind.MEASURE, (q,), classical_target=0)))
        if relax is not None:
            rho.apply_channel(relax, (compact[q],))
    return rho, measured


def run_noisy(
    c: Circuit,
    arch: ArchitectureSpec,
    layout: Mapping[int, int] | Sequence[int] | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    unitary_charge: float = UNITARY_CHARGE_FACTOR,
) -> OutcomeDistribution:
    """Exact output distribution of ``c`` on ``arch`` under its calibrated noise.

    The circuit is macro-expanded and routed first.  Only the physical qubits
    the routed circuit touches are simulated; the rest stay in ``|0>`` and are
    never read out.  A noise model with every rate zero and no relaxation
    reproduces the ideal distribution exactly.
    """
    routed, _ = route_tracked(c, arch, layout)
    active = sorted({q for g in routed.gates for q in g.operands})
    if len(active) > max_qubits:
        raise SimulationCapError(
            f"{len(active)} active qubits exceeds the density-matrix cap of {max_qubits}"
        )
    if arch.noise.is_trivial():
        return measure_distribution(c)
    rho, measured = evolve_density(routed, arch, active, unitary_charge)
    if not measured:
        raise ValidationError("circuit has no measurements")
    compact = {p: i for i, p in enumerate(active)}
    probs = marginal(
        np.clip(rho.diagonal(), 0.0, None),
        len(active),
        {cb: compact[q] for cb, q in measured.items()},
        c.num_clbits,
    )
    flips = {cb: arch.noise.meas_error.get(q, 0.0) for cb, q in measured.items()}
    probs = readout_confusion(probs, flips)
    return OutcomeDistribution.from_array(probs, c.num_clbits)
