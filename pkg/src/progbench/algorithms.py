"""Benchmark circuit builders and their closed-form success probabilities."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Any, Mapping

import numpy as np

from progbench.circuit import Circuit, Gate, GateKind, mcz_gates
from progbench.errors import ValidationError
from progbench.hamiltonian import (
    cycle_walk_hamiltonian,
    exact_evolution,
    pauli_decompose,
    trotter_circuit,
    trotter_reps,
)

DEFAULT_TROTTER_EPS = 0.01


class AlgorithmKind(str, enum.Enum):
    DTQW = "DTQW"
    CTQW = "CTQW"
    PD = "PD"
    QPE = "QPE"
    QSA = "QSa"
    QSN = "QSn"


@dataclass(frozen=True)
class AlgorithmConfig:
    """One benchmark configuration.

    ``state_qubits`` is the position register (walks), the counting register
    (QPE) or the search register (QS).  ``phase`` is a fraction of a full turn,
    so a phase angle of 2*pi/3 is stored as 1/3.
    """

    kind: AlgorithmKind
    state_qubits: int
    steps_or_time: float | int | None = None
    phase: float | None = None
    marked_item: int | None = None
    iterations: int | None = None
    trotter_r: int | None = None

    def __post_init__(self) -> None:
        try:
            kind = AlgorithmKind(self.kind)
        except ValueError:
            raise ValidationError(f"unknown algorithm kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if self.state_qubits < 1:
            raise ValidationError("state_qubits must be >= 1")
        uses = {
            AlgorithmKind.DTQW: {"steps_or_time"},
            AlgorithmKind.CTQW: {"steps_or_time"},
            AlgorithmKind.PD: {"steps_or_time", "trotter_r"},
            AlgorithmKind.QPE: {"phase"},
            AlgorithmKind.QSA: {"marked_item", "iterations"},
            AlgorithmKind.QSN: {"marked_item", "iterations"},
        }[kind]
        optional = {"trotter_r"}
        for name in ("steps_or_time", "phase", "marked_item", "iterations", "trotter_r"):
            present = getattr(self, name) is not None
            if present and name not in uses:
                raise ValidationError(f"{kind.value} does not take {name!r}")
            if not present and name in uses and name not in optional:
                raise ValidationError(f"{kind.value} requires {name!r}")
        if kind is AlgorithmKind.DTQW and (int(self.steps_or_time) != self.steps_or_time or self.steps_or_time < 1):
            raise ValidationError("DTQW steps must be a positive integer")
        if kind in (AlgorithmKind.CTQW, AlgorithmKind.PD) and self.steps_or_time < 0:
            raise ValidationError("evolution time must be nonnegative")
        if kind is AlgorithmKind.PD and self.trotter_r is not None and self.trotter_r < 1:
            raise ValidationError("trotter_r must be >= 1")
        if kind is AlgorithmKind.QPE and not 0 <= self.phase < 1:
            raise ValidationError("QPE phase fraction must lie in [0, 1)")
        if kind in (AlgorithmKind.QSA, AlgorithmKind.QSN):
            if not 0 <= self.marked_item < 2**self.state_qubits:
                raise ValidationError(f"marked item {self.marked_item} outside the search space")
            if self.iterations < 0:
                raise ValidationError("iterations must be >= 0")

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AlgorithmConfig":
        data = dict(data)
        if "phase_radians" in data:
            if "phase" in data:
                raise ValidationError("give either phase or phase_radians, not both")
            data["phase"] = (data.pop("phase_radians") / (2 * math.pi)) % 1.0
        for alias, key in (("time", "steps_or_time"), ("steps", "steps_or_time"), ("marked", "marked_item")):
            if alias in data:
                data[key] = data.pop(alias)
        known = {"kind", "state_qubits", "steps_or_time", "phase", "marked_item", "iterations", "trotter_r"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown algorithm fields {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["kind"] = self.kind.value
        return {k: v for k, v in out.items() if v is not None}


def load_preset(name: str) -> list[AlgorithmConfig]:
    try:
        text = resources.files("progbench.data.presets").joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        raise ValidationError(f"unknown preset {name!r}") from None
    return [AlgorithmConfig.from_dict(d) for d in json.loads(text)["experiments"]]


# ---------------------------------------------------------------------------
# quantum walks


def _controlled_increment(position: list[int], control: int) -> list[Gate]:
    """Add 1 mod 2**k to ``position`` when ``control`` is set, via an inverter cascade."""
    gates = []
    for j in reversed(range(len(position))):
        ops = (control, *position[:j], position[j])
        kind = {2: GateKind.CX, 3: GateKind.CCX}.get(len(ops), GateKind.MCX)
        gates.append(Gate(kind, ops))
    return gates


def build_dtqw(position_qubits: int, steps: int) -> Circuit:
    """Coined walk on the ``2**position_qubits``-cycle from position 0, coin last.

    Coin 1 moves the walker up, coin 0 moves it down.  Decrement is the
    increment conjugated by X on every position qubit.  Only the position
    register is measured.
    """
    if position_qubits < 1 or steps < 1:
        raise ValidationError("DTQW needs position_qubits >= 1 and steps >= 1")
    pos = list(range(position_qubits))
    coin = position_qubits
    flip_pos = [Gate(GateKind.X, (q,)) for q in pos]
    flip_coin = Gate(GateKind.X, (coin,))
    gates: list[Gate] = []
    for _ in range(steps):
        gates.append(Gate(GateKind.H, (coin,)))
        gates += _controlled_increment(pos, coin)
        gates += [flip_coin, *flip_pos, *_controlled_increment(pos, coin), *flip_pos, flip_coin]
    gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in pos]
    return Circuit(position_qubits + 1, position_qubits, tuple(gates), label=f"DTQW(steps={steps})")


def build_ctqw_exact(position_qubits: int, t: float) -> Circuit:
    """Continuous-time walk as one opaque unitary on the position register."""
    if position_qubits < 1:
        raise ValidationError("CTQW needs position_qubits >= 1")
    u = exact_evolution(cycle_walk_hamiltonian(2**position_qubits), t)
    pos = tuple(range(position_qubits))
    gates = [Gate(GateKind.UNITARY, pos, matrix=u, name=f"exp(-iHt), t={t}")]
    gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in pos]
    return Circuit(position_qubits, position_qubits, tuple(gates), label=f"CTQW(t={t})")


def build_pd(position_qubits: int, t: float, r: int | None = None, eps: float = DEFAULT_TROTTER_EPS) -> Circuit:
    """Continuous-time walk through a product formula over its Pauli decomposition.

    ``r`` defaults to the repetition bound for error ``eps``.
    """
    terms = pauli_decompose(cycle_walk_hamiltonian(2**position_qubits))
    if r is None:
        r = trotter_reps(terms, t, eps) if t > 0 else 1
    body = trotter_circuit(terms, t, r)
    pos = tuple(range(position_qubits))
    gates = body.gates + tuple(Gate(GateKind.MEASURE, (q,), classical_target=q) for q in pos)
    return Circuit(position_qubits, position_qubits, gates, label=f"PD(t={t}, r={r})")


# ---------------------------------------------------------------------------
# phase estimation


def qft_gates(qubits: list[int], inverse: bool = False) -> list[Gate]:
    """QFT on ``qubits`` (index 0 least significant), ending in the bit-reversal swaps."""
    gates: list[Gate] = []
    m = len(qubits)
    for j in reversed(range(m)):
        gates.append(Gate(GateKind.H, (qubits[j],)))
        for k in reversed(range(j)):
            gates.append(Gate(GateKind.CP, (qubits[k], qubits[j]), angle=math.pi / 2 ** (j - k)))
    gates += [Gate(GateKind.SWAP, (qubits[j], qubits[m - 1 - j])) for j in range(m // 2)]
    if inverse:
        gates = [
            Gate(g.kind, g.operands, angle=-g.angle) if g.angle is not None else g
            for g in reversed(gates)
        ]
    return gates


def build_qpe(counting_qubits: int, theta: float) -> Circuit:
    """Estimate the phase of the one-qubit phase gate ``diag(1, exp(2*pi*i*theta))``.

    The eigenstate ``|1>`` lives on the qubit after the counting register.
    """
    if counting_qubits < 1:
        raise ValidationError("QPE needs at least one counting qubit")
    count = list(range(counting_qubits))
    eigen = counting_qubits
    gates = [Gate(GateKind.X, (eigen,))]
    gates += [Gate(GateKind.H, (q,)) for q in count]
    for j in count:
        angle = (2 * math.pi * theta * 2**j) % (2 * math.pi)
        gates.append(Gate(GateKind.CP, (j, eigen), angle=angle))
    gates += qft_gates(count, inverse=True)
    gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in count]
    return Circuit(counting_qubits + 1, counting_qubits, tuple(gates), label=f"QPE(theta={theta})")


# ---------------------------------------------------------------------------
# search


def mcz_with_ancillas(qubits: list[int], ancillas: list[int]) -> list[Gate]:
    """Multi-controlled Z through a Toffoli V-chain computed into clean ancillas."""
    n = len(qubits)
    if n <= 2 or not ancillas:
        return mcz_gates(qubits)
    if len(ancillas) < n - 2:
        raise ValidationError(f"{n}-qubit MCZ needs {n - 2} ancillas")
    compute = [Gate(GateKind.CCX, (qubits[0], qubits[1], ancillas[0]))]
    for i in range(2, n - 1):
        compute.append(Gate(GateKind.CCX, (qubits[i], ancillas[i - 2], ancillas[i - 1])))
    return compute + [Gate(GateKind.CZ, (ancillas[n - 3], qubits[-1]))] + compute[::-1]


def build_grover(n: int, marked: int, iterations: int, use_ancilla: bool = False) -> Circuit:
    """Grover search for ``marked`` over ``n`` qubits (qubit j holds bit j of the item)."""
    if not 0 <= marked < 2**n:
        raise ValidationError(f"marked item {marked} outside 0..{2**n - 1}")
    if iterations < 0:
        raise ValidationError("iterations must be >= 0")
    reg = list(range(n))
    ancillas = list(range(n, n + n - 2)) if use_ancilla and n > 2 else []

    def mcz() -> list[Gate]:
        return mcz_with_ancillas(reg, ancillas) if ancillas else mcz_gates(reg)

    zeros = [Gate(GateKind.X, (q,)) for q in reg if not marked >> q & 1]
    all_x = [Gate(GateKind.X, (q,)) for q in reg]
    all_h = [Gate(GateKind.H, (q,)) for q in reg]
    gates = list(all_h)
    for _ in range(iterations):
        gates += zeros + mcz() + zeros
        gates += all_h + all_x + mcz() + all_x + all_h
    gates += [Gate(GateKind.MEASURE, (q,), classical_target=q) for q in reg]
    tag = "QSa" if ancillas else "QSn"
    return Circuit(n + len(ancillas), n, tuple(gates), label=f"{tag}(marked={marked}, k={iterations})")


# ---------------------------------------------------------------------------


def build(config: AlgorithmConfig) -> Circuit:
    k = config.kind
    if k is AlgorithmKind.DTQW:
        return build_dtqw(config.state_qubits, int(config.steps_or_time))
    if k is AlgorithmKind.CTQW:
        return build_ctqw_exact(config.state_qubits, float(config.steps_or_time))
    if k is AlgorithmKind.PD:
        return build_pd(config.state_qubits, float(config.steps_or_time), config.trotter_r)
    if k is AlgorithmKind.QPE:
        return build_qpe(config.state_qubits, config.phase)
    return build_grover(config.state_qubits, config.marked_item, config.iterations, k is AlgorithmKind.QSA)


def _walk_distribution(position_qubits: int, steps: int) -> np.ndarray:
    """Coined walk computed directly on (position, coin) amplitudes."""
    size = 2**position_qubits
    amp = np.zeros((size, 2), dtype=complex)
    amp[0, 0] = 1.0
    s = 1 / math.sqrt(2)
    for _ in range(steps):
        up = s * (amp[:, 0] - amp[:, 1])
        down = s * (amp[:, 0] + amp[:, 1])
        amp = np.stack([np.roll(down, -1), np.roll(up, 1)], axis=1)
    return np.sum(np.abs(amp) ** 2, axis=1)


def ctqw_probabilities(num_nodes: int, t: float) -> np.ndarray:
    """Cycle walk from node 0: amplitude at m is the mean over k of exp(-i t cos(2 pi k/N) + 2 pi i k m/N)."""
    ks = np.arange(num_nodes)
    phases = np.exp(-1j * t * np.cos(2 * np.pi * ks / num_nodes))
    amps = np.array([np.mean(phases * np.exp(2j * np.pi * ks * m / num_nodes)) for m in range(num_nodes)])
    return np.abs(amps) ** 2


def qpe_success(counting_qubits: int, theta: float) -> tuple[int, float]:
    size = 2**counting_qubits
    best = round(theta * size) % size
    delta = theta - best / size
    delta -= round(delta)
    if abs(math.sin(math.pi * delta)) < 1e-15:
        return best, 1.0
    p = math.sin(size * math.pi * delta) ** 2 / (size**2 * math.sin(math.pi * delta) ** 2)
    return best, p


def grover_success(n: int, iterations: int) -> float:
    return math.sin((2 * iterations + 1) * math.asin(2 ** (-n / 2))) ** 2


def theoretical_success(config: AlgorithmConfig) -> list[tuple[int, float]]:
    """Expected (decimal state, probability) pairs, most likely first."""
    k = config.kind
    if k is AlgorithmKind.DTQW:
        probs = _walk_distribution(config.state_qubits, int(config.steps_or_time))
        top = probs.max()
        return [(int(i), float(p)) for i, p in enumerate(probs) if abs(p - top) < 1e-12]
    if k in (AlgorithmKind.CTQW, AlgorithmKind.PD):
        probs = ctqw_probabilities(2**config.state_qubits, float(config.steps_or_time))
        order = sorted(range(len(probs)), key=lambda i: (-round(probs[i], 15), i))
        return [(i, float(probs[i])) for i in order if probs[i] > 1e-15]
    if k is AlgorithmKind.QPE:
        return [qpe_success(config.state_qubits, config.phase)]
    return [(config.marked_item, grover_success(config.state_qubits, config.iterations))]


EXPECTED_WORKSPACE = {
    AlgorithmKind.DTQW: 3,
    AlgorithmKind.CTQW: 2,
    AlgorithmKind.PD: 2,
    AlgorithmKind.QPE: 4,
    AlgorithmKind.QSA: 6,
    AlgorithmKind.QSN: 4,
}
