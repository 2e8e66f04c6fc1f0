"""Noise-free statevector simulation, outcome distributions and shot sampling.

Shot sampling uses ``numpy.random.default_rng(seed)`` (PCG64) and a single
multinomial draw over labels in sorted order.  Other implementations can match
counts files at the distribution level, not bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from progbench.circuit import Circuit, Gate, GateKind, gate_matrix
from progbench.errors import SimulationCapError, ValidationError

DEFAULT_MAX_QUBITS = 20


def apply_matrix(tensor: np.ndarray, mat: np.ndarray, qubits: tuple[int, ...], n: int, offset: int = 0) -> np.ndarray:
    """Apply a local matrix to the qubit axes of a ``[2]*k`` tensor.

    Axis ``offset + n - 1 - q`` holds qubit ``q`` (big-endian reshape of a
    little-endian index).  ``offset`` lets density matrices reuse this for the
    bra half.
    """
    k = len(qubits)
    op = mat.reshape((2,) * (2 * k))
    # operand j sits at op axis k-1-j (rows) and 2k-1-j (cols)
    axes = [offset + n - 1 - q for q in qubits]
    col_axes = [2 * k - 1 - j for j in range(k)]
    out = np.tensordot(op, tensor, axes=(col_axes, axes))
    # result axes: op rows (operand k-1 ... 0), then remaining tensor axes in order
    src = list(range(k))
    dst = [axes[k - 1 - i] for i in range(k)]
    return np.moveaxis(out, src, dst)


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValidationError("amplitude vector length must be 2**num_qubits")
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1) > 1e-10:
            raise ValidationError(f"state not normalized (|psi|^2 = {norm})")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def label_of(index: int, width: int) -> str:
    """Outcome label with classical bit 0 rightmost."""
    return format(index, f"0{width}b") if width else ""


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: Mapping[str, float]
    num_clbits: int

    def __post_init__(self) -> None:
        probs = {str(k): float(v) for k, v in self.probs.items()}
        for label, p in probs.items():
            if len(label) != self.num_clbits or set(label) - {"0", "1"}:
                raise ValidationError(f"label {label!r} is not a {self.num_clbits}-bit string")
            if p < 0:
                raise ValidationError(f"negative probability {p} for {label!r}")
        total = sum(probs.values())
        if abs(total - 1) > 1e-9:
            raise ValidationError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, label: str) -> float:
        return self.probs.get(label, 0.0)

    def prob_of_state(self, state: int) -> float:
        """Probability of a decimal state label (classical bit 0 least significant)."""
        return self.probs.get(label_of(state, self.num_clbits), 0.0)

    def as_array(self) -> np.ndarray:
        """Dense vector indexed by decimal state label."""
        out = np.zeros(2**self.num_clbits)
        for label, p in self.probs.items():
            out[int(label, 2) if label else 0] = p
        return out

    @classmethod
    def from_array(cls, probs: np.ndarray, num_clbits: int, cutoff: float = 0.0) -> "OutcomeDistribution":
        probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
        probs = probs / probs.sum()
        return cls(
            {label_of(i, num_clbits): float(p) for i, p in enumerate(probs) if p > cutoff},
            num_clbits,
        )


@dataclass(frozen=True)
class Counts:
    counts: Mapping[str, int]
    shots: int
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        counts = dict(self.counts)
        widths = {len(k) for k in counts}
        if len(widths) > 1:
            raise ValidationError(f"inconsistent label widths {sorted(widths)}")
        for label, n in counts.items():
            if not isinstance(label, str) or set(label) - {"0", "1"}:
                raise ValidationError(f"malformed label {label!r}")
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
                raise ValidationError(f"count for {label!r} must be a nonnegative integer, got {n!r}")
        if sum(counts.values()) != self.shots:
            raise ValidationError(f"shots mismatch: counts sum to {sum(counts.values())}, shots = {self.shots}")
        object.__setattr__(self, "counts", {k: int(v) for k, v in counts.items()})
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def num_clbits(self) -> int:
        return len(next(iter(self.counts), ""))

    def to_json(self) -> str:
        body = {"shots": self.shots, "counts": dict(sorted(self.counts.items()))}
        body.update({k: v for k, v in self.metadata.items() if k not in body})
        return json.dumps(body, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Counts":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"counts file is not valid JSON ({exc})") from None
        if not isinstance(data, dict) or "counts" not in data:
            raise ValidationError("counts file needs a 'counts' object")
        counts = data["counts"]
        if not isinstance(counts, dict):
            raise ValidationError("'counts' must map bitstrings to integers")
        shots = data.get("shots", None)
        if shots is None:
            shots = sum(v for v in counts.values() if isinstance(v, int))
        if isinstance(shots, bool) or not isinstance(shots, int):
            raise ValidationError(f"shots must be an integer, got {shots!r}")
        meta = {k: v for k, v in data.items() if k not in ("counts", "shots")}
        return cls(counts, shots, meta)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _check_width(n: int, cap: int) -> None:
    if n > cap:
        raise SimulationCapError(f"{n} qubits exceeds the simulator cap of {cap}")


def apply_gate(psi: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a state given either flat (length 2**n) or as a [2]*n tensor."""
    if g.kind in (GateKind.MEASURE, GateKind.RESET):
        raise ValidationError(f"{g.kind.value} is not a unitary operation")
    out = apply_matrix(psi.reshape((2,) * n), gate_matrix(g), g.operands, n)
    return out.reshape(psi.shape)


def run_ideal(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Apply every gate of a measurement-free circuit to ``|0...0>``."""
    n = c.num_qubits
    _check_width(n, max_qubits)
    psi = np.zeros((2,) * n, dtype=complex)
    psi[(0,) * n] = 1.0
    for g in c.gates:
        if g.kind is GateKind.UNITARY and g.num_qubits > 3:
            raise ValidationError("opaque unitaries are limited to 3 qubits")
        psi = apply_gate(psi, g, n)
    return StateVector(psi.reshape(-1), n)


def split_measurements(c: Circuit) -> tuple[Circuit, dict[int, int]]:
    """Unitary prefix and the ``clbit -> qubit`` map of the terminal measurements."""
    measured: dict[int, int] = {}
    body: list[Gate] = []
    done: set[int] = set()
    for g in c.gates:
        if g.kind is GateKind.MEASURE:
            q = g.operands[0]
            if g.classical_target in measured:
                raise ValidationError(f"classical bit {g.classical_target} written twice")
            measured[g.classical_target] = q
            done.add(q)
        else:
            if done.intersection(g.operands):
                raise ValidationError(f"mid-circuit measurement: {g} follows a measurement")
            body.append(g)
    return Circuit(c.num_qubits, c.num_clbits, tuple(body), c.label), measured


def marginal(probs: np.ndarray, n: int, measured: Mapping[int, int], num_clbits: int) -> np.ndarray:
    """Push a length-``2**n`` qubit distribution onto classical-bit outcomes.

    Unwritten classical bits read 0.
    """
    idx = np.arange(2**n)
    out_idx = np.zeros_like(idx)
    for cbit, q in measured.items():
        out_idx |= ((idx >> q) & 1) << cbit
    return np.bincount(out_idx, weights=probs, minlength=2**num_clbits)


def measure_distribution(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> OutcomeDistribution:
    body, measured = split_measurements(c)
    if not measured:
        raise ValidationError("circuit has no measurements")
    psi = run_ideal(body, max_qubits)
    probs = marginal(psi.probabilities(), c.num_qubits, measured, c.num_clbits)
    return OutcomeDistribution.from_array(probs, c.num_clbits)


def sample(dist: OutcomeDistribution, shots: int, seed: int | None = None, **metadata: Any) -> Counts:
    """Multinomial draw of ``shots`` outcomes; deterministic for a given seed."""
    if shots <= 0:
        raise ValidationError("shots must be positive")
    labels = sorted(dist.probs)
    p = np.array([dist.probs[k] for k in labels])
    p = p / p.sum()
    draws = np.random.default_rng(seed).multinomial(shots, p)
    counts = {k: int(n) for k, n in zip(labels, draws) if n}
    return Counts(counts, shots, metadata)


def exact_counts(dist: OutcomeDistribution, shots: int, **metadata: Any) -> Counts:
    """Largest-remainder rounding of ``dist`` to integer counts summing to ``shots``."""
    labels = sorted(dist.probs)
    raw = np.array([dist.probs[k] for k in labels]) * shots
    base = np.floor(raw).astype(int)
    short = shots - int(base.sum())
    for i in np.argsort(-(raw - base), kind="stable")[:short]:
        base[i] += 1
    return Counts({k: int(n) for k, n in zip(labels, base) if n}, shots, metadata)
