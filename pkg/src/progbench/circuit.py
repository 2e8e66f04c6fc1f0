"""Gate and circuit representation, gate matrices, macro expansion and statistics.

Qubit-ordering convention used everywhere in the package:

* A basis-state index is ``sum(bit(q) << q)``; qubit 0 is the least
  significant bit.
* A gate's local matrix is written in the same little-endian order over its
  operand list, so operand 0 is the least significant local bit.  For
  ``CX(control, target)`` the control is operand 0.
* Outcome labels are strings with classical bit 0 as the *rightmost*
  character; the decimal state label of an outcome reads classical bit 0 as
  the least significant bit (``"01"`` is state 1, ``"11"`` is state 3).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from progbench.errors import ValidationError


class GateKind(str, enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    PHASE = "p"
    CX = "cx"
    CZ = "cz"
    CP = "cp"
    SWAP = "swap"
    CCX = "ccx"
    MCX = "mcx"
    UNITARY = "unitary"
    MEASURE = "measure"
    RESET = "reset"


PARAMETERIZED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE, GateKind.CP})
ONE_QUBIT = frozenset(
    {
        GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
        GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE,
    }
)
TWO_QUBIT = frozenset({GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.SWAP})
MACROS = frozenset({GateKind.CCX, GateKind.MCX})

# largest opaque unitary the simulators accept
MAX_UNITARY_QUBITS = 3


@dataclass(frozen=True)
class Gate:
    """One instruction.  ``angle`` only for parameterized kinds, ``matrix`` only for UNITARY."""

    kind: GateKind
    operands: tuple[int, ...]
    angle: float | None = None
    classical_target: int | None = None
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    name: str | None = None

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        ops = self.operands
        if not ops:
            raise ValidationError(f"{kind.value}: no operands")
        if len(set(ops)) != len(ops):
            raise ValidationError(f"{kind.value}: repeated operand in {ops}")
        if any(q < 0 for q in ops):
            raise ValidationError(f"{kind.value}: negative qubit index in {ops}")
        if (self.angle is not None) != (kind in PARAMETERIZED):
            raise ValidationError(
                f"{kind.value}: angle must be given iff the gate is parameterized"
            )
        if (self.classical_target is not None) != (kind is GateKind.MEASURE):
            raise ValidationError(f"{kind.value}: classical target only allowed on measure")

        expected = _ARITY.get(kind)
        if expected is not None and len(ops) != expected:
            raise ValidationError(f"{kind.value} takes {expected} operand(s), got {len(ops)}")
        if kind is GateKind.MCX and len(ops) < 2:
            raise ValidationError("mcx needs at least one control and a target")
        if kind is GateKind.UNITARY:
            if self.matrix is None:
                raise ValidationError("unitary gate without a matrix")
            mat = np.asarray(self.matrix, dtype=complex)
            dim = 2 ** len(ops)
            if mat.shape != (dim, dim):
                raise ValidationError(f"unitary on {len(ops)} qubits needs a {dim}x{dim} matrix")
            if not np.allclose(mat @ mat.conj().T, np.eye(dim), atol=1e-10):
                raise ValidationError("unitary gate matrix is not unitary")
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)
        elif self.matrix is not None:
            raise ValidationError(f"{kind.value}: matrix only allowed on unitary gates")

    @property
    def num_qubits(self) -> int:
        return len(self.operands)

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        """Same gate acting on ``mapping[q]`` for every operand ``q``."""
        return Gate(
            self.kind,
            tuple(mapping[q] for q in self.operands),
            self.angle,
            self.classical_target,
            self.matrix,
            self.name,
        )

    def __str__(self) -> str:
        ops = " ".join(str(q) for q in self.operands)
        if self.kind is GateKind.MEASURE:
            return f"measure {ops} -> {self.classical_target}"
        if self.angle is not None:
            return f"{self.kind.value} {self.angle!r} {ops}"
        return f"{self.kind.value} {ops}"


_ARITY = {k: 1 for k in ONE_QUBIT} | {k: 2 for k in TWO_QUBIT} | {
    GateKind.CCX: 3,
    GateKind.MEASURE: 1,
    GateKind.RESET: 1,
}


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    gates: tuple[Gate, ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise ValidationError("circuit width must be nonnegative")
        for g in self.gates:
            if max(g.operands) >= self.num_qubits:
                raise ValidationError(
                    f"gate {g} acts outside a {self.num_qubits}-qubit circuit"
                )
            if g.classical_target is not None and not 0 <= g.classical_target < self.num_clbits:
                raise ValidationError(
                    f"gate {g} writes outside {self.num_clbits} classical bits"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, self.num_clbits, self.gates + tuple(gates), self.label)

    def append(self, gate: Gate) -> "Circuit":
        return self.extend([gate])

    def without_measurements(self) -> "Circuit":
        return Circuit(
            self.num_qubits,
            self.num_clbits,
            tuple(g for g in self.gates if g.kind is not GateKind.MEASURE),
            self.label,
        )

    def measurements(self) -> list[Gate]:
        return [g for g in self.gates if g.kind is GateKind.MEASURE]

    def with_label(self, label: str) -> "Circuit":
        return Circuit(self.num_qubits, self.num_clbits, self.gates, label)


@dataclass(frozen=True)
class CircuitStats:
    gate_count: int
    workspace: int
    depth: int


def circuit_stats(c: Circuit) -> CircuitStats:
    """Gate count, number of touched qubits, and depth.

    Depth is found by frontier propagation: a gate sits one layer above the
    deepest of its operands, and measurements are ordinary layers.  For
    circuits that end in measurements this is the longest path from the start
    to a measurement.
    """
    frontier: dict[int, int] = {}
    deepest = 0
    for g in c.gates:
        layer = 1 + max((frontier.get(q, 0) for q in g.operands), default=0)
        for q in g.operands:
            frontier[q] = layer
        deepest = max(deepest, layer)
    return CircuitStats(gate_count=len(c.gates), workspace=len(frontier), depth=deepest)


# ---------------------------------------------------------------------------
# gate matrices

_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}
for _m in _FIXED.values():
    _m.setflags(write=False)


def _controlled_x(num_controls: int) -> np.ndarray:
    dim = 2 ** (num_controls + 1)
    perm = np.arange(dim)
    ones = 2**num_controls - 1  # all controls set, target clear
    perm[ones], perm[ones + 2**num_controls] = ones + 2**num_controls, ones
    return np.eye(dim, dtype=complex)[perm]


def gate_matrix(g: Gate) -> np.ndarray:
    """Local unitary of ``g`` in the little-endian operand order."""
    k = g.kind
    if k in _FIXED:
        return _FIXED[k]
    if k is GateKind.UNITARY:
        return g.matrix
    if k is GateKind.CX or k is GateKind.CCX or k is GateKind.MCX:
        return _controlled_x(len(g.operands) - 1)
    a = g.angle
    if k is GateKind.RX:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if k is GateKind.RY:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k is GateKind.RZ:
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])
    if k is GateKind.PHASE:
        return np.diag([1, np.exp(1j * a)])
    if k is GateKind.CP:
        return np.diag([1, 1, 1, np.exp(1j * a)])
    raise ValidationError(f"{k.value} has no unitary matrix")


# ---------------------------------------------------------------------------
# macro expansion


def toffoli_gates(a: int, b: int, target: int) -> list[Gate]:
    """Six-CX Toffoli over {H, T, Tdg, CX}; exact, no global phase."""
    G = Gate
    return [
        G(GateKind.H, (target,)),
        G(GateKind.CX, (b, target)),
        G(GateKind.TDG, (target,)),
        G(GateKind.CX, (a, target)),
        G(GateKind.T, (target,)),
        G(GateKind.CX, (b, target)),
        G(GateKind.TDG, (target,)),
        G(GateKind.CX, (a, target)),
        G(GateKind.T, (b,)),
        G(GateKind.T, (target,)),
        G(GateKind.H, (target,)),
        G(GateKind.CX, (a, b)),
        G(GateKind.T, (a,)),
        G(GateKind.TDG, (b,)),
        G(GateKind.CX, (a, b)),
    ]


def parity_phase_gates(qubits: Sequence[int], phi: float) -> list[Gate]:
    """``exp(i*phi)`` on basis states where the XOR of ``qubits`` is 1."""
    *rest, last = qubits
    ladder = [Gate(GateKind.CX, (q, last)) for q in rest]
    return ladder + [Gate(GateKind.PHASE, (last,), angle=phi)] + ladder[::-1]


def mcz_gates(qubits: Sequence[int]) -> list[Gate]:
    """Ancilla-free multi-controlled Z (phase -1 on the all-ones state).

    Uses the identity ``x1*...*xn = 2**(1-n) * sum_S (-1)**(|S|+1) XOR_S(x)``
    over nonempty subsets S, so the phase ``pi*x1*...*xn`` splits into one
    parity phase per subset.  Exact for every n.
    """
    qubits = list(qubits)
    n = len(qubits)
    if n == 1:
        return [Gate(GateKind.Z, (qubits[0],))]
    if n == 2:
        return [Gate(GateKind.CZ, tuple(qubits))]
    out: list[Gate] = []
    for mask in range(1, 2**n):
        subset = [qubits[i] for i in range(n) if mask >> i & 1]
        sign = 1 if len(subset) % 2 else -1
        out += parity_phase_gates(subset, sign * math.pi / 2 ** (n - 1))
    return out


def _expand_gate(g: Gate) -> list[Gate]:
    if g.kind is GateKind.CCX or (g.kind is GateKind.MCX and len(g.operands) == 3):
        return toffoli_gates(*g.operands)
    if g.kind is GateKind.MCX:
        *controls, target = g.operands
        if not controls:
            return [Gate(GateKind.X, (target,))]
        if len(controls) == 1:
            return [Gate(GateKind.CX, g.operands)]
        h = Gate(GateKind.H, (target,))
        return [h] + mcz_gates([*controls, target]) + [h]
    return [g]


def expand(c: Circuit) -> Circuit:
    """Replace CCX/MCX macros by basis gates so noise is charged per basis gate."""
    if not any(g.kind in MACROS for g in c.gates):
        return c
    gates: list[Gate] = []
    for g in c.gates:
        gates += _expand_gate(g)
    return Circuit(c.num_qubits, c.num_clbits, tuple(gates), c.label)


# ---------------------------------------------------------------------------
# line-oriented circuit files


def parse_circuit(text: str, label: str = "") -> Circuit:
    """Parse the line-oriented circuit format.

    Grammar, one statement per line, ``#`` starts a comment::

        qubits <n>                 optional; default is max index + 1
        clbits <m>                 optional; default is max classical target + 1
        label <text>
        <kind> <q0> [<q1> ...]     e.g. ``h 0``, ``cx 0 1``, ``mcx 0 1 2 3``
        <kind> <angle> <q0> [...]  for rx, ry, rz, p, cp, e.g. ``rz 0.785 2``
        measure <q> -> <c>
        reset <q>
    """
    gates: list[Gate] = []
    nq = nc = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        head = head.lower()
        try:
            if head == "qubits":
                nq = int(args[0])
            elif head == "clbits":
                nc = int(args[0])
            elif head == "label":
                label = line.split(None, 1)[1] if args else ""
            elif head == "measure":
                if len(args) != 3 or args[1] != "->":
                    raise ValidationError("expected 'measure <q> -> <c>'")
                gates.append(Gate(GateKind.MEASURE, (int(args[0]),), classical_target=int(args[2])))
            else:
                kind = GateKind(head)
                if kind is GateKind.UNITARY:
                    raise ValidationError("opaque unitaries cannot be written in circuit files")
                if kind in PARAMETERIZED:
                    gates.append(Gate(kind, tuple(int(a) for a in args[1:]), angle=float(args[0])))
                else:
                    gates.append(Gate(kind, tuple(int(a) for a in args)))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        except (ValueError, IndexError):
            raise ValidationError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if nq is None:
        nq = 1 + max((max(g.operands) for g in gates), default=-1)
    if nc is None:
        nc = 1 + max((g.classical_target for g in gates if g.classical_target is not None), default=-1)
    return Circuit(nq, nc, tuple(gates), label)


def format_circuit(c: Circuit) -> str:
    if any(g.kind is GateKind.UNITARY for g in c.gates):
        raise ValidationError("opaque unitaries cannot be written in circuit files")
    lines = [f"qubits {c.num_qubits}", f"clbits {c.num_clbits}"]
    if c.label:
        lines.append(f"label {c.label}")
    lines += [str(g) for g in c.gates]
    return "\n".join(lines) + "\n"
