"""Cycle-walk Hamiltonians, Pauli decomposition, and product-formula circuits.

Pauli strings are written in Kronecker order: the leftmost character acts on
the highest-index qubit, so ``"IX"`` is X on qubit 0.  This matches the
little-endian basis convention of the simulators.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from progbench.circuit import Circuit, Gate, GateKind
from progbench.errors import ValidationError

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
DROP_BELOW = 1e-12


@dataclass(frozen=True)
class HermitianOperator:
    matrix: np.ndarray
    num_qubits: int

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.num_qubits
        if m.shape != (dim, dim):
            raise ValidationError(f"expected a {dim}x{dim} matrix, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise ValidationError("operator is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix) -> "HermitianOperator":
        m = np.asarray(matrix, dtype=complex)
        n = int(round(math.log2(m.shape[0]))) if m.ndim == 2 and m.shape[0] else -1
        if n < 0 or 2**n != m.shape[0]:
            raise ValidationError("matrix side must be a power of two")
        return cls(m, n)


@dataclass(frozen=True)
class PauliTerm:
    string: str
    coefficient: float

    def __post_init__(self) -> None:
        s = self.string.upper()
        if not s or set(s) - set("IXYZ"):
            raise ValidationError(f"bad Pauli string {self.string!r}")
        if isinstance(self.coefficient, complex):
            if abs(self.coefficient.imag) > 1e-12:
                raise ValidationError("Pauli coefficients of a Hermitian operator are real")
            object.__setattr__(self, "coefficient", self.coefficient.real)
        object.__setattr__(self, "string", s)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    def matrix(self) -> np.ndarray:
        return pauli_matrix(self.string)


@dataclass(frozen=True)
class PauliDecomposition:
    terms: tuple[PauliTerm, ...]
    num_qubits: int

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        strings = [t.string for t in terms]
        if len(set(strings)) != len(strings):
            raise ValidationError("duplicate Pauli strings in decomposition")
        if any(len(s) != self.num_qubits for s in strings):
            raise ValidationError(f"every string must have length {self.num_qubits}")
        object.__setattr__(self, "terms", terms)

    def as_dict(self) -> dict[str, float]:
        return {t.string: t.coefficient for t in self.terms}

    def matrix(self) -> np.ndarray:
        dim = 2**self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            out += t.coefficient * t.matrix()
        return out

    def sorted_terms(self) -> list[PauliTerm]:
        return sorted(self.terms, key=lambda t: t.string)

    def to_json(self) -> str:
        return json.dumps(
            {"num_qubits": self.num_qubits, "terms": [[t.string, t.coefficient] for t in self.sorted_terms()]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PauliDecomposition":
        data = json.loads(text)
        terms = tuple(PauliTerm(s, c) for s, c in data["terms"])
        n = data.get("num_qubits", len(terms[0].string) if terms else 0)
        return cls(terms, n)

    @classmethod
    def from_dict(cls, terms: dict[str, float]) -> "PauliDecomposition":
        items = tuple(PauliTerm(s, c) for s, c in terms.items())
        return cls(items, len(items[0].string))


def pauli_matrix(string: str) -> np.ndarray:
    return reduce(np.kron, (_PAULI[ch] for ch in string), np.array([[1.0 + 0j]]))


def cycle_walk_hamiltonian(num_nodes: int) -> HermitianOperator:
    """Walk Hamiltonian ``(1/2) * A`` on the ``num_nodes``-cycle.

    The hopping rate is one over the node degree.  For two nodes the cycle is
    taken as a simple graph with a single edge, so ``A[0][1] = 1``.
    """
    if num_nodes < 2 or num_nodes & (num_nodes - 1):
        raise ValidationError(f"cycle size must be a power of two >= 2, got {num_nodes}")
    adj = np.zeros((num_nodes, num_nodes))
    for i in range(num_nodes):
        adj[i, (i + 1) % num_nodes] = adj[(i + 1) % num_nodes, i] = 1.0
    rate = 0.5
    return HermitianOperator(rate * adj.astype(complex), int(math.log2(num_nodes)))


def pauli_decompose(h: HermitianOperator) -> PauliDecomposition:
    """Coefficients ``tr(P @ H) / 2**n`` for every Pauli string ``P``; near-zeros dropped."""
    if not isinstance(h, HermitianOperator):
        h = HermitianOperator.from_matrix(h)
    n = h.num_qubits
    dim = 2**n
    terms = []
    for word in itertools.product("IXYZ", repeat=n):
        s = "".join(word)
        # tr(P @ H) = sum_ij P_ij H_ji = sum(P * H.T)
        alpha = np.sum(pauli_matrix(s) * h.matrix.T) / dim
        if abs(alpha) >= DROP_BELOW:
            terms.append(PauliTerm(s, complex(alpha)))
    return PauliDecomposition(tuple(terms), n)


def strings_commute(a: str, b: str) -> bool:
    """Pauli strings commute iff they anticommute on an even number of positions."""
    clashes = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return clashes % 2 == 0


def all_commute(terms: PauliDecomposition | Iterable[PauliTerm]) -> bool:
    ts = list(terms.terms if isinstance(terms, PauliDecomposition) else terms)
    return all(strings_commute(a.string, b.string) for a, b in itertools.combinations(ts, 2))


def spectral_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(matrix))))


def trotter_reps(terms: PauliDecomposition, t: float, eps: float) -> int:
    """Repetitions needed for error ``eps``: ``ceil((||H|| t)**2 / eps)``, or 1 if terms commute."""
    if t <= 0 or eps <= 0:
        raise ValidationError("time and error budget must be positive")
    if all_commute(terms):
        return 1
    bound = (spectral_norm(terms.matrix()) * t) ** 2 / eps
    # shave float noise so an exact integer bound is not bumped up by one
    return max(1, math.ceil(bound * (1 - 1e-12)))


def exp_pauli_circuit(term: PauliTerm | str, theta: float, num_qubits: int | None = None) -> Circuit:
    """Exact circuit for ``exp(-i * theta * P)``, global phase included.

    Each non-identity factor is rotated to Z (H for X; S-dagger then H for Y),
    a CX ladder collects the parity on the highest-index active qubit, RZ(2*theta)
    applies the phase, and everything is undone.  An all-identity string only
    contributes a global phase and yields an empty circuit.
    """
    string = term.string if isinstance(term, PauliTerm) else PauliTerm(term, 0.0).string
    n = len(string) if num_qubits is None else num_qubits
    active = [(len(string) - 1 - j, ch) for j, ch in enumerate(string) if ch != "I"]
    active.sort()
    if not active:
        return Circuit(n)
    pre: list[Gate] = []
    post: list[Gate] = []
    for q, ch in active:
        if ch == "X":
            pre.append(Gate(GateKind.H, (q,)))
            post.append(Gate(GateKind.H, (q,)))
        elif ch == "Y":
            pre += [Gate(GateKind.SDG, (q,)), Gate(GateKind.H, (q,))]
            post += [Gate(GateKind.H, (q,)), Gate(GateKind.S, (q,))]
    target = active[-1][0]
    ladder = [Gate(GateKind.CX, (q, target)) for q, _ in active[:-1]]
    gates = pre + ladder + [Gate(GateKind.RZ, (target,), angle=2 * theta)] + ladder[::-1] + post
    return Circuit(n, 0, tuple(gates))


def trotter_circuit(terms: PauliDecomposition, t: float, r: int) -> Circuit:
    """First-order product formula: ``r`` rounds of every term, strings in lexicographic order."""
    if r < 1:
        raise ValidationError("Trotter repetitions must be >= 1")
    n = terms.num_qubits
    one_round: list[Gate] = []
    for term in terms.sorted_terms():
        one_round += exp_pauli_circuit(term, term.coefficient * t / r, n).gates
    return Circuit(n, 0, tuple(one_round * r), label=f"trotter(t={t}, r={r})")


def exact_evolution(h: HermitianOperator | np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the eigendecomposition of ``H``."""
    m = h.matrix if isinstance(h, HermitianOperator) else np.asarray(h, dtype=complex)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * w * t)) @ v.conj().T
