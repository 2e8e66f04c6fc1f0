"""Brute-force reference implementations used only by the tests.

Everything here works on full 2**n x 2**n matrices, built element by element
from textbook gate definitions; none of it shares code with the simulators.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.linalg import expm

from progbench.circuit import Circuit, GateKind

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def bit(i: int, q: int) -> int:
    return (i >> q) & 1


def embed(local: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Full operator acting as ``local`` on ``qubits`` (qubits[0] is the local LSB)."""
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n) if q not in qubits]
    for i in range(dim):
        for j in range(dim):
            if any(bit(i, q) != bit(j, q) for q in others):
                continue
            li = sum(bit(i, q) << k for k, q in enumerate(qubits))
            lj = sum(bit(j, q) << k for k, q in enumerate(qubits))
            full[i, j] = local[li, lj]
    return full


def single(u: np.ndarray, q: int, n: int) -> np.ndarray:
    """Kronecker-product construction: qubit n-1 is the leftmost factor."""
    ops = [u if k == q else I2 for k in reversed(range(n))]
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def controlled(u: np.ndarray, controls: tuple[int, ...], target: int, n: int) -> np.ndarray:
    """``I - P + P (x) u`` with P the projector onto all controls set."""
    proj = np.eye(2**n, dtype=complex)
    for c in controls:
        proj = proj @ single(P1, c, n)
    return np.eye(2**n) - proj + proj @ single(u, target, n)


def gate_unitary(g, n: int) -> np.ndarray:
    k = g.kind
    ops = g.operands
    a = g.angle
    fixed = {
        GateKind.X: X, GateKind.Y: Y, GateKind.Z: Z,
        GateKind.H: (X + Z) / math.sqrt(2),
        GateKind.S: np.diag([1, 1j]), GateKind.SDG: np.diag([1, -1j]),
        GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]),
        GateKind.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
    }
    if k in fixed:
        return single(np.asarray(fixed[k], dtype=complex), ops[0], n)
    if k is GateKind.RX:
        return single(expm(-0.5j * a * X), ops[0], n)
    if k is GateKind.RY:
        return single(expm(-0.5j * a * Y), ops[0], n)
    if k is GateKind.RZ:
        return single(expm(-0.5j * a * Z), ops[0], n)
    if k is GateKind.PHASE:
        return single(np.diag([1, np.exp(1j * a)]), ops[0], n)
    if k in (GateKind.CX, GateKind.CCX, GateKind.MCX):
        return controlled(X, ops[:-1], ops[-1], n)
    if k is GateKind.CZ:
        return controlled(Z, ops[:1], ops[1], n)
    if k is GateKind.CP:
        return controlled(np.diag([1, np.exp(1j * a)]), ops[:1], ops[1], n)
    if k is GateKind.SWAP:
        a_, b_ = ops
        return (
            single(P0, a_, n) @ single(P0, b_, n)
            + single(P1, a_, n) @ single(P1, b_, n)
            + single(np.array([[0, 1], [0, 0]]), a_, n) @ single(np.array([[0, 0], [1, 0]]), b_, n)
            + single(np.array([[0, 0], [1, 0]]), a_, n) @ single(np.array([[0, 1], [0, 0]]), b_, n)
        )
    if k is GateKind.UNITARY:
        return embed(g.matrix, ops, n)
    raise ValueError(f"oracle has no unitary for {k}")


def circuit_unitary(c: Circuit) -> np.ndarray:
    n = c.num_qubits
    u = np.eye(2**n, dtype=complex)
    for g in c.gates:
        if g.kind is GateKind.MEASURE:
            continue
        u = gate_unitary(g, n) @ u
    return u


def ideal_distribution(c: Circuit) -> np.ndarray:
    """Dense outcome vector over classical-bit states."""
    n = c.num_qubits
    psi = circuit_unitary(c)[:, 0]
    out = np.zeros(2**c.num_clbits)
    meas = {g.classical_target: g.operands[0] for g in c.gates if g.kind is GateKind.MEASURE}
    for i, amp in enumerate(psi):
        label = sum(bit(i, q) << cb for cb, q in meas.items())
        out[label] += abs(amp) ** 2
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def paulis(arity: int) -> list[np.ndarray]:
    out = []
    for word in itertools.product([I2, X, Y, Z], repeat=arity):
        m = np.array([[1.0 + 0j]])
        for p in word:
            m = np.kron(m, p)
        out.append(m)
    return out


def noisy_distribution(c: Circuit, p1: dict, p2: dict, prep: dict, meas: dict, relax: dict) -> np.ndarray:
    """Dense density-matrix oracle for small circuits on all-to-all hardware.

    ``p1[q]``/``p2[(a, b)]``: depolarizing probability per gate; ``relax[q]``:
    ``(gamma, lam)`` pair applied to every operand after each gate and to
    measured qubits before readout.  Full-space Kraus operators only.
    """
    n = c.num_qubits
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1

    def channel(rho, kraus):
        return sum(k @ rho @ k.conj().T for k in kraus)

    def relax_kraus(q):
        gamma, lam = relax[q]
        ad = [np.array([[1, 0], [0, math.sqrt(1 - gamma)]]), np.array([[0, math.sqrt(gamma)], [0, 0]])]
        ph = [math.sqrt(1 - lam / 2) * I2, math.sqrt(lam / 2) * Z]
        return [single(d @ a, q, n) for a in ad for d in ph]

    for q in range(n):
        if prep.get(q):
            pm = prep[q]
            rho = channel(rho, [math.sqrt(1 - pm) * np.eye(dim), math.sqrt(pm) * single(X, q, n)])
    measured = {}
    for g in c.gates:
        if g.kind is GateKind.MEASURE:
            measured[g.classical_target] = g.operands[0]
            continue
        u = gate_unitary(g, n)
        rho = u @ rho @ u.conj().T
        if g.num_qubits == 1:
            p = p1.get(g.operands[0], 0.0)
        else:
            p = p2.get(tuple(sorted(g.operands)), 0.0)
        if p:
            ps = paulis(g.num_qubits)
            local = [math.sqrt(1 - p) * ps[0]] + [math.sqrt(p / (len(ps) - 1)) * m for m in ps[1:]]
            rho = channel(rho, [embed(k, g.operands, n) for k in local])
        for q in g.operands:
            if q in relax:
                rho = channel(rho, relax_kraus(q))
    for q in sorted(set(measured.values())):
        if q in relax:
            rho = channel(rho, relax_kraus(q))
    diag = np.real(np.diag(rho))
    out = np.zeros(2**c.num_clbits)
    for i, p in enumerate(diag):
        out[sum(bit(i, q) << cb for cb, q in measured.items())] += p
    # readout: confusion matrix as a Kronecker product, clbit 0 rightmost
    conf = np.array([[1.0]])
    for cb in reversed(range(c.num_clbits)):
        e = meas.get(measured.get(cb), 0.0)
        conf = np.kron(conf, np.array([[1 - e, e], [e, 1 - e]]))
    return conf @ out
