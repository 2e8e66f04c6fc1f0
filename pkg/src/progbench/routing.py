"""Place a logical circuit on a coupling graph by inserting SWAP chains."""

from __future__ import annotations

from typing import Mapping, Sequence

from progbench.architecture import ArchitectureSpec
from progbench.circuit import Circuit, Gate, GateKind, expand
from progbench.errors import ValidationError


def _check_layout(layout: Sequence[int], c: Circuit, arch: ArchitectureSpec) -> list[int]:
    layout = [int(p) for p in layout]
    if len(layout) < c.num_qubits:
        raise ValidationError(f"layout covers {len(layout)} of {c.num_qubits} logical qubits")
    if len(set(layout)) != len(layout):
        raise ValidationError(f"layout {layout} is not injective")
    if any(not 0 <= p < arch.num_qubits for p in layout):
        raise ValidationError(f"layout {layout} outside {arch.num_qubits} physical qubits")
    return layout


def normalize_layout(layout: Mapping[int, int] | Sequence[int] | None, num_logical: int) -> list[int]:
    if layout is None:
        return list(range(num_logical))
    if isinstance(layout, Mapping):
        missing = [q for q in range(num_logical) if q not in layout and str(q) not in layout]
        if missing:
            raise ValidationError(f"layout misses logical qubits {missing}")
        return [int(layout[q] if q in layout else layout[str(q)]) for q in range(num_logical)]
    return list(layout)


def route_tracked(
    c: Circuit,
    arch: ArchitectureSpec,
    layout: Mapping[int, int] | Sequence[int] | None = None,
) -> tuple[Circuit, list[int]]:
    """Route ``c`` and also return the final logical -> physical mapping.

    Macros are expanded first.  For a two-qubit gate on non-adjacent physical
    qubits, the first operand is swapped along a shortest path until it
    neighbours the second; the mapping is updated and never swapped back.
    """
    c = expand(c)
    where = _check_layout(normalize_layout(layout, c.num_qubits), c, arch)
    # physical -> logical occupant, None for free physical qubits
    occupant: dict[int, int] = {p: q for q, p in enumerate(where)}
    out: list[Gate] = []
    for g in c.gates:
        if g.num_qubits > 2:
            raise ValidationError(f"cannot route {g.num_qubits}-qubit {g.kind.value} gate")
        if g.num_qubits == 2:
            a, b = (where[q] for q in g.operands)
            if not arch.adjacent(a, b):
                path = arch.shortest_path(a, b)
                for u, v in zip(path[:-2], path[1:-1]):
                    out.append(Gate(GateKind.SWAP, (u, v)))
                    qu, qv = occupant.get(u), occupant.get(v)
                    occupant[u], occupant[v] = qv, qu
                    if qu is not None:
                        where[qu] = v
                    if qv is not None:
                        where[qv] = u
        out.append(g.remap(where))
    routed = Circuit(arch.num_qubits, c.num_clbits, tuple(out), c.label)
    return routed, where


def route(
    c: Circuit,
    arch: ArchitectureSpec,
    layout: Mapping[int, int] | Sequence[int] | None = None,
) -> Circuit:
    """Routed circuit on physical qubit indices (identity layout by default)."""
    return route_tracked(c, arch, layout)[0]
