"""Physical architectures: coupling graph, per-qubit noise tables, gate durations.

Architecture files are JSON objects::

    {
      "name": "bogota",
      "num_qubits": 5,
      "edges": [[0, 1], [1, 2], [2, 3], [3, 4]],
      "noise": {
        "gate_error": {
          "q0": {"*": 2.5e-4, "rz": 0.0},        # one-qubit tables, "*" = any kind
          "q0_q1": {"cx": 8.1e-3, "swap": 0.024}  # two-qubit tables, keyed by edge
        },
        "prep_error": {"q0": 0.01},               # p_m
        "meas_error": {"q0": 0.02},               # p_s
        "t1": {"q0": 110.3},                      # microseconds
        "t2": {"q0": 150.1}                       # microseconds, "inf" allowed
      },
      "gate_durations": {"1q": 35.6, "2q": 400.0, "measure": 5000.0, "cx": 380.0}
    }

Gate durations are in nanoseconds.  Lookups go exact kind, then the "1q"/"2q"
class key, then the built-in defaults (50 ns, 300 ns, 1000 ns measurement).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from collections import deque
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from progbench.circuit import ONE_QUBIT, Gate, GateKind
from progbench.errors import ValidationError

DEFAULT_DURATION_1Q_NS = 50.0
DEFAULT_DURATION_2Q_NS = 300.0
DEFAULT_DURATION_MEASURE_NS = 1000.0

SHIPPED = ("bogota", "santiago", "casablanca", "noiseless")

_QKEY = re.compile(r"^q(\d+)$")
_EKEY = re.compile(r"^q(\d+)_q(\d+)$")


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class NoiseParameters:
    """Calibrated noise tables.

    ``gate_error_1q`` maps qubit -> {kind: p}; ``gate_error_2q`` maps a sorted
    edge -> {kind: p}.  A ``"*"`` kind matches any gate on that qubit or edge.
    """

    gate_error_1q: Mapping[int, Mapping[str, float]] = field(default_factory=dict)
    gate_error_2q: Mapping[tuple[int, int], Mapping[str, float]] = field(default_factory=dict)
    prep_error: Mapping[int, float] = field(default_factory=dict)
    meas_error: Mapping[int, float] = field(default_factory=dict)
    t1: Mapping[int, float] = field(default_factory=dict)
    t2: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        probs = [
            *(p for table in self.gate_error_1q.values() for p in table.values()),
            *(p for table in self.gate_error_2q.values() for p in table.values()),
            *self.prep_error.values(),
            *self.meas_error.values(),
        ]
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"probability {p} outside [0, 1]")
        for q, t in [*self.t1.items(), *self.t2.items()]:
            if not t > 0:
                raise ValidationError(f"relaxation time on q{q} must be positive, got {t}")
        for q, t2 in self.t2.items():
            t1 = self.t1.get(q, math.inf)
            if t2 > 2 * t1 * (1 + 1e-12):
                raise ValidationError(f"q{q}: T2 = {t2} exceeds 2*T1 = {2 * t1}")

    def gate_error(self, gate: Gate) -> float:
        """Depolarizing probability charged to ``gate`` (physical operands)."""
        kind = gate.kind.value
        if gate.num_qubits == 1:
            table = self.gate_error_1q.get(gate.operands[0])
            where = f"q{gate.operands[0]}"
        elif gate.num_qubits == 2:
            table = self.gate_error_2q.get(edge_key(*gate.operands))
            where = "q{}_q{}".format(*edge_key(*gate.operands))
        else:
            raise ValidationError(f"no noise model for {gate.num_qubits}-qubit gate {kind}")
        if table is not None:
            if kind in table:
                return table[kind]
            if "*" in table:
                return table["*"]
        raise ValidationError(f"missing noise parameter for gate {kind!r} on {where}")

    def is_trivial(self) -> bool:
        """True when every error rate is zero and no qubit relaxes."""
        zero = all(
            p == 0.0
            for table in (*self.gate_error_1q.values(), *self.gate_error_2q.values())
            for p in table.values()
        )
        zero = zero and not any(self.prep_error.values()) and not any(self.meas_error.values())
        return zero and all(math.isinf(t) for t in (*self.t1.values(), *self.t2.values()))


@dataclass(frozen=True)
class ArchitectureSpec:
    name: str
    num_qubits: int
    edges: frozenset[tuple[int, int]]
    noise: NoiseParameters = field(default_factory=NoiseParameters)
    gate_durations: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(edge_key(a, b) for a, b in self.edges))
        for a, b in self.edges:
            if a == b:
                raise ValidationError(f"self-loop on q{a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise ValidationError(f"edge ({a}, {b}) outside {self.num_qubits} qubits")
        if self.num_qubits > 1 and len(self._component(0)) != self.num_qubits:
            raise ValidationError(f"architecture {self.name!r} is not connected")
        self.noise.validate()

    def neighbors(self, q: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == q} | {a for a, b in self.edges if b == q})

    def adjacent(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self.edges

    def _component(self, start: int) -> set[int]:
        seen = {start}
        todo = [start]
        while todo:
            for nb in self.neighbors(todo.pop()):
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return seen

    def shortest_path(self, a: int, b: int) -> list[int]:
        """BFS path from ``a`` to ``b``; ties broken toward lower qubit indices."""
        prev = {a: a}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            if node == b:
                break
            for nb in self.neighbors(node):
                if nb not in prev:
                    prev[nb] = node
                    queue.append(nb)
        if b not in prev:
            raise ValidationError(f"no path between q{a} and q{b} on {self.name!r}")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def duration_ns(self, gate: Gate) -> float:
        d = self.gate_durations
        kind = gate.kind.value
        if kind in d:
            return d[kind]
        if gate.kind is GateKind.MEASURE:
            return d.get("measure", DEFAULT_DURATION_MEASURE_NS)
        if gate.kind in ONE_QUBIT:
            return d.get("1q", DEFAULT_DURATION_1Q_NS)
        return d.get("2q", DEFAULT_DURATION_2Q_NS)

    def with_noise(self, noise: NoiseParameters) -> "ArchitectureSpec":
        return replace(self, noise=noise)

    @classmethod
    def fully_connected(cls, num_qubits: int, name: str = "all-to-all", noise: NoiseParameters | None = None):
        edges = {(a, b) for a in range(num_qubits) for b in range(a + 1, num_qubits)}
        return cls(name, num_qubits, frozenset(edges), noise or NoiseParameters())

    @classmethod
    def linear(cls, num_qubits: int, name: str = "linear", noise: NoiseParameters | None = None):
        edges = {(q, q + 1) for q in range(num_qubits - 1)}
        return cls(name, num_qubits, frozenset(edges), noise or NoiseParameters())


# ---------------------------------------------------------------------------
# file I/O


def _as_time(value: Any) -> float:
    if value is None:
        return math.inf
    return float(value)  # accepts "inf"


def _qubit(key: str) -> int:
    m = _QKEY.match(key)
    if not m:
        raise ValidationError(f"bad qubit key {key!r}, expected 'q<i>'")
    return int(m.group(1))


def _edge(key: str) -> tuple[int, int]:
    m = _EKEY.match(key)
    if not m:
        raise ValidationError(f"bad edge key {key!r}, expected 'q<i>_q<j>'")
    return edge_key(int(m.group(1)), int(m.group(2)))


def validate_architecture_dict(data: Mapping[str, Any]) -> list[str]:
    """List every schema problem in a decoded architecture file (empty if valid)."""
    problems = []
    for key, typ in (("name", str), ("num_qubits", int), ("edges", list)):
        if key not in data:
            problems.append(f"missing field {key!r}")
        elif not isinstance(data[key], typ):
            problems.append(f"field {key!r} must be {typ.__name__}")
    if problems:
        return problems
    for e in data["edges"]:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            problems.append(f"edge {e!r} is not a pair of integers")
    noise = data.get("noise", {})
    if not isinstance(noise, Mapping):
        return problems + ["field 'noise' must be an object"]
    unknown = set(noise) - {"gate_error", "prep_error", "meas_error", "t1", "t2"}
    problems += [f"unknown noise table {k!r}" for k in sorted(unknown)]
    for key, table in noise.get("gate_error", {}).items():
        if not (_QKEY.match(key) or _EKEY.match(key)):
            problems.append(f"bad gate_error key {key!r}")
        elif not isinstance(table, Mapping):
            problems.append(f"gate_error[{key!r}] must map gate kinds to probabilities")
    for tname in ("prep_error", "meas_error", "t1", "t2"):
        for key in noise.get(tname, {}):
            if not _QKEY.match(key):
                problems.append(f"bad {tname} key {key!r}")
    durations = data.get("gate_durations", {})
    if not isinstance(durations, Mapping):
        problems.append("field 'gate_durations' must be an object")
    else:
        for k, v in durations.items():
            if not isinstance(v, (int, float)) or v < 0:
                problems.append(f"gate duration {k!r} must be a nonnegative number")
    return problems


def architecture_from_dict(data: Mapping[str, Any]) -> ArchitectureSpec:
    problems = validate_architecture_dict(data)
    if problems:
        raise ValidationError("invalid architecture: " + "; ".join(problems))
    noise = data.get("noise", {})
    one_q: dict[int, dict[str, float]] = {}
    two_q: dict[tuple[int, int], dict[str, float]] = {}
    for key, table in noise.get("gate_error", {}).items():
        parsed = {str(k).lower(): float(v) for k, v in table.items()}
        if _QKEY.match(key):
            one_q[_qubit(key)] = parsed
        else:
            two_q[_edge(key)] = parsed
    params = NoiseParameters(
        gate_error_1q=one_q,
        gate_error_2q=two_q,
        prep_error={_qubit(k): float(v) for k, v in noise.get("prep_error", {}).items()},
        meas_error={_qubit(k): float(v) for k, v in noise.get("meas_error", {}).items()},
        t1={_qubit(k): _as_time(v) for k, v in noise.get("t1", {}).items()},
        t2={_qubit(k): _as_time(v) for k, v in noise.get("t2", {}).items()},
    )
    return ArchitectureSpec(
        name=data["name"],
        num_qubits=data["num_qubits"],
        edges=frozenset(tuple(e) for e in data["edges"]),
        noise=params,
        gate_durations={k.lower(): float(v) for k, v in data.get("gate_durations", {}).items()},
    )


def _time_out(t: float) -> float | str:
    return "inf" if math.isinf(t) else t


def architecture_to_dict(arch: ArchitectureSpec) -> dict[str, Any]:
    n = arch.noise
    gate_error: dict[str, dict[str, float]] = {f"q{q}": dict(t) for q, t in sorted(n.gate_error_1q.items())}
    gate_error |= {f"q{a}_q{b}": dict(t) for (a, b), t in sorted(n.gate_error_2q.items())}
    return {
        "name": arch.name,
        "num_qubits": arch.num_qubits,
        "edges": [list(e) for e in sorted(arch.edges)],
        "noise": {
            "gate_error": gate_error,
            "prep_error": {f"q{q}": p for q, p in sorted(n.prep_error.items())},
            "meas_error": {f"q{q}": p for q, p in sorted(n.meas_error.items())},
            "t1": {f"q{q}": _time_out(t) for q, t in sorted(n.t1.items())},
            "t2": {f"q{q}": _time_out(t) for q, t in sorted(n.t2.items())},
        },
        "gate_durations": dict(arch.gate_durations),
    }


def load_architecture(source: str | Path) -> ArchitectureSpec:
    """Load an architecture from a path, or by name for the shipped files."""
    path = Path(source)
    if not path.exists() and str(source) in SHIPPED:
        text = resources.files("progbench.data.architectures").joinpath(f"{source}.json").read_text()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read architecture file {source}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: not valid JSON ({exc})") from None
    return architecture_from_dict(data)


def ingest_calibration(arch: ArchitectureSpec, text: str) -> ArchitectureSpec:
    """Overlay a calibration snapshot onto ``arch``.

    The snapshot is delimited text with a header row ``parameter,qubits,value``.
    ``parameter`` is one of ``gate_error:<kind>``, ``prep_error``, ``meas_error``,
    ``t1``, ``t2``; ``qubits`` is ``q<i>`` or ``q<i>_q<j>``.
    """
    n = arch.noise
    one_q = {q: dict(t) for q, t in n.gate_error_1q.items()}
    two_q = {e: dict(t) for e, t in n.gate_error_2q.items()}
    flat = {name: dict(getattr(n, name)) for name in ("prep_error", "meas_error", "t1", "t2")}
    dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",;\t")
    reader = csv.DictReader(io.StringIO(text), dialect=dialect)
    if reader.fieldnames is None or {"parameter", "qubits", "value"} - set(reader.fieldnames):
        raise ValidationError("calibration table needs columns parameter, qubits, value")
    for lineno, row in enumerate(reader, 2):
        param, where = row["parameter"].strip(), row["qubits"].strip()
        try:
            value = float(row["value"])
        except (TypeError, ValueError):
            raise ValidationError(f"row {lineno}: bad value {row['value']!r}") from None
        if param.startswith("gate_error:"):
            kind = param.split(":", 1)[1].lower()
            if _QKEY.match(where):
                one_q.setdefault(_qubit(where), {})[kind] = value
            else:
                two_q.setdefault(_edge(where), {})[kind] = value
        elif param in flat:
            flat[param][_qubit(where)] = value
        else:
            raise ValidationError(f"row {lineno}: unknown parameter {param!r}")
    noise = NoiseParameters(gate_error_1q=one_q, gate_error_2q=two_q, **flat)
    return arch.with_noise(noise)
