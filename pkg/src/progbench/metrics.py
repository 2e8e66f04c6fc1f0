"""Hellinger distance and the alpha/beta/gamma program benchmarks.

alpha  device vs ideal
beta   device vs noisy model
gamma  noisy model vs ideal

Because the Hellinger distance is a metric, ``alpha <= beta + gamma``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping

from progbench.errors import ValidationError
from progbench.statevector import Counts, OutcomeDistribution

NORMALIZATION_TOL = 1e-6
TIE_BAND = 1e-12
TABLE_COLUMNS = ("machine", "algorithm", "alpha", "beta", "gamma", "abs_gap", "estimation", "confidence", "shots")


class Estimation(str, enum.Enum):
    OVERESTIMATE = "overestimate"
    UNDERESTIMATE = "underestimate"
    EXACT = "exact"


class Confidence(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


def _probs(p: OutcomeDistribution | Mapping[str, float]) -> Mapping[str, float]:
    probs = p.probs if isinstance(p, OutcomeDistribution) else p
    total = math.fsum(probs.values())
    if abs(total - 1) > NORMALIZATION_TOL:
        raise ValidationError(f"distribution sums to {total}, not 1")
    if any(v < 0 for v in probs.values()):
        raise ValidationError("distribution has negative entries")
    return probs


def hellinger(p: OutcomeDistribution | Mapping[str, float], q: OutcomeDistribution | Mapping[str, float]) -> float:
    """Hellinger distance over the union of both supports (missing outcomes count as 0)."""
    pp, qq = _probs(p), _probs(q)
    total = math.fsum((math.sqrt(pp.get(k, 0.0)) - math.sqrt(qq.get(k, 0.0))) ** 2 for k in pp.keys() | qq.keys())
    return min(1.0, math.sqrt(total / 2))


def counts_to_distribution(c: Counts) -> OutcomeDistribution:
    if c.shots <= 0:
        raise ValidationError("zero shots")
    return OutcomeDistribution({k: n / c.shots for k, n in c.counts.items() if n}, c.num_clbits)


@dataclass(frozen=True)
class BenchmarkReport:
    alpha: float
    beta: float
    gamma: float
    abs_gap: float
    estimation: Estimation
    confidence: Confidence
    machine: str = ""
    algorithm: str = ""
    shots: int = 0

    def satisfies_triangle(self, tol: float = 1e-9) -> bool:
        return self.alpha <= self.beta + self.gamma + tol

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["estimation"] = self.estimation.value
        d["confidence"] = self.confidence.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "BenchmarkReport":
        d = dict(d)
        d["estimation"] = Estimation(d["estimation"])
        d["confidence"] = Confidence(d["confidence"])
        return cls(**d)

    def row(self, digits: int = 3) -> list[str]:
        """Table row: machine, algorithm, alpha, beta, gamma, |alpha-gamma|, estimation, confidence, shots."""
        f = f"{{:.{digits}f}}"
        return [
            self.machine,
            self.algorithm,
            f.format(self.alpha),
            f.format(self.beta),
            f.format(self.gamma),
            f.format(self.abs_gap),
            self.estimation.value,
            self.confidence.value,
            str(self.shots),
        ]


def classify(alpha: float, beta: float, gamma: float) -> tuple[float, Estimation, Confidence]:
    """Gap, estimation direction and confidence from the three distances.

    alpha > gamma means the calibrated noise understates the device noise.
    Confidence is high when beta covers the gap.
    """
    gap = abs(alpha - gamma)
    if gap < TIE_BAND:
        est = Estimation.EXACT
    elif alpha > gamma:
        est = Estimation.UNDERESTIMATE
    else:
        est = Estimation.OVERESTIMATE
    conf = Confidence.HIGH if beta >= gap else Confidence.LOW
    return gap, est, conf


def compute_benchmarks(
    q_dist: OutcomeDistribution,
    n_dist: OutcomeDistribution,
    d_dist: OutcomeDistribution,
    machine: str = "",
    algorithm: str = "",
    shots: int = 0,
) -> BenchmarkReport:
    """Benchmarks from device (q), noisy-model (n) and ideal (d) distributions."""
    widths = {q_dist.num_clbits, n_dist.num_clbits, d_dist.num_clbits}
    if len(widths) != 1:
        raise ValidationError(f"distribution widths differ: {sorted(widths)}")
    alpha = hellinger(q_dist, d_dist)
    beta = hellinger(q_dist, n_dist)
    gamma = hellinger(n_dist, d_dist)
    return report_from_values(alpha, beta, gamma, machine, algorithm, shots)


def report_from_values(
    alpha: float, beta: float, gamma: float, machine: str = "", algorithm: str = "", shots: int = 0
) -> BenchmarkReport:
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"{name} = {v} outside [0, 1]")
    gap, est, conf = classify(alpha, beta, gamma)
    return BenchmarkReport(alpha, beta, gamma, gap, est, conf, machine, algorithm, shots)
