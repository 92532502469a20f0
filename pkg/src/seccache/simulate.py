"""Monte Carlo replay of the delivery phase.

Encoded packets are never materialised. A request for file j from a user
covered by d SBSs receives d*m_j distinct cached packets and the MBS sends
max(0, n - d*m_j) more over the backhaul; eavesdroppers are modelled by
counting the distinct packets they see.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import CoverageProfile, Placement, PopularityProfile

BATCH = 1 << 16

# substream tags, so adding requests never shifts the S1 draws
_RATE, _LINK, _TRIAL = 0, 1, 2


class RequestMode(str, enum.Enum):
    EXPECTED = "Expected"
    STOCHASTIC = "Stochastic"


@dataclass(frozen=True)
class SimConfig:
    requests_total: int = 10**5
    seed: int = 0
    request_mode: RequestMode = RequestMode.EXPECTED
    n: int = 1000
    Q: int = 100

    def __post_init__(self):
        object.__setattr__(self, "request_mode", RequestMode(self.request_mode))
        if self.requests_total < 1:
            raise ValueError("requests_total must be at least 1")
        if self.Q < 1 or self.n < 1:
            raise ValueError("Q and n must be positive")


@dataclass(frozen=True)
class SimReport:
    empirical_rate: float
    stderr: float
    s1_intercepted: np.ndarray
    s2_intercepted: np.ndarray
    n: int

    @property
    def s1_breach(self) -> bool:
        return bool(np.any(self.s1_intercepted >= self.n))

    @property
    def s2_breach(self) -> bool:
        return bool(np.any(self.s2_intercepted >= self.n))

    def csv_row(self) -> dict:
        return {
            "empirical_rate": repr(self.empirical_rate),
            "stderr": repr(self.stderr),
            "s1_max_intercepted": int(self.s1_intercepted.max()),
            "s2_max_intercepted": int(self.s2_intercepted.max()),
            "s1_breach": self.s1_breach,
            "s2_breach": self.s2_breach,
        }


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _validate(placement: Placement, p: PopularityProfile, config: SimConfig) -> np.ndarray:
    if not placement.quantized:
        raise ValueError("simulation needs a quantized placement (integer packet counts)")
    if placement.n != config.n:
        raise ValueError(f"placement uses n={placement.n} but the config says n={config.n}")
    if placement.m.size != p.N:
        raise ValueError("placement and popularity disagree on the number of files")
    return placement.m.astype(np.int64)


def _link_packets(m: np.ndarray, n: int, S: int) -> np.ndarray:
    """(N, S) packets sent over the backhaul for one request of file j at coverage d."""
    d = np.arange(1, S + 1)
    return np.maximum(0, n - np.outer(m, d))


def expected_link_interception(m, n: int, p: PopularityProfile, gamma: CoverageProfile, Q: int) -> np.ndarray:
    """Whole packets of each file seen on a wiretapped link when requests follow their means.

    The expectation is floored: a file with P_j expected packets leaks
    exactly when P_j >= n, and flooring keeps that equivalence.
    """
    per_req = _link_packets(np.asarray(m, dtype=np.int64), n, gamma.S)
    P = Q * p.p * (per_req @ gamma.gamma)
    return np.floor(P * (1 + 1e-12)).astype(np.int64)


def _stochastic_link(rng, m, n, p, gamma, Q) -> np.ndarray:
    joint = np.outer(p.p, gamma.gamma).ravel()
    counts = rng.multinomial(Q, joint / joint.sum()).reshape(p.N, gamma.S)
    return (counts * _link_packets(m, n, gamma.S)).sum(axis=1)


def simulate_delivery(
    placement: Placement, p: PopularityProfile, gamma: CoverageProfile, config: SimConfig
) -> SimReport:
    m = _validate(placement, p, config)
    n, R = config.n, config.requests_total
    sizes = [BATCH] * (R // BATCH) + ([R % BATCH] if R % BATCH else [])

    total = 0.0
    total_sq = 0.0
    for b, size in enumerate(sizes):
        rng = _rng(config.seed, _RATE, b)
        files = rng.choice(p.N, size=size, p=p.p)
        d = rng.choice(gamma.S, size=size, p=gamma.gamma) + 1
        sent = np.maximum(0, n - m[files] * d).astype(float) / n
        total += math.fsum(sent)
        total_sq += math.fsum(sent * sent)
    mean = total / R
    var = max(total_sq / R - mean * mean, 0.0) * R / (R - 1) if R > 1 else 0.0
    stderr = math.sqrt(var / R)

    if config.request_mode is RequestMode.EXPECTED:
        s1 = expected_link_interception(m, n, p, gamma, config.Q)
    else:
        s1 = _stochastic_link(_rng(config.seed, _LINK), m, n, p, gamma, config.Q)

    # worst-placed cache eavesdropper sits in range of S SBSs
    s2 = m * gamma.S
    return SimReport(mean, stderr, s1.astype(np.int64), s2.astype(np.int64), n)


def breach_probability_s1(
    placement: Placement, p: PopularityProfile, gamma: CoverageProfile, config: SimConfig, trials: int = 1000
) -> float:
    """Fraction of independent delivery phases in which the wiretapped link leaks a file."""
    m = _validate(placement, p, config)
    if config.request_mode is not RequestMode.STOCHASTIC:
        raise ValueError("breach probability is only meaningful with stochastic requests")
    if trials < 1:
        raise ValueError("trials must be positive")
    breaches = 0
    for t in range(trials):
        seen = _stochastic_link(_rng(config.seed, _TRIAL, t), m, config.n, p, gamma, config.Q)
        breaches += bool(np.any(seen >= config.n))
    return breaches / trials
