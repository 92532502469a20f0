"""Secrecy conditions against the backhaul (S1) and cache (S2) eavesdroppers.

A file leaks when an eavesdropper collects n or more distinct encoded
packets of it. Every check reports a signed per-file margin; the placement
is secure only if all margins are strictly positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CoverageProfile, PopularityProfile, ScenarioSpec
from .optimizer import s1_active, s1_raw_threshold


@dataclass(frozen=True)
class SecrecyReport:
    per_file_margin: np.ndarray
    scenario: ScenarioSpec

    @property
    def secure(self) -> bool:
        return bool(np.all(self.per_file_margin > 0))

    @property
    def binding_files(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.per_file_margin <= 0)]

    @property
    def min_margin(self) -> float:
        return float(np.min(self.per_file_margin))

    def csv_rows(self):
        for j, margin in enumerate(self.per_file_margin):
            yield j + 1, float(margin), int(margin <= 0)


def expected_s1_interception(q, n: int, p: PopularityProfile, gamma: CoverageProfile, Q: int) -> np.ndarray:
    """Expected packets of each file crossing one wiretapped MBS-SBS link.

    Sum over coverage counts d of Q*gamma_d*p_j*n*(1 - min(1, d*q_j)).
    """
    q = np.asarray(q, dtype=float)
    miss = 1.0 - np.minimum(1.0, np.outer(gamma.d, q))
    return Q * p.p * n * (gamma.gamma @ miss)


def check_s1_general(q, n: int, p: PopularityProfile, gamma: CoverageProfile, Q: int) -> SecrecyReport:
    """Exact S1 condition for the actual coverage profile: P_j < n for all files."""
    P = expected_s1_interception(q, n, p, gamma, Q)
    return SecrecyReport((n - P) / n, ScenarioSpec.s1(Q))


def s1_implicit_threshold(m_j: int, n: int, p_j: float, gamma: CoverageProfile, Q: int) -> float:
    """Right-hand side of the implicit S1 bound on m_j, with I = min(S, floor(n/m_j)).

    Only for documentation and cross-checks; check_s1_general is the
    operational form.
    """
    I = gamma.S if m_j == 0 else min(gamma.S, n // m_j)
    g = gamma.gamma[:I]
    d = gamma.d[:I]
    return n / (Q * p_j) * (Q * p_j * g.sum() - 1.0) / float(np.dot(d, g))


def check_s1_worstcase(q, p: PopularityProfile, Q: int) -> SecrecyReport:
    """S1 condition assuming every user reaches a single SBS.

    Files with Q*p_j < 1 cannot be recovered even with an empty cache;
    their margin is +inf.
    """
    q = np.asarray(q, dtype=float)
    margin = np.where(s1_active(p, Q), q - s1_raw_threshold(p, Q), math.inf)
    return SecrecyReport(margin, ScenarioSpec.s1(Q))


def check_s2(q, S: int) -> SecrecyReport:
    """A user covered by S SBSs reads S*m_j distinct packets; secure iff q_j < 1/S."""
    if S < 1:
        raise ValueError("S must be at least 1")
    q = np.asarray(q, dtype=float)
    return SecrecyReport(1.0 / S - q, ScenarioSpec.s2())


def min_cache_size_s1(p: PopularityProfile, Q: int) -> float:
    """Smallest cache (in files) above which an S1-secure placement exists.

    This is the sum of the per-file lower bounds; feasibility needs M strictly
    above it.
    """
    return math.fsum(s1_raw_threshold(p, Q))


def s1_cache_bound_unclamped(p: PopularityProfile, Q: int) -> float:
    """N - eta/Q: the necessary condition obtained by summing un-clamped bounds.

    Never exceeds min_cache_size_s1 and can be negative.
    """
    return p.N - math.fsum(1.0 / p.p) / Q


def max_cache_size_s2(N: int, S: int) -> float:
    """Strict upper bound N/S on an S2-secure cache size."""
    if S < 1:
        raise ValueError("S must be at least 1")
    return N / S
