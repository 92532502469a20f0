"""Backhaul-rate objective and the exact placement solver.

Each file's cost p_j * sum_d gamma_d * (1 - min(1, d*q_j)) is convex,
decreasing and piecewise linear in q_j with breakpoints at q = 1/d. Under a
single budget sum_j q_j = M and per-file boxes, filling the steepest pieces
first is optimal, so the solver is a sort plus a sweep.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import CoverageProfile, Kind, Placement, PopularityProfile, ScenarioSpec

BUDGET_TOL = 1e-12


class QuantizationError(ValueError):
    """Integer packet counts cannot meet both the secrecy bounds and the cache budget."""


@dataclass(frozen=True)
class Bounds:
    l: np.ndarray
    u: np.ndarray
    scenario: ScenarioSpec

    def __post_init__(self):
        l = np.asarray(self.l, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if l.shape != u.shape or l.ndim != 1:
            raise ValueError("bounds must be two vectors of equal length")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "u", u)

    @property
    def valid(self) -> bool:
        return bool(np.all(self.l >= 0) and np.all(self.l <= self.u) and np.all(self.u <= 1))


@dataclass(frozen=True)
class SolveResult:
    placement: Placement
    rate: float
    feasible: bool
    active_budget: float
    per_file_rate: np.ndarray
    bounds: Bounds
    reason: str = ""

    @property
    def q(self) -> np.ndarray:
        return self.placement.q


def _check_q(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(q)) or np.any(q < 0) or np.any(q > 1):
        raise ValueError("cached fractions must lie in [0, 1]")
    return q


def per_file_rate(q, p: PopularityProfile, gamma: CoverageProfile) -> np.ndarray:
    """Contribution of each file to the backhaul rate."""
    q = _check_q(q)
    if q.shape != p.p.shape:
        raise ValueError(f"q has {q.size} entries for {p.N} files")
    hit = np.minimum(1.0, np.outer(gamma.d, q))  # (S, N)
    miss = gamma.gamma @ (1.0 - hit) * p.p
    served = gamma.gamma @ hit * p.p
    # normalising by total mass makes q=0 -> 1 and q=1 -> 0 exact in floating point
    total = math.fsum(miss) + math.fsum(served)
    return miss / total


def backhaul_rate(q, p: PopularityProfile, gamma: CoverageProfile) -> float:
    """Expected fraction of a requested file sent over the backhaul."""
    return math.fsum(per_file_rate(q, p, gamma))


def s1_raw_threshold(p: PopularityProfile, Q: int) -> np.ndarray:
    """(1 - 1/(Q p_j))^+ per file."""
    return np.maximum(1.0 - 1.0 / (Q * p.p), 0.0)


def s1_active(p: PopularityProfile, Q: int) -> np.ndarray:
    """Files the wiretapper could recover from an empty cache (Q p_j >= 1).

    At Q p_j == 1 an empty cache leaks exactly n packets, so the constraint
    m_j > 0 still binds there.
    """
    return Q * p.p >= 1.0


def scenario_bounds(scenario: ScenarioSpec, p: PopularityProfile, S: int) -> Bounds:
    """Per-file feasible interval [l_j, u_j] for the given threat model.

    Strict inequalities are closed with the scenario's epsilon_sec margin.
    Files with Q*p_j < 1 carry no S1 constraint and keep l_j = 0.
    """
    if S < 1:
        raise ValueError("S must be at least 1")
    N = p.N
    eps = scenario.epsilon_sec
    if scenario.kind is Kind.NO_SECRECY:
        return Bounds(np.zeros(N), np.ones(N), scenario)
    if scenario.kind is Kind.S1:
        raw = s1_raw_threshold(p, scenario.Q)
        l = np.where(s1_active(p, scenario.Q), np.minimum(raw + eps, 1.0), 0.0)
        return Bounds(l, np.ones(N), scenario)
    return Bounds(np.zeros(N), np.full(N, max(1.0 / S - eps, 0.0)), scenario)


def _pieces(p: PopularityProfile, gamma: CoverageProfile, bounds: Bounds):
    """Linear pieces (slope, file, start, end) of every file's cost inside its box."""
    S = gamma.S
    # slope on (1/(k+1), 1/k] is sum_{d<=k} d*gamma_d
    cum = np.cumsum(gamma.d * gamma.gamma)
    edges = [0.0] + [1.0 / k for k in range(S, 0, -1)]
    out = []
    for j in range(p.N):
        lo, hi = bounds.l[j], bounds.u[j]
        for i in range(S):
            a, b = max(edges[i], lo), min(edges[i + 1], hi)
            if b > a:
                k = S - i  # active coverage counts d = 1..k
                out.append((p.p[j] * cum[k - 1], j, a, b))
    out.sort(key=lambda t: (-t[0], t[1], t[2]))
    return out


def _result(q, M, p, gamma, bounds, feasible, reason="", n=1000):
    q = np.clip(q, 0.0, 1.0)
    pf = per_file_rate(q, p, gamma)
    return SolveResult(
        placement=Placement(q, M=M, n=n),
        rate=math.fsum(pf),
        feasible=feasible,
        active_budget=math.fsum(q),
        per_file_rate=pf,
        bounds=bounds,
        reason=reason,
    )


def solve_placement(
    p: PopularityProfile, gamma: CoverageProfile, M: float, bounds: Bounds, n: int = 1000
) -> SolveResult:
    """Globally optimal continuous placement for cache size M (in files)."""
    if M < 0 or not math.isfinite(M):
        raise ValueError(f"cache size must be a finite non-negative number, got {M!r}")
    if not bounds.valid:
        raise ValueError("bounds must satisfy 0 <= l <= u <= 1")
    if bounds.l.size != p.N:
        raise ValueError("bounds and popularity disagree on the number of files")

    need = math.fsum(bounds.l)
    if need > M + BUDGET_TOL * p.N:
        if bounds.scenario.kind is Kind.S1:
            # below the secrecy threshold the cache stays empty
            return _result(np.zeros(p.N), M, p, gamma, bounds, False, "s1-lower-bound", n)
        return _result(bounds.l, M, p, gamma, bounds, False, "budget", n)

    if math.fsum(bounds.u) <= M:
        reason = "" if math.fsum(bounds.u) == M else "cache-saturated"
        return _result(bounds.u, M, p, gamma, bounds, True, reason, n)

    q = bounds.l.copy()
    remaining = M - need
    for _, j, a, b in _pieces(p, gamma, bounds):
        if remaining <= 0:
            break
        take = min(b - a, remaining)
        q[j] += take
        remaining -= take
    return _result(q, M, p, gamma, bounds, True, "", n)


def _rate_on_grid(Qgrid: np.ndarray, p, gamma) -> np.ndarray:
    # Qgrid is (K, N); evaluated term by term, independent of per_file_rate
    total = np.zeros(Qgrid.shape[0])
    for d, g in zip(range(1, gamma.S + 1), gamma.gamma):
        total += g * ((1.0 - np.minimum(1.0, d * Qgrid)) @ p.p)
    return total


def grid_oracle_solve(
    p: PopularityProfile, gamma: CoverageProfile, M: float, bounds: Bounds, step: float = 0.01
) -> SolveResult:
    """Exhaustive search on a grid of step ``step``; a check for tiny instances only.

    The first N-1 coordinates range over l_j + step*k inside their box and the
    last one absorbs the rest of the budget, so every candidate spends exactly
    min(M, sum u).
    """
    N = p.N
    if N > 4:
        raise ValueError("grid oracle is limited to N <= 4")
    if step > 0.05 or step <= 0:
        raise ValueError("step must lie in (0, 0.05]")
    l, u = bounds.l, bounds.u
    if sum(l) > M + BUDGET_TOL * N:
        if bounds.scenario.kind is Kind.S1:
            return _result(np.zeros(N), M, p, gamma, bounds, False, "s1-lower-bound")
        return _result(l, M, p, gamma, bounds, False, "budget")
    if sum(u) <= M:
        return _result(u, M, p, gamma, bounds, True)

    axes = []
    for j in range(N - 1):
        count = int(math.floor((u[j] - l[j]) / step + 1e-9))
        axes.append(np.append(l[j] + step * np.arange(count + 1), u[j]))
    if axes:
        head = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    else:
        head = np.zeros((1, 0))
    last = M - head.sum(axis=1)
    ok = (last >= l[N - 1] - 1e-12) & (last <= u[N - 1] + 1e-12)
    if not ok.any():
        return _result(l, M, p, gamma, bounds, False, "grid-empty")
    cand = np.column_stack([head[ok], np.clip(last[ok], l[N - 1], u[N - 1])])
    vals = _rate_on_grid(cand, p, gamma)
    return _result(cand[int(np.argmin(vals))], M, p, gamma, bounds, True)


def quantize(
    placement: Placement,
    n: int,
    scenario: ScenarioSpec,
    p: PopularityProfile | None = None,
    S: int | None = None,
    n_sbs: int = 1,
) -> Placement:
    """Integer packet counts m_j per SBS that keep the secrecy bounds strict.

    S1: files with an active constraint get at least the smallest integer
    strictly above n*(1 - 1/(Q p_j)); packets are then taken back from the
    least popular files until sum m_j <= M*n. S2: m_j <= ceil(n/S) - 1.
    """
    q = placement.q
    m = np.floor(n * q + 1e-9).astype(np.int64)
    budget = int(math.floor(placement.M * n + 1e-9))
    if scenario.kind is Kind.S2:
        if S is None:
            raise ValueError("S2 quantization needs S")
        m = np.minimum(m, math.ceil(n / S) - 1)
    elif scenario.kind is Kind.S1:
        if p is None:
            raise ValueError("S1 quantization needs the popularity profile")
        raw = s1_raw_threshold(p, scenario.Q)
        active = s1_active(p, scenario.Q)
        floor_m = np.where(active, np.floor(n * raw + 1e-9).astype(np.int64) + 1, 0)
        floor_m = np.minimum(floor_m, n)
        m = np.maximum(m, floor_m)
        excess = int(m.sum()) - budget
        if excess > 0:
            # least popular first, ties to the higher index
            for j in sorted(range(len(m)), key=lambda j: (p.p[j], -j)):
                cut = min(excess, int(m[j] - floor_m[j]))
                m[j] -= cut
                excess -= cut
                if excess == 0:
                    break
            if excess > 0:
                raise QuantizationError(
                    f"secrecy needs {int(floor_m.sum())} packets per SBS but the cache holds {budget}"
                )
    m = np.minimum(m, n)
    return Placement(q, M=placement.M, n=n, m=m, n_sbs=n_sbs)
