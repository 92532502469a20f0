"""Domain types shared across the package: library, popularity, coverage, placement."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-12
GAMMA_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Library:
    """N files of B bits each, every file split into n fragments.

    B is metadata only; rates are expressed in fractions of a file.
    """

    N: int
    B: int = 8 * 10**6
    n: int = 1000

    def __post_init__(self):
        if self.N < 1 or self.n < 1 or self.B < 1:
            raise ValueError(f"library sizes must be positive, got N={self.N}, B={self.B}, n={self.n}")


@dataclass(frozen=True)
class PopularityProfile:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen_array(self.p)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("popularity must be a non-empty vector")
        if not np.all(np.isfinite(p)) or np.any(p <= 0):
            raise ValueError("every file probability must be positive and finite")
        if abs(math.fsum(p) - 1.0) > PROB_TOL:
            raise ValueError(f"popularity sums to {math.fsum(p)!r}, not 1")
        object.__setattr__(self, "p", p)

    @property
    def N(self) -> int:
        return self.p.size

    def __len__(self):
        return self.p.size


@dataclass(frozen=True)
class CoverageProfile:
    """gamma[d-1] is the probability that a covered user sees exactly d SBSs."""

    gamma: np.ndarray
    uncovered: float = 0.0
    samples: int | None = None

    def __post_init__(self):
        g = _frozen_array(self.gamma)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("gamma must be a non-empty vector")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ValueError("gamma entries must be non-negative")
        if abs(math.fsum(g) - 1.0) > GAMMA_TOL:
            raise ValueError(f"gamma sums to {math.fsum(g)!r}, not 1")
        object.__setattr__(self, "gamma", g)

    @property
    def S(self) -> int:
        return self.gamma.size

    @property
    def d(self) -> np.ndarray:
        return np.arange(1, self.S + 1)

    def mean_coverage(self) -> float:
        return float(np.dot(self.d, self.gamma))


class Kind(str, enum.Enum):
    NO_SECRECY = "NoSecrecy"
    S1 = "S1"
    S2 = "S2"


@dataclass(frozen=True)
class ScenarioSpec:
    kind: Kind
    Q: int | None = None
    epsilon_sec: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.S1:
            if self.Q is None or self.Q < 1:
                raise ValueError("scenario S1 needs a positive request count Q")
        elif self.Q is not None:
            raise ValueError(f"Q is only meaningful for S1, not {self.kind.value}")
        if not self.epsilon_sec > 0:
            raise ValueError("epsilon_sec must be positive")

    @classmethod
    def no_secrecy(cls, epsilon_sec: float = 1e-9) -> "ScenarioSpec":
        return cls(Kind.NO_SECRECY, epsilon_sec=epsilon_sec)

    @classmethod
    def s1(cls, Q: int, epsilon_sec: float = 1e-9) -> "ScenarioSpec":
        return cls(Kind.S1, Q=Q, epsilon_sec=epsilon_sec)

    @classmethod
    def s2(cls, epsilon_sec: float = 1e-9) -> "ScenarioSpec":
        return cls(Kind.S2, epsilon_sec=epsilon_sec)

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class Placement:
    """Per-file cached fraction q and, once quantized, packet counts m per SBS.

    k holds the total number of encoded packets the MBS creates per file
    (one disjoint batch of m_j packets for every SBS).
    """

    q: np.ndarray
    M: float
    n: int = 1000
    m: np.ndarray | None = None
    n_sbs: int = 1
    k: np.ndarray | None = field(default=None, init=False)

    def __post_init__(self):
        q = _frozen_array(self.q)
        if np.any(q < 0) or np.any(q > 1):
            raise ValueError("cached fractions must lie in [0, 1]")
        object.__setattr__(self, "q", q)
        if self.m is not None:
            m = _frozen_array(self.m, dtype=np.int64)
            if m.shape != q.shape:
                raise ValueError("m and q must have the same length")
            if np.any(m < 0) or np.any(m > self.n):
                raise ValueError("packet counts must lie in [0, n]")
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "k", _frozen_array(self.n_sbs * m, dtype=np.int64))

    @property
    def quantized(self) -> bool:
        return self.m is not None

    @property
    def q_packets(self) -> np.ndarray:
        """Fractions actually realised by the integer packet counts."""
        if self.m is None:
            raise ValueError("placement has not been quantized")
        return self.m / self.n


def zipf_popularity(N: int, alpha: float) -> PopularityProfile:
    """Zipf law p_j proportional to j**-alpha, file 1 most popular."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not math.isfinite(alpha) or alpha < 0:
        raise ValueError(f"alpha must be finite and non-negative, got {alpha!r}")
    w = np.arange(1, N + 1, dtype=float) ** -float(alpha)
    total = math.fsum(w)
    p = w / total
    # one correction pass keeps sum(p) == 1 to within a few ulps for very large N
    p = p / math.fsum(p)
    return PopularityProfile(p)


def eta(p: PopularityProfile) -> float:
    """Sum of inverse popularities, sum_j 1/p_j."""
    return math.fsum(1.0 / p.p)
