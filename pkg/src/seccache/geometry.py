"""Regular SBS grid inside the MBS disc and the coverage-count distribution gamma_d.

gamma is estimated on one interior unit cell of the lattice: by translation
symmetry every interior cell has the same coverage pattern, and cells cut by
the MBS boundary are ignored.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import CoverageProfile

MIN_SAMPLES = 10**4
BATCH = 1 << 16


@dataclass(frozen=True)
class GridTopology:
    D: float = 500.0
    spacing: float = 60.0
    r: float = 60.0
    rho: float = 0.05
    N_SBS: int = 0
    users: int = 0

    @property
    def in_regime(self) -> bool:
        """True when spacing/sqrt(2) <= r <= spacing, the range where every point is covered."""
        return self.spacing / math.sqrt(2) - 1e-12 <= self.r <= self.spacing + 1e-12


def lattice_points_in_disc(D: float, spacing: float) -> np.ndarray:
    """All (i*spacing, j*spacing) with Euclidean norm <= D, as an (K, 2) array."""
    k = int(math.floor(D / spacing))
    idx = np.arange(-k, k + 1)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    # relative slack so sites exactly on the rim are kept
    keep = (ii * ii + jj * jj) * spacing**2 <= D * D * (1 + 1e-12)
    return np.stack([ii[keep], jj[keep]], axis=1) * spacing


def build_grid(D: float = 500.0, spacing: float = 60.0, r: float = 60.0, rho: float = 0.05) -> GridTopology:
    for name, val in (("D", D), ("spacing", spacing), ("r", r), ("rho", rho)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val!r}")
    n_sbs = len(lattice_points_in_disc(D, spacing))
    users = int(round(rho * math.pi * D * D))
    return GridTopology(D=D, spacing=spacing, r=r, rho=rho, N_SBS=n_sbs, users=users)


def _neighbour_offsets(spacing: float, r: float) -> np.ndarray:
    # SBS sites that can reach some point of the cell [0, spacing]^2
    k = int(math.ceil(r / spacing))
    idx = np.arange(-k, k + 2)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    return np.stack([ii.ravel(), jj.ravel()], axis=1) * spacing


def _counts(points: np.ndarray, spacing: float, r: float) -> np.ndarray:
    sites = _neighbour_offsets(spacing, r)
    dx = points[:, None, 0] - sites[None, :, 0]
    dy = points[:, None, 1] - sites[None, :, 1]
    return np.count_nonzero(dx * dx + dy * dy <= r * r, axis=1)


def coverage_count(point, topology: GridTopology) -> int:
    """Number of grid SBSs within distance r of ``point``."""
    x, y = float(point[0]), float(point[1])
    s = topology.spacing
    # shift into the reference cell; the lattice is translation invariant
    cx, cy = math.floor(x / s), math.floor(y / s)
    local = np.array([[x - cx * s, y - cy * s]])
    return int(_counts(local, s, topology.r)[0])


def _batch_histogram(seed: int, index: int, size: int, spacing: float, r: float, max_d: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    pts = rng.random((size, 2)) * spacing
    return np.bincount(_counts(pts, spacing, r), minlength=max_d + 1)


def estimate_gamma(
    topology: GridTopology,
    samples: int = 10**6,
    seed: int = 0,
    density: Callable[[int], float] | None = None,
    workers: int = 1,
) -> CoverageProfile:
    """Monte Carlo estimate of gamma_d over one interior cell.

    Samples are drawn in fixed-size batches, batch b from its own seeded
    substream, so the result does not depend on ``workers``. ``density``
    maps a coverage count d to a relative user density (uniform by default).
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    spacing, r = topology.spacing, topology.r
    max_d = len(_neighbour_offsets(spacing, r))
    sizes = [BATCH] * (samples // BATCH)
    if samples % BATCH:
        sizes.append(samples % BATCH)

    def job(b):
        return _batch_histogram(seed, b, sizes[b], spacing, r, max_d)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            hists = list(ex.map(job, range(len(sizes))))
    else:
        hists = [job(b) for b in range(len(sizes))]
    hist = np.sum(hists, axis=0)
    return _profile_from_areas(hist, samples, density)


def _profile_from_areas(hist: np.ndarray, samples: int, density=None) -> CoverageProfile:
    hist = np.asarray(hist, dtype=float)
    covered = hist[1:]
    if covered.sum() == 0:
        raise ValueError("no sampled point is covered by any SBS")
    S = int(np.flatnonzero(covered)[-1]) + 1
    areas = covered[:S]
    if density is not None:
        areas = areas * np.array([density(d) for d in range(1, S + 1)], dtype=float)
    gamma = areas / areas.sum()
    return CoverageProfile(gamma, uncovered=float(hist[0] / hist.sum()), samples=samples)


def gamma_stderr(profile: CoverageProfile) -> np.ndarray:
    """Binomial standard error of each gamma_d for a Monte Carlo profile."""
    if not profile.samples:
        raise ValueError("profile carries no sample count")
    covered = profile.samples * (1.0 - profile.uncovered)
    g = profile.gamma
    return np.sqrt(g * (1 - g) / covered)


def gamma_csv_rows(profile: CoverageProfile) -> list[tuple[int, float]]:
    return [(d, float(g)) for d, g in zip(profile.d, profile.gamma)]
