"""Compare the exact solver against grid search on random small instances."""
import argparse

import numpy as np

from seccache import (
    CoverageProfile,
    PopularityProfile,
    ScenarioSpec,
    grid_oracle_solve,
    scenario_bounds,
    solve_placement,
)


def instance(rng, N):
    p = np.sort(rng.dirichlet(np.ones(N)))[::-1]
    S = int(rng.integers(1, 4))
    return PopularityProfile(p / p.sum()), CoverageProfile(rng.dirichlet(np.ones(S)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--step", type=float, default=0.01)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    gaps = []
    for t in range(args.trials):
        N = int(rng.integers(2, 4))
        p, g = instance(rng, N)
        sc = [ScenarioSpec.no_secrecy(), ScenarioSpec.s1(int(rng.integers(1, 8))), ScenarioSpec.s2()][t % 3]
        b = scenario_bounds(sc, p, g.S)
        M = float(rng.uniform(0, N))
        exact = solve_placement(p, g, M, b)
        grid = grid_oracle_solve(p, g, M, b, args.step)
        gaps.append(grid.rate - exact.rate)
    gaps = np.array(gaps)
    print(f"trials={args.trials} max|gap|={np.abs(gaps).max():.3e} min(grid-exact)={gaps.min():.3e}")


if __name__ == "__main__":
    main()
