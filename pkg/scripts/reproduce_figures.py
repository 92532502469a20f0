"""Write CSVs for every default sweep plus the M_min-vs-Q grid over alpha and N.

    python3 scripts/reproduce_figures.py --out results/
"""
import argparse
import logging
import pathlib
import time

from seccache.experiments import SWEEP_HEADER, ExperimentConfig, Sweep, run_sweep, to_csv

log = logging.getLogger("reproduce")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--samples", type=int, default=200_000, help="Monte Carlo samples for gamma")
    ap.add_argument("--simulate", action="store_true", help="add delivery-phase simulation columns")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    common = dict(seed=args.seed, samples=args.samples, simulate=args.simulate)

    for sweep in (Sweep.LIBRARY_SIZE, Sweep.COVERAGE_RANGE, Sweep.CACHE_SIZE):
        t0 = time.perf_counter()
        rows = run_sweep(ExperimentConfig(sweep=sweep, **common))
        path = out / f"{sweep.value}.csv"
        path.write_text(to_csv(rows, SWEEP_HEADER))
        log.info("%s: %d rows in %.1fs -> %s", sweep.value, len(rows), time.perf_counter() - t0, path)

    rows = []
    for alpha in (0.4, 0.7, 1.0):
        for N in (100, 200):
            cfg = ExperimentConfig(sweep=Sweep.MIN_CACHE_VS_Q, N=N, alpha=alpha, **common)
            for value, scenario, rate, feasible, extra in run_sweep(cfg):
                rows.append((alpha, N, value, extra.split("m_min=")[1].split(";")[0]))
    path = out / "MinCacheVsQ.csv"
    path.write_text(to_csv(rows, ("alpha", "N", "Q", "m_min")))
    log.info("MinCacheVsQ: %d rows -> %s", len(rows), path)


if __name__ == "__main__":
    main()
