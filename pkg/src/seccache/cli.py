"""Command line front end: ``seccache {sweep,placement,simulate,gamma}``."""
from __future__ import annotations

import argparse
import logging
import sys

from .experiments import (
    PLACEMENT_HEADER,
    SWEEP_HEADER,
    ConfigError,
    InvariantViolation,
    coverage_for,
    emit_placement,
    load_config,
    parse_config,
    read_placement,
    run_sweep,
    simulate_point,
    to_csv,
)
from .geometry import build_grid, gamma_csv_rows
from .optimizer import QuantizationError

log = logging.getLogger("seccache")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (defaults reproduce the baseline)")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--scenarios", help="comma separated subset of NoSecrecy,S1,S2")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="seccache", description="Secure coded cache placement for small cells.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="run the configured parameter sweep")
    sub.add_parser("placement", parents=[common], help="per-file placement table for the first scenario")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo delivery phase at the base point")
    sim.add_argument("--placement", help="placement CSV to simulate instead of solving")
    sub.add_parser("gamma", parents=[common], help="coverage-count distribution gamma_d")
    return ap


def _config(args):
    scenarios = args.scenarios.split(",") if args.scenarios else None
    overrides = {"seed": args.seed, "scenarios": scenarios}
    if args.config:
        return load_config(args.config, **overrides)
    return parse_config("", **overrides)


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        if args.command == "sweep":
            text = to_csv(run_sweep(cfg), SWEEP_HEADER)
        elif args.command == "placement":
            text = to_csv(emit_placement(cfg, cfg.scenarios[0]), PLACEMENT_HEADER)
        elif args.command == "simulate":
            placement = None
            if args.placement:
                with open(args.placement) as fh:
                    placement = read_placement(fh.read(), cfg)
            report, analytic = simulate_point(cfg, cfg.scenarios[0], placement)
            row = {"scenario": cfg.scenarios[0], "analytic_rate": repr(analytic), **report.csv_row()}
            text = to_csv([[str(v).lower() if isinstance(v, bool) else v for v in row.values()]], list(row))
        else:
            topo = build_grid(D=cfg.D, spacing=cfg.spacing, r=cfg.r, rho=cfg.rho)
            profile = coverage_for(float(cfg.spacing), float(cfg.r), cfg.samples, cfg.seed)
            log.info("N_SBS=%d users=%d uncovered=%r", topo.N_SBS, topo.users, profile.uncovered)
            if not topo.in_regime:
                log.warning("r=%g lies outside [spacing/sqrt(2), spacing]", cfg.r)
            text = to_csv([(d, repr(g)) for d, g in gamma_csv_rows(profile)], ("d", "gamma_d"))
    except (ConfigError, QuantizationError, OSError) as exc:
        print(f"seccache: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"seccache: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    _write(text, args.out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
