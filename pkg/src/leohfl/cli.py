"""Command line entry point.

    leohfl run --scenario s.json --seed 3 --agg fedsel fedavg --out results/
    leohfl schedule --assoc nearest --rounds 60

Log verbosity comes from LEOHFL_LOG_LEVEL (default WARNING).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .aggregation import AggregatorConfig, Scheme
from .association import ASSOCIATION_MODES
from .harness import (bundled_scenario, emit_reports, load_scenario, run, schedule_only,
                      schedule_statistics)

LOG_ENV = "LEOHFL_LOG_LEVEL"


def _scenario(args):
    sc = load_scenario(args.scenario) if args.scenario else bundled_scenario()
    return sc.with_overrides(seed=args.seed, association_mode=args.assoc,
                             global_rounds=args.rounds, subregion_rounds=args.subrounds)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="scenario JSON file (default: bundled three-gateway layout)")
    p.add_argument("--seed", type=int)
    p.add_argument("--assoc", choices=sorted(ASSOCIATION_MODES))
    p.add_argument("--rounds", type=int, help="global rounds T")
    p.add_argument("--subrounds", type=int, help="sub-region rounds per global round M")


def cmd_run(args) -> int:
    sc = _scenario(args)
    schemes = args.agg or [sc.aggregator.scheme.value]
    results = []
    for name in schemes:
        agg = AggregatorConfig(Scheme.parse(name),
                               sc.aggregator.beta if args.beta is None else args.beta,
                               sc.aggregator.kappa if args.kappa is None else args.kappa)
        results.append(run(replace(sc, aggregator=agg), max_workers=args.workers))
    paths = emit_reports(results, args.out)
    for name, path in paths.items():
        print(f"wrote {path}")
    return 0


def cmd_schedule(args) -> int:
    sc = _scenario(args)
    st = schedule_statistics(schedule_only(sc))
    print("satellite,mean_freq_ghz,mean_window_s")
    for s in st.per_satellite_window_s:
        print(f"{s},{st.per_satellite_freq_hz[s] / 1e9:.4f},{st.per_satellite_window_s[s]:.0f}")
    print(f"avg,{st.mean_freq_hz / 1e9:.4f},{st.mean_window_s:.0f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leohfl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train and write metrics/summary tables and plots")
    _add_common(p)
    p.add_argument("--agg", nargs="+", choices=[s.value for s in Scheme],
                   help="one or more aggregation schemes; each is a separate run")
    p.add_argument("--beta", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--workers", type=int, default=None, help="parallel satellite trainers")
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("schedule", help="association/frequency statistics without training")
    _add_common(p)
    p.set_defaults(func=cmd_schedule)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
