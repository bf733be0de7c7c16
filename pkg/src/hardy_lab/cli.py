"""Command-line entry point: ``hardy-lab run <scenario>|all`` and ``hardy-lab list``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import experiments as ex
from .errors import ContractError, HardyLabError

log = logging.getLogger("hardy_lab")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _epilog() -> str:
    lines = ["scenarios and CSV schemas (every run also writes checks.csv with columns",
             "name, t, value, target, tolerance, pass, and manifest.json):", ""]
    for s in ex.SCENARIOS.values():
        lines.append(f"  {s.name}: {s.summary}")
        for tname, cols in s.tables.items():
            lines.append(f"      {tname}.csv: {cols}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardy-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog=_epilog())
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario (or 'all')",
                         formatter_class=argparse.RawDescriptionHelpFormatter, epilog=_epilog())
    run.add_argument("scenario", help="scenario name or 'all'")
    run.add_argument("--config", help="flat 'key = value' file")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                     help="override a parameter (repeatable; 'scenario.key=value' when running all)")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--emit-plots", action="store_true", help="also write a matplotlib script")
    run.add_argument("--jobs", type=int, default=1, help="scenarios to run concurrently")
    run.add_argument("--seed", type=int, default=0, help="seed for randomized trials (default 0)")
    run.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("list", help="print the available scenarios")
    return parser


def _run_one(name, overrides, out_dir, seed, emit_plots):
    m = ex.run_scenario(name, overrides, out_dir, seed, emit_plots)
    return name, m.passed, [(c.name, c.passed) for c in m.checks], m.wall_time


def _report(name, passed, checks, wall) -> None:
    failed = [c for c, ok in checks if not ok]
    status = "PASS" if passed else "FAIL"
    print(f"{status} {name}: {len(checks) - len(failed)}/{len(checks)} checks ({wall:.2f} s)")
    for c in failed:
        print(f"    failed: {c}")


def cmd_run(args) -> int:
    try:
        names = sorted(ex.SCENARIOS) if args.scenario == "all" else [args.scenario]
        overrides = {}
        if args.config:
            overrides.update(ex.read_config_file(args.config))
        overrides.update(ex.parse_set(args.overrides))
        if args.scenario == "all":
            routed = ex.split_overrides(names, overrides)
        else:
            routed = {args.scenario: overrides}
        for n in names:
            ex.resolve_parameters(n, routed[n])  # fail fast on bad config
    except (ContractError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    jobs = [(n, routed[n], os.path.join(args.out, n), args.seed, args.emit_plots) for n in names]
    all_ok = True
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_run_one, *zip(*jobs)))
        else:
            results = [_run_one(*j) for j in jobs]
    except ContractError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except HardyLabError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_FAILED
    for r in results:
        _report(*r)
        all_ok &= r[1]
    return EXIT_OK if all_ok else EXIT_FAILED


def cmd_list() -> int:
    for s in ex.SCENARIOS.values():
        print(f"{s.name:18s} {s.summary}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        return cmd_list()
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
