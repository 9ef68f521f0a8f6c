"""Command line: ``iontide run <scenario>``, ``iontide list``, ``iontide check``.

Exit status is 0 when every check passes, 1 when any fails and 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .scenarios import (
    DESCRIPTIONS,
    EXIT_CONFIG,
    SCENARIO_NAMES,
    ConfigError,
    RunReport,
    load_config,
    run_scenario,
    write_table,
)
from .units import UnitError

log = logging.getLogger("iontide")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iontide", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"iontide {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write CSV tables plus a JSON report")
    run.add_argument("scenario", choices=SCENARIO_NAMES)
    run.add_argument("--config", type=Path, help="INI file overriding the scenario defaults")
    run.add_argument("--slow", action="store_true", help="include full-scale and long runs")
    run.add_argument("--out", type=Path, help="output directory (default: out/<scenario>)")
    run.add_argument("--seed", type=int, help="seed for Monte-Carlo parts")
    run.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    sub.add_parser("list", help="list the available scenarios")

    chk = sub.add_parser("check", help="run the acceptance checks and print the report table")
    chk.add_argument("--slow", action="store_true", help="include the full-scale anchor and the lifetime run")
    chk.add_argument("--out", type=Path, help="also write the report as JSON here")
    return p


def _run(args) -> int:
    cfg = load_config(args.config, args.scenario, jobs=max(1, args.jobs))
    if args.slow:
        cfg.slow = True
    if args.seed is not None:
        cfg.seed = args.seed
    out = args.out or (cfg.out_dir / cfg.name)
    out.mkdir(parents=True, exist_ok=True)
    result = run_scenario(cfg)
    meta = {"scenario": cfg.name, "iontide": __version__, "seed": str(cfg.seed), "slow": str(cfg.slow)}
    meta.update(cfg.echo())
    for name, table in result.tables.items():
        write_table(out / f"{name}.csv", table, meta)
    (out / "report.json").write_text(result.report.to_json())
    print(result.report.table())
    print(f"wrote {', '.join(sorted(result.tables))} and report.json to {out}")
    return result.report.exit_code


def _check(args) -> int:
    from .scenarios.acceptance import run_all

    t0 = time.perf_counter()
    report = RunReport("acceptance", {"slow": str(args.slow)})
    for c in run_all(slow=args.slow):
        report.add(c)
        print(f"[{c.status}] {c.criterion:>2} {c.name}: {c.got}", flush=True)
    report.wall_time = time.perf_counter() - t0
    print()
    print(report.table())
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(report.to_json())
    return report.exit_code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "list":
            for name in SCENARIO_NAMES:
                print(f"{name:12s} {DESCRIPTIONS[name]}")
            return 0
        if args.command == "run":
            return _run(args)
        return _check(args)
    except (ConfigError, UnitError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
