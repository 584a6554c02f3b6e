"""``renorm-micro`` command line.

    renorm-micro run <scenario.yaml> [--out prefix] [--jobs N]
    renorm-micro regimes <config.yaml> [--out prefix]

Failures print one JSON error record on stderr (and to ``<prefix>.error.json``
when the output prefix is known) and exit with a nonzero status.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .errors import ParseError, ScenarioError
from .scenarios import (SEED_ENV, csv_bytes, regime_table,
                        run_scenario, write_error, write_report, _versions)


def _fail(err: ScenarioError, prefix: Optional[Path]) -> int:
    try:
        write_error(prefix, err)
    except OSError:
        pass
    print(json.dumps(err.record(), sort_keys=True), file=sys.stderr)
    return err.code


def _error_prefix(path: Path, out: Optional[str]) -> Path:
    """Best-effort output prefix for a scenario that failed to load or run."""
    if out:
        return Path(out)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError):
        doc = None
    if isinstance(doc, dict) and isinstance(doc.get("output"), str) and doc["output"]:
        p = Path(doc["output"])
        return p if p.is_absolute() else path.parent / p
    return path.with_suffix("")


def _cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.scenario)
    try:
        res = run_scenario(path, args.out, args.jobs)
    except ScenarioError as err:
        return _fail(err, _error_prefix(path, args.out))
    print(f"{res.csv_path} ({len(res.rows)} rows)")
    return 0


def _cmd_regimes(args: argparse.Namespace) -> int:
    path = Path(args.config)
    prefix = Path(args.out) if args.out else None
    t0 = time.perf_counter()
    try:
        try:
            doc = yaml.safe_load(path.read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ParseError(f"cannot read {path}: {exc}", "regimes") from None
        if not isinstance(doc, dict):
            raise ParseError("the regime config must be a mapping", "regimes")
        if prefix is None and doc.get("output"):
            prefix = path.parent / doc["output"]
        env_seed = os.environ.get(SEED_ENV, "")
        seed = int(env_seed) if env_seed.isdigit() else None
        columns, rows = regime_table(doc, seed)
    except ScenarioError as err:
        return _fail(err, prefix)
    if prefix is None:
        sys.stdout.write(csv_bytes(columns, rows).decode("utf-8"))
        return 0
    meta = {"scenario": "regimes", "kind": "regimes", "source": str(path), "payload": doc,
            "versions": _versions(), "wall_time_s": time.perf_counter() - t0,
            "started_utc": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    csv_path, _ = write_report(prefix, columns, rows, meta)
    print(f"{csv_path} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="renorm-micro",
                                 description="Renormalized energies of vortices in a circular impurity.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="YAML or JSON scenario file")
    run.add_argument("--out", help="output prefix (default: the scenario's 'output' or the file stem)")
    run.add_argument("--jobs", type=int, default=1, help="concurrent cases in a sweep (default 1)")
    run.set_defaults(func=_cmd_run)
    reg = sub.add_parser("regimes", help="classify (b, degrees) cells")
    reg.add_argument("config", help="YAML file with lists 'b' and 'degrees'")
    reg.add_argument("--out", help="output prefix; CSV goes to stdout without it")
    reg.set_defaults(func=_cmd_regimes)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        build_parser().error("--jobs must be at least 1")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
