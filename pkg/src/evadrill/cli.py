"""Command line entry point.

Subcommands: serve, simulate, replay, analyze, validate-plan. Machine
readable results go to stdout; diagnostics go to stderr. Every
subcommand exits 0 on success and nonzero on failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import (ConfigError, DYNAMICS_FIELDS, load_dynamics,
                     resolve_log_dir)
from .floorplan import FloorplanError, bundled_plan, load_floorplan
from .telemetry import TelemetryError


def _load_plan(path: str | None):
    if path is None:
        return bundled_plan()
    return load_floorplan(path)


def _add_plan_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--plan", metavar="PATH", default=None,
                   help="floorplan JSON file (default: bundled plan)")


def _add_dyn_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", default=None,
                   help="INI run config; [dynamics] section sets parameters")
    for name in DYNAMICS_FIELDS:
        p.add_argument(f"--dyn.{name}", dest=f"dyn_{name}", type=float,
                       default=None, metavar="X",
                       help=f"override dynamics parameter {name}")


def _dynamics(args: argparse.Namespace):
    overrides = {name: getattr(args, f"dyn_{name}")
                 for name in DYNAMICS_FIELDS}
    return load_dynamics(args.config, overrides)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .wsapp import create_app
    plan = _load_plan(args.plan)
    params = _dynamics(args)
    log_dir = resolve_log_dir(args.logs)
    log_dir.mkdir(parents=True, exist_ok=True)
    app = create_app(plan, params=params, log_dir=log_dir, ui_dir=args.ui,
                     time_scale=args.time_scale, cell_size=args.cell_size)
    print(f"plan {plan.name!r}, logs in {log_dir}", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    from .population import (BehaviorProfile, bundled_profile, run_batch)
    from .telemetry import records_to_csv, write_log
    plan = _load_plan(args.plan)
    params = _dynamics(args)
    if args.profile is None:
        profile = bundled_profile()
    else:
        obj = json.loads(Path(args.profile).read_text("utf-8"))
        profile = BehaviorProfile.from_json_dict(obj)
    mode = "isolated" if args.isolated else "shared"
    result = run_batch(plan, profile, args.agents, args.seed, params=params,
                       mode=mode, cell_size=args.cell_size)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for log in result.logs:
        write_log(log, out / f"{log.session_id}.evlog")
    csv_path = out / "records.csv"
    csv_path.write_text(records_to_csv(list(result.records)), "utf-8")
    for f in result.failed:
        print(f"agent {f.subject_id} failed: {f.reason}", file=sys.stderr)
    if args.figure:
        from .viz import records_figure
        records_figure(result.records, args.figure)
    print(json.dumps({"agents": len(result.records),
                      "failed": len(result.failed),
                      "logs": len(result.logs),
                      "csv": str(csv_path)}))
    return 0 if not result.failed else 1


def cmd_replay(args: argparse.Namespace) -> int:
    from .session import replay_session
    from .telemetry import read_log, summarize
    log = read_log(args.logfile)
    plan = _load_plan(args.plan)
    params = _dynamics(args)
    report, replayed = replay_session(log, plan, params=params,
                                      cell_size=args.cell_size)
    record = summarize(log)
    print(json.dumps({
        "verdict": "match" if report.match else "mismatch",
        "detail": report.verdict(),
        "record": {
            "subject_id": record.subject_id,
            "alarm_response": record.alarm_response,
            "rescued": record.rescued,
            "exit_used": record.exit_used,
            "pre_evac_time_s": record.pre_evac_time_s,
            "rescue_time_s": record.rescue_time_s,
            "total_evac_time_s": record.total_evac_time_s,
        },
    }))
    return 0 if report.match else 1


def _collect_records(path: Path):
    from .telemetry import read_log, records_from_csv, summarize
    if path.is_file():
        if path.suffix == ".csv":
            return records_from_csv(path.read_text("utf-8"))
        return [summarize(read_log(path))]
    if not path.is_dir():
        raise FileNotFoundError(f"no such file or directory: {path}")
    records = []
    log_files = sorted(path.glob("*.evlog"))
    for f in log_files:
        try:
            records.append(summarize(read_log(f)))
        except TelemetryError as exc:
            print(f"skipping {f.name}: {exc}", file=sys.stderr)
    if not log_files:
        for f in sorted(path.glob("*.csv")):
            records.extend(records_from_csv(f.read_text("utf-8")))
    return records


def cmd_analyze(args: argparse.Namespace) -> int:
    from .analysis import csv_report, text_report
    records = _collect_records(Path(args.path))
    if not records:
        print(f"no records found under {args.path}", file=sys.stderr)
        return 2
    report = text_report(records) if args.format == "text" \
        else csv_report(records)
    if args.out:
        Path(args.out).write_text(report, "utf-8")
        print(args.out)
    else:
        sys.stdout.write(report)
    if args.figure:
        from .viz import records_figure
        records_figure(records, args.figure)
    return 0


def cmd_validate_plan(args: argparse.Namespace) -> int:
    from .validate import validate_plan
    violations = validate_plan(args.planfile, cell_size=args.cell_size)
    if args.figure:
        try:
            plan = load_floorplan(args.planfile)
        except FloorplanError:
            print("figure skipped: plan does not parse", file=sys.stderr)
        else:
            from .viz import plan_figure
            plan_figure(plan, args.figure)
    if violations:
        for v in violations:
            print(v)
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evadrill",
        description="Virtual fire drill: serve live sessions, run agent "
                    "batches, verify logs, and report results.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="host live drill sessions over "
                                     "WebSocket")
    _add_plan_flag(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--logs", metavar="DIR", default=None,
                   help="session log directory (EVA_LOG_DIR overrides)")
    p.add_argument("--ui", metavar="DIR", default=None,
                   help="static client assets to serve at /")
    p.add_argument("--time-scale", type=float, default=1.0,
                   help="wall-clock pacing multiplier (sim dt unchanged)")
    p.add_argument("--cell-size", type=float, default=0.5)
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="run a batch of artificial agents")
    _add_plan_flag(p)
    p.add_argument("--profile", metavar="PATH", default=None,
                   help="behavior profile JSON (default: fitted to the "
                        "bundled reference sessions)")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--isolated", action="store_true",
                   help="independent per-agent worlds instead of one "
                        "shared world")
    p.add_argument("--out", metavar="DIR", default="batch_out",
                   help="output directory for .evlog files and records.csv")
    p.add_argument("--figure", metavar="PATH", default=None,
                   help="also render a summary figure to this file")
    p.add_argument("--cell-size", type=float, default=0.5)
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="re-simulate a recorded session and "
                                      "verify the log matches")
    p.add_argument("logfile")
    _add_plan_flag(p)
    p.add_argument("--cell-size", type=float, default=0.5)
    _add_dyn_flags(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("analyze", help="summary report from logs or a "
                                       "records CSV")
    p.add_argument("path", metavar="DIR_OR_CSV",
                   help="directory of .evlog files, a single .evlog, or a "
                        "records CSV")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", metavar="PATH", default=None,
                   help="write the report here instead of stdout")
    p.add_argument("--figure", metavar="PATH", default=None,
                   help="also render a summary figure to this file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate-plan", help="check a floorplan's "
                                             "invariants")
    p.add_argument("planfile")
    p.add_argument("--cell-size", type=float, default=0.5)
    p.add_argument("--figure", metavar="PATH", default=None,
                   help="also render the plan sketch to this file")
    p.set_defaults(func=cmd_validate_plan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FloorplanError, TelemetryError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - last resort
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
