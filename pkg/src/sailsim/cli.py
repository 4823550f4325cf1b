"""Operator command line: validate configs, run missions, plot, serve.

Exit codes: 0 success, 1 validation failure, 2 I/O error, 3 runtime blowup.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import signal
import sys
from pathlib import Path

from .config import env_config_from_dict, load_config
from .episode import BaselineController, SailingEnv, run_scripted_baseline
from .errors import ConfigurationError, IntegrationBlowupError
from .netenv import DEFAULT_PORT, start_server
from .plot import plot_logs_to_svg
from .vessel import param_violations

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_RUNTIME = 3


def _read_config_doc(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _IOFailure(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config parse error: {exc}")


class _IOFailure(Exception):
    pass


def _parse_seeds(spec):
    """'0..19' or '3' or '1,4,7' -> list of ints."""
    seeds = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def _onoff(value):
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def cmd_validate(args):
    doc = _read_config_doc(args.config) if args.config else {}
    problems = []
    try:
        cfg = env_config_from_dict(doc)
        problems.extend(param_violations(cfg.params))
        try:
            cfg.mission.validate()
        except ConfigurationError as exc:
            problems.extend(exc.violations)
    except ConfigurationError as exc:
        problems.extend(exc.violations)
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return EXIT_VALIDATION
    print("config ok")
    return EXIT_OK


def _run_one(doc, seed, waves, noise, sensor_seed, zero_action):
    cfg = env_config_from_dict(doc, waves=waves, noise=noise)
    env = SailingEnv(cfg)
    controller = None
    if zero_action:
        from .episode import Action

        zero = Action()
        controller = lambda obs: zero  # noqa: E731
    log = run_scripted_baseline(env, seed, controller=controller, sensor_seed=sensor_seed)
    completed = env.waypoint_index >= len(env.mission.sequence)
    n = log.column("north")
    e = log.column("east")
    path_length = sum(math.hypot(a - b, c - d) for a, b, c, d in zip(n[1:], n[:-1], e[1:], e[:-1]))
    summary = {
        "seed": seed,
        "completed": completed,
        "sim_time": log.rows[-1][0] if log.rows else 0.0,
        "path_length": round(path_length, 2),
        "steps": len(log.rows),
    }
    return seed, log.to_csv(), summary


def cmd_run(args):
    doc = _read_config_doc(args.config) if args.config else {}
    seeds = _parse_seeds(args.seeds)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.mission:
        mission_doc = _read_config_doc(args.mission)
        doc = dict(doc)
        doc["mission"] = mission_doc.get("mission", mission_doc)

    jobs = [(doc, seed, args.waves, args.noise, args.sensor_seed, args.zero_action) for seed in seeds]
    results = []
    failed = False
    if args.jobs > 1 and len(seeds) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_one, *job) for job in jobs]
            for fut in futures:
                try:
                    results.append(fut.result())
                except IntegrationBlowupError as exc:
                    results.append((None, None, {"error": str(exc)}))
                    failed = True
    else:
        for job in jobs:
            try:
                results.append(_run_one(*job))
            except IntegrationBlowupError as exc:
                results.append((None, None, {"error": str(exc)}))
                failed = True

    summaries = []
    for seed, csv_text, summary in results:
        if csv_text is not None:
            (out / f"run_seed{seed}.csv").write_text(csv_text, encoding="utf-8")
        summaries.append(summary)
    summaries.sort(key=lambda s: s.get("seed", -1) if s.get("seed") is not None else -1)
    (out / "summary.json").write_text(json.dumps(summaries, indent=2) + "\n", encoding="utf-8")
    for s in summaries:
        print(json.dumps(s))
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_plot(args):
    texts = []
    for path in args.logs:
        try:
            texts.append(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            print(f"cannot read log: {exc}", file=sys.stderr)
            return EXIT_IO
    doc = _read_config_doc(args.config) if args.config else {}
    cfg = env_config_from_dict(doc)
    try:
        svg = plot_logs_to_svg(texts, cfg.mission.waypoints)
    except ValueError as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as exc:
        print(f"cannot write SVG: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_serve(args):
    doc = _read_config_doc(args.config) if args.config else {}
    cfg = env_config_from_dict(doc, waves=args.waves, noise=args.noise)
    host, _, port = args.address.rpartition(":")
    host = host or "127.0.0.1"
    try:
        server = start_server((host, int(port)), cfg, idle_timeout=args.idle_timeout)
    except OSError as exc:
        print(f"bind failed on {args.address}: {exc}", file=sys.stderr)
        return EXIT_IO

    def _shutdown(signum, frame):
        # shutdown() blocks until serve_forever() returns, so it must not run
        # on the thread executing the serve loop (the signal handler's thread)
        import threading

        threading.Thread(target=server.shutdown, daemon=True).start()

    signal.signal(signal.SIGTERM, _shutdown)
    signal.signal(signal.SIGINT, _shutdown)
    print(f"serving on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sailsim", description="Sailing-vessel mission simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config file and report every violation")
    p.add_argument("--config", help="JSON config path (defaults apply if omitted)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run scripted missions and write CSV logs")
    p.add_argument("--config")
    p.add_argument("--mission", help="JSON file overriding the mission section")
    p.add_argument("--seeds", default="0", help="e.g. '0', '0..19' or '1,3,5'")
    p.add_argument("--out", default="runs", help="output directory")
    p.add_argument("--waves", type=_onoff, default=None, help="force waves on|off")
    p.add_argument("--noise", type=_onoff, default=None, help="force sensor noise on|off")
    p.add_argument("--sensor-seed", type=int, default=None, help="override the sensor-noise substream seed")
    p.add_argument("--zero-action", action="store_true", help="hold zero actions instead of the baseline controller")
    p.add_argument("--jobs", type=int, default=1, help="parallel episodes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="render trajectory CSVs to one SVG")
    p.add_argument("logs", nargs="+", help="CSV log files")
    p.add_argument("--config", help="config supplying the waypoint map")
    p.add_argument("--out", default="trajectories.svg")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("serve", help="serve the episode interface over TCP")
    p.add_argument("--config")
    p.add_argument("--address", default=f"127.0.0.1:{DEFAULT_PORT}")
    p.add_argument("--waves", type=_onoff, default=None)
    p.add_argument("--noise", type=_onoff, default=None)
    p.add_argument("--idle-timeout", type=float, default=None, help="seconds before dropping an idle connection")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        for v in exc.violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_VALIDATION
    except IntegrationBlowupError as exc:
        print(f"runtime blowup: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
