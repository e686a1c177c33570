"""Command-line front end.

Subcommands:

    vve run <scenario.json> [--mode lockstep|udp] [--log out.csv] [--seed N] [--fast]
    vve metrics <log.csv>
    vve serve-world <scenario.json> --bind <addr> [--base-port N] [--pace X] [--log PATH]
    vve serve-controller <scenario.json> --connect <addr> [--base-port N] [--pace X]
    vve echo <scenario.json>

Exit codes: 0 success, 1 usage or configuration error, 2 collision,
3 network failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import tempfile
from pathlib import Path as FilePath

from .bridge import DEFAULT_POSE_PORT
from .harness.lockstep import run_lockstep
from .harness.metrics import compute_metrics, format_metrics
from .harness.netmode import NetworkRunError, run_networked, serve_controller, serve_world
from .harness.runlog import read_log, write_log
from .harness.scenario import Scenario, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COLLISION = 2
EXIT_NETWORK = 3

FAST_PACE = 8.0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vve", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and print its metrics")
    run.add_argument("scenario", help="scenario JSON file")
    run.add_argument("--mode", choices=["lockstep", "udp"], default=None,
                     help="override the scenario's run mode")
    run.add_argument("--log", default=None, help="write the run log CSV here")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--fast", action="store_true",
                     help=f"udp mode: pace {FAST_PACE}x instead of real time")
    run.add_argument("--pace", type=float, default=None, help="udp mode: explicit pace factor")
    run.add_argument("--base-port", type=int, default=None,
                     help="udp mode: first of three consecutive ports")

    met = sub.add_parser("metrics", help="recompute metrics from a run log")
    met.add_argument("log", help="run log CSV")

    world = sub.add_parser("serve-world", help="world/plant side of a udp run")
    world.add_argument("scenario")
    world.add_argument("--bind", required=True, help="address to bind the world sockets on")
    world.add_argument("--base-port", type=int, default=DEFAULT_POSE_PORT)
    world.add_argument("--pace", type=float, default=1.0)
    world.add_argument("--log", default="vve_world_log.csv")
    world.add_argument("--seed", type=int, default=None)
    world.add_argument("--max-duration", type=float, default=None)

    ctrl = sub.add_parser("serve-controller", help="controller side of a udp run")
    ctrl.add_argument("scenario")
    ctrl.add_argument("--connect", required=True, help="address of the world process")
    ctrl.add_argument("--bind", default="0.0.0.0")
    ctrl.add_argument("--base-port", type=int, default=DEFAULT_POSE_PORT)
    ctrl.add_argument("--pace", type=float, default=1.0)
    ctrl.add_argument("--seed", type=int, default=None)
    ctrl.add_argument("--max-duration", type=float, default=None)

    echo = sub.add_parser("echo", help="print the resolved scenario")
    echo.add_argument("scenario")

    return parser


def _load(scenario_file: str, seed: int | None = None,
          max_duration: float | None = None) -> Scenario:
    scenario = load_scenario(scenario_file)
    if seed is not None:
        scenario = dataclasses.replace(scenario, seed=seed)
    if max_duration is not None:
        scenario = dataclasses.replace(scenario, max_duration=max_duration)
    return scenario


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed)
    mode = args.mode or scenario.mode
    if mode == "lockstep":
        result = run_lockstep(scenario)
        if args.log:
            write_log(args.log, result)
    else:
        pace = args.pace if args.pace is not None else (FAST_PACE if args.fast else 1.0)
        if args.log:
            result = run_networked(args.scenario, args.log, pace=pace,
                                   base_port=args.base_port, seed=args.seed)
        else:
            with tempfile.TemporaryDirectory() as tmp:
                result = run_networked(args.scenario, FilePath(tmp) / "run.csv", pace=pace,
                                       base_port=args.base_port, seed=args.seed)
    metrics = compute_metrics(result)
    print(format_metrics(metrics))
    return EXIT_COLLISION if metrics.collided else EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    metrics = compute_metrics(read_log(args.log))
    print(format_metrics(metrics))
    return EXIT_COLLISION if metrics.collided else EXIT_OK


def _cmd_serve_world(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed, args.max_duration)
    result = serve_world(scenario, args.bind, args.base_port, args.pace, args.log)
    return EXIT_COLLISION if any(r.collision for r in result.records) else EXIT_OK


def _cmd_serve_controller(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed, args.max_duration)
    serve_controller(scenario, args.connect, args.base_port, args.pace, bind_ip=args.bind)
    return EXIT_OK


def _cmd_echo(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    print(json.dumps(scenario.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "metrics": _cmd_metrics,
        "serve-world": _cmd_serve_world,
        "serve-controller": _cmd_serve_controller,
        "echo": _cmd_echo,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"vve: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NetworkRunError as exc:
        print(f"vve: network failure: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except OSError as exc:
        print(f"vve: network failure: {exc}", file=sys.stderr)
        return EXIT_NETWORK


if __name__ == "__main__":
    sys.exit(main())
