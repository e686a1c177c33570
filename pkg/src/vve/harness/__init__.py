"""Scenario ingestion, run loops, logging, metrics and the CLI backend."""

from .lockstep import run_lockstep
from .metrics import Metrics, compute_metrics, format_metrics
from .netmode import NetworkRunError, run_networked, serve_controller, serve_world
from .runlog import NO_DETECTION, LogRecord, RunMeta, RunResult, read_log, write_log
from .scenario import (
    Scenario,
    ScenarioError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    load_scenario,
)

__all__ = [
    "LogRecord",
    "Metrics",
    "NO_DETECTION",
    "NetworkRunError",
    "RunMeta",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "ScenarioSemanticError",
    "ScenarioSyntaxError",
    "compute_metrics",
    "format_metrics",
    "load_scenario",
    "read_log",
    "run_lockstep",
    "run_networked",
    "serve_controller",
    "serve_world",
    "write_log",
]
