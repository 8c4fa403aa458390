"""Batch checking over one or many initialisations, with reports.

``run_check`` explores and analyses the chain for each supplied
initialisation, tolerating per-run failures, and aggregates a summary.  The
JSON form validates against the schema shipped as ``report_schema.json``;
the human-readable table is rendered from the same data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .analysis import analyze
from .dtmc import Dtmc
from .explorer import ExploreConfig, explore
from .game import Game
from .learners import DEFAULT_GAMMA, DEFAULT_LAMBDA_MIN, initial_state


@dataclass(frozen=True)
class RunConfig:
    """Everything one checking run needs besides the game and weights."""

    algorithm: str
    tau0: float = 0.01
    alpha: float = 0.2
    lambda0: float = 0.8
    gamma: float = DEFAULT_GAMMA
    lambda_min: float = DEFAULT_LAMBDA_MIN
    max_depth: int = 100
    merge_enabled: bool = True
    state_cap: int = 1_000_000
    prob_floor: float = 0.0

    def explore_config(self) -> ExploreConfig:
        return ExploreConfig(
            max_depth=self.max_depth,
            tau0=self.tau0,
            prob_floor=self.prob_floor,
            merge_enabled=self.merge_enabled,
            state_cap=self.state_cap,
        )

    def learner(self, game: Game, weights):
        kwargs = {}
        if self.algorithm == "gfp":
            kwargs["alpha"] = self.alpha
        elif self.algorithm == "afffp":
            kwargs["lambda0"] = self.lambda0
            kwargs["gamma"] = self.gamma
            kwargs["lambda_min"] = self.lambda_min
        return initial_state(self.algorithm, game, weights, **kwargs)


@dataclass
class RunRecord:
    index: int
    states: int = 0
    depth_last_state: int = 0
    depth_last_merge: int = 0
    truncated: bool = False
    bsccs: list = field(default_factory=list)
    convergence_probability: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Report:
    config: RunConfig
    runs: list
    dtmcs: list  # Dtmc per successful run, None for failed ones

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.runs)


def _bscc_payload(report) -> dict:
    return {
        "members": sorted(report.scc.members),
        "actions": sorted(list(a) for a in report.actions),
        "classification": report.classification.value,
        "reach_probability": report.reach_probability,
        "steady_state": {
            str(sid): p for sid, p in sorted(report.steady_state.items())
        },
    }


def check_single(config: RunConfig, game: Game, weights,
                 index: int = 0) -> tuple[RunRecord, Dtmc | None]:
    """One exploration plus analysis, packaged as a run record."""
    record = RunRecord(index=index)
    try:
        learner = config.learner(game, weights)
        dtmc = explore(game, learner, config.explore_config())
        analysis = analyze(game, dtmc)
    except Exception as exc:  # noqa: BLE001 - reported per run
        record.error = f"{type(exc).__name__}: {exc}"
        return record, None
    record.states = dtmc.num_states
    record.depth_last_state = max(
        (s.depth for s in dtmc.states if not s.is_sink), default=0
    )
    record.depth_last_merge = max(
        (e.candidate.depth for e in dtmc.merge_events), default=0
    )
    record.truncated = dtmc.truncated
    record.bsccs = [_bscc_payload(b) for b in analysis.bsccs]
    record.convergence_probability = analysis.convergence_probability
    return record, dtmc


def run_check(config: RunConfig, game: Game, inits) -> Report:
    """Explore and analyse every initialisation; failures do not stop it.

    ``inits`` is a sequence of per-pair weight mappings.
    """
    runs, dtmcs = [], []
    for index, weights in enumerate(inits):
        record, dtmc = check_single(config, game, weights, index=index)
        runs.append(record)
        dtmcs.append(dtmc)
    return Report(config=config, runs=runs, dtmcs=dtmcs)


def _summary(report: Report) -> dict:
    good = [r for r in report.runs if r.ok]
    def stats(values):
        if not values:
            return {"mean": 0.0, "min": 0.0, "max": 0.0}
        return {
            "mean": float(np.mean(values)),
            "min": float(np.min(values)),
            "max": float(np.max(values)),
        }
    return {
        "runs": len(report.runs),
        "failed_runs": len(report.runs) - len(good),
        "truncated_runs": sum(r.truncated for r in good),
        "states": stats([r.states for r in good]),
        "depth_last_state": stats([r.depth_last_state for r in good]),
        "depth_last_merge": stats([r.depth_last_merge for r in good]),
        "convergence_probability": stats(
            [r.convergence_probability for r in good]
        ),
    }


def report_to_json(report: Report, game: Game) -> dict:
    config = report.config
    return {
        "game": {
            "players": game.num_players,
            "actions": list(game.action_counts),
        },
        "config": {
            "algorithm": config.algorithm,
            "tau0": config.tau0,
            "alpha": config.alpha,
            "lambda0": config.lambda0,
            "gamma": config.gamma,
            "lambda_min": config.lambda_min,
            "max_depth": config.max_depth,
            "merge_enabled": config.merge_enabled,
            "state_cap": config.state_cap,
            "prob_floor": config.prob_floor,
        },
        "runs": [
            {
                "index": r.index,
                "ok": r.ok,
                "error": r.error,
                "states": r.states,
                "depth_last_state": r.depth_last_state,
                "depth_last_merge": r.depth_last_merge,
                "truncated": r.truncated,
                "convergence_probability": r.convergence_probability,
                "bsccs": r.bsccs,
            }
            for r in report.runs
        ],
        "summary": _summary(report),
    }


def render_table(report: Report, game: Game) -> str:
    """Human-readable summary; derived from the JSON payload."""
    payload = report_to_json(report, game)
    summary = payload["summary"]
    lines = [
        f"algorithm            {report.config.algorithm}",
        f"runs                 {summary['runs']}"
        + (f"  ({summary['failed_runs']} failed)"
           if summary["failed_runs"] else ""),
        f"truncated runs       {summary['truncated_runs']}",
        "states               mean {mean:.1f}  min {min:.0f}  max {max:.0f}"
        .format(**summary["states"]),
        "depth of last state  mean {mean:.1f}  max {max:.0f}"
        .format(**summary["depth_last_state"]),
        "depth of last merge  mean {mean:.1f}  max {max:.0f}"
        .format(**summary["depth_last_merge"]),
        "convergence prob.    mean {mean:.4f}  min {min:.4f}  max {max:.4f}"
        .format(**summary["convergence_probability"]),
    ]
    if len(report.runs) == 1 and report.runs[0].ok:
        lines.append("bsccs:")
        for b in report.runs[0].bsccs:
            actions = " ".join(str(tuple(a)) for a in b["actions"])
            lines.append(
                f"  {b['classification']:<18} p={b['reach_probability']:.6f}"
                f"  actions: {actions if actions else '(sink)'}"
            )
    return "\n".join(lines)


def dump_json(report: Report, game: Game, path) -> None:
    from .gamefile import atomic_write_text

    atomic_write_text(
        path, json.dumps(report_to_json(report, game), indent=2) + "\n"
    )
