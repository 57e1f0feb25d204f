"""Benchmark aggregation over target sets, transition-probability
matrices over action trajectories, and human-readable run reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .runlog import RunLog, actions_taken, final_event
from .scoring.metrics import ge, le, tsr

STATES = ("Start", "Generate", "Optimize", "Screen", "Success", "Fail")
_ACTION_STATE = {"GENERATE": "Generate", "OPTIMIZE": "Optimize", "SCREEN": "Screen"}


class BenchError(ValueError):
    pass


@dataclass
class TransitionMatrix:
    states: tuple[str, ...]
    rows: dict[str, dict[str, float]]
    zero_rows: tuple[str, ...]

    def probability(self, src: str, dst: str) -> float:
        return self.rows[src][dst]


def transition_matrix(logs: Sequence[RunLog]) -> TransitionMatrix:
    """Row-normalized transition counts over {Start, actions, outcome}.

    The terminal outcome (Success for outcome=success, Fail otherwise) is
    appended as the final state of each trajectory.  Source states with
    zero outgoing counts are emitted as all-zero rows and flagged.
    """
    if not logs:
        raise BenchError("transition matrix requires at least one log")
    counts = {src: {dst: 0 for dst in STATES} for src in STATES}
    for log in logs:
        path = ["Start"]
        path.extend(_ACTION_STATE[a] for a in actions_taken(log))
        outcome = final_event(log)["outcome"]
        path.append("Success" if outcome == "success" else "Fail")
        for src, dst in zip(path, path[1:]):
            counts[src][dst] += 1
    rows: dict[str, dict[str, float]] = {}
    zero_rows: list[str] = []
    for src in STATES:
        total = sum(counts[src].values())
        if total == 0:
            rows[src] = {dst: 0.0 for dst in STATES}
            zero_rows.append(src)
        else:
            rows[src] = {dst: counts[src][dst] / total for dst in STATES}
    return TransitionMatrix(states=STATES, rows=rows, zero_rows=tuple(zero_rows))


@dataclass
class TargetOutcome:
    name: str
    outcome: str
    pool: list[dict]          # molecule payloads of the final pool
    thresholds: dict[str, float]
    diversity_ok: bool | None = None


def _pool_payloads(log: RunLog) -> list[dict]:
    by_id: dict[str, dict] = {}
    for event in log.events:
        if event["kind"] == "molecules":
            for item in event["items"]:
                by_id[item["id"]] = item
    pool_ids = final_event(log)["pool"]
    return [by_id[i] for i in pool_ids if i in by_id]


def _thresholds(log: RunLog) -> dict[str, float]:
    for event in log.events:
        if event["kind"] == "target":
            return event["thresholds"]
    raise BenchError("log has no target event")


def outcome_from_log(name: str, log: RunLog) -> TargetOutcome:
    return TargetOutcome(name=name, outcome=final_event(log)["outcome"],
                         pool=_pool_payloads(log), thresholds=_thresholds(log))


@dataclass
class BenchAggregate:
    tsr: float
    mean_hq_fraction: float
    property_pass_fractions: dict[str, float]
    dvs_pass_rate: float
    per_target: list[dict] = field(default_factory=list)


def _passes(item: dict, key: str, thresholds: dict[str, float]) -> bool:
    checks = {
        "QED": lambda: ge(item["qed"], thresholds["qed_min"]),
        "LRF": lambda: ge(item["lrf"], thresholds["lrf_min"]),
        "SAS": lambda: le(item["sas"], thresholds["sas_max"]),
        "VNA": lambda: le(item["vna"], thresholds["vna_max"]),
        "NVT": lambda: ge(item["nvt"], thresholds["nvt_min"]),
    }
    return checks[key]()


def aggregate(outcomes: Sequence[TargetOutcome],
              dvs_results: dict[str, float] | None = None) -> BenchAggregate:
    """Table-style aggregates: success rate, mean high-quality fraction,
    and mean per-property pass fractions over each target's final pool."""
    if not outcomes:
        raise BenchError("no targets to aggregate")
    properties = ("QED", "LRF", "SAS", "VNA", "NVT")
    hq_fractions: list[float] = []
    prop_fractions: dict[str, list[float]] = {p: [] for p in properties}
    dvs_passes: list[bool] = []
    per_target: list[dict] = []
    for outcome in outcomes:
        pool = outcome.pool
        row = {"name": outcome.name, "outcome": outcome.outcome,
               "pool_size": len(pool)}
        if pool:
            hq = sum(1 for item in pool
                     if all(_passes(item, p, outcome.thresholds) for p in properties))
            hq_fractions.append(hq / len(pool))
            row["hq_fraction"] = hq / len(pool)
            for p in properties:
                frac = sum(1 for item in pool
                           if _passes(item, p, outcome.thresholds)) / len(pool)
                prop_fractions[p].append(frac)
                row[p.lower() + "_fraction"] = frac
        else:
            hq_fractions.append(0.0)
            for p in properties:
                prop_fractions[p].append(0.0)
        if dvs_results is not None and outcome.name in dvs_results:
            dvs_passes.append(ge(dvs_results[outcome.name], 0.8))
            row["dvs"] = dvs_results[outcome.name]
        per_target.append(row)
    return BenchAggregate(
        tsr=tsr([o.outcome == "success" for o in outcomes]),
        mean_hq_fraction=sum(hq_fractions) / len(hq_fractions),
        property_pass_fractions={
            p: sum(v) / len(v) for p, v in prop_fractions.items()},
        dvs_pass_rate=(100.0 * sum(dvs_passes) / len(dvs_passes)) if dvs_passes else 0.0,
        per_target=per_target,
    )


def render_report(result_name: str, log: RunLog) -> str:
    """Human-readable run report: outcome, trajectory and a property card
    per final-pool molecule with pass/fail against every threshold."""
    thresholds = _thresholds(log)
    outcome = final_event(log)["outcome"]
    lines = [f"target: {result_name}", f"outcome: {outcome}",
             "trajectory: " + (" -> ".join(actions_taken(log)) or "(none)"), ""]
    lines.append(f"thresholds: QED >= {thresholds['qed_min']:.3f}, "
                 f"Lipinski >= {thresholds['lrf_min']:.3f}, "
                 f"SAScore <= {thresholds['sas_max']:.3f}, "
                 f"VinaScore <= {thresholds['vna_max']:.3f}, "
                 f"Novelty >= {thresholds['nvt_min']:.2f}")
    lines.append("")
    pool = _pool_payloads(log)
    if not pool:
        lines.append("final pool: empty")
        return "\n".join(lines) + "\n"
    lines.append(f"final pool ({len(pool)} molecules):")
    for item in pool:
        marks = []
        for prop, value, shown in (
                ("QED", item["qed"], f"{item['qed']:.3f}"),
                ("LRF", item["lrf"], str(item["lrf"])),
                ("SAS", item["sas"], f"{item['sas']:.2f}"),
                ("VNA", item["vna"], f"{item['vna']:.2f}"),
                ("NVT", item["nvt"], f"{item['nvt']:.3f}")):
            ok = _passes(item, prop, thresholds)
            marks.append(f"{prop} {shown} {'pass' if ok else 'FAIL'}")
        lines.append(f"  {item['id']} {item['smiles']}")
        lines.append("    " + " | ".join(marks))
    return "\n".join(lines) + "\n"


def render_matrix(matrix: TransitionMatrix) -> str:
    width = max(len(s) for s in matrix.states) + 2
    header = " " * width + "".join(s.rjust(width) for s in matrix.states)
    lines = [header]
    for src in matrix.states:
        row = matrix.rows[src]
        flag = " (no transitions)" if src in matrix.zero_rows else ""
        lines.append(src.ljust(width)
                     + "".join(f"{row[dst]:.3f}".rjust(width) for dst in matrix.states)
                     + flag)
    return "\n".join(lines) + "\n"
