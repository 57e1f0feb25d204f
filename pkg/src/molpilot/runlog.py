"""Append-only run log: newline-delimited JSON events.

The header pins the run id, seed, config checksum and parameter-table
checksums; every subsequent event carries a monotonically non-decreasing
timestamp.  Determinism comparisons strip the ``ts`` field, which is the
only wall-clock-dependent payload.  A log can be replayed to reconstruct
the final candidate pool without re-running anything.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Iterable

SCHEMA_VERSION = 1


class RunLogError(ValueError):
    pass


@dataclass
class RunLog:
    events: list[dict] = field(default_factory=list)
    _clock: object = None  # injectable for tests

    def _now(self) -> float:
        now = time.time() if self._clock is None else self._clock()
        if self.events:
            now = max(now, self.events[-1]["ts"])
        return now

    def append(self, kind: str, **fields) -> dict:
        event = {"kind": kind, **fields, "ts": self._now()}
        self.events.append(event)
        return event

    def header(self) -> dict:
        if not self.events or self.events[0]["kind"] != "header":
            raise RunLogError("log has no header event")
        return self.events[0]

    def to_ndjson(self) -> str:
        return "\n".join(json.dumps(e, sort_keys=True) for e in self.events) + "\n"

    @classmethod
    def from_ndjson(cls, text: str) -> "RunLog":
        events = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RunLogError(f"bad JSON on line {lineno}: {exc}") from exc
        log = cls(events=events)
        log.header()
        ts = [e["ts"] for e in events]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise RunLogError("event timestamps decrease")
        return log

    def payloads(self) -> list[dict]:
        """Events with timestamps stripped, for determinism comparison."""
        return [{k: v for k, v in e.items() if k != "ts"} for e in self.events]


def config_checksum(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def new_log(run_id: str, seed: int, policy: str, budget: int,
            config_digest: str, data_digests: dict[str, str],
            clock=None) -> RunLog:
    log = RunLog(_clock=clock)
    log.append("header", schema_version=SCHEMA_VERSION, run_id=run_id, seed=seed,
               policy=policy, budget=budget, config_checksum=config_digest,
               data_checksums=data_digests)
    return log


def actions_taken(log: RunLog) -> list[str]:
    return [e["action"] for e in log.events if e["kind"] == "action"]


def replay_final_pool(log: RunLog) -> list[str]:
    """Reconstruct the final candidate pool from the event stream alone."""
    registered: list[str] = []
    screen_pool: list[str] | None = None
    for event in log.events:
        if event["kind"] == "molecules":
            registered.extend(item["id"] for item in event["items"])
        elif event["kind"] == "action" and event.get("ok"):
            if event["action"] == "SCREEN":
                screen_pool = list(event["produced"])
    return screen_pool if screen_pool is not None else registered


def final_event(log: RunLog) -> dict:
    for event in reversed(log.events):
        if event["kind"] == "final":
            return event
    raise RunLogError("log has no final event")
