"""Synthetic event logs with planted patient groups.

Stands in for the private hospital data: a Zipf-skewed background of
activities/codes over the whole population, plus one or more planted
groups whose members emit signature activities (each with probability q)
whose events carry the group's code with probability r. Non-members leak
each signature activity with a small probability. Ground-truth membership
is emitted as a manifest so the full pipeline can be scored against an
exact oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timedelta
from pathlib import Path
from typing import IO, Union

import numpy as np

from .errors import InputError
from .eventlog import Event, EventLog, Trace

_BASE_TS = datetime(2017, 1, 1)


@dataclass(slots=True)
class PlantedGroup:
    name: str = "group1"
    size: int = 500
    signature_activities: int = 6
    emission_prob: float = 0.9
    signature_dbc_prob: float = 0.9
    leak_prob: float = 0.02

    def validate(self):
        if self.size < 2:
            raise InputError(f"group {self.name}: size must be >= 2")
        if self.signature_activities < 1:
            raise InputError(f"group {self.name}: needs at least one signature activity")
        for p in (self.emission_prob, self.signature_dbc_prob, self.leak_prob):
            if not (0 <= p <= 1):
                raise InputError(f"group {self.name}: probabilities must be in [0, 1]")


@dataclass(slots=True)
class GeneratorSpec:
    population: int = 10_000
    background_activities: int = 200
    background_dbcs: int = 100
    groups: list[PlantedGroup] = field(default_factory=lambda: [PlantedGroup()])
    events_per_patient: float = 20.0
    zipf_exponent: float = 1.1
    seed: int = 0

    def validate(self):
        if self.population < 1 or self.background_activities < 1 or self.background_dbcs < 1:
            raise InputError("population and alphabet sizes must be positive")
        if self.events_per_patient <= 0:
            raise InputError("events_per_patient must be positive")
        if self.zipf_exponent <= 0:
            raise InputError("zipf_exponent must be positive")
        if sum(g.size for g in self.groups) > self.population:
            raise InputError("group sizes exceed the population")
        for g in self.groups:
            g.validate()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        groups = [PlantedGroup(**g) for g in data.pop("groups", [])]
        spec = cls(groups=groups or [PlantedGroup()], **data)
        return spec

    @classmethod
    def from_json_file(cls, path: Union[str, Path]) -> "GeneratorSpec":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError, TypeError) as exc:
            raise InputError(f"bad generator spec {path}: {exc}") from exc


def _zipf_probs(n: int, exponent: float) -> np.ndarray:
    weights = np.arange(1, n + 1, dtype=float) ** -exponent
    return weights / weights.sum()


def _pid(i: int, width: int) -> str:
    return f"p{i:0{width}d}"


def _materialize(spec: GeneratorSpec):
    """Draw all events; returns (rows per patient, manifests).

    rows[i] is a list of (activity_label, dbc_label) for patient i; the
    timestamp is assigned positionally at serialization time.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    width = len(str(spec.population - 1))
    bg_act = [f"act{i:04d}" for i in range(spec.background_activities)]
    bg_dbc = [f"code{i:04d}" for i in range(spec.background_dbcs)]

    n = spec.population
    counts = rng.poisson(spec.events_per_patient, n)
    counts = np.maximum(counts, 1)  # every patient appears in the log
    total = int(counts.sum())
    act_idx = rng.choice(
        spec.background_activities, size=total, p=_zipf_probs(spec.background_activities, spec.zipf_exponent)
    )
    dbc_idx = rng.integers(0, spec.background_dbcs, size=total)
    offsets = np.concatenate(([0], np.cumsum(counts)))

    rows: list[list[tuple[str, str]]] = []
    for i in range(n):
        lo, hi = offsets[i], offsets[i + 1]
        rows.append([(bg_act[a], bg_dbc[d]) for a, d in zip(act_idx[lo:hi], dbc_idx[lo:hi])])

    manifests: dict[str, set[str]] = {}
    unassigned = np.arange(n)
    for group in spec.groups:
        member_pos = rng.choice(unassigned, size=group.size, replace=False)
        member_pos.sort()
        unassigned = np.setdiff1d(unassigned, member_pos)
        member_set = set(member_pos.tolist())
        manifests[group.name] = {_pid(i, width) for i in member_pos}
        sig_acts = [f"sig_{group.name}_{j}" for j in range(group.signature_activities)]
        group_code = f"dbc_{group.name}"
        k = group.signature_activities

        emit = rng.random((group.size, k)) < group.emission_prob
        carry = rng.random((group.size, k)) < group.signature_dbc_prob
        carry_bg = rng.integers(0, spec.background_dbcs, size=(group.size, k))
        for row_i, pos in enumerate(member_pos.tolist()):
            for j in range(k):
                if emit[row_i, j]:
                    code = group_code if carry[row_i, j] else bg_dbc[carry_bg[row_i, j]]
                    rows[pos].append((sig_acts[j], code))

        if group.leak_prob > 0:
            non_members = np.array([i for i in range(n) if i not in member_set])
            leak = rng.random((len(non_members), k)) < group.leak_prob
            leak_bg = rng.integers(0, spec.background_dbcs, size=(len(non_members), k))
            leak_rows, leak_cols = np.nonzero(leak)
            for row_i, j in zip(leak_rows.tolist(), leak_cols.tolist()):
                rows[int(non_members[row_i])].append((sig_acts[j], bg_dbc[leak_bg[row_i, j]]))

    return rows, manifests, width


def _timestamps(max_events: int) -> list[str]:
    return [
        (_BASE_TS + timedelta(minutes=i)).isoformat() for i in range(max_events)
    ]


def generate(spec: GeneratorSpec) -> tuple[EventLog, dict[str, set[str]]]:
    """In-memory generation: EventLog plus exact per-group membership."""
    rows, manifests, width = _materialize(spec)
    stamps_iso = _timestamps(max(len(r) for r in rows))
    stamps = [_BASE_TS + timedelta(minutes=i) for i in range(len(stamps_iso))]
    traces = {}
    activities: set[str] = set()
    dbcs: set[str] = set()
    for i, events in enumerate(rows):
        pid = _pid(i, width)
        trace = Trace(pid)
        for j, (a, d) in enumerate(events):
            trace.events.append(Event(pid, a, d, stamps[j]))
            activities.add(a)
            dbcs.add(d)
        traces[pid] = trace
    return EventLog(traces, frozenset(activities), frozenset(dbcs)), manifests


def generate_csv(spec: GeneratorSpec, sink: Union[str, Path, IO[str]]) -> dict[str, set[str]]:
    """Stream the generated log straight to CSV (byte-identical for a fixed
    seed); returns the ground-truth manifests."""
    rows, manifests, width = _materialize(spec)
    stamps = _timestamps(max(len(r) for r in rows))
    handle, owned = (open(sink, "w", encoding="utf-8", newline=""), True) if isinstance(
        sink, (str, Path)
    ) else (sink, False)
    try:
        handle.write("patient_id,activity,dbc,timestamp\n")
        chunk: list[str] = []
        for i, events in enumerate(rows):
            pid = _pid(i, width)
            for j, (a, d) in enumerate(events):
                chunk.append(f"{pid},{a},{d},{stamps[j]}\n")
            if len(chunk) >= 100_000:
                handle.write("".join(chunk))
                chunk.clear()
        handle.write("".join(chunk))
    finally:
        if owned:
            handle.close()
    return manifests


def describe(spec: GeneratorSpec) -> dict:
    """Analytic expectations for test assertions (independence products)."""
    spec.validate()
    out = {
        "population": spec.population,
        "expected_background_events": spec.population * max(spec.events_per_patient, 1.0),
        "groups": {},
    }
    for g in spec.groups:
        q, leak = g.emission_prob, g.leak_prob
        out["groups"][g.name] = {
            "size": g.size,
            "expected_member_support_by_length": {
                j: q ** j for j in range(1, g.signature_activities + 1)
            },
            "expected_leak_support_by_length": {
                j: leak ** j for j in range(1, g.signature_activities + 1)
            },
            "expected_code_carry_rate": g.emission_prob * g.signature_dbc_prob,
        }
    return out
