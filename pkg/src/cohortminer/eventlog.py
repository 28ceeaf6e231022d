"""Event log parsing, validation and per-patient projections.

The CSV wire format is a UTF-8 file with the exact header
``patient_id,activity,dbc,timestamp``; timestamps are ISO-8601. All
downstream math consumes :class:`PatientProjection`, which reduces a trace
to its distinct activities, distinct codes and distinct (activity, dbc)
pairs observed within single events.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import InputError, LogFormatError, UnknownPatientError

HEADER = ("patient_id", "activity", "dbc", "timestamp")

Source = Union[str, Path, IO[str], IO[bytes]]


def _parse_timestamp(raw: str, line: int) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        raise LogFormatError(f"unparseable timestamp {raw!r}", line) from None


@dataclass(frozen=True, slots=True)
class Event:
    patient_id: str
    activity: str
    dbc: str
    timestamp: datetime


@dataclass(slots=True)
class Trace:
    """Ordered event sequence of one patient (ascending timestamp,
    ties keep input order)."""

    patient_id: str
    events: list[Event] = field(default_factory=list)


@dataclass(slots=True)
class EventLog:
    traces: dict[str, Trace]
    activity_alphabet: frozenset[str]
    dbc_alphabet: frozenset[str]

    @property
    def patient_ids(self) -> list[str]:
        return sorted(self.traces)

    def __len__(self) -> int:
        return len(self.traces)


@dataclass(frozen=True, slots=True)
class PatientProjection:
    """Distinct-activity set A_p, distinct-code set D_p and the distinct
    (activity, dbc) pairs seen within single events."""

    patient_id: str
    activities: frozenset[str]
    dbcs: frozenset[str]
    cooccurrence: frozenset[tuple[str, str]]


def _open_source(source: Source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # byte stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def load_log(source: Source) -> EventLog:
    """Parse and validate a CSV event log.

    Raises :class:`LogFormatError` (with the offending line number) on any
    malformed row, and :class:`InputError` on an empty file.
    """
    handle, owned = _open_source(source)
    try:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("empty event log file") from None
        if tuple(h.strip() for h in header) != HEADER:
            raise LogFormatError(
                f"expected header {','.join(HEADER)!r}, got {','.join(header)!r}", 1
            )
        traces: dict[str, Trace] = {}
        activities: set[str] = set()
        dbcs: set[str] = set()
        n_rows = 0
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise LogFormatError(f"expected 4 columns, got {len(row)}", line)
            pid, act, dbc, ts = (f.strip() for f in row)
            if not pid or not act or not dbc:
                raise LogFormatError("empty field", line)
            stamp = _parse_timestamp(ts, line)
            # intern: labels repeat millions of times in large logs
            act = sys.intern(act)
            dbc = sys.intern(dbc)
            trace = traces.get(pid)
            if trace is None:
                trace = traces[pid] = Trace(sys.intern(pid))
            trace.events.append(Event(trace.patient_id, act, dbc, stamp))
            activities.add(act)
            dbcs.add(dbc)
            n_rows += 1
        if n_rows == 0:
            raise InputError("event log has a header but no rows")
    finally:
        if owned:
            handle.close()
    for trace in traces.values():
        trace.events.sort(key=lambda e: e.timestamp)  # stable: ties keep input order
    return EventLog(traces, frozenset(activities), frozenset(dbcs))


def dump_log(log: EventLog, sink: Union[str, Path, IO[str]]) -> None:
    """Serialize back to the CSV wire format (patients sorted by id)."""
    handle, owned = (open(sink, "w", encoding="utf-8", newline=""), True) if isinstance(
        sink, (str, Path)
    ) else (sink, False)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(HEADER)
        for pid in sorted(log.traces):
            for ev in log.traces[pid].events:
                writer.writerow([ev.patient_id, ev.activity, ev.dbc, ev.timestamp.isoformat()])
    finally:
        if owned:
            handle.close()


def project_trace(trace: Trace) -> PatientProjection:
    acts: set[str] = set()
    codes: set[str] = set()
    pairs: set[tuple[str, str]] = set()
    for ev in trace.events:
        acts.add(ev.activity)
        codes.add(ev.dbc)
        pairs.add((ev.activity, ev.dbc))
    return PatientProjection(trace.patient_id, frozenset(acts), frozenset(codes), frozenset(pairs))


def project(log: EventLog, patient_id: str) -> PatientProjection:
    trace = log.traces.get(patient_id)
    if trace is None:
        raise UnknownPatientError(f"patient {patient_id!r} not in log")
    return project_trace(trace)


def project_all(log: EventLog) -> list[PatientProjection]:
    """One projection per patient, sorted by patient_id."""
    return [project_trace(log.traces[pid]) for pid in sorted(log.traces)]


def load_manifest(path: Union[str, Path]) -> tuple[str, set[str]]:
    """Read a ground-truth membership manifest:
    ``{"group_name": str, "members": [patient_id, ...]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        name = data["group_name"]
        members = set(data["members"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad manifest {path}: {exc}") from exc
    if not members:
        raise InputError(f"manifest {path} has no members")
    return name, members


def dump_manifest(name: str, members: Iterable[str], path: Union[str, Path]) -> None:
    payload = {"group_name": name, "members": sorted(members)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
