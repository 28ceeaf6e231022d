"""Score patients against a group definition and decide membership.

activity_score counts pattern activities a patient is missing, dbc_score
counts missing definition codes (plain code presence, not co-occurrence);
0 means a perfect match. A patient joins the group when both scores stay
at or below the integer cut-offs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .eventlog import EventLog, PatientProjection
from .groupdef import GroupDefinition


@dataclass(frozen=True, slots=True)
class PatientScore:
    patient_id: str
    activity_score: int
    dbc_score: int


def score_patient(proj: PatientProjection, definition: GroupDefinition) -> PatientScore:
    a_score = len(definition.pattern) - len(proj.activities & definition.pattern)
    d_score = len(definition.dbcs) - len(proj.dbcs & definition.dbcs)
    return PatientScore(proj.patient_id, a_score, d_score)


def classify(
    scores: Iterable[PatientScore], alpha_f: int, alpha_d: int
) -> list[str]:
    """Member ids (sorted): both scores at or below the cut-offs."""
    return sorted(
        s.patient_id
        for s in scores
        if s.activity_score <= alpha_f and s.dbc_score <= alpha_d
    )


def score_population(log: EventLog, definition: GroupDefinition) -> list[PatientScore]:
    """One score per patient, sorted by patient_id; builds each projection
    on the fly so memory stays bounded per patient."""
    pattern = definition.pattern
    dbcs = definition.dbcs
    out = []
    for pid in sorted(log.traces):
        acts: set[str] = set()
        codes: set[str] = set()
        for ev in log.traces[pid].events:
            if ev.activity in pattern:
                acts.add(ev.activity)
            if ev.dbc in dbcs:
                codes.add(ev.dbc)
        out.append(PatientScore(pid, len(pattern) - len(acts), len(dbcs) - len(codes)))
    return out


def dump_scores(
    scores: Sequence[PatientScore],
    alpha_f: int,
    alpha_d: int,
    sink: Union[str, Path, IO[str]],
) -> None:
    """Score dump CSV: patient_id,activity_score,dbc_score,member."""
    handle, owned = (open(sink, "w", encoding="utf-8", newline=""), True) if isinstance(
        sink, (str, Path)
    ) else (sink, False)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["patient_id", "activity_score", "dbc_score", "member"])
        for s in scores:
            member = int(s.activity_score <= alpha_f and s.dbc_score <= alpha_d)
            writer.writerow([s.patient_id, s.activity_score, s.dbc_score, member])
    finally:
        if owned:
            handle.close()
