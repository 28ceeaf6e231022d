"""Local HTTP facade for interactive threshold-relaxation sessions.

Sessions walk forward through phases (relax_activities -> relax_dbcs ->
calibrate -> done); each accept lowers the current threshold one step and
reports the newly admitted items, each stop freezes the current selection.
State lives in memory; the service is a single-expert desk tool bound to
localhost by default.
"""

from __future__ import annotations

import io
import threading
import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .calibration import calibrate, elbow, lee_liu, pareto_frontier, sweep
from .errors import CohortError, EmptyPatternError, InputError
from .eventlog import EventLog, project
from .evaluation import SamplePlan, draw_sample
from .groupdef import (
    GroupDefinition,
    longest_pattern,
    select_dbcs,
)
from .mining import as_fraction
from .pipeline import make_provenance
from .scoring import dump_scores, score_population

PHASES = ("relax_activities", "relax_dbcs", "calibrate", "done")


class CreateSessionRequest(BaseModel):
    log_id: str = "default"
    sample_size: int = 30
    split: float = 0.5
    seed: int = 0
    step: float = 0.05
    floor: float = 0.05
    sample: Optional[list[str]] = None  # explicit positive sample, bypasses manifest


class StepRequest(BaseModel):
    decision: str  # "accept" | "stop"


class CutoffRequest(BaseModel):
    alpha_f: int
    alpha_d: int
    method: str = "manual"


@dataclass(slots=True)
class Session:
    id: str
    log: EventLog
    plan: SamplePlan
    train_projections: list
    step_size: Fraction
    floor: Fraction
    sample_size: int
    split: float
    phase: str = "relax_activities"
    threshold: Fraction = Fraction(1)
    selection: frozenset = frozenset()
    added: frozenset = frozenset()
    accepted_pattern: frozenset = frozenset()
    accepted_dbcs: frozenset = frozenset()
    phi_a: Fraction = Fraction(1)
    phi_d: Fraction = Fraction(1)
    definition: Optional[GroupDefinition] = None
    scores: Optional[list] = None
    history: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def compute_selection(self):
        """Selection at the current threshold, cumulative over the walk."""
        if self.phase == "relax_activities":
            current = longest_pattern(self.train_projections, self.threshold)
        else:
            current = select_dbcs(self.accepted_pattern, self.train_projections, self.threshold)
        self.added = current - self.selection
        self.selection = self.selection | current

    def view(self) -> dict:
        return {
            "id": self.id,
            "phase": self.phase,
            "threshold": float(self.threshold),
            "floor": float(self.floor),
            "step": float(self.step_size),
            "current_selection": sorted(self.selection),
            "added_items": sorted(self.added),
            "accepted_pattern": sorted(self.accepted_pattern),
            "accepted_dbcs": sorted(self.accepted_dbcs),
            "at_floor": self.threshold - self.step_size < self.floor,
            "history": list(self.history),
            "sample_size": self.sample_size,
        }


def _http_error(exc: CohortError, status: int) -> HTTPException:
    return HTTPException(status_code=status, detail=exc.oneline())


def create_app(
    logs: dict[str, tuple[EventLog, Optional[set[str]]]],
    static_dir: Optional[Path] = None,
) -> FastAPI:
    """`logs` maps a log id to (event log, optional ground-truth member set)."""
    app = FastAPI(title="cohortminer", version="0.1.0")
    sessions: dict[str, Session] = {}

    if static_dir is None:
        static_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        entry = logs.get(req.log_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown log {req.log_id!r}")
        log, truth = entry
        try:
            if req.sample is not None:
                missing = [p for p in req.sample if p not in log.traces]
                if missing:
                    raise InputError(f"sample patients not in log: {missing[:5]}")
                size = len(req.sample)
                n_train = -(-size // 2) if req.split == 0.5 else max(1, round(size * req.split))
                plan = SamplePlan(
                    set(req.sample), set(req.sample[:n_train]), set(req.sample[n_train:]),
                    req.seed, order=list(req.sample),
                )
            else:
                if truth is None:
                    raise InputError("no manifest loaded; pass an explicit sample")
                plan = draw_sample(truth, req.sample_size, req.seed, req.split)
            step_size = as_fraction(req.step)
            floor = as_fraction(req.floor)
            if not (0 < step_size < 1):
                raise InputError(f"step must be in (0, 1), got {req.step}")
            train = [project(log, pid) for pid in sorted(plan.train)]
        except InputError as exc:
            raise _http_error(exc, 400)
        session = Session(
            id=uuid.uuid4().hex,
            log=log,
            plan=plan,
            train_projections=train,
            step_size=step_size,
            floor=floor,
            sample_size=req.sample_size if req.sample is None else len(req.sample),
            split=req.split,
        )
        session.compute_selection()
        sessions[session.id] = session
        return JSONResponse(session.view(), status_code=201)

    @app.get("/sessions/{session_id}")
    def get_session_view(session_id: str):
        return get_session(session_id).view()

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str, req: StepRequest):
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="conflict: step already in flight")
        try:
            if session.phase not in ("relax_activities", "relax_dbcs"):
                raise HTTPException(status_code=409, detail="conflict: session not in a relaxation phase")
            if req.decision == "accept":
                next_threshold = session.threshold - session.step_size
                if next_threshold < session.floor:
                    raise HTTPException(status_code=409, detail="conflict: already at the floor")
                session.threshold = next_threshold
                session.compute_selection()
                session.history.append(
                    {"phase": session.phase, "threshold": float(session.threshold),
                     "decision": "accept", "added": sorted(session.added)}
                )
                return session.view()
            if req.decision == "stop":
                session.history.append(
                    {"phase": session.phase, "threshold": float(session.threshold),
                     "decision": "stop", "added": []}
                )
                if session.phase == "relax_activities":
                    if not session.selection:
                        raise _http_error(
                            EmptyPatternError("no frequent activities at this threshold"), 409
                        )
                    session.accepted_pattern = session.selection
                    session.phi_a = session.threshold
                    session.phase = "relax_dbcs"
                    session.threshold = Fraction(1)
                    session.selection = frozenset()
                    session.compute_selection()
                else:
                    session.accepted_dbcs = session.selection
                    session.phi_d = session.threshold
                    session.phase = "calibrate"
                    prov = make_provenance(
                        session.plan, session.phi_a, session.phi_d,
                        session.sample_size, session.split,
                    )
                    session.definition = GroupDefinition(
                        pattern=session.accepted_pattern,
                        dbcs=session.accepted_dbcs,
                        phi_a=session.phi_a,
                        phi_d=session.phi_d,
                        provenance=prov,
                    )
                    session.scores = score_population(session.log, session.definition)
                return session.view()
            raise HTTPException(status_code=400, detail="decision must be 'accept' or 'stop'")
        finally:
            session.lock.release()

    @app.get("/sessions/{session_id}/curve")
    def curve(session_id: str):
        session = get_session(session_id)
        if session.phase not in ("calibrate", "done") or session.definition is None:
            raise HTTPException(status_code=409, detail="conflict: finish both relaxation phases first")
        d = session.definition
        points = sweep(session.scores, session.plan.holdout, len(d.pattern), len(d.dbcs))
        frontier = pareto_frontier(points)
        elbow_pt, degenerate = elbow(frontier)
        try:
            ll = lee_liu(frontier).to_dict()
        except CohortError:
            ll = None
        return {
            "points": [p.to_dict() for p in points],
            "frontier": [p.to_dict() for p in frontier],
            "elbow": elbow_pt.to_dict(),
            "lee_liu": ll,
            "degenerate": degenerate,
        }

    @app.post("/sessions/{session_id}/cutoffs")
    def set_cutoffs(session_id: str, req: CutoffRequest):
        session = get_session(session_id)
        if session.phase not in ("calibrate", "done") or session.definition is None:
            raise HTTPException(status_code=409, detail="conflict: finish both relaxation phases first")
        d = session.definition
        if not (0 <= req.alpha_f <= len(d.pattern) and 0 <= req.alpha_d <= len(d.dbcs)):
            raise HTTPException(status_code=400, detail="cut-offs out of range")
        if req.method in ("elbow", "lee_liu"):
            # recompute through the calibration path so provenance matches the CLI
            result = calibrate(session.log, d, session.plan.holdout, req.method,
                               scores=session.scores)
            session.definition = result.definition
        else:
            session.definition = d.with_cutoffs(req.alpha_f, req.alpha_d, method="manual")
        session.phase = "done"
        return {"definition": session.definition.to_dict(), "phase": session.phase}

    @app.get("/sessions/{session_id}/definition")
    def get_definition(session_id: str):
        session = get_session(session_id)
        if session.definition is None:
            raise HTTPException(status_code=409, detail="conflict: definition not built yet")
        return Response(
            content=session.definition.to_json_bytes(), media_type="application/json"
        )

    @app.get("/sessions/{session_id}/classification")
    def classification(
        session_id: str,
        alpha_f: int = Query(..., ge=0),
        alpha_d: int = Query(..., ge=0),
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=1000),
        format: str = Query("json"),
    ):
        session = get_session(session_id)
        if session.definition is None or session.scores is None:
            raise HTTPException(status_code=409, detail="conflict: definition not built yet")
        members = [
            s for s in session.scores
            if s.activity_score <= alpha_f and s.dbc_score <= alpha_d
        ]
        if format == "csv":
            buf = io.StringIO()
            dump_scores(members, alpha_f, alpha_d, buf)
            return Response(content=buf.getvalue(), media_type="text/csv")
        total_pages = max(1, -(-len(members) // page_size))
        page = min(page, total_pages)  # out-of-range pages are clamped
        chunk = members[(page - 1) * page_size : page * page_size]
        return {
            "total": len(members),
            "page": page,
            "page_size": page_size,
            "total_pages": total_pages,
            "members": [
                {"patient_id": s.patient_id, "activity_score": s.activity_score,
                 "dbc_score": s.dbc_score}
                for s in chunk
            ],
        }

    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return "<h1>cohortminer service</h1><p>Web UI not built; API is live.</p>"

    return app
