"""Cut-off selection from the positive sample alone.

Sweeps the (alpha_f, alpha_d) grid, estimates recall on the held-out half
of the sample, reduces the grid to the Pareto frontier of group size vs
estimated recall, and picks a point by the elbow of that curve or by the
Lee-Liu recall^2/|group| criterion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateCalibrationError, InputError
from .eventlog import EventLog
from .groupdef import GroupDefinition
from .scoring import PatientScore, score_population


@dataclass(frozen=True, slots=True)
class SweepPoint:
    alpha_f: int
    alpha_d: int
    group_size: int
    recall_bar: Fraction

    def to_dict(self) -> dict:
        return {
            "alpha_f": self.alpha_f,
            "alpha_d": self.alpha_d,
            "group_size": self.group_size,
            "recall_bar": float(self.recall_bar),
        }


@dataclass(slots=True)
class CalibrationResult:
    chosen: SweepPoint
    method: str
    frontier: list[SweepPoint]
    points: list[SweepPoint]
    degenerate: bool
    definition: GroupDefinition

    def to_dict(self) -> dict:
        return {
            "points": [p.to_dict() for p in self.points],
            "frontier": [p.to_dict() for p in self.frontier],
            "chosen": self.chosen.to_dict(),
            "method": self.method,
            "degenerate": self.degenerate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def sweep(
    scores: Sequence[PatientScore],
    holdout: Iterable[str],
    max_f: int,
    max_d: int,
) -> list[SweepPoint]:
    """One point per (alpha_f, alpha_d) in [0..max_f] x [0..max_d].

    Uses 2-D cumulative counts so the cost is one pass over the scores plus
    the grid itself.
    """
    holdout_set = set(holdout)
    if not holdout_set:
        raise InputError("sweep needs a non-empty holdout set")
    h = len(holdout_set)

    pop = [[0] * (max_d + 2) for _ in range(max_f + 2)]
    hold = [[0] * (max_d + 2) for _ in range(max_f + 2)]
    for s in scores:
        a = min(s.activity_score, max_f + 1)
        d = min(s.dbc_score, max_d + 1)
        pop[a][d] += 1
        if s.patient_id in holdout_set:
            hold[a][d] += 1

    # in-place 2-D prefix sums
    for grid in (pop, hold):
        for a in range(max_f + 2):
            row = grid[a]
            for d in range(1, max_d + 2):
                row[d] += row[d - 1]
        for a in range(1, max_f + 2):
            ra, rp = grid[a], grid[a - 1]
            for d in range(max_d + 2):
                ra[d] += rp[d]

    points = []
    for a in range(max_f + 1):
        for d in range(max_d + 1):
            points.append(SweepPoint(a, d, pop[a][d], Fraction(hold[a][d], h)))
    return points


def pareto_frontier(points: Sequence[SweepPoint]) -> list[SweepPoint]:
    """Minimal group size per achievable recall level; dominated points
    dropped. Sorted by ascending group_size with strictly increasing
    recall_bar; ties on group_size broken by smaller alpha_f, then alpha_d."""
    if not points:
        raise InputError("no sweep points to reduce")
    best_recall = None
    frontier = []
    for p in sorted(points, key=lambda p: (p.group_size, -p.recall_bar, p.alpha_f, p.alpha_d)):
        if best_recall is None or p.recall_bar > best_recall:
            frontier.append(p)
            best_recall = p.recall_bar
    return frontier


_EPS = 1e-12


def elbow(frontier: Sequence[SweepPoint]) -> tuple[SweepPoint, bool]:
    """Knee of the normalized recall-vs-size curve: the interior point with
    maximum perpendicular distance to the chord joining the frontier's
    endpoints. Returns (point, degenerate_flag); flat or linear curves and
    frontiers without interior points are flagged degenerate."""
    if not frontier:
        raise DegenerateCalibrationError("empty frontier")
    if len(frontier) == 1:
        return frontier[0], True
    if len(frontier) == 2:
        return min(frontier, key=lambda p: p.group_size), True

    first, last = frontier[0], frontier[-1]
    dx = last.group_size - first.group_size
    dy = float(last.recall_bar - first.recall_bar)
    if dx == 0 or dy == 0:
        return frontier[0], True

    def norm_x(p):
        return (p.group_size - first.group_size) / dx

    def norm_y(p):
        return float(p.recall_bar - first.recall_bar) / dy

    # chord is the segment (0,0)-(1,1) after normalization; perpendicular
    # distance is |y - x| / sqrt(2), the sqrt(2) is a common factor
    interior = frontier[1:-1]
    distances = [abs(norm_y(p) - norm_x(p)) for p in interior]
    degenerate = max(distances) - min(distances) < _EPS
    best_idx = 0
    for i, d in enumerate(distances):
        if d > distances[best_idx] + _EPS:
            best_idx = i
        elif abs(d - distances[best_idx]) <= _EPS and interior[i].group_size < interior[best_idx].group_size:
            best_idx = i
    return interior[best_idx], degenerate


def lee_liu(frontier: Sequence[SweepPoint]) -> SweepPoint:
    """Point maximizing recall_bar^2 / group_size; empty groups skipped,
    ties broken by smaller group_size."""
    candidates = [p for p in frontier if p.group_size > 0]
    if not candidates:
        raise DegenerateCalibrationError("all candidate cut-offs select an empty group")
    best = None
    best_score = None
    for p in sorted(candidates, key=lambda p: (p.group_size, p.alpha_f, p.alpha_d)):
        score = p.recall_bar * p.recall_bar / p.group_size
        if best_score is None or score > best_score:
            best, best_score = p, score
    return best


def calibrate(
    log: EventLog,
    definition: GroupDefinition,
    holdout: Iterable[str],
    method: str = "elbow",
    scores: Sequence[PatientScore] | None = None,
) -> CalibrationResult:
    """score_population -> sweep -> pareto_frontier -> chosen point; the
    returned result carries a copy of the definition with the chosen
    cut-offs written in."""
    if method not in ("elbow", "lee_liu"):
        raise InputError(f"unknown calibration method {method!r}")
    if scores is None:
        scores = score_population(log, definition)
    points = sweep(scores, holdout, len(definition.pattern), len(definition.dbcs))
    frontier = pareto_frontier(points)
    if method == "elbow":
        chosen, degenerate = elbow(frontier)
    else:
        chosen = lee_liu(frontier)
        degenerate = False
    new_def = definition.with_cutoffs(chosen.alpha_f, chosen.alpha_d, method=method)
    return CalibrationResult(chosen, method, frontier, points, degenerate, new_def)
