"""Build the interpretable group definition.

The definition is the single longest frequent activity pattern plus the
codes that co-occur with it often enough across the sample, together with
the two support thresholds and the (later calibrated) integer cut-offs.
Both threshold comparisons are inclusive (>=).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import EmptyPatternError, InputError
from .eventlog import PatientProjection
from .mining import MiningResult, Threshold, as_fraction, fp_growth, min_count

DEFAULT_STEP = Fraction(1, 20)   # 0.05
DEFAULT_FLOOR = Fraction(1, 20)


@dataclass(slots=True)
class GroupDefinition:
    pattern: frozenset[str]
    dbcs: frozenset[str]
    phi_a: Fraction
    phi_d: Fraction
    alpha_f: int = 0
    alpha_d: int = 0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.pattern:
            raise EmptyPatternError("group definition needs a non-empty pattern")
        if not (0 < self.phi_a <= 1 and 0 < self.phi_d <= 1):
            raise InputError("thresholds must be in (0, 1]")
        if not (0 <= self.alpha_f <= len(self.pattern)):
            raise InputError("alpha_f out of range")
        if not (0 <= self.alpha_d <= len(self.dbcs)):
            raise InputError("alpha_d out of range")

    def with_cutoffs(self, alpha_f: int, alpha_d: int, **extra_provenance) -> "GroupDefinition":
        prov = dict(self.provenance, **extra_provenance)
        return replace(self, alpha_f=alpha_f, alpha_d=alpha_d, provenance=prov)

    def to_dict(self) -> dict:
        return {
            "pattern": sorted(self.pattern),
            "dbcs": sorted(self.dbcs),
            "phi_a": float(self.phi_a),
            "phi_d": float(self.phi_d),
            "alpha_f": self.alpha_f,
            "alpha_d": self.alpha_d,
            "provenance": self.provenance,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> "GroupDefinition":
        return cls(
            pattern=frozenset(data["pattern"]),
            dbcs=frozenset(data["dbcs"]),
            phi_a=as_fraction(data["phi_a"]),
            phi_d=as_fraction(data["phi_d"]),
            alpha_f=int(data["alpha_f"]),
            alpha_d=int(data["alpha_d"]),
            provenance=dict(data.get("provenance", {})),
        )


@dataclass(frozen=True, slots=True)
class RelaxationStep:
    threshold: Fraction
    added_items: frozenset[str]
    current_selection: frozenset[str]


def select_pattern(result: MiningResult) -> frozenset[str]:
    """The single longest frequent pattern; ties broken by highest support,
    then lexicographically smallest item list."""
    if not result.patterns:
        raise EmptyPatternError(
            "no frequent pattern at this threshold; relax phi_a and retry"
        )
    # patterns already sorted by (length desc, support desc, items lex)
    return result.patterns[0].items


def dbc_support(
    code: str, pattern: frozenset[str], sample: Sequence[PatientProjection]
) -> Fraction:
    """Fraction of sample patients with at least one event pairing `code`
    with an activity of `pattern`."""
    if not sample:
        raise InputError("dbc support undefined for an empty sample")
    hits = sum(
        1
        for p in sample
        if any(a in pattern for a, d in p.cooccurrence if d == code)
    )
    return Fraction(hits, len(sample))


def select_dbcs(
    pattern: frozenset[str],
    sample: Sequence[PatientProjection],
    phi_d: Threshold,
) -> frozenset[str]:
    if not pattern:
        raise EmptyPatternError("cannot select codes for an empty pattern")
    thr = as_fraction(phi_d)
    if not sample:
        raise InputError("dbc selection needs a non-empty sample")
    n = len(sample)
    minc = min_count(thr, n)
    counts: dict[str, int] = {}
    for p in sample:
        seen = {d for a, d in p.cooccurrence if a in pattern}
        for d in seen:
            counts[d] = counts.get(d, 0) + 1
    return frozenset(d for d, c in counts.items() if c >= minc)


def longest_pattern(
    sample: Sequence[PatientProjection], threshold: Threshold
) -> frozenset[str]:
    """Longest frequent itemset without materializing the full lattice.

    Same tie rules as select_pattern. Returns the empty set when nothing is
    frequent. Depth-first search over items with a length bound prune; at
    min count 1 the answer is just the best single patient set.
    """
    thr = as_fraction(threshold)
    if not (0 < thr <= 1):
        raise InputError(f"support threshold must be in (0, 1], got {threshold}")
    if not sample:
        raise InputError("cannot mine an empty sample")
    n = len(sample)
    minc = min_count(thr, n)
    if minc <= 1:
        candidates = {p.activities for p in sample}
        best = None
        for items in candidates:
            cnt = sum(1 for p in sample if items <= p.activities)
            key = (-len(items), -cnt, tuple(sorted(items)))
            if best is None or key < best[0]:
                best = (key, items)
        return best[1] if best else frozenset()

    tids: dict[str, int] = {}
    for i, p in enumerate(sample):
        for a in p.activities:
            tids[a] = tids.get(a, 0) | (1 << i)
    items = sorted(
        (a for a, t in tids.items() if bin(t).count("1") >= minc),
        key=lambda a: (bin(tids[a]).count("1"), a),
    )
    def key_of(selection: tuple[str, ...], count: int):
        return (-len(selection), -count, tuple(sorted(selection)))

    best_key = key_of((), n)

    def dfs(prefix: tuple[str, ...], prefix_tid: int, start: int):
        nonlocal best_key
        if len(prefix) + (len(items) - start) < -best_key[0]:
            return
        for idx in range(start, len(items)):
            if len(prefix) + (len(items) - idx) < -best_key[0]:
                return
            item = items[idx]
            tid = prefix_tid & tids[item]
            cnt = bin(tid).count("1")
            if cnt < minc:
                continue
            new_prefix = prefix + (item,)
            k = key_of(new_prefix, cnt)
            if k < best_key:
                best_key = k
            dfs(new_prefix, tid, idx + 1)

    dfs((), (1 << n) - 1, 0)
    return frozenset(best_key[2])


def _threshold_ladder(start: Threshold, step: Threshold, floor: Threshold) -> list[Fraction]:
    start_f, step_f, floor_f = as_fraction(start), as_fraction(step), as_fraction(floor)
    if not (0 < step_f < 1):
        raise InputError(f"relaxation step must be in (0, 1), got {step}")
    if not (0 < start_f <= 1):
        raise InputError(f"relaxation start must be in (0, 1], got {start}")
    ladder = []
    t = start_f
    while t >= floor_f and t > 0:
        ladder.append(t)
        t -= step_f
    return ladder


def relax_activities(
    sample: Sequence[PatientProjection],
    start: Threshold = 1,
    step: Threshold = DEFAULT_STEP,
    floor: Threshold = DEFAULT_FLOOR,
) -> Iterator[RelaxationStep]:
    """Stepwise threshold walk for the activity pattern.

    The running selection is the cumulative union of the longest pattern at
    each threshold, so it can only grow as the threshold drops; added_items
    at each step are the genuinely new labels an expert must vet. Lazy, so
    an interactive session can stop anywhere.
    """
    selection: frozenset[str] = frozenset()
    for t in _threshold_ladder(start, step, floor):
        pattern = longest_pattern(sample, t)
        added = pattern - selection
        selection = selection | pattern
        yield RelaxationStep(t, added, selection)


def relax_dbcs(
    pattern: frozenset[str],
    sample: Sequence[PatientProjection],
    start: Threshold = 1,
    step: Threshold = DEFAULT_STEP,
    floor: Threshold = DEFAULT_FLOOR,
) -> Iterator[RelaxationStep]:
    """Stepwise walk for the code set; depends on the (frozen) pattern."""
    selection: frozenset[str] = frozenset()
    for t in _threshold_ladder(start, step, floor):
        current = select_dbcs(pattern, sample, t)
        added = current - selection
        selection = selection | current
        yield RelaxationStep(t, added, selection)


def build_definition(
    sample: Sequence[PatientProjection],
    phi_a: Threshold,
    phi_d: Threshold,
    provenance: dict | None = None,
) -> GroupDefinition:
    """fp_growth -> select_pattern -> select_dbcs; cut-offs default to 0
    pending calibration."""
    phi_a_f, phi_d_f = as_fraction(phi_a), as_fraction(phi_d)
    pattern = select_pattern(fp_growth(sample, phi_a_f))
    dbcs = select_dbcs(pattern, sample, phi_d_f)
    return GroupDefinition(
        pattern=pattern,
        dbcs=dbcs,
        phi_a=phi_a_f,
        phi_d=phi_d_f,
        provenance=provenance or {},
    )
