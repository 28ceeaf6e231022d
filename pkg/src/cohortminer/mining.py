"""Frequent itemset mining over per-patient activity sets.

Support of an itemset is the fraction of sample patients whose distinct
activity set contains it. `fp_growth` is the production miner; the
exhaustive `brute_force_mine` recounts the same definition directly and
serves as its correctness oracle. Supports are kept as exact rationals so
that threshold comparisons at boundaries (0.8 of 15 patients = 12) never
suffer float epsilon bugs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import InputError
from .eventlog import PatientProjection

Threshold = Union[Fraction, float, int, str]


def as_fraction(value: Threshold) -> Fraction:
    """Read a threshold exactly.

    Floats are interpreted through their decimal literal (0.8 -> 4/5), not
    their binary expansion, so CLI-style values behave as written.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def min_count(threshold: Fraction, sample_size: int) -> int:
    """Smallest patient count c with c/sample_size >= threshold."""
    num = threshold.numerator * sample_size
    den = threshold.denominator
    return -(-num // den)  # ceiling division


@dataclass(frozen=True, slots=True)
class FrequentPattern:
    items: frozenset[str]
    count: int
    sample_size: int

    @property
    def support(self) -> Fraction:
        return Fraction(self.count, self.sample_size)

    def sort_key(self):
        # descending length, descending support, lexicographic items
        return (-len(self.items), -self.support, tuple(sorted(self.items)))


@dataclass(slots=True)
class MiningResult:
    patterns: list[FrequentPattern]
    threshold: Fraction
    sample_size: int

    def to_dict(self) -> dict:
        return {
            "threshold": float(self.threshold),
            "sample_size": self.sample_size,
            "patterns": [
                {"items": sorted(p.items), "support": float(p.support)}
                for p in self.patterns
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def as_pairs(self) -> set[tuple[frozenset[str], Fraction]]:
        return {(p.items, p.support) for p in self.patterns}


def support_of(itemset: Iterable[str], sample: Sequence[PatientProjection]) -> Fraction:
    """Eq.-style support: fraction of sample patients with itemset ⊆ A_p."""
    if not sample:
        raise InputError("support undefined for an empty sample")
    wanted = frozenset(itemset)
    hits = sum(1 for p in sample if wanted <= p.activities)
    return Fraction(hits, len(sample))


def _check_mine_inputs(sample: Sequence[PatientProjection], threshold: Threshold) -> Fraction:
    if not sample:
        raise InputError("cannot mine an empty sample")
    thr = as_fraction(threshold)
    if not (0 < thr <= 1):
        raise InputError(f"support threshold must be in (0, 1], got {threshold}")
    return thr


class _Node:
    __slots__ = ("item", "count", "parent", "children", "link")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children = {}
        self.link = None


def _build_tree(transactions, counts, minc):
    """Returns (root, header) where header maps item -> [total, first node]."""
    order = {
        item: rank
        for rank, item in enumerate(
            sorted((i for i, c in counts.items() if c >= minc), key=lambda i: (-counts[i], i))
        )
    }
    root = _Node(None, None)
    header: dict = {}
    for items, weight in transactions:
        kept = sorted((i for i in items if i in order), key=order.__getitem__)
        node = root
        for item in kept:
            child = node.children.get(item)
            if child is None:
                child = _Node(item, node)
                node.children[item] = child
                entry = header.get(item)
                if entry is None:
                    header[item] = [0, child]
                else:
                    child.link = entry[1]
                    entry[1] = child
            node.children[item].count += weight
            header[item][0] += weight
            node = node.children[item]
    return root, header, order


def _single_path(root):
    path = []
    node = root
    while len(node.children) == 1:
        (node,) = node.children.values()
        path.append((node.item, node.count))
    if node.children:
        return None
    return path


def _mine(root, header, order, minc, suffix, out):
    path = _single_path(root)
    if path is not None:
        # every combination of path items is frequent with the min count
        for r in range(1, len(path) + 1):
            for combo in combinations(path, r):
                items = frozenset(i for i, _ in combo) | suffix
                out[items] = min(c for _, c in combo)
        return
    for item in sorted(header, key=order.__getitem__, reverse=True):
        total, node = header[item]
        if total < minc:
            continue
        new_suffix = suffix | {item}
        out[new_suffix] = total
        # conditional pattern base for this item
        base = []
        while node is not None:
            path_items = []
            parent = node.parent
            while parent.item is not None:
                path_items.append(parent.item)
                parent = parent.parent
            if path_items:
                base.append((path_items, node.count))
            node = node.link
        cond_counts: dict = {}
        for items, weight in base:
            for i in items:
                cond_counts[i] = cond_counts.get(i, 0) + weight
        if not any(c >= minc for c in cond_counts.values()):
            continue
        cond_root, cond_header, cond_order = _build_tree(base, cond_counts, minc)
        _mine(cond_root, cond_header, cond_order, minc, new_suffix, out)


def fp_growth(sample: Sequence[PatientProjection], threshold: Threshold) -> MiningResult:
    """All non-empty itemsets with support >= threshold, FP-tree based.

    Output order: descending length, then descending support, then
    lexicographic item list.
    """
    thr = _check_mine_inputs(sample, threshold)
    n = len(sample)
    minc = min_count(thr, n)
    counts: dict = {}
    for proj in sample:
        for item in proj.activities:
            counts[item] = counts.get(item, 0) + 1
    transactions = [(p.activities, 1) for p in sample]
    root, header, order = _build_tree(transactions, counts, minc)
    found: dict[frozenset[str], int] = {}
    _mine(root, header, order, minc, frozenset(), found)
    patterns = [FrequentPattern(items, c, n) for items, c in found.items() if c >= minc]
    patterns.sort(key=FrequentPattern.sort_key)
    return MiningResult(patterns, thr, n)


def brute_force_mine(sample: Sequence[PatientProjection], threshold: Threshold) -> MiningResult:
    """Exhaustive oracle: enumerate every non-empty subset of the sample's
    activity union and keep those meeting the threshold. Refuses alphabets
    larger than 20 items."""
    thr = _check_mine_inputs(sample, threshold)
    n = len(sample)
    universe = sorted(set().union(*(p.activities for p in sample)))
    if len(universe) > 20:
        raise InputError(
            f"brute-force mining refused: {len(universe)} distinct activities (max 20)"
        )
    index = {item: 1 << i for i, item in enumerate(universe)}
    masks = [sum(index[a] for a in p.activities) for p in sample]
    minc = min_count(thr, n)
    patterns = []
    for bits in range(1, 1 << len(universe)):
        cnt = sum(1 for m in masks if m & bits == bits)
        if cnt >= minc:
            items = frozenset(item for item in universe if index[item] & bits)
            patterns.append(FrequentPattern(items, cnt, n))
    patterns.sort(key=FrequentPattern.sort_key)
    return MiningResult(patterns, thr, n)
