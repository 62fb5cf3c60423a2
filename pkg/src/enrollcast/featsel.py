"""Wrapper feature-subset selection.

Best-first search over the subset lattice, backward (start from the full set,
remove one attribute per neighbor) or forward (start from the singletons, add
one). A subset's merit is the pooled k-fold CV accuracy of the wrapped
logistic regression restricted to it; all subsets of one dataset are scored
on the identical seeded fold assignment, so merit comparisons carry no fold
noise. The search stops after ``stale_limit`` consecutive node expansions
that fail to improve the best merit, or when the open list empties.

Candidate ordering everywhere (open list, best-so-far, exhaustive oracle):
higher merit first, then smaller subset, then lexicographically smaller
index tuple. The total order makes every run deterministic.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .dataset import DesignMatrix
from .errors import TooManyFeatures
from .evaluation import cv_accuracy
from .logreg import FitConfig

BACKWARD = "backward"
FORWARD = "forward"

# exhaustive_search evaluates 2^d - 1 subsets; keep that bounded
_EXHAUSTIVE_MAX_FEATURES = 16


@dataclass(frozen=True)
class SearchConfig:
    direction: str = BACKWARD
    stale_limit: int = 5
    merit_folds: int = 5
    seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if self.direction not in (BACKWARD, FORWARD):
            raise ValueError(f"direction must be {BACKWARD!r} or {FORWARD!r}")
        if self.stale_limit < 1:
            raise ValueError("stale_limit must be >= 1")
        if self.merit_folds < 2:
            raise ValueError("merit_folds must be >= 2")


@dataclass(frozen=True)
class SubsetSearchResult:
    selected: tuple[int, ...]
    merit: float
    subsets_evaluated: int
    nodes_expanded: int
    trace: tuple[tuple[tuple[int, ...], float], ...]  # (subset, merit) in evaluation order

    def to_dict(self, feature_names: tuple[str, ...] | None = None) -> dict:
        out = {
            "selected": list(self.selected),
            "merit": self.merit,
            "subsets_evaluated": self.subsets_evaluated,
            "nodes_expanded": self.nodes_expanded,
            "trace": [[list(subset), merit] for subset, merit in self.trace],
        }
        if feature_names is not None:
            out["selected_names"] = [feature_names[i] for i in self.selected]
        return out


def _order_key(merit: float, subset: tuple[int, ...]):
    # min() under this key = best candidate under the declared tie rule
    return (-merit, len(subset), subset)


class _MeritTable:
    """Evaluation cache + trace; guarantees each subset is scored once."""

    def __init__(self, matrix: DesignMatrix, config: SearchConfig):
        self.matrix = matrix
        self.config = config
        self.merits: dict[tuple[int, ...], float] = {}
        self.trace: list[tuple[tuple[int, ...], float]] = []

    def evaluate(self, subset: tuple[int, ...]) -> float:
        if subset in self.merits:
            return self.merits[subset]
        merit = cv_accuracy(
            self.matrix, subset, self.config.merit_folds, self.config.fit, self.config.seed
        )
        self.merits[subset] = merit
        self.trace.append((subset, merit))
        return merit


def best_first_search(matrix: DesignMatrix, config: SearchConfig) -> SubsetSearchResult:
    """Best-first wrapper search; returns the best subset seen.

    Backward search always evaluates the full feature set first, so the
    returned merit is never below the start set's.
    """
    d = matrix.d
    table = _MeritTable(matrix, config)
    open_heap: list[tuple[tuple, tuple[int, ...]]] = []

    def push(subset: tuple[int, ...], merit: float) -> None:
        heapq.heappush(open_heap, (_order_key(merit, subset), subset))

    if config.direction == BACKWARD:
        start_nodes = [tuple(range(d))]
    else:
        start_nodes = [(i,) for i in range(d)]
    best_subset, best_merit = None, -1.0
    for subset in start_nodes:
        merit = table.evaluate(subset)
        push(subset, merit)
        if best_subset is None or _order_key(merit, subset) < _order_key(best_merit, best_subset):
            best_subset, best_merit = subset, merit

    nodes_expanded = 0
    stale = 0
    while open_heap and stale < config.stale_limit:
        _, node = heapq.heappop(open_heap)
        if config.direction == BACKWARD:
            neighbors = [
                tuple(i for i in node if i != drop) for drop in node if len(node) > 1
            ]
        else:
            neighbors = [
                tuple(sorted(node + (add,))) for add in range(d) if add not in node
            ]
        improved = False
        for neighbor in neighbors:
            if neighbor in table.merits:
                continue
            merit = table.evaluate(neighbor)
            push(neighbor, merit)
            if merit > best_merit:
                improved = True
            if _order_key(merit, neighbor) < _order_key(best_merit, best_subset):
                best_subset, best_merit = neighbor, merit
        nodes_expanded += 1
        stale = 0 if improved else stale + 1

    return SubsetSearchResult(
        selected=best_subset,
        merit=best_merit,
        subsets_evaluated=len(table.trace),
        nodes_expanded=nodes_expanded,
        trace=tuple(table.trace),
    )


def exhaustive_search(matrix: DesignMatrix, config: SearchConfig) -> SubsetSearchResult:
    """Score every non-empty subset (test oracle for best_first_search).

    Uses the same folds, seed and tie rule as the best-first search, so on
    small problems the two must return identical (subset, merit).
    """
    d = matrix.d
    if d > _EXHAUSTIVE_MAX_FEATURES:
        raise TooManyFeatures(
            f"exhaustive search over {d} features would score {2 ** d - 1} subsets"
        )
    table = _MeritTable(matrix, config)
    best_subset, best_merit = None, -1.0
    for size in range(1, d + 1):
        for subset in itertools.combinations(range(d), size):
            merit = table.evaluate(subset)
            if best_subset is None or _order_key(merit, subset) < _order_key(
                best_merit, best_subset
            ):
                best_subset, best_merit = subset, merit
    return SubsetSearchResult(
        selected=best_subset,
        merit=best_merit,
        subsets_evaluated=len(table.trace),
        nodes_expanded=0,
        trace=tuple(table.trace),
    )


def apply_subset(matrix: DesignMatrix, subset) -> DesignMatrix:
    """Restrict a design matrix to the selected features (intercept kept,
    original column order preserved)."""
    return matrix.select(subset)
