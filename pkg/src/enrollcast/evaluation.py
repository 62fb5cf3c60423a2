"""Classifier scoring: confusion matrices, per-class rates, F-measure,
ROC/AUC, and seeded stratified k-fold cross-validation.

The positive class is ``enrolled`` throughout. AUC is computed by the
trapezoid rule over the tie-grouped ROC sweep, which equals the Mann-Whitney
statistic (#concordant + half the ties) / (#pos * #neg).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import ENROLLED, DesignMatrix
from .errors import EmptyInput, LengthMismatch, SingleClass, TooFewPerClass
from .logreg import FitConfig, LogisticModel, fit, predict_proba_matrix


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn
        )

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class ClassMetrics:
    tp_rate: float
    fp_rate: float
    precision: float
    recall: float
    f_measure: float
    accuracy: float
    degenerate: bool = False  # set when any rate came from a 0/0 cell

    def to_dict(self) -> dict:
        return {
            "tp_rate": self.tp_rate,
            "fp_rate": self.fp_rate,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "accuracy": self.accuracy,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (fpr, tpr), ascending, (0,0)..(1,1)
    auc: float

    def to_dict(self) -> dict:
        return {"points": [[fpr, tpr] for fpr, tpr in self.points], "auc": self.auc}


@dataclass(frozen=True)
class CvReport:
    k: int
    seed: int
    per_fold: tuple[ClassMetrics, ...]
    pooled: ClassMetrics
    pooled_auc: float
    pooled_confusion: ConfusionMatrix

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "per_fold": [m.to_dict() for m in self.per_fold],
            "pooled": self.pooled.to_dict(),
            "pooled_auc": self.pooled_auc,
            "pooled_confusion": self.pooled_confusion.to_dict(),
        }


@dataclass(frozen=True)
class EvaluationReport:
    """Holdout scoring bundle: confusion plus metrics for the positive class,
    the negative class, and their support-weighted average, plus the ROC."""

    confusion: ConfusionMatrix
    positive: ClassMetrics
    negative: ClassMetrics
    weighted: ClassMetrics
    roc: RocCurve
    threshold: float = 0.5

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion.to_dict(),
            "positive": self.positive.to_dict(),
            "negative": self.negative.to_dict(),
            "weighted": self.weighted.to_dict(),
            "roc": self.roc.to_dict(),
            "threshold": self.threshold,
        }


def confusion(truth: Sequence[str], predicted: Sequence[str]) -> ConfusionMatrix:
    """Count the four cells; positive class = enrolled."""
    if len(truth) != len(predicted):
        raise LengthMismatch(f"truth has {len(truth)} labels, predicted has {len(predicted)}")
    if not truth:
        raise EmptyInput("cannot score zero rows")
    tp = fp = tn = fn = 0
    for t, p in zip(truth, predicted):
        if t == ENROLLED:
            if p == ENROLLED:
                tp += 1
            else:
                fn += 1
        else:
            if p == ENROLLED:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _safe_rate(num: int, den: int) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Rates for the positive class. Any 0/0 cell yields 0 and sets the
    degenerate flag instead of raising, so tiny CV folds never abort a run."""
    tp_rate, d1 = _safe_rate(cm.tp, cm.tp + cm.fn)
    fp_rate, d2 = _safe_rate(cm.fp, cm.fp + cm.tn)
    precision, d3 = _safe_rate(cm.tp, cm.tp + cm.fp)
    accuracy, d4 = _safe_rate(cm.tp + cm.tn, cm.total)
    return ClassMetrics(
        tp_rate=tp_rate,
        fp_rate=fp_rate,
        precision=precision,
        recall=tp_rate,
        f_measure=f_measure(precision, tp_rate),
        accuracy=accuracy,
        degenerate=d1 or d2 or d3 or d4,
    )


def _negative_view(cm: ConfusionMatrix) -> ConfusionMatrix:
    return ConfusionMatrix(tp=cm.tn, fp=cm.fn, tn=cm.tp, fn=cm.fp)


def weighted_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Support-weighted average of the positive- and negative-class metrics."""
    pos, neg = class_metrics(cm), class_metrics(_negative_view(cm))
    n_pos, n_neg = cm.tp + cm.fn, cm.tn + cm.fp
    total = n_pos + n_neg

    def avg(a: float, b: float) -> float:
        if total == 0:
            return 0.0
        return (a * n_pos + b * n_neg) / total

    return ClassMetrics(
        tp_rate=avg(pos.tp_rate, neg.tp_rate),
        fp_rate=avg(pos.fp_rate, neg.fp_rate),
        precision=avg(pos.precision, neg.precision),
        recall=avg(pos.recall, neg.recall),
        f_measure=avg(pos.f_measure, neg.f_measure),
        accuracy=pos.accuracy,
        degenerate=pos.degenerate or neg.degenerate,
    )


def roc_auc(scores: Sequence[float], truth: Sequence[str]) -> RocCurve:
    """ROC curve from sweeping thresholds over the distinct scores (ties
    grouped), with trapezoidal AUC."""
    if len(scores) != len(truth):
        raise LengthMismatch(f"{len(scores)} scores vs {len(truth)} labels")
    pos = np.fromiter((t == ENROLLED for t in truth), dtype=bool, count=len(truth))
    return _roc_from_mask(np.asarray(scores, dtype=float), pos)


def _roc_from_mask(score_arr: np.ndarray, pos: np.ndarray) -> RocCurve:
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes present")

    order = np.argsort(-score_arr, kind="stable")
    sorted_scores = score_arr[order]
    sorted_pos = pos[order]
    # indices where a tie-group of equal scores ends
    group_ends = np.flatnonzero(np.diff(sorted_scores) != 0)
    group_ends = np.append(group_ends, len(sorted_scores) - 1)
    cum_tp = np.cumsum(sorted_pos)[group_ends]
    cum_fp = np.cumsum(~sorted_pos)[group_ends]

    fpr = np.concatenate(([0.0], cum_fp / n_neg))
    tpr = np.concatenate(([0.0], cum_tp / n_pos))
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1])) * 0.5)
    points = tuple((float(a), float(b)) for a, b in zip(fpr, tpr))
    return RocCurve(points=points, auc=auc)


def fold_assignment(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold index per row: a seeded shuffle within each class, chunked by
    largest-remainder sizes. Depends only on (y, k, seed), so every feature
    subset of one dataset is scored on identical folds."""
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=int)
    for c in (0.0, 1.0):
        idx = np.flatnonzero(y == c)
        if idx.size == 0:
            continue
        perm = idx[rng.permutation(idx.size)]
        base, extra = divmod(idx.size, k)
        start = 0
        for f in range(k):
            size = base + (1 if f < extra else 0)
            folds[perm[start : start + size]] = f
            start += size
    return folds


def _confusion_from_masks(pred_pos: np.ndarray, actual_pos: np.ndarray) -> ConfusionMatrix:
    return ConfusionMatrix(
        tp=int(np.sum(pred_pos & actual_pos)),
        fp=int(np.sum(pred_pos & ~actual_pos)),
        tn=int(np.sum(~pred_pos & ~actual_pos)),
        fn=int(np.sum(~pred_pos & actual_pos)),
    )


def evaluate_model(
    model: LogisticModel, matrix: DesignMatrix, threshold: float = 0.5
) -> EvaluationReport:
    """Score a fitted model on a design matrix (holdout evaluation)."""
    scores = predict_proba_matrix(model, matrix)
    actual_pos = matrix.y == 1.0
    cm = _confusion_from_masks(scores >= threshold, actual_pos)
    return EvaluationReport(
        confusion=cm,
        positive=class_metrics(cm),
        negative=class_metrics(_negative_view(cm)),
        weighted=weighted_metrics(cm),
        roc=_roc_from_mask(scores, actual_pos),
        threshold=threshold,
    )


def cross_validate(
    matrix: DesignMatrix, k: int, config: FitConfig = FitConfig(), seed: int = 0
) -> CvReport:
    """Stratified k-fold CV: each fold scored by a model fit on the rest.

    Pooled metrics come from the summed confusion counts; pooled AUC from the
    out-of-fold scores concatenated in fold order. Deterministic given seed.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    y = matrix.y
    counts = {c: int((y == c).sum()) for c in (0.0, 1.0)}
    smallest = min(counts.values())
    if smallest < k:
        raise TooFewPerClass(f"smallest class has {smallest} rows, need >= {k}")

    folds = fold_assignment(y, k, seed)
    per_fold = []
    pooled_cm = ConfusionMatrix(0, 0, 0, 0)
    all_scores: list[np.ndarray] = []
    all_pos: list[np.ndarray] = []
    threshold = 0.5
    for f in range(k):
        test_mask = folds == f
        train = DesignMatrix(
            x=matrix.x[~test_mask], y=matrix.y[~test_mask], feature_names=matrix.feature_names
        )
        test = DesignMatrix(
            x=matrix.x[test_mask], y=matrix.y[test_mask], feature_names=matrix.feature_names
        )
        model = fit(train, config)
        scores = predict_proba_matrix(model, test)
        actual_pos = test.y == 1.0
        cm = _confusion_from_masks(scores >= threshold, actual_pos)
        per_fold.append(class_metrics(cm))
        pooled_cm = pooled_cm + cm
        all_scores.append(scores)
        all_pos.append(actual_pos)

    pooled_auc = _roc_from_mask(np.concatenate(all_scores), np.concatenate(all_pos)).auc
    return CvReport(
        k=k,
        seed=seed,
        per_fold=tuple(per_fold),
        pooled=class_metrics(pooled_cm),
        pooled_auc=pooled_auc,
        pooled_confusion=pooled_cm,
    )


def cv_accuracy(
    matrix: DesignMatrix,
    subset: Sequence[int],
    k: int,
    config: FitConfig = FitConfig(),
    seed: int = 0,
) -> float:
    """Pooled k-fold CV accuracy on the given feature subset (intercept always
    kept). This is the wrapper selection merit."""
    restricted = matrix.select(subset)  # raises EmptySubset / BadIndex
    return cross_validate(restricted, k, config, seed).pooled.accuracy
