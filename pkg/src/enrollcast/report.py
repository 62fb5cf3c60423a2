"""Report rendering: delimited metric files plus matplotlib figures.

Given a stored model this writes, side by side in one directory, the numbers
(metrics.csv, confusion.csv, cv_folds.csv, search_trace.csv) and the pictures
(ROC curve, per-fold accuracy bars, search merit trajectory). Dataset
summaries render one bar chart + CSV per grouping feature.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only; no display required

import matplotlib.pyplot as plt

from .dataset import CleanDataset, summarize
from .evaluation import ClassMetrics
from .store import StoredModel

# the exploration groupings the dashboard shows by default, when present
DEFAULT_GROUPINGS = (
    "Within_City",
    "College_Admitted_To_Binary",
    "Religion_Binary",
    "Gender",
    "School_Type",
)

_METRIC_COLUMNS = ("tp_rate", "fp_rate", "precision", "recall", "f_measure", "accuracy")


def _metric_cells(metrics: ClassMetrics) -> list[str]:
    return [f"{getattr(metrics, name):.6f}" for name in _METRIC_COLUMNS]


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def render_model_report(stored: StoredModel, out_dir: str | Path) -> list[Path]:
    """Write metric CSVs and figures for one stored model; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []

    metric_rows = []
    if stored.holdout_eval is not None:
        report = stored.holdout_eval
        metric_rows.append(["holdout", "positive", *_metric_cells(report.positive), f"{report.roc.auc:.6f}"])
        metric_rows.append(["holdout", "negative", *_metric_cells(report.negative), ""])
        metric_rows.append(["holdout", "weighted", *_metric_cells(report.weighted), ""])
    if stored.cv_eval is not None:
        metric_rows.append(
            ["cv", "pooled", *_metric_cells(stored.cv_eval.pooled), f"{stored.cv_eval.pooled_auc:.6f}"]
        )
    files.append(
        _write_csv(out / "metrics.csv", ["scope", "class", *_METRIC_COLUMNS, "auc"], metric_rows)
    )

    confusion_rows = []
    if stored.holdout_eval is not None:
        cm = stored.holdout_eval.confusion
        confusion_rows.append(["holdout", cm.tp, cm.fp, cm.tn, cm.fn])
    if stored.cv_eval is not None:
        cm = stored.cv_eval.pooled_confusion
        confusion_rows.append(["cv_pooled", cm.tp, cm.fp, cm.tn, cm.fn])
    files.append(_write_csv(out / "confusion.csv", ["scope", "tp", "fp", "tn", "fn"], confusion_rows))

    if stored.holdout_eval is not None:
        roc = stored.holdout_eval.roc
        fpr = [p[0] for p in roc.points]
        tpr = [p[1] for p in roc.points]
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.plot(fpr, tpr, lw=1.5, label=f"model (AUC = {roc.auc:.3f})")
        ax.plot([0, 1], [0, 1], ls="--", lw=1, color="gray", label="no skill (AUC = 0.5)")
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.set_title("Holdout ROC")
        ax.legend(loc="lower right")
        fig.tight_layout()
        path = out / "roc.png"
        fig.savefig(path)
        plt.close(fig)
        files.append(path)

    if stored.cv_eval is not None:
        cv = stored.cv_eval
        fold_rows = [
            [f, *_metric_cells(metrics)] for f, metrics in enumerate(cv.per_fold)
        ]
        files.append(_write_csv(out / "cv_folds.csv", ["fold", *_METRIC_COLUMNS], fold_rows))

        fig, ax = plt.subplots(figsize=(6, 4))
        accuracies = [m.accuracy for m in cv.per_fold]
        ax.bar(range(cv.k), accuracies, color="#4878a8")
        ax.axhline(cv.pooled.accuracy, color="#c44e52", lw=1.5,
                   label=f"pooled = {cv.pooled.accuracy:.3f}")
        ax.set_xlabel("fold")
        ax.set_ylabel("accuracy")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(f"{cv.k}-fold cross-validation")
        ax.legend()
        fig.tight_layout()
        path = out / "cv_accuracy.png"
        fig.savefig(path)
        plt.close(fig)
        files.append(path)

    if stored.selected_subset is not None:
        result = stored.selected_subset
        names = stored.schema.feature_names
        trace_rows = [
            [i, len(subset), f"{merit:.6f}", "|".join(names[j] for j in subset)]
            for i, (subset, merit) in enumerate(result.trace)
        ]
        files.append(
            _write_csv(out / "search_trace.csv", ["order", "size", "merit", "subset"], trace_rows)
        )

        fig, ax = plt.subplots(figsize=(6, 4))
        merits = [merit for _, merit in result.trace]
        best_so_far = []
        best = -1.0
        for merit in merits:
            best = max(best, merit)
            best_so_far.append(best)
        ax.plot(merits, ".", ms=4, alpha=0.6, label="subset merit")
        ax.plot(best_so_far, lw=1.5, color="#c44e52", label="best so far")
        ax.set_xlabel("evaluation order")
        ax.set_ylabel("merit (CV accuracy)")
        ax.set_title(
            f"Best-first search: {result.subsets_evaluated} subsets, "
            f"{len(result.selected)} selected"
        )
        ax.legend()
        fig.tight_layout()
        path = out / "search_merit.png"
        fig.savefig(path)
        plt.close(fig)
        files.append(path)

    return files


def render_dataset_summaries(
    data: CleanDataset, out_dir: str | Path, features: list[str] | None = None
) -> list[Path]:
    """One bar chart + CSV per grouping feature (the default groupings when
    present in the schema, the first five features otherwise)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = data.schema.feature_names
    if features is None:
        features = [f for f in DEFAULT_GROUPINGS if f in names]
        if not features:
            features = list(names[:5])

    files: list[Path] = []
    for name in features:
        groups = summarize(data, name)
        files.append(
            _write_csv(out / f"summary_{name}.csv", ["label", "count"], [list(g) for g in groups])
        )
        labels = [label for label, _ in groups]
        counts = [count for _, count in groups]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(range(len(groups)), counts, color="#4878a8")
        ax.set_xticks(range(len(groups)))
        ax.set_xticklabels(labels, rotation=30, ha="right")
        for i, count in enumerate(counts):
            ax.annotate(str(count), (i, count), ha="center", va="bottom", fontsize=8)
        ax.set_ylabel("applicants")
        ax.set_title(f"Applicants by {name}")
        fig.tight_layout()
        path = out / f"summary_{name}.png"
        fig.savefig(path)
        plt.close(fig)
        files.append(path)
    return files
