import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_design_matrix
from enrollcast import (
    ENROLLED,
    NOT_ENROLLED,
    ConfusionMatrix,
    DesignMatrix,
    FitConfig,
    class_metrics,
    confusion,
    cross_validate,
    cv_accuracy,
    evaluate_model,
    f_measure,
    fit,
    roc_auc,
)
from enrollcast.errors import (
    EmptyInput,
    EmptySubset,
    LengthMismatch,
    SingleClass,
    TooFewPerClass,
)
from helpers import mann_whitney_auc

E, N = ENROLLED, NOT_ENROLLED


class TestConfusion:
    def test_all_correct_positives(self):
        cm = confusion([E, E, E], [E, E, E])
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (3, 0, 0, 0)

    def test_hand_count(self):
        cm = confusion([E, E, N, N], [E, N, E, N])
        assert (cm.tp, cm.fn, cm.fp, cm.tn) == (1, 1, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([E, E, N], [E, N, E, N])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            confusion([], [])

    def test_total_matches_input_length(self):
        cm = confusion([E, N, N, E, N], [N, N, E, E, N])
        assert cm.total == 5


class TestClassMetrics:
    def test_hand_arithmetic(self):
        metrics = class_metrics(ConfusionMatrix(tp=8, fn=2, fp=3, tn=7))
        assert metrics.tp_rate == pytest.approx(0.8)
        assert metrics.fp_rate == pytest.approx(0.3)
        assert metrics.precision == pytest.approx(8 / 11)
        assert metrics.recall == metrics.tp_rate
        assert metrics.f_measure == pytest.approx(0.7619047619047619)
        assert metrics.accuracy == pytest.approx(0.75)
        assert not metrics.degenerate

    def test_paper_row_consistency(self):
        # precision 0.772 and recall 0.840 must reproduce the reported 0.805
        assert f_measure(0.772, 0.840) == pytest.approx(0.805, abs=0.0005)

    def test_zero_over_zero_flags_degenerate(self):
        metrics = class_metrics(ConfusionMatrix(tp=0, fn=0, fp=0, tn=5))
        assert metrics.precision == 0.0
        assert metrics.tp_rate == 0.0
        assert metrics.accuracy == 1.0
        assert metrics.degenerate

    def test_f_is_harmonic_mean_whenever_defined(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            cells = rng.integers(0, 30, size=4)
            metrics = class_metrics(ConfusionMatrix(*map(int, cells)))
            p, r = metrics.precision, metrics.recall
            if p + r > 0:
                assert metrics.f_measure == pytest.approx(2 * p * r / (p + r), abs=1e-15)


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.1], [E, N]).auc == 1.0

    def test_constant_scores_are_half(self):
        assert roc_auc([0.4] * 10, [E, N] * 5).auc == 0.5

    def test_hand_counted_pairs(self):
        assert roc_auc([0.8, 0.4, 0.6, 0.2], [E, E, N, N]).auc == pytest.approx(0.75)

    def test_single_class_raises(self):
        with pytest.raises(SingleClass):
            roc_auc([0.1, 0.9], [E, E])

    def test_curve_shape(self):
        curve = roc_auc([0.9, 0.8, 0.8, 0.3, 0.2], [E, E, N, N, E])
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        fprs = [p[0] for p in curve.points]
        tprs = [p[1] for p in curve.points]
        assert fprs == sorted(fprs)
        assert tprs == sorted(tprs)

    def test_matches_mann_whitney_with_ties(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            n = int(rng.integers(5, 120))
            # coarse grid forces heavy ties
            scores = rng.choice([0.1, 0.3, 0.5, 0.7, 0.9], size=n)
            truth = [E if v else N for v in rng.integers(0, 2, size=n)]
            if all(t == E for t in truth) or all(t == N for t in truth):
                continue
            assert roc_auc(scores, truth).auc == pytest.approx(
                mann_whitney_auc(scores, truth), abs=1e-12
            )

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_increasing_transform_leaves_auc_unchanged(self, data):
        n = data.draw(st.integers(min_value=4, max_value=40))
        # a 0.01 grid keeps the transforms injective in float arithmetic
        scores = data.draw(
            st.lists(
                st.integers(min_value=-1000, max_value=1000).map(lambda v: v / 100.0),
                min_size=n, max_size=n,
            )
        )
        labels = data.draw(
            st.lists(st.sampled_from([E, N]), min_size=n, max_size=n).filter(
                lambda ls: E in ls and N in ls
            )
        )
        base = roc_auc(scores, labels).auc
        monotone = [3.0 * s + 1.0 for s in scores]
        exp = list(np.exp(np.asarray(scores) / 25.0))
        assert roc_auc(monotone, labels).auc == pytest.approx(base, abs=1e-12)
        assert roc_auc(exp, labels).auc == pytest.approx(base, abs=1e-12)

    def test_flips(self):
        rng = np.random.default_rng(8)
        scores = rng.random(30)
        labels = [E if v else N for v in rng.integers(0, 2, size=30)]
        base = roc_auc(scores, labels).auc
        negated = roc_auc((-scores).tolist(), labels).auc
        swapped = [N if t == E else E for t in labels]
        both = roc_auc((-scores).tolist(), swapped).auc
        assert negated == pytest.approx(1.0 - base, abs=1e-12)
        assert both == pytest.approx(base, abs=1e-12)


class TestCrossValidate:
    def test_balanced_hundred_rows_fold_sizes(self):
        rng = np.random.default_rng(5)
        x = np.ones((100, 3))
        x[:, 1:] = rng.normal(size=(100, 2))
        y = np.array([1.0, 0.0] * 50)
        matrix = DesignMatrix(x=x, y=y, feature_names=("f0", "f1"))
        from enrollcast.evaluation import fold_assignment

        folds = fold_assignment(matrix.y, 10, seed=1)
        for f in range(10):
            mask = folds == f
            assert mask.sum() == 10
            assert matrix.y[mask].sum() == 5.0

    def test_same_seed_identical_report(self):
        rng = np.random.default_rng(6)
        matrix = random_design_matrix(rng, n=60, d=3)
        a = cross_validate(matrix, 5, FitConfig(), seed=11)
        b = cross_validate(matrix, 5, FitConfig(), seed=11)
        assert a == b

    def test_too_few_per_class(self):
        x = np.ones((6, 2))
        x[:, 1] = np.arange(6.0)
        y = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        matrix = DesignMatrix(x=x, y=y, feature_names=("f0",))
        with pytest.raises(TooFewPerClass):
            cross_validate(matrix, 2, FitConfig(), seed=0)

    def test_pooled_accuracy_within_fold_range(self):
        rng = np.random.default_rng(7)
        matrix = random_design_matrix(rng, n=90, d=3)
        report = cross_validate(matrix, 6, FitConfig(), seed=3)
        accuracies = [m.accuracy for m in report.per_fold]
        assert min(accuracies) <= report.pooled.accuracy <= max(accuracies)
        assert len(report.per_fold) == 6

    def test_pooled_confusion_counts_every_row(self):
        rng = np.random.default_rng(9)
        matrix = random_design_matrix(rng, n=75, d=2)
        report = cross_validate(matrix, 5, FitConfig(), seed=2)
        assert report.pooled_confusion.total == 75

    def test_uneven_folds_partition_with_balanced_classes(self):
        from enrollcast.evaluation import fold_assignment

        y = np.zeros(53)
        y[:21] = 1.0
        folds = fold_assignment(y, 4, seed=6)
        assert np.array_equal(np.sort(np.unique(folds)), np.arange(4))
        sizes = [int((folds == f).sum()) for f in range(4)]
        assert sum(sizes) == 53
        for cls in (0.0, 1.0):
            per_fold = [int(((folds == f) & (y == cls)).sum()) for f in range(4)]
            assert max(per_fold) - min(per_fold) <= 1


class TestCvAccuracy:
    def test_full_subset_equals_cross_validate(self):
        rng = np.random.default_rng(10)
        matrix = random_design_matrix(rng, n=60, d=4)
        pooled = cross_validate(matrix, 5, FitConfig(), seed=1).pooled.accuracy
        assert cv_accuracy(matrix, range(4), 5, FitConfig(), seed=1) == pooled

    def test_deterministic_feature_scores_one(self):
        rng = np.random.default_rng(12)
        n = 80
        x = np.ones((n, 4))
        x[:, 1] = rng.normal(size=n)
        x[:, 2] = np.array([1.0, 0.0] * (n // 2))  # exactly determines y
        x[:, 3] = rng.normal(size=n)
        y = x[:, 2].copy()
        matrix = DesignMatrix(x=x, y=y, feature_names=("noise1", "signal", "noise2"))
        assert cv_accuracy(matrix, [1], 5, FitConfig(), seed=0) == 1.0
        assert cv_accuracy(matrix, [0, 1], 5, FitConfig(), seed=0) == 1.0

    def test_empty_subset_raises(self):
        rng = np.random.default_rng(13)
        matrix = random_design_matrix(rng, n=40, d=3)
        with pytest.raises(EmptySubset):
            cv_accuracy(matrix, [], 5, FitConfig(), seed=0)


class TestEvaluateModel:
    def test_report_is_consistent(self):
        rng = np.random.default_rng(14)
        matrix = random_design_matrix(rng, n=120, d=3)
        model = fit(matrix, FitConfig())
        report = evaluate_model(model, matrix)
        cm = report.confusion
        assert cm.total == 120
        assert report.positive.recall == report.positive.tp_rate
        assert report.weighted.accuracy == report.positive.accuracy
        assert 0.5 <= report.roc.auc <= 1.0
        # weighted f-measure is the support-weighted mean of both classes
        n_pos = cm.tp + cm.fn
        n_neg = cm.tn + cm.fp
        expected = (report.positive.f_measure * n_pos + report.negative.f_measure * n_neg) / 120
        assert report.weighted.f_measure == pytest.approx(expected, abs=1e-15)
