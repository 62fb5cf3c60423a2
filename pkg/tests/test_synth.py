import numpy as np
import pytest

from enrollcast import clean, encode, generate
from enrollcast.synth import default_schema, schema_for_csv_header


class TestDefaultSchema:
    def test_nineteen_features_by_default(self):
        schema = default_schema()
        assert len(schema.features) == 19
        assert schema.target_name == "Enrolled"
        assert schema.positive_label == "Yes"
        names = schema.feature_names
        for expected in ("OL_Pursued", "Within_City", "School_Type", "Gender"):
            assert expected in names

    def test_numeric_features_are_the_two_counts(self):
        schema = default_schema()
        numerics = [f.name for f in schema.features if f.kind == "numeric"]
        assert numerics == ["Total_Siblings", "Ordinal_Position"]

    def test_extra_features_beyond_the_named_pool(self):
        schema = default_schema(21)
        assert schema.feature_names[-1] == "Extra_21"

    def test_header_restriction(self):
        schema = schema_for_csv_header(["id", "Within_City", "School_Type", "Enrolled"])
        assert schema.feature_names == ("Within_City", "School_Type")


class TestGenerate:
    def test_deterministic(self):
        a, truth_a = generate(rows=50, features=7, informative=3, seed=12)
        b, truth_b = generate(rows=50, features=7, informative=3, seed=12)
        assert [rec.values for rec in a.rows] == [rec.values for rec in b.rows]
        assert truth_a == truth_b

    def test_planted_count_and_weights(self):
        _, truth = generate(rows=30, features=19, informative=11, seed=4)
        assert len(truth.informative) == 11
        nonzero = [i for i, w in enumerate(truth.weights) if w != 0.0]
        assert tuple(nonzero) == truth.informative

    def test_outcomes_roughly_balanced(self):
        data, _ = generate(rows=4000, features=10, informative=5, seed=8)
        positives = sum(1 for rec in data.rows if rec.outcome == "enrolled")
        assert 0.3 < positives / 4000 < 0.7

    def test_missing_rate_injects_missing_cells(self):
        data, _ = generate(rows=200, features=6, informative=3, seed=2, missing_rate=0.1)
        missing = sum(
            1 for rec in data.rows for v in rec.values.values() if v is None
        )
        assert 0.05 < missing / (200 * 6) < 0.15

    def test_bayes_probabilities_align_with_encoded_matrix(self):
        data, truth = generate(rows=300, features=8, informative=4, seed=6)
        matrix = encode(clean(data))
        probs = truth.bayes_probabilities(matrix)
        assert probs.shape == (matrix.n,)
        assert np.all((probs > 0) & (probs < 1))
        # the planted signal must actually separate classes better than chance
        auc_proxy = np.mean(probs[matrix.y == 1.0]) - np.mean(probs[matrix.y == 0.0])
        assert auc_proxy > 0.05
