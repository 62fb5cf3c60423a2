import json

import numpy as np
import pytest

from enrollcast import (
    Store,
    TrainOptions,
    clean,
    encode,
    generate,
    predict_proba,
    read_model_file,
    train_pipeline,
    write_model_file,
)
from enrollcast.errors import CorruptModel, NotFound, VersionUnsupported
from enrollcast.store import model_file_bytes, parse_model_file


@pytest.fixture(scope="module")
def trained():
    data, _ = generate(rows=400, features=6, informative=3, seed=21)
    cleaned = clean(data)
    stored = train_pipeline(cleaned, TrainOptions())
    return cleaned, stored


class TestModelFiles:
    def test_round_trip_is_identity(self, trained, tmp_path):
        cleaned, stored = trained
        path = write_model_file(stored, tmp_path / "model.json")
        loaded = read_model_file(path)
        assert loaded.model_id == stored.model_id
        assert loaded.logistic == stored.logistic
        assert loaded.schema == stored.schema
        assert loaded.holdout_eval == stored.holdout_eval
        assert loaded.cv_eval == stored.cv_eval
        assert loaded.options == stored.options

    def test_round_trip_predictions_bit_identical(self, trained, tmp_path):
        cleaned, stored = trained
        path = write_model_file(stored, tmp_path / "model.json")
        loaded = read_model_file(path)
        matrix = encode(cleaned)
        rng = np.random.default_rng(0)
        rows = rng.choice(matrix.n, size=100, replace=True)
        for i in rows:
            row = matrix.x[i, 1:]
            assert predict_proba(loaded.logistic, row) == predict_proba(stored.logistic, row)

    def test_tampered_weight_detected(self, trained, tmp_path):
        _, stored = trained
        raw = model_file_bytes(stored)
        body = json.loads(raw)
        weight = body["payload"]["logistic"]["weights"][0]
        # flip one hex digit of one weight
        flipped = ("0" if weight[-2] != "0" else "1")
        body["payload"]["logistic"]["weights"][0] = weight[:-2] + flipped + weight[-1]
        with pytest.raises(CorruptModel):
            parse_model_file(json.dumps(body).encode())

    def test_unknown_version_rejected(self, trained):
        _, stored = trained
        body = json.loads(model_file_bytes(stored))
        body["format_version"] = 99
        with pytest.raises(VersionUnsupported):
            parse_model_file(json.dumps(body).encode())

    def test_missing_file(self, tmp_path):
        with pytest.raises(NotFound):
            read_model_file(tmp_path / "nope.json")

    def test_same_content_same_bytes(self, trained, tmp_path):
        cleaned, stored = trained
        again = train_pipeline(cleaned, TrainOptions())
        assert model_file_bytes(stored) == model_file_bytes(again)
        assert stored.model_id == again.model_id


class TestStoreRegistry:
    def test_dataset_round_trip_and_idempotence(self, trained, tmp_path):
        cleaned, _ = trained
        store = Store(tmp_path / "store")
        first = store.save_dataset(cleaned)
        second = store.save_dataset(cleaned)
        assert first == second
        loaded = store.load_dataset(first)
        assert loaded.schema == cleaned.schema
        assert loaded.rows == cleaned.rows

    def test_model_round_trip(self, trained, tmp_path):
        _, stored = trained
        store = Store(tmp_path / "store")
        model_id = store.save_model(stored)
        assert model_id == stored.model_id
        loaded = store.load_model(model_id)
        assert loaded.logistic == stored.logistic
        assert loaded.created_at  # registry metadata, not part of the content

    def test_unknown_ids(self, tmp_path):
        store = Store(tmp_path / "store")
        with pytest.raises(NotFound):
            store.load_dataset("missing")
        with pytest.raises(NotFound):
            store.load_model("missing")

    def test_listings(self, trained, tmp_path):
        cleaned, stored = trained
        store = Store(tmp_path / "store")
        dataset_id = store.save_dataset(cleaned)
        model_id = store.save_model(stored)
        assert [d["dataset_id"] for d in store.list_datasets()] == [dataset_id]
        assert [m["model_id"] for m in store.list_models()] == [model_id]

    def test_corrupt_dataset_detected(self, trained, tmp_path):
        cleaned, _ = trained
        store = Store(tmp_path / "store")
        dataset_id = store.save_dataset(cleaned)
        path = store.datasets_dir / f"{dataset_id}.json"
        body = json.loads(path.read_bytes())
        body["payload"]["rows"][0]["id"] = "tampered"
        path.write_bytes(json.dumps(body).encode())
        with pytest.raises(CorruptModel):
            store.load_dataset(dataset_id)
