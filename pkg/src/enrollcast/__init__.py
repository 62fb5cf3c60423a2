"""enrollcast: enrolment decision support.

Ridge-regularized logistic regression with wrapper feature selection,
cross-validated evaluation, a content-addressed model registry, and an HTTP
service + CLI around the whole pipeline.
"""

__version__ = "0.1.0"

from .dataset import (
    BINARY,
    DROP_ROWS,
    ENROLLED,
    IMPUTE_MODE,
    NOT_ENROLLED,
    NUMERIC,
    ApplicantRecord,
    CleanDataset,
    CleanReport,
    DesignMatrix,
    Feature,
    FeatureSchema,
    RawDataset,
    SplitSpec,
    clean,
    encode,
    join,
    load_csv,
    split,
    summarize,
    to_csv,
)
from .errors import EnrollcastError
from .evaluation import (
    ClassMetrics,
    ConfusionMatrix,
    CvReport,
    EvaluationReport,
    RocCurve,
    class_metrics,
    confusion,
    cross_validate,
    cv_accuracy,
    evaluate_model,
    f_measure,
    roc_auc,
)
from .featsel import (
    BACKWARD,
    FORWARD,
    SearchConfig,
    SubsetSearchResult,
    apply_subset,
    best_first_search,
    exhaustive_search,
)
from .logreg import (
    FitConfig,
    LogisticModel,
    fit,
    gradient,
    objective,
    predict_label,
    predict_proba,
    predict_proba_matrix,
    sigmoid,
)
from .pipeline import (
    PredictionRecord,
    evaluate_on_dataset,
    predict_batch_csv,
    predict_dataset,
    predict_record,
    train_pipeline,
)
from .store import (
    Store,
    StoredModel,
    TrainOptions,
    build_stored_model,
    dataset_content_id,
    read_model_file,
    write_model_file,
)
from .synth import SynthTruth, default_schema, generate

__all__ = [name for name in dir() if not name.startswith("_")]
