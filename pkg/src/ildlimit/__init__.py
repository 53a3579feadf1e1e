"""Model-independent performance limits for binary classification on categorical data."""

from .bucketizer import AggregatedDataset, Bucket, aggregate, classify_buckets, disaggregate
from .core import (
    ConfusionCounts,
    LimitReport,
    RocCurve,
    RocPoint,
    accuracy,
    auc,
    confusion,
    flip_effect,
    ild_curve,
    ild_curve_bubble,
    limit_report,
    max_accuracy,
    min_accuracy,
    perfection_index,
    roc_of_random_flips,
)
from .dataio import (
    FeatureSchema,
    FeatureSpec,
    ObservationTable,
    discretize,
    impute_missing,
    load_csv,
    load_schema,
)
from .errors import DataError, DegenerateClassError, SchemaError, UndefinedMetricError

__version__ = "0.1.0"
