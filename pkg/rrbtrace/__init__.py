"""Resource-block side-channel toolkit: cell simulation, DCI sniffing, trace features and ensemble classifiers."""

__version__ = "0.1.0"

from .errors import RrbError, ConfigurationError, LogIntegrityError, NotFoundError, EmptyDataError
from .radio import CellConfig, DciGrant, Direction, RbgBitmap, UeIdentity, grant_bytes, rb_count
from .profiles import PROFILE_CATALOGUE, AppProfile, arrival_series, generate_arrivals
from .simulator import SimConfig, UeSpec, DciLog, GroundTruth, run_simulation
from .sniffer import VictimTrace, identify_victims, reconstruct_throughput
from .pipeline import PipelineConfig, ThroughputSeries, FeatureVector, extract_features, iqr_cap, rolling_normalize
from .dataset import Dataset, train_test_split
from .forest import EnsembleConfig, ForestModel, Variant, fit, predict
from .evaluation import MetricsReport, evaluate

__all__ = [
    "RrbError", "ConfigurationError", "LogIntegrityError", "NotFoundError", "EmptyDataError",
    "CellConfig", "DciGrant", "Direction", "RbgBitmap", "UeIdentity", "grant_bytes", "rb_count",
    "PROFILE_CATALOGUE", "AppProfile", "arrival_series", "generate_arrivals",
    "SimConfig", "UeSpec", "DciLog", "GroundTruth", "run_simulation",
    "VictimTrace", "identify_victims", "reconstruct_throughput",
    "PipelineConfig", "ThroughputSeries", "FeatureVector", "extract_features", "iqr_cap", "rolling_normalize",
    "Dataset", "train_test_split",
    "EnsembleConfig", "ForestModel", "Variant", "fit", "predict",
    "MetricsReport", "evaluate",
]
