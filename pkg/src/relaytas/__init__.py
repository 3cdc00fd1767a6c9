"""Secrecy-rate simulation and learned transmit antenna selection for
jamming-aided untrusted-relay links."""

from .channel import ChannelSample, SystemConfig, db_to_linear, sample_batch, sample_channel
from .dataset import (
    Dataset,
    LabeledRecord,
    build_dataset,
    extract_features,
    label_sample,
    normalize,
    normalized_features,
    one_hot,
    read_dataset,
    write_dataset,
)
from .errors import (
    ConfigError,
    DataFormatError,
    ModelFormatError,
    ToolkitError,
    TrainingDivergedError,
)
from .evaluate import (
    EvalReport,
    evaluate_scheme,
    misclassification_web,
    scheme_rate,
    snr_sweep,
    sop_estimate,
)
from .knn import KnnModel, knn_fit, knn_predict, knn_predict_batch
from .mlp import MlpModel, TrainConfig, init_model, load_model, predict, save_model, train
from .secrecy import (
    ComboTable,
    SecrecyBreakdown,
    beta_sq,
    closed_form_check,
    combo_rates,
    enumerate_combos,
    gamma_d,
    gamma_r,
    oracle_select,
    secrecy_rate,
)

__version__ = "0.1.0"
