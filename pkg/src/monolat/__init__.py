"""Deep lattice networks: models guaranteed monotone in chosen inputs."""

from .baselines import MinMaxNet, MonotonicDNN, minmax_forward, mono_dnn_forward
from .calibrator import Calibrator, calibrate, calibrate_grads, to_relu_form
from .data import DatasetSchema, ingest_csv, load_schema, split_train_validation
from .estimators import (
    DLNClassifier,
    DLNRegressor,
    MinMaxNetClassifier,
    MinMaxNetRegressor,
    MonotonicDNNClassifier,
    MonotonicDNNRegressor,
)
from .lattice import (
    Lattice,
    monotonicity_edges,
    multilinear_eval,
    multilinear_grads,
    multilinear_weights,
    simplex_eval,
)
from .network import Network, NetworkSpec, build, check_monotonicity, collapse_cascade, parse_arch
from .projection import clip_nonnegative, exact_project_qp, lattice_project_admm, pav_project
from .serialization import load_model, save_model
from .trainer import TrainConfig, adam_step, evaluate, initialize, loss_and_grad, train

__version__ = "0.1.0"
