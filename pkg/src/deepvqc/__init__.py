"""Deep variational quantum classifier on a dense statevector simulator."""

__version__ = "0.1.0"

from .ansatz import AnsatzConfig, CircuitSpec, build_circuit, param_count
from .autodiff import forward, grad_adjoint, grad_finite_diff, grad_parameter_shift
from .classifier import ModelConfig, TrainHistory, predict, predict_proba, train
from .data_io import Dataset, load_csv, stratified_kfold, stratified_split
from .preprocess import PreprocessConfig, fit_pca, fit_preprocess, fit_scaler
from .statevector import GateKind, GateOp, StateVector, amplitude_encode, apply_gate, expectation_z, init_zero_state

__all__ = [
    "AnsatzConfig",
    "CircuitSpec",
    "Dataset",
    "GateKind",
    "GateOp",
    "ModelConfig",
    "PreprocessConfig",
    "StateVector",
    "TrainHistory",
    "amplitude_encode",
    "apply_gate",
    "build_circuit",
    "expectation_z",
    "fit_pca",
    "fit_preprocess",
    "fit_scaler",
    "forward",
    "grad_adjoint",
    "grad_finite_diff",
    "grad_parameter_shift",
    "init_zero_state",
    "load_csv",
    "param_count",
    "predict",
    "predict_proba",
    "stratified_kfold",
    "stratified_split",
    "train",
]
