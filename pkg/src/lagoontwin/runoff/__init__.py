from lagoontwin.runoff.dataset import (
    EXOGENOUS_VARIABLES,
    RunoffDataset,
    build_dataset,
    feature_name,
    variable_of,
)
from lagoontwin.runoff.lstm import (
    LstmNetwork,
    clamp_nonnegative,
    lstm_backward,
    lstm_forward,
    parameter_count,
)
from lagoontwin.runoff.scenario import (
    RunoffModel,
    ScenarioResult,
    ScenarioSpec,
    perturb_window,
    run_scenario,
)
from lagoontwin.runoff.train import TrainConfig, TrainResult, train
from lagoontwin.runoff.weights_io import (
    dump_weights,
    load_weights,
    read_weights,
    save_weights,
)

__all__ = [
    "EXOGENOUS_VARIABLES",
    "LstmNetwork",
    "RunoffDataset",
    "RunoffModel",
    "ScenarioResult",
    "ScenarioSpec",
    "TrainConfig",
    "TrainResult",
    "build_dataset",
    "clamp_nonnegative",
    "dump_weights",
    "feature_name",
    "load_weights",
    "lstm_backward",
    "lstm_forward",
    "parameter_count",
    "perturb_window",
    "read_weights",
    "run_scenario",
    "save_weights",
    "train",
    "variable_of",
]
