from lagoontwin.learners.backtest import (
    REFIT_ONCE,
    REFIT_PER_FOLD,
    BacktestReport,
    backtest,
    select_champion,
)
from lagoontwin.learners.forecaster import (
    DirectForecaster,
    GlobalForecaster,
    fit_global,
    matrix_model_factory,
)
from lagoontwin.learners.gbrt import GbrtModel, HyperParams, fit_gbrt
from lagoontwin.learners.linear import LinearModel, NaivePersistence, fit_linear
from lagoontwin.learners.model_io import load_model, dump_model, read_model, save_model
from lagoontwin.learners.search import SearchSpace, Trial, search
from lagoontwin.learners.tree import RegressionTree, TreeNode, fit_tree

__all__ = [
    "BacktestReport",
    "DirectForecaster",
    "GbrtModel",
    "GlobalForecaster",
    "HyperParams",
    "LinearModel",
    "NaivePersistence",
    "REFIT_ONCE",
    "REFIT_PER_FOLD",
    "RegressionTree",
    "SearchSpace",
    "TreeNode",
    "Trial",
    "backtest",
    "dump_model",
    "fit_gbrt",
    "fit_global",
    "fit_linear",
    "fit_tree",
    "load_model",
    "matrix_model_factory",
    "read_model",
    "save_model",
    "search",
    "select_champion",
]
