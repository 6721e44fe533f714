"""Finite-volume IMEX solver for a multiscale cancer-invasion model with delay."""
from .experiments import (ExperimentConfig, FrontMetrics, RunResult, front_metrics,
                          gamma_pdf, init_experiment0, init_experiment1, radial_cut,
                          run_simulation)
from .grid import GridSpec, cell_center, neighbor
from .imex import SolverOptions, step
from .model import (EXPERIMENT0_PARAMS, EXPERIMENT1_PARAMS, ModelParams, StateField,
                    reaction_expl, reaction_impl)
from .studies import compare_runs, eoc_study, sweep_tau

__all__ = [
    "ExperimentConfig", "FrontMetrics", "RunResult", "front_metrics", "gamma_pdf",
    "init_experiment0", "init_experiment1", "radial_cut", "run_simulation",
    "GridSpec", "cell_center", "neighbor", "SolverOptions", "step",
    "EXPERIMENT0_PARAMS", "EXPERIMENT1_PARAMS", "ModelParams", "StateField",
    "reaction_expl", "reaction_impl", "compare_runs", "eoc_study", "sweep_tau",
]
