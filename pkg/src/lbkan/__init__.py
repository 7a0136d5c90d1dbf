"""Lyapunov-based KAN adaptive controller, MLP baseline, and simulator."""

from .control import ControllerConfig, control_input, project, update_direction
from .dnn import MlpApproximator, MlpParams, mlp_forward, mlp_jacobian, mlp_param_count
from .kan import (
    KanApproximator,
    KanEval,
    KanParams,
    KanShape,
    default_shape,
    forward,
    jacobian,
    param_count,
    silu,
)
from .plant import PlantSpec, Trajectory, default_drift, desired, sample_initial_state, sample_trajectory
from .sim import RunLog, SimConfig, SimulationDiverged, run, run_batch, step
from .spline import SplineGrid, eval_basis, eval_basis_and_deriv, eval_basis_deriv, make_grid

__all__ = [
    "ControllerConfig",
    "control_input",
    "project",
    "update_direction",
    "MlpApproximator",
    "MlpParams",
    "mlp_forward",
    "mlp_jacobian",
    "mlp_param_count",
    "KanApproximator",
    "KanEval",
    "KanParams",
    "KanShape",
    "default_shape",
    "forward",
    "jacobian",
    "param_count",
    "silu",
    "PlantSpec",
    "Trajectory",
    "default_drift",
    "desired",
    "sample_initial_state",
    "sample_trajectory",
    "RunLog",
    "SimConfig",
    "SimulationDiverged",
    "run",
    "run_batch",
    "step",
    "SplineGrid",
    "eval_basis",
    "eval_basis_and_deriv",
    "eval_basis_deriv",
    "make_grid",
]
