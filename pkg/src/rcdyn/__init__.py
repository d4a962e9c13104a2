"""Random tanh reservoirs, their dynamics measures, and pseudoinverse readouts."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .prng import RngStream
from .topology import Activation, Reservoir, ReservoirParams, sample_reservoir
from .reservoir import ActivationTrace, run, step
from .tasks import Dataset, TaskSpec
from .readout import ReadoutModel, StateMatrix, collect_states, evaluate, fit, fit_direct, predict
from .measures import DynamicsReport, report

__all__ = [
    "BACKEND",
    "RngStream",
    "Activation",
    "Reservoir",
    "ReservoirParams",
    "sample_reservoir",
    "ActivationTrace",
    "run",
    "step",
    "Dataset",
    "TaskSpec",
    "ReadoutModel",
    "StateMatrix",
    "collect_states",
    "evaluate",
    "fit",
    "fit_direct",
    "predict",
    "DynamicsReport",
    "report",
]
