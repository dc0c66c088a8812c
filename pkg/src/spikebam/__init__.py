"""Spiking bidirectional associative memory with top-down calcium-spike modulation."""

from .config import ExperimentConfig, load_config
from .engine import RunRecord, Simulator, run, run_experiment, simulate
from .kernels import KernelParams, StdpWindowParams
from .network import NetworkParams, Topology, build, snapshot_weights
from .neuron import NeuronThresholds

__all__ = [
    "ExperimentConfig",
    "KernelParams",
    "NetworkParams",
    "NeuronThresholds",
    "RunRecord",
    "Simulator",
    "StdpWindowParams",
    "Topology",
    "build",
    "load_config",
    "run",
    "run_experiment",
    "simulate",
    "snapshot_weights",
]

__version__ = "0.1.0"
