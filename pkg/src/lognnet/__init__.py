"""LogNNet: a feedforward MNIST classifier whose input weights come from the
logistic map instead of being stored or trained."""

__version__ = "0.1.0"

from .chaos import ReservoirParams, lyapunov, materialize_w1  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .network import (Model, NetworkConfig, evaluate, load_model,  # noqa: E402
                      memory_report, save_model, train)
from .tpattern import builtin_pattern  # noqa: E402

__all__ = [
    "BACKEND", "Model", "NetworkConfig", "ReservoirParams", "builtin_pattern",
    "evaluate", "load_model", "lyapunov", "materialize_w1", "memory_report",
    "save_model", "train",
]
