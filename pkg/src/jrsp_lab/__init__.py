"""Joint remote preparation of two-qubit states over a noisy GHZ-based channel."""

__version__ = "0.1.0"

from .analytic import (
    ALL_PAIRS,
    CLASSICAL_LIMIT,
    NoisePair,
    OptimalParams,
    general_fidelity_B_row,
    optimal_fidelity,
    optimal_params,
)
from .averaging import (
    FidelitySurface,
    McSpec,
    QuadratureSpec,
    averaged_fidelity_mc,
    averaged_fidelity_quadrature,
    fidelity_surface,
)
from .noise import KrausSet, NoiseKind, NoiseScenario, kraus_set, noisy_channel_state
from .optimize import SweepGrid, fig5_curves, numeric_optimize, sweep
from .protocol import BranchResult, ControlParams, TargetState, build_channel, run_protocol

__all__ = [
    "ALL_PAIRS",
    "BranchResult",
    "CLASSICAL_LIMIT",
    "ControlParams",
    "FidelitySurface",
    "KrausSet",
    "McSpec",
    "NoiseKind",
    "NoisePair",
    "NoiseScenario",
    "OptimalParams",
    "QuadratureSpec",
    "SweepGrid",
    "TargetState",
    "averaged_fidelity_mc",
    "averaged_fidelity_quadrature",
    "build_channel",
    "fidelity_surface",
    "fig5_curves",
    "general_fidelity_B_row",
    "kraus_set",
    "noisy_channel_state",
    "numeric_optimize",
    "optimal_fidelity",
    "optimal_params",
    "run_protocol",
    "sweep",
    "__version__",
]
