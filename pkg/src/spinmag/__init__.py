"""Nonreciprocal magnon-magnon entanglement in a spinning cavity-magnon system.

Typical use::

    from spinmag import baseline_params, entanglement_of
    result, = entanglement_of(baseline_params())
    print(result.log_negativity)
"""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    C_LIGHT, HBAR, K_B, Direction, KerrCoefficient, KerrShift, ModeIndex, SagnacRotation,
    SagnacShift, SystemParams, baseline_params, mhz, rabi_frequency, sagnac_shift,
    thermal_occupation, to_mhz,
)
from .steady_state import (  # noqa: E402
    SteadyState, nonreciprocity_of_occupations, solve_steady_state_selfconsistent,
    solve_steady_state_shift_mode,
)
from .dynamics import LinearModel, diffusion_matrix, drift_matrix, is_stable, linear_model  # noqa: E402
from .entanglement import (  # noqa: E402
    CovarianceMatrix, EntanglementResult, entanglement_of, log_negativity, solve_lyapunov,
)
from .squeezing import SqueezingFrame, optimal_detunings, squeezing_frame, squeezing_parameter  # noqa: E402
from .sweep import Axis, SweepSpec, nonreciprocity_map, preset_spec, run_sweep  # noqa: E402
from .config import parse_config  # noqa: E402

__all__ = [
    "C_LIGHT", "HBAR", "K_B", "Direction", "KerrCoefficient", "KerrShift", "ModeIndex",
    "SagnacRotation", "SagnacShift", "SystemParams", "baseline_params", "mhz",
    "rabi_frequency", "sagnac_shift", "thermal_occupation", "to_mhz", "SteadyState",
    "nonreciprocity_of_occupations", "solve_steady_state_selfconsistent",
    "solve_steady_state_shift_mode", "LinearModel", "diffusion_matrix", "drift_matrix",
    "is_stable", "linear_model", "CovarianceMatrix", "EntanglementResult", "entanglement_of",
    "log_negativity", "solve_lyapunov", "SqueezingFrame", "optimal_detunings",
    "squeezing_frame", "squeezing_parameter", "Axis", "SweepSpec", "nonreciprocity_map",
    "preset_spec", "run_sweep", "parse_config",
]
