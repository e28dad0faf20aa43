"""Green's functions of driven-dissipative bosonic chains by real-space
decimation.

The package computes steady-state resolvents G(omega) = (omega - D)^{-1}
of tridiagonal non-Hermitian dynamical matrices D (open 1-D chains with
local and nearest-neighbor loss and pump), transient amplitudes
exp(-i D t), and the derived observables: local density of states,
directional amplification exponents, spectral winding, gain, and added
noise.
"""

from __future__ import annotations

from .bessel import bessel_j_complex, bessel_j_sequence, recurrence_residual
from .decimation import (
    DecimationState,
    LambdaPair,
    decimate_step,
    eps1_closed_form,
    eps1_semi_infinite,
    gf_entry,
    gf_matrix,
    lambda_pair,
    recover_row,
    surface_gf_finite,
)
from .model import (
    ChainParams,
    DynamicalMatrix,
    EffectiveCouplings,
    build_dynamical_matrix,
    effective_couplings,
    hatano_nelson_params,
    stability_report,
)
from .observables import (
    GapClosingError,
    NoiseReport,
    PhaseDiagram,
    added_noise,
    bulk_gf_pbc,
    gain,
    hatano_noise,
    local_dos,
    noise_row_length,
    phase_diagram,
    pump_matrix,
    topo_indicator_from_xi,
    winding_number,
    winding_number_quadrature,
)
from .oracle import Trajectory, dense_gf, propagate
from .surface import (
    BulkGF,
    CorrelationData,
    SurfaceGF,
    correlation_data,
    gf_pair,
    glue_chains,
    solve_surface_gf,
    unwrap_imag,
    xi_decay_formula,
)
from .transient import (
    FinalValueReport,
    TransientParams,
    amplification_time,
    coherent_evolution,
    long_time_asymptote,
    measured_peak_spacing,
    steady_state_final_value,
    surface_gf_power_time,
)

__version__ = "0.1.0"

__all__ = [
    "ChainParams",
    "DynamicalMatrix",
    "EffectiveCouplings",
    "build_dynamical_matrix",
    "effective_couplings",
    "hatano_nelson_params",
    "stability_report",
    "Trajectory",
    "dense_gf",
    "propagate",
    "DecimationState",
    "LambdaPair",
    "decimate_step",
    "eps1_closed_form",
    "eps1_semi_infinite",
    "gf_entry",
    "gf_matrix",
    "lambda_pair",
    "recover_row",
    "surface_gf_finite",
    "SurfaceGF",
    "CorrelationData",
    "BulkGF",
    "correlation_data",
    "gf_pair",
    "glue_chains",
    "solve_surface_gf",
    "unwrap_imag",
    "xi_decay_formula",
    "bessel_j_complex",
    "bessel_j_sequence",
    "recurrence_residual",
    "TransientParams",
    "FinalValueReport",
    "amplification_time",
    "coherent_evolution",
    "long_time_asymptote",
    "measured_peak_spacing",
    "steady_state_final_value",
    "surface_gf_power_time",
    "GapClosingError",
    "NoiseReport",
    "PhaseDiagram",
    "added_noise",
    "bulk_gf_pbc",
    "gain",
    "hatano_noise",
    "local_dos",
    "noise_row_length",
    "phase_diagram",
    "pump_matrix",
    "topo_indicator_from_xi",
    "winding_number",
    "winding_number_quadrature",
    "__version__",
]
