"""Pseudospectral laboratory for Schrodinger equations with modified dispersion.

The evolution core integrates i*eps*du/dt + P(D)u = lambda*|u|^(2*sigma)*u
on periodic boxes for a catalog of real multipliers P (homogeneous or
bounded), and the experiment drivers measure norm inflation for
concentrated data, the accuracy of the phase-ODE approximation on
logarithmic windows, the growth exponent of free-flow space-time norms,
and the loss of critical regularity from log-singular data.
"""

from .evolution import (
    EvolutionError,
    dealias_mask,
    PicardDivergenceError,
    PicardReport,
    SolveConfig,
    Trajectory,
    evolve,
    nonlinear_phase_step,
    picard_solve,
    sigma_is_admissible,
    strang_step,
)
from .experiments import (
    ExperimentError,
    check_admissible_pair,
    ode_phase_profile,
    run_norm_inflation,
    run_ode_approx,
    run_strichartz_probe,
    strichartz_probe_data,
    window_symbol,
)
from .reports import ExperimentReport, write_report
from .scaling import H_MAX, ScalingError, ScalingPlan, build_concentrated_data, compute_scaling
from .singular import (
    SingularProbeError,
    log_singular_profile,
    run_singular_probe,
    singular_alpha,
)
from .spectral import (
    Field,
    Grid,
    SpectralError,
    SpectralField,
    field_from_function,
    free_propagate,
    inverse_transform,
    lebesgue_norm,
    make_grid,
    sobolev_norm,
    spacetime_norm,
    spacetime_norm_from_samples,
    spatial_tail_mass,
    spectral_tail_mass,
    transform,
)
from .symbols import (
    BOUNDED,
    CATALOG_KEYS,
    HOMOGENEOUS,
    Symbol,
    SymbolError,
    make_symbol,
    parse_symbol_spec,
    verify_homogeneity,
)

__version__ = "0.1.0"
