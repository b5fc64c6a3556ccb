"""Euclidean-semigroup scattering toolkit.

Exact separable-potential scattering solutions, a radial spectral
discretization exposing e^{-beta H}, Chebyshev approximation of
oscillatory operator functions, an invariance-principle S-matrix
pipeline driven purely by semigroup applications, and numerical checks
of a Gaussian generating functional (reflection positivity, contraction,
relativistic dispersion without analytic continuation).
"""

from .chebyshev import (
    ChebyshevExpansion,
    ErrorReport,
    apply_to_semigroup,
    converged_expansion,
    evaluate_scalar,
    expansion_coefficients,
    uniform_error_report,
)
from .config import RunConfig, resolve_config
from .errors import AccuracyError, ConfigError, DomainError, PreconditionError
from .euclidean_gf import (
    ClusterReport,
    CovarianceKernel,
    DispersionRow,
    EuclideanTestFunction,
    FDResult,
    WaveFunctional,
    cluster_check,
    cluster_probe_pair,
    covariance,
    dispersion_scan,
    euclidean_gram,
    euclidean_inner,
    gf_value,
    hamiltonian_element,
    mass_squared_element,
    momentum_element,
    one_particle_hamiltonian,
    one_particle_inner,
    one_particle_mass_squared,
    one_particle_momentum,
    physical_gram,
    physical_inner,
    random_test_functions,
    standard_test_function,
    time_translate,
)
from .kato_birman import (
    KBConfig,
    SMatrixEstimate,
    SweepRow,
    WavePacket,
    beta_for,
    delta_e_overlap,
    exact_s_in_packets,
    extract_sharp_t,
    kb_s_overlap,
    make_packet,
    packet_grid_spec,
    packet_overlap,
    sweep_n,
    time_limit_s_overlap,
)
from .model import (
    DEFAULT_BINDING,
    DEFAULT_MASS,
    DEFAULT_MPI,
    OnShellAmplitude,
    SeparableModel,
    bound_state_energy,
    coupling_for_binding,
    critical_coupling,
    default_model,
    exact_s_on_shell,
    exact_t_on_shell,
    form_factor,
    on_shell_amplitude,
    resolvent_form_factor_element,
)
from .spectral import (
    GridSpec,
    RadialGrid,
    Semigroup,
    SpectralOperator,
    build_grid,
    diagonalize,
    discretize_h,
    semigroup_apply,
    semigroup_bounds,
)

__all__ = [
    "AccuracyError",
    "ConfigError",
    "DomainError",
    "PreconditionError",
    "DEFAULT_BINDING",
    "DEFAULT_MASS",
    "DEFAULT_MPI",
    "SeparableModel",
    "OnShellAmplitude",
    "default_model",
    "coupling_for_binding",
    "critical_coupling",
    "bound_state_energy",
    "form_factor",
    "resolvent_form_factor_element",
    "exact_t_on_shell",
    "exact_s_on_shell",
    "on_shell_amplitude",
    "GridSpec",
    "RadialGrid",
    "SpectralOperator",
    "Semigroup",
    "build_grid",
    "discretize_h",
    "diagonalize",
    "semigroup_apply",
    "semigroup_bounds",
    "ChebyshevExpansion",
    "ErrorReport",
    "expansion_coefficients",
    "converged_expansion",
    "evaluate_scalar",
    "apply_to_semigroup",
    "uniform_error_report",
    "WavePacket",
    "KBConfig",
    "SMatrixEstimate",
    "SweepRow",
    "beta_for",
    "packet_grid_spec",
    "make_packet",
    "packet_overlap",
    "kb_s_overlap",
    "exact_s_in_packets",
    "time_limit_s_overlap",
    "delta_e_overlap",
    "sweep_n",
    "extract_sharp_t",
    "EuclideanTestFunction",
    "WaveFunctional",
    "CovarianceKernel",
    "FDResult",
    "ClusterReport",
    "DispersionRow",
    "covariance",
    "gf_value",
    "euclidean_inner",
    "physical_inner",
    "one_particle_inner",
    "time_translate",
    "hamiltonian_element",
    "momentum_element",
    "mass_squared_element",
    "one_particle_hamiltonian",
    "one_particle_momentum",
    "one_particle_mass_squared",
    "cluster_check",
    "dispersion_scan",
    "standard_test_function",
    "random_test_functions",
    "cluster_probe_pair",
    "physical_gram",
    "euclidean_gram",
    "RunConfig",
    "resolve_config",
]

__version__ = "0.1.0"
