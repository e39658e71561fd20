"""FIEGARCH(p,d,q) simulation and Bayesian estimation via Metropolis-within-Gibbs."""

from .errors import (
    DegenerateModelError,
    DomainError,
    FiegarchError,
    FilterError,
    HorizonError,
    HyperparameterError,
    InitializationError,
    SamplerStateError,
    SimulationError,
)
from .fiegarch import (
    ModelSpec,
    SimulatedSeries,
    g_function,
    log_likelihood,
    read_series_csv,
    simulate,
    volatility_filter,
    write_series_csv,
)
from .ged import GedParams, g_noise_variance, ged_abs_moment, ged_log_density, ged_sample
from .harness import RunConfig, replicate_rng, run_estimate, run_example, run_simulate, run_study
from .mcmc import (
    Chain,
    FiegarchTarget,
    KernelSlot,
    KernelSpec,
    gibbs_run,
    grid_initialize,
    metropolis_step,
    truncated_normal_log_density,
    truncated_normal_sample,
)
from .priors import (
    PriorCatalog,
    PriorSpec,
    case1_catalog,
    hyperparameters_from_truth,
    log_prior,
    phi,
    phi_inverse,
)
from .special_math import (
    CoefficientTable,
    delta_coefficients,
    lambda_coefficients,
    log_gamma,
    make_table,
    tau_coefficients,
)
from .summary import (
    PosteriorSummary,
    credibility_interval,
    density_estimate,
    quantile,
    summarize,
    summarize_draws,
)

__version__ = "0.1.0"
