"""Generalized error distribution GED(nu), standardized to mean 0, variance 1.

Density (Nelson, 1991):

    p(z | nu) = nu * exp(-0.5 |z / lambda_nu|^nu)
                / (lambda_nu * 2^(1 + 1/nu) * Gamma(1/nu)),

    lambda_nu = [2^(-2/nu) * Gamma(1/nu) / Gamma(3/nu)]^(1/2).

nu = 2 is the standard normal; nu < 2 has heavier tails, nu > 2 lighter.
Moments of the process it drives are only guaranteed finite for nu > 1;
smaller nu is accepted for simulation but moment-based diagnostics then
have no finite-moment guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModelError, DomainError

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class GedParams:
    """Tail-thickness parameter and the derived scale lambda_nu.

    All derived quantities are kept in log space so that extreme nu values
    (as proposed by a sampler exploring toward 0) degrade to -inf densities
    instead of overflowing.
    """

    nu: float
    log_lambda_nu: float = field(init=False)
    lambda_nu: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.nu > 0.0) or not math.isfinite(self.nu):
            raise DomainError(f"GED tail parameter must be positive, got {self.nu}")
        log_lam = 0.5 * (
            -2.0 / self.nu * _LOG2 + math.lgamma(1.0 / self.nu) - math.lgamma(3.0 / self.nu)
        )
        object.__setattr__(self, "log_lambda_nu", log_lam)
        object.__setattr__(self, "lambda_nu", math.exp(log_lam) if log_lam > -745.0 else 0.0)

    @property
    def log_norm(self) -> float:
        """log of the density normalization: ln nu - ln lambda_nu - (1 + 1/nu) ln 2 - ln Gamma(1/nu)."""
        nu = self.nu
        return (
            math.log(nu)
            - self.log_lambda_nu
            - (1.0 + 1.0 / nu) * _LOG2
            - math.lgamma(1.0 / nu)
        )


def ged_log_density(z, params: GedParams):
    """Log density ln p(z | nu); vectorizes over ``z``.

    |z / lambda_nu|^nu is evaluated as exp(nu (ln|z| - ln lambda_nu)), which
    stays finite wherever the result is representable and saturates to -inf
    (zero density) instead of overflowing for extreme nu.
    """
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        power = np.exp(params.nu * (np.log(np.abs(z)) - params.log_lambda_nu))
        out = params.log_norm - 0.5 * np.where(z == 0.0, 0.0, power)
    return float(out) if out.ndim == 0 else out


def ged_sample(params: GedParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. standardized GED variates.

    Uses the exact gamma transform: |Z|^nu / (2 lambda_nu^nu) ~ Gamma(1/nu, 1),
    so Z = S * lambda_nu * (2 G)^(1/nu) with an independent random sign S.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    g = rng.standard_gamma(1.0 / params.nu, size=n)
    sign = rng.integers(0, 2, size=n) * 2.0 - 1.0
    return sign * params.lambda_nu * (2.0 * g) ** (1.0 / params.nu)


def ged_abs_moment(params: GedParams) -> float:
    """E|Z| = lambda_nu * 2^(1/nu) * Gamma(2/nu) / Gamma(1/nu).

    Combined in a single exponential: the factors overflow separately for
    nu near 0 although E|Z| itself always lies in (0, 1].
    """
    nu = params.nu
    return math.exp(
        params.log_lambda_nu + _LOG2 / nu + math.lgamma(2.0 / nu) - math.lgamma(1.0 / nu)
    )


def g_noise_variance(theta: float, gamma_: float, params: GedParams) -> float:
    """Variance of the news-impact noise g(Z) = theta Z + gamma (|Z| - E|Z|).

    Equals theta^2 + gamma^2 - (gamma E|Z|)^2; the cross term vanishes
    because E(Z |Z|) = 0 for the symmetric GED.
    """
    if theta == 0.0 and gamma_ == 0.0:
        raise DegenerateModelError("theta and gamma must not both be zero")
    e_abs = ged_abs_moment(params)
    return theta * theta + gamma_ * gamma_ - (gamma_ * e_abs) ** 2
