"""Coefficient sequences of the fractional volatility filter.

The log-volatility of a FIEGARCH(p,d,q) process is a moving average of past
news-impact shocks with weights lambda_{d,k}, the Maclaurin coefficients of

    lambda(z) = alpha(z) / beta(z) * (1 - z)^(-d),

where alpha and beta are polynomials with alpha_0 = beta_0 = -1 (Bollerslev &
Mikkelsen, 1996).  This module evaluates the binomial-series coefficients
tau_{d,k} of (1 - z)^(-d), their inverse-filter counterparts delta_{d,k} =
tau_{-d,k}, and the full lambda_{d,k} recursion, all in a numerically stable
way up to horizons of a few hundred thousand lags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, HorizonError

# Horizons beyond this are almost certainly a unit mix-up (the simulation
# study needs 50,000); refuse rather than allocate tens of GB.
DEFAULT_MAX_HORIZON = 5_000_000


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Raises
    ------
    DomainError
        If ``x <= 0`` (the reflection branch is never needed here).
    """
    if x <= 0.0:
        raise DomainError(f"log_gamma requires a positive argument, got {x}")
    return float(special.gammaln(x))


def _check_horizon(m: int, max_horizon: int) -> None:
    if m < 0:
        raise HorizonError(f"horizon must be non-negative, got {m}")
    if m > max_horizon:
        raise HorizonError(f"horizon {m} exceeds configured maximum {max_horizon}")


def tau_coefficients(d: float, m: int, *, max_horizon: int = DEFAULT_MAX_HORIZON) -> np.ndarray:
    """Coefficients tau_{d,k} of (1 - z)^(-d) for k = 0..m.

    Uses the multiplicative recursion

        tau_{d,0} = 1,   tau_{d,k} = tau_{d,k-1} * (k - 1 + d) / k,

    which is O(m), exact in the limit d -> 0 (identity filter) and free of
    the gamma-ratio overflow that Gamma(k + d) would hit near k = 50,000.
    """
    _check_horizon(m, max_horizon)
    out = np.empty(m + 1)
    out[0] = 1.0
    if m >= 1:
        k = np.arange(1.0, m + 1.0)
        out[1:] = np.cumprod((k - 1.0 + d) / k)
    return out


def delta_coefficients(d: float, m: int, *, max_horizon: int = DEFAULT_MAX_HORIZON) -> np.ndarray:
    """Coefficients delta_{d,k} = tau_{-d,k} of (1 - z)^(+d) for k = 0..m."""
    return tau_coefficients(-d, m, max_horizon=max_horizon)


def lambda_coefficients(
    d: float,
    m: int,
    alpha: tuple[float, ...] = (),
    beta: tuple[float, ...] = (),
    *,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> np.ndarray:
    """Coefficients lambda_{d,k} of alpha(z)/beta(z) * (1-z)^(-d) for k = 0..m.

    ``alpha`` and ``beta`` hold the free polynomial coefficients
    (alpha_1..alpha_p, beta_1..beta_q); the leading coefficients are pinned
    at alpha_0 = beta_0 = -1.  The caller is responsible for beta(z) having
    no roots on the closed unit disk and for alpha, beta sharing no common
    roots; neither is verified here.

    Implements the recursion

        lambda_{d,0} = 1,
        lambda_{d,k} = -alpha*_k
                       + sum_{i=0}^{k-1} lambda_{d,i}
                         sum_{j=0}^{k-i} beta*_j delta_{d,k-i-j},

    with alpha*, beta* zero-extended beyond their polynomial orders.  The
    inner sum is a fixed convolution c = beta* (*) delta precomputed once,
    so the whole table costs one length-k dot product per coefficient.
    """
    _check_horizon(m, max_horizon)
    alpha_star = np.zeros(m + 1)
    alpha_star[0] = -1.0
    p = len(alpha)
    if p > 0:
        alpha_star[1 : min(p, m) + 1] = alpha[: min(p, m)]

    delta = delta_coefficients(d, m, max_horizon=max_horizon)
    # c[u] = sum_j beta*_j delta_{d,u-j}, with beta*_0 = -1
    c = -delta.copy()
    for j, beta_j in enumerate(beta, start=1):
        if j > m:
            break
        c[j:] += beta_j * delta[: m + 1 - j]

    lam = np.empty(m + 1)
    lam[0] = 1.0
    if m == 0:
        return lam
    c_rev = c[::-1].copy()  # c_rev[i] = c[m - i]
    for k in range(1, m + 1):
        # pairs lambda_{d,i} with c[k-i] for i = 0..k-1
        lam[k] = -alpha_star[k] + np.dot(lam[:k], c_rev[m - k : m])
    return lam


@dataclass(frozen=True)
class CoefficientTable:
    """Immutable lambda_{d,k} table for one parameterization.

    ``alpha`` and ``beta`` store the full polynomial coefficient vectors
    (length p+1 and q+1) with the leading entries fixed at -1.
    """

    d: float
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    m: int
    lam: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.alpha[0] != -1.0 or self.beta[0] != -1.0:
            raise ValueError("leading polynomial coefficients must be -1")
        if self.lam.shape != (self.m + 1,):
            raise ValueError("lambda array length must equal horizon + 1")
        self.lam.setflags(write=False)

    @property
    def p(self) -> int:
        return len(self.alpha) - 1

    @property
    def q(self) -> int:
        return len(self.beta) - 1


def make_table(
    d: float,
    m: int,
    alpha: tuple[float, ...] = (),
    beta: tuple[float, ...] = (),
    *,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> CoefficientTable:
    """Build the immutable coefficient table used by simulation and filtering."""
    alpha = tuple(float(a) for a in alpha)
    beta = tuple(float(b) for b in beta)
    lam = lambda_coefficients(d, m, alpha, beta, max_horizon=max_horizon)
    return CoefficientTable(d=d, alpha=(-1.0,) + alpha, beta=(-1.0,) + beta, m=m, lam=lam)
