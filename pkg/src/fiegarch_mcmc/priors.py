"""Prior catalog for the five-parameter FIEGARCH(0,d,0) posterior.

The built-in scenarios sweep from fully uninformative (case C1: improper
prior for nu, uniforms elsewhere) to strongly informative Beta priors whose
means are pinned to known parameter values:

    C1           improper nu, d ~ U(0,0.5), theta ~ U(-1,0), gamma ~ U(0,1),
                 omega ~ U(-15,15)
    C2.1/2.2/2.3 Gaussian prior on x = phi^{-1}(d) with phi(x) = e^x/(2(1+e^x))
    C3.1/3.2/3.3 additionally -theta ~ Beta(a1, b1)
    C4.1/4.2     additionally gamma ~ Beta(a2, b2)
    C5.1/5.2     Beta priors for 2d, -theta and gamma (no phi transform)

Truth-pinned scenarios use the Beta mean identity E(X) = a / (a + b), e.g.
b1 = a1 (1 + theta0) / (-theta0).  The ".3"/".2" two-step variants are the
same constructions with a first-stage estimate standing in for the truth.

The improper prior for nu contributes log 1 = 0 to the posterior; propriety
of the resulting posterior is assumed, not verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, HyperparameterError

_CASES = ("C1", "C2.1", "C2.2", "C2.3", "C3.1", "C3.2", "C3.3", "C4.1", "C4.2", "C5.1", "C5.2")

_LOG_2PI = math.log(2.0 * math.pi)

PARAM_NAMES = ("nu", "d", "theta", "gamma", "omega")


def phi(x: float) -> float:
    """Map x in R to d in (0, 0.5): phi(x) = e^x / (2 (1 + e^x))."""
    if x >= 0.0:
        return 0.5 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return 0.5 * ex / (1.0 + ex)


def phi_inverse(d: float) -> float:
    """Inverse of ``phi``: x = ln(2d / (1 - 2d)) for d strictly inside (0, 0.5)."""
    if not 0.0 < d < 0.5:
        raise DomainError(f"phi_inverse requires d in (0, 0.5), got {d}")
    return math.log(2.0 * d / (1.0 - 2.0 * d))


def _beta_logpdf(x: float, a: float, b: float) -> float:
    if x <= 0.0 or x >= 1.0:
        # endpoint density is 0 for shapes > 1; treat flat/unbounded shapes
        # as out of support too so chains never sit exactly on a boundary
        return -math.inf
    return (
        (a - 1.0) * math.log(x)
        + (b - 1.0) * math.log1p(-x)
        + math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
    )


@dataclass(frozen=True)
class PriorSpec:
    """One marginal prior: a kind tag plus its hyperparameters.

    Kinds and hyperparameters:
      - "improper-positive": ()                flat on (0, inf)
      - "uniform":           (a, b)            U(a, b)
      - "gaussian-on-phi":   (mu, sigma)       x = phi^{-1}(d) ~ N(mu, sigma^2)
      - "beta-neg-theta":    (a, b)            -theta ~ Beta(a, b)
      - "beta-gamma":        (a, b)            gamma ~ Beta(a, b)
      - "beta-2d":           (a, b)            2d ~ Beta(a, b)
    """

    kind: str
    hyper: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        k, h = self.kind, self.hyper
        if k == "improper-positive":
            if h:
                raise ValueError("improper-positive takes no hyperparameters")
        elif k == "uniform":
            if len(h) != 2 or not h[0] < h[1]:
                raise ValueError(f"uniform requires (a, b) with a < b, got {h}")
        elif k == "gaussian-on-phi":
            if len(h) != 2 or not h[1] > 0.0:
                raise ValueError(f"gaussian-on-phi requires (mu, sigma) with sigma > 0, got {h}")
        elif k in ("beta-neg-theta", "beta-gamma", "beta-2d"):
            if len(h) != 2 or not (h[0] > 0.0 and h[1] > 0.0):
                raise ValueError(f"{k} requires positive shape parameters, got {h}")
        else:
            raise ValueError(f"unknown prior kind {k!r}")

    @property
    def support(self) -> tuple[float, float]:
        return {
            "improper-positive": (0.0, math.inf),
            "uniform": self.hyper if self.kind == "uniform" else None,
            "gaussian-on-phi": (0.0, 0.5),
            "beta-neg-theta": (-1.0, 0.0),
            "beta-gamma": (0.0, 1.0),
            "beta-2d": (0.0, 0.5),
        }[self.kind]


def log_prior(spec: PriorSpec, value: float) -> float:
    """Log prior density at ``value``; -inf outside the support.

    Proper priors are normalized on their own scale.  For "gaussian-on-phi"
    the returned value is the Gaussian log density at x = phi^{-1}(d), i.e.
    a density on the x scale; samplers that move d through its phi
    transform need no extra Jacobian.  "beta-2d" includes the factor-2
    Jacobian of d -> 2d, so it is a proper density in d.
    """
    k, h = spec.kind, spec.hyper
    if k == "improper-positive":
        return 0.0 if value > 0.0 else -math.inf
    if k == "uniform":
        a, b = h
        return -math.log(b - a) if a <= value <= b else -math.inf
    if k == "gaussian-on-phi":
        mu, sigma = h
        if not 0.0 < value < 0.5:
            return -math.inf
        x = phi_inverse(value)
        return -0.5 * ((x - mu) / sigma) ** 2 - math.log(sigma) - 0.5 * _LOG_2PI
    if k == "beta-neg-theta":
        return _beta_logpdf(-value, *h)
    if k == "beta-gamma":
        return _beta_logpdf(value, *h)
    # beta-2d
    return math.log(2.0) + _beta_logpdf(2.0 * value, *h)


@dataclass(frozen=True)
class PriorCatalog:
    """One PriorSpec per parameter of eta = (nu, d, theta, gamma, omega)."""

    case: str
    specs: tuple[PriorSpec, ...]

    def __post_init__(self) -> None:
        if len(self.specs) != len(PARAM_NAMES):
            raise ValueError(f"catalog needs {len(PARAM_NAMES)} marginals, got {len(self.specs)}")

    @property
    def d_on_phi_scale(self) -> bool:
        """True when the chain should carry x = phi^{-1}(d) instead of d."""
        return self.specs[1].kind == "gaussian-on-phi"

    def log_prior_vector(self, eta) -> float:
        """Joint log prior (the product of the marginals) at a natural-scale eta."""
        total = 0.0
        for spec, value in zip(self.specs, eta):
            lp = log_prior(spec, float(value))
            if lp == -math.inf:
                return -math.inf
            total += lp
        return total


_NU_PRIOR = PriorSpec("improper-positive")
_OMEGA_PRIOR = PriorSpec("uniform", (-15.0, 15.0))
_D_UNIFORM = PriorSpec("uniform", (0.0, 0.5))
_THETA_UNIFORM = PriorSpec("uniform", (-1.0, 0.0))
_GAMMA_UNIFORM = PriorSpec("uniform", (0.0, 1.0))


def case1_catalog() -> PriorCatalog:
    """The uninformative baseline scenario C1."""
    return PriorCatalog(
        "C1", (_NU_PRIOR, _D_UNIFORM, _THETA_UNIFORM, _GAMMA_UNIFORM, _OMEGA_PRIOR)
    )


def _pinned_b(a: float, mean: float, name: str) -> float:
    """Shape b with Beta mean pinned at ``mean``: b = a (1 - mean) / mean."""
    if not 0.0 < mean < 1.0:
        raise HyperparameterError(f"{name} pin value {mean} sits on a support boundary")
    return a * (1.0 - mean) / mean


def hyperparameters_from_truth(
    case: str,
    *,
    d0: float | None = None,
    theta0: float | None = None,
    gamma0: float | None = None,
    sigma_phi: float | None = None,
    mu_phi: float | None = None,
    a1: float = 110.0,
    b1: float | None = None,
    a2: float = 50.0,
    b2: float | None = None,
    a3: float = 25.0,
    b3: float | None = None,
) -> PriorCatalog:
    """Build the prior catalog for one scenario label.

    Truth-pinned scenarios (C2.1, C3.1, C4.1, C5.1) derive the second Beta
    shape (or the Gaussian mean mu_phi) from the supplied true values via
    the Beta mean identity.  The two-step variants (C2.3, C3.3, C5.2) use
    the same construction with a first-stage posterior mean passed in place
    of the truth.  C2.2, C3.2 and C4.2 ignore the truth: C2.2 centers the
    Gaussian at zero, C3.2/C4.2 require both Beta shapes explicitly.

    Raises
    ------
    HyperparameterError
        If a required pin value is missing or sits on a support boundary
        (theta0 = 0 or -1, gamma0 in {0, 1}, d0 in {0, 0.5}).
    """
    if case not in _CASES:
        raise ValueError(f"unknown prior case {case!r}; expected one of {_CASES}")
    if case == "C1":
        return case1_catalog()

    def gaussian_d(default_sigma: float) -> PriorSpec:
        sigma = default_sigma if sigma_phi is None else sigma_phi
        if mu_phi is not None:
            mu = mu_phi
        else:
            if d0 is None:
                raise HyperparameterError(f"{case} needs d0 (or mu_phi) to center the d prior")
            if not 0.0 < d0 < 0.5:
                raise HyperparameterError(f"d pin value {d0} sits on a support boundary")
            mu = phi_inverse(d0)
        return PriorSpec("gaussian-on-phi", (mu, sigma))

    def beta_theta() -> PriorSpec:
        if b1 is not None:
            return PriorSpec("beta-neg-theta", (a1, b1))
        if case == "C3.2":
            raise HyperparameterError("C3.2 requires both a1 and b1 explicitly")
        if theta0 is None:
            raise HyperparameterError(f"{case} needs theta0 (or b1) for the theta prior")
        if not -1.0 < theta0 < 0.0:
            raise HyperparameterError(f"theta pin value {theta0} sits on a support boundary")
        return PriorSpec("beta-neg-theta", (a1, _pinned_b(a1, -theta0, "theta")))

    def beta_gamma() -> PriorSpec:
        if b2 is not None:
            return PriorSpec("beta-gamma", (a2, b2))
        if case == "C4.2":
            raise HyperparameterError("C4.2 requires both a2 and b2 explicitly")
        if gamma0 is None:
            raise HyperparameterError(f"{case} needs gamma0 (or b2) for the gamma prior")
        return PriorSpec("beta-gamma", (a2, _pinned_b(a2, gamma0, "gamma")))

    def beta_d() -> PriorSpec:
        if b3 is not None:
            return PriorSpec("beta-2d", (a3, b3))
        if d0 is None:
            raise HyperparameterError(f"{case} needs d0 (or b3) for the d prior")
        if not 0.0 < d0 < 0.5:
            raise HyperparameterError(f"d pin value {d0} sits on a support boundary")
        return PriorSpec("beta-2d", (a3, _pinned_b(a3, 2.0 * d0, "2d")))

    if case.startswith("C2"):
        if case == "C2.2":
            d_prior = PriorSpec("gaussian-on-phi", (0.0 if mu_phi is None else mu_phi,
                                                    3.0 if sigma_phi is None else sigma_phi))
        else:
            d_prior = gaussian_d(0.15)
        return PriorCatalog(case, (_NU_PRIOR, d_prior, _THETA_UNIFORM, _GAMMA_UNIFORM, _OMEGA_PRIOR))

    if case.startswith("C3"):
        return PriorCatalog(
            case, (_NU_PRIOR, gaussian_d(0.15), beta_theta(), _GAMMA_UNIFORM, _OMEGA_PRIOR)
        )

    if case.startswith("C4"):
        return PriorCatalog(
            case, (_NU_PRIOR, gaussian_d(0.15), beta_theta(), beta_gamma(), _OMEGA_PRIOR)
        )

    # C5.x
    return PriorCatalog(case, (_NU_PRIOR, beta_d(), beta_theta(), beta_gamma(), _OMEGA_PRIOR))
