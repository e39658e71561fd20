"""FIEGARCH(p,d,q) process simulation, volatility filtering and likelihood.

The process (Bollerslev & Mikkelsen, 1996) is

    X_t = sigma_t Z_t,
    ln(sigma_t^2) = omega + sum_{k>=0} lambda_{d,k} g(Z_{t-1-k}),
    g(z) = theta z + gamma (|z| - E|Z|),

with i.i.d. standardized GED(nu) innovations.  Simulation truncates the
infinite sum at m* and feeds it real presample innovations; estimation
conditions on the observed sample with presample news-impact terms set to
zero.  Both presample conventions for estimation are supported, see
``volatility_filter``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import DegenerateModelError, FilterError, SimulationError
from .ged import GedParams, ged_abs_moment, ged_sample
from .special_math import CoefficientTable, make_table

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


#: estimation-side conventions for news-impact terms before the sample starts
PRESAMPLE_ZERO_BEFORE_SAMPLE = "presample-only"
PRESAMPLE_PAPER_LITERAL = "paper-literal"
_PRESAMPLE_MODES = (PRESAMPLE_ZERO_BEFORE_SAMPLE, PRESAMPLE_PAPER_LITERAL)

# |ln sigma^2| beyond this makes exp() useless in double precision
_LNSIG2_LIMIT = 708.0


@dataclass(frozen=True)
class ModelSpec:
    """Full parameter vector eta = (nu, d, theta, gamma, omega, alpha_1..p, beta_1..q)."""

    nu: float
    d: float
    theta: float
    gamma_: float
    omega: float
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.theta == 0.0 and self.gamma_ == 0.0:
            raise DegenerateModelError("theta and gamma must not both be zero")
        if not self.d < 0.5:
            raise ValueError(f"weak stationarity of ln sigma^2 requires d < 0.5, got {self.d}")
        GedParams(self.nu)  # validates nu > 0
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> int:
        return len(self.beta)

    def param_names(self) -> tuple[str, ...]:
        return (
            ("nu", "d", "theta", "gamma", "omega")
            + tuple(f"alpha{i}" for i in range(1, self.p + 1))
            + tuple(f"beta{j}" for j in range(1, self.q + 1))
        )

    def to_array(self) -> np.ndarray:
        return np.array(
            (self.nu, self.d, self.theta, self.gamma_, self.omega) + self.alpha + self.beta
        )

    @classmethod
    def from_array(cls, eta: np.ndarray, p: int = 0, q: int = 0) -> "ModelSpec":
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (5 + p + q,):
            raise ValueError(f"expected parameter vector of length {5 + p + q}, got {eta.shape}")
        return cls(
            nu=float(eta[0]),
            d=float(eta[1]),
            theta=float(eta[2]),
            gamma_=float(eta[3]),
            omega=float(eta[4]),
            alpha=tuple(eta[5 : 5 + p]),
            beta=tuple(eta[5 + p :]),
        )


@dataclass(frozen=True)
class SimulatedSeries:
    """Simulated sample with the innovations and variances that produced it."""

    x: np.ndarray
    sigma2: np.ndarray
    z: np.ndarray  # all m* + n + 1 innovations, times -m*..n
    m_star: int
    presample: str
    seed: object = None

    def __post_init__(self) -> None:
        for arr in (self.x, self.sigma2, self.z):
            arr.setflags(write=False)


def g_function(z, theta: float, gamma_: float, e_abs_z: float):
    """News-impact transform g(z) = theta z + gamma (|z| - E|Z|); vectorizes."""
    z = np.asarray(z, dtype=float)
    out = theta * z + gamma_ * (np.abs(z) - e_abs_z)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _cached_table(d: float, m: int, alpha: tuple, beta: tuple) -> CoefficientTable:
    return make_table(d, m, alpha, beta)


def coefficient_table(spec: ModelSpec, m: int) -> CoefficientTable:
    """Lambda table for ``spec`` up to horizon ``m`` (memoized across calls)."""
    return _cached_table(spec.d, m, spec.alpha, spec.beta)


def simulate(
    spec: ModelSpec,
    n: int,
    m_star: int = 50_000,
    rng: np.random.Generator | None = None,
    presample: str = "sample",
    seed: object = None,
) -> SimulatedSeries:
    """Simulate n observations of the FIEGARCH process truncated at m*.

    Draws m* + n + 1 innovations z_t for t = -m*..n and computes

        ln(sigma_t^2) = omega + sum_{k=0}^{m*} lambda_{d,k} g(z_{t-1-k}),
        x_t = sigma_t z_t,   t = 1..n.

    ``presample="sample"`` uses the real presample draws (the data-generating
    convention); ``presample="zero"`` zeroes g(z_s) for s <= 0, which matches
    the conditional filter used for estimation and makes the simulate/filter
    round trip exact up to floating point.
    """
    if n < 1:
        raise ValueError(f"series length must be >= 1, got {n}")
    if m_star < 1:
        raise ValueError(f"truncation horizon must be >= 1, got {m_star}")
    if presample not in ("sample", "zero"):
        raise ValueError(f"unknown simulation presample mode {presample!r}")
    if rng is None:
        rng = np.random.default_rng(seed if isinstance(seed, int) else None)

    params = GedParams(spec.nu)
    z = ged_sample(params, rng, m_star + n + 1)
    e_abs = ged_abs_moment(params)
    gvals = g_function(z, spec.theta, spec.gamma_, e_abs)
    if presample == "zero":
        gvals[: m_star + 1] = 0.0  # times s <= 0

    table = coefficient_table(spec, m_star)
    # conv[j] = sum_k lam[k] gvals[j-k]; ln sigma_t^2 needs j = t - 1 + m*
    conv = signal.fftconvolve(gvals, table.lam)
    lnsig2 = spec.omega + conv[m_star : m_star + n]

    bad = np.flatnonzero(~np.isfinite(lnsig2) | (np.abs(lnsig2) > _LNSIG2_LIMIT))
    if bad.size:
        raise SimulationError(f"non-finite conditional variance at t={bad[0] + 1}")

    sigma2 = np.exp(lnsig2)
    x = np.sqrt(sigma2) * z[m_star + 1 :]
    return SimulatedSeries(x=x, sigma2=sigma2, z=z, m_star=m_star, presample=presample, seed=seed)


@njit(cache=True)
def _filter_recursion(x, lam_rev, omega, theta, gamma_, e_abs, zero_first_g):
    """Sequential conditional-variance recursion; returns index of first blow-up or -1."""
    n = x.shape[0]
    lnsig2 = np.empty(n)
    z = np.empty(n)
    gvals = np.empty(n)
    lnsig2[0] = omega
    z[0] = x[0] * math.exp(-0.5 * omega)
    if zero_first_g:
        gvals[0] = 0.0
    else:
        gvals[0] = theta * z[0] + gamma_ * (abs(z[0]) - e_abs)
    length = n - 1  # len(lam_rev)
    for i in range(1, n):
        v = omega + np.dot(gvals[:i], lam_rev[length - i : length])
        lnsig2[i] = v
        if not (v == v) or v > _LNSIG2_LIMIT or v < -_LNSIG2_LIMIT:
            return lnsig2, z, i
        z[i] = x[i] * math.exp(-0.5 * v)
        gvals[i] = theta * z[i] + gamma_ * (abs(z[i]) - e_abs)
    return lnsig2, z, -1


def volatility_filter(
    spec: ModelSpec,
    x: np.ndarray,
    table: CoefficientTable | None = None,
    presample: str = PRESAMPLE_ZERO_BEFORE_SAMPLE,
) -> tuple[np.ndarray, np.ndarray]:
    """Conditional variances and standardized residuals for an observed series.

    With presample news-impact terms zeroed, sigma_1^2 = exp(omega), then

        ln(sigma_t^2) = omega + sum_{k=0}^{t-2} lambda_{d,k} g(z_{t-1-k}),
        z_t = x_t / sigma_t,            t = 2..n.

    ``presample`` selects which terms are zeroed: ``"presample-only"`` (the
    default) zeroes g(z_s) for s <= 0 only, so g(z_1) enters from t = 2 on;
    ``"paper-literal"`` zeroes g(z_s) for s <= 1 as well, discarding the
    information carried by x_1.

    Returns
    -------
    (sigma2, z) : pair of length-n arrays.

    Raises
    ------
    FilterError
        If some ln(sigma_t^2) is non-finite; the message names t.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("observed series must be a non-empty 1-D array")
    if presample not in _PRESAMPLE_MODES:
        raise ValueError(f"unknown presample mode {presample!r}; use one of {_PRESAMPLE_MODES}")
    n = x.size
    if table is None:
        table = coefficient_table(spec, n)
    if table.m < n - 1:
        raise ValueError(f"coefficient horizon {table.m} too short for n={n}")

    params = GedParams(spec.nu)
    e_abs = ged_abs_moment(params)
    # lam_rev[j] = lam[n-2-j]; only lags 0..n-2 can enter
    lam_rev = np.ascontiguousarray(table.lam[n - 2 :: -1]) if n > 1 else np.empty(0)
    lnsig2, z, bad = _filter_recursion(
        x,
        lam_rev,
        spec.omega,
        spec.theta,
        spec.gamma_,
        e_abs,
        presample == PRESAMPLE_PAPER_LITERAL,
    )
    if bad >= 0:
        raise FilterError(f"non-finite conditional variance at t={bad + 1}")
    return np.exp(lnsig2), z


def log_likelihood_terms(
    spec: ModelSpec,
    x: np.ndarray,
    table: CoefficientTable | None = None,
    presample: str = PRESAMPLE_ZERO_BEFORE_SAMPLE,
) -> np.ndarray:
    """Per-observation log-likelihood contributions ln p(z_t | nu) - 0.5 ln sigma_t^2."""
    sigma2, z = volatility_filter(spec, x, table, presample)
    params = GedParams(spec.nu)
    with np.errstate(divide="ignore", over="ignore"):
        # same stable |z/lambda|^nu form as ged_log_density; -inf is the
        # correct limit for residuals the proposal cannot explain
        power = np.exp(params.nu * (np.log(np.abs(z)) - params.log_lambda_nu))
        return (
            params.log_norm
            - 0.5 * np.where(z == 0.0, 0.0, power)
            - 0.5 * np.log(sigma2)
        )


def log_likelihood(
    spec: ModelSpec,
    x: np.ndarray,
    table: CoefficientTable | None = None,
    presample: str = PRESAMPLE_ZERO_BEFORE_SAMPLE,
) -> float:
    """Conditional log-likelihood of the observed series under ``spec``."""
    return float(np.sum(log_likelihood_terms(spec, x, table, presample)))


def read_series_csv(path: str | Path) -> np.ndarray:
    """Read a one-column series CSV; a single non-numeric header row is allowed."""
    values: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            cell = row[0].strip()
            try:
                values.append(float(cell))
            except ValueError:
                if values:
                    raise ValueError(f"non-numeric value {cell!r} in {path}")
                # header row
    if not values:
        raise ValueError(f"no data rows in {path}")
    return np.array(values)


def write_series_csv(path: str | Path, sim: SimulatedSeries) -> None:
    """Write a simulated series as CSV with columns t, x, sigma2."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "sigma2"])
        for t, (xt, s2) in enumerate(zip(sim.x, sim.sigma2), start=1):
            writer.writerow([t, repr(float(xt)), repr(float(s2))])
