"""Posterior summaries: moments, quantile intervals, error metrics, densities.

The quantile convention is the order-statistic one: q(alpha) is the smallest
sample value satisfying both

    P(X <= q) >= alpha   and   P(X >= q) >= 1 - alpha

under the empirical distribution.  Credibility intervals are equal-tailed,
[q(alpha/2), q(1 - alpha/2)].  Standard deviations use the 1/M population
divisor.  The accuracy metrics against a known truth are bias = mean - truth
and ape = |bias / truth|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mcmc import Chain


def quantile(sample: np.ndarray, alpha: float) -> float:
    """Smallest order statistic q with P(X <= q) >= alpha and P(X >= q) >= 1 - alpha."""
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"quantile level must be in [0, 1], got {alpha}")
    s = np.sort(sample)
    n = s.size
    # counts of elements <= / >= each order statistic, duplicates included
    count_le = np.searchsorted(s, s, side="right")
    count_ge = n - np.searchsorted(s, s, side="left")
    ok = (count_le / n >= alpha) & (count_ge / n >= 1.0 - alpha)
    idx = np.flatnonzero(ok)
    # both inequalities always hold somewhere (at the minimum or maximum)
    return float(s[idx[0]])


def credibility_interval(sample: np.ndarray, alpha: float) -> tuple[float, float]:
    """Equal-tailed interval [q(alpha/2), q(1 - alpha/2)] at level 1 - alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"interval level must have alpha in (0, 1), got {alpha}")
    return quantile(sample, alpha / 2.0), quantile(sample, 1.0 - alpha / 2.0)


@dataclass(frozen=True)
class PosteriorSummary:
    """Per-parameter posterior summary; bias/ape only when a truth is supplied."""

    name: str
    mean: float
    sd: float
    ci_lower: float
    ci_upper: float
    alpha: float
    truth: float | None = None
    bias: float | None = None
    ape: float | None = None

    @property
    def truth_in_ci(self) -> bool | None:
        if self.truth is None:
            return None
        return self.ci_lower <= self.truth <= self.ci_upper


def summarize_draws(
    draws: np.ndarray, name: str, truth: float | None = None, alpha: float = 0.05
) -> PosteriorSummary:
    """Summary of one marginal posterior sample."""
    draws = np.asarray(draws, dtype=float)
    if draws.size == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = float(np.mean(draws))
    sd = float(np.std(draws))  # population 1/M divisor
    lo, hi = credibility_interval(draws, alpha)
    bias = ape = None
    if truth is not None:
        bias = mean - truth
        ape = abs(bias / truth) if truth != 0.0 else math.inf
    return PosteriorSummary(
        name=name, mean=mean, sd=sd, ci_lower=lo, ci_upper=hi, alpha=alpha,
        truth=truth, bias=bias, ape=ape,
    )


def summarize(
    chain: Chain, truth: np.ndarray | None = None, alpha: float = 0.05
) -> list[PosteriorSummary]:
    """Summaries for every parameter of a chain, in eta order."""
    if chain.n_retained == 0:
        raise ValueError("cannot summarize an empty chain")
    out = []
    for i, name in enumerate(chain.param_names):
        t = None if truth is None else float(np.asarray(truth, dtype=float)[i])
        out.append(summarize_draws(chain.draws[:, i], name, t, alpha))
    return out


def silverman_bandwidth(sample: np.ndarray) -> float:
    """Silverman's rule of thumb: 0.9 min(sd, IQR/1.34) n^(-1/5)."""
    sample = np.asarray(sample, dtype=float)
    n = sample.size
    sd = float(np.std(sample))
    q75, q25 = np.percentile(sample, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    if spread <= 0.0:
        # degenerate sample; any positive width gives a point mass spike
        return 1.0
    return 0.9 * spread * n ** (-0.2)


def density_estimate(
    sample: np.ndarray, grid: np.ndarray, bandwidth: float | None = None
) -> np.ndarray:
    """Gaussian kernel density estimate of the sample evaluated on ``grid``."""
    sample = np.asarray(sample, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if bandwidth is None:
        bandwidth = silverman_bandwidth(sample)
    if not bandwidth > 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    out = np.empty(grid.size)
    norm = 1.0 / (sample.size * bandwidth * math.sqrt(2.0 * math.pi))
    # chunk the grid so the (grid x sample) kernel matrix stays small
    step = max(1, int(4e6 // max(sample.size, 1)))
    for start in range(0, grid.size, step):
        g = grid[start : start + step, None]
        out[start : start + step] = norm * np.sum(
            np.exp(-0.5 * ((g - sample[None, :]) / bandwidth) ** 2), axis=1
        )
    return out


def histogram_data(
    sample: np.ndarray, bins: int = 40
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Histogram counts and normalized densities: (edges, counts, density)."""
    counts, edges = np.histogram(np.asarray(sample, dtype=float), bins=bins)
    widths = np.diff(edges)
    density = counts / (counts.sum() * widths)
    return edges, counts, density
