"""Experiment runner: simulation grids, estimation, the sensitivity study.

Reproducibility contract: every run derives its generators from the base
seed through counter-based Philox streams keyed by
SeedSequence(entropy=seed, spawn_key=(d-index, nu-index, replicate, stage)),
so replicates never share a stream and outputs do not depend on worker
scheduling.  Every output directory carries a manifest with the resolved
configuration and its hash; re-running from the same configuration
reproduces the data files byte for byte.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FiegarchError
from .fiegarch import (
    ModelSpec,
    PRESAMPLE_ZERO_BEFORE_SAMPLE,
    read_series_csv,
    simulate,
    write_series_csv,
)
from .mcmc import (
    Chain,
    KernelSlot,
    KernelSpec,
    gibbs_run,
    grid_initialize,
    write_chain_csv,
)
from .priors import PriorCatalog, PriorSpec, hyperparameters_from_truth
from .summary import (
    PosteriorSummary,
    density_estimate,
    histogram_data,
    summarize,
    summarize_draws,
)

OUTPUT_DIR_ENV = "FIEGARCH_MCMC_OUTDIR"

_KERNEL_SD_KEYS = ("kernel_sd_nu", "kernel_sd_d", "kernel_sd_theta",
                   "kernel_sd_gamma", "kernel_sd_omega")


@dataclass
class RunConfig:
    """Resolved settings for one run; defaults mirror the simulation study."""

    mode: str = "study"
    # data-generating truth
    nu0: float | None = None
    d0: float | None = None
    theta: float = -0.15
    gamma_: float = 0.24
    omega: float = -5.4
    n: int = 2000
    m_star: int = 50_000
    d0_grid: tuple[float, ...] = (0.10, 0.25, 0.35, 0.45)
    nu0_grid: tuple[float, ...] = (1.1, 1.5, 1.9, 2.5, 5.0)
    # prior scenario
    case: str = "C1"
    sigma_phi: float | None = None
    mu_phi: float | None = None
    a1: float = 110.0
    b1: float | None = None
    a2: float = 50.0
    b2: float | None = None
    a3: float = 25.0
    b3: float | None = None
    # sampler
    n_iter: int | None = None
    burn_in: int = 1000
    thinning: int | None = None
    presample: str = PRESAMPLE_ZERO_BEFORE_SAMPLE
    kernel_sd_nu: float | None = None
    kernel_sd_d: float | None = None
    kernel_sd_theta: float | None = None
    kernel_sd_gamma: float | None = None
    kernel_sd_omega: float | None = None
    ci_alpha: float = 0.05
    example_retained: int = 1000
    # run control
    seed: int | None = None
    replicates: int = 1
    workers: int = 1
    input: str | None = None
    truth_known: bool = False
    save_chains: bool = False
    out_dir: str | None = None

    def resolved(self) -> "RunConfig":
        """Fill mode-dependent defaults (iteration budget, grids, paths)."""
        cfg = dataclasses.replace(self)
        if cfg.out_dir is None:
            cfg.out_dir = os.environ.get(OUTPUT_DIR_ENV, "runs")
        if cfg.thinning is None:
            cfg.thinning = 20 if cfg.mode == "example" else 1
        if cfg.n_iter is None:
            if cfg.mode == "example":
                cfg.n_iter = cfg.burn_in + 1 + cfg.thinning * (cfg.example_retained - 1)
            else:
                cfg.n_iter = 6000
        if cfg.d0 is not None:
            cfg.d0_grid = (cfg.d0,)
        if cfg.nu0 is not None:
            cfg.nu0_grid = (cfg.nu0,)
        return cfg

    def truth_vector(self, d0: float, nu0: float) -> np.ndarray:
        return np.array([nu0, d0, self.theta, self.gamma_, self.omega])

    def model_spec(self, d0: float, nu0: float) -> ModelSpec:
        return ModelSpec(nu=nu0, d=d0, theta=self.theta, gamma_=self.gamma_, omega=self.omega)

    def catalog(self, d0: float | None) -> PriorCatalog:
        return hyperparameters_from_truth(
            self.case,
            d0=d0,
            theta0=self.theta,
            gamma0=self.gamma_,
            sigma_phi=self.sigma_phi,
            mu_phi=self.mu_phi,
            a1=self.a1, b1=self.b1, a2=self.a2, b2=self.b2, a3=self.a3, b3=self.b3,
        )

    def kernel(self, catalog: PriorCatalog) -> KernelSpec:
        kernel = KernelSpec.for_catalog(catalog)
        overrides = [getattr(self, key) for key in _KERNEL_SD_KEYS]
        if any(sd is not None for sd in overrides):
            slots = [
                KernelSlot(sd if sd is not None else slot.sd, slot.lower, slot.upper)
                for sd, slot in zip(overrides, kernel.slots)
            ]
            kernel = KernelSpec(tuple(slots))
        return kernel


def replicate_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent stream for one (cell, replicate, stage) path under a base seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def config_hash(cfg: RunConfig) -> str:
    """Hash of the data-determining configuration (where it runs is excluded)."""
    payload = dataclasses.asdict(cfg)
    for key in ("out_dir", "workers", "save_chains", "input"):
        payload.pop(key, None)
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


def _config_echo(cfg: RunConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["config_hash"] = config_hash(cfg)
    return echo


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _summary_row(s: PosteriorSummary) -> dict:
    return {
        "parameter": s.name,
        "truth": s.truth,
        "mean": s.mean,
        "sd": s.sd,
        "ci_lower": s.ci_lower,
        "ci_upper": s.ci_upper,
        "bias": s.bias,
        "ape": s.ape,
        "ape_gt_10pct": None if s.ape is None else bool(s.ape > 0.10),
        "truth_in_ci": s.truth_in_ci,
    }


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(row.get(k)) for k in fieldnames})


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return value


# ---------------------------------------------------------------------------
# simulate


def run_simulate(cfg: RunConfig) -> dict:
    """Simulate one series per (d0, nu0, replicate) cell; returns the manifest."""
    cfg = cfg.resolved()
    seed = _require_seed(cfg, default=0)
    if not cfg.d0_grid or not cfg.nu0_grid:
        raise ValueError("empty d0/nu0 grid")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries = []
    for di, d0 in enumerate(cfg.d0_grid):
        for ni, nu0 in enumerate(cfg.nu0_grid):
            for rep in range(cfg.replicates):
                path = out / f"series_d{d0:g}_nu{nu0:g}_r{rep}.csv"
                seed_path = [di, ni, rep, 0]
                sim = simulate(
                    cfg.model_spec(d0, nu0),
                    cfg.n,
                    cfg.m_star,
                    rng=replicate_rng(seed, *seed_path),
                    seed=(seed, *seed_path),
                )
                write_series_csv(path, sim)
                entries.append(
                    {"file": path.name, "d0": d0, "nu0": nu0, "replicate": rep,
                     "base_seed": seed, "seed_path": seed_path}
                )
    manifest = {"mode": "simulate", "config": _config_echo(cfg), "files": entries}
    _write_json(out / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# estimate


def run_estimate(cfg: RunConfig) -> dict:
    """Estimate one observed series end to end; writes chain, summary, report."""
    cfg = cfg.resolved()
    if cfg.input is None:
        raise ValueError("estimate mode requires an input series CSV")
    seed = _require_seed(cfg, default=0)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    x = read_series_csv(cfg.input)
    t0 = time.perf_counter()
    catalog = cfg.catalog(cfg.d0)
    kernel = cfg.kernel(catalog)
    eta0 = grid_initialize(x, presample=cfg.presample)
    chain = gibbs_run(
        x, catalog, eta0, cfg.n_iter, cfg.burn_in, cfg.thinning,
        rng=replicate_rng(seed, 0), kernel=kernel, presample=cfg.presample,
        seed=(seed, 0),
    )
    truth = None
    if cfg.truth_known:
        if cfg.d0 is None or cfg.nu0 is None:
            raise ValueError("truth_known requires d0 and nu0")
        truth = cfg.truth_vector(cfg.d0, cfg.nu0)
    summaries = summarize(chain, truth, cfg.ci_alpha)
    elapsed = time.perf_counter() - t0

    write_chain_csv(chain, out / "chain.csv")
    rows = [_summary_row(s) for s in summaries]
    _write_json(out / "summary.json", {"parameters": rows})
    report = {
        "mode": "estimate",
        "config": _config_echo(cfg),
        "initial": [float(v) for v in chain.initial],
        "acceptance_rates": {
            name: float(r) for name, r in zip(chain.param_names, chain.acceptance_rates)
        },
        "retained_draws": chain.n_retained,
        "base_seed": seed,
        "elapsed_seconds": elapsed,
    }
    _write_json(out / "report.json", report)
    return {"chain": chain, "summaries": summaries, "report": report}


# ---------------------------------------------------------------------------
# study


_STUDY_FIELDS = [
    "case", "d0", "nu0", "replicate", "parameter", "truth", "mean", "sd",
    "ci_lower", "ci_upper", "bias", "ape", "ape_gt_10pct", "truth_in_ci",
]


def _study_cell(cfg: RunConfig, seed: int, di: int, ni: int, rep: int) -> dict:
    """Simulate, initialize and sample one grid cell; returns rows or an error."""
    d0 = cfg.d0_grid[di]
    nu0 = cfg.nu0_grid[ni]
    cell = {"d0": d0, "nu0": nu0, "replicate": rep}
    t0 = time.perf_counter()
    try:
        sim = simulate(
            cfg.model_spec(d0, nu0), cfg.n, cfg.m_star,
            rng=replicate_rng(seed, di, ni, rep, 0), seed=(seed, di, ni, rep, 0),
        )
        catalog = cfg.catalog(d0)
        kernel = cfg.kernel(catalog)
        eta0 = grid_initialize(sim.x, presample=cfg.presample)
        chain = gibbs_run(
            sim.x, catalog, eta0, cfg.n_iter, cfg.burn_in, cfg.thinning,
            rng=replicate_rng(seed, di, ni, rep, 1), kernel=kernel,
            presample=cfg.presample, seed=(seed, di, ni, rep, 1),
        )
        summaries = summarize(chain, cfg.truth_vector(d0, nu0), cfg.ci_alpha)
    except (FiegarchError, ValueError) as exc:
        return {**cell, "error": f"{type(exc).__name__}: {exc}"}
    rows = [{**cell, "case": cfg.case, **_summary_row(s)} for s in summaries]
    return {
        **cell,
        "rows": rows,
        "acceptance_rates": [float(r) for r in chain.acceptance_rates],
        "initial": [float(v) for v in chain.initial],
        "elapsed_seconds": time.perf_counter() - t0,
        "seed_paths": {"simulate": [di, ni, rep, 0], "chain": [di, ni, rep, 1]},
        "chain": chain,
    }


def _study_cell_task(args):
    cfg, seed, di, ni, rep, chain_dir = args
    result = _study_cell(cfg, seed, di, ni, rep)
    chain = result.pop("chain", None)  # keep worker payloads small
    if chain is not None and chain_dir is not None:
        name = f"chain_d{result['d0']:g}_nu{result['nu0']:g}_r{result['replicate']}.csv"
        write_chain_csv(chain, Path(chain_dir) / name)
    return result


def run_study(cfg: RunConfig) -> dict:
    """Run the Monte Carlo sensitivity study over the (d0, nu0) grid.

    A failed cell is recorded in the report and skipped; the other cells
    proceed.  Emits study_summary.csv (one row per cell, replicate and
    parameter), run_report.json and manifest.json.
    """
    cfg = cfg.resolved()
    if cfg.seed is None:
        raise ValueError("study mode requires an explicit seed")
    seed = cfg.seed
    if not cfg.d0_grid or not cfg.nu0_grid:
        raise ValueError("empty d0/nu0 grid")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    chain_dir = str(out) if cfg.save_chains else None
    tasks = [
        (cfg, seed, di, ni, rep, chain_dir)
        for di in range(len(cfg.d0_grid))
        for ni in range(len(cfg.nu0_grid))
        for rep in range(cfg.replicates)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_study_cell_task, tasks))
    else:
        results = [_study_cell_task(task) for task in tasks]

    rows = [row for res in results if "rows" in res for row in res["rows"]]
    failures = [res for res in results if "error" in res]
    _write_csv(out / "study_summary.csv", _STUDY_FIELDS, rows)
    report = {
        "mode": "study",
        "config": _config_echo(cfg),
        "cells": [
            {k: v for k, v in res.items() if k != "rows"} for res in results
        ],
        "failures": [
            {"d0": f["d0"], "nu0": f["nu0"], "replicate": f["replicate"], "error": f["error"]}
            for f in failures
        ],
        "base_seed": seed,
    }
    _write_json(out / "run_report.json", report)
    manifest = {
        "mode": "study",
        "config": _config_echo(cfg),
        "files": [
            {"file": "study_summary.csv", "base_seed": seed},
        ],
    }
    _write_json(out / "manifest.json", manifest)
    return {"rows": rows, "failures": failures, "report": report}


# ---------------------------------------------------------------------------
# thinning example


def example_catalog() -> PriorCatalog:
    """All-uniform catalog with the narrow theta/gamma supports of the
    thinning illustration: theta ~ U(-0.5, 0) and gamma ~ U(0, 0.5)."""
    return PriorCatalog(
        "EXAMPLE",
        (
            PriorSpec("improper-positive"),
            PriorSpec("uniform", (0.0, 0.5)),
            PriorSpec("uniform", (-0.5, 0.0)),
            PriorSpec("uniform", (0.0, 0.5)),
            PriorSpec("uniform", (-15.0, 15.0)),
        ),
    )


def example_views(chain: Chain, stride: int, n_unthinned: int) -> dict[str, np.ndarray]:
    """Index sets of the three chain views: entire, thinned, unthinned."""
    total = chain.n_retained
    return {
        "entire": np.arange(total),
        "thinned": np.arange(0, total, stride),
        "unthinned": np.arange(min(n_unthinned, total)),
    }


def run_example(cfg: RunConfig) -> dict:
    """One long unthinned chain summarized as entire / thinned / unthinned views.

    The chain length defaults to burn_in + 1 + thinning * (retained - 1)
    with a desk-scale stride of 20; pass thinning=200 for the full-scale
    version of the comparison.
    """
    cfg = cfg.resolved()
    seed = _require_seed(cfg, default=0)
    d0 = 0.25 if cfg.d0 is None else cfg.d0
    nu0 = 1.9 if cfg.nu0 is None else cfg.nu0
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    sim = simulate(
        cfg.model_spec(d0, nu0), cfg.n, cfg.m_star,
        rng=replicate_rng(seed, 0), seed=(seed, 0),
    )
    catalog = example_catalog()
    kernel = cfg.kernel(catalog)
    eta0 = grid_initialize(sim.x, presample=cfg.presample)
    # keep every post-burn-in draw; the views thin afterwards
    chain = gibbs_run(
        sim.x, catalog, eta0, cfg.n_iter, cfg.burn_in, 1,
        rng=replicate_rng(seed, 1), kernel=kernel, presample=cfg.presample,
        seed=(seed, 1),
    )
    views = example_views(chain, cfg.thinning, cfg.example_retained)
    truth = cfg.truth_vector(d0, nu0)

    rows = []
    view_summaries: dict[str, list[PosteriorSummary]] = {}
    density_rows = []
    histogram_rows = []
    for view, idx in views.items():
        sub = chain.draws[idx]
        summaries = [
            summarize_draws(sub[:, j], name, float(truth[j]), cfg.ci_alpha)
            for j, name in enumerate(chain.param_names)
        ]
        view_summaries[view] = summaries
        rows.extend(
            {"view": view, "d0": d0, "nu0": nu0, "n_draws": int(idx.size), **_summary_row(s)}
            for s in summaries
        )
        for j, name in enumerate(chain.param_names):
            draws = sub[:, j]
            grid = np.linspace(float(np.min(draws)), float(np.max(draws)), 200)
            dens = density_estimate(draws, grid)
            density_rows.extend(
                {"view": view, "parameter": name, "x": float(g), "density": float(v)}
                for g, v in zip(grid, dens)
            )
            edges, counts, density = histogram_data(draws)
            histogram_rows.extend(
                {
                    "view": view, "parameter": name,
                    "bin_left": float(edges[b]), "bin_right": float(edges[b + 1]),
                    "count": int(counts[b]), "density": float(density[b]),
                }
                for b in range(counts.size)
            )

    write_chain_csv(chain, out / "chain.csv")
    _write_csv(
        out / "example_summary.csv",
        ["view", "d0", "nu0", "n_draws"] + [f for f in _STUDY_FIELDS if f not in
                                            ("case", "d0", "nu0", "replicate")],
        rows,
    )
    _write_csv(out / "densities.csv", ["view", "parameter", "x", "density"], density_rows)
    _write_csv(
        out / "histograms.csv",
        ["view", "parameter", "bin_left", "bin_right", "count", "density"],
        histogram_rows,
    )
    report = {
        "mode": "example",
        "config": _config_echo(cfg),
        "d0": d0,
        "nu0": nu0,
        "view_sizes": {view: int(idx.size) for view, idx in views.items()},
        "acceptance_rates": {
            name: float(r) for name, r in zip(chain.param_names, chain.acceptance_rates)
        },
        "base_seed": seed,
        "elapsed_seconds": time.perf_counter() - t0,
    }
    _write_json(out / "report.json", report)
    return {"chain": chain, "views": views, "summaries": view_summaries, "report": report}


def _require_seed(cfg: RunConfig, default: int) -> int:
    return default if cfg.seed is None else cfg.seed
