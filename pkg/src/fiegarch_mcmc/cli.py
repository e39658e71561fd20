"""Command-line entry point.

Subcommands: simulate, estimate, study, example.  Every RunConfig key can
come from a flat ``key = value`` config file (--config) and every key is
also a flag; flags override the file, the file overrides built-in defaults.
Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure
(with a single machine-readable JSON line on stderr).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .harness import OUTPUT_DIR_ENV, RunConfig, run_estimate, run_example, run_simulate, run_study


class UsageError(ValueError):
    pass


_TUPLE_KEYS = {"d0_grid", "nu0_grid"}
_BOOL_KEYS = {"truth_known", "save_chains"}
_INT_KEYS = {"n", "m_star", "n_iter", "burn_in", "thinning", "seed", "replicates",
             "workers", "example_retained"}
_STR_KEYS = {"mode", "case", "presample", "input", "out_dir"}


def _coerce(key: str, raw: str):
    value = raw.strip()
    if key in _TUPLE_KEYS:
        try:
            return tuple(float(v) for v in value.replace(",", " ").split())
        except ValueError:
            raise UsageError(f"config key {key} expects a list of numbers, got {value!r}")
    if key in _BOOL_KEYS:
        if value.lower() in ("true", "1", "yes"):
            return True
        if value.lower() in ("false", "0", "no"):
            return False
        raise UsageError(f"config key {key} expects a boolean, got {value!r}")
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"config key {key} expects an integer, got {value!r}")
    if key in _STR_KEYS:
        return value
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"config key {key} expects a number, got {value!r}")


def load_config_file(path: str | Path) -> dict:
    """Parse a flat 'key = value' config file; '#' starts a comment."""
    known = {f.name for f in dataclasses.fields(RunConfig)}
    out: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def _add_common(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--config", help="flat key = value config file; flags override it")
    add("--out-dir", dest="out_dir",
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./runs)")
    add("--seed", type=int, help="base seed; replicate streams are derived from it")
    add("--n", type=int, help="series length")
    add("--m-star", dest="m_star", type=int, help="truncation horizon of the volatility filter")
    add("--d0", type=float, help="long-memory truth (collapses the d0 grid)")
    add("--nu0", type=float, help="tail-thickness truth (collapses the nu0 grid)")
    add("--d0-grid", dest="d0_grid", type=float, nargs="+", help="d0 grid values")
    add("--nu0-grid", dest="nu0_grid", type=float, nargs="+", help="nu0 grid values")
    add("--theta", type=float, help="sign-asymmetry truth")
    add("--gamma", dest="gamma_", type=float, help="magnitude-effect truth")
    add("--omega", type=float, help="log-volatility level truth")
    add("--case", help="prior scenario label (C1, C2.1, ..., C5.2)")
    add("--sigma-phi", dest="sigma_phi", type=float, help="sd of the Gaussian prior on phi^-1(d)")
    add("--mu-phi", dest="mu_phi", type=float, help="mean of the Gaussian prior on phi^-1(d)")
    add("--a1", type=float, help="Beta shape a for -theta")
    add("--b1", type=float, help="Beta shape b for -theta (else pinned from theta truth)")
    add("--a2", type=float, help="Beta shape a for gamma")
    add("--b2", type=float, help="Beta shape b for gamma (else pinned from gamma truth)")
    add("--a3", type=float, help="Beta shape a for 2d")
    add("--b3", type=float, help="Beta shape b for 2d (else pinned from d truth)")
    add("--n-iter", dest="n_iter", type=int, help="Gibbs iterations")
    add("--burn-in", dest="burn_in", type=int, help="burn-in size")
    add("--thinning", type=int, help="thinning stride")
    add("--presample", choices=["presample-only", "paper-literal"],
        help="which news-impact terms the filter zeroes")
    for name in ("nu", "d", "theta", "gamma", "omega"):
        add(f"--kernel-sd-{name}", dest=f"kernel_sd_{name}", type=float,
            help=f"proposal sd override for {name}")
    add("--ci-alpha", dest="ci_alpha", type=float, help="credibility level is 1 - alpha")
    add("--replicates", type=int, help="replicates per grid cell")
    add("--workers", type=int, help="parallel worker processes for grid cells")
    add("--save-chains", dest="save_chains", action=argparse.BooleanOptionalAction,
        default=None, help="write per-cell chain CSVs in study mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiegarch-mcmc",
        description="Simulate FIEGARCH(0,d,0) series with GED innovations and "
                    "estimate them by Metropolis-within-Gibbs.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    p_sim = sub.add_parser("simulate", help="write one series CSV per grid cell")
    p_est = sub.add_parser("estimate", help="run one chain on an observed series CSV")
    p_est.add_argument("--input", help="series CSV (one column x, optional header)")
    p_est.add_argument("--truth-known", dest="truth_known",
                       action=argparse.BooleanOptionalAction, default=None,
                       help="compute bias/ape against the d0/nu0/theta/gamma/omega flags")
    p_study = sub.add_parser("study", help="Monte Carlo sensitivity study over the grid")
    p_example = sub.add_parser("example", help="entire vs thinned vs unthinned chain comparison")
    p_example.add_argument("--retained", dest="example_retained", type=int,
                           help="thinned-view size N (default 1000)")
    for p in (p_sim, p_est, p_study, p_example):
        _add_common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    field_names = {f.name for f in dataclasses.fields(RunConfig)}
    for key, value in vars(args).items():
        if key in field_names and value is not None:
            if key in _TUPLE_KEYS:
                value = tuple(value)
            settings[key] = value
    settings["mode"] = args.mode
    try:
        return RunConfig(**settings)
    except TypeError as exc:
        raise UsageError(str(exc))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.mode == "study" and cfg.seed is None:
            raise UsageError("study requires --seed for reproducibility")
        if cfg.mode == "estimate" and cfg.input is None:
            raise UsageError("estimate requires --input")
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")

    runner = {
        "simulate": run_simulate,
        "estimate": run_estimate,
        "study": run_study,
        "example": run_example,
    }[cfg.mode]
    try:
        runner(cfg)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        line = json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})
        print(line, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
