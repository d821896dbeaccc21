"""Command-line entry point.

    wssapprox sweep    --spec S.json --p-max 10 --out rows.csv
    wssapprox spectrum --spec S.json --order 5 --lambda-grid 256 --out spec.csv
    wssapprox tavc     --spec S.json --n 100000 --order 1 --batches 100 --seed 7 --out tavc.csv
    wssapprox clt      --spec S.json --n 10000 --replications 1000 --seed 7 --out clt.csv

Exit status: 0 on success, 2 on a configuration or spec error (the message
names the offending field), 3 on a numerical failure (the message names the
model order).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalFailure, QuadratureNonConvergence, SpecParseError, WSSApproxError
from .predictor import levinson_durbin
from .process_model import load_spec, midpoint_grid, process_truth, spec_to_dict, spectral_density
from .simulation import (
    RNG_ALGORITHM,
    SEED_SPLIT_ALGORITHM,
    clt_experiment,
    tavc_suite,
    write_records_csv,
)
from .spectral_analysis import (
    ar_model_spectrum,
    convergence_report,
    ma_truncation_spectrum,
    predictor_spectrum,
    write_rows_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(WSSApproxError):
    def __init__(self, field, message):
        super().__init__(f"--{field.replace('_', '-')}: {message}")
        self.field = field


@dataclass
class RunConfig:
    command: str
    spec_path: Path
    out_path: Path
    p_max: int | None = None
    order: int | None = None
    lambda_grid: int = 256
    n: int | None = None
    replications: int | None = None
    batches: int = 100
    seed: int | None = None

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(name, f"required for '{self.command}'")

    def require_at_least(self, name, bound):
        value = getattr(self, name)
        if value is not None and value < bound:
            raise ConfigError(name, f"must be >= {bound}, got {value}")


def _uint64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"not an unsigned 64-bit integer: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wssapprox",
        description="Finite-order AR/MA approximations of stationary processes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", dest="spec_path", type=Path, required=True, help="process spec JSON")
        p.add_argument("--out", dest="out_path", type=Path, required=True, help="output CSV")

    p = sub.add_parser("sweep", help="convergence rows for orders 1..p_max")
    common(p)
    p.add_argument("--p-max", type=int, required=True)

    p = sub.add_parser("spectrum", help="tabulate spectra on a midpoint frequency grid")
    common(p)
    p.add_argument("--order", type=int, required=True, help="approximation order p")
    p.add_argument("--lambda-grid", type=int, default=256)

    p = sub.add_parser("tavc", help="AR-model and batch-means TAVC estimates")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--batches", type=int, default=100)
    p.add_argument("--replications", type=int, default=1)
    p.add_argument("--seed", type=_uint64, required=True)

    p = sub.add_parser("clt", help="variance and kurtosis of sqrt(n) * sample mean")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replications", type=int, required=True)
    p.add_argument("--seed", type=_uint64, required=True)
    return parser


def _config_from_args(args) -> RunConfig:
    known = set(RunConfig.__dataclass_fields__)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    for name in ("p_max", "order", "n", "replications", "batches"):
        cfg.require_at_least(name, 1)
    if cfg.command == "spectrum":
        cfg.require_at_least("lambda_grid", 16)
    if cfg.command == "tavc":
        cfg.require_at_least("batches", 2)
    return cfg


def _write_metadata(cfg: RunConfig, spec) -> None:
    meta = {
        "config": {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(cfg).items()},
        "spec": spec_to_dict(spec),
        "rng": RNG_ALGORITHM,
        "seed_split": SEED_SPLIT_ALGORITHM,
        "numpy": np.__version__,
        "wssapprox": __version__,
    }
    path = cfg.out_path.with_name(cfg.out_path.name + ".meta.json")
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _summary(target, estimate):
    rel = abs(estimate - target) / abs(target)
    print(f"target={target:.10g} estimate={estimate:.10g} rel_error={rel:.10g}")


def run_sweep(cfg: RunConfig) -> int:
    cfg.require("p_max")
    rows = convergence_report(load_spec(cfg.spec_path), cfg.p_max)
    with open(cfg.out_path, "w", newline="") as fh:
        write_rows_csv(rows, fh)
    return EXIT_OK


def run_spectrum(cfg: RunConfig) -> int:
    cfg.require("order")
    spec = load_spec(cfg.spec_path)
    p = cfg.order
    truth = process_truth(spec, min_lag=p)
    R = truth.covariance
    fitted = levinson_durbin(R, p)[-1]
    lam = midpoint_grid(cfg.lambda_grid)
    columns = [
        spectral_density(R, lam),
        ma_truncation_spectrum(truth.wold, min(p, truth.wold.order), lam) if truth.wold else None,
        predictor_spectrum(R, fitted, lam),
        ar_model_spectrum(fitted, lam),
    ]
    with open(cfg.out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "s_true", "s_ma_p", "s_predictor_p", "s_ar_model_p"])
        for i, x in enumerate(lam):
            w.writerow([repr(float(x))] + ["" if c is None else repr(float(c[i])) for c in columns])
    return EXIT_OK


def run_tavc(cfg: RunConfig) -> int:
    cfg.require("n", "order", "seed")
    spec = load_spec(cfg.spec_path)
    result = tavc_suite(spec, cfg.n, cfg.order, cfg.batches, cfg.replications or 1, cfg.seed)
    with open(cfg.out_path, "w", newline="") as fh:
        write_records_csv(result.records(), fh)
    _write_metadata(cfg, spec)
    _summary(result.target, float(np.mean([e.value for e in result.ar_estimates])))
    return EXIT_OK


def run_clt(cfg: RunConfig) -> int:
    cfg.require("n", "replications", "seed")
    spec = load_spec(cfg.spec_path)
    report = clt_experiment(spec, cfg.n, cfg.replications, cfg.seed)
    with open(cfg.out_path, "w", newline="") as fh:
        write_records_csv(report.records(), fh)
    _write_metadata(cfg, spec)
    _summary(report.target, report.empirical_variance)
    return EXIT_OK


COMMANDS = {"sweep": run_sweep, "spectrum": run_spectrum, "tavc": run_tavc, "clt": run_clt}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)  # exits 2 on usage errors
    try:
        cfg = _config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except SpecParseError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"wssapprox: spec error{field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"wssapprox: numerical failure at order p={exc.order}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QuadratureNonConvergence as exc:
        print(f"wssapprox: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (WSSApproxError, OSError) as exc:
        print(f"wssapprox: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
