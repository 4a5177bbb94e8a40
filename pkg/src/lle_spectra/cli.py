"""Command-line driver for the LLE spectral experiments.

Every subcommand shares one flag set; values can also come from a `--config`
file of `key = value` lines, with explicit command-line flags winning. File
outputs go under `--out DIR`; without it the tabular commands print CSV to
stdout and put diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import harness as hn
from . import lle_matrix as lm
from . import matching as mt
from . import sampling as sp
from .harness import ExperimentConfig
from .sampling import Domain

SUBCOMMANDS = (
    "sample",
    "build-w",
    "lle-spectrum",
    "analytic-spectrum",
    "compare",
    "appendix-demo",
    "verify",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lle-spectra",
        description="LLE spectra vs the analytic spectra of the limiting operator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"{name} stage")
        p.add_argument("--domain", choices=[d.value for d in Domain])
        p.add_argument("--epsilon", type=float)
        p.add_argument("--n", help="interval sample sizes, comma separated")
        p.add_argument("--m", help="disc grid sizes, comma separated")
        p.add_argument("--k", type=int, help="number of eigenvalues")
        p.add_argument("--mode", choices=[m.value for m in lm.SolverMode])
        p.add_argument("--kind", choices=["neumann", "dirichlet"])
        p.add_argument("--nu-max", type=int, dest="nu_max")
        p.add_argument("--lambda-max", type=float, dest="lambda_max")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument(
            "--allow-subcritical",
            action="store_const",
            const=True,
            dest="allow_subcritical",
        )
        p.add_argument("--config", help="key = value config file")
    return parser


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict[str, str] = {}
    if args.config:
        values.update(hn.parse_config_file(args.config))
    flag_map = {
        "domain": args.domain,
        "epsilon": args.epsilon,
        "n": args.n,
        "m": args.m,
        "k": args.k,
        "mode": args.mode,
        "kind": args.kind,
        "nu_max": args.nu_max,
        "lambda_max": args.lambda_max,
        "out": args.out,
        "seed": args.seed,
        "allow_subcritical": args.allow_subcritical,
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = str(value)
    config = hn.config_from_mapping(values)
    config.validate()
    return config


def _csv_text(header: tuple[str, ...], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None, filename: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(path)


def _make_cloud(config: ExperimentConfig) -> sp.PointCloud:
    size = config.sizes[0]
    if config.domain is Domain.INTERVAL:
        cloud = sp.grid_interval(size)
    else:
        cloud = sp.grid_disc(size)
    crit = sp.supercriticality(cloud, config.epsilon)
    if crit < hn.SUPERCRITICAL_MIN and not config.allow_subcritical:
        raise hn.SubcriticalError(cloud.n, config.epsilon, crit)
    return cloud


def _cmd_sample(config: ExperimentConfig, out: str | None) -> int:
    cloud = _make_cloud(config)
    header = ("x",) if config.domain is Domain.INTERVAL else ("x", "y")
    rows = [tuple(hn._g(c) for c in pt) for pt in cloud.points]
    _emit(_csv_text(header, rows), out, f"points_{cloud.n}.csv")
    return 0


def _cmd_build_w(config: ExperimentConfig, out: str | None) -> int:
    cloud = _make_cloud(config)
    wm = lm.build_w(cloud, config.epsilon)
    if out is None:
        coo = wm.w.tocoo()
        order = np.lexsort((coo.col, coo.row))
        sys.stdout.write(f"{wm.n} {coo.nnz} {wm.epsilon:.17g} {wm.c:.17g}\n")
        for i in order:
            sys.stdout.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")
        return 0
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"w_{cloud.n}.txt"
    lm.write_w(wm, path)
    print(path)
    return 0


def _cmd_lle_spectrum(config: ExperimentConfig, out: str | None) -> int:
    cloud = _make_cloud(config)
    wm = lm.build_w(cloud, config.epsilon)
    sres = lm.spectrum_lle(wm, config.k, mode=config.mode, seed=config.seed)
    rows = [(i + 1, hn._g(v)) for i, v in enumerate(sres.eigenvalues)]
    _emit(_csv_text(("index", "lambda"), rows), out, f"lle_spectrum_{cloud.n}.csv")
    print(
        f"n={cloud.n} mode={sres.mode.value} asymmetry={sres.asymmetry:.6g} "
        f"max_imag={sres.max_imag:.6g}",
        file=sys.stderr,
    )
    return 0


def _cmd_analytic_spectrum(config: ExperimentConfig, out: str | None) -> int:
    pairs = hn._analytic_pairs(config)
    rows = [(i + 1, p.nu, p.phase, hn._g(p.lam)) for i, p in enumerate(pairs)]
    _emit(
        _csv_text(("index", "nu", "phase", "lambda"), rows),
        out,
        f"analytic_spectrum_{config.domain.value}.csv",
    )
    return 0


def _cmd_compare(config: ExperimentConfig, out: str | None) -> int:
    reports = hn.run_compare(config)
    for rep in reports:
        worst = max(row.domain_error for row in rep.rows)
        print(
            f"n={rep.n} (size {rep.size_param}) mode={rep.mode.value} "
            f"asymmetry={rep.asymmetry:.4g} worst_error={worst:.4g}"
        )
    print(f"artifacts in {config.out_dir}")
    return 0


def _cmd_appendix_demo(config: ExperimentConfig, out: str | None) -> int:
    rows = []
    for beta, tag in ((0.0, "neumann"), (math.pi / 2.0, "singular")):
        demo = mt.appendix_divergence_demo(beta, j=3, k=0, eps=config.epsilon, lam=1.0)
        for delta, value in zip(demo["deltas"], demo["integrals"]):
            rows.append(
                (
                    tag,
                    hn._g(beta),
                    hn._g(delta),
                    hn._g(value),
                    hn._g(demo["slope"]),
                    hn._g(demo["cauchy_gap"]),
                )
            )
    _emit(
        _csv_text(("branch", "beta", "delta", "integral", "slope", "cauchy_gap"), rows),
        out,
        "appendix_demo.csv",
    )
    return 0


def _cmd_verify(_config: ExperimentConfig, _out: str | None) -> int:
    results = hn.run_verify()
    failed = 0
    for name, ok, detail in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        print(f"{failed} of {len(results)} suites failed", file=sys.stderr)
        return 1
    print(f"all {len(results)} suites passed")
    return 0


_HANDLERS = {
    "sample": _cmd_sample,
    "build-w": _cmd_build_w,
    "lle-spectrum": _cmd_lle_spectrum,
    "analytic-spectrum": _cmd_analytic_spectrum,
    "compare": _cmd_compare,
    "appendix-demo": _cmd_appendix_demo,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](config, args.out)
    except hn.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
