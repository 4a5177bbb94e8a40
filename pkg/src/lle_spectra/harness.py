"""Experiment driver: LLE spectra vs analytic spectra, with CSV/SVG artifacts.

run_compare executes the full pipeline for one configuration (possibly several
sample sizes), pairs the two spectra by sorted order, and writes a fixed-schema
report. All file output is deterministic for a fixed config and seed; runtimes
are returned on the report object but never serialized.
"""

from __future__ import annotations

import csv
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import coefficients as cf
from . import frobenius as fr
from . import lle_matrix as lm
from . import matching as mt
from . import sampling as sp
from .frobenius import Kind
from .lle_matrix import SolverMode
from .plotting import PlotStyle, Series, emit_plot
from .sampling import Domain

SUPERCRITICAL_MIN = 50.0
PHASE_GRID = 720  # discrete rotations tried when aligning disc eigenvectors


class StageError(RuntimeError):
    """Pipeline failure tagged with the stage it happened in."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class SubcriticalError(StageError):
    def __init__(self, n: int, epsilon: float, value: float):
        super().__init__(
            "sampling",
            f"n*eps^d1 = {value:.3g} < {SUPERCRITICAL_MIN:g} at n={n}, eps={epsilon}; "
            "neighborhoods are unreliable (pass allow_subcritical to override)",
        )


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, str(exc)) from exc


@dataclass
class ExperimentConfig:
    """One comparison experiment; sizes are n (interval) or m (disc grid)."""

    domain: Domain = Domain.INTERVAL
    epsilon: float = 0.05
    sizes: tuple[int, ...] = (2000,)
    k: int = 8
    mode: SolverMode | None = None
    kind: Kind = Kind.NEUMANN
    nu_max: int = 12
    lambda_max: float = 60.0
    out_dir: Path = Path("out")
    seed: int = 0
    allow_subcritical: bool = False
    write_vectors: bool = False

    def validate(self) -> None:
        if not 0.0 < self.epsilon <= cf.EPS_MAX:
            raise ValueError(f"epsilon must satisfy 0 < eps <= {cf.EPS_MAX}, got {self.epsilon}")
        if not self.sizes:
            raise ValueError("need at least one sample size")
        if any(s < 2 for s in self.sizes):
            raise ValueError(f"sizes must be >= 2, got {self.sizes}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.nu_max < 0 or self.lambda_max <= 0:
            raise ValueError("need nu_max >= 0 and lambda_max > 0")


@dataclass(frozen=True)
class ComparisonRow:
    index: int  # 1-based position in the sorted spectrum
    nu: int
    phase: str
    lam_analytic: float
    lam_lle: float
    rel_error: float  # absolute error on the lam_analytic = 0 row
    domain_error: float  # weighted (interval) or standard relative (disc)
    vector_sup_error: float  # nan when vectors were not compared


@dataclass
class ComparisonReport:
    domain: Domain
    epsilon: float
    size_param: int  # n for interval, m for disc
    n: int  # realized point count
    rows: list[ComparisonRow]
    asymmetry: float
    supercriticality: float
    mode: SolverMode
    max_imag: float
    runtimes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# spectra


def _analytic_pairs(config: ExperimentConfig) -> list[mt.AnalyticEigenpair]:
    """First k analytic eigenpairs, growing the scan window if needed."""
    lam_max = config.lambda_max
    nu_max = config.nu_max if config.domain is Domain.DISC else 0
    for _ in range(5):
        pairs = mt.find_eigenvalues(
            config.domain, config.epsilon, lam_max, kind=config.kind, nu_max=nu_max
        )
        if len(pairs) >= config.k:
            return pairs[: config.k]
        lam_max *= 2.0
        if config.domain is Domain.DISC:
            nu_max += 2
    raise RuntimeError(
        f"found only {len(pairs)} analytic eigenvalues below lambda = {lam_max / 2:g}"
    )


def _lle_stage(config: ExperimentConfig, size: int):
    with _stage("sampling"):
        if config.domain is Domain.INTERVAL:
            cloud = sp.grid_interval(size)
        else:
            cloud = sp.grid_disc(size)
        crit = sp.supercriticality(cloud, config.epsilon)
        if crit < SUPERCRITICAL_MIN and not config.allow_subcritical:
            raise SubcriticalError(cloud.n, config.epsilon, crit)
    t0 = time.perf_counter()
    with _stage("build_w"):
        wm = lm.build_w(cloud, config.epsilon)
    t1 = time.perf_counter()
    with _stage("lle_spectrum"):
        sres = lm.spectrum_lle(wm, config.k, mode=config.mode, seed=config.seed)
    t2 = time.perf_counter()
    times = {"build_w": t1 - t0, "lle_spectrum": t2 - t1}
    return cloud, wm, sres, crit, times


# ---------------------------------------------------------------------------
# eigenvector alignment


def _analytic_values(
    pair: mt.AnalyticEigenpair, cloud: sp.PointCloud
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfunction samples on the cloud plus the validity mask.

    Dirichlet-kind eigenfunctions live on the elliptic core only; Neumann ones
    evaluate everywhere (the series continues through the degenerate interface
    into the hyperbolic boundary strip).
    """
    model = pair._model or cf.build_model(pair.domain, pair.eps)
    if pair.domain is Domain.INTERVAL:
        x = cloud.points[:, 0]
        if pair.kind is Kind.DIRICHLET:
            mask = (x >= model.x0) & (x <= 1.0 - model.x0)
        else:
            mask = np.ones(len(x), dtype=bool)
        vals = np.zeros(len(x))
        vals[mask] = [pair.u(float(v)) for v in x[mask]]
        return vals, mask
    r = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
    mask = r <= 1.0 - model.r0 if pair.kind is Kind.DIRICHLET else np.ones(len(r), dtype=bool)
    radial = np.zeros(len(r))
    radial[mask] = [pair.u(float(v)) for v in r[mask]]
    return radial, mask


def _sup_align_interval(v_lle: np.ndarray, u_an: np.ndarray, mask: np.ndarray) -> float:
    a = v_lle[mask]
    b = u_an[mask]
    sa, sb = np.max(np.abs(a)), np.max(np.abs(b))
    if sa == 0.0 or sb == 0.0:
        return float(np.max(np.abs(a / max(sa, 1.0) - b / max(sb, 1.0))))
    a = a / sa
    b = b / sb
    return float(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))))


def _sup_align_disc(
    v_lle: np.ndarray, radial: np.ndarray, theta: np.ndarray, nu: int, mask: np.ndarray
) -> float:
    """Best sup distance over sign and PHASE_GRID rotations of the angular factor."""
    v = v_lle[mask]
    sv = np.max(np.abs(v))
    v = v / sv if sv > 0 else v
    if nu == 0:
        b = radial[mask]
        sb = np.max(np.abs(b))
        b = b / sb if sb > 0 else b
        return float(min(np.max(np.abs(v - b)), np.max(np.abs(v + b))))
    a = radial[mask] * np.cos(nu * theta[mask])
    b = radial[mask] * np.sin(nu * theta[mask])
    best = math.inf
    angles = 2.0 * math.pi * np.arange(PHASE_GRID) / PHASE_GRID
    for chunk in np.array_split(angles, 8):
        cand = np.cos(chunk)[:, None] * a[None, :] + np.sin(chunk)[:, None] * b[None, :]
        sup = np.max(np.abs(cand), axis=1)
        good = sup > 0
        cand[good] /= sup[good, None]
        err = np.minimum(
            np.max(np.abs(cand - v[None, :]), axis=1),
            np.max(np.abs(cand + v[None, :]), axis=1),
        )
        best = min(best, float(err.min()))
    return best


def _vector_errors(
    pairs: list[mt.AnalyticEigenpair],
    sres: lm.SpectrumResult,
    cloud: sp.PointCloud,
) -> tuple[list[float], list[int]]:
    """Sup alignment error per row plus the LLE column assigned to each row.

    Rows are matched to LLE columns in sorted order, except inside a
    multiplicity-2 analytic pair where the two candidate assignments are
    resolved by the smaller combined error.
    """
    k = len(pairs)
    errors = [math.nan] * k
    assign = list(range(k))
    if sres.eigenvectors is None:
        return errors, assign
    theta = None
    if cloud.domain is Domain.DISC:
        theta = np.arctan2(cloud.points[:, 1], cloud.points[:, 0])

    def err(row: int, col: int) -> float:
        pair = pairs[row]
        vals, mask = _analytic_values(pair, cloud)
        v = sres.eigenvectors[:, col]
        if cloud.domain is Domain.INTERVAL:
            return _sup_align_interval(v, vals, mask)
        return _sup_align_disc(v, vals, theta, pair.nu, mask)

    row = 0
    while row < k:
        twin = (
            row + 1 < k
            and pairs[row].nu == pairs[row + 1].nu
            and abs(pairs[row].lam - pairs[row + 1].lam) < 1e-12
        )
        if not twin:
            errors[row] = err(row, row)
            row += 1
            continue
        straight = (err(row, row), err(row + 1, row + 1))
        crossed = (err(row, row + 1), err(row + 1, row))
        if sum(crossed) < sum(straight):
            errors[row], errors[row + 1] = crossed
            assign[row], assign[row + 1] = row + 1, row
        else:
            errors[row], errors[row + 1] = straight
        row += 2
    return errors, assign


# ---------------------------------------------------------------------------
# pairing and report assembly


def _error_pair(lam_an: float, lam_lle: float, domain: Domain) -> tuple[float, float]:
    """(relative, domain-specific) error; both absolute on the kernel row."""
    diff = abs(lam_lle - lam_an)
    if lam_an == 0.0:
        return abs(lam_lle), abs(lam_lle)
    rel = diff / abs(lam_an)
    weighted = diff * abs(lam_an) ** -1.5 if domain is Domain.INTERVAL else rel
    return rel, weighted


def _build_rows(
    pairs: list[mt.AnalyticEigenpair],
    sres: lm.SpectrumResult,
    cloud: sp.PointCloud,
) -> list[ComparisonRow]:
    vec_err, assign = _vector_errors(pairs, sres, cloud)
    rows = []
    for i, pair in enumerate(pairs):
        lam_lle = float(sres.eigenvalues[assign[i]])
        rel, dom = _error_pair(pair.lam, lam_lle, cloud.domain)
        rows.append(
            ComparisonRow(
                index=i + 1,
                nu=pair.nu,
                phase=pair.phase,
                lam_analytic=pair.lam,
                lam_lle=lam_lle,
                rel_error=rel,
                domain_error=dom,
                vector_sup_error=vec_err[i],
            )
        )
    return rows


def _g(x: float) -> str:
    return format(float(x), ".17g")


REPORT_HEADER = (
    "n",
    "index",
    "nu",
    "phase",
    "lambda_analytic",
    "lambda_lle",
    "rel_error",
    "domain_error",
    "vector_sup_error",
)


def _write_csv(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _report_csv_rows(reports: list[ComparisonReport]) -> list[tuple]:
    out = []
    for rep in reports:
        for row in rep.rows:
            out.append(
                (
                    rep.n,
                    row.index,
                    row.nu,
                    row.phase,
                    _g(row.lam_analytic),
                    _g(row.lam_lle),
                    _g(row.rel_error),
                    _g(row.domain_error),
                    _g(row.vector_sup_error),
                )
            )
    return out


def _convergence_plot(reports: list[ComparisonReport]) -> str:
    series = []
    k = len(reports[0].rows)
    for j in range(k):
        xs = tuple(rep.n for rep in reports)
        ys = tuple(rep.rows[j].lam_lle for rep in reports)
        series.append(Series(f"j={j + 1}", xs, ys))
    return emit_plot(
        series,
        PlotStyle(title="LLE eigenvalues vs sample size", xlabel="n", ylabel="lambda"),
    )


def _error_plot(reports: list[ComparisonReport]) -> str:
    series = []
    for rep in reports:
        pts = [(row.index, row.domain_error) for row in rep.rows if row.domain_error > 0]
        if pts:
            series.append(
                Series(f"n={rep.n}", tuple(p[0] for p in pts), tuple(p[1] for p in pts))
            )
    if not series:  # all-zero errors; fall back to a linear empty-ish plot
        series = [
            Series(f"n={rep.n}", (1,), (0.0,)) for rep in reports
        ]
        return emit_plot(series, PlotStyle(title="spectral errors", xlabel="index", ylabel="error"))
    return emit_plot(
        series,
        PlotStyle(title="spectral errors", xlabel="index", ylabel="error", log_y=True),
    )


def run_compare(config: ExperimentConfig) -> list[ComparisonReport]:
    """Full pipeline for every configured size; writes CSV and SVG artifacts.

    Any stage failure aborts with a stage-tagged error and removes files
    already written for this invocation.
    """
    with _stage("config"):
        config.validate()
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)

    try:
        t0 = time.perf_counter()
        with _stage("analytic"):
            pairs = _analytic_pairs(config)
        analytic_time = time.perf_counter() - t0

        reports: list[ComparisonReport] = []
        for size in config.sizes:
            cloud, wm, sres, crit, times = _lle_stage(config, size)
            with _stage("compare"):
                t0 = time.perf_counter()
                rows = _build_rows(pairs, sres, cloud)
                times["compare"] = time.perf_counter() - t0
                times["analytic"] = analytic_time
            rep = ComparisonReport(
                domain=config.domain,
                epsilon=config.epsilon,
                size_param=size,
                n=cloud.n,
                rows=rows,
                asymmetry=sres.asymmetry,
                supercriticality=crit,
                mode=sres.mode,
                max_imag=sres.max_imag,
                runtimes=times,
            )
            reports.append(rep)
            with _stage("write"):
                path = out_dir / f"eigenvalues_{cloud.n}.csv"
                _write_csv(
                    path,
                    REPORT_HEADER[1:],
                    [
                        (
                            row.index,
                            row.nu,
                            row.phase,
                            _g(row.lam_analytic),
                            _g(row.lam_lle),
                            _g(row.rel_error),
                            _g(row.domain_error),
                            _g(row.vector_sup_error),
                        )
                        for row in rows
                    ],
                )
                written.append(path)
                if config.write_vectors and sres.eigenvectors is not None:
                    _write_vector_files(out_dir, written, pairs, sres, cloud)

        with _stage("write"):
            path = out_dir / "report.csv"
            _write_csv(path, REPORT_HEADER, _report_csv_rows(reports))
            written.append(path)
            path = out_dir / "meta.csv"
            _write_csv(
                path,
                ("n", "size_param", "epsilon", "asymmetry", "supercriticality", "mode", "max_imag"),
                [
                    (
                        rep.n,
                        rep.size_param,
                        _g(rep.epsilon),
                        _g(rep.asymmetry),
                        _g(rep.supercriticality),
                        rep.mode.value,
                        _g(rep.max_imag),
                    )
                    for rep in reports
                ],
            )
            written.append(path)
            emit("eigenvalue_convergence.svg", _convergence_plot(reports))
            emit("errors.svg", _error_plot(reports))
        return reports
    except BaseException:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise


def _write_vector_files(
    out_dir: Path,
    written: list[Path],
    pairs: list[mt.AnalyticEigenpair],
    sres: lm.SpectrumResult,
    cloud: sp.PointCloud,
) -> None:
    # The hyperbolic flag marks the boundary strip beyond the degenerate
    # interface, where the extended series (not the theorem) defines u.
    model = pairs[0]._model or cf.build_model(cloud.domain, pairs[0].eps)
    if cloud.domain is Domain.INTERVAL:
        x = cloud.points[:, 0]
        hyper = (x < model.x0) | (x > 1.0 - model.x0)
    else:
        r = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
        hyper = r > 1.0 - model.r0
    for i, pair in enumerate(pairs):
        vals, mask = _analytic_values(pair, cloud)
        if cloud.domain is Domain.DISC and pair.nu > 0:
            theta = np.arctan2(cloud.points[:, 1], cloud.points[:, 0])
            ang = np.cos(pair.nu * theta) if pair.phase == "cos" else np.sin(pair.nu * theta)
            vals = vals * ang
        path = out_dir / f"eigvec_{i + 1}.csv"
        coords = ("x",) if cloud.domain is Domain.INTERVAL else ("x", "y")
        rows = []
        for p in range(cloud.n):
            point = tuple(_g(c) for c in cloud.points[p])
            rows.append(
                point
                + (
                    _g(sres.eigenvectors[p, i]),
                    _g(vals[p]) if mask[p] else "nan",
                    int(bool(hyper[p])),
                )
            )
        _write_csv(path, coords + ("value_lle", "value_analytic", "hyperbolic"), rows)
        written.append(path)


# ---------------------------------------------------------------------------
# config files


def parse_config_file(path) -> dict[str, str]:
    """Line-based `key = value` file; `#` starts a comment; keys use - or _."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
            key, _, value = text.partition("=")
            key = key.strip().replace("-", "_")
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            values[key] = value.strip()
    return values


_CONFIG_KEYS = {
    "domain",
    "epsilon",
    "sizes",
    "n",
    "m",
    "k",
    "mode",
    "kind",
    "nu_max",
    "lambda_max",
    "out_dir",
    "out",
    "seed",
    "allow_subcritical",
    "write_vectors",
}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def config_from_mapping(values: dict[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from string key/values (config file or CLI)."""
    unknown = set(values) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig()
    if "domain" in values:
        cfg = replace(cfg, domain=Domain(values["domain"]))
    if "epsilon" in values:
        cfg = replace(cfg, epsilon=float(values["epsilon"]))
    size_key = next((key for key in ("sizes", "n", "m") if key in values), None)
    if size_key is not None:
        cfg = replace(
            cfg, sizes=tuple(int(tok) for tok in values[size_key].replace(",", " ").split())
        )
    if "k" in values:
        cfg = replace(cfg, k=int(values["k"]))
    if "mode" in values:
        cfg = replace(cfg, mode=SolverMode(values["mode"]))
    if "kind" in values:
        cfg = replace(cfg, kind=Kind(values["kind"]))
    if "nu_max" in values:
        cfg = replace(cfg, nu_max=int(values["nu_max"]))
    if "lambda_max" in values:
        cfg = replace(cfg, lambda_max=float(values["lambda_max"]))
    out_key = next((key for key in ("out_dir", "out") if key in values), None)
    if out_key is not None:
        cfg = replace(cfg, out_dir=Path(values[out_key]))
    if "seed" in values:
        cfg = replace(cfg, seed=int(values["seed"]))
    if "allow_subcritical" in values:
        cfg = replace(cfg, allow_subcritical=_parse_bool(values["allow_subcritical"]))
    if "write_vectors" in values:
        cfg = replace(cfg, write_vectors=_parse_bool(values["write_vectors"]))
    return cfg


# ---------------------------------------------------------------------------
# invariant suites (the `verify` subcommand)


def _suite_neighborhood_symmetry() -> tuple[bool, str]:
    worst_pairs = 0
    worst_dist = 0.0
    for cloud, eps in (
        (sp.grid_interval(400), 0.05),
        (sp.grid_disc(41), 0.12),
    ):
        nbrs = sp.neighborhoods(cloud, eps)
        again = sp.neighborhoods(cloud, eps)
        if any(
            not np.array_equal(a, b) for a, b in zip(nbrs.neighbors, again.neighbors)
        ):
            return False, "neighborhood construction is not deterministic"
        for i, lst in enumerate(nbrs.neighbors):
            for j in lst:
                if i not in nbrs.neighbors[j]:
                    worst_pairs += 1
                d = float(np.linalg.norm(cloud.points[i] - cloud.points[j]))
                worst_dist = max(worst_dist, d)
        if worst_dist >= eps:
            return False, f"pair distance {worst_dist} >= eps {eps}"
    ok = worst_pairs == 0
    return ok, f"asymmetric pairs: {worst_pairs}, max pair distance below radius"


def _suite_row_stochastic() -> tuple[bool, str]:
    cloud = sp.grid_interval(600)
    wm = lm.build_w(cloud, 0.05)
    ones = np.ones(cloud.n)
    row_dev = float(np.max(np.abs(wm.w @ ones - 1.0)))
    kernel = float(np.max(np.abs(ones - wm.w @ ones)))
    ok = row_dev < 1e-10 and kernel < 1e-12
    return ok, f"max row-sum deviation {row_dev:.2e}, kernel action {kernel:.2e}"


def _suite_branch_continuity() -> tuple[bool, str]:
    eps = 0.05
    # Two-sided probe: h small enough that slope * 2h stays below the bar.
    h = 1e-14
    worst = 0.0
    for x in (eps, 1.0 - eps):
        lo, hi = cf.phi_interval(x - h, eps), cf.phi_interval(x + h, eps)
        worst = max(worst, abs(lo[0] - hi[0]), abs(lo[1] - hi[1]))
        worst = max(worst, abs(cf.p_interval(x - h, eps) - cf.p_interval(x + h, eps)))
    model = cf.build_model(Domain.DISC, eps)
    edge = 1.0 - eps  # disc layer meets the bulk branch at this radius
    worst = max(worst, abs(model.p(edge - h) - model.p(edge + h)))
    rng = np.random.default_rng(7)
    sym = 0.0
    for x in rng.uniform(0.0, 1.0, size=1000):
        a, b = cf.phi_interval(x, eps), cf.phi_interval(1.0 - x, eps)
        sym = max(sym, abs(a[1] - b[1]), abs(a[0] + b[0]))
    ok = worst < 1e-12 and sym < 1e-14
    return ok, f"max branch gap {worst:.2e}, interval symmetry defect {sym:.2e}"


def _suite_jets() -> tuple[bool, str]:
    eps = 0.05
    order = 16
    center = 0.4 * eps
    j0, _, _, j22, _, _ = cf._sigma_jets(center, order, eps)
    prod = j0 * j22
    # Product jet vs the pointwise product of the scalar moment functions,
    # sampled well inside the convergence radius (singularity at t = eps).
    rel = 0.0
    for dx in (-0.04 * eps, -0.01 * eps, 0.02 * eps, 0.05 * eps):
        vals = cf.sigma(center + dx, eps)
        exact = vals[0] * vals[3]
        rel = max(rel, abs(prod.eval(dx) - exact) / abs(exact))
    # First jet coefficient vs a central finite difference of the function.
    h = 1e-6
    fd = (cf.sigma(center + h, eps)[0] - cf.sigma(center - h, eps)[0]) / (2.0 * h)
    fd_rel = abs(j0.coef[1] - fd) / abs(fd)
    ok = rel < 1e-12 and fd_rel < 1e-7
    return ok, f"jet product defect {rel:.2e}, derivative vs finite difference {fd_rel:.2e}"


def _suite_bessel_recurrence() -> tuple[bool, str]:
    worst = 0.0
    xs = np.linspace(0.1, 50.0, 120)
    for nu in range(1, 21):
        lhs = mt.bessel_j(nu - 1, xs) + mt.bessel_j(nu + 1, xs)
        rhs = (2.0 * nu / xs) * mt.bessel_j(nu, xs)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    ok = worst < 1e-11
    return ok, f"max recurrence residual {worst:.2e}"


def _suite_indicial_roots() -> tuple[bool, str]:
    worst = 0.0
    for lam in (1.0, 10.0):
        prob = fr.interval_problem(0.05, lam)
        for alpha in fr.indicial_roots(prob):
            worst = max(worst, abs(fr.indicial_polynomial(prob, alpha)))
        probd = fr.disc_problem(0.05, lam, 1)
        for alpha in fr.indicial_roots(probd):
            worst = max(worst, abs(fr.indicial_polynomial(probd, alpha)))
    ok = worst < 1e-12
    return ok, f"max indicial residual {worst:.2e}"


VERIFY_SUITES = (
    ("neighborhood-symmetry", _suite_neighborhood_symmetry),
    ("row-stochastic", _suite_row_stochastic),
    ("branch-continuity", _suite_branch_continuity),
    ("jet-arithmetic", _suite_jets),
    ("bessel-recurrence", _suite_bessel_recurrence),
    ("indicial-roots", _suite_indicial_roots),
)


def run_verify() -> list[tuple[str, bool, str]]:
    """Run every structural invariant suite; (name, passed, detail) rows."""
    results = []
    for name, fn in VERIFY_SUITES:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed suite counts as a failure
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
