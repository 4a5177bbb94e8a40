"""Analytic spectrum of the degenerate limit operator by branch matching.

Eigenfunctions are assembled from the Frobenius branches in the boundary
layers and elementary solutions in the flat bulk (trigonometric on the
interval, Bessel on the disc). Requiring a C^1 match across the layer edge
yields a transcendental secular equation per eigenvalue; roots are bracketed
on a uniform grid in s = sqrt(c * lambda) and polished with brentq.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv, roots_jacobi

from . import coefficients as cf
from . import frobenius as fr
from .frobenius import Kind
from .sampling import Domain

SCAN_STEP = 0.02  # grid step in s = sqrt(c * lambda) used for bracketing
DEDUP_TOL = 1e-9  # roots closer than this (in lambda) are the same eigenvalue
KERNEL_TOL = 1e-12  # scan roots below this are artifacts of the s = 0 zero
NULL_NORM_TOL = 1e-8  # eigenfunction norms below this mark spurious roots

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(32)


class RootScanWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# elementary bulk solutions


def bessel_j(nu: int, x, deriv: int = 0):
    """Bessel J_nu or its first derivative via the two-term recurrence."""
    if deriv == 0:
        return jv(nu, x)
    if deriv == 1:
        if nu == 0:
            return -jv(1, x)
        return 0.5 * (jv(nu - 1, x) - jv(nu + 1, x))
    raise ValueError("bessel_j supports deriv in {0, 1}")


# ---------------------------------------------------------------------------
# quadrature helpers


def _vectorize(g):
    """Vectorized wrapper for scalar evaluators."""

    def wrapped(x):
        arr = np.asarray(x, dtype=float)
        flat = arr.reshape(-1)
        vals = np.empty_like(flat)
        for i, v in enumerate(flat):
            vals[i] = g(float(v))
        return vals.reshape(arr.shape)

    return wrapped


def _gauss_panel(f, a: float, b: float) -> float:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.sum(_GAUSS_WEIGHTS * f(mid + half * _GAUSS_NODES)))


def _gauss_composite(f, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    return sum(_gauss_panel(f, edges[i], edges[i + 1]) for i in range(panels))


_JACOBI_CACHE: dict[tuple[float, int], tuple[np.ndarray, np.ndarray]] = {}


def _jacobi_rule(beta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    key = (beta, n)
    if key not in _JACOBI_CACHE:
        _JACOBI_CACHE[key] = roots_jacobi(n, 0.0, beta)
    return _JACOBI_CACHE[key]


def _layer_integral(integrand, span: float, beta: float, n: int = 48) -> float:
    """Integral over (0, span) of integrand(delta) ~ delta^beta * analytic.

    delta measures distance from the degenerate endpoint into the layer.
    The algebraic factor is divided out at the nodes and restored through the
    Gauss-Jacobi weight (1 + x)^beta, so the rule carries the full mass of
    the singular factor analytically. That matters: for beta = zeta - 1 the
    mass below one ulp of the endpoint is ~1e-5 of the total, invisible to
    any quadrature that samples the integrand in the original variable.
    """
    nodes, weights = _jacobi_rule(beta, n)
    half = 0.5 * span
    total = 0.0
    for x, w in zip(nodes, weights):
        d = half * (1.0 + float(x))
        total += float(w) * integrand(d) * d**-beta
    return half ** (beta + 1.0) * total


def _dirichlet_shift(kind: Kind, exponent: float) -> float:
    # the Dirichlet branch vanishes like delta^(1 - exponent) at the
    # degenerate point; each such factor shifts the integrand's exponent
    return 1.0 - exponent if kind is Kind.DIRICHLET else 0.0


# ---------------------------------------------------------------------------
# secular equations


def est1_residual(lam) -> float | np.ndarray:
    """Small-eps limit of the interval secular equation (per unit lambda)."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0):
        raise ValueError("negative eigenvalue in est1_residual")
    omega = np.sqrt(6.0 * lam)
    out = np.sin(omega) * ((21.0 - 12.0 * cf.SQRT3) * lam - 6.0) + (
        2.0 * omega * (3.0 - 2.0 * cf.SQRT3) * np.cos(omega)
    )
    return float(out) if out.ndim == 0 else out


def _layer_edge_values(
    domain: Domain,
    eps: float,
    lam: float,
    nu: int,
    kind: Kind,
    J: int,
    auto_increase: bool,
    eps_cap: float = cf.EPS_MAX,
) -> tuple[float, float, fr.FrobeniusSolution]:
    if domain is Domain.INTERVAL:
        prob = fr.interval_problem(eps, lam, eps_cap=eps_cap)
    else:
        prob = fr.disc_problem(eps, lam, nu, eps_cap=eps_cap)
    sol = fr.solve(prob, kind, J=J, auto_increase=auto_increase)
    u = fr.eval_series(sol, eps)
    du = fr.eval_series(sol, eps, deriv=1)
    return u, du, sol


def secular_interval(
    lam: float,
    eps: float,
    kind: Kind = Kind.NEUMANN,
    J: int = 12,
    auto_increase: bool = True,
    eps_cap: float = cf.EPS_MAX,
) -> float:
    """Residual whose zeros are interval eigenvalues of the given kind.

    With layer edge values a = u(eps), b = u'(eps) and omega = sqrt(6 lambda),
    a mirror-symmetric C^1 match across the flat middle requires
    sin(omega (1 - 2 eps)) (b^2 - 6 lambda a^2) + 2 a b omega cos(...) = 0.
    """
    if lam < 0.0:
        raise ValueError("negative eigenvalue in secular_interval")
    a, b, _ = _layer_edge_values(
        Domain.INTERVAL, eps, lam, 0, kind, J, auto_increase, eps_cap
    )
    omega = math.sqrt(6.0 * lam)
    arg = omega * (1.0 - 2.0 * eps)
    return math.sin(arg) * (b * b - 6.0 * lam * a * a) + 2.0 * a * b * omega * math.cos(arg)


def secular_disc(
    lam: float,
    nu: int,
    eps: float,
    kind: Kind = Kind.NEUMANN,
    J: int = 12,
    auto_increase: bool = True,
    eps_cap: float = cf.EPS_MAX,
) -> float:
    """Residual for the disc: Bessel core against the layer branch at r = 1 - eps."""
    if lam < 0.0:
        raise ValueError("negative eigenvalue in secular_disc")
    v, dv, _ = _layer_edge_values(
        Domain.DISC, eps, lam, nu, kind, J, auto_increase, eps_cap
    )
    u_edge = v
    du_edge = -dv  # radial derivative; the layer variable is t = 1 - r
    k = math.sqrt(8.0 * lam)
    r_edge = 1.0 - eps
    return bessel_j(nu, k * r_edge) * du_edge - k * bessel_j(nu, k * r_edge, 1) * u_edge


# ---------------------------------------------------------------------------
# eigenpairs


@dataclass
class AnalyticEigenpair:
    """One eigenvalue with its assembled, w-normalized eigenfunction.

    u and du take the interval coordinate x in [0, 1], or the radius r in
    [0, 1] on the disc (radial profile; the angular factor is cos/sin(nu
    theta) per the phase tag). Dirichlet-kind eigenfunctions live on the
    elliptic core only and raise outside it.
    """

    domain: Domain
    eps: float
    kind: Kind
    nu: int
    phase: str  # "" on the interval; "cos" or "sin" on the disc
    lam: float
    diagnostics: dict = field(default_factory=dict)
    _eval: object = None
    _eval_t: object = None  # disc layer values addressed by boundary distance
    _model: object = None  # coefficient model the assembly was built on

    def u(self, x, deriv: int = 0):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([self._eval(float(xx), deriv) for xx in xs])
        return float(out[0]) if np.ndim(x) == 0 else out

    def du(self, x):
        return self.u(x, deriv=1)

    def layer_value(self, t: float, deriv: int = 0) -> float:
        """Disc layer profile by boundary distance t (exact near the circle)."""
        if self._eval_t is None:
            raise ValueError("layer_value is defined for disc eigenpairs only")
        return self._eval_t(t, deriv)

    @property
    def angular_factor(self) -> float:
        if self.domain is Domain.INTERVAL:
            return 1.0
        return 2.0 * math.pi if self.nu == 0 else math.pi


def _nullvector(mat: np.ndarray) -> tuple[np.ndarray, float]:
    _, sig, vt = np.linalg.svd(mat)
    ratio = float(sig[-1] / sig[0])
    vec = vt[-1]
    pivot = int(np.argmax(np.abs(vec)))
    if vec[pivot] < 0.0:
        vec = -vec
    return vec, ratio


# -- interval assembly -------------------------------------------------------


def _interval_matching_matrix(a: float, b: float, omega: float, eps: float) -> np.ndarray:
    # unknowns (gamma_left, A, B, gamma_right) with the bulk written as
    # A sin(omega (x - eps)) + B cos(...) and the right layer mirrored
    arg = omega * (1.0 - 2.0 * eps)
    s_, c_ = math.sin(arg), math.cos(arg)
    return np.array(
        [
            [a, 0.0, -1.0, 0.0],
            [b, -omega, 0.0, 0.0],
            [0.0, s_, c_, -a],
            [0.0, omega * c_, -omega * s_, b],
        ]
    )


def _assemble_interval(
    lam: float,
    eps: float,
    kind: Kind,
    J: int,
    auto_increase: bool,
    eps_cap: float = cf.EPS_MAX,
) -> AnalyticEigenpair | None:
    a, b, sol = _layer_edge_values(
        Domain.INTERVAL, eps, lam, 0, kind, J, auto_increase, eps_cap
    )
    omega = math.sqrt(6.0 * lam)
    mat = _interval_matching_matrix(a, b, omega, eps)
    vec, sig_ratio = _nullvector(mat)
    gl, amp_a, amp_b, gr = (float(v) for v in vec)
    x0 = sol.problem.model.x0

    def raw(x: float, deriv: int = 0) -> float:
        if kind is Kind.DIRICHLET and x < x0 - 1e-14:
            raise ValueError("Dirichlet-kind eigenfunction lives on the elliptic core")
        if x < eps:
            return gl * fr.eval_series(sol, x, deriv)
        if x > 1.0 - eps:
            val = gr * fr.eval_series(sol, 1.0 - x, deriv)
            return val if deriv % 2 == 0 else -val
        ph = omega * (x - eps)
        if deriv == 0:
            return amp_a * math.sin(ph) + amp_b * math.cos(ph)
        if deriv == 1:
            return omega * (amp_a * math.cos(ph) - amp_b * math.sin(ph))
        if deriv == 2:
            return -omega * omega * (amp_a * math.sin(ph) + amp_b * math.cos(ph))
        raise ValueError("interval bulk evaluation supports deriv <= 2")

    span = eps - x0
    eta = sol.problem.model.eta
    beta_w = eta - 1.0 + 2.0 * _dirichlet_shift(kind, eta)
    wu2 = _vectorize(lambda x: cf.w_interval(x, eps) * raw(x) ** 2)
    norm2 = (
        _layer_integral(
            lambda d: cf.w_interval(x0 + d, eps) * raw(x0 + d) ** 2, span, beta_w
        )
        + _gauss_composite(wu2, eps, 1.0 - eps, 24)
        + _layer_integral(
            lambda d: cf.w_interval(1.0 - x0 - d, eps) * raw(1.0 - x0 - d) ** 2,
            span,
            beta_w,
        )
    )
    if not norm2 > NULL_NORM_TOL**2:
        return None
    scale = 1.0 / math.sqrt(norm2)
    mid = raw(0.5)
    if abs(mid) > 1e-10:
        if mid < 0.0:
            scale = -scale
    elif raw(0.5, 1) < 0.0:
        scale = -scale

    def evaluate(x: float, deriv: int = 0) -> float:
        return scale * raw(x, deriv)

    diag = {
        "sigma_ratio": sig_ratio,
        "c0_mismatch": abs(raw(eps - 1e-13) - raw(eps + 1e-13)),
        "c1_mismatch": abs(raw(eps - 1e-13, 1) - raw(eps + 1e-13, 1)),
        "mirror_ratio": abs(abs(gr) / abs(gl) - 1.0) if abs(gl) > 1e-12 else math.inf,
        "norm_before_scaling": math.sqrt(norm2),
    }
    return AnalyticEigenpair(
        domain=Domain.INTERVAL,
        eps=eps,
        kind=kind,
        nu=0,
        phase="",
        lam=lam,
        diagnostics=diag,
        _eval=evaluate,
        _model=sol.problem.model,
    )


# -- disc assembly -----------------------------------------------------------


def _assemble_disc(
    lam: float,
    nu: int,
    eps: float,
    kind: Kind,
    J: int,
    auto_increase: bool,
    eps_cap: float = cf.EPS_MAX,
) -> AnalyticEigenpair | None:
    v, dv, sol = _layer_edge_values(
        Domain.DISC, eps, lam, nu, kind, J, auto_increase, eps_cap
    )
    k = math.sqrt(8.0 * lam)
    r_edge = 1.0 - eps
    # match gamma_in * J_nu(k r) against the layer branch at r = 1 - eps;
    # the radial derivative of the layer value v(t) is -v'(t)
    mat = np.array(
        [
            [bessel_j(nu, k * r_edge), -v],
            [k * bessel_j(nu, k * r_edge, 1), dv],
        ]
    )
    vec, sig_ratio = _nullvector(mat)
    gi, go = (float(x) for x in vec)
    model = sol.problem.model
    r0 = model.r0

    def raw_t(t: float, deriv: int = 0) -> float:
        val = go * fr.eval_series(sol, t, deriv)
        return val if deriv % 2 == 0 else -val

    def raw(r: float, deriv: int = 0) -> float:
        if kind is Kind.DIRICHLET and r > 1.0 - r0 + 1e-14:
            raise ValueError("Dirichlet-kind eigenfunction lives on the elliptic core")
        if r <= r_edge:
            if deriv == 0:
                return gi * bessel_j(nu, k * r)
            if deriv == 1:
                return gi * k * bessel_j(nu, k * r, 1)
            raise ValueError("disc bulk evaluation supports deriv <= 1")
        return raw_t(1.0 - r, deriv)

    zeta = model.zeta
    beta_w = zeta - 1.0 + 2.0 * _dirichlet_shift(kind, zeta)
    wu2 = _vectorize(lambda r: model.w(r) * raw(r) ** 2)
    norm2 = _gauss_composite(wu2, 0.0, r_edge, 24) + _layer_integral(
        lambda d: model.w_t(r0 + d) * raw_t(r0 + d) ** 2, eps - r0, beta_w
    )
    norm2 *= 2.0 * math.pi if nu == 0 else math.pi
    if not norm2 > NULL_NORM_TOL**2:
        return None
    scale = 1.0 / math.sqrt(norm2)
    probe = raw(r_edge)
    if abs(probe) > 1e-10:
        if probe < 0.0:
            scale = -scale
    elif raw(r_edge, 1) < 0.0:
        scale = -scale

    def evaluate(r: float, deriv: int = 0) -> float:
        return scale * raw(r, deriv)

    def evaluate_t(t: float, deriv: int = 0) -> float:
        return scale * raw_t(t, deriv)

    diag = {
        "sigma_ratio": sig_ratio,
        "c0_mismatch": abs(raw(r_edge) - raw_t(eps)),
        "c1_mismatch": abs(raw(r_edge - 1e-13, 1) - raw_t(eps - 1e-13, 1)),
        "norm_before_scaling": math.sqrt(norm2),
    }
    return AnalyticEigenpair(
        domain=Domain.DISC,
        eps=eps,
        kind=kind,
        nu=nu,
        phase="cos",
        lam=lam,
        diagnostics=diag,
        _eval=evaluate,
        _eval_t=evaluate_t,
        _model=model,
    )


def assemble_eigenfunction(
    domain: Domain,
    eps: float,
    lam: float,
    nu: int = 0,
    kind: Kind = Kind.NEUMANN,
    J: int = 12,
    auto_increase: bool = True,
    eps_cap: float = cf.EPS_MAX,
) -> AnalyticEigenpair | None:
    """Assembled eigenfunction at an eigenvalue; None for a spurious root."""
    if domain is Domain.INTERVAL:
        return _assemble_interval(lam, eps, kind, J, auto_increase, eps_cap)
    return _assemble_disc(lam, nu, eps, kind, J, auto_increase, eps_cap)


# ---------------------------------------------------------------------------
# root scan


def _kernel_pair(
    domain: Domain, eps: float, eps_cap: float = cf.EPS_MAX
) -> AnalyticEigenpair:
    """The analytic lambda = 0 Neumann eigenfunction: a w-normalized constant."""
    if domain is Domain.INTERVAL:
        model = cf.build_model(Domain.INTERVAL, eps, eps_cap=eps_cap)
        x0 = model.x0
        span = eps - x0
        beta = model.eta - 1.0
        # bulk weight is -(1/6)/(-1/6) = 1, so the middle contributes its length
        mass = (
            _layer_integral(lambda d: cf.w_interval(x0 + d, eps), span, beta)
            + (1.0 - 2.0 * eps)
            + _layer_integral(lambda d: cf.w_interval(1.0 - x0 - d, eps), span, beta)
        )
        const = 1.0 / math.sqrt(mass)
        return AnalyticEigenpair(
            domain=Domain.INTERVAL,
            eps=eps,
            kind=Kind.NEUMANN,
            nu=0,
            phase="",
            lam=0.0,
            diagnostics={"kernel": True},
            _eval=lambda x, deriv=0: const if deriv == 0 else 0.0,
            _model=model,
        )
    model = cf.build_model(
        Domain.DISC, eps, jet_order=fr.MAX_TRUNCATION + 1, eps_cap=eps_cap
    )
    mass = 0.5 * (1.0 - eps) ** 2 + _layer_integral(
        lambda d: model.w_t(model.r0 + d), eps - model.r0, model.zeta - 1.0
    )
    mass *= 2.0 * math.pi
    const = 1.0 / math.sqrt(mass)
    return AnalyticEigenpair(
        domain=Domain.DISC,
        eps=eps,
        kind=Kind.NEUMANN,
        nu=0,
        phase="cos",
        lam=0.0,
        diagnostics={"kernel": True},
        _eval=lambda r, deriv=0: const if deriv == 0 else 0.0,
        _eval_t=lambda t, deriv=0: const if deriv == 0 else 0.0,
        _model=model,
    )


def _scan_channel(residual, lambda_max: float, c_scale: float) -> list[float]:
    """Bracket sign changes of residual(lambda) on a uniform grid in s."""
    s_max = math.sqrt(c_scale * lambda_max)
    n_steps = max(2, int(math.ceil(s_max / SCAN_STEP)))
    grid = np.linspace(SCAN_STEP, s_max, n_steps)
    lams = grid**2 / c_scale
    vals = np.array([residual(lam) for lam in lams])
    roots: list[float] = []
    for i in range(len(grid) - 1):
        va, vb = vals[i], vals[i + 1]
        if va == 0.0:
            roots.append(float(lams[i]))
            continue
        if va * vb < 0.0:
            s_root = brentq(
                lambda s: residual(s * s / c_scale), grid[i], grid[i + 1], xtol=1e-13
            )
            roots.append(s_root * s_root / c_scale)
    deduped: list[float] = []
    for lam in roots:
        if lam < KERNEL_TOL:
            continue
        if deduped and abs(lam - deduped[-1]) < DEDUP_TOL:
            continue
        deduped.append(lam)
    return deduped


def eigenvalue_roots(
    domain: Domain,
    eps: float,
    lambda_max: float,
    kind: Kind = Kind.NEUMANN,
    nu_max: int = 0,
    J: int = 12,
    auto_increase: bool = True,
    eps_cap: float = cf.EPS_MAX,
) -> list[tuple[float, int]]:
    """Secular roots as (lambda, nu), sorted, multiplicity expanded; no
    eigenfunction assembly. The Neumann kind includes the lambda = 0 kernel."""
    found: list[tuple[float, int]] = []
    if kind is Kind.NEUMANN:
        found.append((0.0, 0))
    if domain is Domain.INTERVAL:
        for lam in _scan_channel(
            lambda lam: secular_interval(lam, eps, kind, J, auto_increase, eps_cap),
            lambda_max,
            6.0,
        ):
            found.append((lam, 0))
    else:
        for nu in range(nu_max + 1):
            for lam in _scan_channel(
                lambda lam: secular_disc(lam, nu, eps, kind, J, auto_increase, eps_cap),
                lambda_max,
                8.0,
            ):
                found.extend([(lam, nu)] * (1 if nu == 0 else 2))
    found.sort()
    return found


def find_eigenvalues(
    domain: Domain,
    eps: float,
    lambda_max: float,
    kind: Kind = Kind.NEUMANN,
    nu_max: int = 0,
    count: int | None = None,
    J: int = 12,
    auto_increase: bool = True,
    eps_cap: float = cf.EPS_MAX,
) -> list[AnalyticEigenpair]:
    """All eigenpairs with lambda <= lambda_max, sorted by (lambda, nu, phase).

    On the disc every angular mode nu in [0, nu_max] is scanned; nu >= 1
    eigenvalues enter twice, tagged with cos/sin phases sharing one radial
    profile. The Neumann kind opens with the analytic kernel at lambda = 0.
    """
    pairs: list[AnalyticEigenpair] = []
    if kind is Kind.NEUMANN:
        pairs.append(_kernel_pair(domain, eps, eps_cap))
    if domain is Domain.INTERVAL:
        roots = _scan_channel(
            lambda lam: secular_interval(lam, eps, kind, J, auto_increase, eps_cap),
            lambda_max,
            6.0,
        )
        for lam in roots:
            pair = _assemble_interval(lam, eps, kind, J, auto_increase, eps_cap)
            if pair is not None:
                pairs.append(pair)
    else:
        for nu in range(nu_max + 1):
            roots = _scan_channel(
                lambda lam: secular_disc(lam, nu, eps, kind, J, auto_increase, eps_cap),
                lambda_max,
                8.0,
            )
            for lam in roots:
                pair = _assemble_disc(lam, nu, eps, kind, J, auto_increase, eps_cap)
                if pair is None:
                    continue
                pairs.append(pair)
                if nu >= 1:
                    pairs.append(replace(pair, phase="sin"))
    pairs.sort(key=lambda p: (p.lam, p.nu, p.phase))
    if count is not None and len(pairs) < count:
        warnings.warn(
            f"found {len(pairs)} eigenvalues <= {lambda_max}, wanted {count}; "
            "raise lambda_max or nu_max",
            RootScanWarning,
            stacklevel=2,
        )
    return pairs


# ---------------------------------------------------------------------------
# variational checks


def rayleigh_quotient(pair: AnalyticEigenpair) -> float:
    """Rayleigh quotient of the assembled eigenfunction over the elliptic core.

    Interval: int p u'^2 / int w u^2. Disc (radial form, the weight already
    carrying the Jacobian): (int p u'^2 - nu^2 int q u^2) / int w u^2 over
    (0, 1 - r0), with q < 0.
    """
    eps = pair.eps
    if pair.domain is Domain.INTERVAL:
        model = pair._model or cf.build_model(Domain.INTERVAL, eps)
        x0 = model.x0
        span = eps - x0
        eta = model.eta
        beta_w = eta - 1.0 + 2.0 * _dirichlet_shift(pair.kind, eta)
        # u' picks up delta^(alpha2 - 1) = delta^(-eta) on the Dirichlet branch
        beta_p = -eta if pair.kind is Kind.DIRICHLET else eta
        pdu2 = _vectorize(lambda x: cf.p_interval(x, eps) * pair.u(x, 1) ** 2)
        wu2 = _vectorize(lambda x: cf.w_interval(x, eps) * pair.u(x) ** 2)

        def split(mid, left, right, beta):
            return (
                _layer_integral(left, span, beta)
                + _gauss_composite(mid, eps, 1.0 - eps, 24)
                + _layer_integral(right, span, beta)
            )

        num = split(
            pdu2,
            lambda d: cf.p_interval(x0 + d, eps) * pair.u(x0 + d, 1) ** 2,
            lambda d: cf.p_interval(1.0 - x0 - d, eps) * pair.u(1.0 - x0 - d, 1) ** 2,
            beta_p,
        )
        den = split(
            wu2,
            lambda d: cf.w_interval(x0 + d, eps) * pair.u(x0 + d) ** 2,
            lambda d: cf.w_interval(1.0 - x0 - d, eps) * pair.u(1.0 - x0 - d) ** 2,
            beta_w,
        )
        return num / den
    model = pair._model or cf.build_model(Domain.DISC, eps, jet_order=fr.MAX_TRUNCATION + 1)
    r0 = model.r0
    r_edge = 1.0 - eps
    span = eps - r0
    nu2 = float(pair.nu) ** 2
    zeta = model.zeta
    beta_w = zeta - 1.0 + 2.0 * _dirichlet_shift(pair.kind, zeta)
    beta_p = -zeta if pair.kind is Kind.DIRICHLET else zeta
    pdu2 = _vectorize(lambda r: model.p(r) * pair.u(r, 1) ** 2)
    wu2 = _vectorize(lambda r: model.w(r) * pair.u(r) ** 2)
    num = _gauss_composite(pdu2, 0.0, r_edge, 24) + _layer_integral(
        lambda d: model.p_t(r0 + d) * pair.layer_value(r0 + d, 1) ** 2, span, beta_p
    )
    den = _gauss_composite(wu2, 0.0, r_edge, 24) + _layer_integral(
        lambda d: model.w_t(r0 + d) * pair.layer_value(r0 + d) ** 2, span, beta_w
    )
    if nu2 > 0.0:
        qu2 = _vectorize(lambda r: model.q(r) * pair.u(r) ** 2)
        num -= nu2 * (
            _gauss_composite(qu2, 0.0, r_edge, 24)
            + _layer_integral(
                lambda d: model.q_t(r0 + d) * pair.layer_value(r0 + d) ** 2,
                span,
                beta_w,
            )
        )
    return num / den


def _weighted_inner(a: AnalyticEigenpair, b: AnalyticEigenpair) -> float:
    eps = a.eps
    if a.domain is Domain.INTERVAL:
        model = a._model or cf.build_model(Domain.INTERVAL, eps)
        x0 = model.x0
        eta = model.eta
        beta = (
            eta
            - 1.0
            + _dirichlet_shift(a.kind, eta)
            + _dirichlet_shift(b.kind, eta)
        )
        f = _vectorize(lambda x: cf.w_interval(x, eps) * a.u(x) * b.u(x))
        return (
            _layer_integral(
                lambda d: cf.w_interval(x0 + d, eps) * a.u(x0 + d) * b.u(x0 + d),
                eps - x0,
                beta,
            )
            + _gauss_composite(f, eps, 1.0 - eps, 24)
            + _layer_integral(
                lambda d: cf.w_interval(1.0 - x0 - d, eps)
                * a.u(1.0 - x0 - d)
                * b.u(1.0 - x0 - d),
                eps - x0,
                beta,
            )
        )
    model = a._model or cf.build_model(Domain.DISC, eps, jet_order=fr.MAX_TRUNCATION + 1)
    r0 = model.r0
    zeta = model.zeta
    beta = (
        zeta - 1.0 + _dirichlet_shift(a.kind, zeta) + _dirichlet_shift(b.kind, zeta)
    )
    f = _vectorize(lambda r: model.w(r) * a.u(r) * b.u(r))
    radial = _gauss_composite(f, 0.0, 1.0 - eps, 24) + _layer_integral(
        lambda d: model.w_t(r0 + d) * a.layer_value(r0 + d) * b.layer_value(r0 + d),
        eps - r0,
        beta,
    )
    return radial * a.angular_factor


def gram_matrix(pairs: list[AnalyticEigenpair]) -> np.ndarray:
    """Weighted Gram matrix over the elliptic core, angular factors included.

    Disc pairs with different angular mode or phase are orthogonal by the
    angular integral alone; those entries are exact zeros with no quadrature.
    """
    n = len(pairs)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            a, b = pairs[i], pairs[j]
            if a.domain is Domain.DISC and (a.nu != b.nu or a.phase != b.phase):
                continue
            out[i, j] = out[j, i] = _weighted_inner(a, b)
    return out


# ---------------------------------------------------------------------------
# divergence demonstration for the clipped expansion


def appendix_divergence_demo(
    beta: float,
    j: int,
    k: int,
    eps: float,
    lam: float,
    deltas: tuple[float, ...] = (1e-3, 1e-4, 1e-5, 1e-6),
) -> dict:
    """Truncated moment integrals showing why the naive expansion diverges.

    f = sin(beta) u_dir + cos(beta) u_neu at the given lambda; the test
    function is (x - x0)^k times a smooth bump supported on the left layer.
    Returns the integrals I(delta) over (x0 + delta, eps) with the fitted
    log-log slope: a pure Neumann f gives a Cauchy sequence, while the
    singular branch with j = 3, k = 0 diverges at the predicted rate.
    """
    if not 0 <= j <= 3:
        raise ValueError("derivative order j must be in 0..3")
    if k < 0:
        raise ValueError("moment power k must be >= 0")
    prob = fr.interval_problem(eps, lam)
    sol_n = fr.solve(prob, Kind.NEUMANN, J=20, auto_increase=False)
    sol_d = fr.solve(prob, Kind.DIRICHLET, J=20, auto_increase=False)
    sb, cb = math.sin(beta), math.cos(beta)
    x0 = prob.center
    width = eps - x0

    def f_deriv(x: float, order: int) -> float:
        val = 0.0
        if abs(cb) > 0.0:
            val += cb * fr.eval_series(sol_n, x, order)
        if abs(sb) > 0.0:
            val += sb * fr.eval_series(sol_d, x, order)
        return val

    def integrand(x: float) -> float:
        z = (x - x0) / width
        bump = (x - x0) ** k * (1.0 - z * z) ** 4
        return cf.w_interval(x, eps) * bump * f_deriv(x, j) * f_deriv(x, 0)

    vec = _vectorize(integrand)
    integrals = []
    for delta in deltas:
        offsets = [delta]
        while 2.0 * offsets[-1] < width:
            offsets.append(2.0 * offsets[-1])
        offsets.append(width)
        total = 0.0
        for lo, hi in zip(offsets[:-1], offsets[1:]):
            total += _gauss_panel(vec, x0 + lo, x0 + hi)
        integrals.append(total)
    logs = np.log(np.abs(np.asarray(integrals)))
    logd = np.log(np.asarray(deltas))
    slope = float(np.polyfit(logd, logs, 1)[0])
    cauchy = max(
        abs(integrals[m + 1] - integrals[m]) for m in range(len(integrals) - 1)
    ) / max(abs(integrals[-1]), 1e-300)
    return {
        "deltas": tuple(float(d) for d in deltas),
        "integrals": tuple(float(v) for v in integrals),
        "slope": slope,
        "cauchy_gap": cauchy,
    }
