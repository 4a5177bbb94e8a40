"""Frobenius series solutions of the degenerate ODEs about x0 and r0.

Local coordinate X measures distance to the degeneracy (X = x - x0 on the
interval; X = t - r0 on the disc, with t = 1 - r the distance to the rim).
The equation in local form is

    A(X) u'' + B(X) u' - nu^2 D(X) u = lambda u,

with A vanishing linearly at X = 0. The indicial polynomial
P(alpha) = a1 alpha (alpha - 1) + b0 alpha has roots 0 (Neumann branch,
analytic) and alpha2 = 1 - b0/a1 (Dirichlet branch, non-smooth). Coefficients
follow the recurrence obtained by matching powers of X; the Dirichlet branch
is rescaled so its quasi-derivative p u' tends to 1 at the degenerate point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from . import coefficients as cf
from .sampling import Domain

# Series evaluation is trusted out to GUARD * (distance to the nearest
# coefficient singularity). Continuation hands off to the ODE integrator at a
# much smaller radius so a 12-term truncation is already at ~1e-10 there.
GUARD_FRACTION = 0.95
HANDOFF_FRACTION = 0.15
MAX_TRUNCATION = 30


class Kind(str, Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


class ResonanceError(RuntimeError):
    """Indicial roots differ by (nearly) an integer; outside the regime."""


class DivergenceRiskError(RuntimeError):
    """Series evaluation requested outside the convergence guard."""


@dataclass(frozen=True)
class FrobeniusProblem:
    domain: Domain
    eps: float
    lam: float
    nu: int
    center: float
    a: np.ndarray  # a[j], j >= 1 used; a[0] = 0
    b: np.ndarray
    d: np.ndarray | None
    model: cf.CoefficientModel

    @property
    def a1(self) -> float:
        return float(self.a[1])

    @property
    def b0(self) -> float:
        return float(self.b[0])

    def singularity_distance(self) -> float:
        if self.domain is Domain.INTERVAL:
            return self.center + self.eps  # drift pole at x = -eps
        return self.eps - self.center  # branch point of the overlap areas at t = eps

    @property
    def guard_radius(self) -> float:
        return GUARD_FRACTION * self.singularity_distance()

    @property
    def handoff_radius(self) -> float:
        return HANDOFF_FRACTION * self.singularity_distance()


def interval_drift_coefficients(eps: float, count: int) -> np.ndarray:
    """Closed-form Taylor coefficients of the drift phi1 about x0."""
    j = np.arange(count, dtype=float)
    return (
        6.0
        * (-1.0) ** (j + 1)
        * eps**-j
        * (j * j + cf.SQRT3 * j + cf.SQRT3 - 1.0)
        / (3.0 - cf.SQRT3) ** (j + 3)
    )


def interval_problem(
    eps: float,
    lam: float,
    nmax: int = MAX_TRUNCATION,
    eps_cap: float = cf.EPS_MAX,
) -> FrobeniusProblem:
    model = cf.build_model(Domain.INTERVAL, eps, eps_cap=eps_cap)
    a = np.zeros(nmax + 2)
    a[1] = -1.0 / (math.sqrt(12.0) * eps)
    a[2] = 1.0 / (12.0 * eps**2)
    b = interval_drift_coefficients(eps, nmax + 1)
    return FrobeniusProblem(
        domain=Domain.INTERVAL,
        eps=eps,
        lam=lam,
        nu=0,
        center=model.x0,
        a=a,
        b=b,
        d=None,
        model=model,
    )


def disc_problem(
    eps: float,
    lam: float,
    nu: int,
    nmax: int = MAX_TRUNCATION,
    eps_cap: float = cf.EPS_MAX,
) -> FrobeniusProblem:
    if nu < 0:
        raise ValueError(f"angular mode must be >= 0, got {nu}")
    model = cf.build_model(
        Domain.DISC, eps, jet_order=MAX_TRUNCATION + 1, eps_cap=eps_cap
    )
    phi11 = model.jets["phi11"]
    phi22 = model.jets["phi22"]
    phi2 = model.jets["phi2"]
    from .jets import Jet

    one_minus_t = 1.0 - Jet.variable(model.r0, phi22.order)
    a = phi22.coef.copy()
    a[0] = 0.0  # the root of phi22 is the expansion center
    drift = phi11 / one_minus_t + phi2
    b = -drift.coef
    d = (phi11 / (one_minus_t * one_minus_t)).coef
    return FrobeniusProblem(
        domain=Domain.DISC,
        eps=eps,
        lam=lam,
        nu=nu,
        center=model.r0,
        a=a[: nmax + 2],
        b=b[: nmax + 1],
        d=d[: nmax + 1],
        model=model,
    )


def indicial_polynomial(problem: FrobeniusProblem, alpha: float) -> float:
    return problem.a1 * alpha * (alpha - 1.0) + problem.b0 * alpha


def indicial_roots(problem: FrobeniusProblem) -> tuple[float, float]:
    alpha2 = 1.0 - problem.b0 / problem.a1
    if abs(alpha2 - round(alpha2)) < 1e-8:
        raise ResonanceError(f"indicial roots 0 and {alpha2} differ by nearly an integer")
    return 0.0, alpha2


def series_coefficients(problem: FrobeniusProblem, alpha: float, J: int) -> np.ndarray:
    """Coefficients c_0..c_J of the Frobenius branch with exponent alpha."""
    if problem.domain is Domain.INTERVAL:
        return _coeffs_interval(problem, alpha, J)
    return _coeffs_general(problem, alpha, J)


def _coeffs_interval(problem: FrobeniusProblem, alpha: float, J: int) -> np.ndarray:
    """Specialized recurrence for a quadratic leading coefficient (a1, a2 only)."""
    a1, a2 = problem.a[1], problem.a[2]
    b = problem.b
    lam = problem.lam
    c = np.zeros(J + 1)
    c[0] = 1.0
    for j in range(1, J + 1):
        p = a1 * (alpha + j) * (alpha + j - 1.0) + b[0] * (alpha + j)
        if p == 0.0:
            raise ResonanceError(f"indicial polynomial vanishes at alpha + {j}")
        acc = (lam - a2 * (alpha + j - 1.0) * (alpha + j - 2.0)) * c[j - 1]
        for k in range(j):
            acc -= c[k] * (k + alpha) * b[j - k]
        c[j] = acc / p
    return c


def _coeffs_general(problem: FrobeniusProblem, alpha: float, J: int) -> np.ndarray:
    """Full recurrence with arbitrary a_j series and the angular nu^2 term."""
    a, b, d = problem.a, problem.b, problem.d
    lam, nu2 = problem.lam, float(problem.nu) ** 2
    c = np.zeros(J + 1)
    c[0] = 1.0
    for m in range(1, J + 1):
        p = a[1] * (alpha + m) * (alpha + m - 1.0) + b[0] * (alpha + m)
        if p == 0.0:
            raise ResonanceError(f"indicial polynomial vanishes at alpha + {m}")
        acc = lam * c[m - 1]
        for k in range(m):
            ka = k + alpha
            term = ka * (ka - 1.0) * a[m - k + 1] + ka * b[m - k]
            if d is not None:
                term -= nu2 * d[m - 1 - k]
            acc -= c[k] * term
        c[m] = acc / p
    return c


@dataclass
class FrobeniusSolution:
    problem: FrobeniusProblem
    alpha: float
    kind: Kind
    c: np.ndarray
    scale: float
    J: int
    _continuations: dict = field(default_factory=dict, repr=False)

    @property
    def center(self) -> float:
        return self.problem.center


def dirichlet_scale(problem: FrobeniusProblem, alpha2: float) -> float:
    """Rescaling that sends the quasi-derivative p u' to 1 at the center."""
    model = problem.model
    if problem.domain is Domain.INTERVAL:
        return 1.0 / (model.p_leading * alpha2)
    # On the disc u' is a derivative in r = 1 - t, flipping the sign.
    return -1.0 / (cf.disc_p_leading(model) * alpha2)


def solve(
    problem: FrobeniusProblem,
    kind: Kind,
    J: int = 12,
    auto_increase: bool = True,
) -> FrobeniusSolution:
    """Branch solution with truncation J, optionally grown until the value at
    the series handoff point is stable to 1e-10 relative (J <= 30)."""
    if not 0 <= J <= MAX_TRUNCATION:
        raise ValueError(f"truncation must be in [0, {MAX_TRUNCATION}], got {J}")
    roots = indicial_roots(problem)
    alpha = roots[0] if kind is Kind.NEUMANN else roots[1]
    scale = 1.0 if kind is Kind.NEUMANN else dirichlet_scale(problem, roots[1])
    if not auto_increase:
        c = series_coefficients(problem, alpha, J)
        return FrobeniusSolution(problem, alpha, kind, c, scale, J)
    c_full = series_coefficients(problem, alpha, MAX_TRUNCATION)
    edge = problem.handoff_radius
    terms = c_full * edge ** np.arange(MAX_TRUNCATION + 1)
    partials = np.cumsum(terms)
    total = partials[-1]
    # Near a secular root the edge value itself can vanish; keep the stability
    # test relative to the series scale, not the (tiny) sum.
    scale_ref = max(abs(total), 1e-3 * float(np.max(np.abs(terms))), 1e-30)
    j_use = MAX_TRUNCATION
    for jj in range(J, MAX_TRUNCATION):
        if abs(total - partials[jj]) < 1e-10 * scale_ref:
            j_use = jj
            break
    return FrobeniusSolution(problem, alpha, kind, c_full[: j_use + 1], scale, j_use)


def _series_raw(sol: FrobeniusSolution, X: float, deriv: int) -> float:
    """Unscaled series value or derivative at offset X from the center."""
    alpha = sol.alpha
    c = sol.c
    j = np.arange(len(c), dtype=float)
    if alpha == 0.0:
        if deriv == 0:
            return float(np.polynomial.polynomial.polyval(X, c))
        coef = c.copy()
        for n in range(deriv):
            coef = coef[1:] * np.arange(1, len(coef))
        return float(np.polynomial.polynomial.polyval(X, coef))
    if X < 0.0:
        raise DivergenceRiskError("singular branch only defined toward the elliptic side")
    powers = j + alpha
    factor = np.ones_like(powers)
    for n in range(deriv):
        factor = factor * (powers - n)
    expo = powers - deriv
    if X == 0.0:
        if deriv == 0:
            return 0.0
        raise cf.SingularPointError("derivative of the singular branch at the center")
    return float(np.sum(c * factor * X**expo))


def _continuation(sol: FrobeniusSolution, side: int):
    """Dense-output ODE continuation beyond the series handoff radius.

    Uses the exact coefficient functions, so its accuracy is set by the
    integrator tolerance, not the series truncation.
    """
    key = side
    if key in sol._continuations:
        return sol._continuations[key]
    prob = sol.problem
    eps, lam, nu2 = prob.eps, prob.lam, float(prob.nu) ** 2
    x_start = prob.center + side * prob.handoff_radius
    x_end = eps if side > 0 else 0.0

    if prob.domain is Domain.INTERVAL:

        def rhs(x, y):
            phi1x, phi2x = cf.phi_interval(x, eps)
            u, du = y
            return [du, (lam * u - phi1x * du) / phi2x]

    else:

        def rhs(t, y):
            phi11, phi22, phi2 = cf.phi_disc(t, eps)
            bb = -(phi11 / (1.0 - t) + phi2)
            dd = phi11 / (1.0 - t) ** 2
            v, dv = y
            return [dv, (lam * v + nu2 * dd * v - bb * dv) / phi22]

    y0 = [
        _series_raw(sol, x_start - prob.center, 0),
        _series_raw(sol, x_start - prob.center, 1),
    ]
    out = solve_ivp(
        rhs,
        (x_start, x_end),
        y0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    if not out.success:  # pragma: no cover
        raise RuntimeError(f"series continuation failed: {out.message}")
    sol._continuations[key] = out
    return out


def eval_series(
    sol: FrobeniusSolution, x: float, deriv: int = 0, allow_continuation: bool = True
) -> float:
    """Scaled branch value/derivative at the absolute coordinate x.

    x is the interval coordinate, or the boundary distance t on the disc; the
    local layer is [0, eps] either way. Past the handoff radius the value comes
    from the cached high-order ODE continuation (unless disabled, in which case
    the raw series is used out to the guard radius).
    """
    prob = sol.problem
    X = x - prob.center
    if abs(X) <= prob.handoff_radius:
        return sol.scale * _series_raw(sol, X, deriv)
    if not allow_continuation:
        if abs(X) <= prob.guard_radius:
            return sol.scale * _series_raw(sol, X, deriv)
        raise DivergenceRiskError(
            f"offset {X:.3e} outside the convergence guard {prob.guard_radius:.3e}"
        )
    if sol.kind is Kind.DIRICHLET and X < 0.0:
        raise DivergenceRiskError("singular branch only defined toward the elliptic side")
    if not 0.0 <= x <= prob.eps + 1e-15:
        raise ValueError(f"coordinate {x} outside the local layer [0, eps]")
    cont = _continuation(sol, 1 if X > 0 else -1)
    v, dv = cont.sol(min(max(x, 0.0), prob.eps))
    if deriv == 0:
        return sol.scale * float(v)
    if deriv == 1:
        return sol.scale * float(dv)
    # higher derivatives recovered from the ODE itself
    eps, lam, nu2 = prob.eps, prob.lam, float(prob.nu) ** 2
    if prob.domain is Domain.INTERVAL:
        phi1x, phi2x = cf.phi_interval(x, eps)
        d2 = (lam * v - phi1x * dv) / phi2x
        if deriv == 2:
            return sol.scale * float(d2)
        if deriv == 3:
            dphi1, dphi2 = cf.phi_interval_prime(x, eps)
            return sol.scale * float(
                (lam * dv - dphi1 * dv - (phi1x + dphi2) * d2) / phi2x
            )
        raise ValueError("continuation provides derivatives up to order 3 only")
    if deriv > 2:
        raise ValueError("continuation provides derivatives up to order 2 only")
    phi11, phi22, phi2 = cf.phi_disc(x, eps)
    bb = -(phi11 / (1.0 - x) + phi2)
    dd = phi11 / (1.0 - x) ** 2
    return sol.scale * float((lam * v + nu2 * dd * v - bb * dv) / phi22)


def quasi_derivative(sol: FrobeniusSolution, x: float) -> float:
    """p times the first derivative, in the natural outward variable.

    Interval: p(x) u'(x). Disc: p(r) du/dr at r = 1 - t (note du/dr = -dv/dt).
    """
    prob = sol.problem
    if prob.domain is Domain.INTERVAL:
        return cf.p_interval(x, prob.eps) * eval_series(sol, x, deriv=1)
    return -prob.model.p_t(x) * eval_series(sol, x, deriv=1)
