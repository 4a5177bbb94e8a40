"""Coefficient functions of the limiting operator on both domains.

Interval: second-order coefficient phi2 and drift phi1 are piecewise closed
forms in s = x/eps, constant in the bulk, mirrored at the right end. phi2
vanishes at x0 = (2 - sqrt(3)) eps where the operator degenerates to first
order. The integration factor g turns the operator into Sturm-Liouville form
with p = g / (6 g(eps)) in the left layer, p = 1/6 in the bulk, and weight
w = -p / phi2.

Disc: six moment functions sigma_* of s = t/eps (t the distance to the
boundary) combine into phi11, phi22, phi2. phi22 changes sign at a unique
t = r0 in (0, eps); the Sturm-Liouville factor p is an explicit power-law in
the distance to the degenerate circle r = 1 - r0 times the exponential of a
regularized integral Phi, with p(r) = r/8 and w = r outside the layer.

Everything scale-sensitive (g, p) is evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .jets import Jet
from .sampling import Domain

SQRT3 = math.sqrt(3.0)
X0_FACTOR = 2.0 - SQRT3  # x0 / eps on the interval
ETA_FACTOR = 4.0 + 2.0 * SQRT3  # singular exponent of p at x0, per unit eps
EPS_MAX = 0.1  # small-eps hypotheses are asserted at model build up to here

# Fraction of the e-series disc about the pole where the jet form of the
# regularized integrand replaces the (cancellation-prone) direct formula.
_POLE_JET_FRACTION = 0.3


class ModelError(RuntimeError):
    """A coefficient-model hypothesis failed at construction time."""


class SingularPointError(ZeroDivisionError):
    """Evaluation requested exactly at a singular point of w or q."""


# ---------------------------------------------------------------------------
# interval coefficients


def phi_interval(x, eps: float):
    """Pair (phi1, phi2) at x in [0, 1]; array friendly."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    phi1 = np.zeros_like(x)
    phi2 = np.full_like(x, -1.0 / 6.0)
    left = x < eps
    right = x > 1.0 - eps
    s = x[left] / eps
    phi2[left] = (1.0 - 4.0 * s + s * s) / 12.0
    phi1[left] = -6.0 * (1.0 - s) / (1.0 + s) ** 3
    s = (1.0 - x[right]) / eps
    phi2[right] = (1.0 - 4.0 * s + s * s) / 12.0
    phi1[right] = 6.0 * (1.0 - s) / (1.0 + s) ** 3
    if scalar:
        return float(phi1[0]), float(phi2[0])
    return phi1, phi2


def phi_interval_prime(x, eps: float):
    """First derivatives (phi1', phi2'); array friendly, piecewise like phi."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    dphi1 = np.zeros_like(x)
    dphi2 = np.zeros_like(x)
    left = x < eps
    right = x > 1.0 - eps
    s = x[left] / eps
    dphi2[left] = (s - 2.0) / (6.0 * eps)
    dphi1[left] = 12.0 * (2.0 - s) / (eps * (1.0 + s) ** 4)
    s = (1.0 - x[right]) / eps
    dphi2[right] = -(s - 2.0) / (6.0 * eps)
    dphi1[right] = 12.0 * (2.0 - s) / (eps * (1.0 + s) ** 4)
    if scalar:
        return float(dphi1[0]), float(dphi2[0])
    return dphi1, dphi2


def _log_g_left(x, eps: float):
    """(sign, log|g|) of the integration factor on [0, eps]."""
    x = np.asarray(x, dtype=float)
    x0 = X0_FACTOR * eps
    a_exp = ETA_FACTOR * eps
    b_exp = (4.0 - 2.0 * SQRT3) * eps
    dx = x - x0
    with np.errstate(divide="ignore"):
        logmag = (
            a_exp * np.log(np.abs(dx))
            + b_exp * np.log(4.0 * eps - x0 - x)
            - 8.0 * eps * np.log(x + eps)
            + 12.0 * eps**3 / (eps + x) ** 2
            + 12.0 * eps**2 / (eps + x)
        )
    return np.sign(dx), logmag


def _log_g_at_eps(eps: float) -> float:
    _, logmag = _log_g_left(np.asarray(eps), eps)
    return float(logmag)


def p_interval(x, eps: float):
    """Sturm-Liouville factor p; continuous, vanishing at x0 and 1 - x0."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.full_like(x, 1.0 / 6.0)
    log_norm = math.log(6.0) + _log_g_at_eps(eps)
    for mask, xx in ((x < eps, x), (x > 1.0 - eps, 1.0 - x)):
        if np.any(mask):
            sign, logmag = _log_g_left(xx[mask], eps)
            out[mask] = sign * np.exp(logmag - log_norm)
    if scalar:
        return float(out[0])
    return out


def w_interval(x, eps: float):
    """Weight w = -p / phi2; diverges at the degenerate points."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x0 = X0_FACTOR * eps
    if scalar and (abs(float(x) - x0) < 1e-300 or abs(float(x) - (1.0 - x0)) < 1e-300):
        raise SingularPointError(f"w is singular at the degenerate point x={float(x)}")
    _, phi2 = phi_interval(x, eps)
    return -p_interval(x, eps) / phi2


def sturm_liouville_interval(x, eps: float):
    return p_interval(x, eps), w_interval(x, eps)


def phi_interval_jets(center: float, order: int, eps: float) -> tuple[Jet, Jet]:
    """Jets of (phi1, phi2) about a center in the open left layer (0, eps)."""
    if not 0.0 < center < eps:
        raise ValueError("interval jets only defined inside the left layer")
    s = Jet.variable(center, order) / eps
    phi2 = (1.0 - 4.0 * s + s * s) / 12.0
    one_plus = 1.0 + s
    phi1 = (-6.0) * (1.0 - s) * (one_plus * one_plus * one_plus).reciprocal()
    return phi1, phi2


# ---------------------------------------------------------------------------
# disc coefficients


def sigma(t, eps: float):
    """Six truncated-ball moment functions of t >= 0; constant for t >= eps."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    s = np.minimum(t / eps, 1.0)
    c = np.sqrt(np.maximum(1.0 - s * s, 0.0))
    asn = np.arcsin(s)
    s0 = np.pi / 2.0 + s * c + asn
    s12 = -(2.0 / 3.0) * c**3
    s2 = np.pi / 8.0 + (s * c * (5.0 - 2.0 * s * s) + 3.0 * asn) / 12.0
    s22 = np.pi / 8.0 + (s * c * (2.0 * s * s - 1.0) + asn) / 4.0
    s3 = -(2.0 / 15.0) * c**5
    s32 = -(2.0 / 15.0) * (2.0 + 3.0 * s * s) * c**3
    out = (s0, s12, s2, s22, s3, s32)
    if scalar:
        return tuple(float(v[0]) for v in out)
    return out


def phi_disc(t, eps: float):
    """(phi11, phi22, phi2) at distance t from the boundary."""
    s0, s12, s2, s22, s3, s32 = sigma(t, eps)
    denom = s12 * s12 - s22 * s0
    if np.any(np.asarray(denom) == 0.0):  # pragma: no cover
        raise FloatingPointError("sigma denominator vanished")
    phi11 = 0.5 * (s22 * s2 - s3 * s12) / denom
    phi22 = 0.5 * (s22 * s22 - s32 * s12) / denom
    phi2 = s12 / denom
    return phi11, phi22, phi2


def _sigma_jets(center: float, order: int, eps: float):
    if not 0.0 <= center < eps:
        raise ValueError("sigma jets need a center in [0, eps)")
    s = Jet.variable(center, order) / eps
    c2 = 1.0 - s * s
    c = c2.sqrt()
    c3 = c2 * c
    asn = s.arcsin()
    s0 = math.pi / 2.0 + s * c + asn
    s12 = (-2.0 / 3.0) * c3
    s2 = math.pi / 8.0 + (s * c * (5.0 - 2.0 * s * s) + 3.0 * asn) / 12.0
    s22 = math.pi / 8.0 + (s * c * (2.0 * s * s - 1.0) + asn) / 4.0
    s3 = (-2.0 / 15.0) * c3 * c2
    s32 = (-2.0 / 15.0) * (2.0 + 3.0 * s * s) * c3
    return s0, s12, s2, s22, s3, s32


def phi_disc_jets(center: float, order: int, eps: float) -> tuple[Jet, Jet, Jet]:
    s0, s12, s2, s22, s3, s32 = _sigma_jets(center, order, eps)
    denom = (s12 * s12 - s22 * s0).reciprocal()
    phi11 = 0.5 * (s22 * s2 - s3 * s12) * denom
    phi22 = 0.5 * (s22 * s22 - s32 * s12) * denom
    phi2 = s12 * denom
    return phi11, phi22, phi2


@dataclass(frozen=True)
class TaylorJet:
    center: float
    order: int
    coefficients: np.ndarray


_DISC_SELECTORS = ("phi11", "phi22", "phi2", "drift", "angular")


def taylor_jet(selector: str, center: float, order: int, eps: float) -> TaylorJet:
    """Jet of a disc coefficient about a center in (0, eps).

    Selectors: 'phi11', 'phi22', 'phi2', 'drift' for phi11/(1-t) + phi2,
    'angular' for phi11/(1-t)^2.
    """
    if selector not in _DISC_SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; choose from {_DISC_SELECTORS}")
    if not 0.0 < center < eps:
        raise ValueError("jet center must lie in the open layer (0, eps)")
    if order > 30:
        raise ValueError("jet order capped at 30")
    phi11, phi22, phi2 = phi_disc_jets(center, order, eps)
    one_minus_t = 1.0 - Jet.variable(center, order)
    if selector == "phi11":
        out = phi11
    elif selector == "phi22":
        out = phi22
    elif selector == "phi2":
        out = phi2
    elif selector == "drift":
        out = phi11 / one_minus_t + phi2
    else:
        out = phi11 / (one_minus_t * one_minus_t)
    return TaylorJet(center=center, order=order, coefficients=out.coef.copy())


def find_r0(eps: float, eps_cap: float = EPS_MAX) -> tuple[float, float, float]:
    """Root r0 of phi22 in (0, eps), its t-derivative there, and the
    power-law exponent zeta of p at the degenerate circle r = 1 - r0."""
    if not 0.0 < eps <= eps_cap:
        raise ModelError(f"eps must lie in (0, {eps_cap}], got {eps}")
    return _find_r0(eps)


def _find_r0(eps: float) -> tuple[float, float, float]:
    def f(t):
        return phi_disc(t, eps)[1]

    lo, hi = 1e-12 * eps, eps * (1.0 - 1e-12)
    if not f(lo) > 0.0 > f(hi):
        raise ModelError("phi22 does not change sign on (0, eps)")
    r0 = brentq(f, lo, hi, xtol=1e-18, rtol=8.9e-16)
    # Newton polish with the jet derivative.
    for _ in range(4):
        jet = phi_disc_jets(r0, 2, eps)[1]
        val, der = jet.coef[0], jet.coef[1]
        if der == 0.0:  # pragma: no cover
            break
        step = val / der
        r0 -= step
        if abs(step) < 1e-18:
            break
    jet = phi_disc_jets(r0, 2, eps)[1]
    if abs(jet.coef[0]) > 1e-14:  # pragma: no cover
        raise ModelError(f"phi22 root refinement stalled at residual {jet.coef[0]:.3e}")
    a1 = float(jet.coef[1])
    phi11_r0, _, phi2_r0 = phi_disc(r0, eps)
    zeta = (phi11_r0 + (1.0 - r0) * phi2_r0) / ((1.0 - r0) * (-a1))
    return float(r0), a1, float(zeta)


# ---------------------------------------------------------------------------
# coefficient model


@dataclass(frozen=True)
class CoefficientModel:
    domain: Domain
    eps: float
    jet_order: int
    # interval fields
    x0: float = 0.0
    eta: float = 0.0  # singular exponent of p at the degenerate point
    p_leading: float = 0.0  # p ~ sign * p_leading * |distance|^eta
    # disc fields
    r0: float = 0.0
    a1: float = 0.0  # d(phi22)/dt at r0
    zeta: float = 0.0
    jets: dict = field(default_factory=dict)
    _phi_integral: object = None  # dense-output solution of Phi' = reg
    phi_at_star: float = 0.0
    _reg_poly: np.ndarray | None = None

    # -- Sturm-Liouville data ------------------------------------------------

    def p(self, x):
        if self.domain is Domain.INTERVAL:
            return p_interval(x, self.eps)
        return self._p_disc(x)

    def w(self, x):
        if self.domain is Domain.INTERVAL:
            return w_interval(x, self.eps)
        r = np.asarray(x, dtype=float)
        if r.ndim == 0 and abs(float(r) - (1.0 - self.r0)) < 1e-300:
            raise SingularPointError("w is singular at the degenerate circle")
        _, phi22, _ = phi_disc(1.0 - r, self.eps)
        return -self._p_disc(r) / phi22

    def q(self, r):
        if self.domain is not Domain.DISC:
            raise ValueError("q is defined for the disc only")
        r = np.asarray(r, dtype=float)
        if r.ndim == 0 and abs(float(r) - (1.0 - self.r0)) < 1e-300:
            raise SingularPointError("q is singular at the degenerate circle")
        phi11, phi22, _ = phi_disc(1.0 - r, self.eps)
        return -(self._p_disc(r) / r**2) * (phi11 / phi22)

    def sturm_liouville(self, x):
        if self.domain is Domain.INTERVAL:
            return self.p(x), self.w(x)
        return self.p(x), self.q(x), self.w(x)

    # -- disc internals ------------------------------------------------------

    def _reg_integrand(self, s: float) -> float:
        """Pole-subtracted log-derivative of p, smooth across s = 1 - r0."""
        star = 1.0 - self.r0
        dx = s - star
        if abs(dx) < _POLE_JET_FRACTION * self.r0:
            return float(np.polynomial.polynomial.polyval(dx, self._reg_poly))
        t = 1.0 - s
        phi11, phi22, phi2 = phi_disc(t, self.eps)
        return (phi11 + s * phi2) / (s * phi22) - self.zeta / dx

    def _phi_from_offset(self, dx):
        """Phi at r = (1 - r0) + dx, branch-selected by the signed offset.

        Near the degenerate circle the dense ODE output is replaced by the
        exact antiderivative of the jet polynomial, anchored at Phi(1 - r0),
        so p stays consistent with its leading constant to machine precision.
        Taking the offset directly avoids the cancellation in forming r - star.
        """
        dx = np.atleast_1d(np.asarray(dx, dtype=float))
        near = np.abs(dx) < _POLE_JET_FRACTION * self.r0
        out = np.empty_like(dx)
        if np.any(~near):
            out[~near] = self._phi_integral.sol((1.0 - self.r0) + dx[~near])[0]
        if np.any(near):
            anti = self._reg_poly / np.arange(1.0, len(self._reg_poly) + 1.0)
            out[near] = self.phi_at_star + dx[near] * np.polynomial.polynomial.polyval(
                dx[near], anti
            )
        return out

    def phi_integral(self, r):
        """Phi(r): integral of the regularized integrand from 1 - eps to r."""
        r = np.asarray(r, dtype=float)
        out = self._phi_from_offset(r - (1.0 - self.r0))
        return float(out[0]) if r.ndim == 0 else out

    def _p_layer_offset(self, dt):
        """p at boundary distance t = r0 + dt inside the layer, dt exact."""
        dt = np.asarray(dt, dtype=float)
        base = np.abs(dt) / (self.eps - self.r0)
        with np.errstate(divide="ignore"):
            mag = np.exp(self.zeta * np.log(base) + self._phi_from_offset(-dt))
        return 0.125 * (1.0 - self.eps) * np.sign(dt) * mag

    def _p_disc(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = r / 8.0
        layer = r > 1.0 - self.eps
        if np.any(layer):
            out[layer] = self._p_layer_offset((1.0 - r[layer]) - self.r0)
        if scalar:
            return float(out[0])
        return out

    # -- t-parametrized Sturm-Liouville data (disc) --------------------------
    #
    # Quadrature and quasi-derivatives work at boundary distances t = r0 + dt
    # with dt down to 1e-14; these entry points keep dt exact instead of
    # routing through r = 1 - t, which would destroy it in double precision.

    def p_t(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = (1.0 - t) / 8.0
        layer = t < self.eps
        if np.any(layer):
            out[layer] = self._p_layer_offset(t[layer] - self.r0)
        if scalar:
            return float(out[0])
        return out

    def w_t(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0 and abs(float(t_arr) - self.r0) < 1e-300:
            raise SingularPointError("w is singular at the degenerate circle")
        _, phi22, _ = phi_disc(t_arr, self.eps)
        return -self.p_t(t_arr) / phi22

    def q_t(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0 and abs(float(t_arr) - self.r0) < 1e-300:
            raise SingularPointError("q is singular at the degenerate circle")
        phi11, phi22, _ = phi_disc(t_arr, self.eps)
        return -(self.p_t(t_arr) / (1.0 - t_arr) ** 2) * (phi11 / phi22)


def _build_interval_model(eps: float, jet_order: int) -> CoefficientModel:
    x0 = X0_FACTOR * eps
    eta = ETA_FACTOR * eps
    phi1_x0, phi2_x0 = phi_interval(x0, eps)
    if abs(phi2_x0) > 1e-15:
        raise ModelError(f"phi2 does not vanish at x0: {phi2_x0:.3e}")
    if phi1_x0 >= 0.0:
        raise ModelError("phi1 must be negative at x0")
    if eta >= 1.0:
        raise ModelError(f"singular exponent {eta} >= 1; eps too large")
    # leading constant of p at x0: everything in log g except the |x - x0| power
    b_exp = (4.0 - 2.0 * SQRT3) * eps
    log_rest = (
        b_exp * math.log(2.0 * SQRT3 * eps)
        - 8.0 * eps * math.log((3.0 - SQRT3) * eps)
        + 12.0 * eps**3 / ((3.0 - SQRT3) * eps) ** 2
        + 12.0 * eps**2 / ((3.0 - SQRT3) * eps)
    )
    p_leading = math.exp(log_rest - math.log(6.0) - _log_g_at_eps(eps))
    # branch continuity sanity
    for xa, xb in ((eps * (1 - 1e-12), eps * (1 + 1e-12)),):
        pa, pb = p_interval(xa, eps), p_interval(xb, eps)
        if abs(pa - pb) > 1e-12:
            raise ModelError(f"p discontinuous at the layer edge: {pa} vs {pb}")
    return CoefficientModel(
        domain=Domain.INTERVAL,
        eps=eps,
        jet_order=jet_order,
        x0=x0,
        eta=eta,
        p_leading=p_leading,
    )


def _build_disc_model(eps: float, jet_order: int) -> CoefficientModel:
    r0, a1, zeta = _find_r0(eps)
    if a1 >= 0.0:
        raise ModelError("phi22 must cross zero downward at r0")
    if not 0.0 < zeta < 1.0:
        raise ModelError(f"p exponent zeta={zeta} outside (0, 1); eps too large")
    phi11_j, phi22_j, phi2_j = phi_disc_jets(r0, jet_order, eps)
    grid = np.linspace(0.0, eps, 101)
    phi11_g, _, phi2_g = phi_disc(grid, eps)
    if np.any(phi11_g >= 0.0):
        raise ModelError("phi11 must be negative on [0, eps]")
    if np.any(phi2_g < -1e-14):
        raise ModelError("phi2 must be nonnegative on [0, eps]")

    # e-series of the regularized integrand about the pole s = 1 - r0.
    one_minus_t = 1.0 - Jet.variable(r0, jet_order)
    num_t = phi11_j + one_minus_t * phi2_j
    den_t = one_minus_t * phi22_j
    flip = (-1.0) ** np.arange(jet_order + 1)
    num_s = Jet(num_t.coef * flip, jet_order)
    den_coef = den_t.coef * flip
    if abs(den_coef[0]) > 1e-13 * max(1.0, np.abs(den_coef).max()):
        raise ModelError("denominator jet does not vanish at the pole")
    den_coef[0] = 0.0
    den_hat = Jet(den_coef, jet_order).shift_down(1)
    quotient = num_s / den_hat
    if abs(quotient.coef[0] - zeta) > 1e-10 * max(1.0, abs(zeta)):
        raise ModelError(
            f"pole residue mismatch: jet gives {quotient.coef[0]}, formula gives {zeta}"
        )
    reg_poly = quotient.coef[1:].copy()

    partial = CoefficientModel(
        domain=Domain.DISC,
        eps=eps,
        jet_order=jet_order,
        r0=r0,
        a1=a1,
        zeta=zeta,
        jets={"phi11": phi11_j, "phi22": phi22_j, "phi2": phi2_j},
        _reg_poly=reg_poly,
    )
    sol = solve_ivp(
        lambda s, y: [partial._reg_integrand(s)],
        (1.0 - eps, 1.0),
        [0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-13,
        dense_output=True,
    )
    if not sol.success:  # pragma: no cover
        raise ModelError(f"Phi integration failed: {sol.message}")
    phi_at_star = float(sol.sol(1.0 - r0)[0])
    model = CoefficientModel(
        domain=Domain.DISC,
        eps=eps,
        jet_order=jet_order,
        r0=r0,
        a1=a1,
        zeta=zeta,
        jets={"phi11": phi11_j, "phi22": phi22_j, "phi2": phi2_j},
        _phi_integral=sol,
        phi_at_star=phi_at_star,
        _reg_poly=reg_poly,
    )
    # p continuity across the layer edge r = 1 - eps
    pa = model.p((1.0 - eps) * (1.0 - 1e-12))
    pb = model.p(1.0 - eps + 1e-12 * eps)
    if abs(pa - pb) > 1e-10:
        raise ModelError(f"disc p discontinuous at the layer edge: {pa} vs {pb}")
    return model


@lru_cache(maxsize=32)
def _build_model_cached(domain: Domain, eps: float, jet_order: int) -> CoefficientModel:
    if domain is Domain.INTERVAL:
        return _build_interval_model(eps, jet_order)
    return _build_disc_model(eps, jet_order)


def build_model(
    domain: Domain, eps: float, jet_order: int = 20, eps_cap: float = EPS_MAX
) -> CoefficientModel:
    """Construct and validate the coefficient model for one domain and eps.

    eps_cap is the admissibility ceiling (default EPS_MAX). Raising it past
    the default is legitimate as long as the singular exponent stays below 1,
    which the build itself checks; the model does not depend on the cap.
    """
    if not 0.0 < eps <= eps_cap:
        raise ModelError(f"eps must lie in (0, {eps_cap}], got {eps}")
    return _build_model_cached(domain, eps, jet_order)


def sturm_liouville_disc(r, eps: float):
    """(p, q, w) at radius r, via the cached model for this eps."""
    model = build_model(Domain.DISC, eps)
    return model.p(r), model.q(r), model.w(r)


def disc_p_leading(model: CoefficientModel) -> float:
    """Constant K in p ~ K |r - (1 - r0)|^zeta near the degenerate circle."""
    return (
        0.125
        * (1.0 - model.eps)
        * (model.eps - model.r0) ** (-model.zeta)
        * math.exp(model.phi_at_star)
    )
