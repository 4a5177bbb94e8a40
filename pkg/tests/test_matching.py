"""Secular equations, root scans, and eigenfunction assembly.

Frozen eigenvalue decimals are regression locks from the bracketing scan; the
independent checks on them are the secular residual at each root, Rayleigh
quotients computed by quadrature over the assembled eigenfunctions, Gram
orthonormality under the singular weight, and the small-width limit equation
whose roots the finite-width values must track. Bessel values go through the
scipy special-function route and a local recurrence cross-check.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lle_spectra import matching as mt
from lle_spectra.frobenius import Kind
from lle_spectra.matching import (
    AnalyticEigenpair,
    RootScanWarning,
    appendix_divergence_demo,
    assemble_eigenfunction,
    bessel_j,
    eigenvalue_roots,
    est1_residual,
    find_eigenvalues,
    gram_matrix,
    rayleigh_quotient,
    secular_disc,
    secular_interval,
)
from lle_spectra.sampling import Domain

EPS = 0.05
ETA = (4.0 + 2.0 * math.sqrt(3.0)) * EPS

# locked scan output at eps = 0.05 (lambda, angular index)
INTERVAL_ROOTS = [
    0.0,
    1.261958439114976,
    5.13738016235839,
    11.837222979250543,
    21.583664135264254,
    34.54066129974711,
    50.80175124009586,
    70.40386439109251,
]
DISC_ROOTS = [
    (0.0, 0),
    (0.366846818697684, 1),
    (0.366846818697684, 1),
    (1.04214249589014, 2),
    (1.04214249589014, 2),
    (1.5359968749321973, 0),
    (2.0220961727431286, 3),
    (2.0220961727431286, 3),
    (3.005637584956819, 1),
    (3.005637584956819, 1),
    (3.307540972092661, 4),
    (3.307540972092661, 4),
]
DIRICHLET_INTERVAL = [1.6901662759400484, 6.751513216039651, 15.156184113911157]
DIRICHLET_DISC = [(0.736135075519492, 0), (1.8686672328920286, 1), (1.8686672328920286, 1)]
# roots of the width-zero limit equation, bracketed from its sign changes
EST1_ROOTS = [
    1.2384867561391804,
    5.007235656851539,
    11.440080499764496,
    20.696557888211775,
    32.91813760799935,
    48.21127249785051,
]


@pytest.fixture(scope="module")
def interval_pairs():
    return find_eigenvalues(Domain.INTERVAL, EPS, 12.0)


@pytest.fixture(scope="module")
def disc_pairs():
    return find_eigenvalues(Domain.DISC, EPS, 1.2, nu_max=2)


@pytest.fixture(scope="module")
def disc_roots():
    return eigenvalue_roots(Domain.DISC, EPS, 3.4, nu_max=4)


class TestBessel:
    def test_values_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(2, 0.0) == 0.0

    def test_derivative_identity(self):
        for x in (0.3, 1.7, 4.2):
            assert bessel_j(0, x, deriv=1) == pytest.approx(-bessel_j(1, x), rel=1e-14)

    def test_three_term_recurrence(self):
        for nu in (1, 2, 5):
            for x in (0.7, 2.9, 8.3):
                lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x)
                assert lhs == pytest.approx(2.0 * nu / x * bessel_j(nu, x), rel=1e-12)

    def test_first_zero(self):
        root = brentq(lambda x: bessel_j(0, x), 2.0, 3.0, xtol=1e-14)
        assert root == pytest.approx(2.404825557695773, rel=1e-13)


class TestLimitEquation:
    def test_frozen_roots_are_roots(self):
        for lam in EST1_ROOTS:
            assert abs(est1_residual(lam)) < 1e-9
            assert est1_residual(lam - 1e-4) * est1_residual(lam + 1e-4) < 0.0

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError):
            est1_residual(-0.5)

    def test_frequency_gaps_approach_pi(self):
        # root frequencies omega = sqrt(6 lambda) space out toward pi
        omega = np.sqrt(6.0 * np.array(EST1_ROOTS))
        gaps = np.diff(omega)
        assert np.all(np.diff(gaps) > 0.0)
        assert np.all(gaps < math.pi)
        assert math.pi - gaps[-1] < 0.2


class TestSecular:
    def test_interval_residual_vanishes_at_roots(self):
        for lam in INTERVAL_ROOTS[1:4]:
            assert abs(secular_interval(lam, EPS)) < 1e-9
            assert secular_interval(lam - 1e-5, EPS) * secular_interval(lam + 1e-5, EPS) < 0.0

    def test_disc_residual_vanishes_at_roots(self):
        for lam, nu in ((0.366846818697684, 1), (1.5359968749321973, 0)):
            assert abs(secular_disc(lam, nu, EPS)) < 1e-9

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError):
            secular_interval(-1.0, EPS)
        with pytest.raises(ValueError):
            secular_disc(-1.0, 0, EPS)


class TestRootScan:
    def test_interval_spectrum_frozen(self):
        roots = eigenvalue_roots(Domain.INTERVAL, EPS, 75.0)
        assert [nu for _, nu in roots] == [0] * 8
        assert roots[0][0] == 0.0
        for (lam, _), ref in zip(roots[1:], INTERVAL_ROOTS[1:]):
            assert lam == pytest.approx(ref, rel=1e-9)

    def test_disc_spectrum_frozen(self, disc_roots):
        assert [nu for _, nu in disc_roots] == [nu for _, nu in DISC_ROOTS]
        assert disc_roots[0][0] == 0.0
        for (lam, _), (ref, _) in zip(disc_roots[1:], DISC_ROOTS[1:]):
            assert lam == pytest.approx(ref, rel=1e-9)

    def test_disc_multiplicities(self, disc_roots):
        # nu >= 1 roots appear exactly twice, nu = 0 roots once
        lams = np.array([lam for lam, _ in disc_roots])
        nus = [nu for _, nu in disc_roots]
        for i in range(1, len(disc_roots)):
            copies = int(np.sum(np.isclose(lams, lams[i], rtol=1e-12)))
            assert copies == (1 if nus[i] == 0 else 2)

    def test_singular_branch_spectra_frozen(self):
        got = eigenvalue_roots(Domain.INTERVAL, EPS, 16.0, kind=Kind.DIRICHLET)
        assert [nu for _, nu in got] == [0, 0, 0]
        for (lam, _), ref in zip(got, DIRICHLET_INTERVAL):
            assert lam == pytest.approx(ref, rel=1e-9)
        gotd = eigenvalue_roots(Domain.DISC, EPS, 2.0, kind=Kind.DIRICHLET, nu_max=1)
        for (lam, nu), (ref, ref_nu) in zip(gotd, DIRICHLET_DISC):
            assert nu == ref_nu
            assert lam == pytest.approx(ref, rel=1e-9)

    def test_boundary_kinds_interlace(self):
        # each smooth-kind eigenvalue sits below its singular-kind partner
        for neu, dir_ in zip(INTERVAL_ROOTS[1:4], DIRICHLET_INTERVAL):
            assert neu < dir_
        for (dn, _), (dd, _) in zip(DISC_ROOTS[1:2], DIRICHLET_DISC[:1]):
            assert dn < dd

    def test_width_zero_limit_tracks_roots(self):
        # finite-width eigenvalues shift from the limit roots by O(eps lam^{3/2})
        for lam, ref in zip(INTERVAL_ROOTS[1:7], EST1_ROOTS):
            assert abs(lam - ref) <= 0.5 * EPS * ref**1.5

    def test_short_count_warns(self):
        with pytest.warns(RootScanWarning):
            find_eigenvalues(Domain.INTERVAL, EPS, 2.0, count=5)


class TestAssembly:
    def test_kernel_pair_is_constant(self, interval_pairs):
        kernel = interval_pairs[0]
        assert kernel.lam == 0.0
        vals = kernel.u(np.array([0.05, 0.3, 0.5, 0.97]))
        assert np.all(vals == vals[0])
        assert 0.9 < vals[0] < 1.0
        assert kernel.du(0.3) == 0.0
        assert kernel.diagnostics.get("kernel") is True

    def test_matching_diagnostics(self, interval_pairs, disc_pairs):
        for pair in list(interval_pairs[1:]) + [disc_pairs[1], disc_pairs[3]]:
            assert pair.diagnostics["sigma_ratio"] < 1e-10
            assert pair.diagnostics["c0_mismatch"] < 1e-8
            assert pair.diagnostics["c1_mismatch"] < 1e-8

    def test_interval_mirror_symmetry(self, interval_pairs):
        # eigenfunctions alternate odd/even about the midpoint, kernel even
        xs = np.array([0.12, 0.31, 0.47])
        for idx, pair in enumerate(interval_pairs[1:4], start=1):
            sign = -1.0 if idx % 2 == 1 else 1.0
            defect = np.max(np.abs(pair.u(xs) - sign * pair.u(1.0 - xs)))
            assert defect < 1e-12

    def test_interval_mirror_weight_ratio(self, interval_pairs):
        for pair in interval_pairs[1:]:
            assert pair.diagnostics["mirror_ratio"] < 1e-12

    def test_spurious_root_assembles_to_none(self):
        assert assemble_eigenfunction(Domain.DISC, EPS, 0.0, nu=1) is None

    def test_disc_layer_coordinate_consistency(self, disc_pairs):
        pair = disc_pairs[1]
        for t in (0.01, 0.03, 0.049):
            assert pair.u(1.0 - t) == pytest.approx(pair.layer_value(t), rel=1e-14)

    def test_layer_value_interval_rejected(self, interval_pairs):
        with pytest.raises(ValueError):
            interval_pairs[1].layer_value(0.01)

    def test_angular_factors(self, disc_pairs):
        assert disc_pairs[0].angular_factor == pytest.approx(2.0 * math.pi)
        assert disc_pairs[1].angular_factor == pytest.approx(math.pi)

    def test_singular_kind_confined_to_core(self):
        pair = assemble_eigenfunction(
            Domain.INTERVAL, EPS, DIRICHLET_INTERVAL[0], kind=Kind.DIRICHLET
        )
        assert pair is not None
        with pytest.raises(ValueError):
            pair.u(1e-3)


class TestVariational:
    def test_interval_rayleigh_quotients(self, interval_pairs):
        for pair in interval_pairs:
            rq = rayleigh_quotient(pair)
            assert abs(rq - pair.lam) / max(pair.lam, 1.0) < 1e-8

    def test_disc_rayleigh_quotients(self, disc_pairs):
        for pair in disc_pairs:
            rq = rayleigh_quotient(pair)
            assert abs(rq - pair.lam) / max(pair.lam, 1.0) < 1e-8

    def test_interval_gram_identity(self, interval_pairs):
        g = gram_matrix(interval_pairs)
        assert np.max(np.abs(g - np.eye(len(interval_pairs)))) < 1e-8

    def test_disc_gram_identity(self, disc_pairs):
        g = gram_matrix(disc_pairs)
        assert np.max(np.abs(g - np.eye(len(disc_pairs)))) < 1e-8


class TestAppendixDemo:
    LAM = INTERVAL_ROOTS[1]

    def test_smooth_branch_increments_contract_at_weight_rate(self):
        # truncated integrals converge like delta^eta: consecutive increments
        # shrink by 10^eta per offset decade
        out = appendix_divergence_demo(0.0, 3, 0, EPS, self.LAM)
        inc = np.abs(np.diff(out["integrals"]))
        assert inc[0] / inc[1] == pytest.approx(10.0**ETA, rel=3e-2)
        assert inc[1] / inc[2] == pytest.approx(10.0**ETA, rel=5e-3)
        assert -0.15 < out["slope"] < 0.0

    def test_singular_branch_diverges(self):
        out = appendix_divergence_demo(math.pi / 2.0, 3, 0, EPS, self.LAM)
        assert out["slope"] <= -0.5
        assert out["cauchy_gap"] > 0.5

    def test_moment_power_restores_convergence(self):
        out = appendix_divergence_demo(0.0, 3, 2, EPS, self.LAM)
        assert abs(out["slope"]) < 0.05

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            appendix_divergence_demo(0.0, 4, 0, EPS, self.LAM)
        with pytest.raises(ValueError):
            appendix_divergence_demo(0.0, 3, -1, EPS, self.LAM)
