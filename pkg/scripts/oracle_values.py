"""Independent oracles behind the frozen constants in the test suite.

Every numeric literal in tests/ tagged "frozen from scripts/oracle_values.py"
was produced by this script. Each oracle deliberately avoids the library code
path it validates: counts come from integer arithmetic, special-function roots
from power series plus bisection, secular roots from a fine scan with plain
bisection rather than the production bracketing, and weight rows from explicit
2x2 linear algebra. Run it to regenerate everything:

    python3 scripts/oracle_values.py
"""

from __future__ import annotations

import math
from fractions import Fraction


def disc_lattice_count(m: int) -> int:
    """Points of the m x m lattice on [-1,1]^2 with norm <= 1, in exact arithmetic."""
    half = m - 1
    count = 0
    for i in range(m):
        for j in range(m):
            x = Fraction(2 * i, half) - 1
            y = Fraction(2 * j, half) - 1
            if x * x + y * y <= 1:
                count += 1
    return count


def bessel_j0_series(x: float, terms: int = 40) -> float:
    """J_0 by its power series; accurate to ~1e-15 for |x| < 10."""
    total = 0.0
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= -(x * x) / (4.0 * k * k)
        total += term
    return total


def bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("no sign change")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def j0_first_zero() -> float:
    return bisect(bessel_j0_series, 2.0, 3.0)


SQRT3 = math.sqrt(3.0)


def est1(lam: float) -> float:
    """Small-bandwidth limit of the interval secular residual, written directly
    from the closed form (independent of the package's vectorized version)."""
    omega = math.sqrt(6.0 * lam)
    return math.sin(omega) * ((21.0 - 12.0 * SQRT3) * lam - 6.0) + (
        2.0 * omega * (3.0 - 2.0 * SQRT3) * math.cos(omega)
    )


def est1_roots(count: int) -> list[float]:
    """First positive roots by scanning s = sqrt(6 lam) at step 1e-3."""
    roots = []
    s = 1e-3
    prev = est1(s * s / 6.0)
    while len(roots) < count:
        s_next = s + 1e-3
        cur = est1(s_next * s_next / 6.0)
        if prev * cur < 0:
            lam = bisect(lambda t: est1(t * t / 6.0), s, s_next)
            roots.append(lam * lam / 6.0)
        s, prev = s_next, cur
    return roots


def local_weights_2x2(c: float) -> tuple[float, float]:
    """Explicit solve for the row at 0.5 with neighbors {0.4, 0.7}."""
    # Gram matrix of offsets (-0.1, 0.2): [[0.01+c, -0.02], [-0.02, 0.04+c]]
    a, b, d = 0.01 + c, -0.02, 0.04 + c
    det = a * d - b * b
    z1 = (d - b) / det
    z2 = (a - b) / det
    s = z1 + z2
    return z1 / s, z2 / s


def interval_drift_taylor(eps: float, j: int, h: float) -> float:
    """j-th Taylor coefficient of the interval drift about its zero by
    Richardson-extrapolated central differences (independent of the closed form)."""

    def phi1(x: float) -> float:
        s = x / eps
        return -6.0 * (1.0 - s) / (1.0 + s) ** 3

    x0 = (2.0 - SQRT3) * eps

    def deriv(step: float) -> float:
        # central difference for the j-th derivative
        total = 0.0
        for i in range(j + 1):
            total += (-1.0) ** i * math.comb(j, i) * phi1(x0 + (j / 2.0 - i) * step)
        return total / step**j

    d1, d2 = deriv(h), deriv(h / 2.0)
    rich = (4.0 * d2 - d1) / 3.0
    return rich / math.factorial(j)


def main() -> None:
    print("# sampling")
    for m in (3, 41, 401):
        print(f"disc_lattice_count({m}) = {disc_lattice_count(m)}")

    print("\n# lle_matrix")
    for c in (1e-6,):
        w1, w2 = local_weights_2x2(c)
        print(f"local_weights_2x2(c={c}) = ({w1!r}, {w2!r})")

    print("\n# special functions")
    print(f"j0_first_zero = {j0_first_zero()!r}")

    print("\n# interval secular limit")
    for i, lam in enumerate(est1_roots(6), start=2):
        print(f"est1 root lambda_{i} = {lam!r}")

    print("\n# interval drift Taylor coefficients at eps=0.05 (FD oracle)")
    for j, h in ((0, 1e-4), (1, 1e-4), (2, 1e-3), (3, 1e-3)):
        print(f"b_{j} = {interval_drift_taylor(0.05, j, h)!r}")


if __name__ == "__main__":
    main()
