"""Truncated univariate Taylor jet arithmetic.

A Jet holds coefficients [f(t0), f'(t0), f''(t0)/2, ...] of a function about a
fixed center, truncated at a given order. Products are truncated convolutions,
so coefficient j of any result depends only on input coefficients up to j.
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("coef", "order")

    def __init__(self, coef, order: int | None = None):
        coef = np.asarray(coef, dtype=float)
        if order is None:
            order = len(coef) - 1
        out = np.zeros(order + 1)
        out[: min(len(coef), order + 1)] = coef[: order + 1]
        self.coef = out
        self.order = order

    @classmethod
    def constant(cls, value: float, order: int) -> "Jet":
        return cls([value], order)

    @classmethod
    def variable(cls, value: float, order: int) -> "Jet":
        """The identity function t evaluated at center `value`."""
        return cls([value, 1.0], order)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coef + other.coef, self.order)
        out = self.coef.copy()
        out[0] += other
        return Jet(out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coef, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self.order + 1
            out = np.convolve(self.coef, other.coef)[:n]
            return Jet(out, self.order)
        return Jet(self.coef * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coef / other, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        if self.coef[0] == 0:
            raise ZeroDivisionError("jet reciprocal with vanishing constant term")
        n = self.order + 1
        out = np.zeros(n)
        out[0] = 1.0 / self.coef[0]
        for j in range(1, n):
            out[j] = -out[0] * np.dot(self.coef[1 : j + 1], out[j - 1 :: -1][: j])
        return Jet(out, self.order)

    def sqrt(self) -> "Jet":
        if self.coef[0] <= 0:
            raise ValueError("jet sqrt needs a positive constant term")
        n = self.order + 1
        out = np.zeros(n)
        out[0] = np.sqrt(self.coef[0])
        for j in range(1, n):
            s = np.dot(out[1:j], out[j - 1 : 0 : -1]) if j >= 2 else 0.0
            out[j] = (self.coef[j] - s) / (2 * out[0])
        return Jet(out, self.order)

    def derivative(self) -> "Jet":
        out = self.coef[1:] * np.arange(1, self.order + 1)
        return Jet(out, self.order)

    def integrate(self, constant: float) -> "Jet":
        """Antiderivative with given value at the center; keeps the order."""
        out = np.zeros(self.order + 1)
        out[0] = constant
        out[1:] = self.coef[: self.order] / np.arange(1, self.order + 1)
        return Jet(out, self.order)

    def arcsin(self) -> "Jet":
        """arcsin of the jet, |constant term| < 1 required.

        Built by integrating u' / sqrt(1 - u^2) term by term.
        """
        if abs(self.coef[0]) >= 1:
            raise ValueError("arcsin jet needs |constant term| < 1")
        integrand = self.derivative() / (1.0 - self * self).sqrt()
        return integrand.integrate(float(np.arcsin(self.coef[0])))

    def shift_down(self, k: int = 1) -> "Jet":
        """Divide by X^k assuming the first k coefficients vanish."""
        if np.any(np.abs(self.coef[:k]) > 1e-9 * max(1.0, np.abs(self.coef).max())):
            raise ValueError("shift_down on a jet with nonvanishing low coefficients")
        return Jet(self.coef[k:], self.order - k)

    def eval(self, dx: float) -> float:
        """Value of the truncated polynomial at center + dx."""
        return float(np.polynomial.polynomial.polyval(dx, self.coef))

    def __repr__(self):  # pragma: no cover
        return f"Jet(order={self.order}, coef={self.coef!r})"
