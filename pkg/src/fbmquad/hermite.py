"""Hermite polynomials with unit leading coefficient and monomial expansions.

The recurrence H_{q+1}(x) = x H_q(x) - q H_{q-1}(x) with H_0 = 1, H_1 = x
generates the probabilists' Hermite family normalized to leading coefficient
one, so E[H_p(N) H_q(N)] = q! 1{p=q} for a standard normal N.  Odd monomials
expand exactly as x^r = sum_p C(r, p) H_{r-2p}(x) with integer coefficients;
those coefficients drive the chaos decomposition of increment powers used by
the variance analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Monomial powers for which an expansion is provided (the error analysis
#: never needs powers beyond the order-11 remainder).
SUPPORTED_POWERS = (1, 3, 5, 7, 9, 11)


def hermite_eval(q: int, x):
    """Evaluate H_q at x (scalar or array) by the upward recurrence."""
    if q < 0:
        raise ValueError(f"order q must be >= 0, got {q}")
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if q == 0:
        return float(prev) if x.ndim == 0 else prev
    cur = x.copy()
    for degree in range(1, q):
        prev, cur = cur, x * cur - degree * prev
    return float(cur) if x.ndim == 0 else cur


def hermite_coefficients(q: int) -> tuple[int, ...]:
    """Exact integer monomial coefficients of H_q, lowest degree first."""
    if q < 0:
        raise ValueError(f"order q must be >= 0, got {q}")
    prev = [1]
    if q == 0:
        return (1,)
    cur = [0, 1]
    for degree in range(1, q):
        nxt = [0] + cur  # x * H_degree
        for i, c in enumerate(prev):
            nxt[i] -= degree * c
        prev, cur = cur, nxt
    return tuple(cur)


@dataclass(frozen=True)
class ChaosExpansion:
    """Integer coefficients C(r, p) with x^r = sum_p C(r, p) H_{r-2p}(x)."""

    power: int
    coeffs: tuple[int, ...]

    def reconstruct(self, x):
        """Evaluate sum_p C(r, p) H_{r-2p}(x); equals x**power up to rounding."""
        total = None
        for p, c in enumerate(self.coeffs):
            term = c * hermite_eval(self.power - 2 * p, x)
            total = term if total is None else total + term
        return total


def power_to_hermite(r: int) -> ChaosExpansion:
    """Expand the odd monomial x^r over the Hermite basis, exactly in integers.

    Computed by back substitution in the (upper triangular) change of basis:
    peel off the leading Hermite polynomial of matching degree until the
    monomial is exhausted.  C(r, 0) = 1 always.
    """
    if r not in SUPPORTED_POWERS:
        raise ValueError(f"power must be one of {SUPPORTED_POWERS}, got {r}")
    residual = [0] * r + [1]  # coefficients of x^r, lowest degree first
    coeffs = []
    for q in range(r, 0, -2):
        c = residual[q]
        coeffs.append(c)
        for i, hc in enumerate(hermite_coefficients(q)):
            residual[i] -= c * hc
    if any(residual):
        raise AssertionError("expansion did not terminate exactly")
    return ChaosExpansion(power=r, coeffs=tuple(coeffs))
