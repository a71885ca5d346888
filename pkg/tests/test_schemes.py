"""Quadrature schemes: exactness degrees, the Simpson decomposition, decay."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from fbmquad import (
    GeneratorKind,
    HurstGrid,
    Polynomial,
    ScaledCosine,
    SchemeKind,
    error_statistic,
    generate,
    generate_batch,
    parse_test_function,
    replication_seeds,
    riemann_sum,
    simpson_error_decomposition,
)
from fbmquad.schemes import SIMPSON_DB5_COEF, SIMPSON_DB7_COEF, SIMPSON_DB9_COEF

CIRC = GeneratorKind.CIRCULANT_EMBEDDING

# ---------------------------------------------------------------------------
# scheme table
# ---------------------------------------------------------------------------


class TestSchemeTable:
    def test_weights_sum_to_one_exactly(self):
        for scheme in SchemeKind:
            assert sum(scheme.weights, Fraction(0)) == 1

    def test_node_layout(self):
        assert SchemeKind.MIDPOINT.offsets == (Fraction(1, 2),)
        assert SchemeKind.TRAPEZOID.weights == (Fraction(1, 2), Fraction(1, 2))
        assert SchemeKind.SIMPSON.weights == (Fraction(1, 6), Fraction(4, 6), Fraction(1, 6))
        assert SchemeKind.MILNE.offsets == (
            Fraction(0),
            Fraction(1, 4),
            Fraction(1, 2),
            Fraction(3, 4),
            Fraction(1),
        )
        assert [w * 90 for w in SchemeKind.MILNE.weights] == [7, 32, 12, 32, 7]

    def test_critical_thresholds(self):
        assert SchemeKind.MIDPOINT.critical_hurst == Fraction(1, 6)
        assert SchemeKind.TRAPEZOID.critical_hurst == Fraction(1, 6)
        assert SchemeKind.SIMPSON.critical_hurst == Fraction(1, 10)
        assert SchemeKind.MILNE.critical_hurst == Fraction(1, 14)

    def test_error_powers(self):
        assert SchemeKind.SIMPSON.error_power == 5
        assert SchemeKind.MILNE.error_power == 7
        assert SchemeKind.TRAPEZOID.error_power == 3


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------


class TestTestFunctions:
    def test_polynomial_derivative_against_sympy(self, rng):
        x = sp.symbols("x")
        for _ in range(5):
            coeffs = [Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 9))) for _ in range(9)]
            poly = Polynomial(coeffs)
            expr = sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(coeffs))
            for k in (1, 3, 5, 11):
                ours = poly.derivative(k)
                theirs = sp.Poly(sp.diff(expr, x, k), x).all_coeffs()[::-1] or [0]
                assert [sp.Rational(c.numerator, c.denominator) for c in ours.coeffs] == list(
                    theirs
                )[: len(ours.coeffs)]
                assert all(c == 0 for c in theirs[len(ours.coeffs) :])

    def test_polynomial_evaluation(self):
        f = Polynomial([1, 0, Fraction(1, 2)])
        assert f(2.0) == 3.0
        assert np.allclose(f(np.array([0.0, 2.0])), [1.0, 3.0])

    def test_degree_and_trailing_zeros(self):
        assert Polynomial([1, 2, 0, 0]).degree == 1
        assert Polynomial([0]).degree == 0

    def test_cosine_derivative_cycle(self):
        f = ScaledCosine(2.0, 3.0)
        xs = np.linspace(-1, 1, 7)
        assert np.allclose(f.derivative(1)(xs), -6.0 * np.sin(3.0 * xs))
        assert np.allclose(f.derivative(4)(xs), 2.0 * 3.0**4 * np.cos(3.0 * xs))
        assert f.degree is None

    def test_parse_round_trip(self):
        for text in ("0,0,0,0,0,1/120", "1,-2,3/4", "cos", "cos:2.0,0.5"):
            f = parse_test_function(text)
            again = parse_test_function(f.spec())
            xs = np.linspace(-2, 2, 9)
            assert np.array_equal(f(xs), again(xs))

    def test_parse_errors(self):
        with pytest.raises(ValueError):
            parse_test_function("1,junk")
        with pytest.raises(ValueError):
            parse_test_function("cos:1,2,3")


# ---------------------------------------------------------------------------
# Riemann sums
# ---------------------------------------------------------------------------


def random_paths(count, H=0.1, n=64, start=0):
    grid = HurstGrid(H, n)
    values = generate_batch(grid, CIRC, replication_seeds(1000 + start, 0, count))
    return grid, values


class TestRiemannSum:
    def test_identity_function_telescopes(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 21)
        f = Polynomial([0, 1])
        for scheme in SchemeKind:
            got = riemann_sum(path, f, scheme, 1.0)
            assert got == pytest.approx(path.values[-1], rel=1e-12)

    @pytest.mark.parametrize(
        "scheme,degree",
        [
            (SchemeKind.MIDPOINT, 2),
            (SchemeKind.TRAPEZOID, 2),
            (SchemeKind.SIMPSON, 4),
            (SchemeKind.MILNE, 6),
        ],
    )
    def test_exactness_degree(self, scheme, degree):
        # the rule reproduces f(B_end) - f(0) for deg f <= its exactness degree
        for H in (0.1, 0.35):
            grid, values = random_paths(10, H=H)
            for row in values:
                path_end = float(row[-1])
                from fbmquad import FbmPath

                path = FbmPath(grid, row, seed=0)
                f = Polynomial([0] * degree + [1])
                expected = f(path_end) - f(0.0)
                got = riemann_sum(path, f, scheme, 1.0)
                assert abs(got - expected) <= 1e-10 * max(1.0, abs(expected))

    def test_linearity(self):
        grid = HurstGrid(0.2, 64)
        path = generate(grid, CIRC, 5)
        f = Polynomial([0, 0, 1, 2])
        g = Polynomial([1, 3, 0, 0, 5])
        combo = Polynomial([2 * a + 3 * b for a, b in zip((0, 0, 1, 2, 0), (1, 3, 0, 0, 5))])
        lhs = riemann_sum(path, combo, SchemeKind.SIMPSON, 1.0)
        rhs = 2 * riemann_sum(path, f, SchemeKind.SIMPSON, 1.0) + 3 * riemann_sum(
            path, g, SchemeKind.SIMPSON, 1.0
        )
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_partial_horizon(self):
        grid = HurstGrid(0.5, 64)
        path = generate(grid, CIRC, 9)
        f = Polynomial([0, 1])
        assert riemann_sum(path, f, SchemeKind.SIMPSON, 0.5) == pytest.approx(
            path.values[32], rel=1e-12
        )

    def test_time_validation(self):
        grid = HurstGrid(0.5, 64)
        path = generate(grid, CIRC, 9)
        f = Polynomial([0, 1])
        with pytest.raises(ValueError):
            riemann_sum(path, f, SchemeKind.SIMPSON, 0.0)
        with pytest.raises(ValueError):
            riemann_sum(path, f, SchemeKind.SIMPSON, 1.5)


# ---------------------------------------------------------------------------
# Simpson decomposition
# ---------------------------------------------------------------------------


class TestSimpsonDecomposition:
    def test_error_coefficients_from_symbolic_integration(self):
        # A_{4+2nu-1} = (1/3) (2nu-1)!^{-1} int_0^1 v^{2nu} (1-v)^2 dv, nu = 1, 2, 3,
        # then the dB-form coefficient divides by 2^{4+2nu-1}
        v = sp.symbols("v")
        halves = []
        for nu in (1, 2, 3):
            integral = sp.integrate(v ** (2 * nu) * (1 - v) ** 2, (v, 0, 1))
            halves.append(sp.Rational(1, 3) / sp.factorial(2 * nu - 1) * integral)
        assert halves == [sp.Rational(1, 90), sp.Rational(1, 1890), sp.Rational(1, 90720)]
        assert SIMPSON_DB5_COEF == float(halves[0] / 2**5)
        assert SIMPSON_DB7_COEF == float(halves[1] / 2**7)
        assert SIMPSON_DB9_COEF == float(halves[2] / 2**9)

    def test_symbolic_identity_generic_degree_10(self):
        # g(x+h) - g(x-h) equals the Simpson node combination minus the three
        # error terms, identically for any polynomial of degree <= 10
        x, h = sp.symbols("x h")
        coeffs = sp.symbols("c0:11")
        g = sum(c * x**i for i, c in enumerate(coeffs))
        lhs = g.subs(x, x + h) - g.subs(x, x - h)
        gp = sp.diff(g, x)
        rule = (h / 3) * (gp.subs(x, x - h) + 4 * gp + gp.subs(x, x + h))
        rhs = (
            rule
            - sp.diff(g, x, 5) * h**5 / 90
            - sp.diff(g, x, 7) * h**7 / 1890
            - sp.diff(g, x, 9) * h**9 / 90720
        )
        assert sp.expand(lhs - rhs) == 0

    def test_low_degree_terms_vanish(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 31)
        f = Polynomial([0, 2, 0, 0, Fraction(1, 3)])
        d = simpson_error_decomposition(path, f, 1.0)
        assert d.term5 == d.term7 == d.term9 == 0.0
        expected = f(float(path.values[-1])) - f(0.0)
        assert d.main == pytest.approx(expected, rel=1e-10)

    def test_pure_quintic_reduces_to_db5_sum(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 32)
        f = Polynomial([0, 0, 0, 0, 0, Fraction(1, 120)])
        d = simpson_error_decomposition(path, f, 1.0)
        assert d.term7 == d.term9 == 0.0
        db5 = float(np.sum(path.increments() ** 5))
        assert d.term5 == pytest.approx(db5 / 2880.0, rel=1e-12)
        expected = f(float(path.values[-1])) - f(0.0)
        assert d.main - d.term5 == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("spec", ["0,0,0,0,0,1/120", "0,0,0,0,0,0,0,1", "0,0,0,0,0,0,0,0,0,1"])
    def test_pathwise_identity(self, spec):
        f = parse_test_function(spec)
        for H in (0.1, 0.3):
            grid = HurstGrid(H, 64)
            for seed in replication_seeds(77, 0, 10):
                path = generate(grid, CIRC, int(seed))
                d = simpson_error_decomposition(path, f, 1.0)
                expected = f(float(path.values[-1])) - f(0.0)
                err = abs(d.telescoped() - expected)
                assert err <= 1e-9 * max(1.0, abs(expected))

    def test_degree_limit(self):
        grid = HurstGrid(0.1, 16)
        path = generate(grid, CIRC, 1)
        with pytest.raises(ValueError):
            simpson_error_decomposition(path, Polynomial([0] * 11 + [1]), 1.0)
        with pytest.raises(ValueError):
            simpson_error_decomposition(path, ScaledCosine(), 1.0)


# ---------------------------------------------------------------------------
# error statistic
# ---------------------------------------------------------------------------


class TestErrorStatistic:
    def test_zero_for_low_degree(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 51)
        assert error_statistic(path, Polynomial([1, 2, 3, 4, 5]), 1.0) == 0.0

    def test_constant_fifth_derivative(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 52)
        f = Polynomial([0, 0, 0, 0, 0, Fraction(1, 120)])
        assert error_statistic(path, f, 1.0) == pytest.approx(
            float(np.sum(path.increments() ** 5)), rel=1e-12
        )

    def test_single_increment_horizon(self):
        grid = HurstGrid(0.1, 64)
        path = generate(grid, CIRC, 53)
        f = Polynomial([0, 0, 0, 0, 0, 0, 1])
        t = 1.0 / 64
        expected = f.derivative(5)(path.midpoints()[0]) * path.increments()[0] ** 5
        assert error_statistic(path, f, t) == pytest.approx(float(expected), rel=1e-12)


class TestSquaredStatisticDecay:
    @pytest.mark.parametrize("H", [0.15, 0.2])
    def test_log4_ratio_tracks_one_minus_10H(self, H):
        # Monte Carlo E[(sum f5(mid) dB^5)^2] at n and 4n: log_4 ratio near 1 - 10H
        f = Polynomial([0, 0, 0, 0, 0, Fraction(1, 120)])
        reps = 1500
        moments = {}
        for n in (512, 2048):
            grid = HurstGrid(H, n)
            values = generate_batch(grid, CIRC, replication_seeds(600 + int(100 * H), 0, reps))
            db = np.diff(values, axis=1)
            stat = np.sum(db**5, axis=1)
            moments[n] = float(np.mean(stat**2))
        ratio = math.log(moments[2048] / moments[512], 4.0)
        assert abs(ratio - (1.0 - 10.0 * H)) <= 0.35
