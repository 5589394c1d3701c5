import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmanlab import series as S
from bergmanlab.exceptions import ParameterError


def poly(*coeffs):
    return S.from_coeffs(np.array(coeffs, dtype=complex))


class TestCalculus:
    def test_derivative_monomials(self):
        f = poly(0, 0, 1)  # z^2
        assert np.allclose(S.derivative(f, 1).coeffs, [0, 2])
        g = poly(0, 0, 0, 1)  # z^3
        assert np.allclose(S.derivative(g, 2).coeffs, [0, 6])

    def test_derivative_exponential_series(self):
        c = np.array([1 / math.factorial(j) for j in range(21)])
        f = S.from_coeffs(c)
        d = S.derivative(f, 1)
        assert np.allclose(d.coeffs[:19], c[:19], atol=1e-15)

    def test_derivative_order_error(self):
        with pytest.raises(ParameterError):
            S.derivative(poly(1, 2), 2)

    def test_integrate(self):
        assert np.allclose(S.integrate(poly(1), 1).coeffs, [0, 1])
        out = S.integrate(poly(0, 2), 2)
        assert np.allclose(out.coeffs, [0, 0, 0, 1 / 3])

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        f = S.from_coeffs(rng.normal(size=9) + 1j * rng.normal(size=9))
        for n in (1, 2, 3):
            back = S.derivative(S.integrate(f, n), n)
            assert np.allclose(back.coeffs, f.coeffs, atol=1e-14)

    def test_cauchy_product(self):
        out = S.cauchy_product(poly(1, 1), poly(1, -1))
        assert np.allclose(out.coeffs, [1, 0, -1])
        geo = S.from_coeffs(np.ones(31), S.Tail.unknown())
        out = S.cauchy_product(geo, poly(1, -1))
        want = np.zeros(31)
        want[0] = 1.0
        assert np.allclose(out.coeffs, want)
        assert out.truncation == 30  # exact factor keeps the prefix
        assert out.tail.kind == "unknown"
        zero = S.cauchy_product(poly(1, 2, 3), poly(0))
        assert np.allclose(zero.coeffs, 0)


class TestApplyTgnk:
    def test_classical_volterra_of_constant(self):
        out = S.apply_tgnk(poly(0, 1), poly(1), 1, 0)
        assert np.allclose(out.coeffs, [0, 1])

    def test_n2_k1(self):
        out = S.apply_tgnk(poly(0, 0, 1), poly(0, 1), 2, 1)
        assert np.allclose(out.coeffs, [0, 0, 0, 1 / 3])

    def test_parameter_error(self):
        with pytest.raises(ParameterError):
            S.apply_tgnk(poly(0, 1), poly(1), 1, 1)

    def test_order_reduction_identity_n3(self):
        # T[g,1,0] f = T[g,3,0] f + sum_k C(2,k) T[g,3,k] f + correction,
        # the correction being the polynomial
        # sum_{k=1}^{2} z^k / k! sum_{j<k} C(k-1,j) f^(j)(0) g^(k-j)(0)
        f = poly(1, 1, 1)
        g = poly(1, 2, 0, 1)
        n = 3
        lhs = S.apply_tgnk(g, f, 1, 0)
        rhs = S.apply_tgnk(g, f, n, 0)
        for k in range(1, n):
            rhs = S.add(rhs, S.apply_tgnk(g, f, n, k), beta=math.comb(n - 1, k))
        fd = [complex(f.coeffs[j] * math.factorial(j)) for j in range(3)]
        gd = [complex(g.coeffs[j] * math.factorial(j)) for j in range(4)]
        corr = np.zeros(n, dtype=complex)
        for k in range(1, n):
            acc = sum(math.comb(k - 1, j) * fd[j] * gd[k - j]
                      for j in range(k))
            corr[k] = acc / math.factorial(k)
        rhs = S.add(rhs, S.from_coeffs(corr))
        m = min(lhs.truncation, rhs.truncation)
        assert np.allclose(lhs.coeffs[: m + 1], rhs.coeffs[: m + 1],
                           atol=1e-13)

    @given(st.integers(2, 4), st.data())
    @settings(max_examples=20, deadline=None)
    def test_three_term_recurrence(self, n, data):
        k = data.draw(st.integers(1, n - 1))
        rng = np.random.default_rng(data.draw(st.integers(0, 10 ** 6)))
        f = S.from_coeffs(rng.normal(size=7))
        g = S.from_coeffs(rng.normal(size=7))
        lhs = S.apply_tgnk(g, f, n, k)
        rhs = S.add(S.apply_tgnk(g, f, n - 1, k - 1),
                    S.apply_tgnk(g, f, n, k - 1), beta=-1.0)
        fk = f.coeffs[k - 1] * math.factorial(k - 1)
        gnk = g.coeffs[n - k] * math.factorial(n - k)
        corr = np.zeros(n, dtype=complex)
        corr[n - 1] = -fk * gnk / math.factorial(n - 1)
        rhs = S.add(rhs, S.from_coeffs(corr))
        m = min(lhs.truncation, rhs.truncation)
        assert np.allclose(lhs.coeffs[: m + 1], rhs.coeffs[: m + 1],
                           atol=1e-12)

    @given(st.integers(1, 3), st.data())
    @settings(max_examples=15, deadline=None)
    def test_linearity(self, n, data):
        k = data.draw(st.integers(0, n - 1))
        rng = np.random.default_rng(data.draw(st.integers(0, 10 ** 6)))
        f1 = S.from_coeffs(rng.normal(size=8))
        f2 = S.from_coeffs(rng.normal(size=8))
        g = S.from_coeffs(rng.normal(size=8))
        a = 2.5 - 1.25j
        lhs = S.apply_tgnk(g, S.add(f1, f2, alpha=a), n, k)
        rhs = S.add(S.apply_tgnk(g, f1, n, k), S.apply_tgnk(g, f2, n, k),
                    alpha=a)
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


class TestSymbols:
    def test_log_coefficients(self):
        f = S.symbol("log", 50)
        assert f.coeffs[0] == 0
        assert np.allclose(f.coeffs[1:].real,
                           1.0 / np.arange(1, 51))

    def test_pow_s1_is_geometric_series(self):
        f = S.symbol("pow", 40, s=1.0)
        assert np.allclose(f.coeffs.real, 1.0)

    def test_carleson_coefficient(self):
        f = S.symbol("carleson", 30, a=0.5, gamma=2.0)
        assert f.coeffs[1] == pytest.approx(0.25)
        # coefficient j = 0.25 (j+1) 0.5^j
        j = np.arange(31)
        assert np.allclose(f.coeffs.real, 0.25 * (j + 1) * 0.5 ** j)
        assert f.tail.kind == "geometric"

    def test_symbol_errors(self):
        with pytest.raises(ParameterError):
            S.symbol("pow", 10, s=0.0)
        with pytest.raises(ParameterError):
            S.symbol("carleson", 10, a=1.0, gamma=2.0)
        with pytest.raises(ParameterError):
            S.symbol("carleson", 10, a=0.5, gamma=0.0)

    def test_evaluate_against_closed_forms(self):
        zs = 0.9 * np.exp(1j * np.linspace(0, 2 * math.pi, 17))
        flog = S.symbol("log", 400)
        assert np.allclose(S.evaluate(flog, zs), -np.log(1 - zs), atol=1e-10)
        fpow = S.symbol("pow", 400, s=0.5)
        assert np.allclose(S.evaluate(fpow, zs), (1 - zs) ** -0.5, atol=1e-10)
        fcar = S.symbol("carleson", 400, a=0.5, gamma=2.0)
        assert np.allclose(S.evaluate(fcar, zs), (0.5 / (1 - 0.5 * zs)) ** 2,
                           atol=1e-12)

    def test_rotation(self):
        f = S.symbol("carleson", 60, a=0.5, gamma=2.0)
        g = S.rotate(f, math.pi / 3)
        z = 0.4 + 0.2j
        assert S.evaluate(g, z) == pytest.approx(
            S.evaluate(f, z * np.exp(1j * math.pi / 3)))

    def test_parse(self):
        assert S.parse_symbol("poly:1,0,2").coeffs.tolist() == [1, 0, 2]
        assert S.parse_symbol("log", 30).truncation == 30
        assert S.parse_symbol("pow:s=0.5", 10).truncation == 10
        with pytest.raises(ParameterError):
            S.parse_symbol("sin")

    def test_eval_on_circles_matches_horner(self):
        f = S.symbol("carleson", 48, a=0.3, gamma=1.5)
        radii = np.array([0.0, 0.4, 0.97])
        grid = S.eval_on_circles(f, radii, 64)
        ang = np.exp(2j * math.pi * np.arange(64) / 64)
        for i, r in enumerate(radii):
            assert np.allclose(grid[i], S.evaluate(f, r * ang), atol=1e-12)
