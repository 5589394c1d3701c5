import math

import numpy as np
import pytest
from scipy import integrate as si

from bergmanlab import operators as O
from bergmanlab import series as S
from bergmanlab.exceptions import ParameterError
from bergmanlab.weights import Weight

W0 = Weight.standard(0)
Z = S.from_coeffs([0, 1.0])
Z2 = S.from_coeffs([0, 0, 1.0])


def shift_values(n):
    j = np.arange(n, dtype=float)
    return 1.0 / np.sqrt((j + 1.0) * (j + 2.0))


class TestVolterraAssembly:
    def test_shift_subdiagonal(self):
        M = O.assemble_volterra(Z, W0, 1, 0, 12)
        want = np.zeros((14, 13))
        want[np.arange(1, 14), np.arange(13)] = shift_values(13)
        assert np.allclose(M.entries.real, want, atol=1e-14)
        assert M.entries.shape == (14, 13)

    def test_constant_symbol_zero(self):
        M = O.assemble_volterra(S.from_coeffs([3.0]), W0, 2, 0, 6)
        assert np.abs(M.entries).max() == 0.0

    def test_hand_pattern_n2_k1(self):
        M = O.assemble_volterra(Z2, W0, 2, 1, 4)
        # column j: I^2(e_j' 2z) -> entry (j+2, j) =
        #   2 j sqrt(j+1) / ((j+1)(j+2) sqrt(j+3))
        for j in (1, 2):
            want = 2 * j * math.sqrt(j + 1) / ((j + 1) * (j + 2)
                                               * math.sqrt(j + 3))
            assert M.entries[j + 2, j].real == pytest.approx(want, rel=1e-13)
        assert np.abs(M.entries[:, 0]).max() == 0.0

    def test_row_cap_records_dropped_mass(self):
        full = O.assemble_volterra(Z, W0, 1, 0, 12)
        capped = O.assemble_volterra(Z, W0, 1, 0, 12, max_rows=13)
        assert capped.entries.shape == (13, 13)
        assert capped.dropped_mass == pytest.approx(shift_values(13)[-1])
        assert full.dropped_mass == 0.0

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            O.assemble_volterra(Z, W0, 1, 1, 8)
        with pytest.raises(ParameterError):
            O.assemble_volterra(Z, W0, 2, 0, 1)


class TestToeplitzAssembly:
    def test_atom_at_origin(self):
        mu = O.AtomMeasure([0.0], [1.0])
        T = O.assemble_toeplitz(mu, W0, 0, 6)
        assert T.entries[0, 0] == pytest.approx(1.0)
        assert np.abs(T.entries).sum() == pytest.approx(1.0)

    def test_star_density_diagonal(self):
        T = O.assemble_toeplitz(O.StarDensity(Z, 1, 0), W0, 0, 10)
        d = np.diag(T.entries).real
        assert np.allclose(d, 1.0 / ((np.arange(11) + 1.0)
                                     * (np.arange(11) + 2.0)), atol=1e-12)
        off = T.entries - np.diag(np.diag(T.entries))
        assert np.abs(off).max() < 1e-14

    def test_hermitian_for_atoms(self):
        rng = np.random.default_rng(5)
        pts = 0.8 * (rng.random(6) + 1j * rng.random(6)) / math.sqrt(2)
        mu = O.AtomMeasure(pts, rng.random(6) + 0.1)
        T = O.assemble_toeplitz(mu, W0, 1, 9)
        assert np.abs(T.entries - T.entries.conj().T).max() < 1e-12
        assert np.abs(T.entries[0]).max() == 0.0  # rows below k vanish

    def test_adjoint_product_matches_star_density(self):
        for g in (Z, Z2):
            M = O.assemble_volterra(g, W0, 1, 0, 48)
            T = O.assemble_toeplitz(O.StarDensity(g, 1, 0), W0, 0, 48)
            gram = M.entries.conj().T @ M.entries
            assert np.abs(gram - T.entries).max() < 1e-9

    def test_radial_measures_are_diagonal(self):
        mu = O.RadialDensity(lambda s: (1.0 - s) ** 2, "power")
        T = O.assemble_toeplitz(mu, W0, 0, 8)
        off = T.entries - np.diag(np.diag(T.entries))
        assert np.abs(off).max() < 1e-14


class TestSpectra:
    def test_shift_singular_values(self):
        M = O.assemble_volterra(Z, W0, 1, 0, 100)
        sv = O.singular_values(M)
        want = np.sort(shift_values(101))[::-1]
        assert np.abs(sv - want).max() < 1e-10

    def test_zero_matrix(self):
        M = O.assemble_volterra(S.from_coeffs([1.0]), W0, 1, 0, 10)
        assert np.allclose(O.singular_values(M), 0.0)

    def test_rank_one_atom(self):
        T = O.assemble_toeplitz(O.AtomMeasure([0.0], [1.0]), W0, 0, 16)
        sv = O.singular_values(T)
        assert sv[0] == pytest.approx(1.0)
        assert sv[1] < 1e-13

    def test_schatten_telescoping(self):
        M = O.assemble_volterra(Z, W0, 1, 0, 64)
        s2 = O.schatten_norm(M, 2)
        assert s2 == pytest.approx(math.sqrt(1.0 - 1.0 / 66.0), abs=1e-12)
        assert O.schatten_norm(T := O.assemble_toeplitz(
            O.AtomMeasure([0.0], [1.0]), W0, 0, 8), 0.7) == \
            pytest.approx(1.0, abs=1e-10)

    def test_independent_tridiagonal_path(self):
        # Jacobi singular values against eigenvalues of the Gram matrix
        # computed by the library Hermitian solver
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50))
            M = O.OperatorMatrix(a, 49, "bergman", W0, "random")
            sv = O.singular_values(M)
            ev = np.linalg.eigvalsh(a.conj().T @ a)
            want = np.sqrt(np.clip(ev, 0.0, None))[::-1]
            assert np.abs(sv - want).max() < 1e-8

    def test_truncation_monotonicity(self):
        g = S.symbol("carleson", 64, a=0.5, gamma=2.0)
        norms = []
        for N in (8, 16, 32, 64):
            sv = O.singular_values(O.assemble_volterra(g, W0, 1, 0, N))
            norms.append(sv[0])
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


class TestGrowthScan:
    def test_operator_norm_saturates(self):
        scan = O.growth_scan(lambda n: O.assemble_volterra(Z, W0, 1, 0, n),
                             [32, 64, 128], "operator-norm")
        assert scan.verdict == "saturating"
        assert np.allclose(scan.values, 1.0 / math.sqrt(2.0), atol=1e-12)

    def test_schatten_one_grows_logarithmically(self):
        scan = O.growth_scan(lambda n: O.assemble_volterra(Z, W0, 1, 0, n),
                             [128, 256, 512], "schatten", p=1)
        assert scan.verdict == "growing"
        # oracle: partial sums of the closed-form singular values
        for n, v in zip(scan.ns, scan.values):
            assert v == pytest.approx(shift_values(n + 1).sum(), abs=1e-9)

    def test_suppression_on_dropped_mass(self):
        scan = O.growth_scan(
            lambda n: O.assemble_volterra(Z, W0, 1, 0, n, max_rows=n + 1),
            [16, 32, 64], "operator-norm")
        assert scan.suppressed

    def test_validation(self):
        with pytest.raises(ParameterError):
            O.growth_scan(lambda n: None, [8, 8, 16], "operator-norm")


class TestStarIteration:
    def test_n1_is_star(self):
        assert O.star_n(W0, 1, 0.5) == W0.star(0.5)

    def test_n2_matches_double_quadrature(self):
        inner = lambda t: (t * t - 1) / 4 - math.log(t) / 2
        want, _ = si.quad(lambda t: t * inner(t) * math.log(t / 0.9),
                          0.9, 1.0)
        assert O.star_n(W0, 2, 0.9) == pytest.approx(want, rel=1e-7)

    def test_n2_boundary_ratio(self):
        # for the flat weight star_2(r) ~ (1-r)^4 / 24 near the boundary
        for r in (0.99, 0.999):
            ratio = O.star_n(W0, 2, r) / ((1.0 - r) ** 3 * W0.hat(r))
            assert ratio == pytest.approx(1.0 / 24.0, rel=0.02)

    def test_unsupported_order(self):
        with pytest.raises(ParameterError):
            O.star_n(W0, 4, 0.5)


class TestExportsAndParsing:
    def test_binary_round_trip(self, tmp_path):
        M = O.assemble_volterra(Z, W0, 1, 0, 6)
        path = tmp_path / "m.bin"
        M.to_binary(path)
        back = O.OperatorMatrix.from_binary(path)
        assert np.array_equal(back.entries, M.entries)

    def test_csv_export(self, tmp_path):
        M = O.assemble_volterra(Z, W0, 1, 0, 3)
        path = tmp_path / "m.csv"
        M.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (5 * 4, 4)

    def test_parse_measures(self):
        mu = O.parse_measure("atom:re=0.5,im=0,mass=2")
        assert isinstance(mu, O.AtomMeasure)
        assert mu.masses[0] == 2.0
        mu = O.parse_measure("star:g=poly:0,1,n=1,k=0")
        assert isinstance(mu, O.StarDensity)
        assert mu.n == 1 and mu.k == 0
        assert np.allclose(mu.g.coeffs, [0, 1])
        mu = O.parse_measure("power:beta=1.5")
        assert isinstance(mu, O.RadialDensity)
        with pytest.raises(ParameterError):
            O.parse_measure("gauss:s=1")
