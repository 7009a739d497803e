"""Eigendecomposition contract, the secular solver, and the scan-statistic dual."""
import numpy as np
import pytest

from graphscan import (
    build_graph,
    center,
    chi_max,
    eig_sym,
    graph_spectrum,
    laplacian,
    sss,
    sss_primal_oracle,
    write_spectrum_csv,
)
from graphscan.spectral import _dual_objective, _reduced_coeffs
from helpers import draw_rho, random_connected_graph


def p2_spectrum():
    return graph_spectrum(build_graph(2, [(0, 1, 1.0)]))


class TestEigSym:
    def test_diagonal(self):
        spec = eig_sym(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(spec.eigenvalues, [1.0, 2.0, 3.0])

    def test_path_two(self):
        spec = p2_spectrum()
        np.testing.assert_allclose(spec.eigenvalues, [0.0, 2.0], atol=1e-12)
        ones = np.full(2, 1 / np.sqrt(2))
        assert min(
            np.abs(spec.eigenvectors[:, 0] - ones).max(),
            np.abs(spec.eigenvectors[:, 0] + ones).max(),
        ) < 1e-12

    def test_triangle(self):
        lap = 3 * np.eye(3) - np.ones((3, 3))
        np.testing.assert_allclose(eig_sym(lap).eigenvalues, [0.0, 3.0, 3.0], atol=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            eig_sym(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_spectrum_invariants_random(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            g = random_connected_graph(rng)
            lap = laplacian(g)
            spec = graph_spectrum(g)
            norm = np.abs(spec.eigenvalues).max()
            residual = lap @ spec.eigenvectors - spec.eigenvectors * spec.eigenvalues
            assert np.abs(residual).max() <= 1e-8 * (1 + norm)
            gram = spec.eigenvectors.T @ spec.eigenvectors
            assert np.abs(gram - np.eye(g.n)).max() <= 1e-10
            assert spec.eigenvalues[0] <= 1e-10
            assert spec.eigenvalues[1] > 0.0
            ones = np.full(g.n, 1 / np.sqrt(g.n))
            assert min(
                np.abs(spec.eigenvectors[:, 0] - ones).max(),
                np.abs(spec.eigenvectors[:, 0] + ones).max(),
            ) <= 1e-8

    def test_deterministic(self):
        m = np.random.default_rng(0).standard_normal((6, 6))
        m = m + m.T
        a, b = eig_sym(m), eig_sym(m)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)


class TestCenter:
    def test_already_centered(self):
        np.testing.assert_array_equal(center(np.array([1.0, -1.0])), [1.0, -1.0])

    def test_constant_maps_to_zero(self):
        np.testing.assert_allclose(center(np.full(5, 3.7)), 0.0, atol=1e-14)

    def test_subtracts_mean(self):
        np.testing.assert_allclose(center(np.array([2.0, 0.0, 1.0])), [1.0, -1.0, 0.0])

    def test_output_sums_to_zero(self):
        y = np.random.default_rng(1).uniform(-5, 5, 100)
        assert abs(center(y).sum()) <= 1e-10 * y.size


class TestChiMax:
    def test_nu_zero_is_rank_one(self):
        c = np.array([1.0, 2.0])
        assert chi_max(c, np.array([1.0, 2.0]), 0.0) == pytest.approx(5.0)

    def test_zero_coefficients_is_diagonal(self):
        assert chi_max(np.zeros(3), np.array([1.0, 2.0, 5.0]), 3.0) == pytest.approx(-3.0)

    def test_scalar_case(self):
        assert chi_max(np.array([1.5]), np.array([2.0]), 0.25) == pytest.approx(1.5**2 - 0.25 * 2.0)

    def test_rejects_nonpositive_lambdas(self):
        with pytest.raises(ValueError, match="positive"):
            chi_max(np.array([1.0]), np.array([0.0]), 1.0)

    def test_rejects_unsorted_lambdas(self):
        with pytest.raises(ValueError, match="ascending"):
            chi_max(np.array([1.0, 1.0]), np.array([2.0, 1.0]), 1.0)

    def test_matches_dense_eigendecomposition(self):
        rng = np.random.default_rng(11)
        for i in range(200):
            m = int(rng.integers(1, 14))
            lam = np.sort(rng.uniform(0.01, 5.0, m))
            c = rng.standard_normal(m)
            if i % 5 == 0:
                c[rng.integers(0, m)] = 0.0  # exercise deflation
            nu = float(rng.uniform(0.0, 10.0))
            dense = np.linalg.eigvalsh(np.outer(c, c) - nu * np.diag(lam))[-1]
            assert chi_max(c, lam, nu) == pytest.approx(dense, rel=1e-9, abs=1e-9)


class TestSss:
    def test_p2_ball_active(self):
        # 1-D reduced space: max t^2 * 2 over t^2 <= 1, 2 t^2 <= rho, rho = 2
        result = sss(p2_spectrum(), np.array([1.0, -1.0]), 2.0)
        assert result.value == pytest.approx(2.0, abs=1e-8)

    def test_p2_ellipsoid_active(self):
        result = sss(p2_spectrum(), np.array([1.0, -1.0]), 1.0)
        assert result.value == pytest.approx(1.0, abs=1e-8)

    def test_constant_observation_is_zero(self):
        result = sss(p2_spectrum(), np.array([4.0, 4.0]), 1.0)
        assert result.value == 0.0
        assert result.nu_star == 0.0

    def test_rejects_nonpositive_rho(self):
        with pytest.raises(ValueError, match="rho"):
            sss(p2_spectrum(), np.array([1.0, -1.0]), 0.0)

    def test_rejects_disconnected_spectrum(self):
        g = build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        spec = eig_sym(laplacian(g))
        with pytest.raises(ValueError, match="connected"):
            sss(spec, np.ones(4), 1.0)

    def test_witness_feasible_and_attaining(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            g = random_connected_graph(rng)
            spec = graph_spectrum(g)
            y = rng.standard_normal(g.n)
            rho = draw_rho(rng, spec.eigenvalues)
            result = sss(spec, y, rho)
            x = result.witness
            assert np.linalg.norm(x) <= 1 + 1e-9
            assert abs(x.sum()) <= 1e-9 * np.sqrt(g.n)
            assert x @ laplacian(g) @ x <= rho * (1 + 1e-6)
            attained = float(x @ center(y)) ** 2
            assert attained <= result.value + 1e-6 * (1 + result.value)
            nz = np.nonzero(np.abs(x) > 1e-12)[0]
            if nz.size:
                assert x[nz[0]] > 0  # sign convention

    @pytest.mark.parametrize("scale", [2.0, 10.0])
    def test_scale_equivariance(self, scale):
        rng = np.random.default_rng(23)
        for _ in range(20):
            g = random_connected_graph(rng)
            spec = graph_spectrum(g)
            y = rng.standard_normal(g.n)
            rho = draw_rho(rng, spec.eigenvalues)
            base = sss(spec, y, rho).value
            scaled = sss(spec, scale * y, rho).value
            assert scaled == pytest.approx(scale**2 * base, rel=1e-9, abs=1e-12)

    def test_dual_objective_midpoint_convexity(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            g = random_connected_graph(rng)
            spec = graph_spectrum(g)
            y = rng.standard_normal(g.n)
            rho = draw_rho(rng, spec.eigenvalues)
            c, lambdas = _reduced_coeffs(spec, y)
            grid = np.linspace(0.0, float(c @ c) / rho, 100)
            f = np.array([_dual_objective(c, lambdas, nu, rho) for nu in grid])
            chord_minus_mid = 0.5 * (f[:-2] + f[2:]) - f[1:-1]
            tol = 1e-9 * (1.0 + np.abs(f).max())
            assert chord_minus_mid.min() >= -tol


class TestPrimalOracle:
    def test_p2_cases(self):
        spec = p2_spectrum()
        y = np.array([1.0, -1.0])
        assert sss_primal_oracle(spec, y, 2.0) == pytest.approx(2.0, abs=1e-10)
        assert sss_primal_oracle(spec, y, 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_centered_zero(self):
        assert sss_primal_oracle(p2_spectrum(), np.array([5.0, 5.0]), 1.0) == 0.0

    def test_dual_primal_agreement(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            g = random_connected_graph(rng)
            spec = graph_spectrum(g)
            y = rng.standard_normal(g.n)
            rho = draw_rho(rng, spec.eigenvalues)
            dual = sss(spec, y, rho).value
            primal = sss_primal_oracle(spec, y, rho)
            assert dual >= primal - 1e-8
            assert abs(dual - primal) <= 1e-6 * (1 + dual)


class TestSpectrumCsv:
    def test_eigenvalue_file(self, tmp_path):
        spec = p2_spectrum()
        path = tmp_path / "eigs.csv"
        write_spectrum_csv(spec, path)
        values = [float(line) for line in path.read_text().splitlines()]
        np.testing.assert_allclose(values, spec.eigenvalues, atol=1e-16)

    def test_vectors_file_column_major(self, tmp_path):
        spec = p2_spectrum()
        write_spectrum_csv(spec, tmp_path / "e.csv", vectors_path=tmp_path / "v.csv")
        values = [float(line) for line in (tmp_path / "v.csv").read_text().splitlines()]
        expected = np.concatenate([spec.eigenvectors[:, 0], spec.eigenvectors[:, 1]])
        np.testing.assert_allclose(values, expected, atol=1e-16)
