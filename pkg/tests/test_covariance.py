"""One-bit covariance, arcsine law, real-composite maps, PSD projection."""

from __future__ import annotations

import numpy as np
import pytest

from modoa import (
    ArrayGeometry,
    ComplexCovariance,
    RealCompositeCovariance,
    SourceScene,
    arcsin_law,
    complex_to_real_composite,
    onebit_empirical_covariance,
    onebit_sample,
    psd_project,
    real_composite_to_complex,
    simulate_snapshots,
    theoretical_covariance,
)


class TestWrappers:
    def test_complex_requires_hermitian(self):
        with pytest.raises(ValueError):
            ComplexCovariance(np.array([[1.0, 1.0j], [1.0j, 1.0]]))
        ComplexCovariance(np.array([[1.0, 1.0j], [-1.0j, 1.0]]))

    def test_real_requires_symmetric(self):
        with pytest.raises(ValueError):
            RealCompositeCovariance(np.array([[1.0, 0.2], [0.3, 1.0]]))
        assert RealCompositeCovariance(np.eye(4)).dim == 4


class TestOnebitCovariance:
    def test_hand_example(self):
        inv = 1 / np.sqrt(2)
        h = np.array(
            [
                [inv + 1j * inv, -inv + 1j * inv],
                [inv - 1j * inv, inv + 1j * inv],
            ]
        )
        c = onebit_empirical_covariance(h).matrix
        manual = (h @ h.conj().T) / 2
        manual = 0.5 * (manual + manual.conj().T)
        np.fill_diagonal(manual, 1.0)
        assert np.array_equal(c, manual)
        assert np.array_equal(np.diag(c), np.ones(2))

    def test_rejects_non_unit_modulus(self):
        with pytest.raises(ValueError):
            onebit_empirical_covariance(np.array([[0.5 + 0.5j, 1.0 + 0.0j]]))


class TestArcsinLaw:
    def test_elementwise_formula(self):
        c = np.array([[1.0, 0.4 - 0.2j], [0.4 + 0.2j, 1.0]])
        out = arcsin_law(ComplexCovariance(c)).matrix
        expected01 = np.sin(np.pi / 2 * 0.4) + 1j * np.sin(np.pi / 2 * -0.2)
        assert out[0, 1] == pytest.approx(expected01, abs=1e-15)
        assert np.array_equal(np.diag(out), np.ones(2))

    def test_diagonal_pinned_exactly(self):
        rng = np.random.default_rng(3)
        h = onebit_sample(rng.normal(size=(4, 500)) + 1j * rng.normal(size=(4, 500)))
        out = arcsin_law(onebit_empirical_covariance(h)).matrix
        assert np.array_equal(np.diag(out).real, np.ones(4))
        assert np.array_equal(np.diag(out).imag, np.zeros(4))

    def test_rejects_oversized_entries(self):
        bad = np.array([[1.0, 1.5], [1.5, 1.0]])
        with pytest.raises(ValueError):
            arcsin_law(ComplexCovariance(bad + 0j))

    def test_monte_carlo_recovers_normalized_covariance(self):
        # Oracle: one-bit covariance + arcsine vs the scene's true
        # normalized covariance, estimated from 2e5 snapshots.
        scene = SourceScene.from_snrs([-5.0, 12.0], [18.0, 12.0], snapshots=200_000)
        geo = ArrayGeometry.ula(4)
        batch = simulate_snapshots(scene, geo, seed=21)
        h = onebit_sample(batch.data)
        recovered = arcsin_law(onebit_empirical_covariance(h)).matrix
        truth = theoretical_covariance(scene, geo)
        d = np.sqrt(np.diag(truth).real)
        normalized = truth / np.outer(d, d)
        assert np.abs(recovered - normalized).max() < 0.02


class TestRealCompositeMaps:
    def test_block_structure(self):
        c = np.array([[2.0, 0.3 - 0.7j], [0.3 + 0.7j, 1.5]])
        r = complex_to_real_composite(ComplexCovariance(c)).matrix
        re, im = c.real, c.imag
        assert np.array_equal(r[:2, :2], re)
        assert np.array_equal(r[2:, 2:], re)
        assert np.array_equal(r[:2, 2:], -im)
        assert np.array_equal(r[2:, :2], im)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        c = a @ a.conj().T
        back = real_composite_to_complex(complex_to_real_composite(ComplexCovariance(c)))
        assert np.allclose(back.matrix, c, atol=1e-12)

    def test_eigenvalues_doubled(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        c = a @ a.conj().T
        c = 0.5 * (c + c.conj().T)
        ev_c = np.sort(np.linalg.eigvalsh(c))
        ev_r = np.sort(np.linalg.eigvalsh(complex_to_real_composite(ComplexCovariance(c)).matrix))
        assert np.allclose(ev_r, np.repeat(ev_c, 2), atol=1e-10)

    def test_accepts_raw_arrays(self):
        c = np.eye(3) + 0j
        r = complex_to_real_composite(c)
        assert np.array_equal(r.matrix, np.eye(6))
        assert np.array_equal(real_composite_to_complex(np.eye(6)).matrix, np.eye(3))


class TestPsdProject:
    def test_negative_eigenvalue_clipped(self):
        m = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
        out = psd_project(RealCompositeCovariance(m), floor_scale=1e-8).matrix
        vals = np.linalg.eigvalsh(out)
        assert vals.min() >= 3 * 1e-8 * (1 - 1e-12)
        assert vals.max() == pytest.approx(3.0, rel=1e-12)
        # eigenvectors unchanged: projected matrix still diagonal in (1,1)/(1,-1)
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        assert v @ out @ v == pytest.approx(3.0, rel=1e-12)

    def test_psd_input_returned_unchanged(self):
        m = np.array([[2.0, 0.5], [0.5, 1.0]])
        cov = RealCompositeCovariance(m)
        assert psd_project(cov) is cov

    def test_rejects_all_nonpositive(self):
        with pytest.raises(ValueError):
            psd_project(RealCompositeCovariance(-np.eye(2)))
