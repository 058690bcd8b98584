"""Subspace DOA estimation: root and spectral MUSIC, detection logic."""

from __future__ import annotations

import numpy as np
import pytest

from modoa import (
    ArrayGeometry,
    ComplexCovariance,
    DoaEstimate,
    SourceScene,
    detect,
    pseudo_spectrum,
    root_music,
    simulate_snapshots,
    spectral_music,
    theoretical_covariance,
)

EXACT_SCENES = [
    (ArrayGeometry.ula(8), SourceScene((0.0,), (10.0,), 1.0, 10)),
    (ArrayGeometry.ula(8), SourceScene((-10.0, 10.0), (5.0, 5.0), 1.0, 10)),
    (
        ArrayGeometry.ula(16),
        SourceScene.from_snrs([-2.0, 3.0, 75.0], [30.0, -10.0, 15.0], 1.0, 10),
    ),
]


class TestRootMusic:
    @pytest.mark.parametrize("geometry,scene", EXACT_SCENES)
    def test_exact_on_theoretical_covariance(self, geometry, scene):
        cov = theoretical_covariance(scene, geometry)
        est = root_music(cov, scene.n_sources, geometry)
        assert len(est.angles_deg) == scene.n_sources
        err = np.abs(np.asarray(est.angles_deg) - np.sort(scene.doas_deg)).max()
        assert err <= 1e-6
        assert not est.shortfall

    def test_angles_sorted_and_eigen_spectrum_descending(self):
        geometry, scene = EXACT_SCENES[2]
        est = root_music(theoretical_covariance(scene, geometry), 3, geometry)
        angles = list(est.angles_deg)
        assert angles == sorted(angles)
        spec = list(est.eigen_spectrum)
        assert spec == sorted(spec, reverse=True)
        assert len(spec) == geometry.n_sensors

    def test_noisy_sample_covariance(self):
        geometry, scene = EXACT_SCENES[1]
        scene = SourceScene(scene.doas_deg, scene.source_powers, scene.noise_power, 20_000)
        batch = simulate_snapshots(scene, geometry, seed=33)
        emp = (batch.data @ batch.data.conj().T) / scene.snapshots
        est = root_music(ComplexCovariance(0.5 * (emp + emp.conj().T)), 2, geometry)
        err = np.abs(np.asarray(est.angles_deg) - np.asarray(scene.doas_deg)).max()
        assert err < 0.05

    def test_rejects_sparse_geometry(self):
        geo = ArrayGeometry.coprime(2, 3)
        cov = theoretical_covariance(SourceScene((5.0,), (10.0,), 1.0, 10), geo)
        with pytest.raises(ValueError, match="spectral_music"):
            root_music(cov, 1, geo)

    def test_rejects_bad_source_count(self):
        cov = np.eye(4) + 0j
        with pytest.raises(ValueError):
            root_music(cov, 0, ArrayGeometry.ula(4))
        with pytest.raises(ValueError):
            root_music(cov, 4, ArrayGeometry.ula(4))

    def test_null_polynomial_coefficients_conjugate_palindromic(self):
        # roots of the null spectrum pair as (r, 1/conj(r)); equivalently
        # the coefficient sequence reversed equals its conjugate
        from modoa.doa_subspace import _noise_projector, _null_poly

        geometry, scene = EXACT_SCENES[1]
        cov = ComplexCovariance(theoretical_covariance(scene, geometry))
        proj, _ = _noise_projector(cov, 2)
        poly = _null_poly(proj)
        assert np.allclose(poly, poly[::-1].conj(), atol=1e-12)


class TestSpectralMusic:
    def test_agrees_with_root_on_ula(self):
        geometry, scene = EXACT_SCENES[2]
        cov = theoretical_covariance(scene, geometry)
        root = np.asarray(root_music(cov, 3, geometry).angles_deg)
        spec = spectral_music(cov, 3, geometry)
        assert not spec.shortfall
        assert np.abs(np.asarray(spec.angles_deg) - root).max() <= 1e-3

    def test_coprime_array(self):
        geo = ArrayGeometry.coprime(3, 5)
        scene = SourceScene((-20.0, 20.0), (10.0, 10.0), 1.0, 10)
        est = spectral_music(theoretical_covariance(scene, geo), 2, geo)
        assert not est.shortfall
        assert np.abs(np.asarray(est.angles_deg) - np.array([-20.0, 20.0])).max() <= 1e-3

    def test_shortfall_flagged_when_grid_has_no_peak(self):
        # a two-point grid has no interior sample, so no local maximum exists
        est = spectral_music(np.eye(6) + 0j, 1, ArrayGeometry.ula(6), grid_step=80.0)
        assert est.shortfall
        assert est.angles_deg == ()

    def test_pseudo_spectrum_peaks_at_source(self):
        geo = ArrayGeometry.ula(8)
        scene = SourceScene((12.0,), (100.0,), 1.0, 10)
        grid = np.arange(-90.0, 90.0, 0.25)
        ps = pseudo_spectrum(theoretical_covariance(scene, geo), 1, geo, grid)
        assert ps.shape == grid.shape
        assert grid[np.argmax(ps)] == pytest.approx(12.0, abs=0.25)


class TestDetect:
    def test_tolerance_boundary(self):
        truth = [-2.0, 3.0]
        assert detect(truth, np.array([-2.04, 3.09]), tol=0.1)
        assert not detect(truth, np.array([-2.04, 3.11]), tol=0.1)

    def test_every_source_needs_a_match(self):
        truth = [-2.0, 3.0]
        assert not detect(truth, np.array([3.0]), tol=0.1)
        # one estimate cannot cover two well-separated sources
        assert not detect(truth, np.array([0.5]), tol=0.1)
        # extra spurious estimates do not hurt
        assert detect(truth, np.array([-50.0, -2.0, 3.0, 80.0]), tol=0.1)

    def test_empty_estimate_fails(self):
        assert not detect([0.0], np.array([]), tol=0.1)

    def test_accepts_doa_estimate_object(self):
        est = DoaEstimate(angles_deg=(-2.0, 3.0), eigen_spectrum=(3.0, 1.0))
        assert detect([-2.0, 3.0], est, tol=0.1)


class TestDoaEstimateType:
    def test_validation(self):
        with pytest.raises(ValueError):
            DoaEstimate(angles_deg=(3.0, -2.0), eigen_spectrum=(1.0,))
        with pytest.raises(ValueError):
            DoaEstimate(angles_deg=(95.0,), eigen_spectrum=(1.0,))
        est = DoaEstimate(angles_deg=(-90.0, 90.0), eigen_spectrum=(2.0, 1.0))
        assert est.angles_deg == (-90.0, 90.0)
