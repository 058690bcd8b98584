"""Fold, midpoint quantizer, comparator, and ADC front ends."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modoa import (
    ConventionalAdcParams,
    ModuloQuantizerParams,
    SourceScene,
    conventional_adc,
    default_clip_threshold,
    default_modulo_range,
    modulo_fold,
    modulo_sample,
    onebit_sample,
    quantize_batch,
    simulate_snapshots,
    uniform_quantize,
)
from modoa.array_model import ArrayGeometry

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
fold_ranges = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


class TestModuloFold:
    def test_hand_values(self):
        lam = 2.0
        assert modulo_fold(0.5, lam) == 0.5
        assert modulo_fold(2.0, lam) == -2.0  # right edge wraps (half-open)
        assert modulo_fold(-2.0, lam) == -2.0  # left edge is included
        assert modulo_fold(2.5, lam) == pytest.approx(-1.5)
        assert modulo_fold(-2.5, lam) == pytest.approx(1.5)
        assert modulo_fold(9.0, lam) == pytest.approx(1.0)

    def test_passthrough_is_bit_exact(self):
        lam = 1.7
        z = np.linspace(-lam, np.nextafter(lam, 0), 1001)
        assert np.array_equal(modulo_fold(z, lam), z)

    @given(z=finite_floats, lam=fold_ranges, k=st.integers(-20, 20))
    @settings(max_examples=300, deadline=None)
    def test_periodicity(self, z, lam, k):
        shifted = z + 2.0 * lam * k
        if abs(shifted) > 1e7:
            return
        a = modulo_fold(z, lam)
        b = modulo_fold(shifted, lam)
        tol = 1e-9 * max(1.0, abs(shifted))
        width = 2.0 * lam
        diff = abs(a - b)
        assert diff <= tol or abs(diff - width) <= tol

    @given(z=finite_floats, lam=fold_ranges)
    @settings(max_examples=300, deadline=None)
    def test_range_and_idempotence(self, z, lam):
        out = modulo_fold(z, lam)
        assert -lam <= out < lam
        assert modulo_fold(out, lam) == out

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            modulo_fold(np.inf, 1.0)
        with pytest.raises(ValueError):
            modulo_fold(1.0, 0.0)


class TestUniformQuantize:
    def test_reproduction_points(self):
        lam, bits = 1.0, 2
        d = 2**bits
        centers = -lam + (2 * np.arange(d) + 1) * lam / d
        # any input in cell l maps to the midpoint of cell l
        probes = -lam + (np.arange(d) + 0.3) * 2 * lam / d
        assert np.allclose(uniform_quantize(probes, bits, lam), centers, atol=1e-15)

    def test_zero_maps_positive(self):
        # zero sits on a cell boundary and lands in the first positive cell
        lam, bits = 2.0, 4
        out = uniform_quantize(0.0, bits, lam)
        assert out == pytest.approx(lam / 2**bits)
        assert out > 0

    @given(z=st.floats(-0.999, 0.999), bits=st.integers(1, 10))
    @settings(max_examples=300, deadline=None)
    def test_error_bound(self, z, bits):
        lam = 1.0
        out = uniform_quantize(z, bits, lam)
        assert abs(out - z) <= lam / 2**bits * (1 + 1e-12)
        assert -lam < out < lam

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            uniform_quantize(1.0, 3, 1.0)  # right edge excluded
        with pytest.raises(ValueError):
            uniform_quantize(-1.0001, 3, 1.0)
        uniform_quantize(-1.0, 3, 1.0)  # left edge included

    def test_params_properties(self):
        p = ModuloQuantizerParams(bits=4, modulo_range=2.0)
        assert p.levels == 16
        assert p.step == pytest.approx(4.0 / 16)
        with pytest.raises(ValueError):
            ModuloQuantizerParams(bits=0, modulo_range=1.0)
        with pytest.raises(ValueError):
            ModuloQuantizerParams(bits=4, modulo_range=-1.0)


class TestOnebit:
    def test_signs_and_modulus(self):
        z = np.array([[1.5 - 2.0j, -0.25 + 0.75j, 0.0 + 0.0j]])
        h = onebit_sample(z)
        inv = 1 / np.sqrt(2)
        expected = np.array([[inv - 1j * inv, -inv + 1j * inv, inv + 1j * inv]])
        assert np.array_equal(h, expected)
        assert np.allclose(np.abs(h), 1.0, atol=1e-15)

    def test_negative_zero_rail(self):
        h = onebit_sample(np.array([-0.0 - 0.0j]))
        inv = 1 / np.sqrt(2)
        assert h[0] == inv + 1j * inv


class TestModuloSample:
    def test_composition(self):
        rng = np.random.default_rng(0)
        g = rng.normal(size=(4, 32)) + 1j * rng.normal(size=(4, 32))
        params = ModuloQuantizerParams(bits=3, modulo_range=0.8)
        y = modulo_sample(g, params)
        re = uniform_quantize(modulo_fold(g.real, 0.8), 3, 0.8)
        im = uniform_quantize(modulo_fold(g.imag, 0.8), 3, 0.8)
        assert np.array_equal(y, re + 1j * im)

    def test_error_within_step_after_fold(self):
        rng = np.random.default_rng(1)
        g = 5.0 * (rng.normal(size=256) + 1j * rng.normal(size=256))
        params = ModuloQuantizerParams(bits=5, modulo_range=1.25)
        y = modulo_sample(g, params)
        folded = modulo_fold(g.real, 1.25) + 1j * modulo_fold(g.imag, 1.25)
        err = np.abs((y - folded).real).max()
        assert err <= 1.25 / 32 * (1 + 1e-12)


class TestConventionalAdc:
    def test_clipping_saturates_to_top_cell(self):
        params = ConventionalAdcParams(bits=3, threshold=1.0)
        d = 2**3
        out = conventional_adc(np.array([50.0 + 50.0j, -50.0 - 50.0j]), params)
        top = 1.0 - 1.0 / d
        assert out[0] == pytest.approx(top + 1j * top)
        assert out[1] == pytest.approx(-top - 1j * top)

    def test_error_bound_inside_range(self):
        rng = np.random.default_rng(2)
        g = 0.9 * (2 * rng.random(512) - 1) + 1j * 0.9 * (2 * rng.random(512) - 1)
        params = ConventionalAdcParams(bits=6, threshold=1.0)
        out = conventional_adc(g, params)
        assert np.abs((out - g).real).max() <= 1 / 64 * (1 + 1e-12)
        assert np.abs((out - g).imag).max() <= 1 / 64 * (1 + 1e-12)


class TestBatchAndDefaults:
    def test_quantize_batch_consistent(self):
        scene = SourceScene.from_snrs([10.0], [15.0], snapshots=64)
        batch = simulate_snapshots(scene, ArrayGeometry.ula(3), seed=9)
        params = ModuloQuantizerParams(bits=4, modulo_range=default_modulo_range(scene))
        q = quantize_batch(batch, params)
        assert np.array_equal(q.onebit, onebit_sample(batch.data))
        assert np.array_equal(q.modulo, modulo_sample(batch.data, params))
        assert q.params == params

    def test_default_scales(self):
        scene = SourceScene((0.0, 40.0), (3.0, 5.0), 1.0, 10)
        rail_sd = np.sqrt((3.0 + 5.0) / 2)
        assert default_modulo_range(scene) == pytest.approx(rail_sd)
        assert default_modulo_range(scene, 0.55) == pytest.approx(0.55 * rail_sd)
        assert default_clip_threshold(scene) == pytest.approx(4.0 * rail_sd)
        assert default_clip_threshold(scene, 3.6) == pytest.approx(3.6 * rail_sd)
        with pytest.raises(ValueError):
            default_modulo_range(scene, 0.0)
