import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveshrink.shrinkage import (
    ShrinkageConfig,
    apply_threshold,
    compute_levels,
    compute_threshold,
    hard_threshold,
    min_samples,
    shrink,
    soft_threshold,
)
from waveshrink.transform import haar_dwt

finite = st.floats(-1e9, 1e9, allow_nan=False, allow_infinity=False)
lams = st.floats(0, 1e6, allow_nan=False, allow_infinity=False)


class TestThresholdFunctions:
    @given(finite, lams)
    def test_soft_moves_by_at_most_lambda(self, x, lam):
        out = float(soft_threshold(x, lam))
        assert abs(out - x) <= lam + 1e-12 * max(1.0, abs(x))
        assert abs(out) <= abs(x)

    @given(finite, lams)
    def test_small_values_zeroed(self, x, lam):
        if abs(x) <= lam:
            assert float(soft_threshold(x, lam)) == 0.0
            assert float(hard_threshold(x, lam)) == 0.0
        else:
            assert float(hard_threshold(x, lam)) == x
            assert np.sign(soft_threshold(x, lam)) == np.sign(x)

    @given(st.lists(finite, min_size=1, max_size=20), lams)
    def test_vectorized_matches_scalar(self, xs, lam):
        xs = np.asarray(xs)
        assert np.array_equal(soft_threshold(xs, lam),
                              [soft_threshold(x, lam) for x in xs])

    def test_negative_lambda_rejected(self):
        for fn in (soft_threshold, hard_threshold):
            with pytest.raises(ValueError):
                fn(1.0, -0.1)

    def test_apply_threshold_leaves_approx_alone(self):
        pyr = haar_dwt(np.arange(16.0), 1)
        out = apply_threshold(pyr, 1e9, "soft")
        assert np.array_equal(out.approx, pyr.approx)
        assert all(np.all(d == 0) for d in out.details)
        with pytest.raises(ValueError):
            apply_threshold(pyr, 1.0, "medium")


class TestThresholdFormula:
    def test_reference_values(self):
        assert compute_threshold(256, 0.0, 1.0) == pytest.approx(
            (1 + 2 * math.sqrt(math.log(2))) * math.sqrt(8 / 256), rel=1e-12)
        assert compute_threshold(256, 0.0, 1.0) == pytest.approx(0.47113, abs=5e-6)
        assert compute_threshold(512, 1.0, 1.0) == pytest.approx(0.44479, abs=5e-6)

    @given(st.integers(1, 20), st.floats(0, 10, allow_nan=False),
           st.floats(0.01, 10, allow_nan=False))
    @settings(max_examples=50)
    def test_monotonicity(self, log_n, delta, b):
        n = 2 ** log_n
        lam = compute_threshold(n, delta, b)
        assert compute_threshold(n, delta + 0.5, b) > lam
        assert compute_threshold(n, delta, 2 * b) == pytest.approx(2 * lam)
        assert compute_threshold(n, delta, b, c_phi=1.5) == pytest.approx(1.5 * lam)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            compute_threshold(100, 1.0, 1.0)
        with pytest.raises(ValueError):
            compute_threshold(256, -0.1, 1.0)
        with pytest.raises(ValueError):
            compute_threshold(256, 1.0, 0.0)
        with pytest.raises(ValueError):
            compute_threshold(256, 1.0, 1.0, c_phi=0.5)


class TestLevelsAndMinSamples:
    def test_levels_reference(self):
        lv = compute_levels(512, 1.0)
        assert (lv.finest, lv.coarse, lv.boundary) == (9, 0, 2)

    def test_coarse_level_zero_for_low_smoothness(self):
        for alpha in (0.25, 0.5, 1.0):
            assert compute_levels(4096, alpha).coarse == 0

    def test_coarse_level_for_high_smoothness(self):
        # J0 = 1 + ceil(log2(2 ceil(alpha) - 1))
        n = 2 ** 25
        assert compute_levels(n, 2.0).coarse == 1 + math.ceil(math.log2(3))

    def test_too_small_n_raises(self):
        with pytest.raises(ValueError):
            compute_levels(1024, 2.0)

    def test_min_samples(self):
        assert min_samples(1.0) == (512.0, 512)
        ms = min_samples(2.0)
        assert abs(ms.raw / 1.1e7 - 1.0) < 0.01
        assert ms.padded == 2 ** math.ceil(math.log2(ms.raw))
        with pytest.raises(ValueError):
            min_samples(0.0)

    @given(st.floats(0.05, 1.0, allow_nan=False))
    def test_min_samples_low_smoothness_constant(self, alpha):
        assert min_samples(alpha).padded == 512


class TestConfigAndPipeline:
    def test_build_matches_formula(self):
        cfg = ShrinkageConfig.build(1024, 1.0, 1.0, 1.0, 1.0)
        assert cfg.threshold == pytest.approx(
            compute_threshold(1024, 1.0, 1.0), rel=1e-15)
        assert cfg.coarse_level == 0

    def test_wrong_threshold_rejected(self):
        cfg = ShrinkageConfig.build(1024, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            ShrinkageConfig(
                n=cfg.n, alpha=cfg.alpha, holder_const=cfg.holder_const,
                noise_bound=cfg.noise_bound, delta=cfg.delta,
                system_const=cfg.system_const, system=cfg.system,
                moments=cfg.moments, coarse_level=cfg.coarse_level,
                boundary_level=cfg.boundary_level,
                threshold=cfg.threshold * 1.01, mode=cfg.mode,
            )

    def test_interval_build_needs_system_const(self):
        with pytest.raises(ValueError):
            ShrinkageConfig.build(1024, 1.0, 1.0, 1.0, 1.0, system="interval")

    def test_noise_free_shrink_preserves_constant(self):
        cfg = ShrinkageConfig.build(256, 1.0, 1.0, 1.0, 0.0)
        y = np.full(256, 3.0)
        assert np.max(np.abs(shrink(y, cfg) - y)) < 1e-12

    def test_shrink_reduces_noise_energy(self):
        rng = np.random.default_rng(11)
        n = 4096
        f = np.abs(np.arange(1, n + 1) / n - 0.5)
        y = f + rng.uniform(-0.5, 0.5, n)
        cfg = ShrinkageConfig.build(n, 1.0, 1.0, 1.0, 1.0)
        out = shrink(y, cfg)
        assert np.mean((out - f) ** 2) < 0.5 * np.mean((y - f) ** 2)

    def test_length_mismatch(self):
        cfg = ShrinkageConfig.build(256, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            shrink(np.zeros(128), cfg)
