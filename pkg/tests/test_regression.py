"""Tests for the noisy-target regressor and its quantile behavior."""

import numpy as np
import pytest

from oracle_eval import make_bundle

from boxalign.errors import NonConvergenceError
from boxalign.geometry import Box, SizeCategory
from boxalign.losses import AsymmetricLossParams
from boxalign.regression import NoiseConfig, fit_scalar, simulate_detector


def mixed_size_bundle(n_per_size=10):
    """Synthetic single-image dataset with small, medium and large objects,
    placed so that grown fits never reach the image border."""
    gt_specs = []
    ann = 0
    shapes = {
        "small": (20, 24),
        "medium": (50, 60),
        "large": (120, 150),
    }
    for col, (w, h) in enumerate(shapes.values()):
        for row in range(n_per_size):
            ann += 1
            x = 300 + 900 * col
            y = 250 + 300 * row
            gt_specs.append((ann, 1, 1, Box(x, y, w, h)))
    return make_bundle({1: (3000, 3400)}, gt_specs)


class TestFitScalar:
    def test_constant_targets_fixed_point(self):
        p = AsymmetricLossParams(alpha=9.0, beta=0.5)
        assert fit_scalar([3.25] * 50, p, lr=0.1, iters=100) == pytest.approx(
            3.25, abs=1e-9
        )

    def test_symmetric_loss_finds_median(self):
        rng = np.random.default_rng(8)
        targets = rng.uniform(-1, 1, size=20000)
        p = AsymmetricLossParams(alpha=1.0, beta=0.01)
        w = fit_scalar(targets, p, lr=0.1, iters=20000)
        # Standard error of the median of U(-1, 1) is 1/sqrt(N).
        se = 1.0 / np.sqrt(targets.size)
        assert abs(w - np.median(targets)) < 2 * se

    def test_quantile_law_alpha_four(self):
        rng = np.random.default_rng(17)
        targets = rng.uniform(-1, 1, size=100_000)
        p = AsymmetricLossParams(alpha=4.0, beta=0.01)
        w = fit_scalar(targets, p, lr=0.1, iters=20000)
        fraction_below = float(np.mean(targets < w))
        assert fraction_below == pytest.approx(0.8, abs=0.02)

    def test_nonconvergence_reports_gradient(self):
        rng = np.random.default_rng(3)
        targets = rng.uniform(-1, 1, size=1000)
        p = AsymmetricLossParams(alpha=100.0, beta=0.01)
        with pytest.raises(NonConvergenceError) as err:
            fit_scalar(targets, p, lr=1e-6, iters=5)
        assert err.value.final_gradient > 0

    def test_input_validation(self):
        p = AsymmetricLossParams(alpha=1.0, beta=1.0)
        with pytest.raises(ValueError):
            fit_scalar([], p, lr=0.1, iters=10)
        with pytest.raises(ValueError):
            fit_scalar([1.0], p, lr=-0.1, iters=10)


class TestSimulateDetector:
    def test_symmetric_loss_is_unbiased(self):
        bundle = mixed_size_bundle()
        noise = NoiseConfig("uniform", 0.25, seed=4)
        outcome = simulate_detector(
            bundle, noise, AsymmetricLossParams(alpha=1.0, beta=1.0)
        )
        assert outcome.fraction_larger == pytest.approx(0.5, abs=0.06)
        assert outcome.mean_scale_ratio == pytest.approx(1.0, abs=0.08)
        assert outcome.ap_report.ap > 0.5

    def test_alpha_ten_matches_quantile_band(self):
        bundle = mixed_size_bundle()
        noise = NoiseConfig("uniform", 0.25, seed=4)
        outcome = simulate_detector(
            bundle, noise, AsymmetricLossParams(alpha=10.0, beta=0.5)
        )
        # Quantile law: 10/11 of prediction events come out larger.
        assert 0.80 <= outcome.fraction_larger <= 0.95
        assert outcome.mean_scale_ratio > 1.1

    def test_monotone_alpha_sweep(self):
        bundle = mixed_size_bundle()
        noise = NoiseConfig("uniform", 0.25, seed=11)
        fractions = []
        ratios = []
        aps = []
        for alpha in (1.0, 4.0, 10.0, 100.0):
            outcome = simulate_detector(
                bundle, noise, AsymmetricLossParams(alpha=alpha, beta=0.5)
            )
            fractions.append(outcome.fraction_larger)
            ratios.append(outcome.mean_scale_ratio)
            aps.append(outcome.ap_report.ap)
        assert all(a < b for a, b in zip(fractions, fractions[1:]))
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        assert all(a >= b for a, b in zip(aps, aps[1:]))

    def test_deterministic_for_seed(self):
        bundle = mixed_size_bundle(n_per_size=4)
        noise = NoiseConfig("uniform", 0.2, seed=123)
        p = AsymmetricLossParams(alpha=4.0, beta=0.5)
        first = simulate_detector(bundle, noise, p)
        second = simulate_detector(bundle, noise, p)
        assert first == second

    def test_per_size_breakdown(self):
        bundle = mixed_size_bundle()
        noise = NoiseConfig("uniform", 0.25, seed=9)
        outcome = simulate_detector(
            bundle, noise, AsymmetricLossParams(alpha=10.0, beta=0.5)
        )
        assert set(outcome.per_size) == {
            SizeCategory.SMALL,
            SizeCategory.MEDIUM,
            SizeCategory.LARGE,
        }
        for breakdown in outcome.per_size.values():
            assert breakdown.count == 10
            assert breakdown.mean_scale_ratio > 1.0

    def test_gaussian_noise_supported(self):
        bundle = mixed_size_bundle(n_per_size=4)
        noise = NoiseConfig("gaussian", 0.1, seed=2)
        outcome = simulate_detector(
            bundle, noise, AsymmetricLossParams(alpha=4.0, beta=0.5)
        )
        assert 0.6 <= outcome.fraction_larger <= 0.95

    def test_noise_validation(self):
        with pytest.raises(ValueError):
            NoiseConfig("uniform", 1.5)
        with pytest.raises(ValueError):
            NoiseConfig("poisson", 0.5)
        with pytest.raises(ValueError):
            NoiseConfig("gaussian", 0.0)
