import numpy as np
import pytest
from scipy.stats import chisquare

from hedgekit.core import InputError
from hedgekit.distort import (
    ALL_GROUPS,
    INTENSITY_GRIDS,
    AffineParams,
    AugParams,
    DistortionGroup,
    DistortionPlan,
    PixelBuffer,
    apply_blur,
    apply_brightness,
    apply_color_shift,
    apply_contrast,
    apply_jpeg,
    apply_noise,
    apply_plan,
    apply_resize,
    apply_spatial,
    chain_degrade,
    draw_severity,
    perturbation_tag,
    resize_factor_for_severity,
    sample_plan,
    severity_to_params,
    severity_weights,
    sweep,
)
from hedgekit.pixelio import default_jpeg_codec

needs_jpeg = pytest.mark.skipif(
    default_jpeg_codec() is None, reason="no JPEG codec adapter configured"
)


def random_buffer(rng, h=32, w=32):
    return PixelBuffer(rng.random((h, w, 3)))


class TestPixelBuffer:
    def test_shape_and_range_enforced(self):
        with pytest.raises(InputError):
            PixelBuffer(np.zeros((4, 4)))
        with pytest.raises(InputError):
            PixelBuffer(np.full((4, 4, 3), 1.5))
        with pytest.raises(InputError):
            PixelBuffer(np.full((4, 4, 3), np.nan))

    def test_u8_round_trip(self):
        rng = np.random.default_rng(0)
        buf = random_buffer(rng)
        again = PixelBuffer.from_u8(buf.to_u8())
        assert np.abs(again.samples - buf.samples).max() <= 0.5 / 255


class TestOps:
    def test_blur_sigma_zero_is_identity_bit_exact(self):
        rng = np.random.default_rng(1)
        buf = random_buffer(rng)
        out = apply_blur(buf, 0.0)
        assert np.array_equal(out.samples, buf.samples)

    def test_blur_preserves_constant_interior_exactly(self):
        buf = PixelBuffer.full(48, 48, 0.37)
        out = apply_blur(buf, 2.0)
        assert np.array_equal(out.samples[12:36, 12:36], buf.samples[12:36, 12:36])

    def test_blur_global_mean_drift_small(self):
        rng = np.random.default_rng(2)
        buf = random_buffer(rng, 256, 256)
        for sigma in (0.4, 1.2, 2.0):
            out = apply_blur(buf, sigma)
            assert abs(out.samples.mean() - buf.samples.mean()) < 1e-3

    def test_resize_identity(self):
        rng = np.random.default_rng(3)
        buf = random_buffer(rng)
        out = apply_resize(buf, 1.0)
        assert (out.height, out.width) == (buf.height, buf.width)
        assert np.allclose(out.samples, buf.samples, atol=1e-9)

    def test_resize_up_then_down_restores_dimensions(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            h, w = int(rng.integers(1, 64)), int(rng.integers(1, 64))
            buf = random_buffer(rng, h, w)
            out = apply_resize(apply_resize(buf, 2.0), 0.5)
            assert (out.height, out.width) == (h, w)

    def test_resize_minimum_one_pixel(self):
        buf = PixelBuffer.full(4, 4, 0.5)
        out = apply_resize(buf, 0.01)
        assert (out.height, out.width) == (1, 1)

    def test_resize_invalid_factor_rejected(self):
        buf = PixelBuffer.full(4, 4, 0.5)
        for bad in (0.0, -1.0, float("inf")):
            with pytest.raises(InputError):
                apply_resize(buf, bad)

    def test_contrast_fixed_point_at_midpoint(self):
        buf = PixelBuffer.full(8, 8, 0.5)
        for gain in (0.5, 1.0, 1.4):
            out = apply_contrast(buf, gain)
            assert np.array_equal(out.samples, buf.samples)

    def test_brightness_and_color_shift_clamp(self):
        buf = PixelBuffer.full(8, 8, 0.9)
        out = apply_brightness(buf, 0.5)
        assert out.samples.max() == 1.0
        out = apply_color_shift(buf, (-2.0, 0.0, 2.0))
        assert out.samples[..., 0].max() == 0.0
        assert out.samples[..., 2].min() == 1.0

    def test_noise_is_seed_deterministic(self):
        buf = PixelBuffer.full(16, 16, 0.5)
        a = apply_noise(buf, 0.1, np.random.default_rng(7))
        b = apply_noise(buf, 0.1, np.random.default_rng(7))
        assert np.array_equal(a.samples, b.samples)

    def test_spatial_identity_for_zero_affine(self):
        rng = np.random.default_rng(8)
        buf = random_buffer(rng)
        out = apply_spatial(buf, AffineParams())
        assert np.allclose(out.samples, buf.samples, atol=1e-12)

    def test_spatial_translation_shifts_content(self):
        samples = np.zeros((9, 9, 3))
        samples[4, 4, :] = 1.0
        out = apply_spatial(PixelBuffer(samples), AffineParams(translate_x=2.0))
        assert out.samples[4, 6, 0] == pytest.approx(1.0, abs=1e-9)

    @needs_jpeg
    def test_jpeg_round_trip_stays_close(self):
        buf = PixelBuffer.full(32, 32, 0.5)
        out = apply_jpeg(buf, 90)
        assert (out.height, out.width) == (32, 32)
        assert np.abs(out.samples - 0.5).max() < 0.05

    def test_jpeg_quality_bounds(self):
        buf = PixelBuffer.full(8, 8, 0.5)
        with pytest.raises(InputError):
            apply_jpeg(buf, 0)

    def test_outputs_always_clamped(self):
        rng = np.random.default_rng(9)
        buf = random_buffer(rng)
        results = [
            apply_noise(buf, 0.5, rng),
            apply_brightness(buf, 0.9),
            apply_brightness(buf, -0.9),
            apply_contrast(buf, 3.0),
            apply_color_shift(buf, (0.5, -0.5, 0.5)),
            apply_blur(buf, 2.0),
            apply_resize(buf, 0.5),
        ]
        for out in results:
            assert out.samples.min() >= 0.0 and out.samples.max() <= 1.0
            assert np.all(np.isfinite(out.samples))


class TestSeverityMap:
    def test_blur_anchor_points(self):
        assert severity_to_params(DistortionGroup.BLUR, 1, 5) == 0.4
        assert severity_to_params(DistortionGroup.BLUR, 5, 5) == 2.0
        assert severity_to_params(DistortionGroup.BLUR, 3, 5) == pytest.approx(1.2)

    def test_jpeg_extreme_matches_sweep_floor(self):
        assert severity_to_params(DistortionGroup.JPEG, 5, 5) == 40.0
        assert severity_to_params(DistortionGroup.JPEG, 1, 5) == 90.0

    def test_resize_leg_anchors(self):
        assert resize_factor_for_severity(1, 5) == 0.9
        assert resize_factor_for_severity(5, 5) == 0.5

    def test_single_level_uses_mild_anchor(self):
        assert severity_to_params(DistortionGroup.NOISE, 1, 1) == 0.01

    def test_monotone_in_severity(self):
        for group in ALL_GROUPS:
            values = [severity_to_params(group, s, 5) for s in range(1, 6)]
            diffs = np.diff(values)
            assert np.all(diffs > 0) or np.all(diffs < 0)

    def test_out_of_range_severity_rejected(self):
        with pytest.raises(InputError):
            severity_to_params(DistortionGroup.BLUR, 0, 5)
        with pytest.raises(InputError):
            severity_to_params(DistortionGroup.BLUR, 6, 5)


class TestPlanSampling:
    def test_aug_prob_zero_never_plans(self):
        rng = np.random.default_rng(10)
        params = AugParams(aug_prob=0.0)
        assert all(sample_plan(params, rng) is None for _ in range(200))

    def test_degenerate_params_single_step_severity_one(self):
        rng = np.random.default_rng(11)
        params = AugParams(max_distortions=1, num_levels=1, aug_prob=1.0)
        for _ in range(100):
            plan = sample_plan(params, rng)
            assert plan is not None
            assert len(plan.steps) == 1
            assert plan.steps[0][1] == 1

    def test_groups_distinct_and_within_budget(self):
        rng = np.random.default_rng(12)
        params = AugParams(max_distortions=5, num_levels=3)
        for _ in range(200):
            plan = sample_plan(params, rng)
            assert plan is not None
            groups = [g for g, _ in plan.steps]
            assert len(set(groups)) == len(groups)
            assert 1 <= len(groups) <= 5

    def test_severity_histogram_matches_gaussian_weights(self):
        rng = np.random.default_rng(13)
        num_levels = 5
        n = 20000
        draws = np.array([draw_severity(rng, num_levels) for _ in range(n)])
        observed = np.bincount(draws, minlength=num_levels + 1)[1:]
        expected = severity_weights(num_levels) * n
        assert chisquare(observed, expected).pvalue > 0.01

    def test_plan_validation(self):
        with pytest.raises(InputError):
            DistortionPlan(
                seed=0,
                steps=(
                    (DistortionGroup.BLUR, 1),
                    (DistortionGroup.BLUR, 2),
                ),
                num_levels=3,
            )
        with pytest.raises(InputError):
            DistortionPlan(seed=0, steps=((DistortionGroup.BLUR, 4),), num_levels=3)


class TestApplyPlan:
    def test_empty_plan_is_identity(self):
        rng = np.random.default_rng(14)
        buf = random_buffer(rng)
        out, manifest = apply_plan(buf, DistortionPlan(seed=1, steps=()))
        assert np.array_equal(out.samples, buf.samples)
        assert manifest == []

    def test_single_step_plan_equals_single_op(self):
        rng = np.random.default_rng(15)
        buf = random_buffer(rng)
        plan = DistortionPlan(
            seed=2, steps=((DistortionGroup.BLUR, 3),), num_levels=5
        )
        out, manifest = apply_plan(buf, plan)
        direct = apply_blur(buf, severity_to_params(DistortionGroup.BLUR, 3, 5))
        assert np.array_equal(out.samples, direct.samples)
        assert manifest[0].params["sigma"] == pytest.approx(1.2)

    def test_plan_application_bit_identical(self):
        rng = np.random.default_rng(16)
        buf = random_buffer(rng)
        plan = DistortionPlan(
            seed=123,
            steps=(
                (DistortionGroup.NOISE, 2),
                (DistortionGroup.SPATIAL, 1),
                (DistortionGroup.BRIGHTNESS, 3),
                (DistortionGroup.CONTRAST, 2),
                (DistortionGroup.COLOR_SHIFT, 1),
            ),
            num_levels=3,
        )
        a, manifest_a = apply_plan(buf, plan)
        b, manifest_b = apply_plan(buf, plan)
        assert np.array_equal(a.samples, b.samples)
        assert manifest_a == manifest_b

    def test_severity_monotone_deviation_for_blur_and_noise(self):
        rng = np.random.default_rng(17)
        images = [random_buffer(rng, 24, 24) for _ in range(100)]

        def mean_abs_dev(group, severity):
            total = 0.0
            for i, buf in enumerate(images):
                plan = DistortionPlan(
                    seed=i, steps=((group, severity),), num_levels=5
                )
                out, _ = apply_plan(buf, plan)
                total += np.abs(out.samples - buf.samples).mean()
            return total / len(images)

        for group in (DistortionGroup.BLUR, DistortionGroup.NOISE):
            devs = [mean_abs_dev(group, s) for s in (1, 3, 5)]
            assert devs[0] <= devs[1] <= devs[2]


class TestChainDegrade:
    @needs_jpeg
    def test_every_hop_ends_with_jpeg(self):
        rng = np.random.default_rng(18)
        buf = PixelBuffer.full(24, 24, 0.5)
        _, manifest = chain_degrade(buf, hops=3, rng=rng)
        for hop in (1, 2, 3):
            hop_groups = [s.group for s in manifest if s.hop == hop]
            assert DistortionGroup.JPEG in hop_groups

    @needs_jpeg
    def test_manifest_reproducible_given_seed(self):
        buf = PixelBuffer.full(24, 24, 0.5)
        out_a, man_a = chain_degrade(buf, 2, np.random.default_rng(99))
        out_b, man_b = chain_degrade(buf, 2, np.random.default_rng(99))
        assert man_a == man_b
        assert np.array_equal(out_a.samples, out_b.samples)

    def test_hops_must_be_positive(self):
        with pytest.raises(InputError):
            chain_degrade(
                PixelBuffer.full(4, 4, 0.5), 0, np.random.default_rng(0)
            )


class TestSweep:
    def test_blur_sweep_starts_with_identity(self):
        rng = np.random.default_rng(19)
        buf = random_buffer(rng)
        points = sweep(buf, "blur")
        assert points[0][0] == 0.0
        assert np.array_equal(points[0][1].samples, buf.samples)
        assert [i for i, _ in points] == list(INTENSITY_GRIDS["blur"])

    def test_resize_sweep_contains_robustness_setting(self):
        rng = np.random.default_rng(20)
        buf = random_buffer(rng)
        intensities = [i for i, _ in sweep(buf, "resize")]
        assert 0.9 in intensities
        assert intensities == list(INTENSITY_GRIDS["resize"])

    @needs_jpeg
    def test_jpeg_sweep_contains_robustness_setting(self):
        buf = PixelBuffer.full(16, 16, 0.5)
        intensities = [i for i, _ in sweep(buf, "jpeg")]
        assert 90 in intensities
        assert intensities == list(INTENSITY_GRIDS["jpeg"])

    def test_unknown_kind_rejected(self):
        with pytest.raises(InputError):
            sweep(PixelBuffer.full(4, 4, 0.5), "rotate")


class TestTags:
    def test_canonical_tags(self):
        assert perturbation_tag("jpeg", 90) == "jpeg_qf90"
        assert perturbation_tag("resize", 0.9) == "resize_0.9"
        assert perturbation_tag("resize", 0.75) == "resize_0.75"
        assert perturbation_tag("blur", 0.0) == "blur_0"
        assert perturbation_tag("blur", 1.2) == "blur_1.2"
