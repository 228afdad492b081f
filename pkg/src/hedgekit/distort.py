"""Image degradation pipeline: plan sampling, pixel ops, and sweeps.

Degradation plans compose steps drawn from seven operation groups (blur,
color shift, JPEG compression, noise, brightness, spatial warp, contrast),
each at an integer severity whose physical parameters interpolate linearly
between per-group anchors.  The anchors are calibrated so that the highest
severities coincide with the stress-sweep extremes (JPEG QF 40, downscale
0.5x, blur sigma 2.0), putting augmentation and stress testing on one
physical scale.

Everything is deterministic given (input, parameters, seed): plans carry
their own seed, and every stochastic choice inside a plan derives from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import ndimage

from .core import ConfigurationError, DegradationError, InputError

#: Stress-sweep intensity grids; the robustness headline settings
#: (QF 90, resize 0.9) are grid members by construction.
INTENSITY_GRIDS: dict[str, tuple[float, ...]] = {
    "jpeg": (100, 90, 80, 70, 60, 50, 40),
    "resize": (0.5, 0.75, 0.9, 1.0, 1.25, 1.5, 2.0),
    "blur": (0.0, 0.4, 0.8, 1.2, 1.6, 2.0),
}


def perturbation_tag(kind: str, intensity: float) -> str:
    """Canonical cohort tag for one sweep point, e.g. ``jpeg_qf90``."""
    if kind == "jpeg":
        return f"jpeg_qf{int(intensity)}"
    if kind == "resize":
        return f"resize_{intensity:g}"
    if kind == "blur":
        return f"blur_{intensity:g}"
    raise InputError(f"unknown sweep kind {kind!r}")


class DistortionGroup(str, Enum):
    BLUR = "blur"
    COLOR_SHIFT = "color_shift"
    JPEG = "jpeg"
    NOISE = "noise"
    BRIGHTNESS = "brightness"
    SPATIAL = "spatial"
    CONTRAST = "contrast"


ALL_GROUPS: tuple[DistortionGroup, ...] = tuple(DistortionGroup)

# Mildest / harshest physical parameter per group, interpolated linearly
# over the severity scale.  JPEG quality and resize factor decrease with
# severity; everything else increases.
_SEVERITY_ANCHORS: dict[DistortionGroup, tuple[float, float]] = {
    DistortionGroup.BLUR: (0.4, 2.0),
    DistortionGroup.JPEG: (90.0, 40.0),
    DistortionGroup.NOISE: (0.01, 0.1),
    DistortionGroup.BRIGHTNESS: (0.05, 0.25),
    DistortionGroup.CONTRAST: (0.05, 0.4),
    DistortionGroup.COLOR_SHIFT: (0.02, 0.1),
    DistortionGroup.SPATIAL: (0.005, 0.02),
}
_RESIZE_ANCHORS = (0.9, 0.5)


@dataclass(frozen=True)
class PixelBuffer:
    """RGB image with float samples in [0, 1], stored row-major (H, W, 3)."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InputError(f"expected (H, W, 3) samples, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError("image must have positive dimensions")
        if not np.all(np.isfinite(arr)):
            raise InputError("samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InputError("samples must lie in [0, 1]")
        object.__setattr__(self, "samples", arr)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return 3

    @classmethod
    def full(cls, width: int, height: int, value: float = 0.5) -> "PixelBuffer":
        return cls(np.full((height, width, 3), value, dtype=np.float64))

    @classmethod
    def from_u8(cls, rgb: np.ndarray) -> "PixelBuffer":
        return cls(np.asarray(rgb, dtype=np.float64) / 255.0)

    def to_u8(self) -> np.ndarray:
        return np.clip(np.rint(self.samples * 255.0), 0, 255).astype(np.uint8)


def _clamped(samples: np.ndarray) -> PixelBuffer:
    return PixelBuffer(np.clip(samples, 0.0, 1.0))


@dataclass(frozen=True)
class AugParams:
    """Degradation sampler settings.

    ``aug_prob`` is the probability that an image is degraded at all;
    otherwise up to ``max_distortions`` distinct groups are composed at
    severities from a Gaussian-weighted distribution over
    {1..num_levels}.
    """

    max_distortions: int = 3
    num_levels: int = 3
    aug_prob: float = 1.0

    def __post_init__(self) -> None:
        if self.max_distortions < 1:
            raise ConfigurationError("max_distortions must be >= 1")
        if self.num_levels < 1:
            raise ConfigurationError("num_levels must be >= 1")
        if not (0.0 <= self.aug_prob <= 1.0):
            raise ConfigurationError("aug_prob must lie in [0, 1]")


@dataclass(frozen=True)
class DistortionPlan:
    """Ordered, reproducible recipe of degradation steps.

    ``num_levels`` fixes the severity scale the steps were drawn on so a
    plan stays self-applicable; ``seed`` drives every stochastic choice
    made while applying it (noise draws, shift signs, warp directions).
    """

    seed: int
    steps: tuple[tuple[DistortionGroup, int], ...]
    num_levels: int = 3

    def __post_init__(self) -> None:
        groups = [g for g, _ in self.steps]
        if len(set(groups)) != len(groups):
            raise InputError("plan groups must be distinct")
        for group, severity in self.steps:
            if not 1 <= severity <= self.num_levels:
                raise InputError(
                    f"severity {severity} for {group.value} outside "
                    f"[1, {self.num_levels}]"
                )


def severity_weights(num_levels: int) -> np.ndarray:
    """Normalized Gaussian weights over severities 1..num_levels.

    Centered at (L+1)/2 with spread L/4, so mid severities dominate and the
    extremes stay reachable.
    """
    if num_levels < 1:
        raise InputError("num_levels must be >= 1")
    levels = np.arange(1, num_levels + 1, dtype=np.float64)
    mu = (num_levels + 1) / 2.0
    sigma = num_levels / 4.0
    w = np.exp(-((levels - mu) ** 2) / (2.0 * sigma**2))
    return w / w.sum()


def draw_severity(rng: np.random.Generator, num_levels: int) -> int:
    """Draw one severity level from the Gaussian-weighted distribution."""
    return int(rng.choice(np.arange(1, num_levels + 1), p=severity_weights(num_levels)))


def sample_plan(
    params: AugParams, rng: np.random.Generator
) -> DistortionPlan | None:
    """Sample a degradation plan, or None with probability 1 - aug_prob.

    When a plan is drawn: the step count is uniform on
    {1..max_distortions}, groups are chosen uniformly without replacement,
    and each severity follows the Gaussian-weighted distribution.
    """
    if rng.random() >= params.aug_prob:
        return None
    k = int(rng.integers(1, params.max_distortions + 1))
    k = min(k, len(ALL_GROUPS))
    chosen = rng.choice(len(ALL_GROUPS), size=k, replace=False)
    steps = tuple(
        (ALL_GROUPS[int(i)], draw_severity(rng, params.num_levels)) for i in chosen
    )
    seed = int(rng.integers(0, 2**64, dtype=np.uint64))
    return DistortionPlan(seed=seed, steps=steps, num_levels=params.num_levels)


def severity_to_params(
    group: DistortionGroup, severity: int, num_levels: int
) -> float:
    """Map an integer severity to the group's physical parameter.

    Linear interpolation between the per-group anchors; a single-level
    scale uses the mild anchor.  For JPEG this is the quality factor, for
    blur the Gaussian sigma, for noise the stddev, and for the remaining
    groups the magnitude whose sign/direction is drawn at application
    time.
    """
    if not 1 <= severity <= num_levels:
        raise InputError(f"severity {severity} outside [1, {num_levels}]")
    lo, hi = _SEVERITY_ANCHORS[group]
    if num_levels == 1:
        return lo
    frac = (severity - 1) / (num_levels - 1)
    return lo + (hi - lo) * frac


def resize_factor_for_severity(severity: int, num_levels: int) -> float:
    """Downscale factor for the resize leg of the severity scale."""
    if not 1 <= severity <= num_levels:
        raise InputError(f"severity {severity} outside [1, {num_levels}]")
    lo, hi = _RESIZE_ANCHORS
    if num_levels == 1:
        return lo
    return lo + (hi - lo) * (severity - 1) / (num_levels - 1)


def apply_blur(buf: PixelBuffer, sigma: float) -> PixelBuffer:
    """Separable Gaussian blur with reflect padding; sigma 0 is identity."""
    if sigma < 0:
        raise InputError("sigma must be >= 0")
    if sigma == 0:
        return buf
    out = ndimage.gaussian_filter(
        buf.samples, sigma=(sigma, sigma, 0.0), mode="reflect"
    )
    return _clamped(out)


def apply_resize(buf: PixelBuffer, factor: float) -> PixelBuffer:
    """Bilinear resize to round(dim * factor), clamped to at least 1 px."""
    if factor <= 0 or not math.isfinite(factor):
        raise InputError("resize factor must be positive and finite")
    new_h = max(1, round(buf.height * factor))
    new_w = max(1, round(buf.width * factor))
    out = _bilinear_resize(buf.samples, new_h, new_w)
    return _clamped(out)


def _bilinear_resize(samples: np.ndarray, new_h: int, new_w: int) -> np.ndarray:
    h, w = samples.shape[:2]
    if (new_h, new_w) == (h, w):
        return samples.copy()
    # Half-pixel-centered source coordinates (standard image convention).
    ys = (np.arange(new_h) + 0.5) * (h / new_h) - 0.5
    xs = (np.arange(new_w) + 0.5) * (w / new_w) - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    top = samples[y0][:, x0] * (1 - wx) + samples[y0][:, x1] * wx
    bot = samples[y1][:, x0] * (1 - wx) + samples[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def apply_jpeg(buf: PixelBuffer, quality: int, codec=None) -> PixelBuffer:
    """Encode/decode round trip through a JPEG codec adapter.

    Falls back to the default adapter (Pillow-backed) when none is given;
    raises DegradationError when no adapter is available or the round trip
    fails.
    """
    if not 1 <= int(quality) <= 100:
        raise InputError(f"JPEG quality {quality} outside [1, 100]")
    if codec is None:
        from .pixelio import default_jpeg_codec

        codec = default_jpeg_codec()
        if codec is None:
            raise DegradationError("no JPEG codec adapter available")
    try:
        rgb = codec.roundtrip(buf.to_u8(), int(quality))
    except Exception as exc:  # adapter boundary: surface as degradation error
        raise DegradationError(f"JPEG round trip failed: {exc}") from exc
    return PixelBuffer.from_u8(rgb)


def apply_noise(
    buf: PixelBuffer, stddev: float, rng: np.random.Generator
) -> PixelBuffer:
    """Additive zero-mean Gaussian noise, then clamp."""
    if stddev < 0:
        raise InputError("stddev must be >= 0")
    noise = rng.normal(0.0, stddev, size=buf.samples.shape)
    return _clamped(buf.samples + noise)


def apply_brightness(buf: PixelBuffer, offset: float) -> PixelBuffer:
    """Uniform signed brightness offset, then clamp."""
    return _clamped(buf.samples + offset)


def apply_contrast(buf: PixelBuffer, gain: float) -> PixelBuffer:
    """Contrast gain about the 0.5 midpoint, then clamp."""
    if gain < 0:
        raise InputError("gain must be >= 0")
    return _clamped(0.5 + gain * (buf.samples - 0.5))


def apply_color_shift(buf: PixelBuffer, offsets: Sequence[float]) -> PixelBuffer:
    """Per-channel signed offsets (R, G, B), then clamp."""
    offsets = np.asarray(offsets, dtype=np.float64)
    if offsets.shape != (3,):
        raise InputError("expected one offset per RGB channel")
    return _clamped(buf.samples + offsets[None, None, :])


@dataclass(frozen=True)
class AffineParams:
    """Small in-plane warp: translation in pixels plus rotation in degrees."""

    translate_x: float = 0.0
    translate_y: float = 0.0
    rotate_degrees: float = 0.0


def apply_spatial(buf: PixelBuffer, affine: AffineParams) -> PixelBuffer:
    """Affine warp (rotation about center + translation) with bilinear
    resampling and reflect padding."""
    theta = math.radians(affine.rotate_degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cy = (buf.height - 1) / 2.0
    cx = (buf.width - 1) / 2.0
    # Map output (y, x) to input coordinates: rotate back about the center,
    # then undo the translation.
    matrix = np.array([[cos_t, sin_t], [-sin_t, cos_t]])
    center = np.array([cy, cx])
    shift = np.array([affine.translate_y, affine.translate_x])
    offset = center - matrix @ (center + shift)
    out = np.empty_like(buf.samples)
    for c in range(3):
        out[:, :, c] = ndimage.affine_transform(
            buf.samples[:, :, c],
            matrix,
            offset=offset,
            order=1,
            mode="reflect",
        )
    return _clamped(out)


@dataclass(frozen=True)
class AppliedStep:
    """One executed degradation step with its resolved parameters."""

    hop: int
    group: DistortionGroup
    severity: int
    params: dict = field(default_factory=dict)


def _apply_step(
    buf: PixelBuffer,
    group: DistortionGroup,
    severity: int,
    num_levels: int,
    rng: np.random.Generator,
    hop: int,
    codec=None,
) -> tuple[PixelBuffer, AppliedStep]:
    if group is DistortionGroup.BLUR:
        sigma = severity_to_params(group, severity, num_levels)
        return apply_blur(buf, sigma), AppliedStep(hop, group, severity, {"sigma": sigma})
    if group is DistortionGroup.JPEG:
        qf = int(round(severity_to_params(group, severity, num_levels)))
        return apply_jpeg(buf, qf, codec=codec), AppliedStep(
            hop, group, severity, {"quality": qf}
        )
    if group is DistortionGroup.NOISE:
        stddev = severity_to_params(group, severity, num_levels)
        return apply_noise(buf, stddev, rng), AppliedStep(
            hop, group, severity, {"stddev": stddev}
        )
    if group is DistortionGroup.BRIGHTNESS:
        magnitude = severity_to_params(group, severity, num_levels)
        offset = float(rng.choice([-1.0, 1.0])) * magnitude
        return apply_brightness(buf, offset), AppliedStep(
            hop, group, severity, {"offset": offset}
        )
    if group is DistortionGroup.CONTRAST:
        magnitude = severity_to_params(group, severity, num_levels)
        gain = 1.0 + float(rng.choice([-1.0, 1.0])) * magnitude
        return apply_contrast(buf, gain), AppliedStep(
            hop, group, severity, {"gain": gain}
        )
    if group is DistortionGroup.COLOR_SHIFT:
        magnitude = severity_to_params(group, severity, num_levels)
        offsets = rng.uniform(-magnitude, magnitude, size=3)
        return apply_color_shift(buf, offsets), AppliedStep(
            hop, group, severity, {"offsets": [float(o) for o in offsets]}
        )
    if group is DistortionGroup.SPATIAL:
        magnitude = severity_to_params(group, severity, num_levels)
        # Magnitude is a fraction of each dimension; rotation scales to 2
        # degrees at the 2% extreme.
        tx = float(rng.uniform(-magnitude, magnitude)) * buf.width
        ty = float(rng.uniform(-magnitude, magnitude)) * buf.height
        rot_max = magnitude * 100.0
        rot = float(rng.uniform(-rot_max, rot_max))
        affine = AffineParams(translate_x=tx, translate_y=ty, rotate_degrees=rot)
        return apply_spatial(buf, affine), AppliedStep(
            hop,
            group,
            severity,
            {"translate_x": tx, "translate_y": ty, "rotate_degrees": rot},
        )
    raise InputError(f"unknown distortion group {group!r}")


def apply_plan(
    buf: PixelBuffer, plan: DistortionPlan, codec=None, hop: int = 0
) -> tuple[PixelBuffer, list[AppliedStep]]:
    """Apply a plan's steps in order; deterministic given the plan.

    Returns the degraded buffer and the manifest of executed steps with
    their resolved physical parameters.
    """
    manifest: list[AppliedStep] = []
    for idx, (group, severity) in enumerate(plan.steps):
        rng = np.random.default_rng([plan.seed, hop, idx])
        buf, step = _apply_step(
            buf, group, severity, plan.num_levels, rng, hop, codec=codec
        )
        manifest.append(step)
    return buf, manifest


def chain_degrade(
    buf: PixelBuffer,
    hops: int,
    rng: np.random.Generator,
    params: AugParams = AugParams(),
    codec=None,
) -> tuple[PixelBuffer, list[AppliedStep]]:
    """Simulate multi-hop re-sharing: one independent plan per hop.

    Every hop ends with a JPEG re-encode (platforms transcode on upload),
    appended at the drawn severity when the sampled plan lacks one.
    Returns the final buffer and the concatenated manifest.
    """
    if hops < 1:
        raise InputError("hops must be >= 1")
    manifest: list[AppliedStep] = []
    for hop in range(1, hops + 1):
        plan = sample_plan(params, rng)
        steps = plan.steps if plan is not None else ()
        seed = plan.seed if plan is not None else int(rng.integers(0, 2**64, dtype=np.uint64))
        if not any(g is DistortionGroup.JPEG for g, _ in steps):
            steps = steps + ((DistortionGroup.JPEG, draw_severity(rng, params.num_levels)),)
        hop_plan = DistortionPlan(seed=seed, steps=steps, num_levels=params.num_levels)
        buf, applied = apply_plan(buf, hop_plan, codec=codec, hop=hop)
        manifest.extend(applied)
    return buf, manifest


def sweep(
    buf: PixelBuffer, kind: str, codec=None
) -> list[tuple[float, PixelBuffer]]:
    """Degrade a buffer at every intensity of one stress-sweep grid."""
    if kind not in INTENSITY_GRIDS:
        raise InputError(f"unknown sweep kind {kind!r}")
    out: list[tuple[float, PixelBuffer]] = []
    for intensity in INTENSITY_GRIDS[kind]:
        if kind == "jpeg":
            out.append((intensity, apply_jpeg(buf, int(intensity), codec=codec)))
        elif kind == "resize":
            out.append((intensity, apply_resize(buf, intensity)))
        else:
            out.append((intensity, apply_blur(buf, intensity)))
    return out
