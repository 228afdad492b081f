"""Image codec adapter boundary.

The degradation pipeline is codec-agnostic: JPEG round trips and image
file I/O go through adapters so the numerical code never depends on a
particular codec.  A Pillow-backed adapter ships as the default and is
looked up lazily; callers that need a different codec pass their own.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Protocol

import numpy as np

from .core import DegradationError
from .distort import PixelBuffer


class JpegCodec(Protocol):
    def roundtrip(self, rgb_u8: np.ndarray, quality: int) -> np.ndarray:
        """Encode an (H, W, 3) uint8 array as JPEG at ``quality``, decode it
        back, and return the decoded uint8 array."""
        ...


class PillowJpegCodec:
    """JPEG round trips via Pillow's libjpeg bindings."""

    def roundtrip(self, rgb_u8: np.ndarray, quality: int) -> np.ndarray:
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(rgb_u8, mode="RGB").save(buf, format="JPEG", quality=quality)
        buf.seek(0)
        return np.asarray(Image.open(buf).convert("RGB"))


def default_jpeg_codec() -> JpegCodec | None:
    """The bundled codec adapter, or None when Pillow is unavailable."""
    try:
        import PIL  # noqa: F401
    except ImportError:
        return None
    return PillowJpegCodec()


def read_image(path: str | Path) -> PixelBuffer:
    """Decode an 8-bit RGB image file into a pixel buffer."""
    try:
        from PIL import Image
    except ImportError as exc:
        raise DegradationError("no image codec available to read files") from exc
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"))
    except OSError as exc:
        raise DegradationError(f"cannot read image {path}: {exc}") from exc
    return PixelBuffer.from_u8(rgb)


def write_png(buf: PixelBuffer, path: str | Path) -> None:
    """Write a pixel buffer losslessly as PNG."""
    try:
        from PIL import Image
    except ImportError as exc:
        raise DegradationError("no image codec available to write files") from exc
    Image.fromarray(buf.to_u8(), mode="RGB").save(path, format="PNG")
