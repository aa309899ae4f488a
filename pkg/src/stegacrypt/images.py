"""Image file I/O. Only lossless containers are accepted; stego output is always PNG."""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageFormatError

ACCEPTED_FORMATS = {"PNG", "BMP"}
LOSSY_FORMATS = {"JPEG", "JPEG2000", "WEBP", "MPO", "HEIF", "AVIF"}


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG or BMP file as an ``(h, w, 3|4)`` uint8 array.

    Grayscale and palette images are expanded to RGB (or RGBA when they carry
    transparency). Lossy formats are refused because recompression would
    destroy the least-significant bits.
    """
    try:
        img = Image.open(path)
    except FileNotFoundError:
        raise ImageFormatError(f"{path}: no such file") from None
    except UnidentifiedImageError:
        raise ImageFormatError(f"{path}: not a recognised image file") from None
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot read image ({exc})") from None
    with img:
        fmt = img.format
        if fmt in LOSSY_FORMATS:
            raise ImageFormatError(
                f"{path}: {fmt} is a lossy format; lossy recompression destroys "
                "least-significant bits, use a PNG or BMP cover"
            )
        if fmt not in ACCEPTED_FORMATS:
            raise ImageFormatError(f"{path}: unsupported image format {fmt}; use PNG or BMP")
        mode = img.mode
        if mode in ("RGB", "RGBA"):
            pass
        elif mode in ("L", "1"):
            img = img.convert("RGB")
        elif mode == "LA":
            img = img.convert("RGBA")
        elif mode == "P":
            img = img.convert("RGBA" if "transparency" in img.info else "RGB")
        else:
            raise ImageFormatError(f"{path}: unsupported pixel mode {mode}; 8-bit RGB/RGBA only")
        try:
            return np.array(img, dtype=np.uint8)
        except OSError as exc:
            raise ImageFormatError(f"{path}: cannot decode image ({exc})") from None


def save_png(path: str | os.PathLike, image: np.ndarray) -> None:
    try:
        Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(path, format="PNG")
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot write PNG ({exc})") from None
