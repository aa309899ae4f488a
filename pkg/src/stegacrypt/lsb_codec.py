"""Hide an opaque byte payload in the least-significant bits of an RGB(A) image.

Images are ``uint8`` arrays of shape ``(height, width, channels)`` with 3 or 4
channels. Only R, G and B carry data, one bit per sample, visited in row-major
pixel order and R, G, B order within a pixel. Payload octets are written most
significant bit first. Alpha is never touched.

The payload is wrapped in a frame so extraction needs nothing but the stego
image::

    "SGF1" | version 0x01 | payload_len (4 octets, big-endian) | payload
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import NoFrameFound, PayloadTooLarge, TruncatedFrame, UnsupportedFrameVersion

MAGIC = b"SGF1"
VERSION = 0x01
FRAME_HEADER = struct.Struct(">4sBI")
FRAME_HEADER_SIZE = FRAME_HEADER.size  # 9
CARRIER_CHANNELS = 3


def check_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if image.dtype != np.uint8:
        raise ValueError(f"expected 8-bit samples, got dtype {image.dtype}")
    if image.ndim != 3 or image.shape[2] not in (3, 4):
        raise ValueError(f"expected an RGB or RGBA array (h, w, 3|4), got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    return image


def carrier_bits(image: np.ndarray) -> int:
    h, w = image.shape[:2]
    return h * w * CARRIER_CHANNELS


def capacity(image: np.ndarray) -> int:
    """Largest payload, in octets, that :func:`embed` accepts for this image."""
    image = check_image(image)
    return max(0, carrier_bits(image) // 8 - FRAME_HEADER_SIZE)


def build_frame(payload: bytes) -> bytes:
    return FRAME_HEADER.pack(MAGIC, VERSION, len(payload)) + payload


def embed(cover: np.ndarray, payload: bytes) -> np.ndarray:
    """Return a new stego image carrying ``payload``; ``cover`` is left untouched."""
    cover = check_image(cover)
    # the header alone may not fit, even when capacity() floors at 0
    if FRAME_HEADER_SIZE + len(payload) > carrier_bits(cover) // 8:
        raise PayloadTooLarge(len(payload), capacity(cover))
    bits = np.unpackbits(np.frombuffer(build_frame(payload), dtype=np.uint8))
    stego = cover.copy()
    carrier = stego[..., :CARRIER_CHANNELS].reshape(-1)
    carrier[: bits.size] = (carrier[: bits.size] & 0xFE) | bits
    stego[..., :CARRIER_CHANNELS] = carrier.reshape(stego.shape[0], stego.shape[1], CARRIER_CHANNELS)
    return stego


def _read_octets(carrier: np.ndarray, start: int, count: int) -> bytes:
    lsbs = carrier[start * 8 : (start + count) * 8] & 1
    return np.packbits(lsbs).tobytes()


def extract(stego: np.ndarray) -> bytes:
    """Recover the payload written by :func:`embed`.

    Raises NoFrameFound when the LSBs do not start with a frame header, and
    TruncatedFrame when the declared length runs past the end of the image.
    """
    stego = check_image(stego)
    carrier = stego[..., :CARRIER_CHANNELS].reshape(-1)
    total_octets = carrier.size // 8
    if total_octets < FRAME_HEADER_SIZE:
        raise NoFrameFound("image too small to hold a frame header")
    magic, version, length = FRAME_HEADER.unpack(_read_octets(carrier, 0, FRAME_HEADER_SIZE))
    if magic != MAGIC:
        raise NoFrameFound("frame magic absent")
    if version != VERSION:
        raise UnsupportedFrameVersion(f"unsupported frame version {version}")
    if length > total_octets - FRAME_HEADER_SIZE:
        raise TruncatedFrame(
            f"frame declares {length} payload octets but the image holds only "
            f"{total_octets - FRAME_HEADER_SIZE}"
        )
    return _read_octets(carrier, FRAME_HEADER_SIZE, length)
