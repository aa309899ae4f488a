"""Encrypt documents with 3DES and hide them in the least-significant bits of lossless images."""

from .envelope import Envelope, Secret, decode, derive_key, encode, open_envelope, seal
from .lsb_codec import capacity, embed, extract
from .metrics import MetricsReport, compare, mse, psnr
from .pipeline import CompareRow, SecureResult, compare_report, retrieve, secure

__version__ = "0.1.0"

__all__ = [
    "CompareRow",
    "Envelope",
    "MetricsReport",
    "Secret",
    "SecureResult",
    "capacity",
    "compare",
    "compare_report",
    "decode",
    "derive_key",
    "embed",
    "encode",
    "extract",
    "mse",
    "open_envelope",
    "psnr",
    "retrieve",
    "seal",
    "secure",
]
