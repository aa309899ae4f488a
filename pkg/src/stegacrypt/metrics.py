"""MSE / PSNR distortion between a cover and a stego image.

MSE is averaged jointly over every carrier sample (R, G, B of every pixel),
not per channel. Alpha is excluded. Peak value is fixed at 255.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ShapeMismatch
from .lsb_codec import CARRIER_CHANNELS

PEAK = 255.0


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr_db: float
    samples_compared: int
    max_abs_diff: int

    def to_dict(self) -> dict:
        # JSON has no infinity; identical images report psnr_db as null.
        d = asdict(self)
        if math.isinf(self.psnr_db):
            d["psnr_db"] = None
        return d

    def to_text(self) -> str:
        return "\n".join(
            [
                f"mse: {self.mse:.6f}",
                f"psnr_db: {format_psnr(self.psnr_db)}",
                f"samples_compared: {self.samples_compared}",
                f"max_abs_diff: {self.max_abs_diff}",
            ]
        )


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def _carrier_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 3:
        a, b = a[..., :CARRIER_CHANNELS], b[..., :CARRIER_CHANNELS]
    return a.astype(np.int64) - b.astype(np.int64)


def psnr_from_mse(mse_value: float) -> float:
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / mse_value)


def mse(a: np.ndarray, b: np.ndarray) -> float:
    d = _carrier_diff(a, b)
    return float(np.mean(d * d)) if d.size else 0.0


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    return psnr_from_mse(mse(a, b))


def compare(a: np.ndarray, b: np.ndarray) -> MetricsReport:
    d = _carrier_diff(a, b)
    m = float(np.mean(d * d)) if d.size else 0.0
    return MetricsReport(
        mse=m,
        psnr_db=psnr_from_mse(m),
        samples_compared=int(d.size),
        max_abs_diff=int(np.abs(d).max()) if d.size else 0,
    )
