import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stegacrypt.errors import ShapeMismatch
from stegacrypt.lsb_codec import capacity, embed
from stegacrypt.metrics import compare, mse, psnr, psnr_from_mse

PSNR_AT_MSE_1 = 10 * math.log10(255**2)  # 48.1308...


def test_identical():
    x = np.full((3, 3, 3), 7, dtype=np.uint8)
    assert mse(x, x) == 0
    assert psnr(x, x) == math.inf
    report = compare(x, x)
    assert report.max_abs_diff == 0
    assert report.to_dict()["psnr_db"] is None
    assert "psnr_db: inf" in report.to_text()


def test_one_channel_off_by_one():
    a = np.array([[[10, 20, 30]]], dtype=np.uint8)
    b = np.array([[[11, 20, 30]]], dtype=np.uint8)
    assert mse(a, b) == pytest.approx(1 / 3)
    assert compare(a, b).samples_compared == 3


def test_psnr_at_unit_mse():
    assert psnr_from_mse(1.0) == pytest.approx(48.1308, abs=1e-3)
    a = np.zeros((2, 2, 3), dtype=np.uint8)
    assert psnr(a, a + 1) == pytest.approx(48.1308, abs=1e-3)


def test_alpha_excluded():
    a = np.zeros((2, 2, 4), dtype=np.uint8)
    b = a.copy()
    b[..., 3] = 255
    assert mse(a, b) == 0
    assert compare(a, b).samples_compared == 12


def test_no_wraparound():
    a = np.array([[[0, 0, 0]]], dtype=np.uint8)
    b = np.array([[[255, 0, 0]]], dtype=np.uint8)
    assert mse(a, b) == pytest.approx(255**2 / 3)
    assert compare(a, b).max_abs_diff == 255


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        mse(np.zeros((2, 2, 3), np.uint8), np.zeros((2, 3, 3), np.uint8))
    with pytest.raises(ShapeMismatch):
        psnr(np.zeros((2, 2, 3), np.uint8), np.zeros((2, 2, 4), np.uint8))


def test_report_serialisation():
    a = np.zeros((2, 2, 3), dtype=np.uint8)
    b = a.copy()
    b[0, 0, 0] = 2
    report = compare(a, b)
    d = json.loads(json.dumps(report.to_dict()))
    assert d == {"mse": 1 / 3, "psnr_db": report.psnr_db, "samples_compared": 12, "max_abs_diff": 2}
    lines = dict(line.split(": ") for line in report.to_text().splitlines())
    assert float(lines["mse"]) == pytest.approx(1 / 3, abs=1e-6)
    assert int(lines["max_abs_diff"]) == 2


def test_full_capacity_embed_psnr_band(rng):
    cover = rng.integers(0, 256, size=(256, 256, 3), dtype=np.uint8)
    payload = rng.integers(0, 256, size=capacity(cover), dtype=np.uint8).tobytes()
    stego = embed(cover, payload)
    m = mse(cover, stego)
    assert m <= 1.0
    assert m == pytest.approx(0.5, abs=0.02)
    assert 50.0 <= psnr(cover, stego) <= 53.0


pairs = st.tuples(st.integers(1, 8), st.integers(1, 8), st.sampled_from([3, 4])).flatmap(
    lambda s: st.tuples(arrays(np.uint8, s), arrays(np.uint8, s))
)


@given(pairs)
def test_symmetry_and_report_invariants(pair):
    a, b = pair
    assert mse(a, b) == mse(b, a)
    r = compare(a, b)
    assert (r.mse == 0) == math.isinf(r.psnr_db) == (r.max_abs_diff == 0)


@given(st.floats(1e-6, 65025), st.floats(1e-6, 65025))
def test_psnr_monotone(m1, m2):
    if m1 < m2:
        assert psnr_from_mse(m1) > psnr_from_mse(m2)


@settings(max_examples=40, deadline=None)
@given(
    st.tuples(st.integers(4, 20), st.integers(4, 20), st.sampled_from([3, 4])).flatmap(
        lambda s: arrays(np.uint8, s)
    ).filter(lambda img: img.shape[0] * img.shape[1] * 3 >= 72),
    st.data(),
)
def test_embed_bound(cover, data):
    n = data.draw(st.integers(0, capacity(cover)))
    stego = embed(cover, data.draw(st.binary(min_size=n, max_size=n)))
    assert mse(cover, stego) <= 1.0
    assert psnr(cover, stego) >= PSNR_AT_MSE_1 - 1e-9
