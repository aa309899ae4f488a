import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import seeded_bytes
from stegacrypt import lsb_codec
from stegacrypt.envelope import Secret, decode
from stegacrypt.errors import BadPadding, CrcMismatch, NoFrameFound, PayloadTooLarge, TruncatedFrame
from stegacrypt.pipeline import NOT_REPRODUCIBLE, compare_report, required_capacity, retrieve, secure

RAW = Secret.from_key(bytes.fromhex("0123456789ABCDEF23456789ABCDEF01456789ABCDEF0123"))
PASS = Secret.from_passphrase("ward-7 night shift")


@pytest.fixture
def big_cover(rng):
    return rng.integers(0, 256, size=(256, 256, 3), dtype=np.uint8)


@pytest.mark.parametrize("secret", [RAW, PASS], ids=["raw", "passphrase"])
def test_roundtrip_2kib(big_cover, secret):
    record = random.Random(20).randbytes(2048)
    result = secure(record, secret, big_cover)
    assert retrieve(result.stego, secret) == record
    assert result.metrics.psnr_db >= 48.13
    assert np.all((result.stego >> 1) == (big_cover >> 1))


def test_empty_record_frame_length(noise_cover):
    result = secure(b"", RAW, noise_cover)
    assert result.payload_octets == 46
    assert result.frame_octets == 55
    assert result.capacity_used_fraction == pytest.approx(55 / (lsb_codec.capacity(noise_cover) + 9))
    assert retrieve(result.stego, RAW) == b""


def test_record_too_large_for_cover(rng):
    cover = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    with pytest.raises(PayloadTooLarge) as err:
        secure(bytes(2048), RAW, cover)
    assert err.value.available == 87
    assert err.value.required == required_capacity(2048) == 38 + 2056
    assert "2094" in str(err.value) and "87" in str(err.value)


def test_exact_fit_boundary(noise_cover):
    cap = lsb_codec.capacity(noise_cover)
    # largest record whose envelope still fits
    n = max(k for k in range(cap) if required_capacity(k) <= cap)
    record = bytes(range(256)) * (n // 256) + bytes(n % 256)
    result = secure(record, RAW, noise_cover)
    assert retrieve(result.stego, RAW) == record
    assert result.capacity_used_fraction <= 1.0
    with pytest.raises(PayloadTooLarge):
        secure(bytes(n + 8), RAW, noise_cover)


def test_layer_independence(noise_cover):
    result = secure(b"Diagnosis: I10", RAW, noise_cover, rng=seeded_bytes(3))
    assert lsb_codec.extract(result.stego) == result.envelope
    assert decode(result.envelope).iv == seeded_bytes(3)(8)


def test_wrong_key_is_detected_almost_always(noise_cover):
    result = secure(b"Blood group: A-", RAW, noise_cover, rng=seeded_bytes(4))
    r = random.Random(21)
    outcomes = []
    for _ in range(100):
        try:
            retrieve(result.stego, Secret.from_key(r.randbytes(24)))
            outcomes.append("silent")
        except BadPadding:
            outcomes.append("bad-padding")
    assert outcomes.count("bad-padding") >= 99


def test_plain_cover_has_no_payload(noise_cover):
    with pytest.raises(NoFrameFound):
        retrieve(noise_cover, RAW)


def test_corrupted_ciphertext_bit(noise_cover):
    result = secure(b"x" * 100, RAW, noise_cover)
    flat = result.stego.reshape(-1)
    flat[(9 + 38 + 10) * 8 + 3] ^= 1
    with pytest.raises(CrcMismatch):
        retrieve(result.stego, RAW)


def test_cropped_stego(noise_cover):
    result = secure(bytes(1000), RAW, noise_cover)
    with pytest.raises(TruncatedFrame):
        retrieve(result.stego[:20], RAW)


def test_rgba_cover_keeps_alpha(rgba_cover):
    result = secure(b"record", RAW, rgba_cover)
    assert np.array_equal(result.stego[..., 3], rgba_cover[..., 3])
    assert retrieve(result.stego, RAW) == b"record"


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_roundtrip_up_to_90_percent(data):
    cover = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1))).integers(
        0, 256, size=(32, 40, 3), dtype=np.uint8
    )
    limit = int(0.9 * lsb_codec.capacity(cover))
    record = data.draw(st.binary(max_size=limit).filter(lambda r: required_capacity(len(r)) <= lsb_codec.capacity(cover)))
    result = secure(record, RAW, cover)
    assert retrieve(result.stego, RAW) == record
    assert result.metrics.mse <= 1.0
    assert np.all((result.stego >> 1) == (cover >> 1))


def test_records_corpus(records, noise_cover):
    for name, record in records.items():
        assert retrieve(secure(record, RAW, noise_cover).stego, RAW) == record, name


def test_compare_report(big_cover):
    rows = {row.name: row for row in compare_report(bytes(2048), PASS, big_cover, repeats=2)}
    layers = rows["security layers"]
    assert (layers.combined, layers.tdes_only, layers.lsb_only) == (2, 1, 1)
    keys = rows["keys required"]
    assert (keys.combined, keys.tdes_only, keys.lsb_only) == (2, 1, 1)
    rounds = rows["DES rounds per block"]
    assert (rounds.combined, rounds.tdes_only, rounds.lsb_only) == (48, 48, 0)
    speed = rows["throughput (bytes/s)"]
    assert speed.combined < speed.tdes_only
    assert speed.lsb_only > speed.combined
    kdf = rows["key derivation (s)"]
    assert kdf.combined == kdf.tdes_only > 0 and kdf.lsb_only is None
    psnr_row = rows["psnr (dB)"]
    assert psnr_row.tdes_only is None
    assert psnr_row.combined >= 48.13 and psnr_row.lsb_only >= 48.13
    ok = rows["record recovered exactly"]
    assert ok.combined and ok.tdes_only and ok.lsb_only
    for name in ("reliability (%)", "speed (%)"):
        assert rows[name].combined == NOT_REPRODUCIBLE


def test_compare_report_needs_room(rng):
    cover = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    with pytest.raises(PayloadTooLarge):
        compare_report(bytes(100), RAW, cover, repeats=1)


def test_psnr_infinite_only_when_untouched(noise_cover):
    result = secure(b"", RAW, noise_cover)
    assert not math.isinf(result.metrics.psnr_db)
