"""Three-key 3DES (EDE) and its CBC byte-stream mode with PKCS#7 padding.

The 24 octets of key material carry 168 key bits (plus parity). Because of
meet-in-the-middle attacks the effective strength is about 112 bits; that
figure is documentation only and is not computed anywhere.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .des_core import (
    BLOCK_SIZE,
    DesKey,
    _chunked,
    _crypt,
)
from .errors import BadCiphertextLength, BadPadding, WrongKeyLength

KEY_SIZE = 24
DES_ROUNDS_PER_BLOCK = 48


class WeakKeyWarning(UserWarning):
    """A 3DES key whose strength is silently reduced."""


# Parity-adjusted forms from the DES standard's weak and semi-weak key lists.
WEAK_KEYS = frozenset(
    bytes.fromhex(h)
    for h in (
        "0101010101010101",
        "FEFEFEFEFEFEFEFE",
        "E0E0E0E0F1F1F1F1",
        "1F1F1F1F0E0E0E0E",
    )
)

SEMI_WEAK_PAIRS = tuple(
    (bytes.fromhex(a), bytes.fromhex(b))
    for a, b in (
        ("011F011F010E010E", "1F011F010E010E01"),
        ("01E001E001F101F1", "E001E001F101F101"),
        ("01FE01FE01FE01FE", "FE01FE01FE01FE01"),
        ("1FE01FE00EF10EF1", "E01FE01FF10EF10E"),
        ("1FFE1FFE0EFE0EFE", "FE1FFE1FFE0EFE0E"),
        ("E0FEE0FEF1FEF1FE", "FEE0FEE0FEF1FEF1"),
    )
)

_WEAK = frozenset(DesKey(k).effective() for k in WEAK_KEYS)
_SEMI_WEAK = frozenset(
    DesKey(k).effective() for pair in SEMI_WEAK_PAIRS for k in pair
)


@dataclass(frozen=True)
class TdesKey:
    k1: DesKey
    k2: DesKey
    k3: DesKey

    @classmethod
    def from_bytes(cls, material: bytes) -> "TdesKey":
        return split_key(material)

    def to_bytes(self) -> bytes:
        return self.k1.octets + self.k2.octets + self.k3.octets

    def __repr__(self) -> str:
        return "TdesKey(<redacted>)"


def key_warnings(key: TdesKey) -> list[str]:
    """Describe every way ``key`` is weaker than three independent DES keys."""
    problems = []
    for name, part in (("k1", key.k1), ("k2", key.k2), ("k3", key.k3)):
        eff = part.effective()
        if eff in _WEAK:
            problems.append(f"{name} is a weak DES key")
        elif eff in _SEMI_WEAK:
            problems.append(f"{name} is a semi-weak DES key")
    e1, e2, e3 = key.k1.effective(), key.k2.effective(), key.k3.effective()
    if e1 == e2:
        problems.append("k1 equals k2: EDE collapses to single DES under k3")
    if e2 == e3:
        problems.append("k2 equals k3: EDE collapses to single DES under k1")
    if e1 == e3 and e1 != e2:
        problems.append("k1 equals k3: two-key 3DES, not three-key")
    return problems


def split_key(material: bytes) -> TdesKey:
    """Partition 24 octets into (k1, k2, k3). Weak keys raise a :class:`WeakKeyWarning`."""
    if len(material) != KEY_SIZE:
        raise WrongKeyLength(f"3DES key material must be {KEY_SIZE} octets, got {len(material)}")
    material = bytes(material)
    key = TdesKey(DesKey(material[:8]), DesKey(material[8:16]), DesKey(material[16:]))
    for problem in key_warnings(key):
        warnings.warn(problem, WeakKeyWarning, stacklevel=2)
    return key


def _enc_chain(key: TdesKey):
    return (
        _chunked(key.k1.octets, False),
        _chunked(key.k2.octets, True),
        _chunked(key.k3.octets, False),
    )


def _dec_chain(key: TdesKey):
    return (
        _chunked(key.k3.octets, True),
        _chunked(key.k2.octets, False),
        _chunked(key.k1.octets, True),
    )


def tdes_encrypt_block(block: int, key: TdesKey) -> int:
    """E(k3, D(k2, E(k1, block)))."""
    a, b, c = _enc_chain(key)
    return _crypt(_crypt(_crypt(block, a), b), c)


def tdes_decrypt_block(block: int, key: TdesKey) -> int:
    """D(k1, E(k2, D(k3, block)))."""
    a, b, c = _dec_chain(key)
    return _crypt(_crypt(_crypt(block, a), b), c)


def pad(data: bytes) -> bytes:
    n = BLOCK_SIZE - len(data) % BLOCK_SIZE
    return data + bytes([n]) * n


def unpad(data: bytes) -> bytes:
    n = data[-1]
    if not 1 <= n <= BLOCK_SIZE or data[-n:] != bytes([n]) * n:
        raise BadPadding("invalid padding: wrong key or corrupted ciphertext")
    return data[:-n]


def _check_iv(iv: bytes) -> int:
    if len(iv) != BLOCK_SIZE:
        raise ValueError("IV must be 8 octets")
    return int.from_bytes(iv, "big")


def encrypt_stream(plaintext: bytes, key: TdesKey, iv: bytes) -> bytes:
    """CBC-encrypt with PKCS#7 padding; always emits ``(len // 8 + 1) * 8`` octets."""
    a, b, c = _enc_chain(key)
    prev = _check_iv(iv)
    data = pad(plaintext)
    out = bytearray()
    for i in range(0, len(data), BLOCK_SIZE):
        block = int.from_bytes(data[i : i + BLOCK_SIZE], "big") ^ prev
        prev = _crypt(_crypt(_crypt(block, a), b), c)
        out += prev.to_bytes(BLOCK_SIZE, "big")
    return bytes(out)


def decrypt_stream(ciphertext: bytes, key: TdesKey, iv: bytes) -> bytes:
    if not ciphertext or len(ciphertext) % BLOCK_SIZE:
        raise BadCiphertextLength(
            f"ciphertext length {len(ciphertext)} is not a positive multiple of {BLOCK_SIZE}"
        )
    a, b, c = _dec_chain(key)
    prev = _check_iv(iv)
    out = bytearray()
    for i in range(0, len(ciphertext), BLOCK_SIZE):
        block = int.from_bytes(ciphertext[i : i + BLOCK_SIZE], "big")
        out += (_crypt(_crypt(_crypt(block, a), b), c) ^ prev).to_bytes(BLOCK_SIZE, "big")
        prev = block
    return unpad(bytes(out))

