"""Self-describing encrypted container for one record.

Wire format (all integers big-endian)::

    offset  size  field
    0       4     magic  "SGE1"
    4       1     version 0x01
    5       1     flags   bit 0 set = key derived from a passphrase
    6       16    salt    (all zero in raw-key mode)
    22      8     CBC IV
    30      4     ct_len
    34      4     CRC-32 (IEEE) of the ciphertext
    38      n     ciphertext, ct_len octets, a positive multiple of 8

The CRC detects corruption in transit or extraction. It is not a MAC and
offers no protection against deliberate tampering.
"""

from __future__ import annotations

import hashlib
import os
import struct
import zlib
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (
    BadCiphertextLength,
    BadMagic,
    BadVersion,
    CrcMismatch,
    EmptyPassphrase,
    EnvelopeFormatError,
    PlaintextTooLarge,
    SecretModeMismatch,
    TruncatedEnvelope,
    WrongKeyLength,
)
from .triple_des import KEY_SIZE, decrypt_stream, encrypt_stream, split_key

MAGIC = b"SGE1"
VERSION = 0x01
FLAG_PASSPHRASE = 0x01
SALT_SIZE = 16
IV_SIZE = 8
HEADER = struct.Struct(">4sBB16s8sII")
HEADER_SIZE = HEADER.size  # 38
MIN_SIZE = HEADER_SIZE + 8
MAX_PLAINTEXT = 2**32 - 64

# Tied to VERSION: changing either means a new format version.
KDF_HASH = "sha256"
KDF_ITERATIONS = 200_000

RandomBytes = Callable[[int], bytes]


@dataclass(frozen=True)
class Secret:
    """Either 24 octets of raw 3DES key material or a non-empty passphrase."""

    raw_key: Optional[bytes] = None
    passphrase: Optional[str] = None

    def __post_init__(self):
        if (self.raw_key is None) == (self.passphrase is None):
            raise ValueError("exactly one of raw_key or passphrase must be given")
        if self.passphrase is not None and not self.passphrase:
            raise EmptyPassphrase("passphrase must not be empty")
        if self.raw_key is not None and len(self.raw_key) != KEY_SIZE:
            raise WrongKeyLength(f"raw key must be {KEY_SIZE} octets, got {len(self.raw_key)}")

    @classmethod
    def from_passphrase(cls, passphrase: str) -> "Secret":
        return cls(passphrase=passphrase)

    @classmethod
    def from_key(cls, key: bytes) -> "Secret":
        return cls(raw_key=bytes(key))

    @classmethod
    def from_hex(cls, text: str) -> "Secret":
        try:
            key = bytes.fromhex(text)
        except ValueError as exc:
            raise WrongKeyLength(f"key is not valid hex: {exc}") from None
        return cls.from_key(key)

    @property
    def is_passphrase(self) -> bool:
        return self.passphrase is not None

    def __repr__(self) -> str:
        kind = "passphrase" if self.is_passphrase else "raw_key"
        return f"Secret({kind}=<redacted>)"


@dataclass(frozen=True)
class Envelope:
    flags: int
    salt: bytes
    iv: bytes
    ciphertext: bytes
    crc32: Optional[int] = None

    def __post_init__(self):
        if self.crc32 is None:
            object.__setattr__(self, "crc32", zlib.crc32(self.ciphertext))

    @property
    def ct_len(self) -> int:
        return len(self.ciphertext)

    @property
    def passphrase_derived(self) -> bool:
        return bool(self.flags & FLAG_PASSPHRASE)

    def encode(self) -> bytes:
        return encode(self)


def envelope_size(plaintext_len: int) -> int:
    """Serialized size of the envelope sealing ``plaintext_len`` octets."""
    return HEADER_SIZE + (plaintext_len // 8 + 1) * 8


def derive_key(passphrase: str, salt: bytes) -> bytes:
    """Stretch a passphrase into 24 octets of 3DES key material (PBKDF2-HMAC-SHA256)."""
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    if len(salt) != SALT_SIZE:
        raise ValueError(f"salt must be {SALT_SIZE} octets")
    return hashlib.pbkdf2_hmac(
        KDF_HASH, passphrase.encode("utf-8"), salt, KDF_ITERATIONS, KEY_SIZE
    )


def _key_material(secret: Secret, salt: bytes) -> bytes:
    if secret.passphrase is not None:
        return derive_key(secret.passphrase, salt)
    return secret.raw_key


@dataclass(frozen=True)
class SealingKey:
    """Key material ready for sealing, with the flags and salt that reproduce it."""

    flags: int
    salt: bytes
    material: bytes

    def __repr__(self) -> str:
        return f"SealingKey(flags={self.flags}, salt={self.salt.hex()}, material=<redacted>)"


def prepare_key(secret: Secret, rng: RandomBytes = os.urandom) -> SealingKey:
    """Draw a salt (passphrase mode only) and derive the key material once."""
    if secret.is_passphrase:
        flags, salt = FLAG_PASSPHRASE, rng(SALT_SIZE)
    else:
        flags, salt = 0, bytes(SALT_SIZE)
    return SealingKey(flags, salt, _key_material(secret, salt))


def seal_with_key(plaintext: bytes, key: SealingKey, rng: RandomBytes = os.urandom) -> Envelope:
    """Seal under already-derived key material with a fresh IV."""
    if len(plaintext) > MAX_PLAINTEXT:
        raise PlaintextTooLarge(f"plaintext of {len(plaintext)} octets exceeds {MAX_PLAINTEXT}")
    iv = rng(IV_SIZE)
    tdes_key = split_key(key.material)
    return Envelope(key.flags, key.salt, iv, encrypt_stream(plaintext, tdes_key, iv))


def seal(plaintext: bytes, secret: Secret, rng: RandomBytes = os.urandom) -> Envelope:
    """Encrypt ``plaintext`` under ``secret`` with a fresh IV (and salt, for passphrases).

    ``rng`` must be a cryptographically secure source outside of tests.
    """
    if len(plaintext) > MAX_PLAINTEXT:
        raise PlaintextTooLarge(f"plaintext of {len(plaintext)} octets exceeds {MAX_PLAINTEXT}")
    return seal_with_key(plaintext, prepare_key(secret, rng), rng)


def open_envelope(env: Envelope, secret: Secret) -> bytes:
    """Decrypt a parsed envelope. The CRC is checked before any decryption."""
    if zlib.crc32(env.ciphertext) != env.crc32:
        raise CrcMismatch("ciphertext CRC-32 mismatch: payload corrupted")
    if env.passphrase_derived != secret.is_passphrase:
        have = "a passphrase" if secret.is_passphrase else "a raw key"
        want = "a passphrase" if env.passphrase_derived else "a raw key"
        raise SecretModeMismatch(f"envelope was sealed with {want} but {have} was supplied")
    key = split_key(_key_material(secret, env.salt))
    return decrypt_stream(env.ciphertext, key, env.iv)


def encode(env: Envelope) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, env.flags, env.salt, env.iv, env.ct_len, env.crc32)
    return header + env.ciphertext


def decode(data: bytes) -> Envelope:
    """Parse and validate a serialized envelope.

    Rejects wrong magic, unknown version or flag bits, a length that disagrees
    with the buffer, and a CRC that disagrees with the ciphertext.
    """
    if len(data) < HEADER_SIZE:
        raise TruncatedEnvelope(f"envelope needs at least {HEADER_SIZE} octets, got {len(data)}")
    magic, version, flags, salt, iv, ct_len, crc = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"not an envelope (magic {magic!r})")
    if version != VERSION:
        raise BadVersion(f"unsupported envelope version {version}")
    if flags & ~FLAG_PASSPHRASE:
        raise EnvelopeFormatError(f"unknown flag bits 0x{flags:02x}")
    if not flags & FLAG_PASSPHRASE and any(salt):
        raise EnvelopeFormatError("raw-key envelope carries a non-zero salt")
    if ct_len == 0 or ct_len % 8:
        raise BadCiphertextLength(f"ct_len {ct_len} is not a positive multiple of 8")
    body = data[HEADER_SIZE:]
    if len(body) < ct_len:
        raise TruncatedEnvelope(f"ciphertext truncated: {len(body)} of {ct_len} octets")
    if len(body) > ct_len:
        raise EnvelopeFormatError(f"{len(body) - ct_len} trailing octets after ciphertext")
    if zlib.crc32(body) != crc:
        raise CrcMismatch("ciphertext CRC-32 mismatch: payload corrupted")
    return Envelope(flags, salt, iv, bytes(body), crc)
