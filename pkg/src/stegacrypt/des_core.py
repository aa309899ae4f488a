"""Single-DES block primitive.

Blocks are Python ints holding 64 bits. A message octet string maps to a block
big-endian, so the first octet is the most significant. All permutation tables
use the numbering of the published standard: position 1 is the most
significant bit of the input.

The round function runs on precomputed lookup tables (S-box merged with the P
permutation, IP/FP split per input octet). The plain tables stay exported so
tests can check the fast path against a literal transcription.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

BLOCK_SIZE = 8
ROUNDS = 16

# fmt: off
IP = (
    58, 50, 42, 34, 26, 18, 10, 2,
    60, 52, 44, 36, 28, 20, 12, 4,
    62, 54, 46, 38, 30, 22, 14, 6,
    64, 56, 48, 40, 32, 24, 16, 8,
    57, 49, 41, 33, 25, 17, 9, 1,
    59, 51, 43, 35, 27, 19, 11, 3,
    61, 53, 45, 37, 29, 21, 13, 5,
    63, 55, 47, 39, 31, 23, 15, 7,
)

FP = (
    40, 8, 48, 16, 56, 24, 64, 32,
    39, 7, 47, 15, 55, 23, 63, 31,
    38, 6, 46, 14, 54, 22, 62, 30,
    37, 5, 45, 13, 53, 21, 61, 29,
    36, 4, 44, 12, 52, 20, 60, 28,
    35, 3, 43, 11, 51, 19, 59, 27,
    34, 2, 42, 10, 50, 18, 58, 26,
    33, 1, 41, 9, 49, 17, 57, 25,
)

E = (
    32, 1, 2, 3, 4, 5,
    4, 5, 6, 7, 8, 9,
    8, 9, 10, 11, 12, 13,
    12, 13, 14, 15, 16, 17,
    16, 17, 18, 19, 20, 21,
    20, 21, 22, 23, 24, 25,
    24, 25, 26, 27, 28, 29,
    28, 29, 30, 31, 32, 1,
)

P = (
    16, 7, 20, 21,
    29, 12, 28, 17,
    1, 15, 23, 26,
    5, 18, 31, 10,
    2, 8, 24, 14,
    32, 27, 3, 9,
    19, 13, 30, 6,
    22, 11, 4, 25,
)

PC1 = (
    57, 49, 41, 33, 25, 17, 9,
    1, 58, 50, 42, 34, 26, 18,
    10, 2, 59, 51, 43, 35, 27,
    19, 11, 3, 60, 52, 44, 36,
    63, 55, 47, 39, 31, 23, 15,
    7, 62, 54, 46, 38, 30, 22,
    14, 6, 61, 53, 45, 37, 29,
    21, 13, 5, 28, 20, 12, 4,
)

PC2 = (
    14, 17, 11, 24, 1, 5,
    3, 28, 15, 6, 21, 10,
    23, 19, 12, 4, 26, 8,
    16, 7, 27, 20, 13, 2,
    41, 52, 31, 37, 47, 55,
    30, 40, 51, 45, 33, 48,
    44, 49, 39, 56, 34, 53,
    46, 42, 50, 36, 29, 32,
)

ROTATIONS = (1, 1, 2, 2, 2, 2, 2, 2, 1, 2, 2, 2, 2, 2, 2, 1)

SBOXES = (
    (
        (14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7),
        (0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12, 11, 9, 5, 3, 8),
        (4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0),
        (15, 12, 8, 2, 4, 9, 1, 7, 5, 11, 3, 14, 10, 0, 6, 13),
    ),
    (
        (15, 1, 8, 14, 6, 11, 3, 4, 9, 7, 2, 13, 12, 0, 5, 10),
        (3, 13, 4, 7, 15, 2, 8, 14, 12, 0, 1, 10, 6, 9, 11, 5),
        (0, 14, 7, 11, 10, 4, 13, 1, 5, 8, 12, 6, 9, 3, 2, 15),
        (13, 8, 10, 1, 3, 15, 4, 2, 11, 6, 7, 12, 0, 5, 14, 9),
    ),
    (
        (10, 0, 9, 14, 6, 3, 15, 5, 1, 13, 12, 7, 11, 4, 2, 8),
        (13, 7, 0, 9, 3, 4, 6, 10, 2, 8, 5, 14, 12, 11, 15, 1),
        (13, 6, 4, 9, 8, 15, 3, 0, 11, 1, 2, 12, 5, 10, 14, 7),
        (1, 10, 13, 0, 6, 9, 8, 7, 4, 15, 14, 3, 11, 5, 2, 12),
    ),
    (
        (7, 13, 14, 3, 0, 6, 9, 10, 1, 2, 8, 5, 11, 12, 4, 15),
        (13, 8, 11, 5, 6, 15, 0, 3, 4, 7, 2, 12, 1, 10, 14, 9),
        (10, 6, 9, 0, 12, 11, 7, 13, 15, 1, 3, 14, 5, 2, 8, 4),
        (3, 15, 0, 6, 10, 1, 13, 8, 9, 4, 5, 11, 12, 7, 2, 14),
    ),
    (
        (2, 12, 4, 1, 7, 10, 11, 6, 8, 5, 3, 15, 13, 0, 14, 9),
        (14, 11, 2, 12, 4, 7, 13, 1, 5, 0, 15, 10, 3, 9, 8, 6),
        (4, 2, 1, 11, 10, 13, 7, 8, 15, 9, 12, 5, 6, 3, 0, 14),
        (11, 8, 12, 7, 1, 14, 2, 13, 6, 15, 0, 9, 10, 4, 5, 3),
    ),
    (
        (12, 1, 10, 15, 9, 2, 6, 8, 0, 13, 3, 4, 14, 7, 5, 11),
        (10, 15, 4, 2, 7, 12, 9, 5, 6, 1, 13, 14, 0, 11, 3, 8),
        (9, 14, 15, 5, 2, 8, 12, 3, 7, 0, 4, 10, 1, 13, 11, 6),
        (4, 3, 2, 12, 9, 5, 15, 10, 11, 14, 1, 7, 6, 0, 8, 13),
    ),
    (
        (4, 11, 2, 14, 15, 0, 8, 13, 3, 12, 9, 7, 5, 10, 6, 1),
        (13, 0, 11, 7, 4, 9, 1, 10, 14, 3, 5, 12, 2, 15, 8, 6),
        (1, 4, 11, 13, 12, 3, 7, 14, 10, 15, 6, 8, 0, 5, 9, 2),
        (6, 11, 13, 8, 1, 4, 10, 7, 9, 5, 0, 15, 14, 2, 3, 12),
    ),
    (
        (13, 2, 8, 4, 6, 15, 11, 1, 10, 9, 3, 14, 5, 0, 12, 7),
        (1, 15, 13, 8, 10, 3, 7, 4, 12, 5, 6, 11, 0, 14, 9, 2),
        (7, 11, 4, 1, 9, 12, 14, 2, 0, 6, 10, 13, 15, 3, 5, 8),
        (2, 1, 14, 7, 4, 10, 8, 13, 15, 12, 9, 0, 3, 5, 6, 11),
    ),
)
# fmt: on

_MASK28 = (1 << 28) - 1
_MASK32 = (1 << 32) - 1
_MASK64 = (1 << 64) - 1


def permute(value: int, table, in_bits: int) -> int:
    """Apply a 1-indexed, MSB-first bit selection table to ``value``."""
    out = 0
    for pos in table:
        out = (out << 1) | ((value >> (in_bits - pos)) & 1)
    return out


@dataclass(frozen=True)
class DesKey:
    """Eight octets of key material. The low bit of each octet is parity and is ignored."""

    octets: bytes

    def __post_init__(self):
        if not isinstance(self.octets, (bytes, bytearray)) or len(self.octets) != 8:
            raise ValueError("a DES key is exactly 8 octets")
        object.__setattr__(self, "octets", bytes(self.octets))

    def effective(self) -> bytes:
        """Key octets with parity bits cleared."""
        return bytes(b & 0xFE for b in self.octets)

    def complement(self) -> "DesKey":
        return DesKey(bytes(b ^ 0xFF for b in self.octets))

    def __repr__(self) -> str:
        return "DesKey(<redacted>)"


KeyLike = Union[DesKey, bytes, bytearray]


def _key_octets(key: KeyLike) -> bytes:
    if isinstance(key, DesKey):
        return key.octets
    return DesKey(key).octets


def block_from_bytes(data: bytes) -> int:
    if len(data) != BLOCK_SIZE:
        raise ValueError("a block is exactly 8 octets")
    return int.from_bytes(data, "big")


def block_to_bytes(block: int) -> bytes:
    return block.to_bytes(BLOCK_SIZE, "big")


def _rotl28(value: int, n: int) -> int:
    return ((value << n) | (value >> (28 - n))) & _MASK28


def key_schedule(key: KeyLike) -> tuple[int, ...]:
    """Derive the 16 round keys (48 bits each) used for encryption, in order.

    Decryption uses the same tuple reversed.
    """
    return _schedule(_key_octets(key))


@lru_cache(maxsize=256)
def _schedule(octets: bytes) -> tuple[int, ...]:
    cd = permute(int.from_bytes(octets, "big"), PC1, 64)
    c, d = cd >> 28, cd & _MASK28
    keys = []
    for shift in ROTATIONS:
        c, d = _rotl28(c, shift), _rotl28(d, shift)
        keys.append(permute((c << 28) | d, PC2, 56))
    return tuple(keys)


def _chunks(subkey: int) -> tuple[int, ...]:
    return tuple((subkey >> (42 - 6 * i)) & 0x3F for i in range(8))


@lru_cache(maxsize=256)
def _chunked(octets: bytes, decrypt: bool) -> tuple[tuple[int, ...], ...]:
    keys = _schedule(octets)
    if decrypt:
        keys = keys[::-1]
    return tuple(_chunks(k) for k in keys)


def _build_sp() -> tuple[tuple[int, ...], ...]:
    tables = []
    for i, box in enumerate(SBOXES):
        entries = []
        for x in range(64):
            row = ((x >> 4) & 0b10) | (x & 1)
            col = (x >> 1) & 0xF
            entries.append(permute(box[row][col] << (28 - 4 * i), P, 32))
        tables.append(tuple(entries))
    return tuple(tables)


def _build_octet_tables(table) -> tuple[tuple[int, ...], ...]:
    # tables[j][v]: contribution of input octet j holding value v
    return tuple(
        tuple(permute(v << (56 - 8 * j), table, 64) for v in range(256))
        for j in range(8)
    )


_SP = _build_sp()
_IP_T = _build_octet_tables(IP)
_FP_T = _build_octet_tables(FP)


def _apply_octet_tables(value: int, tables) -> int:
    t0, t1, t2, t3, t4, t5, t6, t7 = tables
    return (
        t0[value >> 56]
        | t1[(value >> 48) & 0xFF]
        | t2[(value >> 40) & 0xFF]
        | t3[(value >> 32) & 0xFF]
        | t4[(value >> 24) & 0xFF]
        | t5[(value >> 16) & 0xFF]
        | t6[(value >> 8) & 0xFF]
        | t7[value & 0xFF]
    )


def expand(half: int) -> int:
    """E expansion of a 32-bit half block to 48 bits (fast path, no table walk)."""
    x = ((half & 1) << 33) | (half << 1) | (half >> 31)
    out = 0
    for i in range(8):
        out = (out << 6) | ((x >> (28 - 4 * i)) & 0x3F)
    return out


def feistel(half: int, subkey: int) -> int:
    """The f-function: expand, mix key, substitute, permute."""
    x = expand(half) ^ subkey
    out = 0
    for i in range(8):
        out |= _SP[i][(x >> (42 - 6 * i)) & 0x3F]
    return out


# Rounds executed in the current context, for instrumentation only.
_round_counter: ContextVar["RoundCounter | None"] = ContextVar(
    "des_round_counter", default=None
)


@dataclass
class RoundCounter:
    rounds: int = 0


@contextmanager
def count_rounds() -> Iterator[RoundCounter]:
    """Count every DES round executed inside the ``with`` block.

    Context-local, so concurrent callers in other threads or tasks are not
    counted.
    """
    counter = RoundCounter()
    token = _round_counter.set(counter)
    try:
        yield counter
    finally:
        _round_counter.reset(token)


def _crypt(block: int, subkeys) -> int:
    s0, s1, s2, s3, s4, s5, s6, s7 = _SP
    counter = _round_counter.get()
    block = _apply_octet_tables(block & _MASK64, _IP_T)
    left, right = block >> 32, block & _MASK32
    for k0, k1, k2, k3, k4, k5, k6, k7 in subkeys:
        x = ((right & 1) << 33) | (right << 1) | (right >> 31)
        f = (
            s0[((x >> 28) ^ k0) & 0x3F]
            | s1[((x >> 24) ^ k1) & 0x3F]
            | s2[((x >> 20) ^ k2) & 0x3F]
            | s3[((x >> 16) ^ k3) & 0x3F]
            | s4[((x >> 12) ^ k4) & 0x3F]
            | s5[((x >> 8) ^ k5) & 0x3F]
            | s6[((x >> 4) ^ k6) & 0x3F]
            | s7[(x ^ k7) & 0x3F]
        )
        left, right = right, left ^ f
        if counter is not None:
            counter.rounds += 1
    return _apply_octet_tables((right << 32) | left, _FP_T)


def des_encrypt_block(block: int, key: KeyLike) -> int:
    return _crypt(block, _chunked(_key_octets(key), False))


def des_decrypt_block(block: int, key: KeyLike) -> int:
    """Inverse of :func:`des_encrypt_block`: same rounds, schedule reversed."""
    return _crypt(block, _chunked(_key_octets(key), True))
