"""Key expansion: 128-bit key -> 1024-bit BLAKE2b digest -> per-coefficient bits."""

import hashlib

import numpy as np

from .errors import ParamsError

KEY_BYTES = 16
DIGEST_BITS = 1024
_HALF_DIGEST_BYTES = 64


def derive_digest(key: bytes) -> bytes:
    """H(key || 0x00) || H(key || 0x01) with unkeyed, unsalted 512-bit BLAKE2b."""
    key = bytes(key)
    if len(key) != KEY_BYTES:
        raise ParamsError(f"Key must be exactly 128 bits (got {len(key) * 8})")
    halves = [
        hashlib.blake2b(key + bytes([domain]), digest_size=_HALF_DIGEST_BYTES).digest()
        for domain in (0, 1)
    ]
    return b"".join(halves)


def digest_bits(digest: bytes) -> np.ndarray:
    """Digest bytes as a 0/1 vector, most significant bit first."""
    return np.unpackbits(np.frombuffer(bytes(digest), dtype=np.uint8))


def expand_key(digest, target_len: int) -> np.ndarray:
    """Repeat the digest bits cyclically and truncate to ``target_len``.

    ``digest`` may be raw bytes or an already unpacked bit vector.
    """
    if target_len < 0:
        raise ParamsError(f"Target length must be >= 0 (got {target_len})")
    bits = digest_bits(digest) if isinstance(digest, (bytes, bytearray)) else np.asarray(digest, dtype=np.uint8)
    if bits.size != DIGEST_BITS:
        raise ParamsError(f"Digest must hold {DIGEST_BITS} bits (got {bits.size})")
    return np.resize(bits, target_len)


def key_chunk(digest, index: int) -> np.ndarray:
    """The 64 key bits governing coefficient chunk ``index``."""
    bits = digest_bits(digest) if isinstance(digest, (bytes, bytearray)) else np.asarray(digest, dtype=np.uint8)
    start = (index * 64) % DIGEST_BITS
    return bits[start:start + 64]
