"""8x8 block DCT/IDCT, quantization and zigzag scan.

Every function accepts a single 8x8 block or a stack of shape (..., 8, 8),
so a whole image is transformed in one call.
"""

import math

import numpy as np
from scipy import fft

from .errors import ParamsError
from .models import QuantTable

BASE_QUANT_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)


def _zigzag_positions():
    # odd anti-diagonals run down-left, even ones up-right
    cells = [(i, j) for i in range(8) for j in range(8)]
    return sorted(cells, key=lambda p: (p[0] + p[1], p[0] if (p[0] + p[1]) % 2 else -p[0]))


ZIGZAG_POSITIONS = tuple(_zigzag_positions())
ZIGZAG_FLAT = np.array([i * 8 + j for i, j in ZIGZAG_POSITIONS], dtype=np.intp)

# zigzag indices 1..8 (0-based): the first eight AC coefficients
AC_SLICE = slice(1, 9)


def round_half_away(values) -> np.ndarray:
    """Round to the nearest integer, ties away from zero."""
    values = np.asarray(values, dtype=np.float64)
    magnitude = np.abs(values)
    whole = np.floor(magnitude)
    whole += (magnitude - whole) >= 0.5
    return np.copysign(whole, values)


def dct_forward(block) -> np.ndarray:
    """Orthonormal 2D DCT-II of 8x8 blocks, in double precision."""
    return fft.dctn(np.asarray(block, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def dct_inverse(coeffs) -> np.ndarray:
    """Inverse of :func:`dct_forward`; the caller rounds for pixel storage."""
    return fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def _sigma(x: int) -> float:
    return math.sqrt(0.5) if x == 0 else 1.0


def dct_forward_reference(block) -> np.ndarray:
    """Literal double sum of the block DCT for a single 8x8 block.

    This is the normative definition; :func:`dct_forward` must agree with it
    to 1e-9.
    """
    b = np.asarray(block, dtype=np.float64)
    out = np.zeros((8, 8), dtype=np.float64)
    for u in range(8):
        for v in range(8):
            total = 0.0
            for i in range(8):
                for j in range(8):
                    total += (b[i, j]
                              * math.cos(math.pi * u * (2 * i + 1) / 16)
                              * math.cos(math.pi * v * (2 * j + 1) / 16))
            out[u, v] = 0.25 * _sigma(u) * _sigma(v) * total
    return out


def dct_inverse_reference(coeffs) -> np.ndarray:
    """Literal double sum of the inverse block DCT for a single 8x8 block."""
    c = np.asarray(coeffs, dtype=np.float64)
    out = np.zeros((8, 8), dtype=np.float64)
    for i in range(8):
        for j in range(8):
            total = 0.0
            for u in range(8):
                for v in range(8):
                    total += (_sigma(u) * _sigma(v) * c[u, v]
                              * math.cos(math.pi * u * (2 * i + 1) / 16)
                              * math.cos(math.pi * v * (2 * j + 1) / 16))
            out[i, j] = 0.25 * total
    return out


def build_quant_table(quality: float) -> QuantTable:
    """Scale the base table by chi(mu) = (100 - mu) / 50, clamping entries at 1."""
    quality = float(quality)
    if not 50.0 < quality < 100.0:
        raise ParamsError(f"Quality factor {quality:g} must lie in the open interval (50, 100)")
    chi = (100.0 - quality) / 50.0
    return QuantTable(quality=quality, entries=np.maximum(1.0, chi * BASE_QUANT_TABLE))


def quantize(coeffs, table: QuantTable) -> np.ndarray:
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / table.entries).astype(np.int32)


def dequantize(q_block, table: QuantTable) -> np.ndarray:
    """Multiply back by the table and round, as the unquantization step prescribes."""
    return round_half_away(np.asarray(q_block, dtype=np.float64) * table.entries)


def zigzag(q_block) -> np.ndarray:
    """Flatten (..., 8, 8) blocks into (..., 64) vectors in zigzag order."""
    q_block = np.asarray(q_block)
    flat = q_block.reshape(q_block.shape[:-2] + (64,))
    return flat[..., ZIGZAG_FLAT]


def inverse_zigzag(vector) -> np.ndarray:
    """Rebuild (..., 8, 8) blocks from zigzag-ordered (..., 64) vectors."""
    vector = np.asarray(vector)
    flat = np.empty_like(vector)
    flat[..., ZIGZAG_FLAT] = vector
    return flat.reshape(vector.shape[:-1] + (8, 8))
