"""Embedding and extraction pipelines.

Embedding: partition -> DCT -> quantize -> zigzag -> collect the first eight
AC coefficients of every block into one array -> LSB substitution at
chaotic positions, chunk by chunk -> scatter back -> (pixel mode) dequantize
-> IDCT -> round -> clamp -> assemble.

Payloads are framed with a 32-bit big-endian bit-length header.
"""

import logging
from typing import Union

import numpy as np

from .chaos import CHUNK_BITS, chaotic_positions
from .errors import CapacityError, IntegrityError, ParamsError
from .image_blocks import assemble_image, partition_blocks
from .keyschedule import key_chunk
from .models import (
    CoefficientRecord, EmbedConfig, FractionalMapParams, Image, KeyMaterial,
    MessageBits, QuantTable,
)
from .transform import (
    AC_SLICE, build_quant_table, dct_forward, dct_inverse, dequantize,
    inverse_zigzag, quantize, round_half_away, zigzag,
)

logger = logging.getLogger(__name__)

AC_PER_BLOCK = 8
HEADER_BITS = MessageBits.HEADER_BITS

StegoArtifact = Union[Image, CoefficientRecord]


def lsb_replace(x, bit):
    """R(x, bit): set the least significant bit of a non-negative integer."""
    return (x & ~1) | bit


def lsb_extract(x):
    """R^-1(x): least significant bit of a non-negative integer."""
    return x & 1


def quantize_image(img: Image, table: QuantTable) -> np.ndarray:
    """Quantized DCT blocks of every 8x8 tile, shape (N, 8, 8)."""
    grid = partition_blocks(img)
    return quantize(dct_forward(grid.blocks), table)


def reconstruct_image(q_blocks: np.ndarray, table: QuantTable,
                      width: int, height: int, channels: int) -> Image:
    """Dequantize, inverse-transform, round and clamp blocks into an image."""
    pixels = round_half_away(dct_inverse(dequantize(q_blocks, table))).astype(np.int32)
    return assemble_image(pixels, width, height, channels)


def collect_ac(q_blocks: np.ndarray) -> np.ndarray:
    """Zigzag elements 2..9 (1-based) of every block, in block order."""
    return zigzag(q_blocks)[:, AC_SLICE].reshape(-1).astype(np.int32)


def scatter_ac(q_blocks: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Write a collected AC array back into copies of the quantized blocks."""
    vectors = zigzag(q_blocks).copy()
    vectors[:, AC_SLICE] = np.asarray(omega).reshape(-1, AC_PER_BLOCK)
    return inverse_zigzag(vectors)


def coefficient_slots(n_coefficients: int) -> int:
    """Coefficients that belong to complete 64-coefficient chunks."""
    return (n_coefficients // CHUNK_BITS) * CHUNK_BITS


def capacity_bits(n_blocks: int) -> int:
    """Largest payload, in bits, that fits after the length header."""
    return max(0, coefficient_slots(AC_PER_BLOCK * n_blocks) - HEADER_BITS)


def capacity(cover: Image) -> int:
    return capacity_bits(cover.num_blocks)


def embedding_schedule(key: KeyMaterial, params: FractionalMapParams, n_coefficients: int) -> np.ndarray:
    """Global coefficient order visited by embedding and extraction.

    Chunk i covers coefficients [64 i, 64 i + 64) and is visited in the order
    given by its chaotic positions. A trailing partial chunk is never used.
    """
    n_chunks = n_coefficients // CHUNK_BITS
    digest = key.digest_bits
    schedule = np.empty(n_chunks * CHUNK_BITS, dtype=np.intp)
    for i in range(n_chunks):
        start = i * CHUNK_BITS
        positions = chaotic_positions(key_chunk(digest, i), params)
        schedule[start:start + CHUNK_BITS] = np.asarray(positions, dtype=np.intp) + start
    return schedule


def _substitute(values: np.ndarray, positions: np.ndarray, bits: np.ndarray) -> None:
    # sign is kept, the bit goes into the magnitude
    selected = values[positions]
    magnitude = lsb_replace(np.abs(selected), bits.astype(selected.dtype))
    values[positions] = np.where(selected < 0, -magnitude, magnitude)


def embed_chunk(chunk, key_bits, bits, params: FractionalMapParams) -> np.ndarray:
    """Embed up to 64 bits into one chunk at its chaotic positions."""
    out = np.array(chunk, dtype=np.int32).ravel()
    if out.size != CHUNK_BITS:
        raise ParamsError(f"Chunk must hold {CHUNK_BITS} coefficients (got {out.size})")
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size > CHUNK_BITS:
        raise ParamsError(f"At most {CHUNK_BITS} bits fit into one chunk (got {bits.size})")
    positions = np.asarray(chaotic_positions(key_bits, params)[:bits.size], dtype=np.intp)
    _substitute(out, positions, bits)
    return out


def embed_coefficients(omega: np.ndarray, bits: np.ndarray, key: KeyMaterial,
                       params: FractionalMapParams) -> np.ndarray:
    """Embed a bit vector into a collected AC array, chunk 1 first."""
    schedule = embedding_schedule(key, params, omega.size)
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size > schedule.size:
        raise CapacityError(max(0, schedule.size - HEADER_BITS), bits.size - HEADER_BITS)
    out = np.array(omega, dtype=np.int32)
    _substitute(out, schedule[:bits.size], bits)
    return out


def extract_coefficients(omega: np.ndarray, key: KeyMaterial, params: FractionalMapParams) -> MessageBits:
    """Read the framed payload back from a collected AC array."""
    schedule = embedding_schedule(key, params, omega.size)
    if schedule.size < HEADER_BITS:
        raise IntegrityError("Stego holds no complete coefficient chunk")

    omega = np.asarray(omega)
    header = lsb_extract(np.abs(omega[schedule[:HEADER_BITS]])).astype(np.uint8)
    length = int.from_bytes(np.packbits(header).tobytes(), "big")
    available = schedule.size - HEADER_BITS
    if length > available:
        raise IntegrityError(
            f"Header announces {length} payload bits but only {available} fit; "
            "wrong key or parameters, or corrupted stego"
        )

    payload = lsb_extract(np.abs(omega[schedule[HEADER_BITS:HEADER_BITS + length]]))
    return MessageBits(payload.astype(np.uint8))


def embed(cover: Image, message: MessageBits, cfg: EmbedConfig) -> StegoArtifact:
    """Hide ``message`` in ``cover``.

    Returns the stego image in pixel mode and the quantized coefficient
    record in coefficient mode.
    """
    table = build_quant_table(cfg.quality)
    available = capacity(cover)
    if coefficient_slots(AC_PER_BLOCK * cover.num_blocks) < HEADER_BITS:
        raise CapacityError(
            0, len(message), f"Cover has {cover.num_blocks} blocks; at least 8 are needed for the length header"
        )
    if len(message) > available:
        raise CapacityError(available, len(message))

    q_blocks = quantize_image(cover, table)
    omega = collect_ac(q_blocks)
    omega_bar = embed_coefficients(omega, message.framed(), cfg.key, cfg.map_params)
    stego_blocks = scatter_ac(q_blocks, omega_bar)
    logger.info(
        "Embedded %d payload bits into %d blocks (capacity %d bits, %s mode)",
        len(message), cover.num_blocks, available, cfg.mode,
    )

    if cfg.mode == "coefficient":
        return CoefficientRecord(
            quality=cfg.quality,
            width=cover.width,
            height=cover.height,
            channels=cover.channels,
            coefficients=zigzag(stego_blocks).astype(np.int16),
        )
    return reconstruct_image(stego_blocks, table, cover.width, cover.height, cover.channels)


def stego_coefficients(stego: StegoArtifact, cfg: EmbedConfig) -> np.ndarray:
    """The collected AC array of a stego artifact, as extraction sees it."""
    if cfg.mode == "coefficient":
        if not isinstance(stego, CoefficientRecord):
            raise ParamsError("Coefficient mode expects a coefficient record, not an image")
        if stego.quality != cfg.quality:
            raise IntegrityError(
                f"Record was written with quality {stego.quality_text}, not {cfg.quality:g}"
            )
        omega = stego.coefficients[:, AC_SLICE].reshape(-1).astype(np.int32)
    else:
        if not isinstance(stego, Image):
            raise ParamsError("Pixel mode expects a stego image, not a coefficient record")
        omega = collect_ac(quantize_image(stego, build_quant_table(cfg.quality)))
    return omega


def read_framed_bits(stego: StegoArtifact, cfg: EmbedConfig, count: int) -> np.ndarray:
    """The first ``count`` scheduled LSBs, header included, without parsing."""
    omega = stego_coefficients(stego, cfg)
    schedule = embedding_schedule(cfg.key, cfg.map_params, omega.size)
    return lsb_extract(np.abs(omega[schedule[:count]])).astype(np.uint8)


def extract(stego: StegoArtifact, cfg: EmbedConfig) -> MessageBits:
    """Recover the payload hidden by :func:`embed` with the same configuration."""
    omega = stego_coefficients(stego, cfg)
    message = extract_coefficients(omega, cfg.key, cfg.map_params)
    logger.info("Extracted %d payload bits (%s mode)", len(message), cfg.mode)
    return message
