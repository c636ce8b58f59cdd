"""BMP image I/O and 8x8 block tiling."""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import FormatError
from .models import BlockGrid, Image

logger = logging.getLogger(__name__)

BLOCK = 8
SUPPORTED_FORMATS = ("BMP",)
PathLike = Union[str, Path]


def load_image(path: PathLike) -> Image:
    """Load a 24-bit colour or 8-bit grayscale BMP.

    Channel planes are returned in R, G, B order. Images with alpha and
    dimensions that are not multiples of 8 are rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"Image file not found: {path}")

    try:
        with PILImage.open(path) as pil:
            pil.load()
            if pil.format not in SUPPORTED_FORMATS:
                raise FormatError(f"Unsupported image format '{pil.format}' in {path.name}. Must be BMP")
            if "A" in pil.getbands():
                raise FormatError(f"Images with alpha are not supported ({path.name})")

            if pil.mode == "L":
                samples = np.asarray(pil, dtype=np.uint8)[np.newaxis, :, :]
            elif pil.mode in ("RGB", "P"):
                samples = np.asarray(pil.convert("RGB"), dtype=np.uint8).transpose(2, 0, 1)
            else:
                raise FormatError(f"Unsupported pixel mode '{pil.mode}' in {path.name}")
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise FormatError(f"Failed to read image {path.name}: {e}")

    image = Image(np.ascontiguousarray(samples))
    logger.debug("Loaded %s: %dx%dx%d", path.name, image.width, image.height, image.channels)
    return image


def save_image(img: Image, path: PathLike) -> None:
    """Write an image as an uncompressed BMP (24-bit or 8-bit grayscale)."""
    path = Path(path)
    if img.channels == 1:
        pil = PILImage.fromarray(np.ascontiguousarray(img.samples[0]))
    else:
        pil = PILImage.fromarray(np.ascontiguousarray(img.samples.transpose(1, 2, 0)))

    try:
        pil.save(path, format="BMP")
    except (OSError, ValueError) as e:
        raise FormatError(f"Failed to save image {path}: {e}")
    logger.debug("Saved %s", path)


def partition_blocks(img: Image) -> BlockGrid:
    """Split every channel into non-overlapping 8x8 tiles.

    Tiles are ordered channel-major (all R blocks, then G, then B) and
    row-major within a channel.
    """
    c, h, w = img.samples.shape
    tiles = (
        img.samples.reshape(c, h // BLOCK, BLOCK, w // BLOCK, BLOCK)
        .transpose(0, 1, 3, 2, 4)
        .reshape(-1, BLOCK, BLOCK)
        .astype(np.int32)
    )
    return BlockGrid(blocks=tiles, width=w, height=h, channels=c)


def assemble_image(grid: Union[BlockGrid, np.ndarray], width: int, height: int, channels: int) -> Image:
    """Reassemble tiles into an image, clamping samples to [0, 255]."""
    if isinstance(grid, BlockGrid):
        if (grid.width, grid.height, grid.channels) != (width, height, channels):
            raise FormatError(
                f"Block grid geometry {grid.width}x{grid.height}x{grid.channels} "
                f"does not match {width}x{height}x{channels}"
            )
        blocks = grid.blocks
    else:
        blocks = np.asarray(grid)

    if width % BLOCK or height % BLOCK:
        raise FormatError(f"Image dimensions must be multiples of 8 (got {width}x{height})")
    expected = (width // BLOCK) * (height // BLOCK) * channels
    if blocks.shape != (expected, BLOCK, BLOCK):
        raise FormatError(f"Got {blocks.shape[0] if blocks.ndim else 0} blocks, geometry needs {expected}")

    planes = (
        np.clip(blocks, 0, 255)
        .astype(np.uint8)
        .reshape(channels, height // BLOCK, width // BLOCK, BLOCK, BLOCK)
        .transpose(0, 1, 3, 2, 4)
        .reshape(channels, height, width)
    )
    return Image(np.ascontiguousarray(planes))
