"""Data models for the fracstego toolkit."""

import math
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import numpy as np

from .errors import FormatError, ParamsError


@dataclass(eq=False)
class Image:
    """An 8-bit cover or stego image stored as channel planes.

    ``samples`` has shape (channels, height, width); channels are R, G, B for
    colour images and a single plane for grayscale.
    """
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim == 2:
            samples = samples[np.newaxis, :, :]
        if samples.ndim != 3:
            raise FormatError(f"Image samples must be 2D or 3D, got {samples.ndim}D")

        channels, height, width = samples.shape
        if channels not in (1, 3):
            raise FormatError(f"Unsupported channel count {channels}. Must be 1 or 3")
        if width == 0 or height == 0 or width % 8 or height % 8:
            raise FormatError(
                f"Image dimensions must be multiples of 8 (got {width}x{height})"
            )
        if samples.dtype != np.uint8:
            if samples.size and (samples.min() < 0 or samples.max() > 255):
                raise FormatError("Image samples must lie in [0, 255]")
            samples = samples.astype(np.uint8)
        self.samples = samples

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def width(self) -> int:
        return self.samples.shape[2]

    @property
    def num_blocks(self) -> int:
        """Number of 8x8 blocks over all channels."""
        return (self.width // 8) * (self.height // 8) * self.channels

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)


@dataclass(eq=False)
class BlockGrid:
    """Non-overlapping 8x8 tiles of an image, channel-major then row-major."""
    blocks: np.ndarray  # (N, 8, 8) integer tiles
    width: int
    height: int
    channels: int

    def __post_init__(self):
        self.blocks = np.asarray(self.blocks)
        expected = (self.width // 8) * (self.height // 8) * self.channels
        if self.blocks.shape != (expected, 8, 8):
            raise FormatError(
                f"Block grid shape {self.blocks.shape} does not match "
                f"{self.width}x{self.height}x{self.channels} ({expected} blocks)"
            )

    def __len__(self) -> int:
        return self.blocks.shape[0]

    @property
    def blocks_per_row(self) -> int:
        return self.width // 8

    @property
    def blocks_per_channel(self) -> int:
        return (self.width // 8) * (self.height // 8)

    def block_position(self, k: int) -> Tuple[int, int, int]:
        """Map block number to (channel, block-row, block-col)."""
        channel, rest = divmod(k, self.blocks_per_channel)
        block_row, block_col = divmod(rest, self.blocks_per_row)
        return channel, block_row, block_col

    @property
    def block_index(self) -> np.ndarray:
        """(N, 3) array of (channel, block-row, block-col) for every block."""
        k = np.arange(len(self))
        channel, rest = np.divmod(k, self.blocks_per_channel)
        block_row, block_col = np.divmod(rest, self.blocks_per_row)
        return np.stack([channel, block_row, block_col], axis=1)


@dataclass(eq=False)
class QuantTable:
    """Quality-scaled quantization table Q^mu."""
    quality: float
    entries: np.ndarray  # (8, 8) float64, every entry >= 1

    @property
    def chi(self) -> float:
        return (100.0 - self.quality) / 50.0


@dataclass(frozen=True, repr=False)
class FractionalMapParams:
    """Secret parameters of the fractional chaotic map.

    The logistic-form nonlinearity g(j, x) = gain * x * (1 - x) - x is applied
    to the fractional part of every iterate.
    """
    x0: float
    nu: float
    gain: float = 3.9

    DEFAULT_GAIN: ClassVar[float] = 3.9

    def __post_init__(self):
        for name in ("x0", "nu", "gain"):
            if not math.isfinite(getattr(self, name)):
                raise ParamsError(f"{name} must be a finite number")
        if not 0.0 < self.x0 < 1.0:
            raise ParamsError("x0 must lie in the open interval (0, 1)")
        if not 0.0 < self.nu <= 1.0:
            raise ParamsError("nu must lie in (0, 1]")
        if not 0.0 < self.gain <= 4.0:
            raise ParamsError("gain must lie in (0, 4]")

    def __repr__(self) -> str:
        return "FractionalMapParams(<redacted>)"

    @classmethod
    def from_strings(cls, x0: str, nu: str, gain: Optional[str] = None) -> 'FractionalMapParams':
        """Parse decimal strings without echoing them in errors."""
        values = {}
        for name, text in (("x0", x0), ("nu", nu), ("gain", gain)):
            if text is None:
                continue
            try:
                values[name] = float(str(text).strip())
            except ValueError:
                raise ParamsError(f"{name} is not a valid decimal number") from None
        if "x0" not in values or "nu" not in values:
            raise ParamsError("x0 and nu are required")
        return cls(**values)


@dataclass(frozen=True, repr=False)
class KeyMaterial:
    """128-bit secret key and its 1024-bit digest."""
    key: bytes
    digest: bytes

    KEY_BYTES: ClassVar[int] = 16
    DIGEST_BITS: ClassVar[int] = 1024

    def __repr__(self) -> str:
        return "KeyMaterial(<redacted>)"

    @classmethod
    def from_bytes(cls, key: bytes) -> 'KeyMaterial':
        from .keyschedule import derive_digest
        return cls(key=bytes(key), digest=derive_digest(key))

    @classmethod
    def from_hex(cls, text: str) -> 'KeyMaterial':
        """Build key material from exactly 32 hexadecimal characters."""
        text = (text or "").strip()
        if len(text) != 32:
            raise ParamsError(
                f"Key must be exactly 32 hexadecimal characters (got {len(text)})"
            )
        try:
            key = bytes.fromhex(text)
        except ValueError:
            raise ParamsError("Key contains non-hexadecimal characters") from None
        return cls.from_bytes(key)

    @property
    def digest_bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.digest, dtype=np.uint8))


@dataclass(eq=False)
class MessageBits:
    """Secret payload as a 0/1 bit vector."""
    payload: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))

    HEADER_BITS: ClassVar[int] = 32

    def __post_init__(self):
        payload = np.asarray(self.payload, dtype=np.int64).ravel()
        if payload.size and (payload.min() < 0 or payload.max() > 1):
            raise ParamsError("Message bits must be 0 or 1")
        self.payload = payload.astype(np.uint8)

    def __len__(self) -> int:
        return int(self.payload.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MessageBits):
            return NotImplemented
        return np.array_equal(self.payload, other.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> 'MessageBits':
        """Read bytes most-significant bit first."""
        return cls(np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)))

    def to_bytes(self) -> bytes:
        """Pack bits MSB-first; a trailing partial byte is zero-padded."""
        return np.packbits(self.payload).tobytes()

    def framed(self) -> np.ndarray:
        """32-bit big-endian payload length (in bits) followed by the payload."""
        if len(self) >= 2 ** self.HEADER_BITS:
            raise ParamsError("Message too long for a 32-bit length header")
        header = np.unpackbits(
            np.frombuffer(len(self).to_bytes(4, "big"), dtype=np.uint8)
        )
        return np.concatenate([header, self.payload])

    def bit_error_rate(self, other: 'MessageBits') -> float:
        """Fraction of differing bits; missing bits count as errors."""
        n = max(len(self), len(other))
        if n == 0:
            return 0.0
        common = min(len(self), len(other))
        errors = int(np.count_nonzero(self.payload[:common] != other.payload[:common]))
        return (errors + (n - common)) / n


@dataclass
class EmbedConfig:
    """Shared secrets and pipeline settings for embedding and extraction."""
    key: KeyMaterial
    map_params: FractionalMapParams
    quality: float = 75.0
    mode: str = "pixel"

    MODES: ClassVar[Tuple[str, ...]] = ("pixel", "coefficient")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ParamsError(f"Invalid mode '{self.mode}'. Must be one of {list(self.MODES)}")
        if not 50.0 < float(self.quality) < 100.0:
            raise ParamsError(f"Quality factor {self.quality} must lie in the open interval (50, 100)")
        self.quality = float(self.quality)

    def to_dict(self) -> Dict[str, Any]:
        """Non-secret settings only."""
        return {"quality": self.quality, "mode": self.mode}


@dataclass(eq=False)
class CoefficientRecord:
    """Quantized coefficients of a stego image (coefficient mode output).

    ``coefficients`` holds one zigzag-ordered 64-vector per block in block
    grid order.
    """
    quality: float
    width: int
    height: int
    channels: int
    coefficients: np.ndarray  # (N, 64) int16

    MAGIC: ClassVar[bytes] = b"SCQ1"

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients)
        expected = (self.width // 8) * (self.height // 8) * self.channels
        if self.coefficients.shape != (expected, 64):
            raise FormatError(
                f"Record holds {self.coefficients.shape} coefficients, expected ({expected}, 64)"
            )

    @property
    def quality_text(self) -> str:
        return f"{self.quality:.17g}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoefficientRecord):
            return NotImplemented
        return (
            self.quality == other.quality
            and (self.width, self.height, self.channels) == (other.width, other.height, other.channels)
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def quantized_blocks(self) -> np.ndarray:
        """(N, 8, 8) quantized blocks rebuilt through the inverse zigzag."""
        from .transform import inverse_zigzag
        return inverse_zigzag(self.coefficients)

    def to_image(self) -> Image:
        """Dequantize and inverse-transform the record into pixels."""
        from .codec import reconstruct_image
        from .transform import build_quant_table
        return reconstruct_image(
            self.quantized_blocks(), build_quant_table(self.quality),
            self.width, self.height, self.channels
        )


@dataclass
class MetricsReport:
    """Imperceptibility, quality, similarity and security of a stego image."""
    psnr: float
    mse: float
    xi: int
    uiqi: float
    image_fidelity: float
    relative_entropy: float
    epsilon: float = 0.1

    @property
    def security(self) -> str:
        from .metrics import security_level
        return security_level(self.relative_entropy, self.epsilon)

    def to_dict(self) -> Dict[str, Any]:
        """Portable form; an infinite PSNR is written as the string "inf"."""
        return {
            "psnr_db": "inf" if math.isinf(self.psnr) else self.psnr,
            "mse": self.mse,
            "xi": self.xi,
            "uiqi": self.uiqi,
            "image_fidelity": self.image_fidelity,
            "relative_entropy": self.relative_entropy,
            "security": self.security,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MetricsReport':
        psnr = data["psnr_db"]
        return cls(
            psnr=math.inf if psnr == "inf" else float(psnr),
            mse=float(data["mse"]),
            xi=int(data["xi"]),
            uiqi=float(data["uiqi"]),
            image_fidelity=float(data["image_fidelity"]),
            relative_entropy=float(data["relative_entropy"]),
            epsilon=float(data.get("epsilon", 0.1)),
        )


@dataclass
class BoxplotSummary:
    """Quartiles, inner fences and outliers of a sample."""
    q1: float
    median: float
    q3: float
    iqr: float
    lower_fence: float
    upper_fence: float
    outliers: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "iqr": self.iqr,
            "lower_fence": self.lower_fence,
            "upper_fence": self.upper_fence,
            "outlier_count": len(self.outliers),
        }


@dataclass
class BenchRow:
    """One processed image of a benchmark run."""
    file: str
    width: int
    height: int
    channels: int
    payload_bits: int
    metrics: MetricsReport
    ber: float

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "file": self.file,
            "width": self.width,
            "height": self.height,
            "channels": self.channels,
            "payload_bits": self.payload_bits,
        }
        row.update(self.metrics.to_dict())
        row["ber"] = self.ber
        return row


@dataclass
class BenchRun:
    """A batch run over a dataset directory."""
    dataset: str
    quality: float
    mode: str
    payload_bits: Optional[int]
    seed: int
    rows: List[BenchRow] = field(default_factory=list)
    skipped: List[Tuple[str, str]] = field(default_factory=list)  # (file, reason)
    summaries: Dict[str, BoxplotSummary] = field(default_factory=dict)

    def config_echo(self) -> Dict[str, Any]:
        """Configuration without secrets."""
        return {
            "dataset": self.dataset,
            "quality": self.quality,
            "mode": self.mode,
            "payload_bits": "max" if self.payload_bits is None else self.payload_bits,
            "seed": self.seed,
        }
