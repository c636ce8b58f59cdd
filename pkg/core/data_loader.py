"""Loading and saving of configuration, messages, coefficient records and bench tables."""

import io
import struct
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd
import yaml

from .errors import FormatError, ParamsError
from .models import BenchRun, CoefficientRecord, MessageBits

PathLike = Union[str, Path]

BENCH_CSV_VERSION = "fracstego-bench v1"
_RECORD_GEOMETRY = struct.Struct("<IIB")


class DataLoader:
    """Handles file formats used by the command-line tools."""

    CONFIG_DEFAULTS: Dict[str, Any] = {
        "mu": 75.0,
        "mode": "pixel",
        "gain": 3.9,
        "payload_bits": None,
        "seed": 0,
        "workers": 1,
        "epsilon": 0.1,
    }
    SECRET_KEYS = ("key", "x0", "nu")

    @staticmethod
    def load_config_yaml(file_path: PathLike) -> Dict[str, Any]:
        """Load non-secret settings, filling in defaults."""
        try:
            with open(file_path, 'r') as f:
                data = yaml.safe_load(f)
        except Exception as e:
            raise FormatError(f"Failed to read YAML file: {e}")

        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ParamsError("YAML config must contain a mapping")

        secrets = [key for key in data if key in DataLoader.SECRET_KEYS]
        if secrets:
            raise ParamsError(
                f"Secret parameters {secrets} must not be stored in the config file; "
                "pass them as flags or environment variables"
            )
        unknown = [key for key in data if key not in DataLoader.CONFIG_DEFAULTS]
        if unknown:
            raise ParamsError(f"Unknown config keys: {unknown}")

        config = dict(DataLoader.CONFIG_DEFAULTS)
        config.update(data)
        try:
            config["mu"] = float(config["mu"])
            config["gain"] = float(config["gain"])
            config["seed"] = int(config["seed"])
            config["workers"] = int(config["workers"])
            config["epsilon"] = float(config["epsilon"])
            if config["payload_bits"] is not None:
                config["payload_bits"] = int(config["payload_bits"])
        except (ValueError, TypeError) as e:
            raise ParamsError(f"Invalid config value: {e}")
        return config

    @staticmethod
    def save_config_yaml(config: Dict[str, Any], file_path: PathLike) -> None:
        """Save non-secret settings to a YAML file."""
        data = {key: config[key] for key in DataLoader.CONFIG_DEFAULTS if key in config}
        try:
            with open(file_path, 'w') as f:
                yaml.dump(data, f, default_flow_style=False, sort_keys=False)
        except Exception as e:
            raise FormatError(f"Failed to save YAML file: {e}")

    @staticmethod
    def validate_config(config: Dict[str, Any]) -> List[str]:
        """Return warnings for settings that are legal but questionable."""
        warnings = []
        if config.get("mu", 75.0) >= 95.0:
            warnings.append("Quality factor >= 95 clamps most table entries to 1")
        if config.get("payload_bits") is not None and config["payload_bits"] <= 0:
            warnings.append("payload_bits <= 0 embeds only the length header")
        if config.get("workers", 1) < 1:
            warnings.append("workers < 1 treated as 1")
        return warnings

    @staticmethod
    def load_message(file_path: PathLike) -> MessageBits:
        try:
            data = Path(file_path).read_bytes()
        except OSError as e:
            raise FormatError(f"Failed to read message file: {e}")
        return MessageBits.from_bytes(data)

    @staticmethod
    def save_message(message: MessageBits, file_path: PathLike) -> None:
        try:
            Path(file_path).write_bytes(message.to_bytes())
        except OSError as e:
            raise FormatError(f"Failed to write message file: {e}")

    @staticmethod
    def is_coefficient_record(file_path: PathLike) -> bool:
        try:
            with open(file_path, 'rb') as f:
                return f.read(len(CoefficientRecord.MAGIC)) == CoefficientRecord.MAGIC
        except OSError:
            return False

    @staticmethod
    def save_coefficient_record(record: CoefficientRecord, file_path: PathLike) -> None:
        """Write magic, quality text, geometry and int16 LE coefficients."""
        quality_text = record.quality_text.encode("ascii")
        payload = b"".join([
            CoefficientRecord.MAGIC,
            bytes([len(quality_text)]),
            quality_text,
            _RECORD_GEOMETRY.pack(record.width, record.height, record.channels),
            record.coefficients.astype("<i2").tobytes(),
        ])
        try:
            Path(file_path).write_bytes(payload)
        except OSError as e:
            raise FormatError(f"Failed to write coefficient record: {e}")

    @staticmethod
    def load_coefficient_record(file_path: PathLike) -> CoefficientRecord:
        try:
            data = Path(file_path).read_bytes()
        except OSError as e:
            raise FormatError(f"Failed to read coefficient record: {e}")

        magic = CoefficientRecord.MAGIC
        if not data.startswith(magic):
            raise FormatError(f"{Path(file_path).name} is not a coefficient record")
        try:
            offset = len(magic)
            text_len = data[offset]
            offset += 1
            quality = float(data[offset:offset + text_len].decode("ascii"))
            offset += text_len
            width, height, channels = _RECORD_GEOMETRY.unpack_from(data, offset)
            offset += _RECORD_GEOMETRY.size
        except (IndexError, ValueError, UnicodeDecodeError, struct.error) as e:
            raise FormatError(f"Corrupt coefficient record header: {e}")

        n_blocks = (width // 8) * (height // 8) * channels
        body = data[offset:]
        if len(body) != n_blocks * 64 * 2:
            raise FormatError(
                f"Coefficient record body holds {len(body)} bytes, expected {n_blocks * 128}"
            )
        coefficients = np.frombuffer(body, dtype="<i2").reshape(n_blocks, 64).astype(np.int16)
        return CoefficientRecord(
            quality=quality, width=width, height=height, channels=channels,
            coefficients=coefficients,
        )

    @staticmethod
    def bench_frames(run: BenchRun):
        """(per-image rows, per-metric box-plot summary) as DataFrames."""
        rows = pd.DataFrame([row.to_dict() for row in run.rows])
        summary = pd.DataFrame([
            {"metric": metric, **summary.to_dict()}
            for metric, summary in run.summaries.items()
        ])
        return rows, summary

    @staticmethod
    def write_bench_csv(run: BenchRun, file_path: PathLike) -> None:
        """Versioned CSV: image rows, then a box-plot block per metric."""
        rows, summary = DataLoader.bench_frames(run)
        echo = " ".join(f"{key}={value}" for key, value in run.config_echo().items())

        buffer = io.StringIO()
        buffer.write(f"# {BENCH_CSV_VERSION}\n")
        buffer.write(f"# {echo}\n")
        rows.to_csv(buffer, index=False, lineterminator="\n", na_rep="nan")
        buffer.write("# boxplot\n")
        summary.to_csv(buffer, index=False, lineterminator="\n")
        try:
            Path(file_path).write_text(buffer.getvalue())
        except OSError as e:
            raise FormatError(f"Failed to write bench CSV: {e}")
