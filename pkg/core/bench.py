"""Batch benchmark: embed a seeded payload into every image of a directory and measure it."""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from .codec import capacity, embed, read_framed_bits
from .errors import CapacityError, FormatError, ParamsError, StegoError
from .image_blocks import load_image
from .metrics import boxplot_summary, evaluate
from .models import BenchRow, BenchRun, BoxplotSummary, EmbedConfig, Image, MessageBits

logger = logging.getLogger(__name__)

SUMMARY_METRICS = ("psnr_db", "mse", "uiqi", "image_fidelity", "relative_entropy", "ber")


class BenchRunner:
    """Runs the embed/measure/extract loop over a dataset directory.

    Images may be processed in parallel; rows are always reported in sorted
    file-name order.
    """

    def __init__(self, cfg: EmbedConfig, payload_bits: Optional[int] = None, seed: int = 0,
                 workers: int = 1, epsilon: float = 0.1,
                 progress: Optional[Callable[[str], None]] = None):
        if payload_bits is not None and payload_bits < 0:
            raise ParamsError(f"Payload size must be >= 0 bits (got {payload_bits})")
        self.cfg = cfg
        self.payload_bits = payload_bits
        self.seed = seed
        self.workers = max(1, int(workers))
        self.epsilon = epsilon
        self.progress = progress
        self._cancelled = False
        self._lock = threading.Lock()

    def cancel(self):
        """Request cancellation; images not yet started are skipped."""
        with self._lock:
            self._cancelled = True

    def is_cancelled(self) -> bool:
        with self._lock:
            return self._cancelled

    def _report(self, message: str):
        logger.debug(message)
        if self.progress:
            self.progress(message)

    def payload_for(self, cover: Image) -> MessageBits:
        """Seeded pseudorandom payload; maximum size unless a size was requested."""
        available = capacity(cover)
        n_bits = available if self.payload_bits is None else self.payload_bits
        if n_bits > available:
            raise CapacityError(available, n_bits)
        rng = np.random.default_rng(self.seed)
        return MessageBits(rng.integers(0, 2, size=n_bits, dtype=np.uint8))

    def process_image(self, path: Path) -> BenchRow:
        cover = load_image(path)
        message = self.payload_for(cover)
        stego = embed(cover, message, self.cfg)
        stego_image = stego if isinstance(stego, Image) else stego.to_image()

        framed = message.framed()
        recovered = read_framed_bits(stego, self.cfg, framed.size)
        ber = MessageBits(framed[MessageBits.HEADER_BITS:]).bit_error_rate(
            MessageBits(recovered[MessageBits.HEADER_BITS:])
        )

        report = evaluate(cover, stego_image, self.epsilon, allow_undefined=True)
        if math.isnan(report.image_fidelity):
            logger.warning("Image fidelity is undefined for %s (all-zero cover)", path.name)
        self._report(f"Processed {path.name}: PSNR {report.psnr:.3f} dB, BER {ber:.6f}")
        return BenchRow(
            file=path.name,
            width=cover.width,
            height=cover.height,
            channels=cover.channels,
            payload_bits=len(message),
            metrics=report,
            ber=ber,
        )

    def _guarded(self, path: Path) -> Union[BenchRow, StegoError]:
        if self.is_cancelled():
            return FormatError("cancelled")
        try:
            return self.process_image(path)
        except StegoError as e:
            return e

    def run(self, dataset_dir: Union[str, Path]) -> BenchRun:
        dataset = Path(dataset_dir)
        if not dataset.is_dir():
            raise FormatError(f"Dataset directory not found: {dataset}")

        files = sorted(p for p in dataset.iterdir() if p.is_file())
        run = BenchRun(
            dataset=str(dataset_dir),
            quality=self.cfg.quality,
            mode=self.cfg.mode,
            payload_bits=self.payload_bits,
            seed=self.seed,
        )
        self._report(f"Benchmarking {len(files)} files with {self.workers} worker(s)")

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                outcomes = list(pool.map(self._guarded, files))
        else:
            outcomes = [self._guarded(path) for path in files]

        for path, outcome in zip(files, outcomes):
            if isinstance(outcome, BenchRow):
                run.rows.append(outcome)
            else:
                logger.warning("Skipping %s: %s", path.name, outcome)
                run.skipped.append((path.name, str(outcome)))

        if not run.rows:
            raise FormatError(f"No images could be processed in {dataset}")

        run.summaries = self.summarize(run.rows)
        return run

    @staticmethod
    def summarize(rows: List[BenchRow]) -> Dict[str, BoxplotSummary]:
        """Box-plot summary per metric over finite values."""
        summaries = {}
        for metric in SUMMARY_METRICS:
            values = []
            for row in rows:
                value = row.to_dict()[metric]
                if value == "inf":
                    continue
                if math.isfinite(float(value)):
                    values.append(float(value))
            if values:
                summaries[metric] = boxplot_summary(values)
        return summaries
