"""Image quality and security metrics, and box-plot statistics.

All image metrics pool every sample of every channel. Integer sums are kept
exact (int64) wherever the formula allows.
"""

import math
from typing import Sequence, Tuple

import numpy as np

from .errors import FormatError, ParamsError
from .models import BoxplotSummary, Image, MetricsReport

HISTOGRAM_BINS = 256
PROBABILITY_FLOOR = 1e-10
FENCE_FACTOR = 1.5


def _pair(cover: Image, stego: Image) -> Tuple[np.ndarray, np.ndarray]:
    if cover.samples.shape != stego.samples.shape:
        raise FormatError(
            f"Image geometry mismatch: {cover.width}x{cover.height}x{cover.channels} "
            f"vs {stego.width}x{stego.height}x{stego.channels}"
        )
    return cover.samples.astype(np.int64).ravel(), stego.samples.astype(np.int64).ravel()


def psnr(cover: Image, stego: Image) -> Tuple[float, float, int]:
    """(PSNR in dB, MSE, peak value Xi).

    Xi is the largest sample of either image rather than a fixed 255; PSNR is
    +inf when the images are identical.
    """
    c, s = _pair(cover, stego)
    mse = float(np.sum((c - s) ** 2)) / c.size
    xi = int(max(c.max(), s.max()))
    if mse == 0.0:
        return math.inf, 0.0, xi
    return 10.0 * math.log10(xi * xi / mse), mse, xi


def uiqi(cover: Image, stego: Image) -> float:
    """Global universal image quality index, in [-1, 1]."""
    c, s = _pair(cover, stego)
    if c.size < 2:
        raise ParamsError("UIQI needs at least 2 samples")
    c = c.astype(np.float64)
    s = s.astype(np.float64)

    n = c.size
    mean_c = c.sum() / n
    mean_s = s.sum() / n
    dc = c - mean_c
    ds = s - mean_s
    var_c = float(np.dot(dc, dc)) / (n - 1)
    var_s = float(np.dot(ds, ds)) / (n - 1)
    cov = float(np.dot(dc, ds)) / (n - 1)

    if var_c == 0.0 and var_s == 0.0 and mean_c == mean_s:
        return 1.0
    var_sum = var_c + var_s
    mean_sq_sum = mean_c * mean_c + mean_s * mean_s
    if var_sum == 0.0 or mean_sq_sum == 0.0:
        return 0.0
    value = (4.0 * cov / var_sum) * (mean_c * mean_s / mean_sq_sum)
    return float(min(1.0, max(-1.0, value)))


def image_fidelity(cover: Image, stego: Image) -> float:
    """1 - sum((C - S)^2) / sum(C^2)."""
    c, s = _pair(cover, stego)
    energy = int(np.sum(c * c))
    if energy == 0:
        raise ParamsError("Image fidelity is undefined for an all-zero cover")
    return 1.0 - int(np.sum((c - s) ** 2)) / energy


def histogram(img: Image) -> np.ndarray:
    """Normalized 256-bin histogram over all channels."""
    counts = np.bincount(img.samples.ravel(), minlength=HISTOGRAM_BINS)
    return counts / counts.sum()


def relative_entropy(cover: Image, stego: Image) -> float:
    """sum P_C |ln(P_C / P_S)| in nats over bins where P_C > 0.

    Empty stego bins are floored at 1e-10.
    """
    _pair(cover, stego)
    p_c = histogram(cover)
    p_s = np.maximum(histogram(stego), PROBABILITY_FLOOR)
    mask = p_c > 0
    return float(np.sum(p_c[mask] * np.abs(np.log(p_c[mask] / p_s[mask]))))


def security_level(re: float, epsilon: float = 0.1) -> str:
    """Cachin classification of a stego-system by its relative entropy."""
    if re == 0.0:
        return "perfectly secure"
    if re <= epsilon:
        return "epsilon-secure"
    return "insecure"


def evaluate(cover: Image, stego: Image, epsilon: float = 0.1,
             allow_undefined: bool = False) -> MetricsReport:
    """Every image metric for one cover/stego pair.

    With ``allow_undefined`` an all-zero cover reports its image fidelity as
    NaN instead of raising.
    """
    psnr_db, mse, xi = psnr(cover, stego)
    try:
        fidelity = image_fidelity(cover, stego)
    except ParamsError:
        if not allow_undefined:
            raise
        fidelity = math.nan
    return MetricsReport(
        psnr=psnr_db,
        mse=mse,
        xi=xi,
        uiqi=uiqi(cover, stego),
        image_fidelity=fidelity,
        relative_entropy=relative_entropy(cover, stego),
        epsilon=epsilon,
    )


def _quantile(ordered: np.ndarray, p: float) -> float:
    # linear interpolation between order statistics at position p * (n - 1)
    position = p * (ordered.size - 1)
    lower = int(math.floor(position))
    upper = min(lower + 1, ordered.size - 1)
    weight = position - lower
    a = float(ordered[lower])
    b = float(ordered[upper])
    return a + (b - a) * weight


def boxplot_summary(values: Sequence[float]) -> BoxplotSummary:
    """Quartiles, 1.5 IQR inner fences and the values outside them."""
    data = np.asarray(values, dtype=np.float64).ravel()
    if data.size == 0:
        raise ParamsError("Box-plot summary needs at least one value")
    ordered = np.sort(data)

    q1 = _quantile(ordered, 0.25)
    median = _quantile(ordered, 0.5)
    q3 = _quantile(ordered, 0.75)
    iqr = q3 - q1
    lower_fence = q1 - FENCE_FACTOR * iqr
    upper_fence = q3 + FENCE_FACTOR * iqr
    outliers = [float(v) for v in ordered if v < lower_fence or v > upper_fence]
    return BoxplotSummary(
        q1=q1, median=median, q3=q3, iqr=iqr,
        lower_fence=lower_fence, upper_fence=upper_fence, outliers=outliers,
    )
