"""Fractional chaotic map, chaotic permutations and position schedules.

The map iterates

    x(n+1) = x(0) + 1/Gamma(nu) * sum_{j=0..n} Gamma(n-j+nu)/Gamma(n-j+1) * g(j, x(j))

with the logistic-form nonlinearity g(j, x) = gain * x * (1 - x) - x applied
to the fractional part of x(j). Arithmetic order is fixed (left-to-right
accumulation over j) so sequences are reproducible bit for bit.

Indices are 0-based throughout.
"""

import logging
import math
import threading
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ChaosError, ParamsError
from .models import FractionalMapParams

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]
PositionList = Tuple[int, ...]

CHUNK_BITS = 64
SCALE = 1e14
# candidates drawn before a permutation of order n is declared degenerate
MAX_DRAWS_PER_INDEX = 64


def frac(x: float) -> float:
    """Fractional part of |x|, in [0, 1)."""
    a = abs(x)
    return a - math.floor(a)


def nonlinearity(j: int, x: float, gain: float) -> float:
    """g(j, x) of the fractional map; ``j`` is unused by the logistic form."""
    return gain * x * (1.0 - x) - x


def kernel_weight(m: int, nu: float) -> float:
    """Gamma(m + nu) / Gamma(m + 1) evaluated through log-gamma."""
    return math.exp(math.lgamma(m + nu) - math.lgamma(m + 1))


class FractionalMapStream:
    """Lazily extended iterates x(1), x(2), ... of one parameter set.

    Values are stored already reduced to their fractional part.
    """

    def __init__(self, params: FractionalMapParams):
        self.params = params
        self._gamma_nu = math.gamma(params.nu)
        self._weights: List[float] = []
        self._g: List[float] = [nonlinearity(0, frac(params.x0), params.gain)]
        self._values: List[float] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def _extend(self, count: int) -> None:
        nu, x0, gain = self.params.nu, self.params.x0, self.params.gain
        while len(self._values) < count:
            n = len(self._values)
            while len(self._weights) <= n:
                self._weights.append(kernel_weight(len(self._weights), nu))

            s = 0.0
            for j in range(n + 1):
                s += self._weights[n - j] * self._g[j]
            x = x0 + s / self._gamma_nu

            if not math.isfinite(x):
                raise ChaosError(f"Fractional map produced a non-finite value at index {n + 1}")
            value = frac(x)
            self._values.append(value)
            self._g.append(nonlinearity(n + 1, value, gain))

    def values(self, count: int) -> List[float]:
        """The first ``count`` reduced iterates x(1..count)."""
        with self._lock:
            self._extend(count)
            return self._values[:count]

    def value(self, index: int) -> float:
        """Reduced iterate x(index + 1)."""
        with self._lock:
            self._extend(index + 1)
            return self._values[index]


@lru_cache(maxsize=256)
def _stream(params: FractionalMapParams) -> FractionalMapStream:
    return FractionalMapStream(params)


def fractional_map_sequence(params: FractionalMapParams, count: int) -> np.ndarray:
    """Iterates x(1..count) reduced to [0, 1)."""
    if count < 1:
        raise ParamsError(f"count must be >= 1 (got {count})")
    return np.array(_stream(params).values(count), dtype=np.float64)


@lru_cache(maxsize=1024)
def chaotic_permutation(params: FractionalMapParams, n: int) -> Permutation:
    """Permutation of {0..n-1} drawn as floor(x(i) * 1e14) mod n, i = 1, 2, ...

    Repeated candidates are skipped and iteration continues until n distinct
    indices have been collected.
    """
    if n < 1:
        raise ParamsError(f"Permutation order must be >= 1 (got {n})")

    stream = _stream(params)
    limit = MAX_DRAWS_PER_INDEX * n
    seen = set()
    order: List[int] = []
    draws = 0
    while len(order) < n:
        if draws >= limit:
            raise ChaosError(
                f"Fractional map degenerated: only {len(order)} of {n} indices after {limit} iterations"
            )
        candidate = int(math.floor(stream.value(draws) * SCALE)) % n
        draws += 1
        if candidate not in seen:
            seen.add(candidate)
            order.append(candidate)

    logger.debug("Derived permutation of order %d after %d iterations", n, draws)
    return tuple(order)


def permute(items: Sequence[int], params: FractionalMapParams) -> List[int]:
    """Reorder ``items`` by the chaotic permutation of order len(items)."""
    perm = chaotic_permutation(params, len(items))
    return [items[p] for p in perm]


def chaotic_positions(key_chunk, params: FractionalMapParams) -> PositionList:
    """Embedding order of one 64-coefficient chunk.

    Positions of the base permutation whose key bit is set come first, in
    key order; the rest follow, re-permuted by the map (taken in base order).
    """
    bits = np.asarray(key_chunk, dtype=np.uint8).ravel()
    if bits.size != CHUNK_BITS:
        raise ParamsError(f"Key chunk must hold exactly {CHUNK_BITS} bits (got {bits.size})")
    return _chaotic_positions(bits.tobytes(), params)


@lru_cache(maxsize=4096)
def _chaotic_positions(bits: bytes, params: FractionalMapParams) -> PositionList:
    base = chaotic_permutation(params, CHUNK_BITS)
    selected = [base[j] for j, bit in enumerate(bits) if bit]
    remaining = [base[j] for j, bit in enumerate(bits) if not bit]
    if remaining:
        selected.extend(permute(remaining, params))
    return tuple(selected)


def clear_caches() -> None:
    """Drop cached streams, permutations and position lists."""
    _stream.cache_clear()
    chaotic_permutation.cache_clear()
    _chaotic_positions.cache_clear()
