#!/usr/bin/env python3
"""Test the fractional chaotic map, chaotic permutations and position lists."""

import math
import sys

import numpy as np
import pytest

from core.chaos import (
    CHUNK_BITS, chaotic_permutation, chaotic_positions, clear_caches, fractional_map_sequence,
    permute,
)
from core.errors import ChaosError, ParamsError
from core.models import FractionalMapParams

REFERENCE = FractionalMapParams(x0=0.3, nu=0.7, gain=3.9)

# Frozen vectors for nu = 1: every kernel ratio and Gamma(nu) is exactly 1.0,
# so the iterates depend on IEEE-754 add/multiply/floor only.
PINNED = FractionalMapParams(x0=0.3, nu=1.0, gain=3.9)
PINNED_ITERATES = [0.81899999999999995, 0.57813210000000015, 0.95119196230340086]
PINNED_ORDER_8 = (0, 4, 2, 6, 1, 3, 7, 5)
PINNED_ORDER_64 = (
    0, 4, 58, 40, 46, 48, 57, 12, 33, 52, 36, 51, 39, 5, 32, 59,
    1, 19, 31, 43, 28, 44, 55, 41, 63, 56, 54, 49, 8, 25, 7, 34,
    10, 24, 30, 6, 35, 3, 14, 45, 50, 38, 9, 53, 21, 23, 60, 29,
    20, 16, 26, 47, 27, 42, 17, 61, 22, 15, 18, 37, 13, 62, 11, 2,
)
PINNED_KEY_CHUNK = np.unpackbits(np.frombuffer(bytes.fromhex("0123456789abcdef"), dtype=np.uint8))
PINNED_POSITIONS = (
    12, 36, 32, 59, 19, 44, 41, 56, 54, 25, 7, 34, 10, 35, 45, 50,
    9, 21, 60, 29, 20, 16, 27, 42, 61, 22, 15, 18, 13, 62, 11, 2,
    0, 46, 53, 52, 43, 55, 38, 1, 4, 24, 8, 33, 48, 23, 37, 5,
    26, 3, 51, 14, 6, 63, 58, 39, 17, 57, 40, 31, 49, 30, 47, 28,
)


def literal_iterates(x0, nu, gain):
    """x(n+1) = x(0) + 1/Gamma(nu) * sum_j Gamma(n-j+nu)/Gamma(n-j+1) * g(x(j))."""
    def reduce(x):
        return abs(x) - math.floor(abs(x))

    history = [reduce(x0)]
    n = 0
    while True:
        total = 0.0
        for j in range(n + 1):
            m = n - j
            ratio = math.exp(math.lgamma(m + nu) - math.lgamma(m + 1))
            f = history[j]
            total += ratio * (gain * f * (1.0 - f) - f)
        x = x0 + total / math.gamma(nu)
        history.append(reduce(x))
        yield reduce(x)
        n += 1


def literal_map(x0, nu, gain, count):
    iterates = literal_iterates(x0, nu, gain)
    return [next(iterates) for _ in range(count)]


def literal_permutation(x0, nu, gain, n):
    order = []
    iterates = literal_iterates(x0, nu, gain)
    for _ in range(64 * n):
        candidate = int(math.floor(next(iterates) * 1e14)) % n
        if candidate not in order:
            order.append(candidate)
        if len(order) == n:
            return order
    raise AssertionError("oracle map degenerated")


def draw_params(rng):
    return FractionalMapParams(
        x0=float(rng.uniform(0.01, 0.99)),
        nu=float(rng.uniform(0.05, 1.0)),
        gain=float(rng.uniform(3.6, 4.0)),
    )


def test_sequence_matches_literal_oracle():
    """x0=0.3, nu=0.7, gain=3.9: 100 iterates identical to the literal sum."""
    print("🧪 Testing fractional map against literal summation")
    clear_caches()
    produced = fractional_map_sequence(REFERENCE, 100)
    expected = literal_map(0.3, 0.7, 3.9, 100)
    assert produced.tolist() == expected
    assert np.all((produced >= 0.0) & (produced < 1.0))
    print("✅ 100 iterates bit-identical")


def test_sequence_edge_cases():
    print("\n🧪 Testing map edge cases")
    params = FractionalMapParams(x0=0.3, nu=1.0, gain=3.9)
    first = fractional_map_sequence(params, 1)
    g0 = 3.9 * 0.3 * 0.7 - 0.3
    assert first.tolist() == [abs(0.3 + g0) - math.floor(abs(0.3 + g0))]

    # nu = 1 collapses every kernel ratio to 1: a plain cumulative iteration
    values = fractional_map_sequence(params, 20).tolist()
    s = 0.0
    f = 0.3
    for expected in values:
        s += 3.9 * f * (1.0 - f) - f
        x = 0.3 + s
        f = abs(x) - math.floor(abs(x))
        assert f == expected

    with pytest.raises(ParamsError):
        fractional_map_sequence(params, 0)
    print("✅ Edge cases correct")


def test_sequence_is_prefix_stable():
    long_run = fractional_map_sequence(REFERENCE, 200)
    clear_caches()
    short_run = fractional_map_sequence(REFERENCE, 50)
    assert np.array_equal(long_run[:50], short_run)


def test_params_validation_and_redaction():
    print("\n🧪 Testing parameter validation")
    for kwargs in ({"x0": 0.0, "nu": 0.5}, {"x0": 1.0, "nu": 0.5}, {"x0": 0.5, "nu": 0.0},
                   {"x0": 0.5, "nu": 1.5}, {"x0": 0.5, "nu": 0.5, "gain": 4.5},
                   {"x0": float("nan"), "nu": 0.5}):
        with pytest.raises(ParamsError):
            FractionalMapParams(**kwargs)

    with pytest.raises(ParamsError) as info:
        FractionalMapParams.from_strings("0.123abc", "0.5")
    assert "0.123abc" not in str(info.value)

    params = FractionalMapParams.from_strings("0.123456", "0.654321")
    assert params.gain == FractionalMapParams.DEFAULT_GAIN
    assert "0.123456" not in repr(params)
    assert "0.654321" not in f"{params!r} {params}"
    print("✅ Validation and redaction correct")


def test_permutation_matches_literal_oracle():
    """Order-8 permutation of the reference parameters equals the literal oracle."""
    print("\n🧪 Testing permutation against the literal oracle")
    clear_caches()
    perm = chaotic_permutation(REFERENCE, 8)
    expected = literal_permutation(0.3, 0.7, 3.9, 8)
    print(f"   order-8 permutation: {list(perm)}")
    assert list(perm) == expected
    assert chaotic_permutation(REFERENCE, 1) == (0,)
    assert list(chaotic_permutation(REFERENCE, 64)) == literal_permutation(0.3, 0.7, 3.9, 64)
    print("✅ Oracle permutation reproduced")


def test_golden_vectors():
    print("\n🧪 Testing frozen golden vectors")
    clear_caches()
    assert fractional_map_sequence(PINNED, 3).tolist() == PINNED_ITERATES
    assert chaotic_permutation(PINNED, 8) == PINNED_ORDER_8
    assert chaotic_permutation(PINNED, 64) == PINNED_ORDER_64
    assert chaotic_positions(PINNED_KEY_CHUNK, PINNED) == PINNED_POSITIONS
    assert list(chaotic_permutation(PINNED, 8)) == literal_permutation(0.3, 1.0, 3.9, 8)
    print("✅ Golden vectors unchanged")


def test_sensitivity_to_initial_condition():
    """Shifting x0 by 1e-10 changes the order-64 permutation in at least 90 of 100 draws."""
    print("\n🧪 Testing sensitivity to the initial condition")
    rng = np.random.default_rng(64)
    differing = 0
    trials = 100
    for _ in range(trials):
        x0 = float(rng.uniform(0.01, 0.98))
        nu = float(rng.uniform(0.05, 1.0))
        try:
            base = chaotic_permutation(FractionalMapParams(x0=x0, nu=nu), 64)
            shifted = chaotic_permutation(FractionalMapParams(x0=x0 + 1e-10, nu=nu), 64)
        except ChaosError:
            continue
        if base != shifted:
            differing += 1
    print(f"   differing permutations: {differing}/{trials}")
    assert differing >= 90
    print("✅ Permutation is sensitive to x0")


def test_permutation_rejects_bad_order():
    with pytest.raises(ParamsError):
        chaotic_permutation(REFERENCE, 0)


def test_positions_degenerate_key_chunks():
    print("\n🧪 Testing all-ones / all-zeros / single-bit key chunks")
    base = chaotic_permutation(REFERENCE, CHUNK_BITS)

    assert chaotic_positions(np.ones(64, dtype=np.uint8), REFERENCE) == base

    all_zero = chaotic_positions(np.zeros(64, dtype=np.uint8), REFERENCE)
    assert list(all_zero) == permute(list(base), REFERENCE)
    assert list(all_zero) == [base[p] for p in literal_permutation(0.3, 0.7, 3.9, 64)]

    single = np.zeros(64, dtype=np.uint8)
    single[0] = 1
    rho = chaotic_positions(single, REFERENCE)
    assert rho[0] == base[0]
    rest = list(base[1:])
    assert list(rho[1:]) == [rest[p] for p in literal_permutation(0.3, 0.7, 3.9, 63)]

    with pytest.raises(ParamsError):
        chaotic_positions(np.ones(63, dtype=np.uint8), REFERENCE)
    print("✅ Degenerate chunks follow the two-pass rule")


def test_positions_key_bits_first():
    rng = np.random.default_rng(5)
    chunk = rng.integers(0, 2, size=64, dtype=np.uint8)
    base = chaotic_permutation(REFERENCE, CHUNK_BITS)
    rho = chaotic_positions(chunk, REFERENCE)
    ones = int(chunk.sum())
    assert list(rho[:ones]) == [base[j] for j in range(64) if chunk[j]]
    assert sorted(rho[ones:]) == sorted(base[j] for j in range(64) if not chunk[j])


def test_bijection_over_random_draws():
    """1000 random (x0, nu, gain, key chunk) draws all give bijections."""
    print("\n🧪 Testing bijection over 1000 random draws")
    rng = np.random.default_rng(1000)
    degenerate = 0
    for _ in range(1000):
        params = draw_params(rng)
        n = int(rng.integers(1, 65))
        chunk = rng.integers(0, 2, size=64, dtype=np.uint8)
        try:
            perm = chaotic_permutation(params, n)
            rho = chaotic_positions(chunk, params)
        except ChaosError:
            degenerate += 1
            continue
        assert sorted(perm) == list(range(n))
        assert sorted(rho) == list(range(64))
    print(f"   degenerate maps: {degenerate}")
    assert degenerate < 50
    print("✅ Every permutation and position list is a bijection")


def test_determinism():
    chunk = np.random.default_rng(9).integers(0, 2, size=64, dtype=np.uint8)
    first = chaotic_positions(chunk, REFERENCE)
    clear_caches()
    again = chaotic_positions(chunk.copy(), FractionalMapParams(x0=0.3, nu=0.7, gain=3.9))
    assert first == again


def main():
    """Run all chaos tests."""
    print("🚀 Chaotic Map Test Suite")
    print("=" * 60)

    tests = [
        test_sequence_matches_literal_oracle,
        test_sequence_edge_cases,
        test_sequence_is_prefix_stable,
        test_params_validation_and_redaction,
        test_permutation_matches_literal_oracle,
        test_golden_vectors,
        test_sensitivity_to_initial_condition,
        test_permutation_rejects_bad_order,
        test_positions_degenerate_key_chunks,
        test_positions_key_bits_first,
        test_bijection_over_random_draws,
        test_determinism,
    ]

    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"❌ Test {test.__name__} failed: {e}")
            failed += 1

    print("\n" + "=" * 60)
    print(f"📊 Test Results: {len(tests) - failed} passed, {failed} failed")
    return failed == 0


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
