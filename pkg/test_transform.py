#!/usr/bin/env python3
"""Test the block DCT, quantization tables and zigzag scan."""

import math
import sys

import numpy as np
import pytest

from core.errors import ParamsError
from core.models import QuantTable
from core.transform import (
    BASE_QUANT_TABLE, ZIGZAG_POSITIONS, build_quant_table, dct_forward, dct_forward_reference,
    dct_inverse, dct_inverse_reference, dequantize, inverse_zigzag, quantize, round_half_away,
    zigzag,
)


def naive_dct(block):
    """Direct evaluation of the 2D DCT-II double sum, written out per term."""
    out = [[0.0] * 8 for _ in range(8)]
    for u in range(8):
        for v in range(8):
            cu = 1 / math.sqrt(2) if u == 0 else 1.0
            cv = 1 / math.sqrt(2) if v == 0 else 1.0
            acc = 0.0
            for i in range(8):
                for j in range(8):
                    acc += float(block[i][j]) * math.cos((2 * i + 1) * u * math.pi / 16) \
                        * math.cos((2 * j + 1) * v * math.pi / 16)
            out[u][v] = cu * cv * acc / 4
    return np.array(out)


def naive_idct(coeffs):
    out = [[0.0] * 8 for _ in range(8)]
    for i in range(8):
        for j in range(8):
            acc = 0.0
            for u in range(8):
                for v in range(8):
                    cu = 1 / math.sqrt(2) if u == 0 else 1.0
                    cv = 1 / math.sqrt(2) if v == 0 else 1.0
                    acc += cu * cv * float(coeffs[u][v]) * math.cos((2 * i + 1) * u * math.pi / 16) \
                        * math.cos((2 * j + 1) * v * math.pi / 16)
            out[i][j] = acc / 4
    return np.array(out)


def test_dct_constant_blocks():
    print("🧪 Testing DCT of constant blocks")
    coeffs = dct_forward(np.full((8, 8), 128))
    assert abs(coeffs[0, 0] - 1024.0) < 1e-9
    coeffs[0, 0] = 0.0
    assert np.max(np.abs(coeffs)) < 1e-9
    assert np.max(np.abs(dct_forward(np.zeros((8, 8))))) == 0.0

    dc = np.zeros((8, 8))
    dc[0, 0] = 1024.0
    assert np.allclose(dct_inverse(dc), 128.0, atol=1e-9)
    assert np.max(np.abs(dct_inverse(np.zeros((8, 8))))) == 0.0
    print("✅ Constant-block cases correct")


def test_dct_matches_double_sum_oracle():
    """1000 random blocks: vectorized DCT/IDCT agree with the literal double sum."""
    print("\n🧪 Testing DCT against literal double sum (1000 blocks)")
    rng = np.random.default_rng(2024)
    blocks = rng.integers(0, 256, size=(1000, 8, 8))
    forward = dct_forward(blocks)
    inverse = dct_inverse(forward)

    # basis matrix form of the same double sum keeps 1000 blocks fast
    k = np.arange(8)
    sigma = np.where(k == 0, math.sqrt(0.5), 1.0)
    basis = 0.5 * sigma[:, None] * np.cos(np.pi * k[:, None] * (2 * k[None, :] + 1) / 16)
    oracle_forward = np.einsum("ui,nij,vj->nuv", basis, blocks.astype(np.float64), basis)
    oracle_inverse = np.einsum("ui,nuv,vj->nij", basis, forward, basis)

    assert np.max(np.abs(forward - oracle_forward)) < 1e-9
    assert np.max(np.abs(inverse - oracle_inverse)) < 1e-9
    assert np.max(np.abs(inverse - blocks)) < 1e-9

    # a sample through the scalar quadruple loops, both in-package and here
    for n in range(0, 1000, 100):
        assert np.max(np.abs(forward[n] - naive_dct(blocks[n]))) < 1e-9
        assert np.max(np.abs(forward[n] - dct_forward_reference(blocks[n]))) < 1e-9
        assert np.max(np.abs(inverse[n] - naive_idct(forward[n]))) < 1e-9
        assert np.max(np.abs(inverse[n] - dct_inverse_reference(forward[n]))) < 1e-9
    print("✅ Max abs error below 1e-9")


def test_round_half_away():
    values = np.array([0.5, -0.5, 1.5, -1.5, 2.175, -1.575, 2.4999, -25.5])
    assert round_half_away(values).tolist() == [1.0, -1.0, 2.0, -2.0, 2.0, -2.0, 2.0, -26.0]


def test_quant_table():
    print("\n🧪 Testing quantization tables")
    table = build_quant_table(75)
    assert table.chi == 0.5
    assert table.entries[0, 0] == 8.0
    assert np.array_equal(table.entries, np.maximum(1.0, 0.5 * BASE_QUANT_TABLE))

    table = build_quant_table(99)
    assert table.entries[0, 2] == 1.0
    assert np.all(table.entries >= 1.0)

    for bad in (50, 100, 49.9, 120):
        with pytest.raises(ParamsError):
            build_quant_table(bad)
    print("✅ Table scaling and clamping correct")


def test_quantize_and_dequantize():
    print("\n🧪 Testing quantize/dequantize rounding")
    table = QuantTable(quality=75.0, entries=np.full((8, 8), 8.0))
    coeffs = np.zeros((8, 8))
    coeffs[0, 0], coeffs[0, 1], coeffs[0, 2] = 17.4, -12.6, 4.0
    q = quantize(coeffs, table)
    assert (q[0, 0], q[0, 1], q[0, 2]) == (2, -2, 1)
    assert q.dtype == np.int32

    assert dequantize(np.full((8, 8), 2), table)[0, 0] == 16.0
    odd = QuantTable(quality=75.0, entries=np.full((8, 8), 8.5))
    assert dequantize(np.full((8, 8), -3), odd)[0, 0] == -26.0
    assert np.all(dequantize(np.zeros((8, 8)), odd) == 0.0)
    print("✅ Ties round away from zero")


def test_zigzag_order():
    print("\n🧪 Testing zigzag scan")
    assert ZIGZAG_POSITIONS[:6] == ((0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2))
    assert ZIGZAG_POSITIONS[-1] == (7, 7)
    assert sorted(ZIGZAG_POSITIONS) == [(i, j) for i in range(8) for j in range(8)]

    m = np.zeros((8, 8), dtype=np.int32)
    m[0, 1] = 5
    assert zigzag(m)[1] == 5

    rng = np.random.default_rng(11)
    stack = rng.integers(-50, 50, size=(10, 8, 8))
    assert np.array_equal(inverse_zigzag(zigzag(stack)), stack)
    for n in range(10):
        assert np.array_equal(inverse_zigzag(zigzag(stack[n])), stack[n])
    print("✅ Zigzag order and inverse correct")


def main():
    """Run all transform tests."""
    print("🚀 Transform Test Suite")
    print("=" * 60)

    tests = [
        test_dct_constant_blocks,
        test_dct_matches_double_sum_oracle,
        test_round_half_away,
        test_quant_table,
        test_quantize_and_dequantize,
        test_zigzag_order,
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
