"""Constellation geometry, labeling, and mapping tests.

Frozen point values are derived by hand from the reflected-Gray PAM
recursion: for a 2-bit axis, levels are 00 -> +1, 01 -> +3, 10 -> -1,
11 -> -3 before scaling; the sign bit is the axis MSB.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from dbicm.constellation import (
    Constellation,
    build_apsk32_dvbs2,
    build_gray_qam,
    map_symbols,
)


def test_qpsk_points_frozen(qpsk):
    a = 1.0 / math.sqrt(2.0)
    # label b0 b1: b0 signs the I axis, b1 the Q axis
    expected = {
        0b00: a + 1j * a,
        0b01: a - 1j * a,
        0b10: -a + 1j * a,
        0b11: -a - 1j * a,
    }
    for label, point in expected.items():
        assert qpsk.points[label] == pytest.approx(point, abs=1e-15)


def test_qam16_points_frozen(qam16):
    s = 1.0 / math.sqrt(10.0)
    # positions 0,1 -> I (MSB, LSB); 2,3 -> Q; PAM 00->+1 01->+3 10->-1 11->-3
    assert qam16.points[0b0000] == pytest.approx((1 + 1j) * s, abs=1e-15)
    assert qam16.points[0b0100] == pytest.approx((3 + 1j) * s, abs=1e-15)
    assert qam16.points[0b0001] == pytest.approx((1 + 3j) * s, abs=1e-15)
    assert qam16.points[0b1011] == pytest.approx((-1 - 3j) * s, abs=1e-15)
    assert qam16.points[0b1101] == pytest.approx((-3 + 3j) * s, abs=1e-15)


def test_qam64_amplitude_map_frozen(qam64):
    s = 1.0 / math.sqrt(42.0)
    # 3-bit axis: 000->+3 001->+1 010->+5 011->+7, MSB flips the sign
    assert qam64.points[0b000000] == pytest.approx((3 + 3j) * s, abs=1e-15)
    assert qam64.points[0b001000] == pytest.approx((1 + 3j) * s, abs=1e-15)
    assert qam64.points[0b010000] == pytest.approx((5 + 3j) * s, abs=1e-15)
    assert qam64.points[0b011011] == pytest.approx((7 + 7j) * s, abs=1e-15)
    assert qam64.points[0b100000] == pytest.approx((-3 + 3j) * s, abs=1e-15)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_qam_unit_energy(m):
    const = build_gray_qam(m)
    assert np.mean(np.abs(const.points) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_apsk32_unit_energy(apsk32):
    assert np.mean(np.abs(apsk32.points) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_qam_gray_adjacency():
    """Walking one level along either axis flips exactly one label bit."""
    for m in (2, 4, 6):
        const = build_gray_qam(m)
        pts = const.points
        res = np.round(pts.real, 12)
        ims = np.round(pts.imag, 12)
        levels = np.unique(res)
        step = levels[1] - levels[0] if levels.size > 1 else 0.0
        for k in range(pts.size):
            for dre, dim in ((step, 0.0), (0.0, step)):
                hits = np.flatnonzero(
                    (np.abs(res - (res[k] + dre)) < 1e-9)
                    & (np.abs(ims - (ims[k] + dim)) < 1e-9)
                )
                for j in hits:
                    flips = int(np.sum(const.bits[k] != const.bits[j]))
                    assert flips == 1


def test_qam_axis_split():
    """Positions 0..m/2-1 decide Re only, the rest decide Im only."""
    for m in (2, 4, 6):
        const = build_gray_qam(m)
        half = m // 2
        idx = np.arange(2**m)
        # flipping any Q-half bit must not move the real part
        for pos in range(half, m):
            mate = idx ^ (1 << (m - 1 - pos))
            assert np.allclose(const.points.real, const.points.real[mate])
        for pos in range(half):
            mate = idx ^ (1 << (m - 1 - pos))
            assert np.allclose(const.points.imag, const.points.imag[mate])


def test_apsk32_ring_structure(apsk32):
    radii = np.abs(apsk32.points)
    uniq = np.unique(np.round(radii, 9))
    assert uniq.size == 3
    counts = [int(np.sum(np.isclose(radii, r))) for r in uniq]
    assert counts == [4, 12, 16]
    # DVB-S2 ring ratios for the 3/4 entry (used for the 2/3 request too)
    r1 = radii[np.isclose(radii, uniq[0])].mean()
    r2 = radii[np.isclose(radii, uniq[1])].mean()
    r3 = radii[np.isclose(radii, uniq[2])].mean()
    assert r2 / r1 == pytest.approx(2.84, abs=1e-12)
    assert r3 / r1 == pytest.approx(5.27, abs=1e-12)
    # inner ring sits on the diagonals, outer ring starts at angle zero
    inner = apsk32.points[np.isclose(radii, uniq[0])]
    angles = np.sort(np.mod(np.degrees(np.angle(inner)), 360.0))
    assert np.allclose(angles, [45.0, 135.0, 225.0, 315.0], atol=1e-9)
    outer = apsk32.points[np.isclose(radii, uniq[2])]
    assert np.any(np.isclose(np.mod(np.degrees(np.angle(outer)), 360.0), 0.0))


def test_apsk32_rate_ids():
    assert build_apsk32_dvbs2("3/4").m == 5
    # "2/3" maps onto the 3/4 ratios, point for point
    assert np.allclose(build_apsk32_dvbs2("2/3").points,
                       build_apsk32_dvbs2("3/4").points)
    with pytest.raises(ValueError):
        build_apsk32_dvbs2("1/2")


def test_bits_table_and_sets(qam16):
    # bits[k, i] is bit i (MSB first) of label k
    assert qam16.bits.shape == (16, 4)
    assert list(qam16.bits[0b1010]) == [1, 0, 1, 0]
    for pos in range(4):
        zero = set(qam16.zero_sets[pos].tolist())
        one = set(qam16.one_sets[pos].tolist())
        assert zero | one == set(range(16))
        assert not zero & one
        assert len(zero) == 8


def test_label_strings(qpsk):
    assert qpsk.label_strings() == ["00", "01", "10", "11"]


def test_constellation_validation():
    with pytest.raises(ValueError):
        Constellation("bad", 2, np.ones(3, dtype=complex))
    with pytest.raises(ValueError):
        Constellation("bad", 0, np.ones(1, dtype=complex))
    with pytest.raises(ValueError):
        build_gray_qam(3)
    with pytest.raises(ValueError):
        build_gray_qam(0)


def test_map_symbols_roundtrip(qam16):
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, size=(4, 64), dtype=np.uint8)
    sym = map_symbols(bits, qam16)
    weights = 1 << np.arange(3, -1, -1)
    labels = (bits.astype(np.int64) * weights[:, None]).sum(axis=0)
    assert np.array_equal(sym, qam16.points[labels])


def test_map_symbols_shape_check(qam16):
    with pytest.raises(ValueError):
        map_symbols(np.zeros((3, 8), dtype=np.uint8), qam16)
