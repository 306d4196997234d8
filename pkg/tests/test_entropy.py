"""Bit packer: group exponents, JEE token stream, payload round trips."""

import json
import math
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apax.entropy import (
    GROUP_SIZE,
    MAX_EXPONENT,
    group_exponent,
    group_exponents,
    jee_decode,
    jee_encode,
    jee_side_info_bits,
    pack_block,
    unpack_block,
    unpack_block_counted,
)
from apax.errors import CorruptStream, InternalError, TruncatedStream

GOLDEN = pathlib.Path(__file__).parent / "golden" / "entropy_vectors.json"


def width_oracle(group):
    """Minimal two's-complement width by scanning w = 1..34."""
    if all(v == 0 for v in group):
        return 0
    for w in range(1, MAX_EXPONENT + 1):
        lo, hi = -(1 << (w - 1)), (1 << (w - 1)) - 1
        if all(lo <= v <= hi for v in group):
            return w
    raise AssertionError("value outside 34-bit range")


def mantissa_bits_oracle(samples, exponents):
    """Two's-complement bit string, MSB first, per the payload layout."""
    bits = []
    for g, e in enumerate(exponents):
        for v in samples[4 * g:4 * g + 4]:
            u = v & ((1 << e) - 1) if e else 0
            bits.extend((u >> (e - 1 - k)) & 1 for k in range(e))
    return bits


class TestGroupExponent:
    def test_all_zero(self):
        assert group_exponent([0, 0, 0, 0]) == 0

    def test_two_bit(self):
        assert group_exponent([1, -1, 0, 0]) == 2

    def test_four_bit_boundaries(self):
        assert group_exponent([7, 7, 7, 7]) == 4
        assert group_exponent([-8, 0, 0, 0]) == 4

    @given(st.lists(st.integers(-(2 ** 33), 2 ** 33 - 1), min_size=4, max_size=4))
    def test_matches_width_oracle(self, group):
        assert group_exponent(group) == width_oracle(group)

    def test_vectorized_matches_scalar(self, rng):
        v = rng.integers(-(2 ** 20), 2 ** 20, size=64)
        e = group_exponents(v)
        assert e.tolist() == [width_oracle(v[4 * g:4 * g + 4]) for g in range(16)]

    def test_rejects_overwide(self):
        with pytest.raises(InternalError):
            group_exponent([2 ** 34, 0, 0, 0])


class TestJee:
    def test_constant_exponents(self):
        # First exponent absolute (escape 15, two abs nibbles), then the two
        # zero diffs pair into joint nibble (0+1)*3 + (0+1) = 4.
        assert jee_encode([8, 8, 8]) == [15, 0, 8, 4]

    def test_single_diff_token(self):
        assert jee_encode([8, 10]) == [15, 0, 8, 13]  # diff +2 -> 9 + 4

    def test_escape_on_large_diff(self):
        assert jee_encode([3, 12]) == [15, 0, 3, 15, 0, 12]

    def test_decode_examples(self):
        assert jee_decode([15, 0, 8, 4], 3).tolist() == [8, 8, 8]
        assert jee_decode([15, 0, 8, 13], 2).tolist() == [8, 10]

    @given(st.lists(st.integers(0, MAX_EXPONENT), min_size=1, max_size=200))
    def test_round_trip(self, exps):
        nibs = jee_encode(exps)
        assert all(0 <= n <= 15 for n in nibs)
        assert jee_decode(nibs, len(exps)).tolist() == exps

    def test_fourteen_allowed_inside_escape_payload(self):
        # Nibble 14 is reserved only as a token; an escaped absolute value
        # may legitimately contain it.
        assert jee_encode([14]) == [15, 0, 14]
        assert jee_decode([15, 0, 14], 1).tolist() == [14]

    def test_truncated_mid_escape(self):
        with pytest.raises(TruncatedStream):
            jee_decode([15, 0], 1)

    def test_truncated_stream(self):
        with pytest.raises(TruncatedStream):
            jee_decode([15, 0, 8], 2)

    def test_reserved_nibble(self):
        with pytest.raises(CorruptStream):
            jee_decode([15, 0, 8, 14], 2)

    def test_out_of_range_exponent(self):
        with pytest.raises(CorruptStream):
            jee_decode([15, 2, 3], 1)  # absolute value 35

    def test_must_start_absolute(self):
        with pytest.raises(CorruptStream):
            jee_decode([4, 4], 3)

    def test_side_info_beats_absolute_coding(self, rng):
        # Smooth exponent track: nearly all diffs in {-1, 0, +1} pair up.
        e = np.clip(np.cumsum(rng.integers(-1, 2, size=4096)) + 12, 0, 34)
        bps = jee_side_info_bits(e.tolist()) / (4 * e.size)
        assert bps <= 0.8  # absolute coding costs 8 bits/group = 2.0 bps


class TestPackBlock:
    def test_all_zero_block(self):
        payload = pack_block(np.zeros(4, np.int64), np.array([0]))
        # JEE section only: nibbles [15, 0, 0] padded to two bytes.
        assert payload == bytes([0xF0, 0x00])
        assert unpack_block(payload, 1).tolist() == [0, 0, 0, 0]

    def test_two_bit_mantissas(self):
        payload = pack_block(np.array([1, -1, 0, 0]), np.array([2]))
        # JEE [15,0,2] -> f0 20; mantissa bits 01 11 00 00 -> 0x70.
        assert payload == bytes([0xF0, 0x20, 0x70])

    def test_payload_length_identity(self, rng):
        for _ in range(50):
            n_groups = int(rng.integers(1, 32))
            e = rng.integers(0, 12, size=n_groups)
            v = np.concatenate([
                rng.integers(-(1 << max(w - 1, 0)), 1 << max(w - 1, 0), size=4)
                if w else np.zeros(4, np.int64) for w in e])
            e = group_exponents(v)  # tighten to the true widths
            payload = pack_block(v, e)
            nibbles = len(jee_encode(e.tolist()))
            expect = (nibbles + 1) // 2 + (int(4 * e.sum()) + 7) // 8
            assert len(payload) == expect

    def test_mantissa_bits_match_oracle(self, rng):
        v = rng.integers(-2000, 2000, size=16)
        e = group_exponents(v)
        payload = pack_block(v, e)
        jee_bytes = (len(jee_encode(e.tolist())) + 1) // 2
        got = np.unpackbits(np.frombuffer(payload[jee_bytes:], np.uint8))
        bits = mantissa_bits_oracle(v.tolist(), e.tolist())
        assert got[:len(bits)].tolist() == bits
        assert not got[len(bits):].any()  # padding is zero

    def test_width_mismatch_is_internal_error(self):
        with pytest.raises(InternalError):
            pack_block(np.array([4, 0, 0, 0]), np.array([2]))

    @settings(max_examples=200)
    @given(st.lists(st.integers(-(2 ** 33), 2 ** 33 - 1), min_size=4,
                    max_size=64).filter(lambda v: len(v) % 4 == 0))
    def test_round_trip(self, v):
        arr = np.asarray(v, dtype=np.int64)
        e = group_exponents(arr)
        out, used = unpack_block_counted(pack_block(arr, e), e.size)
        assert out.tolist() == v
        assert used == len(pack_block(arr, e))

    def test_trailing_bytes_ignored(self, rng):
        v = rng.integers(-50, 50, size=8)
        e = group_exponents(v)
        payload = pack_block(v, e)
        out, used = unpack_block_counted(payload + b"\xAB\xCD", e.size)
        assert out.tolist() == v.tolist() and used == len(payload)

    def test_truncated_mantissa(self, rng):
        v = rng.integers(-5000, 5000, size=16)
        payload = pack_block(v, group_exponents(v))
        with pytest.raises(TruncatedStream):
            unpack_block(payload[:-1], 4)


def test_golden_vectors():
    """Frozen (input block, hex payload) pairs guard the bitstream layout."""
    vectors = json.loads(GOLDEN.read_text())
    assert len(vectors) >= 6
    for vec in vectors:
        v = np.asarray(vec["samples"], dtype=np.int64)
        e = group_exponents(v)
        assert e.tolist() == vec["exponents"]
        payload = pack_block(v, e)
        assert payload.hex() == vec["payload_hex"]
        assert unpack_block(payload, e.size).tolist() == vec["samples"]
