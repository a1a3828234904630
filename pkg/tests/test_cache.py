import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wearlevel.cache import (
    AddressParts,
    CorruptCacheState,
    LineState,
    decode_address,
    fill_line,
    lookup,
    on_hit_update,
    peek_victim,
    recompose_address,
    srrip_victim,
)
from wearlevel.config import CacheConfig, ConfigError

CFG = CacheConfig()


def reference_victim(rrpvs, valid, blocked):
    """Literal SRRIP search, one aging round at a time, on copies."""
    rrpvs = list(rrpvs)
    cands = [w for w in range(len(rrpvs)) if w not in blocked] or list(range(len(rrpvs)))
    for w in cands:
        if not valid[w]:
            return w, rrpvs
    rounds = 0
    while True:
        for w in cands:
            if rrpvs[w] == 3:
                return w, rrpvs
        for w in cands:
            rrpvs[w] = min(3, rrpvs[w] + 1)
        rounds += 1
        assert rounds <= 3


def make_set(rrpvs, valid=None):
    valid = valid or [True] * len(rrpvs)
    return [LineState(valid=v, tag=i, rrpv=r) for i, (r, v) in enumerate(zip(rrpvs, valid))]


class TestConfig:
    def test_defaults(self):
        assert (CFG.num_sets, CFG.num_ways, CFG.threshold, CFG.history_depth) == (2048, 16, 29, 8)
        assert CFG.set_bits == 11 and CFG.offset_bits == 6

    @pytest.mark.parametrize("bad", [
        dict(num_sets=1000), dict(num_ways=3), dict(block_size_bytes=48),
        dict(num_sets=32, sample_bits=6), dict(threshold=0), dict(interval_cycles=0),
        dict(history_depth=0), dict(pc_limit=0), dict(miss_latency_cycles=20),
        dict(recency_weighting="cubic"),
    ])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            CacheConfig(**bad)

    def test_from_dict_rejects_unknown(self):
        with pytest.raises(ConfigError):
            CacheConfig.from_dict({"num_sets": 64, "colour": "red"})


class TestDecode:
    def test_zero(self):
        assert decode_address(0, CFG) == AddressParts(0, 0)

    def test_known_address(self):
        # 0x12345 // 64 = 1165, which is below 2048
        assert decode_address(0x12345, CFG) == AddressParts(tag=0, set_index=1165)

    def test_wraps_to_next_tag(self):
        assert decode_address(CFG.block_size_bytes * CFG.num_sets, CFG) == AddressParts(1, 0)

    @given(st.integers(0, 2**52), st.integers(0, 63))
    def test_round_trip(self, block, offset):
        addr = block * 64 + offset
        parts = decode_address(addr, CFG)
        assert 0 <= parts.set_index < CFG.num_sets
        assert recompose_address(parts, CFG) == block * 64
        assert recompose_address(parts, CFG, offset) == addr


class TestLookup:
    def test_empty_set(self):
        assert lookup([LineState() for _ in range(16)], 0x55) is None

    def test_finds_way(self):
        lines = [LineState() for _ in range(16)]
        fill_line(lines[3], 0xAB, 1)
        assert lookup(lines, 0xAB) == 3

    def test_ignores_blocking(self):
        lines = [LineState() for _ in range(16)]
        fill_line(lines[7], 0xAB, 1).blocked = True
        assert lookup(lines, 0xAB) == 7

    def test_duplicate_is_corruption(self):
        lines = [LineState() for _ in range(16)]
        fill_line(lines[2], 0xAB, 1)
        fill_line(lines[9], 0xAB, 1)
        with pytest.raises(CorruptCacheState):
            lookup(lines, 0xAB)


class TestVictim:
    def test_all_invalid(self):
        assert srrip_victim([LineState() for _ in range(16)]) == 0

    def test_single_unblocked_way(self):
        rng = random.Random(3)
        for _ in range(2000):
            lines = make_set([rng.randint(0, 3) for _ in range(16)])
            keep = rng.randrange(16)
            mask = set(range(16)) - {keep}
            assert srrip_victim(lines, mask) == keep

    def test_all_blocked_falls_back(self):
        rng = random.Random(4)
        for _ in range(500):
            rrpvs = [rng.randint(0, 3) for _ in range(16)]
            a, b = make_set(rrpvs), make_set(rrpvs)
            assert srrip_victim(a, set(range(16))) == srrip_victim(b)
            assert [l.rrpv for l in a] == [l.rrpv for l in b]

    def test_ages_only_candidates(self):
        lines = make_set([0, 1, 0, 2])
        assert srrip_victim(lines, {3}) == 1
        assert [l.rrpv for l in lines] == [2, 3, 2, 2]

    def test_prefers_invalid_over_rrpv3(self):
        lines = make_set([3, 3, 0, 0], valid=[True, True, False, True])
        assert srrip_victim(lines) == 2

    def test_matches_reference_and_peek(self):
        rng = random.Random(11)
        for _ in range(5000):
            n = rng.choice([1, 2, 4, 8, 16])
            rrpvs = [rng.randint(0, 3) for _ in range(n)]
            valid = [rng.random() < 0.9 for _ in range(n)]
            blocked = {w for w in range(n) if rng.random() < 0.4}
            lines = make_set(rrpvs, valid)
            peek = peek_victim(lines, blocked)
            want, want_rrpvs = reference_victim(rrpvs, valid, blocked)
            assert srrip_victim(lines, blocked) == want == peek
            assert [l.rrpv for l in lines] == want_rrpvs


class TestLineUpdates:
    def test_hit_promotes(self):
        assert on_hit_update(LineState(valid=True, rrpv=3)).rrpv == 0
        assert on_hit_update(LineState(valid=True, rrpv=0)).rrpv == 0

    def test_hit_keeps_blocked(self):
        line = on_hit_update(LineState(valid=True, rrpv=2, blocked=True, tag=5))
        assert line.blocked and line.tag == 5

    def test_fill_sets_state(self):
        line = fill_line(LineState(), 0x77, 0x400)
        assert (line.valid, line.tag, line.rrpv, line.last_writer_ip) == (True, 0x77, 2, 0x400)

    def test_refill_replaces(self):
        line = fill_line(LineState(), 0x77, 0x400)
        on_hit_update(line)
        line.blocked = True
        fill_line(line, 0x99, 0x500)
        assert (line.tag, line.last_writer_ip, line.rrpv, line.blocked) == (0x99, 0x500, 2, True)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.integers(0, 3), min_size=16, max_size=16),
    st.lists(st.booleans(), min_size=16, max_size=16),
    st.sets(st.integers(0, 15)),
)
def test_victim_never_masked(rrpvs, valid, blocked):
    lines = make_set(rrpvs, valid)
    v = srrip_victim(lines, blocked)
    assert 0 <= v < 16
    if len(blocked) < 16:
        assert v not in blocked
    assert all(0 <= l.rrpv <= 3 for l in lines)
    for w in blocked:
        if len(blocked) < 16:
            assert lines[w].rrpv == rrpvs[w]
