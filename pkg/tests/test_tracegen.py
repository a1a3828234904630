import numpy as np
import pytest

from wearlevel import CacheConfig, WorkloadError, WorkloadSpec, decode_address, generate
from wearlevel.trace import format_trace

CFG = CacheConfig()

# frozen from the Philox-keyed generator; any change here changes every trace
GOLDEN = {
    "hot_way": ("1 0x400000 0x20140 W", "2 0x400000 0x20140 W", "3 0x400000 0x140 W",
                "4 0x400000 0x140 W", "5 0x400000 0x20140 W", "6 0x400000 0x140 W"),
    "hot_set": ("1 0x400000 0xa0240 W", "2 0x400000 0xe0240 W", "3 0x4000c0 0x20240 W",
                "4 0x400000 0x40240 W", "5 0x400080 0x80240 W", "6 0x4000c0 0x40240 W"),
    "zipf_mixed": ("1 0x4000c0 0x6b0440 R", "2 0x400040 0x22bdc0 R", "3 0x403400 0x2af640 R",
                   "4 0x400000 0x150700 W", "5 0x400080 0x462280 W", "6 0x4000c0 0x267340 W"),
}
GOLDEN_KW = {"hot_way": dict(target_set=5), "hot_set": dict(target_set=9), "zipf_mixed": dict(zipf_s=1.1)}


@pytest.mark.parametrize("kind", sorted(GOLDEN))
def test_golden_output(kind):
    trace = generate(WorkloadSpec(kind, 6, seed=42, **GOLDEN_KW[kind]), CFG)
    assert tuple(format_trace(trace).splitlines()) == GOLDEN[kind]


def test_hot_way_small():
    trace = list(generate(WorkloadSpec("hot_way", 4, seed=1, target_set=77), CFG))
    assert [r.cycle for r in trace] == [1, 2, 3, 4]
    assert all(r.kind == "W" for r in trace)
    assert all(decode_address(r.addr, CFG).set_index == 77 for r in trace)


def test_hot_way_stays_in_target_set():
    trace = generate(WorkloadSpec("hot_way", 50_000, seed=8, target_set=1057), CFG)
    sets = (trace.addrs >> np.uint64(CFG.offset_bits)) & np.uint64(CFG.num_sets - 1)
    assert np.mean(sets == 1057) >= 0.99
    # a handful of distinct blocks live at any time
    assert len(np.unique(trace.addrs[:1000])) <= 3


def test_stride():
    trace = generate(WorkloadSpec("hot_set", 5, seed=1, cycle_stride=7), CFG)
    assert trace.cycles.tolist() == [7, 14, 21, 28, 35]


@pytest.mark.parametrize("kind", ["hot_way", "hot_set", "zipf_mixed"])
def test_deterministic(kind):
    spec = WorkloadSpec(kind, 20_000, seed=123)
    assert format_trace(generate(spec, CFG)) == format_trace(generate(spec, CFG))
    other = WorkloadSpec(kind, 20_000, seed=124)
    assert format_trace(generate(spec, CFG)) != format_trace(generate(other, CFG))


def test_zipf_skew_concentrates_accesses():
    n = 10**6

    def top_share(s):
        t = generate(WorkloadSpec("zipf_mixed", n, seed=77, zipf_s=s), CFG)
        _, counts = np.unique(t.addrs, return_counts=True)
        universe = CFG.num_sets * CFG.num_ways * 4
        top = np.sort(counts)[::-1][: universe // 100]
        return top.sum() / n

    assert top_share(1.2) > top_share(0.4)


def test_zipf_hot_ips_dominate_writes():
    spec = WorkloadSpec("zipf_mixed", 200_000, seed=5, hot_ip_count=4)
    t = generate(spec, CFG)
    w_ips = t.ips[t.writes]
    hot = np.isin(w_ips, 0x400000 + 0x40 * np.arange(4, dtype=np.uint64))
    assert hot.mean() >= 0.5
    assert abs(t.writes.mean() - spec.write_fraction) < 0.01


def test_zipf_spans_all_sets():
    t = generate(WorkloadSpec("zipf_mixed", 200_000, seed=5, zipf_s=0.6), CFG)
    sets = (t.addrs >> np.uint64(CFG.offset_bits)) & np.uint64(CFG.num_sets - 1)
    assert len(np.unique(sets)) == CFG.num_sets


@pytest.mark.parametrize("bad", [
    dict(kind="hot_way", num_records=0),
    dict(kind="hot_way", num_records=5, target_set=2048),
    dict(kind="zipf_mixed", num_records=5, zipf_s=0),
    dict(kind="zipf_mixed", num_records=5, write_fraction=1.5),
    dict(kind="spiky", num_records=5),
    dict(kind="hot_set", num_records=5, cycle_stride=0),
])
def test_invalid_specs(bad):
    with pytest.raises(WorkloadError):
        generate(WorkloadSpec(**bad), CFG)
