# %%
"""
Why a fixed threshold oscillates
================================

Blocking every way whose write count crossed a threshold looks reasonable,
but on a set with a few heavily written blocks it just moves the hot blocks
to other ways. Next interval those ways are hot, the old ones cold, and the
mask flips back and forth.
"""
from wearlevel import CacheConfig, WorkloadSpec, generate, run

cfg = CacheConfig(interval_cycles=1000)
target = 5
trace = generate(WorkloadSpec("hot_set", 12 * cfg.interval_cycles - 1, seed=21, target_set=target), cfg)
report = run(trace, cfg, "threshold")

# %%
# Blocked ways of the target set, one line per interval.
for i, masks in enumerate(report.block_mask_series):
    print(f"interval {i:2d}: blocked {masks.get(target, [])}")

# %%
# Same trace under the feedback policy. Set 5 is not sampled, so it keeps no
# counters; its ways are only blocked lazily for IPs whose PC value went
# negative in sampled sets, and nothing here trains them.
proposed = run(trace, cfg, "proposed")
for i, masks in enumerate(proposed.block_mask_series):
    print(f"interval {i:2d}: blocked {masks.get(target, [])}")

# %%
print("lifetime wear of the target set")
print("threshold:", report.wear_map[target])
print("proposed: ", proposed.wear_map[target])
