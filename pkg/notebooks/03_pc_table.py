# %%
"""
Learning which instruction pointers to block
============================================

Each block applied in a sampled set is blamed on the IP that last wrote the
way. At the next boundary the set's variance is compared with the
recency-weighted mean of that IP's past variances. If it did not go up, the
IP's PC value is pushed toward the blocking region (negative).
"""
from wearlevel import AccessRecord, CacheConfig, Simulator, weighted_mean

cfg = CacheConfig(interval_cycles=1000)
hot_ip, quiet_ip = 0x401000, 0x402000


def addr(tag, set_index):
    return (tag * cfg.num_sets + set_index) * cfg.block_size_bytes


# %%
# The hot IP hammers one block of sampled set 0; the quiet IP writes eight
# blocks once or twice each, so it never crosses the threshold.
trace = []
for i in range(6):
    base = i * cfg.interval_cycles + 1
    for j in range(40):
        trace.append(AccessRecord(base + 2 * j, hot_ip, addr(1, 0), "W"))
        trace.append(AccessRecord(base + 2 * j + 1, quiet_ip, addr(10 + j % 8, 0), "W"))

sim = Simulator(cfg, "proposed")
pos = 0
for b in range(1, 6):
    edge = b * cfg.interval_cycles
    while pos < len(trace) and trace[pos].cycle < edge:
        sim.process_access(trace[pos])
        pos += 1
    sim.advance_to(edge)
    e = sim.policy.pc.entry(hot_ip)
    print(f"boundary {b}: hot IP value {sim.policy.pc.value(hot_ip):+d}, "
          f"variance history {[round(v, 1) for v in e.variance_history]}")

print("quiet IP value:", sim.policy.pc.value(quiet_ip))

# %%
# The weighted mean favours recent measurements linearly.
print(weighted_mean([10.0, 10.0, 40.0]))   # (10 + 20 + 120) / 6 = 25
print(weighted_mean([10.0, 10.0, 40.0], "uniform"))
