# %%
"""
Which sets are sampled
======================

Only a handful of LLC sets keep per-way write counters. A set is sampled when
the top ``sample_bits`` bits of its index equal the bottom ``sample_bits``
bits, which spreads the sample evenly over the index space.
"""
import timeit

from wearlevel import CacheConfig, is_sampled_set, sampled_sets

cfg = CacheConfig()  # 2048 sets, 16 ways, sample_bits=6
sets = sampled_sets(cfg)
print(len(sets), "sampled sets out of", cfg.num_sets)
print(sets[:8], "...", sets[-2:])

# %%
# The pattern in binary: 11 index bits, top 6 mirror the bottom 6.
for s in sets[:4]:
    print(f"{s:5d}  {s:011b}")

# %%
# Enumeration is cheap enough to redo whenever the geometry changes.
t = min(timeit.repeat(lambda: sampled_sets(cfg), number=1, repeat=20))
print(f"enumeration: {t * 1e3:.3f} ms")

# %%
# Smaller geometries: with 64 sets and 3 sample bits, 8 sets are sampled.
small = CacheConfig(num_sets=64, sample_bits=3)
print(sampled_sets(small))
print(all(is_sampled_set(s, small) for s in sampled_sets(small)))
