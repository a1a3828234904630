"""Run results and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np


def ipc_proxy(accesses: int, hits: int, misses: int, last_cycle: int,
              hit_latency: int, miss_latency: int) -> float:
    """Accesses per latency-weighted cycle. Only meaningful between runs on the same trace."""
    if accesses == 0:
        return 0.0
    denom = max(1, last_cycle + hits * hit_latency + misses * miss_latency)
    return accesses / denom


def coefficient_of_variation(values) -> float:
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        return 0.0
    mean = a.mean()
    if mean == 0:
        return 0.0
    return float(a.std() / mean)


@dataclass
class MetricsReport:
    policy: str
    accesses: int = 0
    hits: int = 0
    misses: int = 0
    writes: int = 0
    wear_events: int = 0
    redirected_writes: int = 0
    blocked_hit_conversions: int = 0
    # victim picks where every way of the set was blocked
    all_blocked_fallbacks: int = 0
    # wear landing on a blocked way of a sampled set outside the fallback
    blocked_wear_violations: int = 0
    miss_ratio: float = 0.0
    ipc_proxy: float = 0.0
    last_cycle: int = 0
    intervals: int = 0
    sampled_set_count: int = 0
    global_wear_cov: float = 0.0
    mean_intra_set_variance: float = 0.0
    # mean over sampled sets of the variance of lifetime per-way wear
    sampled_wear_variance: float = 0.0
    wear_map: list = field(default_factory=list)
    # rows of [interval, set, variance]
    intra_set_variance_series: list = field(default_factory=list)
    # per interval: {set: [blocked ways]} for the masks in force during it
    block_mask_series: list = field(default_factory=list)
    # "0x..." -> [sampled-set accesses, unsampled-set accesses]
    ip_access_histogram: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["block_mask_series"] = [
            {str(s): ways for s, ways in sorted(m.items())} for m in self.block_mask_series
        ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def variance_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["interval", "set", "variance"])
        for row in self.intra_set_variance_series:
            w.writerow([row[0], row[1], repr(float(row[2]))])
        return buf.getvalue()

    def wear_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "way", "wear"])
        for s, row in enumerate(self.wear_map):
            for way, n in enumerate(row):
                w.writerow([s, way, n])
        return buf.getvalue()

    def summary(self) -> str:
        return (
            f"policy={self.policy} miss_ratio={self.miss_ratio:.6f} "
            f"ipc_proxy={self.ipc_proxy:.6f} global_wear_cov={self.global_wear_cov:.6f}"
        )
