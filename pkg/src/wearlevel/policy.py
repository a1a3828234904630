"""Wear-leveling policies: no blocking, threshold-only blocking, and the
sampled-set / PC-table feedback policy.

All three expose the same hooks to the engine:

``record_wear_event(set_index, way, ip)``
    called for every physical write to a cell.
``write_blocked(set_index, ip)``
    asked on a write miss; True means the default victim must be skipped.
``on_interval_boundary()``
    returns the block masks that hold for the next interval.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .config import CacheConfig

Mask = frozenset


def is_sampled_set(set_index: int, cfg: CacheConfig) -> bool:
    """True when the top ``sample_bits`` bits of the index equal the bottom ones."""
    low = (1 << cfg.sample_bits) - 1
    return ((set_index >> (cfg.set_bits - cfg.sample_bits)) & low) == (set_index & low)


def sampled_sets(cfg: CacheConfig) -> list[int]:
    # same predicate as is_sampled_set, inlined: this runs over every set
    low = (1 << cfg.sample_bits) - 1
    shift = cfg.set_bits - cfg.sample_bits
    return [s for s in range(cfg.num_sets) if (s >> shift) & low == s & low]


def population_variance(counts: Sequence[float]) -> float:
    """Population variance (divisor n).

    Integer counts take an exact route, (n*sum(c^2) - sum(c)^2) / n^2, with a
    single correctly rounded division at the end.
    """
    n = len(counts)
    if n == 0:
        raise ValueError("variance of an empty sequence")
    if all(type(c) is int for c in counts):
        s1 = sum(counts)
        s2 = sum(c * c for c in counts)
        return (n * s2 - s1 * s1) / (n * n)
    mean = math.fsum(counts) / n
    return math.fsum((c - mean) ** 2 for c in counts) / n


def weighted_mean(history: Sequence[float], weighting: str = "linear") -> float:
    """Recency-weighted mean of a chronological history (oldest first)."""
    m = len(history)
    if m == 0:
        raise ValueError("weighted mean of an empty history")
    if weighting == "uniform":
        return math.fsum(history) / m
    num = math.fsum(i * v for i, v in enumerate(history, start=1))
    return num / (m * (m + 1) // 2)


def derive_sampled_block_mask(prev_counts: Sequence[int], cfg: CacheConfig) -> Mask:
    """Block every way whose last-interval count reached the threshold,
    keeping the coldest way open if that would block them all."""
    blocked = [w for w, c in enumerate(prev_counts) if c >= cfg.threshold]
    if len(blocked) == len(prev_counts):
        coldest = min(range(len(prev_counts)), key=lambda w: (prev_counts[w], w))
        blocked.remove(coldest)
    return frozenset(blocked)


class IntervalCounters:
    """Per-way write counts and last-writer IPs for a fixed group of sets."""

    def __init__(self, sets: Iterable[int], num_ways: int):
        self.num_ways = num_ways
        self.counts: dict[int, list[int]] = {s: [0] * num_ways for s in sets}
        self.last_ip: dict[int, list[Optional[int]]] = {s: [None] * num_ways for s in self.counts}

    def record(self, set_index: int, way: int, ip: int) -> None:
        self.counts[set_index][way] += 1
        self.last_ip[set_index][way] = ip

    def snapshot(self, set_index: int) -> tuple[tuple[int, Optional[int]], ...]:
        return tuple(zip(self.counts[set_index], self.last_ip[set_index]))

    def reset(self) -> None:
        for s in self.counts:
            self.counts[s] = [0] * self.num_ways
            self.last_ip[s] = [None] * self.num_ways


class HistoryStore:
    """Last ``depth`` interval snapshots per set, oldest first."""

    def __init__(self, sets: Iterable[int], depth: int):
        self.depth = depth
        self.rings: dict[int, deque] = {s: deque(maxlen=depth) for s in sets}

    def push(self, counters: IntervalCounters) -> None:
        for s, ring in self.rings.items():
            ring.append(counters.snapshot(s))

    def __getitem__(self, set_index: int) -> list:
        return list(self.rings[set_index])


@dataclass
class PcEntry:
    value: int = 0
    variance_history: deque = field(default_factory=deque)


class PcTable:
    """Signed saturating value per instruction pointer.

    Absent IPs read as value 0 with no history; entries are created on first
    training only.
    """

    def __init__(self, limit: int, depth: int):
        self.limit = limit
        self.depth = depth
        self.entries: dict[int, PcEntry] = {}

    def value(self, ip: int) -> int:
        e = self.entries.get(ip)
        return 0 if e is None else e.value

    def entry(self, ip: int) -> PcEntry:
        e = self.entries.get(ip)
        if e is None:
            e = self.entries[ip] = PcEntry(variance_history=deque(maxlen=self.depth))
        return e

    def nudge(self, ip: int, step: int) -> None:
        e = self.entry(ip)
        e.value = max(-self.limit, min(self.limit, e.value + step))

    def __contains__(self, ip: int) -> bool:
        return ip in self.entries


def unsampled_write_blocked(ip: int, pc: PcTable) -> bool:
    return pc.value(ip) < 0


def apply_feedback(
    pending: list[tuple[int, int]],
    counters: IntervalCounters,
    pc: PcTable,
    cfg: CacheConfig,
) -> None:
    """Train every IP that caused a block last boundary, then clear ``pending``.

    The set's variance in the interval that just ended is compared with the
    IP's recency-weighted variance history (which already includes it). Not
    above the mean counts as a positive impact and moves the value toward the
    blocking region (negative).
    """
    step_on_good = 1 if cfg.invert_feedback else -1
    for ip, s in pending:
        v_now = population_variance(counters.counts[s])
        e = pc.entry(ip)
        e.variance_history.append(v_now)
        wm = weighted_mean(e.variance_history, cfg.recency_weighting)
        pc.nudge(ip, step_on_good if v_now <= wm else -step_on_good)
    pending.clear()


class WearPolicy:
    """Base policy: never blocks anything."""

    name = "none"

    def __init__(self, cfg: CacheConfig):
        self.cfg = cfg

    @property
    def sampled_set_count(self) -> int:
        return 0

    def record_wear_event(self, set_index: int, way: int, ip: int) -> None:
        pass

    def write_blocked(self, set_index: int, ip: int) -> bool:
        return False

    def on_interval_boundary(self) -> dict[int, Mask]:
        return {}


NoBlockingPolicy = WearPolicy


class ThresholdPolicy(WearPolicy):
    """Counters on every set; block any way that hit the threshold last interval."""

    name = "threshold"

    def __init__(self, cfg: CacheConfig):
        super().__init__(cfg)
        # sparse: only sets written this interval
        self.counts: dict[int, list[int]] = {}

    def record_wear_event(self, set_index, way, ip):
        row = self.counts.get(set_index)
        if row is None:
            row = self.counts[set_index] = [0] * self.cfg.num_ways
        row[way] += 1

    def on_interval_boundary(self):
        masks = {}
        for s in sorted(self.counts):
            m = derive_sampled_block_mask(self.counts[s], self.cfg)
            if m:
                masks[s] = m
        self.counts = {}
        return masks


class SampledFeedbackPolicy(WearPolicy):
    """Threshold blocking on sampled sets, PC-table blocking everywhere else.

    Each block applied in a sampled set is charged to the IP that last wrote
    the way. One interval later that set's write variance decides whether the
    IP's PC value moves toward blocking (negative) or away from it. Writes
    that miss in an unsampled set are redirected when their IP's value is
    negative.
    """

    name = "proposed"

    def __init__(self, cfg: CacheConfig):
        super().__init__(cfg)
        self.sampled = sampled_sets(cfg)
        self._is_sampled = [False] * cfg.num_sets
        for s in self.sampled:
            self._is_sampled[s] = True
        self.counters = IntervalCounters(self.sampled, cfg.num_ways)
        self.history = HistoryStore(self.sampled, cfg.history_depth)
        self.pc = PcTable(cfg.pc_limit, cfg.history_depth)
        self.pending: list[tuple[int, int]] = []
        self.masks: dict[int, Mask] = {}

    @property
    def sampled_set_count(self):
        return len(self.sampled)

    def is_sampled(self, set_index: int) -> bool:
        return self._is_sampled[set_index]

    def record_wear_event(self, set_index, way, ip):
        if self._is_sampled[set_index]:
            self.counters.record(set_index, way, ip)

    def write_blocked(self, set_index, ip):
        if self._is_sampled[set_index]:
            return False
        return unsampled_write_blocked(ip, self.pc)

    def on_block_applied(self, ip: int, set_index: int) -> None:
        self.pending.append((ip, set_index))

    def on_interval_boundary(self):
        apply_feedback(self.pending, self.counters, self.pc, self.cfg)
        self.history.push(self.counters)
        masks = {}
        for s in self.sampled:
            m = derive_sampled_block_mask(self.counters.counts[s], self.cfg)
            if m:
                masks[s] = m
                last = self.counters.last_ip[s]
                for w in sorted(m):
                    self.on_block_applied(last[w], s)
        self.counters.reset()
        self.masks = masks
        return masks


POLICIES = {
    "none": WearPolicy,
    "threshold": ThresholdPolicy,
    "proposed": SampledFeedbackPolicy,
}


def make_policy(name: str, cfg: CacheConfig) -> WearPolicy:
    try:
        return POLICIES[name](cfg)
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; expected one of {sorted(POLICIES)}") from None
