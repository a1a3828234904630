"""Trace-driven simulation loop.

Wear events are physical writes to a cell: fills on any miss, write hits, and
the re-allocation of a write that hit a blocked way. Reads that hit do not
wear anything.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

from .cache import Cache, fill_line, peek_victim, srrip_victim
from .config import CacheConfig
from .metrics import MetricsReport, coefficient_of_variation, ipc_proxy
from .policy import WearPolicy, make_policy, population_variance, sampled_sets
from .trace import AccessRecord, TraceFormatError, read_trace


class Simulator:
    def __init__(self, cfg: CacheConfig, policy: Union[str, WearPolicy] = "proposed"):
        cfg.validate()
        self.cfg = cfg
        self.policy = make_policy(policy, cfg) if isinstance(policy, str) else policy
        self.cache = Cache(cfg)
        self.report = MetricsReport(policy=self.policy.name, config=cfg.to_dict())
        self.report.sampled_set_count = len(sampled_sets(cfg))

        n = cfg.num_sets * cfg.num_ways
        self.wear = [0] * n
        self.sampled = sampled_sets(cfg)
        self._is_sampled = [False] * cfg.num_sets
        for s in self.sampled:
            self._is_sampled[s] = True
        # metrics-side interval counts, kept regardless of policy
        self._interval_counts = {s: [0] * cfg.num_ways for s in self.sampled}
        # set -> ways blocked for the current interval
        self._blocked: dict[int, set[int]] = {}
        self._ip_hist: dict[int, list[int]] = {}

        self.interval = 0
        self.next_boundary = cfg.interval_cycles
        self.last_cycle = 0
        self.index = 0
        self.report.block_mask_series.append({})
        self._finished = False

    # -- blocking ---------------------------------------------------------

    def _set_masks(self, masks) -> None:
        sets = self.cache.sets
        for s, ways in self._blocked.items():
            lines = sets[s]
            for w in ways:
                lines[w].blocked = False
        self._blocked = {}
        for s, ways in masks.items():
            if not ways:
                continue
            self._blocked[s] = set(ways)
            lines = sets[s]
            for w in ways:
                lines[w].blocked = True

    def block_way(self, set_index: int, way: int) -> None:
        """Block a way until the next interval boundary."""
        self._blocked.setdefault(set_index, set()).add(way)
        self.cache.sets[set_index][way].blocked = True
        self.report.block_mask_series[-1].setdefault(set_index, [])
        ways = self.report.block_mask_series[-1][set_index]
        if way not in ways:
            ways.append(way)
            ways.sort()

    # -- per-access -------------------------------------------------------

    def _wear(self, s: int, way: int, ip: int, blocked) -> None:
        self.wear[s * self.cfg.num_ways + way] += 1
        self.report.wear_events += 1
        self.cache.sets[s][way].last_writer_ip = ip
        self.policy.record_wear_event(s, way, ip)
        if self._is_sampled[s]:
            self._interval_counts[s][way] += 1
            if blocked and way in blocked and len(blocked) < self.cfg.num_ways:
                self.report.blocked_wear_violations += 1

    def _allocate(self, s: int, lines, block: int, tag: int, ip: int, blocked) -> int:
        r = self.report
        if blocked:
            if len(blocked) >= self.cfg.num_ways:
                r.all_blocked_fallbacks += 1
            way = srrip_victim(lines, blocked)
        else:
            way = srrip_victim(lines)
        line = lines[way]
        where = self.cache.where
        if line.valid:
            del where[(line.tag << self.cfg.set_bits) | s]
        fill_line(line, tag, ip)
        where[block] = way
        self._wear(s, way, ip, blocked)
        return way

    def process_access(self, rec: AccessRecord) -> None:
        cycle, ip, addr, kind = rec
        if cycle < self.last_cycle:
            raise TraceFormatError(
                f"cycle {cycle} precedes previous cycle {self.last_cycle}", self.index
            )
        self.index += 1
        self.advance_to(cycle)

        cfg = self.cfg
        r = self.report
        block = addr >> cfg.offset_bits
        s = block & (cfg.num_sets - 1)
        tag = block >> cfg.set_bits
        lines = self.cache.sets[s]
        way = self.cache.where.get(block)
        blocked = self._blocked.get(s)

        r.accesses += 1
        h = self._ip_hist.get(ip)
        if h is None:
            h = self._ip_hist[ip] = [0, 0]
        h[0 if self._is_sampled[s] else 1] += 1

        if kind == "R":
            if way is not None:
                r.hits += 1
                lines[way].rrpv = 0
            else:
                r.misses += 1
                self._allocate(s, lines, block, tag, ip, blocked)
            return

        r.writes += 1
        if way is not None:
            r.hits += 1
            if blocked and way in blocked:
                # treated like a write miss: drop the stale copy, re-allocate elsewhere
                r.blocked_hit_conversions += 1
                r.redirected_writes += 1
                lines[way].valid = False
                del self.cache.where[block]
                self._allocate(s, lines, block, tag, ip, blocked)
            else:
                lines[way].rrpv = 0
                self._wear(s, way, ip, blocked)
            return

        r.misses += 1
        if self.policy.write_blocked(s, ip):
            default = peek_victim(lines, blocked or ())
            self.block_way(s, default)
            blocked = self._blocked[s]
            if self._allocate(s, lines, block, tag, ip, blocked) != default:
                r.redirected_writes += 1
        else:
            self._allocate(s, lines, block, tag, ip, blocked)

    # -- intervals --------------------------------------------------------

    def advance_to(self, cycle: int) -> int:
        """Fire every interval boundary at or before ``cycle``; returns how many fired."""
        if cycle < self.last_cycle:
            raise ValueError(f"cannot move time back from {self.last_cycle} to {cycle}")
        self.last_cycle = cycle
        fired = 0
        while cycle >= self.next_boundary:
            self._boundary()
            self.next_boundary += self.cfg.interval_cycles
            fired += 1
        return fired

    def _boundary(self) -> None:
        masks = self.policy.on_interval_boundary()
        series = self.report.intra_set_variance_series
        for s in self.sampled:
            counts = self._interval_counts[s]
            series.append([self.interval, s, population_variance(counts)])
            self._interval_counts[s] = [0] * self.cfg.num_ways
        self.interval += 1
        self._set_masks(masks)
        self.report.block_mask_series.append({s: sorted(m) for s, m in masks.items()})

    def feed(self, records: Iterable[AccessRecord]) -> "Simulator":
        for rec in records:
            self.process_access(rec)
        return self

    def finish(self) -> MetricsReport:
        """Flush the last partial interval and fill in derived metrics."""
        if self._finished:
            return self.report
        self._boundary()
        self._finished = True
        # the mask entry opened by the flush has no interval behind it
        self.report.block_mask_series.pop()
        r = self.report
        cfg = self.cfg
        r.intervals = self.interval
        r.last_cycle = self.last_cycle
        r.miss_ratio = r.misses / r.accesses if r.accesses else 0.0
        r.ipc_proxy = ipc_proxy(r.accesses, r.hits, r.misses, self.last_cycle,
                                cfg.hit_latency_cycles, cfg.miss_latency_cycles)
        W = cfg.num_ways
        r.wear_map = [self.wear[i:i + W] for i in range(0, len(self.wear), W)]
        r.global_wear_cov = coefficient_of_variation(self.wear)
        series = r.intra_set_variance_series
        r.mean_intra_set_variance = (
            sum(row[2] for row in series) / len(series) if series else 0.0
        )
        r.sampled_wear_variance = (
            sum(population_variance(r.wear_map[s]) for s in self.sampled) / len(self.sampled)
        )
        r.ip_access_histogram = {
            f"{ip:#x}": list(v) for ip, v in sorted(self._ip_hist.items())
        }
        return r


def run(trace: Union[str, Path, Iterable[AccessRecord]], cfg: CacheConfig,
        policy: Union[str, WearPolicy] = "proposed") -> MetricsReport:
    """Simulate a whole trace (path or iterable of records) and return its report."""
    cfg.validate()
    sim = Simulator(cfg, policy)
    if isinstance(trace, (str, Path)):
        trace = read_trace(trace)
    sim.feed(trace)
    return sim.finish()
