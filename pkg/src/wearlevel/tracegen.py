"""Deterministic synthetic LLC traces.

Randomness comes from numpy's Philox-4x64 counter-based generator keyed by
the workload seed. Each independent decision (addresses, instruction
pointers, read/write kinds) draws from its own stream, obtained with
``Philox(key=seed).jumped(n)`` for a fixed stream number ``n``, so one
stream's consumption never shifts another's.

Workload kinds
--------------
hot_way
    Writes from a single IP to a small window of blocks in ``target_set``.
    The window slides by one block every ``rotate_every`` records, so a
    handful of ways soak up nearly all the wear.
hot_set
    Writes spread uniformly over ``hot_blocks`` blocks of ``target_set``.
zipf_mixed
    Zipf(s) popularity over ``num_sets * num_ways * 4`` blocks covering all
    sets (popularity ranks are shuffled over the block universe). IPs come
    from ``hot_ip_count`` heavy hitters or a tail of cold IPs; each record is
    a write with probability ``write_fraction``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Iterator, Optional

import numpy as np

from .config import CacheConfig
from .trace import AccessRecord

KINDS = ("hot_way", "hot_set", "zipf_mixed")

IP_BASE = 0x400000
IP_STRIDE = 0x40
COLD_IP_COUNT = 256
# share of records issued by the heavy-hitter IPs in zipf_mixed
HOT_IP_SHARE = 0.75
UNIVERSE_FACTOR = 4

_STREAM_ADDR, _STREAM_IP, _STREAM_KIND, _STREAM_PERM = 1, 2, 3, 4


class WorkloadError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    num_records: int
    seed: int = 0
    zipf_s: float = 1.0
    hot_ip_count: int = 4
    write_fraction: float = 0.5
    target_set: Optional[int] = None
    cycle_stride: int = 1
    hot_blocks: Optional[int] = None
    rotate_every: int = 1000

    def validate(self, cfg: CacheConfig) -> None:
        if self.kind not in KINDS:
            raise WorkloadError(f"unknown workload kind {self.kind!r}; expected one of {KINDS}")
        if self.num_records < 1:
            raise WorkloadError("num_records must be >= 1")
        if not 0.0 <= self.write_fraction <= 1.0:
            raise WorkloadError("write_fraction must lie in [0, 1]")
        if self.kind == "zipf_mixed" and not self.zipf_s > 0:
            raise WorkloadError("zipf_s must be > 0")
        if self.hot_ip_count < 1:
            raise WorkloadError("hot_ip_count must be >= 1")
        if self.cycle_stride < 1:
            raise WorkloadError("cycle_stride must be >= 1")
        if self.target_set is not None and not 0 <= self.target_set < cfg.num_sets:
            raise WorkloadError(f"target_set {self.target_set} outside [0, {cfg.num_sets})")
        if self.hot_blocks is not None and self.hot_blocks < 1:
            raise WorkloadError("hot_blocks must be >= 1")
        if self.rotate_every < 1:
            raise WorkloadError("rotate_every must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise WorkloadError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "WorkloadSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise WorkloadError(f"unknown workload keys: {sorted(unknown)}")
        return cls(**data)


def stream(seed: int, n: int) -> np.random.Generator:
    """Independent Philox stream number ``n`` for ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(n))


def zipf_ranks(rng: np.random.Generator, universe: int, s: float, size: int) -> np.ndarray:
    """Ranks in [0, universe) with P(r) proportional to (r + 1) ** -s."""
    w = np.arange(1, universe + 1, dtype=np.float64) ** -s
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    u = rng.random(size)
    return np.minimum(np.searchsorted(cdf, u, side="right"), universe - 1)


@dataclass
class Trace:
    """Column-oriented trace; iterating yields :class:`AccessRecord`."""

    cycles: np.ndarray
    ips: np.ndarray
    addrs: np.ndarray
    writes: np.ndarray

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self) -> Iterator[AccessRecord]:
        kinds = np.where(self.writes, "W", "R").tolist()
        return map(AccessRecord._make,
                   zip(self.cycles.tolist(), self.ips.tolist(), self.addrs.tolist(), kinds))


def _block_addr(tags: np.ndarray, set_index, cfg: CacheConfig) -> np.ndarray:
    blocks = (tags.astype(np.uint64) << np.uint64(cfg.set_bits)) | np.uint64(set_index)
    return blocks << np.uint64(cfg.offset_bits)


def generate(spec: WorkloadSpec, cfg: CacheConfig) -> Trace:
    spec.validate(cfg)
    n = spec.num_records
    cycles = (np.arange(1, n + 1, dtype=np.uint64) * np.uint64(spec.cycle_stride))
    target = 0 if spec.target_set is None else spec.target_set
    hot_ips = IP_BASE + IP_STRIDE * np.arange(spec.hot_ip_count, dtype=np.uint64)

    if spec.kind == "hot_way":
        window = spec.hot_blocks or 2
        offset = stream(spec.seed, _STREAM_ADDR).integers(0, window, size=n)
        tags = np.arange(n, dtype=np.uint64) // np.uint64(spec.rotate_every) + offset.astype(np.uint64)
        addrs = _block_addr(tags, target, cfg)
        ips = np.full(n, hot_ips[0], dtype=np.uint64)
        writes = np.ones(n, dtype=bool)
    elif spec.kind == "hot_set":
        count = spec.hot_blocks or max(1, cfg.num_ways // 2)
        tags = stream(spec.seed, _STREAM_ADDR).integers(0, count, size=n).astype(np.uint64)
        addrs = _block_addr(tags, target, cfg)
        pick = stream(spec.seed, _STREAM_IP).integers(0, spec.hot_ip_count, size=n)
        ips = hot_ips[pick]
        writes = np.ones(n, dtype=bool)
    else:
        universe = cfg.num_sets * cfg.num_ways * UNIVERSE_FACTOR
        ranks = zipf_ranks(stream(spec.seed, _STREAM_ADDR), universe, spec.zipf_s, n)
        perm = stream(spec.seed, _STREAM_PERM).permutation(universe).astype(np.uint64)
        addrs = perm[ranks] << np.uint64(cfg.offset_bits)
        ip_rng = stream(spec.seed, _STREAM_IP)
        heavy = ip_rng.random(n) < HOT_IP_SHARE
        hot_pick = ip_rng.integers(0, spec.hot_ip_count, size=n)
        cold_pick = ip_rng.integers(0, COLD_IP_COUNT, size=n)
        cold_ips = IP_BASE + IP_STRIDE * (spec.hot_ip_count + np.arange(COLD_IP_COUNT, dtype=np.uint64))
        ips = np.where(heavy, hot_ips[hot_pick], cold_ips[cold_pick])
        writes = stream(spec.seed, _STREAM_KIND).random(n) < spec.write_fraction
    return Trace(cycles, ips.astype(np.uint64), addrs.astype(np.uint64), writes)
