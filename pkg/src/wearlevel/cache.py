"""Set-associative LLC array with SRRIP replacement that honours per-way block masks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, NamedTuple, Optional, Sequence

from .config import CacheConfig

RRPV_MAX = 3
RRPV_INSERT = 2


class CorruptCacheState(RuntimeError):
    """A set holds two valid copies of the same tag."""


@dataclass(slots=True)
class LineState:
    valid: bool = False
    tag: int = 0
    rrpv: int = RRPV_MAX
    last_writer_ip: Optional[int] = None
    blocked: bool = False


class AddressParts(NamedTuple):
    tag: int
    set_index: int


def decode_address(addr: int, cfg: CacheConfig) -> AddressParts:
    block = addr >> cfg.offset_bits
    return AddressParts(block >> cfg.set_bits, block & (cfg.num_sets - 1))


def recompose_address(parts: AddressParts, cfg: CacheConfig, offset: int = 0) -> int:
    return (((parts.tag << cfg.set_bits) | parts.set_index) << cfg.offset_bits) | offset


def lookup(lines: Sequence[LineState], tag: int) -> Optional[int]:
    """Way holding a valid copy of ``tag``, or None.

    Blocking is deliberately ignored here: a read that hits a blocked way is
    still a hit.
    """
    found = None
    for way, line in enumerate(lines):
        if line.valid and line.tag == tag:
            if found is not None:
                raise CorruptCacheState(f"tag {tag:#x} valid in ways {found} and {way}")
            found = way
    return found


def _candidates(n: int, blocked: Collection[int]) -> list[int]:
    if blocked:
        cands = [w for w in range(n) if w not in blocked]
        if cands:
            return cands
    return list(range(n))


def peek_victim(lines: Sequence[LineState], blocked: Collection[int] = ()) -> int:
    """The way :func:`srrip_victim` would pick, without aging anything."""
    cands = _candidates(len(lines), blocked)
    best, best_rrpv = cands[0], -1
    for w in cands:
        line = lines[w]
        if not line.valid:
            return w
        if line.rrpv > best_rrpv:
            best, best_rrpv = w, line.rrpv
    return best


def srrip_victim(lines: Sequence[LineState], blocked: Collection[int] = ()) -> int:
    """Pick a victim way, never one in ``blocked`` unless every way is blocked.

    Invalid candidates win first (lowest index). Otherwise the lowest-indexed
    candidate at RRPV 3 is chosen, aging all candidates until one gets there.
    Ways outside the candidate pool keep their RRPV.
    """
    cands = _candidates(len(lines), blocked)
    top = -1
    for w in cands:
        line = lines[w]
        if not line.valid:
            return w
        if line.rrpv > top:
            top = line.rrpv
    # k aging rounds == adding k to every candidate; nobody overshoots 3
    # because the maximum lands exactly on 3.
    bump = RRPV_MAX - top
    victim = None
    for w in cands:
        line = lines[w]
        if bump:
            line.rrpv += bump
        if victim is None and line.rrpv == RRPV_MAX:
            victim = w
    return victim


def on_hit_update(line: LineState) -> LineState:
    line.rrpv = 0
    return line


def fill_line(line: LineState, tag: int, ip: int) -> LineState:
    line.valid = True
    line.tag = tag
    line.rrpv = RRPV_INSERT
    line.last_writer_ip = ip
    return line


class Cache:
    """The LLC array plus a block -> way index for O(1) lookups."""

    def __init__(self, cfg: CacheConfig):
        self.cfg = cfg
        self.sets: list[list[LineState]] = [
            [LineState() for _ in range(cfg.num_ways)] for _ in range(cfg.num_sets)
        ]
        # block number (addr >> offset_bits) -> way
        self.where: dict[int, int] = {}

    def lookup(self, set_index: int, tag: int) -> Optional[int]:
        return self.where.get((tag << self.cfg.set_bits) | set_index)

    def blocked_ways(self, set_index: int) -> frozenset[int]:
        return frozenset(w for w, l in enumerate(self.sets[set_index]) if l.blocked)

    def check_integrity(self) -> None:
        """Full scan: no duplicate tags per set, and the index agrees with the array."""
        seen = 0
        for s, lines in enumerate(self.sets):
            tags = set()
            for w, line in enumerate(lines):
                if not line.valid:
                    continue
                if line.tag in tags:
                    raise CorruptCacheState(f"duplicate tag {line.tag:#x} in set {s}")
                tags.add(line.tag)
                block = (line.tag << self.cfg.set_bits) | s
                if self.where.get(block) != w:
                    raise CorruptCacheState(f"index out of sync for set {s} way {w}")
                seen += 1
        if seen != len(self.where):
            raise CorruptCacheState("index holds entries for lines that are not valid")
