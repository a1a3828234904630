"""Cache and policy parameters shared by every part of the simulator."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


class ConfigError(ValueError):
    """Raised for an invalid parameter combination."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CacheConfig:
    """Geometry, wear-policy knobs and latencies of the modelled LLC.

    Defaults follow the reference LLC: 2048 sets of 16 ways, a write
    threshold of 29 and 32 sampled sets (``sample_bits=6``).
    """

    num_sets: int = 2048
    num_ways: int = 16
    block_size_bytes: int = 64
    threshold: int = 29
    interval_cycles: int = 10_000
    history_depth: int = 8
    sample_bits: int = 6
    pc_limit: int = 16
    hit_latency_cycles: int = 20
    miss_latency_cycles: int = 200
    # "linear" weights the i-th oldest variance by i; "uniform" is a plain mean.
    recency_weighting: str = "linear"
    # False: lower-or-equal variance decrements the PC value (pushes toward
    # blocking). True flips the direction of every feedback step.
    invert_feedback: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("num_sets", "num_ways", "block_size_bytes"):
            v = getattr(self, name)
            if not isinstance(v, int) or not _is_pow2(v):
                raise ConfigError(f"{name} must be a power of two, got {v!r}")
        if self.sample_bits < 0:
            raise ConfigError("sample_bits must be >= 0")
        if self.num_sets < (1 << self.sample_bits):
            raise ConfigError(
                f"num_sets={self.num_sets} is smaller than 2**sample_bits={1 << self.sample_bits}"
            )
        for name in ("threshold", "interval_cycles", "history_depth", "pc_limit"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.hit_latency_cycles < 0:
            raise ConfigError("hit_latency_cycles must be >= 0")
        if self.miss_latency_cycles <= self.hit_latency_cycles:
            raise ConfigError("miss_latency_cycles must exceed hit_latency_cycles")
        if self.recency_weighting not in ("linear", "uniform"):
            raise ConfigError(f"unknown recency_weighting {self.recency_weighting!r}")

    @property
    def set_bits(self) -> int:
        return self.num_sets.bit_length() - 1

    @property
    def offset_bits(self) -> int:
        return self.block_size_bytes.bit_length() - 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CacheConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def with_(self, **changes) -> "CacheConfig":
        return replace(self, **changes)
