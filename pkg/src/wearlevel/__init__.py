"""Trace-driven LLC simulator for intra-set wear leveling of NVM caches."""

from .cache import (
    AddressParts,
    Cache,
    CorruptCacheState,
    LineState,
    decode_address,
    fill_line,
    lookup,
    on_hit_update,
    peek_victim,
    recompose_address,
    srrip_victim,
)
from .config import CacheConfig, ConfigError
from .engine import Simulator, run
from .metrics import MetricsReport, coefficient_of_variation, ipc_proxy
from .policy import (
    HistoryStore,
    IntervalCounters,
    PcTable,
    SampledFeedbackPolicy,
    ThresholdPolicy,
    WearPolicy,
    apply_feedback,
    derive_sampled_block_mask,
    is_sampled_set,
    make_policy,
    population_variance,
    sampled_sets,
    unsampled_write_blocked,
    weighted_mean,
)
from .trace import AccessRecord, TraceFormatError, read_trace, write_trace
from .tracegen import Trace, WorkloadError, WorkloadSpec, generate

__version__ = "0.1.0"
