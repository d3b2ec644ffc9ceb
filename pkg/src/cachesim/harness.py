"""Simulation runs, multi-policy comparisons and result serialisation."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernel
from .baselines import BASELINES
from .core import AccessOutcome, CacheConfig, ConfigError, SimStats
from .energy import EnergyParams, EnergyReport, derive_unit_costs, energy_report
from .lwrp import LwrpCache, LwrpVariantFlags, VictimBuffer
from .traces import Trace

POLICIES = ("fifo", "lru", "lfu", "mru", "lwrp")

CSV_COLUMNS = (
    "policy",
    "capacity",
    "buffer_capacity",
    "accesses",
    "hits",
    "partial_hits",
    "misses",
    "hit_ratio",
    "miss_ratio",
    "paper_energy_per_access",
    "extended_energy_per_access",
    "total_extended_energy",
    "total_time",
)


@dataclass(frozen=True)
class RunConfig:
    policy: str
    cache: CacheConfig
    energy: EnergyParams = field(default_factory=EnergyParams)
    time_params: Optional[EnergyParams] = None
    flags: LwrpVariantFlags = field(default_factory=LwrpVariantFlags)
    # None: on for lwrp, off for the baselines
    buffered: Optional[bool] = None
    log_victims: bool = False
    # None: use the hit unit cost derived from ``energy``
    per_hit_energy: Optional[float] = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; expected one of {', '.join(POLICIES)}")
        if self.per_hit_energy is not None and not self.per_hit_energy >= 0:
            raise ConfigError("per_hit_energy must be >= 0")

    @property
    def is_buffered(self) -> bool:
        return self.policy == "lwrp" if self.buffered is None else self.buffered

    @property
    def effective_buffer(self) -> int:
        return self.cache.buffer_capacity if self.is_buffered else 0

    @property
    def is_extension(self) -> bool:
        """Baselines running with a victim buffer are an ablation, not a classic policy."""
        return self.policy != "lwrp" and self.effective_buffer > 0

    @property
    def label(self) -> str:
        return f"{self.policy}+buffer" if self.is_extension else self.policy

    @property
    def hit_increment(self) -> float:
        if self.per_hit_energy is not None:
            return self.per_hit_energy
        return derive_unit_costs(self.energy).e_hit


@dataclass
class RunResult:
    config: RunConfig
    stats: SimStats
    energy: EnergyReport
    trace_checksum: str
    trace_source: str
    final_buffer: list[int]
    victim_log: Optional[list[int]] = None
    wall_time: float = 0.0

    def row(self) -> dict:
        hr, mr, _ = self.stats.ratios()
        return {
            "policy": self.config.label,
            "capacity": self.config.cache.capacity,
            "buffer_capacity": self.config.effective_buffer,
            "accesses": self.stats.accesses,
            "hits": self.stats.hits,
            "partial_hits": self.stats.partial_hits,
            "misses": self.stats.misses,
            "hit_ratio": hr,
            "miss_ratio": mr,
            "paper_energy_per_access": self.energy.paper_energy_per_access,
            "extended_energy_per_access": self.energy.extended_energy_per_access,
            "total_extended_energy": self.energy.total_extended_energy,
            "total_time": self.energy.total_time,
        }


def _run_kernel(trace: Trace, cfg: RunConfig):
    uniq, dense = np.unique(trace.blocks, return_inverse=True)
    counts, victims, bblk, bseq = kernel.run_trace(
        dense.astype(np.int64).ravel(),
        max(len(uniq), 1),
        kernel.POLICY_CODES[cfg.policy],
        cfg.cache.capacity,
        cfg.effective_buffer,
        float(cfg.hit_increment),
        cfg.flags.freeze_frequency,
        cfg.flags.freeze_delta,
        cfg.log_victims,
    )
    hits, partials, misses, evictions = (int(c) for c in counts)
    live = bblk >= 0
    final_buffer = uniq[bblk[live][np.argsort(bseq[live], kind="stable")]].tolist()
    log = uniq[victims].tolist() if cfg.log_victims else None
    stats = SimStats(len(trace), hits, partials, misses, evictions)
    return stats, final_buffer, log


def _run_reference(trace: Trace, cfg: RunConfig):
    buffer = VictimBuffer(cfg.effective_buffer)
    counts = {o: 0 for o in AccessOutcome}
    log: list[int] = []
    if cfg.policy == "lwrp":
        cache = LwrpCache(cfg.cache.capacity, cfg.flags)
        phe = cfg.hit_increment
        for j in trace:
            counts[cache.access(buffer, j, phe)] += 1
            if cache.last_victim is not None:
                log.append(cache.last_victim)
    else:
        policy = BASELINES[cfg.policy]()
        for seq, j in enumerate(trace, 1):
            if j in policy.meta:
                policy.on_hit(j, seq)
                counts[AccessOutcome.HIT] += 1
                continue
            if j in buffer:
                buffer.remove(j)
                counts[AccessOutcome.PARTIAL_HIT] += 1
            else:
                counts[AccessOutcome.MISS] += 1
            if len(policy.meta) >= cfg.cache.capacity:
                victim = policy.select_victim()
                policy.remove(victim)
                buffer.push(victim)
                log.append(victim)
            policy.on_insert(j, seq)
    stats = SimStats(
        len(trace),
        counts[AccessOutcome.HIT],
        counts[AccessOutcome.PARTIAL_HIT],
        counts[AccessOutcome.MISS],
        len(log),
    )
    return stats, buffer.contents(), (log if cfg.log_victims else None)


def simulate(trace: Trace, config: RunConfig, engine: str = "kernel") -> RunResult:
    """Run ``trace`` through one policy.

    ``engine="reference"`` uses the step-by-step Python engines; results
    are identical but much slower.
    """
    if not isinstance(config, RunConfig):
        raise ConfigError(f"expected RunConfig, got {type(config).__name__}")
    start = time.perf_counter()
    if engine == "kernel":
        stats, final_buffer, log = _run_kernel(trace, config)
    elif engine == "reference":
        stats, final_buffer, log = _run_reference(trace, config)
    else:
        raise ConfigError(f"unknown engine {engine!r}")
    report = energy_report(stats, config.energy, config.time_params)
    return RunResult(
        config=config,
        stats=stats,
        energy=report,
        trace_checksum=trace.checksum,
        trace_source=trace.source,
        final_buffer=final_buffer,
        victim_log=log,
        wall_time=time.perf_counter() - start,
    )


def compare(trace: Trace, configs: Sequence[RunConfig], engine: str = "kernel") -> list[RunResult]:
    """Run every config over the same trace, in order, each on a fresh engine."""
    if not configs:
        raise ConfigError("compare needs at least one configuration")
    results = []
    for i, cfg in enumerate(configs):
        try:
            results.append(simulate(trace, cfg, engine))
        except (ConfigError, ValueError) as e:
            label = getattr(cfg, "policy", cfg)
            raise ConfigError(f"config #{i} ({label}): {e}") from e
    assert len({r.trace_checksum for r in results}) == 1
    return results


def default_buffer(capacity: int) -> int:
    """Victim buffer size used when none is given: a quarter of the cache, at least one frame."""
    return max(capacity // 4, 1)


def sweep_configs(
    policies: Iterable[str],
    capacities: Iterable[int],
    buffers: Optional[Iterable[int]] = None,
    **kwargs,
) -> list[RunConfig]:
    """Cross product of policies, capacities and buffer sizes.

    Configs that end up identical (e.g. an unbuffered baseline at several
    buffer sizes) are kept once.
    """
    buffers = list(buffers) if buffers is not None else None
    out: list[RunConfig] = []
    seen = set()
    for cap in capacities:
        for policy in policies:
            for b in buffers if buffers is not None else [default_buffer(cap) if policy == "lwrp" else 0]:
                cfg = RunConfig(policy, CacheConfig(cap, b), **kwargs)
                key = (cfg.policy, cap, cfg.effective_buffer)
                if key not in seen:
                    seen.add(key)
                    out.append(cfg)
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_results(results: Sequence[RunResult], fmt: str = "csv") -> str:
    """Serialise results.

    CSV has a fixed column set and is byte-stable for identical inputs.
    JSON adds provenance and ``wall_time``, which naturally varies.
    """
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in results:
            row = r.row()
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        docs = []
        for r in results:
            d = r.row()
            cfg = r.config
            d.update(
                evictions=r.stats.evictions,
                partial_ratio=r.stats.partial_ratio,
                buffered=cfg.is_buffered,
                extension=cfg.is_extension,
                freeze_frequency=cfg.flags.freeze_frequency,
                freeze_delta=cfg.flags.freeze_delta,
                per_hit_energy=cfg.hit_increment,
                empty_trace=r.stats.accesses == 0,
                trace_checksum=r.trace_checksum,
                trace_source=r.trace_source,
                final_buffer=r.final_buffer,
                wall_time=r.wall_time,
            )
            if r.victim_log is not None:
                d["victim_log"] = r.victim_log
            docs.append(d)
        return json.dumps(docs, indent=2) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")
