"""Trace-driven cache replacement simulation with a weighting policy and victim buffer."""

from .core import AccessOutcome, CacheConfig, ConfigError, SimStats, UsageError, ratios, record_outcome
from .energy import EnergyParams, EnergyReport, UnitCosts, derive_unit_costs, extended_energy, paper_energy, total_time
from .harness import POLICIES, RunConfig, RunResult, compare, simulate, sweep_configs, write_results
from .lwrp import BlockState, LwrpCache, LwrpVariantFlags, VictimBuffer, weight
from .traces import Trace, WorkloadSpec, generate, parse_trace, read_trace, write_trace

__all__ = [
    "AccessOutcome", "BlockState", "CacheConfig", "ConfigError", "EnergyParams", "EnergyReport",
    "LwrpCache", "LwrpVariantFlags", "POLICIES", "RunConfig", "RunResult", "SimStats", "Trace",
    "UnitCosts", "UsageError", "VictimBuffer", "WorkloadSpec", "compare", "derive_unit_costs",
    "extended_energy", "generate", "paper_energy", "parse_trace", "ratios", "read_trace",
    "record_outcome", "simulate", "sweep_configs", "total_time", "weight", "write_results",
    "write_trace",
]
