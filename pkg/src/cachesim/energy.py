"""Per-access energy and latency accounting.

Unit costs::

    e_hit     = e_decoder + e_cell_array
    e_miss    = e_hit + e_access_memory
    e_partial = e_hit + e_access_buffer

The two-class figure weights hits and everything else by the hit and miss
ratios; the extended figure charges partial hits at buffer cost.  Latency
uses the same arithmetic over its own parameter table.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Mapping, Optional

from .core import ConfigError, SimStats


@dataclass(frozen=True)
class EnergyParams:
    e_decoder: float = 0.5
    e_cell_array: float = 0.5
    e_access_memory: float = 10000.0
    e_access_buffer: float = 10.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise ConfigError(f"{f.name} must be a finite non-negative number, got {v!r}")
        if self.e_access_buffer > self.e_access_memory:
            raise ConfigError("e_access_buffer must not exceed e_access_memory")

    def scaled(self, c: float) -> "EnergyParams":
        return EnergyParams(**{k: v * c for k, v in asdict(self).items()})


@dataclass(frozen=True)
class UnitCosts:
    e_hit: float
    e_miss: float
    e_partial: float


@dataclass(frozen=True)
class EnergyReport:
    paper_energy_per_access: float
    extended_energy_per_access: float
    total_extended_energy: float
    total_time: float


def derive_unit_costs(params: EnergyParams) -> UnitCosts:
    e_hit = params.e_decoder + params.e_cell_array
    return UnitCosts(
        e_hit=e_hit,
        e_miss=e_hit + params.e_access_memory,
        e_partial=e_hit + params.e_access_buffer,
    )


def paper_energy(stats: SimStats, costs: UnitCosts) -> float:
    """``HR * e_hit + MR * e_miss`` with partial hits inside MR."""
    if stats.accesses == 0:
        raise ValueError("energy per access is undefined for an empty run")
    hr, mr, _ = stats.ratios()
    return hr * costs.e_hit + mr * costs.e_miss


def _class_total(stats: SimStats, costs: UnitCosts) -> float:
    return stats.hits * costs.e_hit + stats.partial_hits * costs.e_partial + stats.misses * costs.e_miss


def extended_energy(stats: SimStats, costs: UnitCosts) -> tuple[float, float]:
    """Return ``(per_access, total)`` with partial hits at buffer cost."""
    total = _class_total(stats, costs)
    per_access = total / stats.accesses if stats.accesses else 0.0
    return per_access, total


def total_time(stats: SimStats, time_costs: UnitCosts) -> float:
    return _class_total(stats, time_costs)


def energy_report(stats: SimStats, params: EnergyParams, time_params: Optional[EnergyParams] = None) -> EnergyReport:
    costs = derive_unit_costs(params)
    tcosts = derive_unit_costs(time_params) if time_params is not None else costs
    per_access, total = extended_energy(stats, costs)
    return EnergyReport(
        paper_energy_per_access=paper_energy(stats, costs) if stats.accesses else 0.0,
        extended_energy_per_access=per_access,
        total_extended_energy=total,
        total_time=total_time(stats, tcosts),
    )


# -- key=value parameter files -------------------------------------------------

ENERGY_KEYS = tuple(f.name for f in fields(EnergyParams))
TIME_KEYS = tuple("t_" + k[2:] for k in ENERGY_KEYS)
ENERGY_FILE_ENV = "CACHESIM_ENERGY_FILE"


def parse_params_text(text: str) -> dict[str, float]:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in ENERGY_KEYS + TIME_KEYS:
            raise ConfigError(f"line {lineno}: expected one of {', '.join(ENERGY_KEYS + TIME_KEYS)} as key=value")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {value.strip()!r} is not a number") from None
    return out


def load_params(
    path: Optional[str | Path] = None,
    overrides: Optional[Mapping[str, float]] = None,
) -> tuple[EnergyParams, Optional[EnergyParams]]:
    """Build (energy, time) parameter sets.

    Precedence: ``overrides`` > file > defaults.  ``path`` falls back to
    ``$CACHESIM_ENERGY_FILE``.  Time parameters (``t_*`` keys) default to
    the energy values, in which case ``None`` is returned for them.
    """
    if path is None:
        path = os.environ.get(ENERGY_FILE_ENV) or None
    values: dict[str, float] = {}
    if path is not None:
        values.update(parse_params_text(Path(path).read_text()))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = float(v)
    energy = EnergyParams(**{k: values[k] for k in ENERGY_KEYS if k in values})
    tvals = {k: values[k] for k in TIME_KEYS if k in values}
    if not tvals:
        return energy, None
    base = asdict(energy)
    for k, v in tvals.items():
        base["e_" + k[2:]] = v
    return energy, EnergyParams(**base)
