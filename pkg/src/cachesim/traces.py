"""Trace files and deterministic synthetic workloads."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .core import ConfigError

INT64_MAX = 2**63 - 1
WORKLOAD_KINDS = ("zipf", "loop", "scan", "uniform")


class TraceParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str = "not an unsigned integer"):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {line!r}: {reason}")


@dataclass(eq=False)
class Trace:
    blocks: np.ndarray
    source: str = ""
    universe_hint: Optional[int] = None

    def __post_init__(self):
        self.blocks = np.ascontiguousarray(self.blocks, dtype=np.int64)
        if self.blocks.ndim != 1:
            raise ValueError("trace must be one-dimensional")
        if self.blocks.size and self.blocks.min() < 0:
            raise ValueError("block ids must be non-negative")

    def __len__(self) -> int:
        return int(self.blocks.size)

    def __iter__(self):
        return iter(self.blocks.tolist())

    @classmethod
    def from_blocks(cls, blocks, source: str = "inline") -> "Trace":
        return cls(np.asarray(blocks, dtype=np.int64), source)

    def to_text(self) -> str:
        return "".join(f"{b}\n" for b in self.blocks.tolist())

    @cached_property
    def checksum(self) -> str:
        """FNV-1a 64 over ids rendered as decimal text, each followed by a newline."""
        from .kernel import fnv1a64

        data = np.frombuffer(self.to_text().encode("ascii"), dtype=np.uint8)
        return f"{fnv1a64(data):016x}"


def _parse_value(tok: str) -> Optional[int]:
    t = tok.lower()
    if t.startswith("0x"):
        digits = t[2:]
        if digits and all(c in "0123456789abcdef" for c in digits):
            return int(digits, 16)
        return None
    if tok.isascii() and tok.isdigit():
        return int(tok, 10)
    return None


def parse_trace(text: Union[str, bytes], mode: str = "block", block_size: int = 64, source: str = "") -> Trace:
    """One access per line, decimal or ``0x`` hex.  Blank lines and ``#`` lines are skipped.

    In address mode each value is divided (floor) by ``block_size``.
    """
    if mode not in ("block", "address"):
        raise ConfigError(f"unknown trace mode {mode!r}")
    if mode == "address" and (block_size < 1 or block_size & (block_size - 1)):
        raise ConfigError(f"block_size must be a power of two, got {block_size}")
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as e:
            raise TraceParseError(text[: e.start].count(b"\n") + 1, "", "non-ASCII byte") from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        v = _parse_value(line)
        if v is None:
            raise TraceParseError(lineno, raw)
        if mode == "address":
            v //= block_size
        if v > INT64_MAX:
            raise TraceParseError(lineno, raw, "block id exceeds 63 bits")
        out.append(v)
    return Trace(np.array(out, dtype=np.int64), source)


def read_trace(path, mode: str = "block", block_size: int = 64) -> Trace:
    with open(path, "rb") as fh:
        return parse_trace(fh.read(), mode, block_size, source=str(path))


def write_trace(trace: Trace, path) -> None:
    with open(path, "w") as fh:
        if trace.source:
            fh.write(f"# source: {trace.source}\n")
        fh.write(trace.to_text())


# -- generation ---------------------------------------------------------------

_MASK64 = (1 << 64) - 1
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB


class SplitMix64:
    """Scalar SplitMix64; :func:`splitmix64_block` is the vectorised equivalent."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + SPLITMIX_GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & _MASK64
        z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) * 2.0**-53


def splitmix64_block(seed: int, n: int) -> np.ndarray:
    """First ``n`` outputs of ``SplitMix64(seed)`` as uint64."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + np.arange(1, n + 1, dtype=np.uint64) * np.uint64(SPLITMIX_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(SPLITMIX_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(SPLITMIX_MUL2)
        return z ^ (z >> np.uint64(31))


def uniform_block(seed: int, n: int) -> np.ndarray:
    return (splitmix64_block(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    universe: int
    length: int
    alpha: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in WORKLOAD_KINDS:
            raise ConfigError(f"unknown workload {self.kind!r}; expected one of {', '.join(WORKLOAD_KINDS)}")
        if self.universe < 1:
            raise ConfigError("universe must be >= 1")
        if self.length < 1:
            raise ConfigError("length must be >= 1")
        if not self.alpha >= 0:
            raise ConfigError("alpha must be >= 0")
        if not 0 <= self.seed <= _MASK64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def __str__(self) -> str:
        return f"{self.kind}:{self.universe}:{self.length}:{self.alpha!r}:{self.seed}"

    @classmethod
    def parse(cls, text: str) -> "WorkloadSpec":
        try:
            kind, universe, length, alpha, seed = text.split(":")
            return cls(kind, int(universe), int(length), float(alpha), int(seed))
        except ValueError as e:
            raise ConfigError(f"bad workload spec {text!r}: {e}") from None


def zipf_cdf(universe: int, alpha: float) -> np.ndarray:
    """Unnormalised cumulative weights ``sum 1/(k+1)**alpha``."""
    ranks = np.arange(1, universe + 1, dtype=np.float64)
    return np.cumsum(ranks**-alpha)


def generate(spec: WorkloadSpec) -> Trace:
    n = spec.length
    if spec.kind == "loop":
        blocks = np.arange(n, dtype=np.int64) % spec.universe
    elif spec.kind == "scan":
        blocks = np.arange(n, dtype=np.int64)
    else:
        alpha = 0.0 if spec.kind == "uniform" else spec.alpha
        cdf = zipf_cdf(spec.universe, alpha)
        u = uniform_block(spec.seed, n) * cdf[-1]
        blocks = np.minimum(np.searchsorted(cdf, u, side="right"), spec.universe - 1).astype(np.int64)
    universe = n if spec.kind == "scan" else spec.universe
    return Trace(blocks, source=str(spec), universe_hint=universe)
