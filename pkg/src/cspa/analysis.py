"""Phase wrapping/unwrapping, dB conversion and per-trace statistics.

Statistics follow the measurement-report conventions: arithmetic mean,
peak-to-peak (max - min) and unbiased sample variance (N - 1 normalization),
computed independently for dB magnitude and phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Trace

_TWO_PI = 2.0 * math.pi

WRAPPED = "wrapped"
UNWRAPPED = "unwrapped"

# the six ChannelStats metric fields, in report order
STAT_FIELDS = ("mean_db", "p2p_db", "var_db", "mean_phase", "p2p_phase", "var_phase")

# spread metrics where "smaller" means "more static"
SPREAD_FIELDS = ("p2p_db", "var_db", "p2p_phase", "var_phase")


def wrap_phase(phi):
    """Wrap phase to (-pi, pi]. Accepts a scalar or an array."""
    arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("wrap_phase: phase must be finite")
    wrapped = np.mod(arr, _TWO_PI)
    wrapped = np.where(wrapped > math.pi, wrapped - _TWO_PI, wrapped)
    if np.ndim(phi) == 0:
        return float(wrapped)
    return wrapped


def unwrap_phase(series) -> np.ndarray:
    """Remove 2 pi jumps: correct successive differences larger than pi in magnitude."""
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        raise ValueError("unwrap_phase: series must be non-empty")
    return np.unwrap(arr)


def magnitude_db(values) -> np.ndarray:
    """20 log10 |h| of a complex series."""
    return 20.0 * np.log10(np.abs(np.asarray(values)))


@dataclass(frozen=True)
class ChannelStats:
    mean_db: float
    p2p_db: float
    var_db: float  # dB^2
    mean_phase: float
    p2p_phase: float
    var_phase: float  # rad^2
    phase_convention: str = UNWRAPPED

    def field_values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in STAT_FIELDS}


def stats(mag_db, phase, phase_convention: str = UNWRAPPED) -> ChannelStats:
    """Mean, peak-to-peak and unbiased variance of the two series."""
    m = np.asarray(mag_db, dtype=float)
    p = np.asarray(phase, dtype=float)
    if m.size == 0 or p.size == 0:
        raise ValueError("stats: series must be non-empty")
    if m.size != p.size:
        raise ValueError(f"stats: length mismatch, {m.size} magnitudes vs {p.size} phases")

    def _one(x: np.ndarray) -> tuple[float, float, float]:
        p2p = float(np.max(x) - np.min(x))
        if p2p == 0.0:
            # constant series: exact values, no float noise from the mean
            return float(x[0]), 0.0, 0.0
        var = float(np.var(x, ddof=1)) if x.size > 1 else 0.0
        return float(np.mean(x)), p2p, var

    mean_m, p2p_m, var_m = _one(m)
    mean_p, p2p_p, var_p = _one(p)
    return ChannelStats(mean_m, p2p_m, var_m, mean_p, p2p_p, var_p, phase_convention)


def trace_stats(trace: Trace, phase_convention: str = UNWRAPPED) -> ChannelStats:
    """ChannelStats of one trace in the requested phase convention."""
    values = np.asarray(trace.values())
    mags = magnitude_db(values)
    phases = wrap_phase(np.angle(values))
    if phase_convention == UNWRAPPED:
        phases = unwrap_phase(phases)
    elif phase_convention != WRAPPED:
        raise ValueError(f"unknown phase convention {phase_convention!r}")
    return stats(mags, phases, phase_convention)


@dataclass(frozen=True)
class SummaryTable:
    """Per-run statistics rows, mirroring the measurement report table."""

    rows: tuple[tuple[str, ChannelStats], ...]

    def __post_init__(self) -> None:
        labels = [label for label, _ in self.rows]
        if len(labels) != len(set(labels)):
            raise ValueError("summary table labels must be unique")

    CSV_HEADER = "label,mean_db,p2p_db,var_db2,mean_phase_rad,p2p_phase_rad,var_phase_rad2"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for label, st in self.rows:
            fields = ",".join(f"{getattr(st, name):.17g}" for name in STAT_FIELDS)
            lines.append(f"{label},{fields}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = (
            f"{'':38s} {'mean/dB':>12s} {'p2p/dB':>12s} {'var/dB2':>12s}"
            f" {'mean/rad':>12s} {'p2p/rad':>12s} {'var/rad2':>12s}"
        )
        lines = [header]
        for label, st in self.rows:
            cells = " ".join(f"{getattr(st, name):>12.6g}" for name in STAT_FIELDS)
            lines.append(f"{label:38s} {cells}")
        return "\n".join(lines) + "\n"


def summary_rows(traces: Iterable[Trace]) -> SummaryTable:
    """One row per trace; uncompensated ("regular") traces get a wrapped-phase
    row and an unwrapped-phase row, every other trace an unwrapped row."""
    rows: list[tuple[str, ChannelStats]] = []
    seen: dict[str, int] = {}

    def add(label: str, st: ChannelStats) -> None:
        count = seen.get(label, 0)
        seen[label] = count + 1
        rows.append((label if count == 0 else f"{label} #{count + 1}", st))

    for trace in traces:
        label = trace.strategy_label
        if label == "regular":
            add("regular (wrapped 2pi)", trace_stats(trace, WRAPPED))
            add("regular (not wrapped)", trace_stats(trace, UNWRAPPED))
        else:
            add(label, trace_stats(trace, UNWRAPPED))
    return SummaryTable(tuple(rows))


@dataclass(frozen=True)
class TraceComparison:
    """Field-by-field difference of two traces' statistics (a minus b)."""

    label_a: str
    label_b: str
    stats_a: ChannelStats
    stats_b: ChannelStats
    deltas: dict[str, float]
    verdicts: dict[str, str]  # spread metrics only: "a", "b" or "tie"

    def to_text(self) -> str:
        lines = [
            f"{'metric':12s} {'a: ' + self.label_a:>28s} {'b: ' + self.label_b:>28s}"
            f" {'a - b':>14s} {'more static':>12s}"
        ]
        for name in STAT_FIELDS:
            va = getattr(self.stats_a, name)
            vb = getattr(self.stats_b, name)
            verdict = self.verdicts.get(name, "-")
            lines.append(
                f"{name:12s} {va:>28.6g} {vb:>28.6g} {self.deltas[name]:>14.6g} {verdict:>12s}"
            )
        return "\n".join(lines) + "\n"


def compare(a: Trace, b: Trace) -> TraceComparison:
    """Compare two traces' statistics; spread verdicts say which is more static."""
    sa = trace_stats(a, UNWRAPPED)
    sb = trace_stats(b, UNWRAPPED)
    deltas = {name: getattr(sa, name) - getattr(sb, name) for name in STAT_FIELDS}
    verdicts: dict[str, str] = {}
    for name in SPREAD_FIELDS:
        va, vb = getattr(sa, name), getattr(sb, name)
        verdicts[name] = "tie" if va == vb else ("a" if va < vb else "b")
    return TraceComparison(a.strategy_label, b.strategy_label, sa, sb, deltas, verdicts)
