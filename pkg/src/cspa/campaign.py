"""Move-dwell-measure campaign execution and trace CSV I/O.

A run visits every step of the trajectory in order: plan the step, apply
positioning error, evaluate the channel, apply the settling perturbation,
record one sample. Measurement itself is treated as instantaneous at the end
of the dwell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Union

import numpy as np

from . import analysis
from .core import ChannelSample, Scenario, Trace
from .motion import Strategy, apply_positioning_error, plan_step, settling_perturbation
from .propagation import GeometryState, total_channel

# report row labels per strategy
STRATEGY_LABELS: dict[Strategy, str] = {
    Strategy.UNCOMPENSATED: "regular",
    Strategy.WITH_MOVEMENT: "channel static partner antenna",
    Strategy.COUNTER_MOVEMENT: "channel static antenna",
    Strategy.NO_MOVEMENT: "no movement",
}

TRIPLE_ORDER = (Strategy.UNCOMPENSATED, Strategy.WITH_MOVEMENT, Strategy.NO_MOVEMENT)

# 64-bit golden-ratio stride; sub-seed k of a master seed s is (s + k * stride) mod 2^64
SEED_STRIDE = 0x9E3779B97F4A7C15

CSV_HEADER = (
    "step_index,time_s,moved_distance_m,moved_distance_lambda,"
    "h_re,h_im,mag_db,phase_wrapped_rad,phase_unwrapped_rad"
)


class SimulationError(RuntimeError):
    """A campaign run aborted; the message names the failing step."""


class TraceParseError(ValueError):
    """A trace CSV could not be parsed; the message names the line."""


def derived_seed(master_seed: int, k: int) -> int:
    """Sub-seed k of a master seed, reproducible in isolation."""
    return (master_seed + k * SEED_STRIDE) % (1 << 64)


def run(scenario: Scenario, strategy: Strategy, seed: int | None = None) -> Trace:
    """Execute one campaign run; (scenario, strategy, seed) fully determine the trace.

    The scenario is assumed valid (see core.validate_scenario); geometry
    degeneracies encountered mid-run abort with the step index.
    """
    if seed is None:
        seed = scenario.noise.seed
    rng = np.random.default_rng(seed)
    noise = scenario.noise
    dt = scenario.trajectory.step_length / scenario.speed + scenario.dwell_time
    samples = []
    for n in range(scenario.trajectory.step_count + 1):
        plan = plan_step(scenario, strategy, n)
        plan = apply_positioning_error(plan, noise.positioning_accuracy, rng)
        state = GeometryState(plan.antenna_positions, plan.objects)
        try:
            h = total_channel(state, scenario)
        except ValueError as exc:
            raise SimulationError(f"step {n}: {exc}") from exc
        h *= settling_perturbation(
            scenario.dwell_time, noise.settling_epsilon, noise.settling_tau, rng
        )
        samples.append(ChannelSample(n, n * dt, plan.nominal_moved_distance, h))
    return Trace(
        scenario_digest=scenario.digest(),
        strategy_label=STRATEGY_LABELS[strategy],
        samples=tuple(samples),
        wavelength_m=scenario.carrier.wavelength,
    )


@dataclass(frozen=True)
class CampaignResult:
    """The three reference runs over one scenario."""

    traces: dict[str, Trace]  # label -> trace, in TRIPLE_ORDER
    seed: int
    scenario_digest: str


def run_triple(scenario: Scenario, seed: int | None = None) -> CampaignResult:
    """Uncompensated, with-movement and no-movement runs with derived sub-seeds."""
    if seed is None:
        seed = scenario.noise.seed
    traces: dict[str, Trace] = {}
    for k, strategy in enumerate(TRIPLE_ORDER):
        trace = run(scenario, strategy, derived_seed(seed, k))
        traces[trace.strategy_label] = trace
    return CampaignResult(traces=traces, seed=seed, scenario_digest=scenario.digest())


def summarize(result: CampaignResult) -> analysis.SummaryTable:
    """Statistics table over a campaign result, one comparison row set per run."""
    return analysis.summary_rows(result.traces.values())


def _f(x: float) -> str:
    return f"{x:.17g}"


def trace_to_csv_text(trace: Trace) -> str:
    """Render a trace as CSV, floats at 17 significant digits (lossless)."""
    values = np.asarray(trace.values())
    wrapped = analysis.wrap_phase(np.angle(values))
    unwrapped = analysis.unwrap_phase(wrapped)
    mags = analysis.magnitude_db(values)
    lines = [
        f"# scenario_digest: {trace.scenario_digest}",
        f"# strategy: {trace.strategy_label}",
        f"# wavelength_m: {_f(trace.wavelength_m)}",
        CSV_HEADER,
    ]
    for i, s in enumerate(trace.samples):
        lam_units = s.moved_distance / trace.wavelength_m
        lines.append(
            f"{s.step_index},{_f(s.time)},{_f(s.moved_distance)},{_f(lam_units)},"
            f"{_f(s.h.real)},{_f(s.h.imag)},{_f(mags[i])},{_f(wrapped[i])},{_f(unwrapped[i])}"
        )
    return "\n".join(lines) + "\n"


def emit_trace_csv(trace: Trace, destination: Union[str, Path, IO[str]]) -> None:
    """Write a trace CSV to a path or text stream."""
    text = trace_to_csv_text(trace)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def read_trace_csv(source: Union[str, Path, IO[str]]) -> Trace:
    """Parse a trace CSV back into a Trace; inverse of emit_trace_csv."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    return trace_from_csv_text(text)


def trace_from_csv_text(text: str) -> Trace:
    digest = ""
    label = ""
    wavelength = float("nan")
    header_seen = False
    samples: list[ChannelSample] = []
    prev_index: int | None = None
    prev_time: float | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = line.lstrip("#").strip()
            key, _, value = meta.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "scenario_digest":
                digest = value
            elif key == "strategy":
                label = value
            elif key == "wavelength_m":
                try:
                    wavelength = float(value)
                except ValueError:
                    raise TraceParseError(f"line {lineno}: bad wavelength_m {value!r}")
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise TraceParseError(
                    f"line {lineno}: expected header {CSV_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 9:
            raise TraceParseError(f"line {lineno}: expected 9 fields, got {len(fields)}")
        try:
            n = int(fields[0])
            time_s = float(fields[1])
            moved = float(fields[2])
            h = complex(float(fields[4]), float(fields[5]))
        except ValueError as exc:
            raise TraceParseError(f"line {lineno}: {exc}") from exc
        if prev_index is not None and n != prev_index + 1:
            raise TraceParseError(
                f"line {lineno}: step_index gap, {prev_index} followed by {n}"
            )
        if prev_time is not None and time_s <= prev_time:
            raise TraceParseError(
                f"line {lineno}: time_s must be strictly increasing, "
                f"{prev_time} followed by {time_s}"
            )
        if not (math.isfinite(h.real) and math.isfinite(h.imag)):
            raise TraceParseError(f"line {lineno}: non-finite channel coefficient")
        samples.append(ChannelSample(n, time_s, moved, h))
        prev_index = n
        prev_time = time_s

    if not header_seen:
        raise TraceParseError("line 1: missing CSV header")
    if not samples:
        raise TraceParseError("trace CSV contains no samples")
    return Trace(
        scenario_digest=digest,
        strategy_label=label,
        samples=tuple(samples),
        wavelength_m=wavelength,
    )
