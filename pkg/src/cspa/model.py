"""Static and noisy-static channel models, interval generation and fitting.

The compensated channel is modeled as a constant coefficient h0 plus a
zero-mean residual drawn per step. The residual acts additively in the dB
magnitude and phase domains, matching how its variances are reported
(dB^2 and rad^2); amplitude and phase draws are independent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import analysis
from .core import ChannelSample, Trace, wavelength_of

# presentation wavelength for synthetic traces, which have no geometry of their own
_MODEL_WAVELENGTH_M = wavelength_of(2.45e9)

GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class StaticChannelModel:
    """Channel held at its value from the starting position/time."""

    h0: complex
    origin: float = 0.0  # step index or seconds, whichever domain the trace uses

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h0.real) and math.isfinite(self.h0.imag)):
            raise ValueError("h0 must be finite")
        if abs(self.h0) == 0.0:
            raise ValueError("h0 must be nonzero")

    @property
    def magnitude_db(self) -> float:
        return 20.0 * math.log10(abs(self.h0))

    @property
    def phase(self) -> float:
        return cmath.phase(self.h0)


@dataclass(frozen=True)
class ResidualModel:
    """Zero-mean per-step perturbation with per-domain variances."""

    var_amp: float = 0.0  # dB^2
    var_phase: float = 0.0  # rad^2
    distribution: str = GAUSSIAN

    def __post_init__(self) -> None:
        if self.var_amp < 0 or self.var_phase < 0:
            raise ValueError("residual variances must be >= 0")
        if self.distribution != GAUSSIAN:
            raise ValueError(f"unsupported residual distribution {self.distribution!r}")


def eval_static(model: StaticChannelModel, n) -> complex:
    """The static model: the channel at every position equals h0."""
    return model.h0


def sample_noisy(
    model: StaticChannelModel,
    residual: ResidualModel,
    n,
    rng: np.random.Generator,
) -> complex:
    """One noisy sample around h0; draws amplitude first, then phase."""
    if residual.var_amp == 0.0 and residual.var_phase == 0.0:
        return model.h0
    mag_db = model.magnitude_db
    phase = model.phase
    if residual.var_amp > 0.0:
        mag_db += rng.normal(0.0, math.sqrt(residual.var_amp))
    if residual.var_phase > 0.0:
        phase += rng.normal(0.0, math.sqrt(residual.var_phase))
    return 10.0 ** (mag_db / 20.0) * cmath.exp(1j * phase)


@dataclass(frozen=True)
class Interval:
    """One stationary stretch; h0 is either given or drawn at generation time."""

    start: int
    length: int
    h0: Optional[complex] = None
    draw: Optional[Callable[[np.random.Generator], complex]] = None


@dataclass(frozen=True)
class IntervalPlan:
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ValueError("interval plan must contain at least one interval")
        expected = self.intervals[0].start
        for k, iv in enumerate(self.intervals):
            if iv.length < 1:
                raise ValueError(f"interval {k}: length must be >= 1, got {iv.length}")
            if iv.start != expected:
                raise ValueError(
                    f"interval {k}: must start at {expected} to stay contiguous, "
                    f"got {iv.start}"
                )
            if (iv.h0 is None) == (iv.draw is None):
                raise ValueError(f"interval {k}: give exactly one of h0 or draw")
            expected = iv.start + iv.length

    @classmethod
    def single(cls, length: int, h0: complex, start: int = 0) -> "IntervalPlan":
        return cls((Interval(start, length, h0=h0),))


def generate_interval_stationary(
    plan: IntervalPlan, residual: ResidualModel, rng: np.random.Generator
) -> Trace:
    """Synthesize a trace that is stationary within each interval.

    Per interval, in order: optional h0 draw, then the amplitude residual
    vector, then the phase residual vector. Sample times advance by one
    second per step.
    """
    samples: list[ChannelSample] = []
    for iv in plan.intervals:
        h0 = iv.h0 if iv.h0 is not None else iv.draw(rng)
        base = StaticChannelModel(complex(h0), origin=iv.start)
        if residual.var_amp == 0.0 and residual.var_phase == 0.0:
            values = np.full(iv.length, base.h0, dtype=complex)
        else:
            mag_db = np.full(iv.length, base.magnitude_db)
            phase = np.full(iv.length, base.phase)
            if residual.var_amp > 0.0:
                mag_db = mag_db + rng.normal(0.0, math.sqrt(residual.var_amp), iv.length)
            if residual.var_phase > 0.0:
                phase = phase + rng.normal(0.0, math.sqrt(residual.var_phase), iv.length)
            values = 10.0 ** (mag_db / 20.0) * np.exp(1j * phase)
        for offset, h in enumerate(values):
            n = iv.start + offset
            samples.append(ChannelSample(n, float(n), 0.0, complex(h)))
    return Trace(
        scenario_digest="model",
        strategy_label="model",
        samples=tuple(samples),
        wavelength_m=_MODEL_WAVELENGTH_M,
    )


def fit(trace: Trace) -> tuple[StaticChannelModel, ResidualModel]:
    """Estimate h0 and residual variances from a trace.

    h0 combines the mean dB magnitude with the mean unwrapped phase; the
    variances are unbiased sample variances of the residuals around them.
    """
    if len(trace) < 2:
        raise ValueError(f"fit needs at least 2 samples, got {len(trace)}")
    values = np.asarray(trace.values())
    mag_db = analysis.magnitude_db(values)
    phase = analysis.unwrap_phase(analysis.wrap_phase(np.angle(values)))
    mean_db = float(np.mean(mag_db))
    mean_phase = float(np.mean(phase))
    h0 = 10.0 ** (mean_db / 20.0) * cmath.exp(1j * mean_phase)
    model = StaticChannelModel(h0, origin=float(trace.samples[0].step_index))
    residual = ResidualModel(
        var_amp=float(np.var(mag_db, ddof=1)),
        var_phase=float(np.var(phase, ddof=1)),
    )
    return model, residual


@dataclass(frozen=True)
class ResidualDiagnostics:
    """Model-adequacy report for a fitted static model on a trace."""

    amp_residual_mean: float  # dB
    phase_residual_mean: float  # rad
    amp_lag1_autocorr: float
    phase_lag1_autocorr: float
    phase_outlier_fraction: float  # fraction with |residual| > 3 sigma


def _lag1_autocorr(r: np.ndarray) -> float:
    if r.size < 2:
        return 0.0
    centered = r - np.mean(r)
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        return 0.0
    return float(np.dot(centered[:-1], centered[1:]) / denom)


def residual_diagnostics(
    trace: Trace, model: StaticChannelModel, residual: ResidualModel
) -> ResidualDiagnostics:
    """Residual mean, lag-1 autocorrelation and 3-sigma outlier fraction.

    Structured residuals (a deterministic ramp fitted as static) show up as
    strong positive lag-1 autocorrelation.
    """
    values = np.asarray(trace.values())
    mag_db = analysis.magnitude_db(values)
    phase = analysis.unwrap_phase(analysis.wrap_phase(np.angle(values)))
    r_amp = mag_db - model.magnitude_db
    # align the model phase with the unwrapped series (it is only known mod 2 pi)
    base = model.phase
    base += 2.0 * math.pi * round((float(np.mean(phase)) - base) / (2.0 * math.pi))
    r_phase = phase - base
    sigma = math.sqrt(residual.var_phase)
    if sigma == 0.0:
        outliers = float(np.mean(np.abs(r_phase) > 0.0))
    else:
        outliers = float(np.mean(np.abs(r_phase) > 3.0 * sigma))
    return ResidualDiagnostics(
        amp_residual_mean=float(np.mean(r_amp)),
        phase_residual_mean=float(np.mean(r_phase)),
        amp_lag1_autocorr=_lag1_autocorr(r_amp),
        phase_lag1_autocorr=_lag1_autocorr(r_phase),
        phase_outlier_fraction=outliers,
    )
