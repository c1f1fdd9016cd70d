"""Pydantic request/response models for the HTTP service.

Scenarios may be sent either structured (``scenario``) or as the raw text of
a scenario file (``scenario_text``); exactly one must be given.
"""

from __future__ import annotations

import cmath
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .. import analysis, core, model as channel_model
from ..scenario_io import parse_scenario_text

Triple = tuple[float, float, float]

StrategyName = Literal["uncompensated", "with_movement", "counter_movement", "no_movement"]


class MotionSpec(BaseModel):
    mode: Literal["static", "along_t", "along_t_scaled"] = "static"
    factor: float = 0.0

    def to_core(self) -> core.MotionAssignment:
        if self.mode == "static":
            return core.MotionAssignment.static()
        if self.mode == "along_t":
            return core.MotionAssignment.along_t()
        return core.MotionAssignment.along_t_scaled(self.factor)

    @classmethod
    def from_core(cls, m: core.MotionAssignment) -> "MotionSpec":
        return cls(mode=m.mode.value, factor=m.factor)


class CarrierSpec(BaseModel):
    frequency_hz: float
    medium_index: float = 1.0


class TrajectorySpec(BaseModel):
    origin: Triple
    direction: Triple
    total_length_m: float
    step_length_m: float


class AntennaSpec(BaseModel):
    id: str
    position: Triple
    gain_dbi: float = 0.0
    motion: MotionSpec = Field(default_factory=MotionSpec)


class ObjectSpec(BaseModel):
    kind: Literal["point_scatterer", "plane_reflector"]
    reflectivity: float
    position: Optional[Triple] = None  # point_scatterer
    point: Optional[Triple] = None  # plane_reflector
    normal: Optional[Triple] = None  # plane_reflector
    motion: MotionSpec = Field(default_factory=MotionSpec)

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "ObjectSpec":
        if self.kind == "point_scatterer" and self.position is None:
            raise ValueError("point_scatterer requires position")
        if self.kind == "plane_reflector" and (self.point is None or self.normal is None):
            raise ValueError("plane_reflector requires point and normal")
        return self


class NoiseSpec(BaseModel):
    positioning_accuracy_m: float = core.DEFAULT_POSITIONING_ACCURACY_M
    settling_epsilon: float = 0.0
    settling_tau_s: float = 0.04
    seed: int = core.DEFAULT_SEED


class ScenarioSpec(BaseModel):
    carrier: CarrierSpec
    trajectory: TrajectorySpec
    antennas: list[AntennaSpec]
    tx: str
    rx: str
    objects: list[ObjectSpec] = Field(default_factory=list)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    dwell_time_s: float = core.DEFAULT_DWELL_S
    speed_mps: float = core.DEFAULT_SPEED_MPS

    def to_scenario(self) -> core.Scenario:
        objects: list[core.EnvironmentObject] = []
        for o in self.objects:
            if o.kind == "point_scatterer":
                objects.append(
                    core.PointScatterer(
                        core.Vec3(*o.position), o.reflectivity, o.motion.to_core()
                    )
                )
            else:
                objects.append(
                    core.PlaneReflector(
                        core.Vec3(*o.point),
                        core.Vec3(*o.normal),
                        o.reflectivity,
                        o.motion.to_core(),
                    )
                )
        return core.Scenario(
            carrier=core.Carrier(self.carrier.frequency_hz, self.carrier.medium_index),
            antennas=tuple(
                core.Antenna(
                    a.id, core.Vec3(*a.position), a.gain_dbi, a.motion.to_core()
                )
                for a in self.antennas
            ),
            tx_id=self.tx,
            rx_id=self.rx,
            trajectory=core.Trajectory(
                core.Vec3(*self.trajectory.origin),
                core.Vec3(*self.trajectory.direction),
                self.trajectory.total_length_m,
                self.trajectory.step_length_m,
            ),
            objects=tuple(objects),
            noise=core.NoiseConfig(
                positioning_accuracy=self.noise.positioning_accuracy_m,
                settling_epsilon=self.noise.settling_epsilon,
                settling_tau=self.noise.settling_tau_s,
                seed=self.noise.seed,
            ),
            dwell_time=self.dwell_time_s,
            speed=self.speed_mps,
        )

    @classmethod
    def from_scenario(cls, s: core.Scenario) -> "ScenarioSpec":
        def triple(v: core.Vec3) -> Triple:
            return (v.x, v.y, v.z)

        objects = []
        for o in s.objects:
            if isinstance(o, core.PointScatterer):
                objects.append(
                    ObjectSpec(
                        kind="point_scatterer",
                        reflectivity=o.reflectivity,
                        position=triple(o.position),
                        motion=MotionSpec.from_core(o.motion),
                    )
                )
            else:
                objects.append(
                    ObjectSpec(
                        kind="plane_reflector",
                        reflectivity=o.reflectivity,
                        point=triple(o.point),
                        normal=triple(o.normal),
                        motion=MotionSpec.from_core(o.motion),
                    )
                )
        return cls(
            carrier=CarrierSpec(
                frequency_hz=s.carrier.frequency, medium_index=s.carrier.medium_index
            ),
            trajectory=TrajectorySpec(
                origin=triple(s.trajectory.origin),
                direction=triple(s.trajectory.direction),
                total_length_m=s.trajectory.total_length,
                step_length_m=s.trajectory.step_length,
            ),
            antennas=[
                AntennaSpec(
                    id=a.id,
                    position=triple(a.initial_position),
                    gain_dbi=a.gain_dbi,
                    motion=MotionSpec.from_core(a.motion),
                )
                for a in s.antennas
            ],
            tx=s.tx_id,
            rx=s.rx_id,
            objects=objects,
            noise=NoiseSpec(
                positioning_accuracy_m=s.noise.positioning_accuracy,
                settling_epsilon=s.noise.settling_epsilon,
                settling_tau_s=s.noise.settling_tau,
                seed=s.noise.seed,
            ),
            dwell_time_s=s.dwell_time,
            speed_mps=s.speed,
        )


class ScenarioCarrier(BaseModel):
    """Mixin for requests that carry a scenario one way or the other."""

    scenario: Optional[ScenarioSpec] = None
    scenario_text: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "ScenarioCarrier":
        if (self.scenario is None) == (self.scenario_text is None):
            raise ValueError("give exactly one of scenario or scenario_text")
        return self

    def resolve(self) -> core.Scenario:
        if self.scenario is not None:
            return self.scenario.to_scenario()
        return parse_scenario_text(self.scenario_text)


class ValidateRequest(ScenarioCarrier):
    pass


class ValidateResponse(BaseModel):
    valid: bool
    violations: list[str]
    digest: str


class SimulateRequest(ScenarioCarrier):
    strategy: StrategyName = "with_movement"
    seed: Optional[int] = None


class TracePayload(BaseModel):
    scenario_digest: str
    strategy_label: str
    wavelength_m: float
    step_index: list[int]
    time_s: list[float]
    moved_distance_m: list[float]
    h_re: list[float]
    h_im: list[float]

    @classmethod
    def from_trace(cls, t: core.Trace) -> "TracePayload":
        values = t.values()
        return cls(
            scenario_digest=t.scenario_digest,
            strategy_label=t.strategy_label,
            wavelength_m=t.wavelength_m,
            step_index=t.step_indices(),
            time_s=t.times(),
            moved_distance_m=t.moved_distances(),
            h_re=[h.real for h in values],
            h_im=[h.imag for h in values],
        )

    def to_trace(self) -> core.Trace:
        samples = tuple(
            core.ChannelSample(n, t, d, complex(re, im))
            for n, t, d, re, im in zip(
                self.step_index, self.time_s, self.moved_distance_m, self.h_re, self.h_im
            )
        )
        return core.Trace(self.scenario_digest, self.strategy_label, samples, self.wavelength_m)


class StatsPayload(BaseModel):
    label: str = ""
    mean_db: float
    p2p_db: float
    var_db2: float
    mean_phase_rad: float
    p2p_phase_rad: float
    var_phase_rad2: float
    phase_convention: str

    @classmethod
    def from_stats(cls, st: analysis.ChannelStats, label: str = "") -> "StatsPayload":
        return cls(
            label=label,
            mean_db=st.mean_db,
            p2p_db=st.p2p_db,
            var_db2=st.var_db,
            mean_phase_rad=st.mean_phase,
            p2p_phase_rad=st.p2p_phase,
            var_phase_rad2=st.var_phase,
            phase_convention=st.phase_convention,
        )


class SimulateResponse(BaseModel):
    strategy: StrategyName
    label: str
    seed: int
    scenario_digest: str
    trace: TracePayload
    csv: str
    stats: StatsPayload


class TripleRequest(ScenarioCarrier):
    seed: Optional[int] = None


class SummaryPayload(BaseModel):
    rows: list[StatsPayload]
    text: str
    csv: str

    @classmethod
    def from_table(cls, table: analysis.SummaryTable) -> "SummaryPayload":
        return cls(
            rows=[StatsPayload.from_stats(st, label) for label, st in table.rows],
            text=table.to_text(),
            csv=table.to_csv(),
        )


class TripleResponse(BaseModel):
    seed: int
    scenario_digest: str
    runs: list[SimulateResponse]
    summary: SummaryPayload


class NamedCsv(BaseModel):
    name: str = ""
    csv: str


class AnalyzeRequest(BaseModel):
    traces: list[NamedCsv] = Field(min_length=1)


class AnalyzeResponse(BaseModel):
    summary: SummaryPayload


class CompareRequest(BaseModel):
    trace_a: str  # CSV text
    trace_b: str


class CompareResponse(BaseModel):
    label_a: str
    label_b: str
    stats_a: StatsPayload
    stats_b: StatsPayload
    deltas: dict[str, float]
    verdicts: dict[str, str]
    text: str


class ModelParams(BaseModel):
    h0_db: float
    h0_phase_rad: float
    var_amp_db2: float = Field(ge=0)
    var_phase_rad2: float = Field(ge=0)

    def to_models(self) -> tuple[channel_model.StaticChannelModel, channel_model.ResidualModel]:
        h0 = 10.0 ** (self.h0_db / 20.0) * cmath.exp(1j * self.h0_phase_rad)
        return (
            channel_model.StaticChannelModel(h0),
            channel_model.ResidualModel(self.var_amp_db2, self.var_phase_rad2),
        )

    @classmethod
    def from_models(
        cls,
        model: channel_model.StaticChannelModel,
        residual: channel_model.ResidualModel,
    ) -> "ModelParams":
        return cls(
            h0_db=model.magnitude_db,
            h0_phase_rad=model.phase,
            var_amp_db2=residual.var_amp,
            var_phase_rad2=residual.var_phase,
        )


class ModelGenerateRequest(BaseModel):
    params: ModelParams
    num_samples: int = Field(ge=1)
    seed: Optional[int] = None


class ModelGenerateResponse(BaseModel):
    seed: int
    csv: str
    params_text: str


class ModelFitRequest(BaseModel):
    csv: str


class DiagnosticsPayload(BaseModel):
    amp_residual_mean: float
    phase_residual_mean: float
    amp_lag1_autocorr: float
    phase_lag1_autocorr: float
    phase_outlier_fraction: float


class ModelFitResponse(BaseModel):
    params: ModelParams
    params_text: str
    diagnostics: DiagnosticsPayload


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str
