"""FastAPI service exposing simulation, analysis and model fitting.

Domain failures map to HTTP 400 (bad scenario, malformed trace CSV) and
mid-run simulation aborts to HTTP 500; request shape errors are FastAPI's
usual 422.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, analysis, campaign, core
from .. import model as channel_model
from ..motion import Strategy
from ..scenario_io import ScenarioFormatError, model_params_text
from . import schemas

app = FastAPI(
    title="cspa",
    description="Channel static partner antenna simulation service",
    version=__version__,
)


def _resolve_scenario(req: schemas.ScenarioCarrier) -> core.Scenario:
    try:
        return req.resolve()
    except ScenarioFormatError as exc:
        raise HTTPException(status_code=400, detail=f"scenario: {exc}")


def _validated_scenario(req: schemas.ScenarioCarrier) -> core.Scenario:
    scenario = _resolve_scenario(req)
    violations = core.validate_scenario(scenario)
    if violations:
        raise HTTPException(
            status_code=400, detail={"message": "invalid scenario", "violations": violations}
        )
    return scenario


def _parse_trace(csv_text: str, name: str = "") -> core.Trace:
    try:
        return campaign.trace_from_csv_text(csv_text)
    except campaign.TraceParseError as exc:
        where = f"{name}: " if name else ""
        raise HTTPException(status_code=400, detail=f"{where}{exc}")


def _run_one(scenario: core.Scenario, strategy: Strategy, seed: int) -> schemas.SimulateResponse:
    try:
        trace = campaign.run(scenario, strategy, seed)
    except campaign.SimulationError as exc:
        raise HTTPException(status_code=500, detail=f"simulation failed: {exc}")
    return schemas.SimulateResponse(
        strategy=strategy.value,
        label=trace.strategy_label,
        seed=seed,
        scenario_digest=trace.scenario_digest,
        trace=schemas.TracePayload.from_trace(trace),
        csv=campaign.trace_to_csv_text(trace),
        stats=schemas.StatsPayload.from_stats(
            analysis.trace_stats(trace), trace.strategy_label
        ),
    )


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", service="cspa", version=__version__)


@app.post("/scenario/validate", response_model=schemas.ValidateResponse)
def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
    scenario = _resolve_scenario(req)
    violations = core.validate_scenario(scenario)
    return schemas.ValidateResponse(
        valid=not violations, violations=violations, digest=scenario.digest()
    )


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    scenario = _validated_scenario(req)
    seed = req.seed if req.seed is not None else scenario.noise.seed
    return _run_one(scenario, Strategy(req.strategy), seed)


@app.post("/simulate/triple", response_model=schemas.TripleResponse)
def simulate_triple(req: schemas.TripleRequest) -> schemas.TripleResponse:
    scenario = _validated_scenario(req)
    seed = req.seed if req.seed is not None else scenario.noise.seed
    runs = [
        _run_one(scenario, strategy, campaign.derived_seed(seed, k))
        for k, strategy in enumerate(campaign.TRIPLE_ORDER)
    ]
    traces = [r.trace.to_trace() for r in runs]
    return schemas.TripleResponse(
        seed=seed,
        scenario_digest=scenario.digest(),
        runs=runs,
        summary=schemas.SummaryPayload.from_table(analysis.summary_rows(traces)),
    )


@app.post("/analyze", response_model=schemas.AnalyzeResponse)
def analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    traces = [_parse_trace(item.csv, item.name) for item in req.traces]
    return schemas.AnalyzeResponse(
        summary=schemas.SummaryPayload.from_table(analysis.summary_rows(traces))
    )


@app.post("/compare", response_model=schemas.CompareResponse)
def compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
    trace_a = _parse_trace(req.trace_a, "trace_a")
    trace_b = _parse_trace(req.trace_b, "trace_b")
    result = analysis.compare(trace_a, trace_b)
    return schemas.CompareResponse(
        label_a=result.label_a,
        label_b=result.label_b,
        stats_a=schemas.StatsPayload.from_stats(result.stats_a, result.label_a),
        stats_b=schemas.StatsPayload.from_stats(result.stats_b, result.label_b),
        deltas=result.deltas,
        verdicts=result.verdicts,
        text=result.to_text(),
    )


@app.post("/model/generate", response_model=schemas.ModelGenerateResponse)
def model_generate(req: schemas.ModelGenerateRequest) -> schemas.ModelGenerateResponse:
    seed = req.seed if req.seed is not None else core.DEFAULT_SEED
    try:
        model, residual = req.params.to_models()
        plan = channel_model.IntervalPlan.single(req.num_samples, model.h0)
        trace = channel_model.generate_interval_stationary(
            plan, residual, np.random.default_rng(seed)
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"model parameters: {exc}")
    return schemas.ModelGenerateResponse(
        seed=seed,
        csv=campaign.trace_to_csv_text(trace),
        params_text=model_params_text(model, residual),
    )


@app.post("/model/fit", response_model=schemas.ModelFitResponse)
def model_fit(req: schemas.ModelFitRequest) -> schemas.ModelFitResponse:
    trace = _parse_trace(req.csv)
    try:
        model, residual = channel_model.fit(trace)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=f"fit: {exc}")
    diag = channel_model.residual_diagnostics(trace, model, residual)
    return schemas.ModelFitResponse(
        params=schemas.ModelParams.from_models(model, residual),
        params_text=model_params_text(model, residual),
        diagnostics=schemas.DiagnosticsPayload(
            amp_residual_mean=diag.amp_residual_mean,
            phase_residual_mean=diag.phase_residual_mean,
            amp_lag1_autocorr=diag.amp_lag1_autocorr,
            phase_lag1_autocorr=diag.phase_lag1_autocorr,
            phase_outlier_fraction=diag.phase_outlier_fraction,
        ),
    )
