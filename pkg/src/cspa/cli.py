"""Command-line front end.

The CLI is a thin client of the HTTP service layer: every subcommand builds a
request model, dispatches it (in-process by default, over HTTP when --server
is given) and formats the response. Exit codes: 0 ok, 1 usage/config error,
2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx
from fastapi import HTTPException
from pydantic import BaseModel, ValidationError

from .analysis import summary_rows
from .core import DEFAULT_SEED, clutter_scenario, default_scenario
from .scenario_io import ScenarioFormatError, parse_model_params, render_scenario
from .service import schemas
from .service.app import analyze as svc_analyze
from .service.app import app as fastapi_app
from .service.app import compare as svc_compare
from .service.app import model_fit as svc_model_fit
from .service.app import model_generate as svc_model_generate
from .service.app import simulate as svc_simulate
from .service.app import simulate_triple as svc_simulate_triple
from .service.app import validate as svc_validate


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


class ServiceClient:
    """Dispatches request models to the service, locally or over HTTP."""

    _LOCAL_HANDLERS = {
        "/scenario/validate": (svc_validate, schemas.ValidateResponse),
        "/simulate": (svc_simulate, schemas.SimulateResponse),
        "/simulate/triple": (svc_simulate_triple, schemas.TripleResponse),
        "/analyze": (svc_analyze, schemas.AnalyzeResponse),
        "/compare": (svc_compare, schemas.CompareResponse),
        "/model/generate": (svc_model_generate, schemas.ModelGenerateResponse),
        "/model/fit": (svc_model_fit, schemas.ModelFitResponse),
    }

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def post(self, path: str, request: BaseModel) -> BaseModel:
        handler, response_type = self._LOCAL_HANDLERS[path]
        if self.server is None:
            try:
                return handler(request)
            except HTTPException as exc:
                raise CliError(_detail_text(exc.detail), 1 if exc.status_code < 500 else 2)
        try:
            reply = httpx.post(
                f"{self.server}{path}", json=request.model_dump(), timeout=300.0
            )
        except httpx.HTTPError as exc:
            raise CliError(f"cannot reach {self.server}: {exc}", 2)
        if reply.status_code >= 400:
            try:
                detail = _detail_text(reply.json().get("detail", reply.text))
            except ValueError:
                detail = reply.text
            raise CliError(detail, 1 if reply.status_code < 500 else 2)
        return response_type.model_validate(reply.json())


def _detail_text(detail) -> str:
    if isinstance(detail, dict):
        message = detail.get("message", "request failed")
        violations = detail.get("violations", [])
        return "\n".join([message] + [f"  - {v}" for v in violations])
    return str(detail)


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {what} {path}: {exc}", 1)


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", 2)


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in label)


BUILTIN_SCENARIOS = {"default": default_scenario, "clutter": clutter_scenario}


def cmd_scenario(args, client: ServiceClient) -> int:
    text = render_scenario(BUILTIN_SCENARIOS[args.name]())
    if args.out_file:
        _write_text(Path(args.out_file), text)
        print(f"wrote {args.out_file}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args, client: ServiceClient) -> int:
    scenario_text = _read_text(args.scenario, "scenario file")
    out_dir = Path(args.out)
    if args.strategy == "triple":
        req = schemas.TripleRequest(scenario_text=scenario_text, seed=args.seed)
        resp = client.post("/simulate/triple", req)
        for run in resp.runs:
            path = out_dir / f"trace_{_slug(run.label)}.csv"
            _write_text(path, run.csv)
            print(f"wrote {path}", file=sys.stderr)
        sys.stdout.write(resp.summary.csv if args.format == "csv" else resp.summary.text)
        return 0
    req = schemas.SimulateRequest(
        scenario_text=scenario_text, strategy=args.strategy, seed=args.seed
    )
    resp = client.post("/simulate", req)
    path = out_dir / f"trace_{_slug(resp.label)}.csv"
    _write_text(path, resp.csv)
    print(f"wrote {path}", file=sys.stderr)
    table = schemas.SummaryPayload.from_table(summary_rows([resp.trace.to_trace()]))
    sys.stdout.write(table.csv if args.format == "csv" else table.text)
    return 0


def cmd_analyze(args, client: ServiceClient) -> int:
    req = schemas.AnalyzeRequest(
        traces=[
            schemas.NamedCsv(name=p, csv=_read_text(p, "trace file")) for p in args.traces
        ]
    )
    resp = client.post("/analyze", req)
    sys.stdout.write(resp.summary.csv if args.format == "csv" else resp.summary.text)
    if args.out_file:
        _write_text(Path(args.out_file), resp.summary.csv)
    return 0


def cmd_compare(args, client: ServiceClient) -> int:
    req = schemas.CompareRequest(
        trace_a=_read_text(args.trace_a, "trace file"),
        trace_b=_read_text(args.trace_b, "trace file"),
    )
    resp = client.post("/compare", req)
    sys.stdout.write(resp.text)
    return 0


def _gen_params(args) -> schemas.ModelParams:
    if args.params:
        try:
            model, residual = parse_model_params(_read_text(args.params, "parameter file"))
        except ScenarioFormatError as exc:
            raise CliError(str(exc), 1)
        return schemas.ModelParams.from_models(model, residual)
    try:
        return schemas.ModelParams(
            h0_db=args.h0_db,
            h0_phase_rad=args.h0_phase_rad,
            var_amp_db2=args.var_amp_db2,
            var_phase_rad2=args.var_phase_rad2,
        )
    except ValidationError as exc:
        raise CliError(f"model parameters: {exc.errors()[0]['msg']}", 1)


def cmd_model_gen(args, client: ServiceClient) -> int:
    req = schemas.ModelGenerateRequest(
        params=_gen_params(args), num_samples=args.num_samples, seed=args.seed
    )
    resp = client.post("/model/generate", req)
    path = Path(args.out) / "trace_model.csv"
    _write_text(path, resp.csv)
    print(f"wrote {path}", file=sys.stderr)
    sys.stdout.write(resp.params_text)
    return 0


def cmd_model_fit(args, client: ServiceClient) -> int:
    req = schemas.ModelFitRequest(csv=_read_text(args.trace, "trace file"))
    resp = client.post("/model/fit", req)
    sys.stdout.write(resp.params_text)
    if args.diagnostics:
        d = resp.diagnostics
        print(f"amp_residual_mean = {d.amp_residual_mean:.6g}")
        print(f"phase_residual_mean = {d.phase_residual_mean:.6g}")
        print(f"amp_lag1_autocorr = {d.amp_lag1_autocorr:.6g}")
        print(f"phase_lag1_autocorr = {d.phase_lag1_autocorr:.6g}")
        print(f"phase_outlier_fraction = {d.phase_outlier_fraction:.6g}")
    return 0


def cmd_serve(args, client: ServiceClient) -> int:
    import uvicorn

    uvicorn.run(fastapi_app, host=args.host, port=args.port)
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are exit code 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"rng seed (default: scenario seed or {DEFAULT_SEED})",
    )
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument(
        "--format", choices=("text", "csv"), default="text", help="stdout format"
    )
    common.add_argument(
        "--server", default=None, help="base URL of a running service (default: in-process)"
    )

    parser = _Parser(prog="cspa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run a campaign over a scenario file")
    p.add_argument("scenario", help="path to a scenario file")
    p.add_argument(
        "--strategy",
        choices=(
            "uncompensated",
            "with_movement",
            "counter_movement",
            "no_movement",
            "triple",
        ),
        default="triple",
        help="movement strategy, or 'triple' for the three reference runs",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", parents=[common], help="statistics table over trace CSVs")
    p.add_argument("traces", nargs="+", help="trace CSV paths")
    p.add_argument("--out-file", default=None, help="also write the summary CSV here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", parents=[common], help="compare two traces metric by metric")
    p.add_argument("trace_a")
    p.add_argument("trace_b")
    p.set_defaults(func=cmd_compare)

    pm = sub.add_parser("model", help="channel model generation and fitting")
    msub = pm.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    p = msub.add_parser("gen", parents=[common], help="generate a synthetic static-channel trace")
    p.add_argument("--num-samples", "-n", type=int, required=True)
    p.add_argument("--h0-db", type=float, default=-43.4, help="mean magnitude, dB")
    p.add_argument("--h0-phase-rad", type=float, default=0.0, help="mean phase, rad")
    p.add_argument("--var-amp-db2", type=float, default=0.0, help="magnitude variance, dB^2")
    p.add_argument("--var-phase-rad2", type=float, default=0.0, help="phase variance, rad^2")
    p.add_argument("--params", default=None, help="read parameters from a [model] file instead")
    p.set_defaults(func=cmd_model_gen)

    p = msub.add_parser("fit", parents=[common], help="fit model parameters to a trace")
    p.add_argument("trace", help="trace CSV path")
    p.add_argument("--diagnostics", action="store_true", help="also print residual diagnostics")
    p.set_defaults(func=cmd_model_fit)

    p = sub.add_parser("scenario", parents=[common], help="emit a built-in scenario file")
    p.add_argument("name", choices=sorted(BUILTIN_SCENARIOS))
    p.add_argument("--out-file", default=None, help="write to a file instead of stdout")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve, server=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    client = ServiceClient(getattr(args, "server", None))
    try:
        return args.func(args, client)
    except CliError as exc:
        print(f"cspa: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"cspa: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
