"""HTTP service exposing the benchmark driver and the risk primitives.

The CLI talks to this app in process through an ASGI transport by default,
or over the wire when pointed at a running server.  Experiment runs are
synchronous: the response returns once the CSV set is on disk (paths
resolve on the serving host).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .data import convert_libsvm
from .experiment import ExperimentConfig, read_trajectories, run_experiment, summarize
from .risk import plugin_spectral_risk
from .spectra import spectrum_from_name

app = FastAPI(title="specrisk", version=__version__)


class SpectrumParams(BaseModel):
    name: str = "exp"
    c: float = 1.0
    beta: float = 0.95


class SpectrumEvalRequest(BaseModel):
    spectrum: SpectrumParams = SpectrumParams()
    levels: list[float]


class SpectrumEvalResponse(BaseModel):
    density: list[float]
    upper_bound: float
    lipschitz: float | None


class PluginRiskRequest(BaseModel):
    losses: list[float]
    spectrum: SpectrumParams = SpectrumParams()


class PluginRiskResponse(BaseModel):
    value: float


class RunRequest(BaseModel):
    data_path: str | None = None
    schema_path: str | None = None
    synthetic: str | None = None
    synthetic_n: int = 5000
    synthetic_d: int = 2
    synthetic_noise: float = 0.1
    methods: list[str] = ["default", "fast", "off"]
    spectrum: str = "exp"
    spec_c: float = 1.0
    spec_beta: float = 0.95
    epochs: int = 50
    trials: int = 10
    seed: int = 0
    test_fraction: float = 0.2
    radius: float = 100.0
    gamma: float = 1.0
    smoothing_delta: float = 0.3
    ancillary: str = "auto"
    boost: bool = False
    boost_delta: float = 0.05
    jobs: int = Field(default=1, ge=1)
    out: str = "results"


class RunResponse(BaseModel):
    trajectories_path: str
    summary_path: str
    runlog_path: str
    n_rows: int


class SummarizeRequest(BaseModel):
    trajectories_path: str


class SummaryRow(BaseModel):
    method: str
    epoch: int
    split: str
    metric: str
    mean: float
    std: float


class ConvertRequest(BaseModel):
    input_path: str
    output_path: str
    delimiter: str = ","


class ConvertResponse(BaseModel):
    rows: int
    features: int


def _spectrum(params: SpectrumParams):
    try:
        return spectrum_from_name(params.name, params.c, params.beta)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/spectra/eval", response_model=SpectrumEvalResponse)
def spectra_eval(req: SpectrumEvalRequest) -> SpectrumEvalResponse:
    spec = _spectrum(req.spectrum)
    try:
        density = [float(spec.density(u)) for u in req.levels]
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return SpectrumEvalResponse(
        density=density, upper_bound=spec.upper_bound, lipschitz=spec.lipschitz
    )


@app.post("/risk/plugin", response_model=PluginRiskResponse)
def risk_plugin(req: PluginRiskRequest) -> PluginRiskResponse:
    spec = _spectrum(req.spectrum)
    try:
        value = plugin_spectral_risk(req.losses, spec)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return PluginRiskResponse(value=value)


@app.post("/experiments/run", response_model=RunResponse)
def experiments_run(req: RunRequest) -> RunResponse:
    cfg = ExperimentConfig(**{**req.model_dump(), "methods": tuple(req.methods)})
    try:
        result = run_experiment(cfg)
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return RunResponse(
        trajectories_path=result.trajectories_path,
        summary_path=result.summary_path,
        runlog_path=result.runlog_path,
        n_rows=result.n_rows,
    )


@app.post("/summaries", response_model=list[SummaryRow])
def summaries(req: SummarizeRequest) -> list[SummaryRow]:
    try:
        rows = summarize(read_trajectories(req.trajectories_path))
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return [
        SummaryRow(method=m, epoch=e, split=s, metric=k, mean=mean, std=std)
        for m, e, s, k, mean, std in rows
    ]


@app.post("/datasets/convert", response_model=ConvertResponse)
def datasets_convert(req: ConvertRequest) -> ConvertResponse:
    try:
        rows, features = convert_libsvm(req.input_path, req.output_path, req.delimiter)
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return ConvertResponse(rows=rows, features=features)
