"""FastAPI service exposing sweeps, spectra, and gap measurements.

The service wraps the core package; the CLI is a thin client that either
calls these handlers in process or posts the same payloads over HTTP.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .bounds import NumericError
from .channel import ChannelError
from .constellation import ConstellationError
from .sweep import (
    ConfigError,
    SchemeSpec,
    SweepConfig,
    SweepRow,
    build_scheme,
    build_spectrum,
    gap_at_level,
    run_sweep,
)


class SweepRowModel(BaseModel):
    snr_db: float
    union_bound: Optional[float] = None
    new_bound: Optional[float] = None
    gamma_star: Optional[float] = None
    mc_bler: Optional[float] = None
    mc_ci_low: Optional[float] = None
    mc_ci_high: Optional[float] = None
    mc_trials: Optional[int] = None

    @staticmethod
    def from_row(row: SweepRow) -> "SweepRowModel":
        return SweepRowModel(**row.__dict__)


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    metadata: dict


class SpectrumRequest(BaseModel):
    scheme: SchemeSpec = Field(discriminator="kind")


class SpectrumEntry(BaseModel):
    d: float
    count: int


class SpectrumResponse(BaseModel):
    symmetric: bool
    per_signal: list[list[SpectrumEntry]]


class GapRequest(BaseModel):
    curve_a: list[tuple[float, float]]
    curve_b: list[tuple[float, float]]
    level: float = 1e-4


class GapResponse(BaseModel):
    gap_db: float
    level: float


class HealthResponse(BaseModel):
    status: str
    version: str


def create_app() -> FastAPI:
    app = FastAPI(title="fadebound", version=__version__)

    @app.get("/api/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/api/sweep", response_model=SweepResponse)
    def sweep(cfg: SweepConfig):
        try:
            result = run_sweep(cfg)
        except (ConfigError, ConstellationError, ChannelError, ValueError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        except NumericError as e:
            raise HTTPException(status_code=500, detail=str(e))
        return SweepResponse(
            rows=[SweepRowModel.from_row(r) for r in result.rows],
            metadata=result.metadata,
        )

    @app.post("/api/spectrum", response_model=SpectrumResponse)
    def spectrum(req: SpectrumRequest):
        try:
            spec = build_spectrum(req.scheme)
        except (ConstellationError, ValueError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        per_signal = [
            [SpectrumEntry(d=d, count=c) for d, c in spec.entries_for(i)]
            for i in range(spec.num_signals)
        ]
        return SpectrumResponse(symmetric=spec.symmetric, per_signal=per_signal)

    @app.post("/api/gap", response_model=GapResponse)
    def gap(req: GapRequest):
        try:
            g = gap_at_level(req.curve_a, req.curve_b, req.level)
        except ConfigError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return GapResponse(gap_db=g, level=req.level)

    return app


app = create_app()
