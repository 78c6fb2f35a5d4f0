"""FastAPI service wrapping the planning engine.

The service owns no plan logic: every handler validates the wire format and
delegates to the shared PlanningEngine. Run with:

    uvicorn resplan.service.app:app --port 8000
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from ..accidents import IncidentRecord, render_incident_report
from ..backends import BackendFailure
from ..config import AppConfig, load_config
from ..errors import ResplanError
from ..orchestrator import (
    ExtractionExhaustedError,
    PlanJob,
    PlanningEngine,
    UnknownBackendError,
    UnknownIncidentError,
)
from ..synthesis import EmptyDocumentError, SchemaViolationError
from ..topsis import CriterionSpec, DecisionMatrix, Kind, ZeroColumnError
from . import schemas


def _job_response(job: PlanJob) -> schemas.JobResponse:
    result = None
    if job.result is not None:
        result = schemas.JobResult(
            generations=[
                schemas.GenerationOut(
                    source=g.source,
                    bits=list(g.bits),
                    score=g.score,
                    reprompts=g.reprompts,
                    raw_text=g.raw_text,
                )
                for g in job.result.generations
            ],
            fused_bits=list(job.result.fused_bits),
            fused_source=job.result.fused_source,
            score=job.result.score,
        )
    return schemas.JobResponse(
        job_id=job.job_id,
        incident_id=job.incident_id,
        backend_id=job.backend_id,
        m=job.m,
        retry_budget=job.retry_budget,
        status=job.status.value,
        error=job.error,
        result=result,
    )


def create_app(config: AppConfig | None = None) -> FastAPI:
    engine = PlanningEngine(config or load_config())
    app = FastAPI(title="resplan", version="0.1.0")
    app.state.engine = engine
    # The operator console is served from a different origin during development.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/actions", response_model=schemas.ActionsResponse)
    def get_actions():
        return schemas.ActionsResponse(
            actions=[schemas.ActionOut(**row) for row in engine.actions_with_weights()],
            weight_source=engine.config.weight_source,
        )

    @app.post("/topsis/weights", response_model=schemas.WeightsResponse)
    def topsis_weights(request: schemas.WeightsRequest):
        try:
            matrix = DecisionMatrix(
                alternatives=tuple(a.label for a in request.alternatives),
                criteria=tuple(
                    CriterionSpec(c.name, c.weight, Kind(c.kind))
                    for c in request.criteria
                ),
                values=np.array([a.values for a in request.alternatives], dtype=float),
            )
            table = engine.topsis_weights(matrix)
        except (ZeroColumnError, ResplanError, ValueError) as err:
            raise HTTPException(status_code=400, detail=str(err))
        return schemas.WeightsResponse(
            weights=[
                schemas.WeightEntry(label=label, weight=weight)
                for label, weight in table.entries
            ]
        )

    @app.post("/plans/score", response_model=schemas.ScoreResponse)
    def score_plan(request: schemas.ScoreRequest):
        try:
            return schemas.ScoreResponse(**engine.score_bits(request.bits))
        except (ResplanError, ValueError) as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/plans/fuse", response_model=schemas.FuseResponse)
    def fuse_plans(request: schemas.FuseRequest):
        try:
            return schemas.FuseResponse(**engine.fuse_bits(request.plans))
        except (ResplanError, ValueError) as err:
            raise HTTPException(status_code=400, detail=str(err))

    @app.post("/plans/generate", response_model=schemas.JobResponse)
    def generate(request: schemas.GenerateRequest):
        if (request.incident_id is None) == (request.record is None):
            raise HTTPException(
                status_code=400,
                detail="provide exactly one of incident_id or record",
            )
        incident: str | IncidentRecord
        if request.incident_id is not None:
            incident = request.incident_id
        else:
            incident = IncidentRecord(**request.record.model_dump())
        try:
            job = engine.generate_plan(incident, m=request.m, backend_id=request.backend)
        except UnknownIncidentError as err:
            raise HTTPException(status_code=404, detail=str(err))
        except UnknownBackendError as err:
            raise HTTPException(status_code=404, detail=str(err))
        except (BackendFailure, ExtractionExhaustedError) as err:
            job = getattr(err, "job", None)
            detail = {"error": str(err)}
            if job is not None:
                detail["job_id"] = job.job_id
            raise HTTPException(status_code=502, detail=detail)
        except (ResplanError, ValueError) as err:
            raise HTTPException(status_code=400, detail=str(err))
        return _job_response(job)

    @app.get("/jobs/{job_id}", response_model=schemas.JobResponse)
    def get_job(job_id: str):
        try:
            return _job_response(engine.load_job(job_id))
        except UnknownIncidentError as err:
            raise HTTPException(status_code=404, detail=str(err))

    @app.get("/incidents/{incident_id}", response_model=schemas.IncidentSummary)
    def get_incident(incident_id: str):
        try:
            record = engine.incident(incident_id)
        except UnknownIncidentError as err:
            raise HTTPException(status_code=404, detail=str(err))
        return schemas.IncidentSummary(
            id=record.id,
            description=record.description,
            city=record.city,
            state=record.state,
            report=render_incident_report(record),
        )

    @app.post("/guidelines/synthesize", response_model=schemas.SynthesizeResponse)
    def synthesize(request: schemas.SynthesizeRequest):
        try:
            table = engine.synthesize(request.document, backend_id=request.backend)
        except EmptyDocumentError as err:
            raise HTTPException(status_code=400, detail=str(err))
        except UnknownBackendError as err:
            raise HTTPException(status_code=404, detail=str(err))
        except BackendFailure as err:
            raise HTTPException(status_code=502, detail=str(err))
        except SchemaViolationError as err:
            raise HTTPException(status_code=422, detail=str(err))
        payload = table.to_dict()
        return schemas.SynthesizeResponse(
            schema_version=payload["schema_version"],
            rows=[schemas.GuidelineRowOut(**row) for row in payload["rows"]],
        )

    return app


app = create_app()
