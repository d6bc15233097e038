"""HTTP surface over the engine.

Endpoints are the whole contract: a UI (or curl) drives the review loop
through recommendations, feedback, weights, training and export. The
service holds no state of its own; everything lives in the engine.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .engine import ConflictError, Engine, InvalidRequest
from .graph import UnknownIdError
from .metrics import EXISTENCE
from .predictor import Recommendation
from .storage import FeedbackEvent


class FeedbackBody(BaseModel):
    subject: str
    object: str
    accepted: bool
    mode: str
    relation: str | None = None
    link_relation: str | None = None
    timestamp: int | None = None


class TrainBody(BaseModel):
    mode: str
    standard: str | None = None
    sync: bool = False


def _rec_payload(engine: Engine, rec: Recommendation, mode: str) -> dict:
    item = {
        "subject": rec.subject,
        "object": rec.object,
        "relation": rec.relation,
        "score": rec.score,
        "source": rec.source,
        "rank": rec.rank,
        "subject_label": engine.node_payload(rec.subject)["label"],
        "object_label": engine.node_payload(rec.object)["label"],
    }
    if mode == EXISTENCE:
        item["compatible_relations"] = engine.relation_options(rec.subject, rec.object)
    return item


def _job_payload(job) -> dict:
    doc = {
        "id": job.id,
        "mode": job.mode,
        "standard": job.standard,
        "status": job.status,
        "error": job.error,
    }
    if job.report is not None:
        doc["report"] = {
            "best_fitness": job.report.best_fitness,
            "iterations_used": job.report.iterations_used,
            "fitness_trace": list(job.report.fitness_trace),
            "best_weights": list(job.report.best_weights.values),
        }
    return doc


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="kglf", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = engine

    @app.get("/nodes/{node_id}/recommendations")
    def recommendations(node_id: str, mode: str, k: int = 10, interleave: bool = False):
        try:
            recs = engine.recommend(node_id, mode, k, interleave)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        return {"node": node_id, "mode": mode, "items": [
            _rec_payload(engine, r, mode) for r in recs
        ]}

    @app.post("/feedback", status_code=201)
    def feedback(body: FeedbackBody):
        try:
            event = FeedbackEvent(
                subject=body.subject,
                object=body.object,
                relation=body.relation,
                accepted=body.accepted,
                timestamp=body.timestamp if body.timestamp is not None else int(time.time() * 1000),
                mode=body.mode,
                link_relation=body.link_relation,
            )
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from None
        try:
            recorded = engine.feedback(event)
        except ConflictError as exc:
            raise HTTPException(409, str(exc)) from None
        except InvalidRequest as exc:
            raise HTTPException(422, str(exc)) from None
        return recorded.to_record()

    @app.get("/weights")
    def get_weights(mode: str):
        try:
            names, vector, timestamp = engine.weights(mode)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        return {"mode": mode, "weights": vector.to_mapping(names), "timestamp": timestamp}

    @app.put("/weights")
    def put_weights(mode: str, body: dict):
        try:
            vector = engine.set_weights(mode, body)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        names, _v, timestamp = engine.weights(mode)
        return {"mode": mode, "weights": vector.to_mapping(names), "timestamp": timestamp}

    @app.post("/train")
    def train(body: TrainBody):
        try:
            job = engine.train(body.mode, body.standard, wait=body.sync)
        except ConflictError as exc:
            raise HTTPException(409, str(exc)) from None
        except InvalidRequest as exc:
            raise HTTPException(422, str(exc)) from None
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from None
        return _job_payload(job)

    @app.get("/train/{job_id}")
    def train_status(job_id: str):
        try:
            job = engine.job(job_id)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        return _job_payload(job)

    @app.get("/graph/summary")
    def summary():
        return engine.summary()

    @app.get("/nodes")
    def nodes(concept: str | None = None):
        try:
            ids = engine.nodes_of_concept(concept)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None
        return {"ids": ids}

    @app.get("/nodes/{node_id}")
    def node(node_id: str):
        try:
            return engine.node_payload(node_id)
        except UnknownIdError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.get("/export")
    def export(anonymize: bool = False):
        payload = engine.export_zip(anonymize)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": "attachment; filename=bundle.zip"},
        )

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8776) -> None:
    import uvicorn

    uvicorn.run(create_app(engine), host=host, port=port, log_level="warning")
