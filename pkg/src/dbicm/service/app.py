"""HTTP service around the sweep engine."""

from __future__ import annotations

import io

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse

from .. import __version__
from ..sweep import build_constellation, build_context, emit_csv
from .jobs import JobManager
from .models import (
    ConstellationPoint,
    ConstellationTable,
    SweepCreated,
    SweepRecordModel,
    SweepRequest,
    SweepStatus,
)


def create_app(manager: JobManager | None = None) -> FastAPI:
    app = FastAPI(
        title="dbicm sweep service",
        version=__version__,
        description="Submit Monte Carlo BER/FER sweeps for delayed BICM "
                    "receivers and fetch the results as CSV.",
    )
    jobs = manager if manager is not None else JobManager()

    def _status(job) -> SweepStatus:
        snap = jobs.snapshot(job)
        snap["records"] = [SweepRecordModel.from_record(r)
                           for r in snap["records"]]
        return SweepStatus(**snap)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/sweeps", response_model=SweepCreated, status_code=202)
    def create_sweep(req: SweepRequest) -> SweepCreated:
        cfg = req.to_sim_config()
        try:
            build_context(cfg)  # validate before accepting the job
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        job = jobs.submit(cfg, req.ebn0_points, req.workers)
        return SweepCreated(id=job.id, state=job.state)

    @app.get("/sweeps", response_model=list[SweepStatus])
    def list_sweeps() -> list:
        return [_status(job) for job in jobs.list_jobs()]

    @app.get("/sweeps/{job_id}", response_model=SweepStatus)
    def get_sweep(job_id: str) -> SweepStatus:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="no such sweep")
        return _status(job)

    @app.get("/sweeps/{job_id}/csv", response_class=PlainTextResponse)
    def get_sweep_csv(job_id: str) -> str:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="no such sweep")
        snap = jobs.snapshot(job)
        buf = io.StringIO()
        emit_csv(snap["records"], buf)
        return buf.getvalue()

    @app.delete("/sweeps/{job_id}", response_model=SweepStatus)
    def cancel_sweep(job_id: str) -> SweepStatus:
        job = jobs.cancel(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="no such sweep")
        return _status(job)

    @app.get("/constellations/{tag}")
    def constellation(
        tag: str,
        apsk_rate: str = Query(default="2/3"),
        format: str = Query(default="json", pattern="^(json|csv)$"),
    ):
        try:
            const = build_constellation(tag, apsk_rate)
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        points = [
            ConstellationPoint(
                label=int(i),
                bits="".join(str(b) for b in const.bits[i]),
                re=float(const.points[i].real),
                im=float(const.points[i].imag),
            )
            for i in range(const.points.size)
        ]
        if format == "csv":
            lines = ["label,bits,re,im"]
            lines += [f"{p.label},{p.bits},{p.re:.12g},{p.im:.12g}"
                      for p in points]
            return PlainTextResponse("\n".join(lines) + "\n")
        return ConstellationTable(name=const.name, m=const.m, points=points)

    return app


app = create_app()
