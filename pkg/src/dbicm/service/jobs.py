"""Background sweep jobs with cancellation.

Sweeps run on worker threads; the numeric core releases the GIL inside
numpy for the heavy steps, and multi-process workers are handled by the
sweep engine itself.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..sweep import SimConfig, SweepCancelled, SweepRecord, run_sweep


@dataclass
class Job:
    id: str
    cfg: SimConfig
    ebn0_points: List[float]
    workers: int
    state: str = "queued"
    points_done: int = 0
    records: List[SweepRecord] = field(default_factory=list)
    error: Optional[str] = None
    cancel_event: threading.Event = field(default_factory=threading.Event)
    thread: Optional[threading.Thread] = None


class JobManager:
    """Owns sweep jobs and their worker threads."""

    def __init__(self) -> None:
        self._jobs: Dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, cfg: SimConfig, ebn0_points: List[float],
               workers: int) -> Job:
        job = Job(id=uuid.uuid4().hex[:12], cfg=cfg,
                  ebn0_points=list(ebn0_points), workers=workers)
        with self._lock:
            self._jobs[job.id] = job
        thread = threading.Thread(target=self._run, args=(job,), daemon=True)
        job.thread = thread
        thread.start()
        return job

    def _run(self, job: Job) -> None:
        with self._lock:
            job.state = "running"

        def progress(idx: int, rec: SweepRecord) -> None:
            with self._lock:
                job.records.append(rec)
                job.points_done = idx + 1

        try:
            run_sweep(job.cfg, job.ebn0_points, workers=job.workers,
                      progress_cb=progress,
                      should_stop=job.cancel_event.is_set)
        except SweepCancelled:
            with self._lock:
                job.state = "cancelled"
        except Exception as exc:  # noqa: BLE001 - reported via the API
            with self._lock:
                job.state = "failed"
                job.error = f"{type(exc).__name__}: {exc}"
        else:
            with self._lock:
                job.state = "done"

    def get(self, job_id: str) -> Optional[Job]:
        with self._lock:
            return self._jobs.get(job_id)

    def list_jobs(self) -> List[Job]:
        with self._lock:
            return list(self._jobs.values())

    def cancel(self, job_id: str) -> Optional[Job]:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            return None
        job.cancel_event.set()
        return job

    def snapshot(self, job: Job) -> dict:
        """Consistent view of a job's mutable fields."""
        with self._lock:
            return {
                "id": job.id,
                "state": job.state,
                "points_total": len(job.ebn0_points),
                "points_done": job.points_done,
                "error": job.error,
                "records": list(job.records),
            }
