"""HTTP service wrapping the sweep engine."""

from .app import create_app
from .jobs import Job, JobManager
from .models import SweepRequest, SweepStatus

__all__ = ["create_app", "Job", "JobManager", "SweepRequest", "SweepStatus"]
