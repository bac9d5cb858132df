"""Request/response schemas for the sweep service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from ..sweep import SimConfig, SweepRecord


class SweepRequest(BaseModel):
    scheme: Literal["bicm", "dbicm", "dbicm-wd", "dbicm-id", "genie"] = "dbicm-wd"
    mod: Literal["qpsk", "qam16", "qam64", "apsk32"] = "qam16"
    apsk_rate: str = "2/3"
    delay: str = "0,1,0,1"
    tn: int = Field(default=101, ge=2, le=100000)
    window: int = Field(default=5, ge=1, le=1000)
    iters: int = Field(default=5, ge=1, le=1000)
    bp_iters: int = Field(default=50, ge=1, le=10000)
    bp_variant: Literal["sumprod", "minsum"] = "sumprod"
    demap_mode: Literal["exact", "maxlog"] = "exact"
    code: str = "peg:3,6,1200"
    interleaver: Literal["auto", "identity", "random"] = "auto"
    ebn0_points: List[float] = Field(min_length=1, max_length=1000)
    seed: int = 1
    min_error_frames: int = Field(default=100, ge=0)
    max_frames: int = Field(default=100000, ge=1)
    workers: int = Field(default=1, ge=1, le=64)

    @field_validator("delay")
    @classmethod
    def _delay_parses(cls, v: str) -> str:
        try:
            parts = [int(x) for x in v.split(",")]
        except ValueError as exc:
            raise ValueError(f"bad delay scheme {v!r}") from exc
        if not parts:
            raise ValueError("empty delay scheme")
        return v

    def to_sim_config(self) -> SimConfig:
        return SimConfig(
            scheme=self.scheme,
            mod=self.mod,
            apsk_rate=self.apsk_rate,
            delays=tuple(int(x) for x in self.delay.split(",")),
            t_n=self.tn,
            window=self.window,
            iters=self.iters,
            bp_iters=self.bp_iters,
            bp_variant=self.bp_variant,
            demap_mode=self.demap_mode,
            code_spec=self.code,
            interleaver=self.interleaver,
            master_seed=self.seed,
            min_error_frames=self.min_error_frames,
            max_frames=self.max_frames,
        )


class SweepRecordModel(BaseModel):
    scheme: str
    mod: str
    delay: str
    n: int
    k: int
    t_n: int
    window: Optional[int]
    iters: Optional[int]
    ebn0_db: float
    eta: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    mean_bp_iters: float
    demap_passes: int
    point_evals: int
    decode_calls: int
    truncated: bool

    @classmethod
    def from_record(cls, rec: SweepRecord) -> "SweepRecordModel":
        return cls(**rec.__dict__)


class SweepCreated(BaseModel):
    id: str
    state: str


class SweepStatus(BaseModel):
    id: str
    state: Literal["queued", "running", "done", "failed", "cancelled"]
    points_total: int
    points_done: int
    error: Optional[str] = None
    records: List[SweepRecordModel] = []


class ConstellationPoint(BaseModel):
    label: int
    bits: str
    re: float
    im: float


class ConstellationTable(BaseModel):
    name: str
    m: int
    points: List[ConstellationPoint]
