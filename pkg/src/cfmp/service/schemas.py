"""Request and response models for the HTTP service.

The CLI builds these same models and either calls the handlers in-process
or posts them to a running server; the wire format and the in-process
format are identical by construction.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class FileRow(BaseModel):
    k: int = Field(ge=1)
    a: float = Field(ge=0)
    b: float = Field(ge=0)
    d: float = Field(ge=0)
    theta: float = Field(ge=0)


class SequenceSpec(BaseModel):
    """A matrix sequence: a built-in decay model or explicit rows.

    a, b, d, theta are the limit matrix entries in all models.  Power decay
    adds pert * k^(-p); geometric decay adds pert * q^k; the file model uses
    explicit rows for k = 1.. and the limit beyond.
    """

    model: Literal["constant", "power", "geometric", "file"]
    a: float = Field(ge=0)
    b: float = Field(ge=0)
    d: float = Field(ge=0)
    theta: float = Field(ge=0)
    pert: Optional[Tuple[float, float, float, float]] = None
    p: Optional[float] = None
    q: Optional[float] = None
    rows: Optional[List[FileRow]] = None

    @model_validator(mode="after")
    def _check_model_fields(self) -> "SequenceSpec":
        if self.model == "power":
            if self.pert is None or self.p is None:
                raise ValueError("power model needs pert and p")
            if not self.p > 0:
                raise ValueError("power model needs p > 0")
        elif self.model == "geometric":
            if self.pert is None or self.q is None:
                raise ValueError("geometric model needs pert and q")
            if not 0 < self.q < 1:
                raise ValueError("geometric model needs 0 < q < 1")
        elif self.model == "file":
            if not self.rows:
                raise ValueError("file model needs at least one row")
        return self


class EigenRequest(BaseModel):
    seq: SequenceSpec


class EigenResponse(BaseModel):
    rho: float
    rho1: float


class ValidateRequest(BaseModel):
    seq: SequenceSpec


class ValidateResponse(BaseModel):
    trace_nonzero: bool
    b_nonzero: bool
    gap_nonzero: bool
    gap_sign: int
    passed: bool
    failures: List[str]


class TailsRequest(BaseModel):
    seq: SequenceSpec
    k_lo: int = Field(ge=1)
    k_hi: int = Field(ge=1)
    tol: float = Field(gt=0, default=1e-12)
    depth_cap: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "TailsRequest":
        if self.k_hi < self.k_lo:
            raise ValueError("need k_lo <= k_hi")
        return self


class TailRow(BaseModel):
    k: int
    value: float
    err_bound: float
    depth: int
    rate: float


class TailsResponse(BaseModel):
    rows: List[TailRow]


class RatioRequest(BaseModel):
    seq: SequenceSpec
    k: int = Field(ge=0)
    i: int = Field(ge=1, le=2)
    j: int = Field(ge=1, le=2)
    n_max: int = Field(ge=1, default=60)
    tol: float = Field(gt=0, default=1e-12)


class RatioRow(BaseModel):
    n: int
    pi: float
    abs_dev: float


class RatioResponse(BaseModel):
    k: int
    i: int
    j: int
    target: float
    sup_dev: float
    tail_err_bound: float
    rows: List[RatioRow]


class ApproxEntryRequest(BaseModel):
    seq: SequenceSpec
    k: int = Field(ge=0)
    i: int = Field(ge=1, le=2)
    j: int = Field(ge=1, le=2)
    n_max: int = Field(ge=1, default=60)
    tol: float = Field(gt=0, default=1e-12)


class ApproxEntryRow(BaseModel):
    n: int
    log2_direct: Optional[float]
    log2_approx: Optional[float]
    rel_err: Optional[float]


class ApproxEntryResponse(BaseModel):
    k: int
    i: int
    j: int
    target: float
    rows: List[ApproxEntryRow]


class CompareSpectralRequest(BaseModel):
    seq: SequenceSpec
    k: int = Field(ge=0)
    i: int = Field(ge=1, le=2)
    j: int = Field(ge=1, le=2)
    n_max: int = Field(ge=1, default=60)
    tol: float = Field(gt=0, default=1e-12)


class CompareSpectralRow(BaseModel):
    n: int
    xi_ratio: float
    spectral_ratio: float


class CompareSpectralResponse(BaseModel):
    k: int
    i: int
    j: int
    rows: List[CompareSpectralRow]


class SelftestRequest(BaseModel):
    seed: int = 20260814


class SelftestCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    checks: List[SelftestCheck]


class ErrorBody(BaseModel):
    failure_class: str
    message: str
    exit_code: int
