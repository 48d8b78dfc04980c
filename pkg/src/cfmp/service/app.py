"""FastAPI application exposing the computation handlers.

Failure classes map onto HTTP statuses; every error body carries the
failure class and the CLI exit code so thin clients can propagate both.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..errors import CfmpError
from . import handlers
from . import schemas as s

_STATUS_BY_CLASS = {
    "parse": 400,
    "validation": 422,
    "convergence": 409,
    "arithmetic": 422,
    "internal": 500,
}


def create_app() -> FastAPI:
    app = FastAPI(title="cfmp", version="0.1.0",
                  description="Asymptotics of entry growth in products of "
                              "nonnegative 2x2 matrices via continued-fraction tails")

    @app.exception_handler(CfmpError)
    async def _cfmp_error(request: Request, exc: CfmpError) -> JSONResponse:
        body = s.ErrorBody(failure_class=exc.failure_class, message=str(exc),
                           exit_code=exc.exit_code)
        return JSONResponse(status_code=_STATUS_BY_CLASS.get(exc.failure_class, 500),
                            content=body.model_dump())

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request,
                             exc: RequestValidationError) -> JSONResponse:
        body = s.ErrorBody(failure_class="parse", message=str(exc), exit_code=2)
        return JSONResponse(status_code=400, content=body.model_dump())

    @app.post("/v1/eigen", response_model=s.EigenResponse)
    async def eigen(req: s.EigenRequest) -> s.EigenResponse:
        return handlers.eigen(req)

    @app.post("/v1/validate", response_model=s.ValidateResponse)
    async def validate(req: s.ValidateRequest) -> s.ValidateResponse:
        return handlers.validate(req)

    @app.post("/v1/tails", response_model=s.TailsResponse)
    async def tails(req: s.TailsRequest) -> s.TailsResponse:
        return handlers.tails(req)

    @app.post("/v1/ratio", response_model=s.RatioResponse)
    async def ratio(req: s.RatioRequest) -> s.RatioResponse:
        return handlers.ratio(req)

    @app.post("/v1/approx-entry", response_model=s.ApproxEntryResponse)
    async def approx_entry(req: s.ApproxEntryRequest) -> s.ApproxEntryResponse:
        return handlers.approx_entry(req)

    @app.post("/v1/compare-spectral", response_model=s.CompareSpectralResponse)
    async def compare_spectral(
            req: s.CompareSpectralRequest) -> s.CompareSpectralResponse:
        return handlers.compare_spectral(req)

    @app.post("/v1/selftest", response_model=s.SelftestResponse)
    async def selftest(req: s.SelftestRequest) -> s.SelftestResponse:
        return handlers.selftest(req)

    return app


app = create_app()
