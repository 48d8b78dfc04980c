"""Request handlers: pure functions from request models to response models.

The CLI calls these directly for local runs; the FastAPI app exposes the
same functions over HTTP.  All failures surface as CfmpError subclasses,
mapped to exit codes by the CLI and to HTTP statuses by the app.
"""

from __future__ import annotations

import math

from ..asymptotics import (
    cf_from_sequence,
    psi,
    ratio_diagnostics,
    spectral_radius_ratio,
)
from ..contfrac import tails_range
from ..errors import DomainError, ParseError
from ..mat2 import Mat2, eigenvalues, validate_limit_matrix
from ..selftest import run_selftest
from ..sequences import (
    MatrixSequence,
    constant_sequence,
    perturbed_sequence,
    sequence_from_rows,
)
from . import schemas as s


def sequence_from_spec(spec: s.SequenceSpec) -> MatrixSequence:
    limit = Mat2(spec.a, spec.b, spec.d, spec.theta)
    if spec.model == "constant":
        return constant_sequence(limit)
    if spec.model == "power":
        return perturbed_sequence(limit, tuple(spec.pert), "power", p=spec.p)
    if spec.model == "geometric":
        return perturbed_sequence(limit, tuple(spec.pert), "geometric", q=spec.q)
    rows = []
    for pos, row in enumerate(spec.rows, start=1):
        if row.k != pos:
            raise ParseError(f"rows must have consecutive k from 1; "
                             f"row {pos} has k={row.k}")
        rows.append(Mat2(row.a, row.b, row.d, row.theta))
    return sequence_from_rows(rows, limit)


def _limit_matrix(spec: s.SequenceSpec) -> Mat2:
    return Mat2(spec.a, spec.b, spec.d, spec.theta)


def eigen(req: s.EigenRequest) -> s.EigenResponse:
    pair = eigenvalues(_limit_matrix(req.seq))
    return s.EigenResponse(rho=pair.rho, rho1=pair.rho1)


def validate(req: s.ValidateRequest) -> s.ValidateResponse:
    report = validate_limit_matrix(_limit_matrix(req.seq))
    return s.ValidateResponse(
        trace_nonzero=report.trace_nonzero,
        b_nonzero=report.b_nonzero,
        gap_nonzero=report.gap_nonzero,
        gap_sign=report.gap_sign,
        passed=report.passed,
        failures=report.failures(),
    )


def tails(req: s.TailsRequest) -> s.TailsResponse:
    seq = sequence_from_spec(req.seq)
    cf = cf_from_sequence(seq)
    estimates = tails_range(cf, req.k_lo, req.k_hi, req.tol,
                            depth_cap=req.depth_cap)
    return s.TailsResponse(rows=[
        s.TailRow(k=k, value=e.value, err_bound=e.err_bound,
                  depth=e.depth, rate=e.rate)
        for k, e in enumerate(estimates, start=req.k_lo)
    ])


def ratio(req: s.RatioRequest) -> s.RatioResponse:
    seq = sequence_from_spec(req.seq)
    diag = ratio_diagnostics(seq, req.k, req.i, req.j, req.n_max, tol=req.tol)
    return s.RatioResponse(
        k=diag.k, i=diag.i, j=diag.j, target=diag.target,
        sup_dev=diag.sup_dev, tail_err_bound=diag.tail_err_bound,
        rows=[s.RatioRow(n=n, pi=value, abs_dev=abs(value - diag.target))
              for n, value in diag.ratios],
    )


def approx_entry(req: s.ApproxEntryRequest) -> s.ApproxEntryResponse:
    """Direct scaled product entry vs the tail-product approximation.

    The approximation of e_i M_{k+1}...M_{k+n} e_j^t is
    psi(i,j,k) * prod_{m=k+1}^{k+n} 1/xi_m; both sides are compared on a
    log2 scale so n can run far past float range.
    """
    seq = sequence_from_spec(req.seq)
    cf = cf_from_sequence(seq)
    estimates = tails_range(cf, req.k + 1, req.k + req.n_max, req.tol)
    target = psi(seq, req.i, req.j, req.k, estimates[0].value)

    row = (1.0, 0.0) if req.i == 1 else (0.0, 1.0)
    scale = 0
    log_xi_sum = 0.0
    rows = []
    for n in range(1, req.n_max + 1):
        mat = seq.at(req.k + n)
        a, b = float(mat.a), float(mat.b)
        d, theta = float(mat.d), float(mat.theta)
        r1 = row[0] * a + row[1] * d
        r2 = row[0] * b + row[1] * theta
        top = max(abs(r1), abs(r2))
        if top > 0.0:
            _, exp = math.frexp(top)
            r1, r2 = math.ldexp(r1, -exp), math.ldexp(r2, -exp)
            scale += exp
        row = (r1, r2)

        xi = estimates[n - 1].value
        if not xi > 0.0:
            raise DomainError(
                f"tail at index {req.k + n} is not positive; log-scale "
                f"approximation undefined")
        log_xi_sum += math.log2(xi)

        comp = row[req.j - 1]
        log2_direct = None if comp == 0.0 else math.log2(abs(comp)) + scale
        log2_approx = None if target == 0.0 else math.log2(abs(target)) - log_xi_sum
        rel_err = None
        if log2_direct is not None and log2_approx is not None:
            sign_ratio = (1.0 if comp > 0 else -1.0) * (1.0 if target > 0 else -1.0)
            rel_err = abs(sign_ratio * 2.0 ** (log2_approx - log2_direct) - 1.0)
        rows.append(s.ApproxEntryRow(n=n, log2_direct=log2_direct,
                                     log2_approx=log2_approx, rel_err=rel_err))
    return s.ApproxEntryResponse(k=req.k, i=req.i, j=req.j, target=target,
                                 rows=rows)


def compare_spectral(req: s.CompareSpectralRequest) -> s.CompareSpectralResponse:
    seq = sequence_from_spec(req.seq)
    diag = ratio_diagnostics(seq, req.k, req.i, req.j, req.n_max, tol=req.tol)
    spectral = spectral_radius_ratio(seq, req.k, req.n_max, req.i, req.j)
    return s.CompareSpectralResponse(
        k=req.k, i=req.i, j=req.j,
        rows=[s.CompareSpectralRow(n=n, xi_ratio=pi_val, spectral_ratio=sp_val)
              for (n, pi_val), (_, sp_val) in zip(diag.ratios, spectral)],
    )


def selftest(req: s.SelftestRequest) -> s.SelftestResponse:
    results = run_selftest(seed=req.seed)
    return s.SelftestResponse(
        passed=all(r.passed for r in results),
        checks=[s.SelftestCheck(name=r.name, passed=r.passed, detail=r.detail)
                for r in results],
    )
