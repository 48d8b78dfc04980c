"""Command-line front end emitting machine-readable convergence tables.

Each subcommand builds a request model, obtains a response either by
calling the in-process handlers or by posting to a running server
(--server), and renders the response as CSV (default) or JSON.  Floats in
CSV output use 17 significant digits so binary64 values round-trip.

Exit codes: 0 success, 1 internal/selftest failure, 2 parse, 3 validation,
4 convergence, 5 arithmetic.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from .errors import CfmpError, ParseError
from .sequences import parse_sequence_file
from .service import handlers
from .service import schemas as s

_MODELS = ("constant", "power", "geometric")


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ParseError(f"{what} needs {count} comma-separated values, "
                         f"got {len(parts)}")
    out = []
    for p in parts:
        try:
            out.append(float(p))
        except ValueError:
            raise ParseError(f"bad numeric value {p!r} in {what}") from None
    return out


def _parse_model_options(rest: str, what: str) -> tuple[list[float], dict[str, str]]:
    parts = rest.split(";")
    vals = _parse_floats(parts[0], 4, f"{what} limit entries")
    opts: dict[str, str] = {}
    for part in parts[1:]:
        key, eq, val = part.partition("=")
        if not eq:
            raise ParseError(f"expected key=value in {what} spec, got {part!r}")
        opts[key.strip()] = val.strip()
    return vals, opts


def parse_seq_arg(text: str) -> s.SequenceSpec:
    """--seq argument: a model spec or a sequence file path.

    Model grammar:
      constant:a,b,d,theta
      power:a,b,d,theta;e=ea,eb,ed,etheta;p=P
      geometric:a,b,d,theta;e=ea,eb,ed,etheta;q=Q
    Anything else is treated as a path to a CSV or JSON sequence file.
    """
    head, colon, rest = text.partition(":")
    try:
        if colon and head in _MODELS:
            if head == "constant":
                vals = _parse_floats(rest, 4, "constant")
                return s.SequenceSpec(model="constant", a=vals[0], b=vals[1],
                                      d=vals[2], theta=vals[3])
            vals, opts = _parse_model_options(rest, head)
            if "e" not in opts:
                raise ParseError(f"{head} spec needs e=ea,eb,ed,etheta")
            pert = tuple(_parse_floats(opts["e"], 4, "perturbation"))
            if head == "power":
                if "p" not in opts:
                    raise ParseError("power spec needs p=...")
                return s.SequenceSpec(model="power", a=vals[0], b=vals[1],
                                      d=vals[2], theta=vals[3], pert=pert,
                                      p=float(opts["p"]))
            if "q" not in opts:
                raise ParseError("geometric spec needs q=...")
            return s.SequenceSpec(model="geometric", a=vals[0], b=vals[1],
                                  d=vals[2], theta=vals[3], pert=pert,
                                  q=float(opts["q"]))
        rows, limit = parse_sequence_file(text)
        return s.SequenceSpec(
            model="file",
            a=float(limit.a), b=float(limit.b), d=float(limit.d),
            theta=float(limit.theta),
            rows=[s.FileRow(k=pos, a=float(m.a), b=float(m.b), d=float(m.d),
                            theta=float(m.theta))
                  for pos, m in enumerate(rows, start=1)],
        )
    except PydanticValidationError as exc:
        raise ParseError(f"bad sequence spec: {exc}") from None
    except ValueError as exc:
        raise ParseError(f"bad sequence spec: {exc}") from None


def _parse_entry(text: str) -> tuple[int, int]:
    if len(text) == 2 and text[0] in "12" and text[1] in "12":
        return int(text[0]), int(text[1])
    raise ParseError(f"--entry must be two digits from {{1,2}} like 11, got {text!r}")


def _parse_k_range(args: argparse.Namespace) -> tuple[int, int]:
    if args.k_range is not None:
        lo, sep, hi = args.k_range.partition("..")
        if not sep:
            raise ParseError(f"--k-range must look like A..B, got {args.k_range!r}")
        try:
            return int(lo), int(hi)
        except ValueError:
            raise ParseError(f"bad --k-range bounds {args.k_range!r}") from None
    if args.k is not None:
        return args.k, args.k
    raise ParseError("tails needs --k or --k-range")


class _RemoteError(CfmpError):
    """Failure reported by (or while reaching) a remote server."""

    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def _post(server: str, path: str, payload) -> dict:
    import httpx

    url = server.rstrip("/") + path
    try:
        response = httpx.post(url, json=payload.model_dump(), timeout=600.0)
    except httpx.HTTPError as exc:
        raise _RemoteError(f"cannot reach {url}: {exc}") from None
    if response.status_code != 200:
        try:
            body = response.json()
        except ValueError:
            raise _RemoteError(
                f"server returned {response.status_code}") from None
        raise _RemoteError(str(body.get("message", response.text)),
                           int(body.get("exit_code", 1)))
    return response.json()


def _dispatch(args: argparse.Namespace, path: str, payload, handler) -> dict:
    if args.server:
        return _post(args.server, path, payload)
    return handler(payload).model_dump()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, list):
        return "; ".join(str(v) for v in value)
    return str(value)


def _emit(args: argparse.Namespace, response: dict, columns: list[str],
          rows: list[dict]) -> None:
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump(response, out, indent=2)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row.get(c)) for c in columns])
    finally:
        if args.out:
            out.close()


def _seq_spec(args: argparse.Namespace) -> s.SequenceSpec:
    return parse_seq_arg(args.seq)


def _cmd_eigen(args) -> int:
    resp = _dispatch(args, "/v1/eigen", s.EigenRequest(seq=_seq_spec(args)),
                     handlers.eigen)
    _emit(args, resp, ["rho", "rho1"], [resp])
    return 0


def _cmd_validate(args) -> int:
    resp = _dispatch(args, "/v1/validate", s.ValidateRequest(seq=_seq_spec(args)),
                     handlers.validate)
    columns = ["trace_nonzero", "b_nonzero", "gap_nonzero", "gap_sign",
               "passed", "failures"]
    _emit(args, resp, columns, [resp])
    if not resp["passed"]:
        for failure in resp["failures"]:
            print(f"validation: {failure}", file=sys.stderr)
        return 3
    return 0


def _cmd_tails(args) -> int:
    k_lo, k_hi = _parse_k_range(args)
    req = s.TailsRequest(seq=_seq_spec(args), k_lo=k_lo, k_hi=k_hi,
                         tol=args.tol, depth_cap=args.depth_cap)
    resp = _dispatch(args, "/v1/tails", req, handlers.tails)
    _emit(args, resp, ["k", "value", "err_bound", "depth", "rate"], resp["rows"])
    return 0


def _cmd_ratio(args) -> int:
    i, j = _parse_entry(args.entry)
    req = s.RatioRequest(seq=_seq_spec(args), k=args.k, i=i, j=j,
                         n_max=args.n_max, tol=args.tol)
    resp = _dispatch(args, "/v1/ratio", req, handlers.ratio)
    rows = [dict(row, target=resp["target"]) for row in resp["rows"]]
    _emit(args, resp, ["n", "pi", "target", "abs_dev"], rows)
    return 0


def _cmd_approx_entry(args) -> int:
    i, j = _parse_entry(args.entry)
    req = s.ApproxEntryRequest(seq=_seq_spec(args), k=args.k, i=i, j=j,
                               n_max=args.n_max, tol=args.tol)
    resp = _dispatch(args, "/v1/approx-entry", req, handlers.approx_entry)
    _emit(args, resp, ["n", "log2_direct", "log2_approx", "rel_err"], resp["rows"])
    return 0


def _cmd_compare_spectral(args) -> int:
    i, j = _parse_entry(args.entry)
    req = s.CompareSpectralRequest(seq=_seq_spec(args), k=args.k, i=i, j=j,
                                   n_max=args.n_max, tol=args.tol)
    resp = _dispatch(args, "/v1/compare-spectral", req, handlers.compare_spectral)
    _emit(args, resp, ["n", "xi_ratio", "spectral_ratio"], resp["rows"])
    return 0


def _cmd_selftest(args) -> int:
    req = s.SelftestRequest(seed=args.seed)
    resp = _dispatch(args, "/v1/selftest", req, handlers.selftest)
    _emit(args, resp, ["name", "passed", "detail"], resp["checks"])
    return 0 if resp["passed"] else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfmp",
        description="Asymptotics of entry growth in products of nonnegative "
                    "2x2 matrices via continued-fraction tails")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--server", default=None,
                        help="base URL of a running service; default is in-process")

    seq_opt = argparse.ArgumentParser(add_help=False)
    seq_opt.add_argument("--seq", required=True,
                         help="sequence file path or model spec "
                              "(constant:a,b,d,theta / power:...;e=...;p=... / "
                              "geometric:...;e=...;q=...)")

    p = sub.add_parser("eigen", parents=[common, seq_opt],
                       help="eigenvalues of the limit matrix")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("validate", parents=[common, seq_opt],
                       help="limit-matrix hypothesis report (exit 3 on failure)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("tails", parents=[common, seq_opt],
                       help="tail values with certified error bounds over a k-range")
    p.add_argument("--k", type=int, default=None, help="single index")
    p.add_argument("--k-range", default=None, help="index range A..B")
    p.add_argument("--tol", type=float, default=1e-12,
                   help="certified error tolerance (default 1e-12)")
    p.add_argument("--depth-cap", type=int, default=None,
                   help="override the tail depth cap (also: CFMP_DEPTH_CAP)")
    p.set_defaults(func=_cmd_tails)

    for name, func, description in (
            ("ratio", _cmd_ratio,
             "normalized entry products against their limit target"),
            ("approx-entry", _cmd_approx_entry,
             "direct scaled entry vs the tail-product approximation"),
            ("compare-spectral", _cmd_compare_spectral,
             "tail normalization vs per-index spectral-radius normalization")):
        p = sub.add_parser(name, parents=[common, seq_opt], help=description)
        p.add_argument("--k", type=int, default=0,
                       help="products start at index k+1 (default 0)")
        p.add_argument("--entry", default="11",
                       help="entry pair ij with i,j in {1,2} (default 11)")
        p.add_argument("--n-max", type=int, default=60,
                       help="number of product steps (default 60)")
        p.add_argument("--tol", type=float, default=1e-12,
                       help="tail tolerance (default 1e-12)")
        p.set_defaults(func=func)

    p = sub.add_parser("selftest", parents=[common],
                       help="oracle certification suite (exit 1 on any failure)")
    p.add_argument("--seed", type=int, default=20260814,
                   help="seed for the randomized checks (default 20260814)")
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PydanticValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CfmpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
