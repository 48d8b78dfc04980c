"""Matrix sequences: built-in perturbation models, file loading, detection.

A sequence is a deterministic generator ``k -> Mat2`` for k >= 1 together
with its declared limit matrix.  Built-in models:

constant               M_k = M for all k
power (E, p)           M_k = M + k^(-p) * E, entries clamped at 0
geometric (E, q)       M_k = M + q^k * E, entries clamped at 0
file                   finite list of rows, then the limit for larger k
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence, Tuple

from .errors import ParseError, ValidationError
from .mat2 import Mat2, Scalar, validate_limit_matrix

# Indices the contraction-rate estimator inspects; also the safety margin
# added to the detected stability index.
STABILITY_MARGIN = 32

Entries = Tuple[Scalar, Scalar, Scalar, Scalar]


@dataclass(frozen=True)
class MatrixSequence:
    """Deterministic indexed family of nonnegative 2x2 matrices."""

    limit: Mat2
    generator: Callable[[int], Mat2]
    model_tag: str
    # Last index at which any entry of a perturbation model was clamped to
    # zero (None: never; math.inf: an entry is clamped at every index).
    clamp_horizon: Optional[float] = None
    # For file models, max entrywise distance of the last row to the limit.
    final_gap: Optional[float] = None

    def at(self, k: int) -> Mat2:
        if k < 1:
            raise ValueError(f"sequence index must be >= 1, got {k}")
        return self.generator(k)

    def window(self, k_lo: int, k_hi: int) -> list[Mat2]:
        return [self.at(k) for k in range(k_lo, k_hi + 1)]


def _require_valid_limit(m: Mat2) -> None:
    report = validate_limit_matrix(m)
    if not report.passed:
        raise ValidationError(
            "limit matrix fails convergence hypotheses: " + "; ".join(report.failures()))


def constant_sequence(m: Mat2) -> MatrixSequence:
    """Sequence equal to ``m`` at every index."""
    _require_valid_limit(m)
    return MatrixSequence(limit=m, generator=lambda k: m, model_tag="constant")


def _clamp_horizon_power(limit: Entries, pert: Entries, p: float) -> Optional[float]:
    horizon = None
    for m, e in zip(limit, pert):
        if e >= 0:
            continue
        if m == 0:
            return math.inf
        # k^(-p) * |e| > m  iff  k < (|e|/m)^(1/p)
        edge = (abs(float(e)) / float(m)) ** (1.0 / p)
        last = math.ceil(edge) - 1
        if last >= 1:
            horizon = max(horizon or 0, last)
    return horizon


def _clamp_horizon_geometric(limit: Entries, pert: Entries, q: float) -> Optional[float]:
    horizon = None
    for m, e in zip(limit, pert):
        if e >= 0:
            continue
        if m == 0:
            return math.inf
        ratio = float(m) / abs(float(e))
        if ratio >= q:
            # q^k <= q < ratio for every k >= 1: never clamps
            continue
        last = math.ceil(math.log(ratio) / math.log(q)) - 1
        if last >= 1:
            horizon = max(horizon or 0, last)
    return horizon


def perturbed_sequence(limit: Mat2, pert: Entries, mode: str,
                       p: float | None = None, q: float | None = None) -> MatrixSequence:
    """Limit matrix plus a decaying signed perturbation, clamped at zero.

    Parameters
    ----------
    limit : Mat2
        Must pass the limit-matrix hypotheses.
    pert : tuple of 4 scalars
        Perturbation of (a, b, d, theta); entries may be negative.
    mode : "power" or "geometric"
        Decay factor k^(-p) with p > 0, or q^k with 0 < q < 1.

    Entries that would go negative are clamped to 0 and the last affected
    index is recorded in ``clamp_horizon``.
    """
    _require_valid_limit(limit)
    base = (limit.a, limit.b, limit.d, limit.theta)
    if len(pert) != 4:
        raise ValueError("perturbation must have 4 entries")
    if mode == "power":
        if p is None or not p > 0:
            raise ValueError("power mode needs p > 0")
        exact = isinstance(p, int) and all(isinstance(x, Rational) for x in base + tuple(pert))

        def factor(k: int) -> Scalar:
            return Fraction(1, k ** p) if exact else float(k) ** (-float(p))

        horizon = _clamp_horizon_power(base, pert, float(p))
        tag = "power"
    elif mode == "geometric":
        if q is None or not 0 < q < 1:
            raise ValueError("geometric mode needs 0 < q < 1")

        def factor(k: int) -> Scalar:
            return q ** k

        horizon = _clamp_horizon_geometric(base, pert, float(q))
        tag = "geometric"
    else:
        raise ValueError(f"unknown perturbation mode {mode!r}")

    def generator(k: int) -> Mat2:
        f = factor(k)
        vals = [x + f * e for x, e in zip(base, pert)]
        vals = [v if v > 0 else v * 0 for v in vals]  # clamp, field-preserving
        return Mat2(*vals)

    return MatrixSequence(limit=limit, generator=generator, model_tag=tag,
                          clamp_horizon=horizon)


def sequence_from_rows(rows: Sequence[Mat2], limit: Mat2,
                       model_tag: str = "file") -> MatrixSequence:
    """Finite prefix of explicit matrices, extended by the limit.

    Index k maps to rows[k-1] for k <= len(rows) and to the limit beyond.
    """
    _require_valid_limit(limit)
    if not rows:
        raise ValidationError("sequence needs at least one row")
    prefix = tuple(rows)
    last = prefix[-1]
    gap = max(abs(float(x) - float(y)) for x, y in
              zip((last.a, last.b, last.d, last.theta),
                  (limit.a, limit.b, limit.d, limit.theta)))

    def generator(k: int) -> Mat2:
        return prefix[k - 1] if k <= len(prefix) else limit

    return MatrixSequence(limit=limit, generator=generator, model_tag=model_tag,
                          final_gap=gap)


_COLUMNS = ["k", "a", "b", "d", "theta"]


def _parse_scalar(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"bad numeric value {token!r}", line) from None


def _rows_from_records(records: list, source: str) -> Tuple[list[Mat2], Mat2]:
    rows: list[Mat2] = []
    limit: Mat2 | None = None
    expected = 1
    for k, values, line in records:
        try:
            m = Mat2(*values)
        except ValueError as exc:
            raise ParseError(str(exc), line) from None
        if isinstance(k, str):
            if limit is not None:
                raise ParseError("duplicate limit row", line)
            limit = m
            continue
        if limit is not None:
            raise ParseError("data row after the limit row", line)
        if k != expected:
            what = "duplicate or out-of-order" if k < expected else "gap in"
            raise ParseError(f"{what} index k={k}; expected {expected}", line)
        expected += 1
        rows.append(m)
    if limit is None:
        raise ParseError(f"missing limit row (k=inf) in {source}")
    if not rows:
        raise ParseError(f"no data rows in {source}")
    return rows, limit


def _records_from_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file") from None
    if [h.strip() for h in header] != _COLUMNS:
        raise ParseError(f"header must be {','.join(_COLUMNS)}", 1)
    records = []
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", line)
        k_token = row[0].strip()
        if k_token.lower() == "inf":
            k: object = "inf"
        else:
            try:
                k = int(k_token)
            except ValueError:
                raise ParseError(f"bad index {k_token!r}", line) from None
        values = [_parse_scalar(cell.strip(), line) for cell in row[1:]]
        records.append((k, values, line))
    return records


def _records_from_json(text: str) -> list:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ParseError("top level must be a list of row objects")
    records = []
    for pos, obj in enumerate(data, start=1):
        if not isinstance(obj, dict) or set(obj) != set(_COLUMNS):
            raise ParseError(f"row must have keys {','.join(_COLUMNS)}", pos)
        k_raw = obj["k"]
        if isinstance(k_raw, str) and k_raw.lower() == "inf":
            k: object = "inf"
        elif isinstance(k_raw, int):
            k = k_raw
        else:
            raise ParseError(f"bad index {k_raw!r}", pos)
        values = []
        for name in _COLUMNS[1:]:
            v = obj[name]
            if not isinstance(v, (int, float)):
                raise ParseError(f"bad numeric value {v!r} for {name}", pos)
            values.append(float(v))
        records.append((k, values, pos))
    return records


def parse_sequence_text(text: str, fmt: str,
                        source: str = "<string>") -> Tuple[list[Mat2], Mat2]:
    """Parse sequence text ("csv" or "json") into (data rows, limit matrix)."""
    if fmt == "csv":
        records = _records_from_csv(text)
    elif fmt == "json":
        records = _records_from_json(text)
    else:
        raise ParseError(f"unknown sequence format {fmt!r}")
    return _rows_from_records(records, source)


def parse_sequence_file(path: str, fmt: str | None = None) -> Tuple[list[Mat2], Mat2]:
    """Read and parse a sequence file; format inferred from the extension."""
    if fmt is None:
        fmt = "json" if path.lower().endswith(".json") else "csv"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_sequence_text(text, fmt, source=path)


def loads_sequence(text: str, fmt: str, source: str = "<string>") -> MatrixSequence:
    """Parse sequence text in the given format ("csv" or "json")."""
    rows, limit = parse_sequence_text(text, fmt, source)
    return sequence_from_rows(rows, limit)


def load_sequence(path: str, fmt: str | None = None) -> MatrixSequence:
    """Load a sequence file; format inferred from the extension if not given.

    CSV: header ``k,a,b,d,theta``, data rows with k = 1, 2, ... consecutive,
    then one limit row with k = inf.  JSON mirrors the same fields as a list
    of objects.  Indices past the last data row yield the limit matrix.
    """
    rows, limit = parse_sequence_file(path, fmt)
    return sequence_from_rows(rows, limit)


def detect_stable_start(seq: MatrixSequence, run_length: int = 16,
                        scan_cap: int = 100_000) -> int:
    """First index from which the sign and positivity pattern has settled.

    Scans for ``run_length`` consecutive indices m with a_m + theta_m and
    b_m above half their limit values and sign(b_m d_m - a_m theta_m)
    matching the limit sign.  Returns the start of that run.
    """
    _require_valid_limit(seq.limit)
    lim = seq.limit
    half_trace = lim.trace() / 2
    half_b = lim.b / 2
    limit_gap = lim.b * lim.d - lim.a * lim.theta
    target_sign = 1 if limit_gap > 0 else -1

    run = 0
    for m in range(1, scan_cap + 1):
        mk = seq.at(m)
        gap = mk.b * mk.d - mk.a * mk.theta
        sign = 0 if gap == 0 else (1 if gap > 0 else -1)
        ok = mk.trace() > half_trace and mk.b > half_b and sign == target_sign
        run = run + 1 if ok else 0
        if run == run_length:
            return m - run_length + 1
    raise ValidationError(
        f"sequence never stabilizes within the first {scan_cap} indices")


def detect_k0(seq: MatrixSequence, run_length: int = 16,
              scan_cap: int = 100_000) -> int:
    """Stable start plus the contraction-window safety margin."""
    return detect_stable_start(seq, run_length, scan_cap) + STABILITY_MARGIN
