"""Execute a ``SweepSpec`` and write the results as CSV."""

from __future__ import annotations

import csv
import io
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ..analytic import Scheme, overall_sop, sop
from ..channel import RngStream
from ..errors import ModelWarning
from ..montecarlo import estimate_cells
from .config import SweepSpec

CSV_COLUMNS = ("axis", "scheme", "method", "p_macro", "p_small", "p_overall", "stderr",
               "wall_time_ms", "error")


@dataclass(frozen=True)
class ResultRow:
    """One (axis value, scheme, method) result.

    ``stderr`` is set only for Monte-Carlo rows; the probabilities are None
    and ``error`` holds the message when the point failed.
    """

    axis: float
    scheme: str
    method: str
    p_macro: float | None = None
    p_small: float | None = None
    p_overall: float | None = None
    stderr: float | None = None
    wall_time_ms: float | None = None
    error: str = ""


def _evaluate(spec: SweepSpec, index: int, value: float, scheme: Scheme, method: str,
              timing: bool) -> ResultRow:
    start = time.perf_counter()
    try:
        cfg = spec.config_at(value)
        with warnings.catch_warnings():
            # the weak-interference warning would repeat for every point
            warnings.simplefilter("ignore", ModelWarning)
            if method == "analytic":
                pm = sop(scheme, "macro", cfg, spec.gains)
                ps = sop(scheme, "small", cfg, spec.gains)
                po = overall_sop(pm, ps, spec.combiner)
                se = None
            else:
                # one stream per point, shared by all schemes at that point
                est = estimate_cells(scheme, cfg, spec.gains, spec.mc_samples,
                                     RngStream(spec.seed, index))
                pm, ps = est.macro.p_hat, est.small.p_hat
                po, se = est.overall(spec.combiner)
    except (ArithmeticError, ValueError) as exc:
        return ResultRow(value, scheme.value, method, error=f"{type(exc).__name__}: {exc}")
    elapsed = (time.perf_counter() - start) * 1e3 if timing else None
    return ResultRow(value, scheme.value, method, pm, ps, po, se, elapsed)


def _point_rows(args):
    spec, index, value, timing = args
    return [_evaluate(spec, index, value, scheme, method, timing)
            for scheme in spec.schemes for method in spec.methods]


def run_sweep(spec: SweepSpec, workers: int = 1, timing: bool = False) -> list[ResultRow]:
    """Evaluate every (axis value, scheme, method) combination.

    Points run concurrently on up to ``workers`` processes.  Rows come back
    in axis order, then scheme, then method, whatever the worker count.
    Monte-Carlo draws for point ``i`` come from ``RngStream(seed, i)``, so
    the numbers do not depend on ``workers``.  Wall-clock times are only
    recorded with ``timing=True`` since they would break byte-identical
    output.
    """
    jobs = [(spec, i, v, timing) for i, v in enumerate(spec.values)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_point_rows, jobs))
    else:
        chunks = [_point_rows(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def _fmt(v):
    return "" if v is None else format(v, ".10g")


def format_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r.axis), r.scheme, r.method, _fmt(r.p_macro), _fmt(r.p_small),
                         _fmt(r.p_overall), _fmt(r.stderr), _fmt(r.wall_time_ms), r.error])
    return buf.getvalue()


def emit_csv(rows, destination) -> None:
    """Write ``rows`` as UTF-8 CSV with 10 significant digits.

    ``destination`` is a path or a text stream.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    text = format_csv(rows)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv(source) -> list[ResultRow]:
    """Parse a file written by :func:`emit_csv`."""
    def num(s):
        return float(s) if s != "" else None

    with open(source, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [ResultRow(float(r["axis"]), r["scheme"], r["method"], num(r["p_macro"]),
                          num(r["p_small"]), num(r["p_overall"]), num(r["stderr"]),
                          num(r["wall_time_ms"]), r["error"]) for r in reader]
