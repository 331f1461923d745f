"""Command-line front end.

Four subcommands: ``analyze`` (one parameter point, full report),
``scan`` (verdict grid as CSV), ``boundary`` (one boundary curve as CSV)
and ``compare`` (exact vs approximate boundary table as CSV).

Contract: data goes to stdout (or ``--output``), diagnostics to stderr.
Exit codes: 0 success, 2 validation failure, 3 numeric range error,
4 boundary tracing with more than 10% of samples omitted.  JSON numbers
carry 17 significant digits, CSV floats 12.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import averaging, pendulum, scan, stability
from .averaging import SeriesSystem
from .errors import FloquetError, ModelError, NumericRangeError
from .exactmono import exact_monodromy_pc, exact_monodromy_rk, pc_from_ppoly
from .ppoly import PiecewisePolyMatrix

RK_STEPS_DEFAULT = 512

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4


# ---------------------------------------------------------------------------
# model registry

def _build_meissner(args) -> "ModelSpec":
    for name in ("omega", "eps", "beta"):
        if getattr(args, name) is None:
            raise ModelError(f"--{name} is required for model '{pendulum.MODEL_NAME}'")
    params = pendulum.PendulumParams(args.omega, args.eps, args.beta)
    return ModelSpec(
        name=pendulum.MODEL_NAME,
        series=pendulum.series_split(params),
        pc=pendulum.jacobians(params),
        params=params,
    )


MODEL_REGISTRY = {pendulum.MODEL_NAME: _build_meissner}


class ModelSpec:
    """A loaded model: graded series plus, when derivable, its
    piecewise-constant form for the exponential-product oracle."""

    def __init__(self, name, series: SeriesSystem, pc=None, params=None):
        self.name = name
        self.series = series
        self.pc = pc
        self.params = params


def load_model_file(path: str) -> ModelSpec:
    """Custom model from JSON: period, nilpotent J0, graded polynomial terms."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelError(f"cannot read model file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError("model file must hold a JSON object")
    name = doc.get("name", "custom")
    if name != "custom":
        raise ModelError(f"model files must declare name 'custom', got {name!r}")
    try:
        period = float(doc["period"])
        j0 = np.asarray(doc["J0"], dtype=float)
        raw_terms = doc["terms"]
    except KeyError as exc:
        raise ModelError(f"model file is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ModelError(f"malformed model file: {exc}") from exc
    by_order = {}
    for term in raw_terms:
        order = term.get("order")
        if not isinstance(order, int) or order < 1:
            raise ModelError(f"term order must be a positive integer, got {order!r}")
        if order in by_order:
            raise ModelError(f"duplicate term order {order}")
        by_order[order] = _term_to_ppoly(term, period)
    if not by_order:
        raise ModelError("model file declares no terms")
    top = max(by_order)
    dim = j0.shape[0] if j0.ndim == 2 else 0
    terms = tuple(
        by_order.get(k, PiecewisePolyMatrix.zero(dim, period))
        for k in range(1, top + 1)
    )
    series = SeriesSystem(period, j0, terms)
    total = averaging.series_total(series)
    pc = pc_from_ppoly(total) if total.max_degree == 0 else None
    return ModelSpec(name="custom", series=series, pc=pc)


def _term_to_ppoly(term, period: float) -> PiecewisePolyMatrix:
    pieces_doc = term.get("pieces")
    if not pieces_doc:
        raise ModelError("each term needs a non-empty 'pieces' list")
    pieces_doc = sorted(pieces_doc, key=lambda p: float(p["t_start"]))
    breaks = [0.0]
    blocks = []
    for piece in pieces_doc:
        t_start = float(piece["t_start"])
        t_end = float(piece["t_end"])
        if abs(t_start - breaks[-1]) > 1e-12 * period:
            raise ModelError(
                f"term pieces must tile [0, T] contiguously; gap at t = {t_start:g}"
            )
        entries = piece["entries"]
        n = len(entries)
        dmax = max(len(c) for row in entries for c in row)
        block = np.zeros((n, n, dmax))
        for i, row in enumerate(entries):
            if len(row) != n:
                raise ModelError("entries must form a square matrix of coefficient lists")
            for j, coeff in enumerate(row):
                block[i, j, : len(coeff)] = np.asarray(coeff, dtype=float)
        blocks.append(block)
        breaks.append(t_end)
    if abs(breaks[-1] - period) > 1e-12 * period:
        raise ModelError(f"term pieces end at t = {breaks[-1]:g}, expected the period {period:g}")
    breaks[-1] = period
    return PiecewisePolyMatrix(period, np.asarray(breaks), tuple(blocks))


# ---------------------------------------------------------------------------
# serialization helpers

def format_float(x: float, digits: int = 17) -> str:
    if math.isnan(x):
        return "NaN"
    return format(float(x), f".{digits}g")


def dumps_json(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits (round-trip exact)."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {dumps_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in seq)
        if flat:
            return "[" + ", ".join(dumps_json(v) for v in seq) + "]"
        items = [inner + dumps_json(v, indent + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _matrix_list(m) -> list:
    return [[float(x) for x in row] for row in np.asarray(m)]


def _report_dict(report: stability.StabilityReport, f=None) -> dict:
    doc = {
        "trace": report.trace,
        "determinant": report.determinant,
        "multipliers": [{"re": r.real, "im": r.imag} for r in report.multipliers],
        "margin_trace": report.margin_trace,
        "margin_det": report.margin_det,
        "verdict": report.verdict.value,
    }
    if f is not None:
        doc["F"] = _matrix_list(f)
    return doc


def _write_output(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# analyze

def cmd_analyze(args) -> int:
    if not 1 <= args.order <= averaging.MAX_ORDER:
        raise ModelError(f"--order {args.order} exceeds the supported cap {averaging.MAX_ORDER}")
    if args.model_file:
        model = load_model_file(args.model_file)
    else:
        try:
            builder = MODEL_REGISTRY[args.model]
        except KeyError:
            raise ModelError(
                f"unknown model {args.model!r}; registered: {sorted(MODEL_REGISTRY)}"
            ) from None
        model = builder(args)

    sys_ = model.series
    x0, h_terms = averaging.standard_form(sys_)
    avg = averaging.run_recursion(h_terms, sys_.period, args.order)
    mono = averaging.assemble_monodromy(x0, avg, sys_.period)
    f_approx = mono.partial_sums[-1]
    det_full = stability.det_series(sys_, avg)
    det_trunc = stability.det_series_expansion(sys_, avg, args.order)

    doc = {
        "model": model.name,
        "params": None,
        "order": args.order,
        "period": sys_.period,
        "tolerance": args.tolerance,
        "A": [_matrix_list(a) for a in avg.A],
        "closure_residuals": list(avg.closure_residuals),
        "trace_by_order": list(mono.trace_by_order),
        "det_series": det_full,
        "det_series_truncated": det_trunc,
        "F0": _matrix_list(mono.F0),
        "F_approx": _matrix_list(f_approx),
    }
    if model.params is not None:
        doc["params"] = {
            "omega": model.params.omega,
            "eps": model.params.eps,
            "beta": model.params.beta,
        }
    if sys_.dim == 2:
        trace = float(sum(mono.trace_by_order))
        doc["approx"] = _report_dict(
            stability.report_from_trace_det(trace, det_trunc, args.tolerance)
        )
        doc["multipliers_approx"] = doc["approx"]["multipliers"]
    else:
        doc["approx"] = None
    doc["exact_pc"] = None
    doc["exact_rk"] = None
    if model.pc is not None:
        f_pc = exact_monodromy_pc(model.pc)
        doc["exact_pc"] = (
            _report_dict(stability.classify(f_pc, args.tolerance), f_pc)
            if sys_.dim == 2 else {"F": _matrix_list(f_pc)}
        )
    f_rk = exact_monodromy_rk(averaging.series_total(sys_), args.rk_steps)
    doc["exact_rk"] = (
        _report_dict(stability.classify(f_rk, args.tolerance), f_rk)
        if sys_.dim == 2 else {"F": _matrix_list(f_rk)}
    )

    if args.format == "json":
        _write_output(dumps_json(doc) + "\n", args.output)
    else:
        _write_output(_render_text(doc), args.output)
    return EXIT_OK


def _render_text(doc, prefix="") -> str:
    lines = []
    for key, value in doc.items():
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.append(_render_text(value, prefix + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], list):
            lines.append(f"{prefix}{key}:")
            for row in value:
                lines.append(f"{prefix}  {row}")
        else:
            lines.append(f"{prefix}{key}: {value}")
    return "\n".join(lines) + ("\n" if not prefix else "")


# ---------------------------------------------------------------------------
# scan

def parse_range(spec: str, minimum_count: int = 1):
    try:
        lo_s, hi_s, count_s = spec.split(":")
        lo, hi, count = float(lo_s), float(hi_s), int(count_s)
    except ValueError as exc:
        raise ModelError(f"range must be min:max:count, got {spec!r}") from exc
    if count < minimum_count:
        raise ModelError(f"range count must be >= {minimum_count}, got {count}")
    if count == 1:
        if lo != hi:
            raise ModelError("a single-sample range needs min == max")
    elif not lo < hi:
        raise ModelError(f"range needs min < max, got {spec!r}")
    return lo, hi, count


def cmd_scan(args) -> int:
    omega_axis = parse_range(args.omega, minimum_count=2)
    eps_axis = parse_range(args.eps, minimum_count=2)
    grid = scan.scan_region(omega_axis, eps_axis, args.beta, args.method,
                            threads=args.threads, tolerance=args.tolerance)
    lines = ["omega,eps,beta,method,verdict,margin_trace,margin_det"]
    omegas = grid.omega_samples
    epss = grid.eps_samples
    for ie in range(epss.size):
        for io in range(omegas.size):
            lines.append(",".join((
                format_float(omegas[io], 12),
                format_float(epss[ie], 12),
                format_float(args.beta, 12),
                args.method,
                grid.verdicts[ie, io],
                format_float(grid.margin_trace[ie, io], 12),
                format_float(grid.margin_det[ie, io], 12),
            )))
    _write_output("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# boundary / compare

def cmd_boundary(args) -> int:
    omega_range = parse_range(args.omega)
    curve = scan.trace_boundary(omega_range, args.beta, args.branch, args.method,
                                tol=args.tol)
    lines = ["omega,eps,branch,method"]
    for omega, eps in curve.points:
        lines.append(",".join((
            format_float(omega, 12),
            format_float(eps, 12),
            curve.branch,
            curve.method,
        )))
    _write_output("\n".join(lines) + "\n", args.output)
    total = omega_range[2]
    if curve.omitted:
        print(f"boundary: omitted {curve.omitted} of {total} samples", file=sys.stderr)
    if curve.omitted > 0.1 * total:
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_compare(args) -> int:
    omega_range = parse_range(args.omega)
    table = scan.compare_boundaries(omega_range, args.beta, tol=args.tol)
    lines = ["omega,branch,eps_exact,eps_order2,eps_order4,err2,err4"]

    def cell(x):
        return "" if x is None else format_float(x, 12)

    failures = 0
    for row in table.rows:
        if row.eps_exact is None:
            failures += 1
        lines.append(",".join((
            format_float(row.omega, 12),
            row.branch,
            cell(row.eps_exact),
            cell(row.eps_order2),
            cell(row.eps_order4),
            cell(row.err2),
            cell(row.err4),
        )))
    _write_output("\n".join(lines) + "\n", args.output)
    if failures:
        print(f"compare: {failures} of {len(table.rows)} samples lack an exact root",
              file=sys.stderr)
    if failures > 0.1 * len(table.rows):
        return EXIT_PARTIAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-avg",
        description="Averaged monodromy approximations and stability boundaries "
                    "for linear periodic ODE systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output", help="write the document here instead of stdout")

    p_an = sub.add_parser("analyze", help="full report for one parameter point")
    p_an.add_argument("--model", default=pendulum.MODEL_NAME)
    p_an.add_argument("--model-file", help="JSON file with a custom graded model")
    p_an.add_argument("--omega", type=float)
    p_an.add_argument("--eps", type=float)
    p_an.add_argument("--beta", type=float)
    p_an.add_argument("--order", type=int, default=4)
    p_an.add_argument("--format", choices=("json", "text"), default="json")
    p_an.add_argument("--tolerance", type=float, default=stability.DEFAULT_TOLERANCE)
    p_an.add_argument("--rk-steps", type=int, default=RK_STEPS_DEFAULT)
    add_common(p_an)
    p_an.set_defaults(func=cmd_analyze)

    p_sc = sub.add_parser("scan", help="stability verdict grid as CSV")
    p_sc.add_argument("--omega", required=True, help="min:max:count")
    p_sc.add_argument("--eps", required=True, help="min:max:count")
    p_sc.add_argument("--beta", type=float, default=0.0)
    p_sc.add_argument("--method", default="exact-pc",
                      help="exact-pc, exact-rk, or order1..order6")
    p_sc.add_argument("--threads", type=int, default=None,
                      help="worker threads (default: FLOQUET_AVG_THREADS or all cores)")
    p_sc.add_argument("--tolerance", type=float, default=stability.DEFAULT_TOLERANCE)
    add_common(p_sc)
    p_sc.set_defaults(func=cmd_scan)

    p_bd = sub.add_parser("boundary", help="one stability-boundary curve as CSV")
    p_bd.add_argument("--omega", required=True, help="min:max:count")
    p_bd.add_argument("--beta", type=float, default=0.0)
    p_bd.add_argument("--branch", choices=("p", "n"), required=True)
    p_bd.add_argument("--method", default="exact",
                      choices=("exact", "exact-pc", "exact-rk", "order2", "order4"))
    p_bd.add_argument("--tol", type=float, default=1e-10)
    add_common(p_bd)
    p_bd.set_defaults(func=cmd_boundary)

    p_cp = sub.add_parser("compare", help="exact vs approximate boundary table as CSV")
    p_cp.add_argument("--omega", required=True, help="min:max:count")
    p_cp.add_argument("--beta", type=float, default=0.0)
    p_cp.add_argument("--tol", type=float, default=1e-10)
    add_common(p_cp)
    p_cp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericRangeError as exc:
        print(f"floquet-avg: numeric range error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ModelError as exc:
        print(f"floquet-avg: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FloquetError as exc:
        print(f"floquet-avg: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
