"""Batch front-end: spec files in, machine-readable verdicts out.

    workbench <classify|levi|convexity|dsq|sobolev|hodge>
              --spec FILE [--seed N] [--samples N] [--require-q Q]
              [--out FILE] [--format json|csv]

--spec accepts a gallery name (see gallery.gallery_names) or a path.  The
environment variable WORKBENCH_THREADS caps per-sample parallelism.  Exit
codes: 0 success, 2 verdict failure (e.g. a required q not attained),
1 error.  Reports are deterministic given the spec and seed; floats carry
17 significant digits.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .algebroids import d_squared_residual
from .gallery import GALLERY, gallery_names
from .levi import classify_point, levi_form_generic, q_convex_set
from .neumann import dbar_report
from .sobolev import (
    HalfGrid,
    INEQUALITY_IDS,
    TorusGrid,
    half_space_subestimate,
    kernel_lemma_check,
    leibniz_battery,
)
from .specfile import SpecFile, SpecError, format_specfile, parse_specfile

SOBOLEV_SUITES = INEQUALITY_IDS + (
    "kernel.i",
    "kernel.ii",
    "kernel.iii",
    "subestimate",
)


# ---------------------------------------------------------------------------
# deterministic JSON with 17-significant-digit floats


def _emit(obj, out: List[str]):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            out.append('"nan"')
        elif math.isinf(x):
            out.append('"inf"' if x > 0 else '"-inf"')
        else:
            out.append(f"{x:.17g}")
    elif isinstance(obj, complex):
        _emit([obj.real, obj.imag], out)
    elif isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        out.append(f'"{escaped}"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            _emit(str(k), out)
            out.append(": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps(obj) -> str:
    parts: List[str] = []
    _emit(obj, parts)
    return "".join(parts)


def _csv_rows(report: Dict) -> List[List[str]]:
    rows = [["key", "value"]]
    table = report.get("points")
    if isinstance(table, list) and table and isinstance(table[0], dict):
        rows = [list(table[0].keys())]
        for entry in table:
            rows.append([dumps(v) for v in entry.values()])
        return rows
    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        else:
            rows.append([prefix, dumps(value)])
    walk("", report)
    return rows


def _write(report: Dict, args) -> None:
    if args.format == "csv":
        text = "\n".join(",".join(row) for row in _csv_rows(report)) + "\n"
    else:
        text = dumps(report) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# spec resolution and shared plumbing


def load_spec(ref: str, seed: Optional[int] = None) -> SpecFile:
    if ref in GALLERY:
        spec = parse_specfile(GALLERY[ref])
    else:
        path = Path(ref)
        if not path.exists():
            raise SpecError(
                f"spec {ref!r} is neither a gallery name {gallery_names()} nor a file"
            )
        spec = parse_specfile(path.read_text())
    if seed is not None:
        spec.seed = seed
    return spec


def _meta(spec: Optional[SpecFile], seed: int) -> Dict:
    meta = {"tool_version": __version__, "seed": seed}
    if spec is not None:
        normalized = format_specfile(spec)
        meta["spec_hash"] = hashlib.sha256(normalized.encode()).hexdigest()
    return meta


def _thread_count() -> int:
    raw = os.environ.get("WORKBENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _classify_all(alg, bd, points):
    workers = _thread_count()
    if workers == 1:
        return [classify_point(alg, bd, p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: classify_point(alg, bd, p), points))


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> Tuple[Dict, int]:
    spec = load_spec(args.spec, args.seed)
    if args.samples:
        spec.samples = args.samples
    alg = spec.build_algebroid()
    bd = spec.build_boundary()
    points = spec.sample_points()
    results = _classify_all(alg, bd, points)
    margins = [c.margin for c in results]
    n_elliptic = sum(1 for c in results if c.elliptic)
    table = [
        {
            "point": [float(x) for x in p],
            "classification": c.label,
            "margin": c.margin,
        }
        for p, c in zip(points, results)
    ]
    report = {
        "command": "classify",
        "meta": _meta(spec, spec.seed),
        "samples": len(points),
        "elliptic": n_elliptic,
        "non_elliptic": len(points) - n_elliptic,
        "elliptic_fraction": n_elliptic / len(points),
        "margin_min": min(margins),
        "margin_max": max(margins),
        "points": table,
    }
    return report, 0


def _parse_point(text: str) -> List[float]:
    return [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


def cmd_levi(args) -> Tuple[Dict, int]:
    spec = load_spec(args.spec, args.seed)
    alg = spec.build_algebroid()
    bd = spec.build_boundary()
    if args.point:
        points = [_parse_point(p) for p in args.point]
    else:
        candidates = spec.sample_points()
        points = [
            p for p in candidates if not classify_point(alg, bd, p).elliptic
        ][: args.max_points]
        if not points:
            report = {
                "command": "levi",
                "meta": _meta(spec, spec.seed),
                "note": "no non-elliptic points among the samples",
                "points": [],
            }
            return report, 0
    table = []
    for p in points:
        rep = levi_form_generic(alg, bd, p)
        table.append(
            {
                "point": [float(x) for x in p],
                "classification": rep.classification.label,
                "margin": rep.classification.margin,
                "signature": list(rep.signature),
                "hermitian_defect": rep.hermitian_defect,
                "levi_matrix": rep.levi,
                "route": rep.route,
            }
        )
    report = {
        "command": "levi",
        "meta": _meta(spec, spec.seed),
        "points": table,
    }
    return report, 0


def cmd_convexity(args) -> Tuple[Dict, int]:
    spec = load_spec(args.spec, args.seed)
    if args.samples:
        spec.samples = args.samples
    alg = spec.build_algebroid()
    bd = spec.build_boundary()
    points = spec.sample_points()
    verdict = q_convex_set(alg, bd, points)
    witnesses = {}
    for q, idx in sorted(verdict.witnesses.items()):
        rep = verdict.reports[idx]
        witnesses[str(q)] = {
            "point": [float(x) for x in rep.point],
            "signature": list(rep.signature),
        }
    n_nonelliptic = sum(1 for r in verdict.reports if r.signature is not None)
    report = {
        "command": "convexity",
        "meta": _meta(spec, spec.seed),
        "samples": len(points),
        "non_elliptic_samples": n_nonelliptic,
        "rank": verdict.rank,
        "q_set": sorted(verdict.q_set),
        "witnesses": witnesses,
        "note": verdict.sample_note,
    }
    code = 0
    if args.require_q is not None and args.require_q not in verdict.q_set:
        report["require_q"] = args.require_q
        report["require_q_attained"] = False
        code = 2
    elif args.require_q is not None:
        report["require_q"] = args.require_q
        report["require_q_attained"] = True
    return report, code


def cmd_dsq(args) -> Tuple[Dict, int]:
    spec = load_spec(args.spec, args.seed)
    alg = spec.build_algebroid()
    points = spec.sample_points()[: max(8, min(spec.samples, 32))]
    residual = d_squared_residual(alg, points)
    report = {
        "command": "dsq",
        "meta": _meta(spec, spec.seed),
        "kind": spec.kind,
        "sample_points": len(points),
        "d_squared_residual": residual,
        "is_lie_algebroid_on_sample": residual <= 1e-10,
    }
    return report, 0


def cmd_sobolev(args) -> Tuple[Dict, int]:
    suite = args.suite
    if suite not in SOBOLEV_SUITES:
        raise SpecError(f"unknown suite {suite!r}; choose from {SOBOLEV_SUITES}")
    seed = args.seed or 0
    if suite.startswith("kernel."):
        part = suite.split(".")[1]
        result = kernel_lemma_check(part, quad_order=args.quad_order)
        result["pass"] = result["max_violation"] <= 1e-12
        code = 0 if result["pass"] else 2
    elif suite == "subestimate":
        grid = HalfGrid(2, args.grid, args.grid // 2 + 1)
        result = half_space_subestimate(grid, trials=args.trials, seed=seed)
        code = 0
    elif suite.startswith("T."):
        grid = HalfGrid(2, args.grid, args.grid // 2 + 1)
        result = leibniz_battery(suite, grid, trials=args.trials, seed=seed)
        code = 0
    else:
        grid = TorusGrid(2, args.grid)
        result = leibniz_battery(suite, grid, trials=args.trials, seed=seed)
        code = 0
    report = {
        "command": "sobolev",
        "meta": _meta(None, seed),
        "suite": suite,
        "result": result,
    }
    return report, code


def cmd_hodge(args) -> Tuple[Dict, int]:
    seed = args.seed or 0
    result = dbar_report(
        rho0=args.rho0,
        n_theta=args.n_theta,
        n_r=args.n_r,
        trials=args.trials,
        seed=seed,
        include_spectra=args.spectra,
    )
    report = {
        "command": "hodge",
        "meta": _meta(None, seed),
        "result": result,
    }
    return report, 0


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="boundary Hodge theory workbench for pre-Lie algebroids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="gallery name or spec file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("classify", help="classify sampled boundary points")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("levi", help="Levi forms at explicit or sampled points")
    common(p)
    p.add_argument("--point", action="append", help="comma-separated coordinates")
    p.add_argument("--max-points", type=int, default=5)
    p.set_defaults(fn=cmd_levi)

    p = sub.add_parser("convexity", help="q-convexity verdict over samples")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--require-q", type=int, default=None)
    p.set_defaults(fn=cmd_convexity)

    p = sub.add_parser("dsq", help="d_L^2 residual over samples")
    common(p)
    p.set_defaults(fn=cmd_dsq)

    p = sub.add_parser("sobolev", help="Sobolev inequality batteries")
    common(p, spec=False)
    p.add_argument("--suite", required=True, help=f"one of {SOBOLEV_SUITES}")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--quad-order", type=int, default=32)
    p.set_defaults(fn=cmd_sobolev)

    p = sub.add_parser("hodge", help="discrete dbar-Neumann verification suite")
    common(p, spec=False)
    p.add_argument("--rho0", type=float, default=0.5)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--n-r", type=int, default=64)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument(
        "--spectra",
        action="store_true",
        help="include per-mode eigenvalues (pairs with --format csv)",
    )
    p.set_defaults(fn=cmd_hodge)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.fn(args)
    except (SpecError, ValueError, KeyError, RuntimeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 1
    _write(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
