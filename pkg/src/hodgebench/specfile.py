"""Line-oriented spec files: [section] headers with key = value entries.

Expression values are quoted strings in the chart-calculus grammar and are
parsed against the declared chart.  A parsed SpecFile can rebuild its
normalized text (print/parse round-trips to an equivalent spec) and
instantiate the algebroid, boundary data and boundary sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .algebroids import (
    AlgebroidSpec,
    make_antiholomorphic,
    make_graph_bivector,
    make_graph_two_form,
    make_holomorphic_poisson,
    make_tangent,
)
from .calculus import FormExpr
from .levi import BoundaryData, sphere_lattice
from .scalars import Chart, parse_expr

__all__ = ["SpecFile", "SpecError", "parse_specfile", "format_specfile"]

ALGEBROID_KINDS = (
    "tangent",
    "antiholomorphic",
    "graph_bivector",
    "graph_two_form",
    "holomorphic_poisson",
    "custom",
)

SAMPLER_KINDS = ("sphere", "two_spheres", "poisson_locus", "sphere_plus_locus")


class SpecError(ValueError):
    pass


@dataclass
class SpecFile:
    chart_dim: int
    complex_pairs: bool
    r_text: str
    sampler: str = "sphere"
    samples: int = 1000
    locus_samples: int = 20
    inner_radius: float = 0.5
    kind: str = "tangent"
    n: int = 0
    entries: Dict[str, str] = field(default_factory=dict)  # expression tables
    rank_tol: float = 1e-8
    eig_zero_tol: float = 1e-8
    seed: int = 0

    # -- construction ---------------------------------------------------------

    def chart(self) -> Chart:
        if self.complex_pairs:
            return Chart.complex_chart(self.chart_dim // 2)
        return Chart.real(self.chart_dim)

    def build_algebroid(self) -> AlgebroidSpec:
        chart = self.chart()
        if self.kind == "tangent":
            return make_tangent(chart, name="tangent")
        if self.kind == "antiholomorphic":
            return make_antiholomorphic(self.n, name="antiholomorphic")
        if self.kind == "holomorphic_poisson":
            sigma = {
                _pair(key): parse_expr(text, chart)
                for key, text in self.entries.items()
            }
            return make_holomorphic_poisson(self.n, sigma, name="holomorphic_poisson")
        if self.kind == "graph_bivector":
            pi = {
                tuple(i - 1 for i in _pair(key)): parse_expr(text, chart)
                for key, text in self.entries.items()
            }
            return make_graph_bivector(chart, pi, name="graph_bivector")
        if self.kind == "graph_two_form":
            table = {
                tuple(i - 1 for i in _pair(key)): parse_expr(text, chart)
                for key, text in self.entries.items()
            }
            omega = FormExpr.from_table(chart, 2, table)
            return make_graph_two_form(omega, name="graph_two_form")
        if self.kind == "custom":
            return self._build_custom(chart)
        raise SpecError(f"unsupported algebroid kind {self.kind!r}")

    def _build_custom(self, chart: Chart) -> AlgebroidSpec:
        from .calculus import VectorFieldExpr

        anchor_keys = sorted(
            (k for k in self.entries if k.startswith("anchor_")),
            key=lambda k: int(k.split("_")[1]),
        )
        if not anchor_keys:
            raise SpecError("custom algebroids need anchor_<i> entries")
        rank = len(anchor_keys)
        anchors = []
        for idx, key in enumerate(anchor_keys, start=1):
            if key != f"anchor_{idx}":
                raise SpecError("anchor entries must be numbered 1..rank")
            comps = [c.strip() for c in self.entries[key].split(";")]
            if len(comps) != chart.dim:
                raise SpecError(
                    f"{key} needs {chart.dim} ';'-separated components"
                )
            anchors.append(
                VectorFieldExpr(chart, tuple(parse_expr(c, chart) for c in comps))
            )
        structure = None
        struct_keys = [k for k in self.entries if k.startswith("structure_")]
        if struct_keys:
            structure = {}
            for key in struct_keys:
                i, j = _pair(key)
                comps = [c.strip() for c in self.entries[key].split(";")]
                if len(comps) != rank:
                    raise SpecError(f"{key} needs {rank} ';'-separated coefficients")
                structure[(i - 1, j - 1)] = [parse_expr(c, chart) for c in comps]
        return AlgebroidSpec(chart, rank, tuple(anchors), structure, name="custom")

    def build_boundary(self) -> BoundaryData:
        chart = self.chart()
        r = parse_expr(self.r_text, chart)
        return BoundaryData(
            r, rank_tol=self.rank_tol, eig_zero_tol=self.eig_zero_tol
        )

    def sample_points(self) -> List[List[float]]:
        dim = self.chart_dim
        if self.sampler == "sphere":
            return [list(p) for p in sphere_lattice(dim, self.samples)]
        if self.sampler == "two_spheres":
            half = self.samples // 2
            pts = [list(p) for p in sphere_lattice(dim, half)]
            pts += [
                list(p)
                for p in sphere_lattice(dim, self.samples - half, radius=self.inner_radius)
            ]
            return pts
        if self.sampler == "poisson_locus":
            return _locus_circle(dim, self.samples)
        if self.sampler == "sphere_plus_locus":
            pts = [list(p) for p in sphere_lattice(dim, self.samples)]
            return pts + _locus_circle(dim, self.locus_samples)
        raise SpecError(f"unsupported sampler {self.sampler!r}")


def _locus_circle(dim: int, count: int) -> List[List[float]]:
    # the non-elliptic circle {x = z = w = 0, |y| = 1} of the Poisson gallery
    pts = []
    for k in range(count):
        theta = 2.0 * math.pi * ((k * 0.6180339887498949) % 1.0)
        p = [0.0] * dim
        p[2] = math.cos(theta)
        p[3] = math.sin(theta)
        pts.append(p)
    return pts


def _pair(key: str) -> Tuple[int, int]:
    parts = key.split("_")
    if len(parts) != 3:
        raise SpecError(f"bad table key {key!r} (expected prefix_i_j)")
    return int(parts[1]), int(parts[2])


# ---------------------------------------------------------------------------
# parsing


def parse_specfile(text: str) -> SpecFile:
    sections: Dict[str, Dict[str, str]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key = value, got {line!r}")
        if current is None:
            raise SpecError(f"line {lineno}: entry before any [section]")
        key, _, value = line.partition("=")
        sections[current][key.strip().lower()] = value.strip()
    for needed in ("chart", "boundary", "algebroid"):
        if needed not in sections:
            raise SpecError(f"missing [{needed}] section")
    chart_sec = sections["chart"]
    if "dim" not in chart_sec:
        raise SpecError("[chart] needs dim")
    dim = int(chart_sec["dim"])
    complex_pairs = chart_sec.get("complex", "false").lower() in ("1", "true", "yes")
    if complex_pairs and dim % 2:
        raise SpecError("complex charts need even dimension")
    bd_sec = sections["boundary"]
    if "r" not in bd_sec:
        raise SpecError("[boundary] needs r")
    alg_sec = sections["algebroid"]
    kind = alg_sec.get("kind", "")
    if kind not in ALGEBROID_KINDS:
        raise SpecError(f"unknown algebroid kind {kind!r}")
    entries = {
        k: _unquote(v)
        for k, v in alg_sec.items()
        if k.startswith(("sigma_", "pi_", "omega_", "anchor_", "structure_"))
    }
    opt = sections.get("options", {})
    spec = SpecFile(
        chart_dim=dim,
        complex_pairs=complex_pairs,
        r_text=_unquote(bd_sec["r"]),
        sampler=bd_sec.get("sampler", "sphere"),
        samples=int(bd_sec.get("samples", "1000")),
        locus_samples=int(bd_sec.get("locus_samples", "20")),
        inner_radius=float(bd_sec.get("inner_radius", "0.5")),
        kind=kind,
        n=int(alg_sec.get("n", str(dim // 2))),
        entries=entries,
        rank_tol=float(opt.get("rank_tol", "1e-8")),
        eig_zero_tol=float(opt.get("eig_zero_tol", "1e-8")),
        seed=int(opt.get("seed", "0")),
    )
    if spec.sampler not in SAMPLER_KINDS:
        raise SpecError(f"unknown sampler {spec.sampler!r}")
    _validate(spec)
    return spec


def _validate(spec: SpecFile):
    chart = spec.chart()
    parse_expr(spec.r_text, chart)  # raises with position on bad input
    for key, text in spec.entries.items():
        if key.startswith(("anchor_", "structure_")):
            comps = text.split(";")
            for comp in comps:
                parse_expr(comp.strip(), chart)
            if key.startswith("anchor_") and len(comps) != chart.dim:
                raise SpecError(
                    f"{key} needs {chart.dim} ';'-separated components"
                )
            continue
        parse_expr(text, chart)
        i, j = _pair(key)
        upper = chart.n_complex if spec.kind == "holomorphic_poisson" else spec.chart_dim
        if not 1 <= i < j <= upper:
            raise SpecError(f"table key {key!r} out of range (need 1 <= i < j <= {upper})")
    if spec.kind in ("antiholomorphic", "holomorphic_poisson"):
        if not spec.complex_pairs:
            raise SpecError(f"kind {spec.kind!r} needs a complex chart")
        if spec.n != spec.chart_dim // 2:
            raise SpecError("n must equal half the chart dimension")


def _unquote(value: str) -> str:
    v = value.strip()
    if len(v) >= 2 and v[0] == v[-1] and v[0] in "'\"":
        return v[1:-1]
    return v


def format_specfile(spec: SpecFile) -> str:
    lines = ["[chart]", f"dim = {spec.chart_dim}"]
    if spec.complex_pairs:
        lines.append("complex = true")
    lines += [
        "",
        "[boundary]",
        f'r = "{spec.r_text}"',
        f"sampler = {spec.sampler}",
        f"samples = {spec.samples}",
    ]
    if spec.sampler == "sphere_plus_locus":
        lines.append(f"locus_samples = {spec.locus_samples}")
    if spec.sampler == "two_spheres":
        lines.append(f"inner_radius = {spec.inner_radius}")
    lines += ["", "[algebroid]", f"kind = {spec.kind}"]
    if spec.kind in ("antiholomorphic", "holomorphic_poisson"):
        lines.append(f"n = {spec.n}")
    for key in sorted(spec.entries):
        lines.append(f'{key} = "{spec.entries[key]}"')
    lines += [
        "",
        "[options]",
        f"rank_tol = {spec.rank_tol:g}",
        f"eig_zero_tol = {spec.eig_zero_tol:g}",
        f"seed = {spec.seed}",
        "",
    ]
    return "\n".join(lines)
