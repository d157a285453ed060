"""Pre-Lie algebroid specifications over a chart.

An AlgebroidSpec packages a frame's worth of anchor fields plus optional
structure functions c^k_ij with [w_i, w_j] = sum_k c^k_ij w_k.  Constructors
cover the tangent algebroid, the antiholomorphic bundle of a complex chart,
Dirac graphs of two-forms and bivectors, and holomorphic Poisson structures.
The Chevalley-Eilenberg differential and the d^2 residual probe are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .calculus import (
    FormExpr,
    GeneralizedSection,
    VectorFieldExpr,
    coordinate_field,
    courant_bracket,
    insertion_sign,
    wirtinger,
)
from .scalars import Chart, ScalarExpr, const

__all__ = [
    "AlgebroidSpec",
    "AlgebroidForm",
    "make_tangent",
    "make_antiholomorphic",
    "make_graph_two_form",
    "make_graph_bivector",
    "make_holomorphic_poisson",
    "ce_differential",
    "d_squared_residual",
    "is_elliptic_at",
    "jacobiator",
    "holomorphic_component",
    "antiholomorphic_component",
    "dz_form",
    "bivector_contract",
]


@dataclass(frozen=True)
class AlgebroidSpec:
    """A pre-Lie algebroid presented in a global frame over one chart."""

    chart: Chart
    rank: int
    anchors: tuple  # rank VectorFieldExpr entries, rho(w_1)..rho(w_l)
    structure: Optional[dict] = None  # {(i, j): list of rank ScalarExpr}, i < j
    name: str = ""
    anchored_bracket: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.rank < 1 or len(self.anchors) != self.rank:
            raise ValueError("anchor tuple must have length rank >= 1")
        for a in self.anchors:
            if a.chart != self.chart:
                raise ValueError("anchor chart mismatch")

    @property
    def has_structure(self) -> bool:
        return self.structure is not None

    def structure_coeff(self, i: int, j: int, k: int) -> ScalarExpr:
        """c^k_ij with the antisymmetry c^k_ij = -c^k_ji built in."""
        if self.structure is None:
            raise ValueError(f"algebroid {self.name!r} has no structure functions")
        if i == j:
            return const(self.chart, 0)
        if i < j:
            return self.structure.get((i, j), _ZERO_ROW(self))[k]
        return -self.structure.get((j, i), _ZERO_ROW(self))[k]

    def frame_bracket(self, i: int, j: int) -> "list[ScalarExpr]":
        return [self.structure_coeff(i, j, k) for k in range(self.rank)]

    def anchor_matrix_at(self, point) -> np.ndarray:
        """m x l complex matrix of anchor values at a point."""
        cols = [a.eval(point) for a in self.anchors]
        return np.array(cols, dtype=complex).T


def _ZERO_ROW(alg):
    return [const(alg.chart, 0)] * alg.rank


# ---------------------------------------------------------------------------
# constructors


def make_tangent(chart: Chart, name: str = "tangent") -> AlgebroidSpec:
    anchors = tuple(coordinate_field(chart, i) for i in range(chart.dim))
    structure = {}
    return AlgebroidSpec(
        chart, chart.dim, anchors, structure, name, anchored_bracket=True
    )


def make_antiholomorphic(n: int, name: str = "antiholomorphic") -> AlgebroidSpec:
    chart = Chart.complex_chart(n)
    anchors = tuple(wirtinger(chart, k + 1, anti=True) for k in range(n))
    return AlgebroidSpec(chart, n, anchors, {}, name, anchored_bracket=True)


def make_graph_two_form(
    omega: FormExpr, H: Optional[FormExpr] = None, name: str = "graph_two_form"
) -> AlgebroidSpec:
    """The Dirac graph of a complex two-form, with complement T*M.

    In the frame w_i = d_i + omega(d_i) the anchors are the coordinate
    fields, and the bracket projected along T*M is the Lie bracket of the
    coordinate frame, so the structure functions vanish and d_L = d.
    """
    if omega.degree != 2:
        raise ValueError("omega must be a two-form")
    chart = omega.chart
    anchors = tuple(coordinate_field(chart, i) for i in range(chart.dim))
    meta = {"kind": "graph_two_form", "omega": omega, "H": H}
    return AlgebroidSpec(
        chart, chart.dim, anchors, {}, name, anchored_bracket=True, meta=meta
    )


def bivector_contract(chart: Chart, pi: dict, covector: Sequence[ScalarExpr]):
    """pi(xi) for a bivector table {(i,j): ScalarExpr, i<j}: sum rule
    pi(xi)^j = sum_i xi_i pi^{ij} with the full antisymmetric table."""
    comps = [const(chart, 0) for _ in range(chart.dim)]
    for (i, j), c in pi.items():
        comps[j] = comps[j] + covector[i] * c
        comps[i] = comps[i] - covector[j] * c
    return VectorFieldExpr(chart, tuple(comps))


def make_graph_bivector(
    chart: Chart,
    pi: dict,
    H: Optional[FormExpr] = None,
    name: str = "graph_bivector",
) -> AlgebroidSpec:
    """The Dirac graph of a bivector, with complement TM.

    Frame sections are w_i = dx^i + pi(dx^i); the structure functions are
    the frame expansion of the Courant bracket, which along the complement
    TM is read off the covector component.
    """
    for (i, j) in pi:
        if not 0 <= i < j < chart.dim:
            raise ValueError("bivector table must be indexed by i < j")
    m = chart.dim
    dx = [
        FormExpr.from_table(chart, 1, {(i,): const(chart, 1)}) for i in range(m)
    ]
    unit = [
        [const(chart, 1) if i == j else const(chart, 0) for j in range(m)]
        for i in range(m)
    ]
    anchors = tuple(bivector_contract(chart, pi, unit[i]) for i in range(m))
    sections = [GeneralizedSection(anchors[i], dx[i]) for i in range(m)]
    structure = {}
    for i, j in combinations(range(m), 2):
        br = courant_bracket(sections[i], sections[j], H)
        structure[(i, j)] = [br.covector.coeff((k,)) for k in range(m)]
    meta = {"kind": "graph_bivector", "pi": pi, "H": H}
    return AlgebroidSpec(chart, m, anchors, structure, name, meta=meta)


def holomorphic_component(Y: VectorFieldExpr, k: int) -> ScalarExpr:
    """dz^k(Y) for a chart with complex pairing (k is 1-based)."""
    re_i, im_i = Y.chart.complex_pairs[k - 1]
    return Y.components[re_i] + const(Y.chart, 1j) * Y.components[im_i]

def antiholomorphic_component(Y: VectorFieldExpr, k: int) -> ScalarExpr:
    """dzbar^k(Y) for a chart with complex pairing (k is 1-based)."""
    re_i, im_i = Y.chart.complex_pairs[k - 1]
    return Y.components[re_i] - const(Y.chart, 1j) * Y.components[im_i]


def dz_form(chart: Chart, k: int, anti: bool = False) -> FormExpr:
    """dz^k (or dzbar^k) as a degree-1 FormExpr (k is 1-based)."""
    re_i, im_i = chart.complex_pairs[k - 1]
    one = const(chart, 1)
    im = const(chart, -1j) if anti else const(chart, 1j)
    return FormExpr.from_table(chart, 1, {(re_i,): one, (im_i,): im})


def sigma_contract(chart: Chart, sigma: dict, alpha: Sequence[ScalarExpr]):
    """sigma(alpha) in T^{1,0} for a holomorphic bivector table
    {(i,j): ScalarExpr, 1-based i<j} and alpha given by dz-components."""
    n = chart.n_complex
    out_z = [const(chart, 0) for _ in range(n)]
    for (i, j), c in sigma.items():
        out_z[j - 1] = out_z[j - 1] + alpha[i - 1] * c
        out_z[i - 1] = out_z[i - 1] - alpha[j - 1] * c
    total = VectorFieldExpr.zero(chart)
    for k in range(n):
        if not out_z[k].is_zero:
            total = total + wirtinger(chart, k + 1, anti=False).scale(out_z[k])
    return total


def make_holomorphic_poisson(
    n: int, sigma: dict, name: str = "holomorphic_poisson"
) -> AlgebroidSpec:
    """L = T^{0,1} + graph(sigma) for a holomorphic bivector sigma.

    Frame: u_i = d/dzbar^i for i <= n, then s_k = sigma(dz^k) + dz^k for
    k <= n.  Structure functions come from untwisted Courant brackets of the
    frame sections, expanded along the conjugate complement.
    """
    chart = Chart.complex_chart(n)
    for (i, j), c in sigma.items():
        if not 1 <= i < j <= n:
            raise ValueError("sigma table must be indexed by 1 <= i < j <= n")
        for k in range(n):
            anti = wirtinger(chart, k + 1, anti=True).apply(c)
            if not anti.is_zero:
                raise ValueError(
                    f"sigma entry ({i},{j}) is not holomorphic (dzbar^{k + 1} fails)"
                )
    zero1 = FormExpr.zero(chart, 1)
    unit_alpha = [
        [const(chart, 1) if i == k else const(chart, 0) for i in range(n)]
        for k in range(n)
    ]
    sections = []
    for i in range(n):
        sections.append(
            GeneralizedSection(wirtinger(chart, i + 1, anti=True), zero1)
        )
    for k in range(n):
        sections.append(
            GeneralizedSection(
                sigma_contract(chart, sigma, unit_alpha[k]), dz_form(chart, k + 1)
            )
        )
    anchors = tuple(s.vector for s in sections)
    structure = {}
    rank = 2 * n
    for i, j in combinations(range(rank), 2):
        br = courant_bracket(sections[i], sections[j])
        row = []
        for a in range(n):  # coefficients of u_a: the (0,1) vector part
            row.append(antiholomorphic_component(br.vector, a + 1))
        for a in range(n):  # coefficients of s_a: the dz^a part of the covector
            row.append(br.covector.apply(wirtinger(chart, a + 1, anti=False)))
        structure[(i, j)] = row
    meta = {"kind": "holomorphic_poisson", "sigma": sigma, "n": n}
    return AlgebroidSpec(chart, rank, anchors, structure, name, meta=meta)


# ---------------------------------------------------------------------------
# forms over the algebroid frame and the CE differential


@dataclass(frozen=True)
class AlgebroidForm:
    alg: AlgebroidSpec
    degree: int
    coeffs: tuple  # ((increasing frame-index tuple, ScalarExpr), ...)

    def __post_init__(self):
        if not 0 <= self.degree <= self.alg.rank:
            raise ValueError("degree out of range for the algebroid rank")
        table: Dict[tuple, ScalarExpr] = {}
        for idx, c in self.coeffs:
            idx = tuple(idx)
            if len(idx) != self.degree or list(idx) != sorted(set(idx)):
                raise ValueError("indices must be strictly increasing tuples")
            if any(not 0 <= k < self.alg.rank for k in idx):
                raise IndexError("frame index out of range")
            table[idx] = table[idx] + c if idx in table else c
        object.__setattr__(
            self,
            "coeffs",
            tuple((i, c) for i, c in sorted(table.items()) if not c.is_zero),
        )

    @staticmethod
    def zero(alg: AlgebroidSpec, degree: int) -> "AlgebroidForm":
        return AlgebroidForm(alg, degree, ())

    @staticmethod
    def from_function(alg: AlgebroidSpec, f: ScalarExpr) -> "AlgebroidForm":
        return AlgebroidForm(alg, 0, (((), f),))

    @staticmethod
    def dual_frame(alg: AlgebroidSpec, i: int) -> "AlgebroidForm":
        return AlgebroidForm(alg, 1, (((i,), const(alg.chart, 1)),))

    def table(self) -> Dict[tuple, ScalarExpr]:
        return dict(self.coeffs)

    def coeff(self, idx) -> ScalarExpr:
        for stored, c in self.coeffs:
            if stored == tuple(idx):
                return c
        return const(self.alg.chart, 0)

    def __add__(self, other: "AlgebroidForm") -> "AlgebroidForm":
        if other.alg is not self.alg and other.alg != self.alg:
            raise ValueError("algebroid mismatch")
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return AlgebroidForm(self.alg, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self + other.scale(const(self.alg.chart, -1))

    def scale(self, f) -> "AlgebroidForm":
        return AlgebroidForm(
            self.alg, self.degree, tuple((i, f * c) for i, c in self.coeffs)
        )

    def wedge(self, other: "AlgebroidForm") -> "AlgebroidForm":
        table: Dict[tuple, ScalarExpr] = {}
        for ia, ca in self.coeffs:
            for ib, cb in other.coeffs:
                combined = list(ia) + list(ib)
                if len(set(combined)) != len(combined):
                    continue
                sign = 1
                for a in range(len(combined)):
                    for b in range(a + 1, len(combined)):
                        if combined[a] > combined[b]:
                            sign = -sign
                idx = tuple(sorted(combined))
                term = const(self.alg.chart, sign) * ca * cb
                table[idx] = table.get(idx, const(self.alg.chart, 0)) + term
        return AlgebroidForm(
            self.alg, self.degree + other.degree, tuple(table.items())
        )

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def max_abs_at(self, point) -> float:
        return max((abs(c.eval(point)) for _, c in self.coeffs), default=0.0)


def ce_differential(alg: AlgebroidSpec, phi: AlgebroidForm) -> AlgebroidForm:
    """Chevalley-Eilenberg differential in the frame presentation.

    (d phi)(w_{k0},..,w_{kq}) = sum_a (-1)^a rho(w_{ka}).phi(..hat a..)
                              + sum_{a<b} (-1)^{a+b} phi([w_{ka},w_{kb}], ..)
    """
    if not alg.has_structure:
        raise ValueError("structure functions are required for ce_differential")
    if phi.alg is not alg and (
        phi.alg.rank != alg.rank or phi.alg.chart != alg.chart
    ):
        raise ValueError("form does not belong to this algebroid")
    if phi.degree >= alg.rank:
        raise ValueError("degree overflow for this rank")
    chart = alg.chart
    q = phi.degree
    table: Dict[tuple, ScalarExpr] = {}
    phi_table = phi.table()
    zero = const(chart, 0)
    for K in combinations(range(alg.rank), q + 1):
        acc = zero
        for a in range(q + 1):
            rest = K[:a] + K[a + 1 :]
            c = phi_table.get(rest)
            if c is not None:
                acc = acc + const(chart, (-1) ** a) * alg.anchors[K[a]].apply(c)
        for a in range(q + 1):
            for b in range(a + 1, q + 1):
                rest = tuple(x for t, x in enumerate(K) if t not in (a, b))
                sign_ab = (-1) ** (a + b)
                for k in range(alg.rank):
                    ins, merged = insertion_sign(k, rest)
                    if ins == 0:
                        continue
                    c = phi_table.get(merged)
                    if c is None:
                        continue
                    sc = alg.structure_coeff(K[a], K[b], k)
                    if sc.is_zero:
                        continue
                    acc = acc + const(chart, sign_ab * ins) * sc * c
        if not acc.is_zero:
            table[K] = acc
    return AlgebroidForm(alg, q + 1, tuple(table.items()))


def d_squared_residual(
    alg: AlgebroidSpec,
    sample_points: Sequence[Sequence[complex]],
    probes: Optional[Sequence[AlgebroidForm]] = None,
) -> float:
    """Max |coefficient| of d_L(d_L probe) over probes and sample points.

    Default probes: the coordinate functions, plus the dual frame one-forms
    when the rank allows a degree-3 result.
    """
    if probes is None:
        probes = [
            AlgebroidForm.from_function(alg, ScalarExpr.variable(alg.chart, i))
            for i in range(alg.chart.dim)
        ]
        if alg.rank >= 3:
            probes = list(probes) + [
                AlgebroidForm.dual_frame(alg, i) for i in range(alg.rank)
            ]
    worst = 0.0
    for probe in probes:
        dd = ce_differential(alg, ce_differential(alg, probe))
        if dd.is_zero:
            continue
        for p in sample_points:
            worst = max(worst, dd.max_abs_at(p))
    return worst


def jacobiator(chart: Chart, pi: dict, f: ScalarExpr, g: ScalarExpr, h: ScalarExpr):
    """{f,{g,h}} + {h,{f,g}} + {g,{h,f}} for the bracket {a,b} = pi(da, db).

    Independent of the Dirac-graph machinery; used to cross-validate
    d_squared_residual for bivector graphs (with H = 0).
    """

    def poisson(a, b):
        out = const(chart, 0)
        for (i, j), c in pi.items():
            out = out + c * (a.diff(i) * b.diff(j) - a.diff(j) * b.diff(i))
        return out

    return (
        poisson(f, poisson(g, h))
        + poisson(h, poisson(f, g))
        + poisson(g, poisson(h, f))
    )


def is_elliptic_at(
    alg: AlgebroidSpec, point, rank_tol: float = 1e-8
) -> Tuple[bool, float]:
    """Ellipticity rho(L) + conj(rho(L)) = TM_C at a point.

    Returns (flag, margin) where the margin is the m-th singular value of
    the stacked m x 2l matrix of anchors and conjugated anchors, relative
    to the largest one (so a unitary-anchor frame scores 1).
    """
    A = alg.anchor_matrix_at(point)
    stacked = np.hstack([A, A.conj()])
    svals = np.linalg.svd(stacked, compute_uv=False)
    m = alg.chart.dim
    if len(svals) < m or svals[0] == 0:
        return False, 0.0
    margin = float(svals[m - 1] / svals[0])
    return margin >= rank_tol, margin
