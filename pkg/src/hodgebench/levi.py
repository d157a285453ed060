"""Boundary-point classification, Levi forms and q-convexity.

Classification follows the intersection criterion: a boundary point is
elliptic exactly when rho(L_x) meets conj(rho(L_x)) in a direction that is
transverse to the boundary.  At non-elliptic points the Levi form is the
mu-valued Hermitian bracket form -i[rho(u), conj(rho(v))], computed here by
three routes that share the dr(nu)=1 normalization:

* generic       -- adapted frame, exact brackets, quotient projection;
* complex-hessian -- the Wirtinger Hessian of r restricted to the CR kernel;
* poisson-blocks  -- the three block formulas of the holomorphic Poisson case.

All symbolic work is exact; numbers appear only at point evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri

from .algebroids import AlgebroidSpec, is_elliptic_at, sigma_contract
from .calculus import VectorFieldExpr, lie_bracket
from .scalars import ScalarExpr, const

__all__ = [
    "BoundaryData",
    "Classification",
    "AdaptedFrame",
    "LeviReport",
    "ConvexityVerdict",
    "classify_point",
    "adapted_frame",
    "levi_form_generic",
    "levi_form_complex_hessian",
    "levi_form_poisson",
    "eigen_signature",
    "q_convex_set",
    "gc_ellipticity_via_bivector",
    "sphere_lattice",
    "mu_component",
    "levi_from_cr_fields",
    "cr_kernel_basis",
]


class ClassificationInconsistency(RuntimeError):
    pass


class BoundaryData:
    """A defining function r (negative inside, zero on the boundary) plus
    the tolerances used by classification and signature counting."""

    def __init__(
        self,
        r: ScalarExpr,
        rank_tol: float = 1e-8,
        eig_zero_tol: float = 1e-8,
        boundary_tol: float = 1e-8,
    ):
        self.r = r
        self.chart = r.chart
        self.rank_tol = rank_tol
        self.eig_zero_tol = eig_zero_tol
        self.boundary_tol = boundary_tol
        self.grad = [r.diff(i) for i in range(self.chart.dim)]
        self.hess = [
            [self.grad[i].diff(j) for j in range(self.chart.dim)]
            for i in range(self.chart.dim)
        ]

    def grad_at(self, point) -> np.ndarray:
        g = np.array([gi.eval(point) for gi in self.grad])
        if np.linalg.norm(g) <= self.rank_tol:
            raise ValueError("defining function is degenerate at the point (|dr| ~ 0)")
        return g

    def check_on_boundary(self, point):
        val = self.r.eval(point)
        if abs(val) > self.boundary_tol:
            raise ValueError(f"point is not on the boundary (r = {val})")


@dataclass(frozen=True)
class Classification:
    elliptic: bool
    margin: float

    @property
    def label(self) -> str:
        return "Elliptic" if self.elliptic else "NonElliptic"


@dataclass(frozen=True)
class AdaptedFrame:
    """Constant-coefficient data of the frame change at a point.

    Rows are with respect to the original frame: row i of cr_rows gives the
    section whose tangency-corrected field realizes the i-th CR direction;
    pivot is the index of the transverse section.
    """

    pivot: int
    cr_rows: np.ndarray  # (l-1, l) complex
    transverse_scale: complex  # w_l tilde = scale * w_pivot, dr(rho) = 1 at x


@dataclass(frozen=True)
class LeviReport:
    point: tuple
    classification: Classification
    levi: Optional[np.ndarray]
    signature: Optional[Tuple[int, int, int]]
    route: str
    hermitian_defect: float = 0.0


@dataclass(frozen=True)
class ConvexityVerdict:
    q_set: frozenset
    rank: int
    reports: tuple
    witnesses: dict  # q -> index of a sampled point witnessing failure
    sample_note: str = "certified on the sample only"

    def passes(self, q: int) -> bool:
        return q in self.q_set


# ---------------------------------------------------------------------------
# classification


def _intersection_basis(A: np.ndarray, rel_tol: float) -> np.ndarray:
    """Orthonormal basis of col(A) cap col(conj(A)) in C^m."""
    stacked = np.hstack([A, -A.conj()])
    _, s, vh = np.linalg.svd(stacked)
    if s.size == 0 or s[0] == 0:
        return np.zeros((A.shape[0], 0))
    null_cols = [
        k for k in range(vh.shape[0]) if k >= s.size or s[k] <= rel_tol * s[0]
    ]
    null_vecs = vh.conj().T[:, null_cols]
    if null_vecs.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    vecs = A @ null_vecs[: A.shape[1]]
    q, s2, _ = np.linalg.svd(vecs, full_matrices=False)
    keep = s2 > rel_tol * max(s2[0], 1e-300) if s2.size else []
    return q[:, keep] if s2.size else np.zeros((A.shape[0], 0))


def classify_point(
    alg: AlgebroidSpec, bd: BoundaryData, point
) -> Classification:
    """Elliptic iff rho(L) cap conj(rho(L)) carries a direction with a
    nonzero dr-pairing; the margin is the best normalized pairing."""
    bd.check_on_boundary(point)
    flag, _ = is_elliptic_at(alg, point, bd.rank_tol)
    if not flag:
        raise ValueError("algebroid is not elliptic at the point")
    A = alg.anchor_matrix_at(point)
    basis = _intersection_basis(A, bd.rank_tol)
    g = bd.grad_at(point)
    if basis.shape[1] == 0:
        return Classification(False, 0.0)
    # max over unit v in the intersection of |dr(v)| / |dr|
    pairing = basis.conj().T @ g.conj()
    margin = float(np.linalg.norm(pairing) / np.linalg.norm(g))
    return Classification(margin >= bd.rank_tol, margin)


# ---------------------------------------------------------------------------
# adapted frames


def adapted_frame(alg: AlgebroidSpec, bd: BoundaryData, point) -> AdaptedFrame:
    bd.check_on_boundary(point)
    l = alg.rank
    pairings = np.array(
        [_dr_pairing_value(alg, bd, j, point) for j in range(l)]
    )
    pivot = int(np.argmax(np.abs(pairings)))
    top = abs(pairings[pivot])
    scale_ref = max(float(np.linalg.norm(alg.anchor_matrix_at(point))), 1.0)
    if top <= bd.rank_tol * scale_ref:
        raise ValueError(
            "all frame anchors are tangent at the point (ellipticity violated)"
        )
    rows = []
    for i in range(l):
        if i == pivot:
            continue
        row = np.zeros(l, dtype=complex)
        row[i] = 1.0
        rows.append(row)
    return AdaptedFrame(pivot, np.array(rows), 1.0 / pairings[pivot])


def _dr_pairing_value(alg, bd, j, point) -> complex:
    total = 0j
    for t in range(alg.chart.dim):
        c = alg.anchors[j].components[t]
        if not c.is_zero:
            total += bd.grad[t].eval(point) * c.eval(point)
    return total


def dr_pairing_expr(alg: AlgebroidSpec, bd: BoundaryData, j: int) -> ScalarExpr:
    """dr(rho(w_j)) as an exact expression."""
    total = const(alg.chart, 0)
    for t in range(alg.chart.dim):
        c = alg.anchors[j].components[t]
        if not c.is_zero:
            total = total + bd.grad[t] * c
    return total


def adapted_sections(alg: AlgebroidSpec, bd: BoundaryData, frame: AdaptedFrame):
    """Symbolic tangency-corrected CR fields and the transverse field.

    Used by the exact (slow) route and by independence tests; the i-th CR
    section is sum_j row[i][j] w_j minus the pivot correction, so its anchor
    annihilates dr identically.
    """
    chart = alg.chart
    P = [dr_pairing_expr(alg, bd, j) for j in range(alg.rank)]
    piv = frame.pivot
    cr_fields = []
    for row in frame.cr_rows:
        vec = VectorFieldExpr.zero(chart)
        pair = const(chart, 0)
        for j, cj in enumerate(row):
            if cj == 0:
                continue
            vec = vec + alg.anchors[j].scale(const(chart, complex(cj)))
            pair = pair + const(chart, complex(cj)) * P[j]
        corrected = vec - alg.anchors[piv].scale(pair / P[piv])
        cr_fields.append(corrected)
    transverse = alg.anchors[piv].scale(const(chart, complex(frame.transverse_scale)))
    return cr_fields, transverse


# ---------------------------------------------------------------------------
# the mu-projection


def mu_component(
    span: np.ndarray, g: np.ndarray, value: np.ndarray, rel_tol: float = 1e-8
) -> complex:
    """Coefficient of g in value modulo span, via orthogonal projection."""
    if span.shape[1]:
        q, s, _ = np.linalg.svd(span, full_matrices=False)
        if s.size and s[0] > 0:
            q = q[:, s > rel_tol * s[0]]
        u = g - q @ (q.conj().T @ g)
    else:
        u = g
    if np.linalg.norm(u) <= rel_tol * np.linalg.norm(g):
        raise ClassificationInconsistency(
            "mu generator lies in the CR span; the point classifies as elliptic"
        )
    return complex(np.vdot(u, value) / np.vdot(u, g))


def levi_from_cr_fields(
    bd: BoundaryData,
    cr_fields: Sequence[VectorFieldExpr],
    transverse: VectorFieldExpr,
    point,
    projector: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Exact-bracket Levi matrix from explicit CR fields.

    The fields must be tangent along the boundary near the point and the
    transverse field must satisfy dr(rho) = 1 at the point.  A custom
    projection functional (complex m-vector psi with psi . span = 0) may be
    supplied to exercise quotient-independence.
    """
    k = len(cr_fields)
    vals = [np.array(f.eval(point)) for f in cr_fields]
    t_val = np.array(transverse.eval(point))
    g = 1j * (t_val.conj() - t_val)
    span = (
        np.array(vals + [v.conj() for v in vals]).T
        if k
        else np.zeros((len(t_val), 0))
    )
    B = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            br = lie_bracket(cr_fields[i], cr_fields[j].conj())
            cval = -1j * np.array(br.eval(point))
            if projector is not None:
                B[i, j] = complex(
                    np.dot(projector, cval) / np.dot(projector, g)
                )
            else:
                B[i, j] = mu_component(span, g, cval, bd.rank_tol)
    return B


# ---------------------------------------------------------------------------
# generic route (cached symbolic jacobians, exact chain rule at the point)


class _GenericRoute:
    def __init__(self, alg: AlgebroidSpec, bd: BoundaryData):
        self.alg = alg
        self.bd = bd
        chart = alg.chart
        self.P = [dr_pairing_expr(alg, bd, j) for j in range(alg.rank)]
        self.dP = [
            [p.diff(t) for t in range(chart.dim)] for p in self.P
        ]
        self.dA = [
            [
                [alg.anchors[j].components[k].diff(t) for t in range(chart.dim)]
                for k in range(chart.dim)
            ]
            for j in range(alg.rank)
        ]

    def evaluate(self, point, frame: AdaptedFrame):
        alg, chart = self.alg, self.alg.chart
        m, l = chart.dim, alg.rank
        A = np.array(
            [[c.eval(point) for c in a.components] for a in alg.anchors]
        )  # (l, m)
        dA = np.array(
            [
                [[self.dA[j][k][t].eval(point) for t in range(m)] for k in range(m)]
                for j in range(l)
            ]
        )  # (l, m_comp, m_dir)
        P = np.array([p.eval(point) for p in self.P])
        dP = np.array([[d.eval(point) for d in row] for row in self.dP])
        piv = frame.pivot
        rows = frame.cr_rows
        k = rows.shape[0]
        # tangency-corrected section values and jacobians
        v = np.zeros((k, m), dtype=complex)
        dv = np.zeros((k, m, m), dtype=complex)
        for i in range(k):
            num = rows[i] @ P  # sum_j c_ij P_j at the point
            dnum = rows[i] @ dP
            q = num / P[piv]
            dq = (dnum * P[piv] - num * dP[piv]) / P[piv] ** 2
            v[i] = rows[i] @ A - q * A[piv]
            dv[i] = np.tensordot(rows[i], dA, axes=(0, 0)) - q * dA[piv]
            dv[i] -= np.outer(A[piv], dq)
        t_val = complex(frame.transverse_scale) * A[piv]
        g = 1j * (t_val.conj() - t_val)
        span = (
            np.vstack([v, v.conj()]).T if k else np.zeros((m, 0), dtype=complex)
        )
        B = np.zeros((k, k), dtype=complex)
        for i in range(k):
            for j in range(k):
                # -i [v_i, conj(v_j)] at the point
                br = v[i] @ dv[j].conj().T - v[j].conj() @ dv[i].T
                B[i, j] = mu_component(span, g, -1j * br, self.bd.rank_tol)
        return B


def _route_cache(alg: AlgebroidSpec, bd: BoundaryData) -> _GenericRoute:
    # cached on the boundary data; the held algebroid reference keeps id()
    # keys valid for the cache's lifetime
    cache = getattr(bd, "_generic_routes", None)
    if cache is None:
        cache = {}
        bd._generic_routes = cache
    entry = cache.get(id(alg))
    if entry is None or entry[0] is not alg:
        entry = (alg, _GenericRoute(alg, bd))
        cache[id(alg)] = entry
    return entry[1]


def levi_form_generic(
    alg: AlgebroidSpec,
    bd: BoundaryData,
    point,
    cr_rows: Optional[np.ndarray] = None,
    exact: bool = False,
) -> LeviReport:
    """Levi form by the adapted-frame route.

    With ``exact=True`` the brackets are computed fully symbolically before
    evaluation (slow; used for cross-validation).  ``cr_rows`` overrides the
    CR basis (constant coefficients against the original frame) so different
    routes can share a basis.
    """
    cls = classify_point(alg, bd, point)
    if cls.elliptic:
        raise ValueError(
            "levi_form_generic requires a non-elliptic point "
            f"(margin {cls.margin:.3e})"
        )
    frame = adapted_frame(alg, bd, point)
    if cr_rows is not None:
        frame = AdaptedFrame(frame.pivot, np.asarray(cr_rows, dtype=complex), frame.transverse_scale)
    if exact:
        fields, transverse = adapted_sections(alg, bd, frame)
        B = levi_from_cr_fields(bd, fields, transverse, point)
    else:
        B = _route_cache(alg, bd).evaluate(point, frame)
    return _finish_report(point, cls, B, "generic", bd.eig_zero_tol)


def _finish_report(point, cls, B, route, eig_zero_tol) -> LeviReport:
    scale = np.linalg.norm(B)
    defect = float(np.linalg.norm(B - B.conj().T) / scale) if scale > 0 else 0.0
    if scale > 0 and defect > 1e-6:
        raise ClassificationInconsistency(
            f"Levi matrix is not Hermitian (relative defect {defect:.3e})"
        )
    B = 0.5 * (B + B.conj().T)
    sig = eigen_signature(B, eig_zero_tol)
    return LeviReport(tuple(point), cls, B, sig, route, defect)


# ---------------------------------------------------------------------------
# complex-Hessian route


def wirtinger_hessian(bd: BoundaryData, point) -> np.ndarray:
    """H_ij = d^2 r / dz^i dzbar^j at the point (chart must be paired)."""
    chart = bd.chart
    n = chart.n_complex
    H = np.zeros((n, n), dtype=complex)
    for i in range(n):
        ri, ii = chart.complex_pairs[i]
        for j in range(n):
            rj, ij = chart.complex_pairs[j]
            # d/dz^i = (d_ri - i d_ii)/2 applied to d r/dzbar^j = (d_rj + i d_ij) r /2
            h = 0.25 * (
                bd.hess[ri][rj].eval(point)
                + 1j * bd.hess[ri][ij].eval(point)
                - 1j * bd.hess[ii][rj].eval(point)
                + bd.hess[ii][ij].eval(point)
            )
            H[i, j] = h
    return H


def antiholomorphic_gradient(bd: BoundaryData, point) -> np.ndarray:
    """(dr/dzbar^1 .. dr/dzbar^n) at the point."""
    chart = bd.chart
    out = []
    for k in range(chart.n_complex):
        ri, ii = chart.complex_pairs[k]
        out.append(0.5 * (bd.grad[ri].eval(point) + 1j * bd.grad[ii].eval(point)))
    return np.array(out)


def holomorphic_gradient(bd: BoundaryData, point) -> np.ndarray:
    chart = bd.chart
    out = []
    for k in range(chart.n_complex):
        ri, ii = chart.complex_pairs[k]
        out.append(0.5 * (bd.grad[ri].eval(point) - 1j * bd.grad[ii].eval(point)))
    return np.array(out)


def cr_kernel_basis(bd: BoundaryData, point) -> np.ndarray:
    """Orthonormal basis (rows) of {u in T^{0,1} : sum u^i dr/dzbar^i = 0}."""
    w = antiholomorphic_gradient(bd, point)
    _, s, vh = np.linalg.svd(w.reshape(1, -1))
    return vh.conj().T[:, 1:].T


def levi_form_complex_hessian(
    bd: BoundaryData, point, cr_basis: np.ndarray
) -> np.ndarray:
    """Hessian route for L = T^{0,1}: L(u,v) = sum H_ij conj(v^i) u^j on CR.

    Rows of cr_basis are antiholomorphic component vectors; they must lie in
    the CR kernel at the point.  The result carries the dr(nu)=1
    normalization of the given r.
    """
    bd.check_on_boundary(point)
    if not bd.chart.complex_pairs:
        raise ValueError("complex-Hessian route needs a chart with complex pairing")
    basis = np.asarray(cr_basis, dtype=complex)
    w = antiholomorphic_gradient(bd, point)
    residual = np.abs(basis @ w)
    scale = np.linalg.norm(w) * max(np.linalg.norm(basis, axis=1).max(), 1e-300)
    if residual.max() > 1e-8 * max(scale, 1e-300):
        raise ValueError("cr_basis is not contained in the CR kernel")
    H = wirtinger_hessian(bd, point)
    k = basis.shape[0]
    B = np.zeros((k, k), dtype=complex)
    for a in range(k):
        for b in range(k):
            B[a, b] = np.einsum("ij,i,j->", H, basis[b].conj(), basis[a])
    return B


# ---------------------------------------------------------------------------
# holomorphic Poisson route


def levi_form_poisson(
    bd: BoundaryData,
    sigma: dict,
    point,
    cr_t_basis: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Block Levi matrix for L = T^{0,1} + graph(sigma) at a non-elliptic point.

    Returns (matrix, cr_t_basis); the basis ordering is (CR cap T^{0,1}
    directions, then dz^1..dz^n).  Requires X_r = sigma(dr^{1,0}) to vanish
    at the point, which is the non-ellipticity condition.
    """
    bd.check_on_boundary(point)
    chart = bd.chart
    n = chart.n_complex
    if n == 0:
        raise ValueError("poisson route needs a chart with complex pairing")
    dr_holo = [
        const(chart, 0.5) * (bd.grad[ri] - const(chart, 1j) * bd.grad[ii])
        for (ri, ii) in chart.complex_pairs
    ]
    X_r = sigma_contract(chart, sigma, dr_holo)
    x_val = np.array(X_r.eval(point))
    g = bd.grad_at(point)
    if np.linalg.norm(x_val) > bd.rank_tol * max(np.linalg.norm(g), 1.0):
        raise ValueError(
            "X_r does not vanish at the point; the point is elliptic"
        )
    if cr_t_basis is None:
        cr_t_basis = cr_kernel_basis(bd, point)
    basis = np.asarray(cr_t_basis, dtype=complex)
    k = basis.shape[0]
    H = wirtinger_hessian(bd, point)
    size = k + n
    B = np.zeros((size, size), dtype=complex)
    # T-block: L(u,v) = sum H_ij conj(v^i) u^j
    for a in range(k):
        for b in range(k):
            B[a, b] = np.einsum("ij,i,j->", H, basis[b].conj(), basis[a])
    # sigma values sig(dz^j) as holomorphic component matrices
    unit = [
        [const(chart, 1) if i == j else const(chart, 0) for i in range(n)]
        for j in range(n)
    ]
    sig_vals = np.zeros((n, n), dtype=complex)  # sig_vals[j][a] = (sigma dz^j)^{z^a}
    for j in range(n):
        vec = sigma_contract(chart, sigma, unit[j])
        for a in range(n):
            ri, ii = chart.complex_pairs[a]
            sig_vals[j, a] = (
                vec.components[ri].eval(point)
                + 1j * vec.components[ii].eval(point)
            )
    # cross block: L(alpha, u) = alpha([X_r, conj(u)]); for the constant
    # extension of conj(u), [X_r, C] = -(grad_C X_r) at a zero of X_r.
    dXr = np.zeros((n, n), dtype=complex)  # dXr[k][j] = d(X_r^{z^k})/d z^j
    for kk in range(n):
        ri, ii = chart.complex_pairs[kk]
        comp = X_r.components[ri] + const(chart, 1j) * X_r.components[ii]
        for j in range(n):
            rj, ij = chart.complex_pairs[j]
            d = 0.5 * (comp.diff(rj).eval(point) - 1j * comp.diff(ij).eval(point))
            dXr[kk, j] = d
    for a in range(k):
        ubar = basis[a].conj()  # holomorphic components of conj(u_a)
        bracket = -dXr @ ubar  # [X_r, conj(u_a)] in dz components
        for j in range(n):
            B[k + j, a] = bracket[j]
            B[a, k + j] = np.conj(bracket[j])
    # sigma-sigma block: L(alpha, beta) = H(sigma alpha, conj(sigma beta))
    for i in range(n):
        for j in range(n):
            B[k + i, k + j] = np.einsum(
                "ab,a,b->", H, sig_vals[i], sig_vals[j].conj()
            )
    return B, basis


# ---------------------------------------------------------------------------
# signatures and convexity


def eigen_signature(
    H: np.ndarray, eig_zero_tol: float = 1e-8
) -> Tuple[int, int, int]:
    """(n_pos, n_neg, n_zero) with |lambda| <= tol * spectral radius zero."""
    H = np.asarray(H)
    if H.size == 0:
        return (0, 0, 0)
    evals = np.linalg.eigvalsh(H)
    radius = max(np.abs(evals).max(), 0.0)
    if radius == 0:
        return (0, 0, len(evals))
    cut = eig_zero_tol * radius
    n_pos = int(np.sum(evals > cut))
    n_neg = int(np.sum(evals < -cut))
    return (n_pos, n_neg, len(evals) - n_pos - n_neg)


def _passes_q(signature, rank, q) -> bool:
    n_pos, n_neg, _ = signature
    return n_pos >= rank - q or n_neg >= q + 1


def q_convex_set(
    alg: AlgebroidSpec,
    bd: BoundaryData,
    samples: Sequence[Sequence[float]],
    route: str = "generic",
) -> ConvexityVerdict:
    """q-convexity verdict over sampled boundary points.

    q is in the q_set iff every sampled non-elliptic point has at least
    (rank - q) positive or at least (q + 1) negative Levi eigenvalues;
    elliptic samples pass unconditionally.  The verdict is certified on the
    sample only.
    """
    reports: List[LeviReport] = []
    for p in samples:
        cls = classify_point(alg, bd, p)
        if cls.elliptic:
            reports.append(LeviReport(tuple(p), cls, None, None, "none"))
        else:
            reports.append(levi_form_generic(alg, bd, p))
    l = alg.rank
    q_set = set()
    witnesses: Dict[int, int] = {}
    for q in range(l + 1):
        ok = True
        for idx, rep in enumerate(reports):
            if rep.signature is None:
                continue
            if not _passes_q(rep.signature, l, q):
                ok = False
                witnesses[q] = idx
                break
        if ok:
            q_set.add(q)
    return ConvexityVerdict(frozenset(q_set), l, tuple(reports), witnesses)


# ---------------------------------------------------------------------------
# generalized-complex shortcut


def gc_ellipticity_via_bivector(
    alg: AlgebroidSpec, bd: BoundaryData, point
) -> Classification:
    """Classification through pi_J: non-elliptic iff pi_J(dr) degenerates.

    Supported spec kinds: graph_two_form with invertible imaginary part
    (symplectic type, pi_J = omega^{-1}), antiholomorphic (complex type,
    pi_J = 0), and holomorphic_poisson (pi_J(dr) tracks X_r).
    """
    bd.check_on_boundary(point)
    kind = alg.meta.get("kind")
    g = bd.grad_at(point)
    gn = np.linalg.norm(g)
    if kind == "antiholomorphic" or (
        kind is None and alg.name.startswith("antiholomorphic")
    ):
        return Classification(False, 0.0)
    if kind == "graph_two_form":
        omega = alg.meta["omega"]
        m = alg.chart.dim
        W = np.zeros((m, m), dtype=complex)
        for (i, j), c in omega.table().items():
            W[i, j] = c.eval(point)
            W[j, i] = -W[i, j]
        W = W.imag  # pi_J = (Im omega)^{-1} for graph(B + i omega)
        try:
            v = np.linalg.solve(W, g.real)
        except np.linalg.LinAlgError:
            raise ValueError("two-form spec is not of generalized-complex type")
        margin = float(np.linalg.norm(v) / gn)
        return Classification(margin >= bd.rank_tol, margin)
    if kind == "holomorphic_poisson":
        chart = alg.chart
        sigma = alg.meta["sigma"]
        dr_holo = [
            const(chart, 0.5) * (bd.grad[ri] - const(chart, 1j) * bd.grad[ii])
            for (ri, ii) in chart.complex_pairs
        ]
        X_r = sigma_contract(chart, sigma, dr_holo)
        xv = np.array(X_r.eval(point))
        pi_dr = 2j * (xv - np.conj(xv))  # 2i X_r + conj(2i X_r), a real vector
        margin = float(np.linalg.norm(pi_dr) / gn)
        return Classification(margin >= bd.rank_tol, margin)
    raise ValueError("spec is not of generalized-complex type")


# ---------------------------------------------------------------------------
# deterministic boundary samplers


def _kronecker_alpha(dim: int) -> np.ndarray:
    # generalized golden-ratio sequence (Roberts' R_d construction)
    phi = 2.0
    for _ in range(64):
        phi = (1 + phi) ** (1.0 / (dim + 1))
    return np.array([(1.0 / phi) ** (i + 1) % 1.0 for i in range(dim)])


def sphere_lattice(dim: int, count: int, radius: float = 1.0) -> np.ndarray:
    """Deterministic Fibonacci-type lattice on the sphere |x| = radius in R^dim."""
    if dim < 2:
        raise ValueError("sphere needs dim >= 2")
    if dim == 2:
        ks = np.arange(count)
        theta = 2 * math.pi * ((ks * 0.6180339887498949) % 1.0)
        return radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    alpha = _kronecker_alpha(dim)
    ks = np.arange(1, count + 1).reshape(-1, 1)
    u = (0.5 + ks * alpha.reshape(1, -1)) % 1.0
    u = np.clip(u, 1e-12, 1 - 1e-12)
    z = ndtri(u)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return radius * z
