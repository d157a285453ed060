import random

import numpy as np
import pytest

from hodgebench.algebroids import (
    AlgebroidForm,
    ce_differential,
    d_squared_residual,
    is_elliptic_at,
    jacobiator,
    make_antiholomorphic,
    make_graph_bivector,
    make_graph_two_form,
    make_holomorphic_poisson,
    make_tangent,
)
from hodgebench.calculus import FormExpr, coordinate_field, lie_bracket, wirtinger
from hodgebench.scalars import Chart, const, parse_expr, var


def sphere_points(dim, count, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(count, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return [list(map(complex, p)) for p in pts]


# ---------------------------------------------------------------------------
# constructors


def test_tangent_anchors_and_exterior_derivative():
    chart = Chart.real(2)
    alg = make_tangent(chart)
    assert alg.anchors[0] == coordinate_field(chart, 0)
    assert alg.anchors[1] == coordinate_field(chart, 1)
    f = parse_expr("x1*x2", chart)
    df = ce_differential(alg, AlgebroidForm.from_function(alg, f))
    assert df.coeff((0,)) == var(chart, 1)
    assert df.coeff((1,)) == var(chart, 0)
    flag, margin = is_elliptic_at(alg, [0.3, -1.2])
    assert flag and margin == pytest.approx(1.0)


def test_antiholomorphic_anchor_and_disjoint_conjugate():
    alg = make_antiholomorphic(1)
    chart = alg.chart
    expected = wirtinger(chart, 1, anti=True)
    assert alg.anchors[0] == expected
    # rho(L) and its conjugate intersect trivially: the stacked 2x2 matrix
    # [dzbar | dz] has full rank, margin 1/sqrt(2) per column scaling
    flag, margin = is_elliptic_at(alg, [0.2, 0.4])
    assert flag
    A = alg.anchor_matrix_at([0.2, 0.4])
    # dim(rho(L) cap conj(rho(L))) = rank A + rank conj(A) - rank [A | conj(A)] = 0
    inter = 2 * np.linalg.matrix_rank(A) - np.linalg.matrix_rank(
        np.hstack([A, A.conj()])
    )
    assert inter == 0
    assert ce_differential(
        alg, AlgebroidForm.from_function(alg, parse_expr("z1*zb1", chart))
    ).coeff((0,)) == parse_expr("z1", chart)


def test_antiholomorphic_d_squared_zero():
    alg = make_antiholomorphic(2)
    assert d_squared_residual(alg, sphere_points(4, 5)) == 0.0


def test_graph_two_form_structure_vanishes():
    chart = Chart.real(3)
    from itertools import combinations

    table = {
        idx: parse_expr("x1 - 2*x3", chart) if idx == (0, 1) else var(chart, idx[0])
        for idx in combinations(range(3), 2)
    }
    omega = FormExpr.from_table(chart, 2, table)
    alg = make_graph_two_form(omega)
    assert all(c.is_zero for row in alg.structure.values() for c in row)
    assert d_squared_residual(alg, sphere_points(3, 4)) == 0.0


def test_graph_bivector_zero_and_constant():
    chart = Chart.real(2)
    alg0 = make_graph_bivector(chart, {})
    assert all(a.is_zero for a in alg0.anchors)
    assert d_squared_residual(alg0, sphere_points(2, 3)) == 0.0
    alg1 = make_graph_bivector(chart, {(0, 1): const(chart, 1)})
    assert d_squared_residual(alg1, sphere_points(2, 3)) == 0.0
    flag, _ = is_elliptic_at(alg0, [0.5, 0.5])
    assert not flag


def test_graph_bivector_non_jacobi_cross_validated():
    # pi = x2 d1^d2 + x1 d2^d3 has nonvanishing Jacobiator
    chart = Chart.real(3)
    pi = {(0, 1): var(chart, 1), (1, 2): var(chart, 0)}
    alg = make_graph_bivector(chart, pi)
    pts = sphere_points(3, 6, seed=4)
    residual = d_squared_residual(alg, pts)
    assert residual > 1e-6
    jac = jacobiator(chart, pi, var(chart, 0), var(chart, 1), var(chart, 2))
    assert not jac.is_zero
    # both-ways battery: d^2 == 0 exactly when the Jacobiator vanishes
    batteries = [
        ({}, True),
        ({(0, 1): const(chart, 1)}, True),
        ({(0, 1): var(chart, 2), (0, 2): -var(chart, 1), (1, 2): var(chart, 0)}, True),
        (pi, False),
        ({(0, 1): var(chart, 0)}, True),  # {x1,x2}=x1: a Lie-Poisson piece
    ]
    for table, should_vanish in batteries:
        spec = make_graph_bivector(chart, table)
        res = d_squared_residual(spec, pts)
        jac_zero = all(
            jacobiator(
                chart, table, var(chart, a), var(chart, b), var(chart, c)
            ).is_zero
            for a in range(3)
            for b in range(3)
            for c in range(3)
        )
        assert jac_zero == should_vanish
        assert (res == 0.0) == should_vanish


def test_holomorphic_poisson_example_anchor_and_integrability():
    # sigma = x d/dx ^ d/dy + d/dz ^ d/dw on C^4 (k = 1)
    n = 4
    chart = Chart.complex_chart(n)
    x = parse_expr("z1", chart)
    sigma = {(1, 2): x, (3, 4): const(chart, 1)}
    alg = make_holomorphic_poisson(n, sigma)
    assert alg.rank == 8
    # anchor of the dz^1-section is sigma(dx) = x d/dy
    expected = wirtinger(chart, 2, anti=False).scale(x)
    assert alg.anchors[n + 0] == expected
    assert d_squared_residual(alg, sphere_points(8, 4)) == 0.0


def test_holomorphic_poisson_rejects_nonholomorphic():
    chart = Chart.complex_chart(2)
    with pytest.raises(ValueError):
        make_holomorphic_poisson(2, {(1, 2): parse_expr("zb1", chart)})


def test_holomorphic_poisson_sigma_zero_reduces():
    alg = make_holomorphic_poisson(2, {})
    assert all(a.is_zero for a in alg.anchors[2:])
    assert d_squared_residual(alg, sphere_points(4, 4)) == 0.0


# ---------------------------------------------------------------------------
# CE differential properties


def test_ce_leibniz_rule():
    chart = Chart.real(3)
    alg = make_tangent(chart)
    rng = random.Random(5)

    def rand_poly():
        e = const(chart, 0)
        for _ in range(3):
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            term = const(chart, c)
            for _ in range(rng.randrange(0, 3)):
                term = term * var(chart, rng.randrange(3))
            e = e + term
        return e

    f = rand_poly()
    phi = AlgebroidForm(alg, 1, tuple(((k,), rand_poly()) for k in range(3)))
    lhs = ce_differential(alg, phi.scale(f))
    df = ce_differential(alg, AlgebroidForm.from_function(alg, f))
    rhs = df.wedge(phi) + ce_differential(alg, phi).scale(f)
    assert (lhs - rhs).is_zero


def test_ce_differential_requires_structure():
    chart = Chart.real(2)
    from hodgebench.algebroids import AlgebroidSpec

    alg = AlgebroidSpec(
        chart, 2, tuple(coordinate_field(chart, i) for i in range(2)), None
    )
    with pytest.raises(ValueError):
        ce_differential(alg, AlgebroidForm.from_function(alg, var(chart, 0)))


def test_anchored_bracket_compatibility():
    # rho([w_i,w_j]) = [rho(w_i), rho(w_j)] for the built-in Lie algebroids
    for alg in (
        make_tangent(Chart.real(3)),
        make_antiholomorphic(2),
        make_holomorphic_poisson(2, {(1, 2): parse_expr("z1", Chart.complex_chart(2))}),
    ):
        for i in range(alg.rank):
            for j in range(i + 1, alg.rank):
                lhs = lie_bracket(alg.anchors[i], alg.anchors[j])
                rhs_comps = None
                for k, c in enumerate(alg.frame_bracket(i, j)):
                    piece = alg.anchors[k].scale(c)
                    rhs_comps = piece if rhs_comps is None else rhs_comps + piece
                assert (lhs - rhs_comps).is_zero


def test_elliptic_margin_frame_change_invariance():
    alg = make_antiholomorphic(2)
    point = [0.1, 0.2, 0.3, 0.4]
    flag, _ = is_elliptic_at(alg, point)
    # an invertible constant frame change keeps the flag
    from hodgebench.algebroids import AlgebroidSpec

    chart = alg.chart
    mixed = (
        alg.anchors[0] + alg.anchors[1],
        alg.anchors[0] - alg.anchors[1],
    )
    alg2 = AlgebroidSpec(chart, 2, mixed, {})
    flag2, _ = is_elliptic_at(alg2, point)
    assert flag == flag2 == True  # noqa: E712
