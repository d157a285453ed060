import math

import numpy as np
import pytest

from hodgebench.sobolev import (
    HalfGrid,
    TorusGrid,
    boundary_square,
    ck_norm,
    commutator,
    d_norm,
    double_commutator,
    half_inner,
    half_space_subestimate,
    kernel_lemma_check,
    l2_inner,
    lambda_full,
    lambda_tangential,
    leibniz_battery,
    radial_derivative,
    random_half_field,
    random_torus_field,
    sobolev_norm,
    tangential_norm,
)

TWO_PI = 2.0 * math.pi


def mode_field(grid, xi):
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    phase = sum(x * k for x, k in zip(mesh, xi))
    return np.exp(1j * phase)


# ---------------------------------------------------------------------------
# multipliers and norms


def test_lambda_identity_and_constant():
    grid = TorusGrid(2, 32)
    rng = np.random.default_rng(0)
    phi = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    assert np.allclose(lambda_full(grid, phi, 0.0), phi)
    c = np.full(grid.shape, 2.5 + 1j)
    assert np.allclose(lambda_full(grid, c, 1.7), c)


def test_lambda_on_single_mode():
    grid = TorusGrid(2, 32)
    xi = (3, -5)
    phi = mode_field(grid, xi)
    s = 0.75
    expected = (1.0 + 3**2 + 5**2) ** (s / 2.0) * phi
    assert np.allclose(lambda_full(grid, phi, s), expected)


def test_norm_of_single_mode():
    grid = TorusGrid(2, 32)
    xi = (2, 1)
    phi = mode_field(grid, xi)
    s = 1.5
    expected = (1.0 + 5.0) ** (s / 2.0) * TWO_PI ** (grid.dim / 2.0)
    assert sobolev_norm(grid, phi, s) == pytest.approx(expected, rel=1e-12)


def test_multiplier_group_law():
    grid = TorusGrid(2, 32)
    rng = np.random.default_rng(1)
    phi = random_torus_field(grid, rng)
    for s, t in [(0.5, 1.0), (-0.5, 2.0), (1.3, -1.3)]:
        a = lambda_full(grid, lambda_full(grid, phi, s), t)
        b = lambda_full(grid, phi, s + t)
        assert np.linalg.norm(a - b) <= 1e-10 * np.linalg.norm(b)


def test_duality_pairing():
    grid = TorusGrid(2, 64)
    rng = np.random.default_rng(2)
    for s in (0.5, 1.0, 2.0):
        phi = random_torus_field(grid, rng)
        psi = random_torus_field(grid, rng)
        lhs = abs(l2_inner(grid, phi, psi))
        rhs = sobolev_norm(grid, phi, -s) * sobolev_norm(grid, psi, s)
        assert lhs <= rhs * (1 + 1e-12)


# ---------------------------------------------------------------------------
# tangential operators


def test_tangential_identity_cases():
    grid = HalfGrid(2, 32, 33)
    rng = np.random.default_rng(3)
    phi = random_half_field(grid, rng)
    assert np.allclose(lambda_tangential(grid, phi, 0.0), phi)
    radial_only = np.tile(np.cos(grid.r_axis()), (grid.n_t, 1)).astype(complex)
    assert np.allclose(lambda_tangential(grid, radial_only, 1.25), radial_only)
    back = lambda_tangential(grid, lambda_tangential(grid, phi, 0.8), -0.8)
    assert np.allclose(back, phi, atol=1e-12)


def test_tangential_norm_zero_is_l2():
    grid = HalfGrid(2, 32, 41)
    rng = np.random.default_rng(4)
    phi = random_half_field(grid, rng)
    l2 = math.sqrt(half_inner(grid, phi, phi).real)
    assert tangential_norm(grid, phi, 0.0) == pytest.approx(l2, rel=1e-12)


def test_d_norm_against_quadrature_oracle():
    # phi(t, r) = e^{i tau0 t} g(r):
    #   ||D phi||_{d,s}^2 = (1+tau0^2)^{s+1} ||g||^2 + (1+tau0^2)^s ||g'||^2
    # with both radial integrals evaluated by an independent quadrature
    grid = HalfGrid(2, 32, 257, depth=TWO_PI)
    tau0 = 3
    r = grid.r_axis()
    g = np.exp(-((r + 3.0) ** 2))
    gp = -2.0 * (r + 3.0) * g
    t = grid.t_axes()[0]
    phi = np.exp(1j * tau0 * t)[:, None] * g[None, :]
    from scipy.integrate import quad

    g2 = quad(lambda x: math.exp(-2.0 * (x + 3.0) ** 2), -TWO_PI, 0.0)[0]
    gp2 = quad(
        lambda x: (2.0 * (x + 3.0) * math.exp(-((x + 3.0) ** 2))) ** 2,
        -TWO_PI,
        0.0,
    )[0]
    s = -0.5
    expected = math.sqrt(
        (1 + tau0**2) ** (s + 1) * g2 * TWO_PI + (1 + tau0**2) ** s * gp2 * TWO_PI
    )
    assert d_norm(grid, phi, s) == pytest.approx(expected, rel=1e-6)


def test_radial_derivative_fourth_order():
    errs = []
    for n_r in (33, 65):
        grid = HalfGrid(2, 16, n_r, depth=1.0)
        r = grid.r_axis()
        f = np.sin(3.0 * r)[None, :] * np.ones((grid.n_t, 1))
        df = radial_derivative(grid, f)
        errs.append(np.max(np.abs(df - 3.0 * np.cos(3.0 * r)[None, :])))
    order = math.log2(errs[0] / errs[1])
    assert order > 3.5


# ---------------------------------------------------------------------------
# kernel lemma


def test_kernel_lemma_trivial_points():
    # part i at xi = eta: LHS = 1 <= 2^{|k|}; part ii at xi = eta: LHS = 0
    out_i = kernel_lemma_check("i", ks=(1.0,), coords=(0,))
    assert out_i["max_violation"] <= 0.0
    out_ii = kernel_lemma_check("ii", ks=(2.0,), coords=(0,))
    assert out_ii["max_violation"] <= 0.0


def test_kernel_lemma_full_lattice():
    for part in ("i", "ii", "iii"):
        out = kernel_lemma_check(part)
        assert out["max_violation"] <= 1e-12, (part, out)


def test_kernel_lemma_rejects_unknown_part():
    with pytest.raises(ValueError):
        kernel_lemma_check("iv")


# ---------------------------------------------------------------------------
# commutators


def test_commutator_trivial_cases():
    grid = TorusGrid(2, 64)
    rng = np.random.default_rng(5)
    phi = random_torus_field(grid, rng)
    f_const = np.full(grid.shape, 1.5 - 0.5j)
    out = commutator(grid, 1.0, f_const, phi)
    assert np.max(np.abs(out)) <= 1e-12 * np.max(np.abs(phi))
    f = random_torus_field(grid, rng)
    out0 = commutator(grid, 0.0, f, phi)
    assert np.max(np.abs(out0)) <= 1e-12 * np.max(np.abs(f * phi))


def test_commutator_refinement_consistency():
    # the reference-grid construction pins one continuum function, so the
    # commutators agree across resolutions once products stay in band
    coarse = TorusGrid(2, 64)
    fine = TorusGrid(2, 128)
    rng1 = np.random.default_rng(11)
    rng2 = np.random.default_rng(11)
    f_c, phi_c = random_torus_field(coarse, rng1), random_torus_field(coarse, rng1)
    f_f, phi_f = random_torus_field(fine, rng2), random_torus_field(fine, rng2)
    for k in (0.5, 1.0, 2.0):
        out_c = commutator(coarse, k, f_c, phi_c)
        out_f = commutator(fine, k, f_f, phi_f)
        n_c = sobolev_norm(coarse, out_c, 0.0)
        n_f = sobolev_norm(fine, out_f, 0.0)
        assert n_c == pytest.approx(n_f, rel=2e-2)
    # double and nested keep the same scale as well
    d_c = sobolev_norm(coarse, double_commutator(coarse, 1.0, f_c, phi_c), 0.0)
    d_f = sobolev_norm(fine, double_commutator(fine, 1.0, f_f, phi_f), 0.0)
    assert d_c == pytest.approx(d_f, rel=5e-2)


# ---------------------------------------------------------------------------
# batteries


def test_battery_deterministic_and_finite():
    grid = TorusGrid(2, 64)
    one = leibniz_battery("A.i", grid, trials=4, seed=7)
    two = leibniz_battery("A.i", grid, trials=4, seed=7)
    assert one == two
    assert math.isfinite(one["max_ratio"]) and one["max_ratio"] > 0


def test_battery_homogeneity_under_f_scaling():
    # commutators and norms are linear in f, so scaling f rescales LHS and
    # RHS together and the ratio is unchanged
    grid = TorusGrid(2, 64)
    rng = np.random.default_rng(13)
    f = random_torus_field(grid, rng)
    phi = random_torus_field(grid, rng)
    lam = 7.0
    for k in (1.0, 2.0):
        base = sobolev_norm(grid, commutator(grid, k, f, phi), 0.5)
        scaled = sobolev_norm(grid, commutator(grid, k, lam * f, phi), 0.5)
        assert scaled == pytest.approx(lam * base, rel=1e-12)
    base_rhs = sobolev_norm(grid, f, 3.0)
    assert sobolev_norm(grid, lam * f, 3.0) == pytest.approx(
        lam * base_rhs, rel=1e-12
    )


def test_shared_bump_product_ratio_below_one():
    # f = phi = one smooth half-box bump: the Sobolev embedding constant on
    # the 2-torus is below one, so ||f phi||_0 <= ||f||_a ||phi|| already
    grid = TorusGrid(2, 64)
    x = grid.axes()[0]
    u = (x - math.pi) / (math.pi / 2)
    bump1d = np.zeros_like(u)
    inside = np.abs(u) < 1
    bump1d[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    f = (bump1d[:, None] * bump1d[None, :]).astype(complex)
    a = 1.0 + grid.dim / 2.0
    lhs = sobolev_norm(grid, f * f, 0.0)
    rhs = sobolev_norm(grid, f, a) * sobolev_norm(grid, f, 0.0) + sobolev_norm(
        grid, f, a
    ) * sobolev_norm(grid, f, 0.0)
    assert lhs / rhs <= 1.0


def test_tangential_duality_pairing():
    grid = HalfGrid(2, 32, 33)
    rng = np.random.default_rng(8)
    for s in (0.5, 1.0):
        phi = random_half_field(grid, rng)
        psi = random_half_field(grid, rng)
        lhs = abs(half_inner(grid, phi, psi))
        rhs = tangential_norm(grid, phi, -s) * tangential_norm(grid, psi, s)
        assert lhs <= rhs * (1 + 1e-12)


def test_tangential_battery_runs():
    grid = HalfGrid(2, 64, 33)
    out = leibniz_battery("T.i", grid, trials=2, seed=3)
    assert math.isfinite(out["max_ratio"]) and out["max_ratio"] > 0


def test_battery_rejects_wrong_grid():
    with pytest.raises(TypeError):
        leibniz_battery("T.i", TorusGrid(2, 32), trials=1)
    with pytest.raises(TypeError):
        leibniz_battery("A.i", HalfGrid(2, 32, 17), trials=1)


def test_half_space_subestimate_finite_and_stable():
    coarse = HalfGrid(2, 64, 33)
    fine = HalfGrid(2, 128, 65)
    out_c = half_space_subestimate(coarse, trials=10, seed=1)
    out_f = half_space_subestimate(fine, trials=10, seed=1)
    assert math.isfinite(out_c["max_ratio"])
    drift = abs(out_f["max_ratio"] - out_c["max_ratio"]) / out_c["max_ratio"]
    assert drift <= 0.2


def test_ck_norm_on_trig():
    grid = TorusGrid(1, 32)
    x = grid.axes()[0]
    f = np.cos(2 * x).astype(complex)
    assert ck_norm(grid, f, 0) == pytest.approx(1.0, rel=1e-12)
    assert ck_norm(grid, f, 1) == pytest.approx(2.0, rel=1e-12)
    assert ck_norm(grid, f, 3) == pytest.approx(8.0, rel=1e-12)


def test_boundary_square():
    grid = HalfGrid(2, 32, 17)
    phi = np.zeros(grid.shape, dtype=complex)
    phi[..., -1] = 2.0
    assert boundary_square(grid, phi) == pytest.approx(4.0 * TWO_PI, rel=1e-12)
