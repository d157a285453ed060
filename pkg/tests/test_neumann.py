import math

import numpy as np
import pytest

from hodgebench.neumann import (
    AnnulusGrid,
    DiscreteForm,
    NeumannProblem,
    anchor_energy,
    assemble,
    basic_estimate_report,
    dbar_report,
    family_continuity,
    hodge_split,
    operator_norm_diff,
    solve_dbar,
    solve_dbar_lstsq,
)

RHO0 = 0.5


@pytest.fixture(scope="module")
def problem():
    return assemble(AnnulusGrid(RHO0, 32, 48))


# ---------------------------------------------------------------------------
# assembly sanity


def test_p_on_zbar_exact(problem):
    # dbar(zbar) = 1, exact at the nodes because the stencils are exact on
    # linear radial profiles
    f = problem.sample(0, np.conj)
    pf = problem.apply_P(f)
    one = problem.sample(1, lambda z: np.ones_like(z))
    assert np.max(np.abs(pf.values - one.values)) < 1e-12


def test_p_on_holomorphic_second_order():
    errs = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        f = prob.sample(0, lambda z: z**3)
        pf = prob.apply_P(f)
        errs.append(np.max(np.abs(pf.values)))
    order = math.log2(errs[0] / errs[1])
    assert errs[1] < 1e-3
    assert 1.5 < order < 2.5


def test_integration_by_parts_defect_second_order():
    # (P phi, psi) - (phi, P*_f psi) - boundary term = O(h^2) with the
    # formal-adjoint formula P*_f = -(d/drho + m/rho)/2
    defects = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        rho = prob.grid.rho()
        n = 2  # function mode; pairs with form mode 3
        u = np.exp(rho) * (1 + 0.3 * rho**2)
        v = np.cos(2.0 * rho) + 0.1j * rho
        A = prob.A[n]
        Pf = prob.Pf_formula[n + 1]
        lhs = 2 * math.pi * np.sum((A @ u) * np.conj(v) * prob.w)
        rhs = 2 * math.pi * np.sum(u * np.conj(Pf @ v) * prob.w)
        boundary = math.pi * (
            u[-1] * np.conj(v[-1]) * 1.0 - u[0] * np.conj(v[0]) * RHO0
        )
        defects.append(abs(lhs - rhs - boundary))
    order = math.log2(defects[0] / defects[1])
    assert 1.5 < order < 2.6


def test_box_hermitian_and_nonnegative(problem):
    s = np.sqrt(problem.w_int)
    for m in problem.modes1:
        L = problem.L1[m]
        sym = (s[:, None] * L) / s[None, :]
        assert np.linalg.norm(sym - sym.T.conj()) <= 1e-10 * np.linalg.norm(sym)
        lam = np.linalg.eigvalsh(0.5 * (sym + sym.T.conj()))
        assert lam.min() >= -1e-10 * lam.max()


# ---------------------------------------------------------------------------
# spectrum and harmonic spaces


def test_degree1_harmonics_empty(problem):
    assert problem.harmonic_dim(1) == 0
    # cross-check by a dense rank oracle: the adjoint has trivial kernel
    for m in problem.modes1:
        n = m - 1
        mat = problem.P_star[n] * np.sqrt(problem.w_int)[None, :]
        svals = np.linalg.svd(mat, compute_uv=False)
        assert svals[-1] > 1e-8 * svals[0]


def test_degree0_kernel_contains_holomorphic_shadow(problem):
    # each mode keeps a discrete-holomorphic kernel vector with P h ~ 0
    for m, vec in problem.harmonic_basis(0):
        h = DiscreteForm(0, np.zeros((len(problem.modes0), problem.grid.n_r), dtype=complex))
        idx = int(np.where(problem.modes0 == m)[0][0])
        h.values[idx] = vec
        ph = problem.apply_P(h)
        assert problem.norm(ph) <= 1e-3 * problem.norm(h)


def test_degree0_kernel_residual_is_second_order():
    # the sampled holomorphic function z^3 is annihilated to O(h^2)
    resids = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        h = prob.sample(0, lambda z: z**3)
        resids.append(prob.norm(prob.apply_P(h)) / prob.norm(h))
    order = math.log2(resids[0] / resids[1])
    assert 1.5 < order < 2.5


def test_smallest_eigenvalue_refinement_stable():
    vals = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        vals.append(prob.smallest_positive_eigenvalue(1))
    assert abs(vals[1] - vals[0]) / vals[0] < 0.1


# ---------------------------------------------------------------------------
# Neumann identities


def test_neumann_identities(problem):
    rng = np.random.default_rng(3)
    for _ in range(10):
        for deg in (0, 1):
            phi = problem.random_form(deg, rng)
            box_n = problem.apply_box(problem.apply_N(phi))
            pi = problem.apply_pi(phi)
            resid = box_n.values + pi.values - phi.values
            assert problem.norm(DiscreteForm(deg, resid)) <= 1e-8 * problem.norm(phi)
            n_box = problem.apply_N(problem.apply_box(phi))
            resid2 = n_box.values + pi.values - phi.values
            assert problem.norm(DiscreteForm(deg, resid2)) <= 1e-8 * problem.norm(phi)
            assert problem.norm(problem.apply_N(pi)) <= 1e-10 * max(problem.norm(phi), 1)
            assert (
                problem.norm(problem.apply_pi(problem.apply_N(phi)))
                <= 1e-10 * problem.norm(phi)
            )


def test_n_on_harmonic_is_zero(problem):
    m, vec = problem.harmonic_basis(0)[0]
    h = DiscreteForm(0, np.zeros((len(problem.modes0), problem.grid.n_r), dtype=complex))
    idx = int(np.where(problem.modes0 == m)[0][0])
    h.values[idx] = vec
    assert problem.norm(problem.apply_N(h)) <= 1e-12 * problem.norm(h)


def test_operator_norm_is_inverse_smallest_eigenvalue(problem):
    lam_min = problem.smallest_positive_eigenvalue(1)
    assert problem.operator_norm_N(1) == pytest.approx(1.0 / lam_min, rel=1e-12)


# ---------------------------------------------------------------------------
# Hodge decomposition


def test_hodge_split_orthogonal_complete(problem):
    rng = np.random.default_rng(5)
    for deg in (0, 1):
        phi = problem.random_form(deg, rng)
        harm, im_p, im_ps = hodge_split(problem, phi)
        total = harm.values + im_p.values + im_ps.values
        assert problem.norm(DiscreteForm(deg, total - phi.values)) <= 1e-8 * problem.norm(phi)
        pieces = [harm, im_p, im_ps]
        for a in range(3):
            for b in range(a + 1, 3):
                ip = abs(problem.inner(pieces[a], pieces[b]))
                assert ip <= 1e-8 * problem.norm(phi) ** 2


def test_hodge_split_idempotent_on_exact(problem):
    rng = np.random.default_rng(6)
    g = problem.random_form(0, rng)
    phi = problem.apply_P(g)
    harm, im_p, im_ps = hodge_split(problem, phi)
    assert problem.norm(DiscreteForm(1, im_p.values - phi.values)) <= 1e-8 * problem.norm(phi)
    assert problem.norm(harm) <= 1e-8 * problem.norm(phi)


def test_hodge_split_on_harmonic(problem):
    m, vec = problem.harmonic_basis(0)[0]
    h = DiscreteForm(0, np.zeros((len(problem.modes0), problem.grid.n_r), dtype=complex))
    idx = int(np.where(problem.modes0 == m)[0][0])
    h.values[idx] = vec
    harm, im_p, im_ps = hodge_split(problem, h)
    assert problem.norm(DiscreteForm(0, harm.values - h.values)) <= 1e-8 * problem.norm(h)
    assert problem.norm(im_p) <= 1e-8 * problem.norm(h)
    assert problem.norm(im_ps) <= 1e-8 * problem.norm(h)


# ---------------------------------------------------------------------------
# solving dbar


def exact_minimal_solution(z, rho0=RHO0):
    # dbar u = zbar with u orthogonal to the holomorphic functions:
    # u = zbar^2/2 - (rho0^2/2) z^{-2} (Bergman projection removed)
    return 0.5 * np.conj(z) ** 2 - 0.5 * rho0**2 * z ** (-2.0)


def test_solve_dbar_matches_lstsq_oracle(problem):
    f = problem.sample(1, np.conj)
    u = solve_dbar(problem, f)
    oracle = solve_dbar_lstsq(problem, f)
    err = problem.norm(DiscreteForm(0, u.values - oracle.values))
    assert err <= 1e-8 * problem.norm(oracle)
    pu = problem.apply_P(u)
    assert problem.norm(DiscreteForm(1, pu.values - f.values)) <= 1e-8 * problem.norm(f)


def test_solve_dbar_zero(problem):
    f = DiscreteForm(1, np.zeros((len(problem.modes1), problem.grid.n_r - 2), dtype=complex))
    u = solve_dbar(problem, f)
    assert problem.norm(u) == 0.0


def test_solve_dbar_on_exact_data(problem):
    rng = np.random.default_rng(9)
    g = problem.random_form(0, rng)
    f = problem.apply_P(g)
    u = solve_dbar(problem, f)
    pu = problem.apply_P(u)
    assert problem.norm(DiscreteForm(1, pu.values - f.values)) <= 1e-8 * problem.norm(f)
    pi_g = problem.apply_pi(g)
    bound = problem.norm(DiscreteForm(0, g.values - pi_g.values)) * (1 + 1e-8)
    assert problem.norm(u) <= bound


def test_solve_dbar_convergence_to_smooth_solution():
    errs = []
    sizes = (24, 48, 96)
    for n_r in sizes:
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        f = prob.sample(1, np.conj)
        u = solve_dbar(prob, f)
        ref = prob.sample(0, exact_minimal_solution)
        err = prob.norm(DiscreteForm(0, u.values - ref.values)) / prob.norm(ref)
        errs.append(err)
    slopes = [
        math.log(errs[i] / errs[i + 1]) / math.log(sizes[i + 1] / sizes[i])
        for i in range(len(sizes) - 1)
    ]
    assert 1.6 <= slopes[-1] <= 2.4


# ---------------------------------------------------------------------------
# estimates and family


def test_basic_estimate_finite_and_stable():
    reports = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        reports.append(basic_estimate_report(prob, trials=15, seed=2))
    for key in ("C_E_vs_Q", "C_D_vs_E"):
        a, b = reports[0][key], reports[1][key]
        assert math.isfinite(a) and a > 0
        assert abs(a - b) / a <= 0.2


def test_basic_estimate_one_mode_oracle():
    # single-mode polynomial coefficient: E and Q have closed forms; the
    # Richardson-extrapolated discrete ratio matches to 1e-6
    import scipy.integrate as si

    m = 3  # form mode
    v = lambda r: (r - RHO0) * (1.0 - r)  # vanishes at both radii
    dv = lambda r: 1.0 + RHO0 - 2.0 * r
    anchor = lambda r: 0.5 * (dv(r) - m * v(r) / r)
    pstar = lambda r: -0.5 * (dv(r) + m * v(r) / r)
    l2 = si.quad(lambda r: v(r) ** 2 * r, RHO0, 1.0)[0]
    e2 = si.quad(lambda r: anchor(r) ** 2 * r, RHO0, 1.0)[0] + l2
    q2 = l2 + si.quad(lambda r: pstar(r) ** 2 * r, RHO0, 1.0)[0]
    exact_ratio = e2 / q2

    def discrete_ratio(n_r):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        rho_int = prob.grid.rho()[1:-1]
        idx = int(np.where(prob.modes1 == m)[0][0])
        vals = np.zeros((len(prob.modes1), n_r - 2), dtype=complex)
        vals[idx] = v(rho_int)
        phi = DiscreteForm(1, vals)
        e2d = anchor_energy(prob, phi) + prob.norm(phi) ** 2
        ps = prob.apply_P_star(phi)
        q2d = prob.norm(phi) ** 2 + prob.norm(ps) ** 2
        return e2d / q2d

    coarse = discrete_ratio(129)
    fine = discrete_ratio(257)
    richardson = fine + (fine - coarse) / 3.0
    assert richardson == pytest.approx(exact_ratio, abs=1e-6)


def test_family_pure_rescaling_matches_spectral_oracle():
    grid = AnnulusGrid(RHO0, 16, 40)
    base = assemble(grid)
    for eps in (0.1, 0.01):
        prob = NeumannProblem(grid, eps=eps, profile=lambda r: np.ones_like(r))
        rng = np.random.default_rng(1)
        phi = prob.random_form(1, rng)
        lhs = prob.apply_N(phi)
        rhs = base.apply_N(phi)
        expected = rhs.values / (1.0 + eps) ** 2
        err = prob.norm(DiscreteForm(1, lhs.values - expected))
        assert err <= 1e-8 * prob.norm(DiscreteForm(1, expected))


def test_family_bump_profile_linear_slope():
    grid = AnnulusGrid(RHO0, 16, 40)

    def bump(r):
        mid = 0.5 * (1.0 + RHO0)
        width = 0.25 * (1.0 - RHO0)
        u = (r - mid) / width
        out = np.zeros_like(r)
        inside = np.abs(u) < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        return out

    report = family_continuity(grid, bump, [1e-1, 1e-2, 1e-3])
    assert report["harmonic_dims_deg1"] == [0, 0, 0]
    diffs = report["norm_diffs"]
    assert diffs[0] > diffs[1] > diffs[2] > 0
    assert 0.8 <= report["fitted_slope"] <= 1.2


def test_family_zero_deformation_is_exact():
    from hodgebench.neumann import operator_norm_diff

    grid = AnnulusGrid(RHO0, 16, 32)
    base = assemble(grid)
    same = assemble(grid)
    assert operator_norm_diff(base, same) <= 1e-13


def test_family_rejects_ellipticity_loss():
    grid = AnnulusGrid(RHO0, 16, 32)
    with pytest.raises(ValueError):
        family_continuity(grid, lambda r: np.ones_like(r), [1.5])


def test_elliptic_regularity_trend():
    consts = []
    for n_r in (32, 64):
        prob = assemble(AnnulusGrid(RHO0, 16, n_r))
        rho = prob.grid.rho()
        worst = 0.0
        for m in prob.modes1:
            lam, V = prob.eig1[m]
            for j in range(V.shape[1]):
                vec = V[:, j]
                phi = DiscreteForm(1, np.zeros((len(prob.modes1), n_r - 2), dtype=complex))
                idx = int(np.where(prob.modes1 == m)[0][0])
                phi.values[idx] = vec
                ext = np.zeros(n_r, dtype=complex)
                ext[1:-1] = vec
                from hodgebench.neumann import _diff_matrix

                D = _diff_matrix(n_r, prob.grid.h)
                h1 = math.sqrt(
                    2 * math.pi
                    * float(
                        np.sum(
                            (np.abs(D @ ext) ** 2 + (m / rho) ** 2 * np.abs(ext) ** 2 + np.abs(ext) ** 2)
                            * prob.w
                        )
                    )
                )
                worst = max(worst, h1 / ((lam[j] + 1.0) * prob.norm(phi)))
        consts.append(worst)
    assert abs(consts[0] - consts[1]) / consts[0] <= 0.25


def test_dbar_report_smoke():
    out = dbar_report(n_theta=16, n_r=32, trials=6, seed=1)
    assert out["harmonic_dim_deg1"] == 0
    assert out["identity_residual"] <= 1e-8
    assert out["hodge_orthogonality"] <= 1e-8
    assert out["solve_dbar_vs_lstsq"] <= 1e-8
