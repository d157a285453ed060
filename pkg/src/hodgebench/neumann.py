"""Discrete dbar-Neumann problem on an annulus in C.

The annulus {rho0 <= |z| <= 1} carries L = span{d/dzbar}, so d_L is the
dbar-operator sending functions to (0,1)-forms, written per angular mode in
polar form: dzbar = e^{i theta}/2 (d_rho + (i/rho) d_theta).  Angular modes
decouple exactly; the radial direction uses 2nd-order finite differences
and the polar weight rho drho dtheta (trapezoid in rho, exact in theta).

At rank one the degree-1 Neumann condition degenerates to a Dirichlet
condition on the coefficient, so degree-1 fields live on the interior
radial nodes.  The degree-1 Laplacian is assembled as P P*_w, with P*_w the
exact discrete adjoint of P; this keeps every operator Hermitian to machine
precision and makes the Hodge identities exact at fixed resolution, while
P*_w remains a 2nd-order-consistent discretization of the formal adjoint
-d/dz.  The degree-0 kernel is the discrete shadow of the holomorphic
functions (plus the usual centered-difference companion mode); only
residual statements are asserted about it, never a dimension count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "AnnulusGrid",
    "DiscreteForm",
    "NeumannProblem",
    "assemble",
    "solve_dbar",
    "hodge_split",
    "basic_estimate_report",
    "family_continuity",
    "dbar_report",
]


@dataclass(frozen=True)
class AnnulusGrid:
    rho0: float = 0.5
    n_theta: int = 64
    n_r: int = 64

    def __post_init__(self):
        if not 0.1 <= self.rho0 < 1.0:
            raise ValueError("inner radius must lie in [0.1, 1)")
        if self.n_r < 16:
            raise ValueError("need at least 16 radial points")
        if self.n_theta < 4 or self.n_theta % 2:
            raise ValueError("n_theta must be even and >= 4")

    @property
    def h(self) -> float:
        return (1.0 - self.rho0) / (self.n_r - 1)

    def rho(self) -> np.ndarray:
        return self.rho0 + np.arange(self.n_r) * self.h

    def weights(self) -> np.ndarray:
        w = np.full(self.n_r, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w * self.rho()

    def modes0(self) -> np.ndarray:
        m = self.n_theta // 2
        return np.arange(-m, m)

    def modes1(self) -> np.ndarray:
        return self.modes0() + 1


def _diff_matrix(n: int, h: float) -> np.ndarray:
    D = np.zeros((n, n))
    for k in range(1, n - 1):
        D[k, k - 1] = -0.5 / h
        D[k, k + 1] = 0.5 / h
    D[0, :3] = np.array([-1.5, 2.0, -0.5]) / h
    D[-1, -3:] = np.array([0.5, -2.0, 1.5]) / h
    return D


@dataclass
class DiscreteForm:
    """Coefficients per (angular mode, radial node); degree 1 is carried by
    the frame dzbar and lives on the interior radial nodes."""

    degree: int
    values: np.ndarray  # (n_modes, n_r) for degree 0, (n_modes, n_r - 2) for 1

    def copy(self) -> "DiscreteForm":
        return DiscreteForm(self.degree, self.values.copy())


class NeumannProblem:
    """Per-mode dense operators P, adjoints, Laplacians, spectra, N and pi."""

    def __init__(self, grid: AnnulusGrid, eps: float = 0.0,
                 profile: Optional[Callable] = None,
                 harmonic_tol: float = 1e-8):
        self.grid = grid
        self.harmonic_tol = harmonic_tol
        rho = grid.rho()
        self.w = grid.weights()
        self.w_int = self.w[1:-1]
        D = _diff_matrix(grid.n_r, grid.h)
        scale = np.ones(grid.n_r)
        if profile is not None and eps != 0.0:
            scale = 1.0 + eps * np.asarray(profile(rho), dtype=float)
            if np.min(scale) <= 0:
                raise ValueError("ellipticity lost: 1 + eps*a touches zero")
        self.scale = scale
        self.modes0 = grid.modes0()
        self.modes1 = grid.modes1()
        self.A: Dict[int, np.ndarray] = {}
        self.P: Dict[int, np.ndarray] = {}
        self.P_star: Dict[int, np.ndarray] = {}
        self.Pf_formula: Dict[int, np.ndarray] = {}
        for n in self.modes0:
            A = 0.5 * (D - n * np.diag(1.0 / rho))
            A = scale[:, None] * A
            self.A[n] = A
            self.P[n] = A[1:-1, :]
            # exact weighted adjoint of P: degree-1 interior -> degree-0 grid
            self.P_star[n] = (A.T[:, 1:-1] * self.w_int[None, :]) / self.w[:, None]
        for m in self.modes1:
            # formal-adjoint formula -(d/drho + m/rho)/2, for defect checks
            self.Pf_formula[m] = -(scale[:, None] * 0.5) * (
                D + m * np.diag(1.0 / rho)
            )
        self._decompose()

    # -- assembly of Laplacians and spectra ---------------------------------

    def _decompose(self):
        self.L1: Dict[int, np.ndarray] = {}
        self.eig1: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self.L0: Dict[int, np.ndarray] = {}
        self.eig0: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        s_int = np.sqrt(self.w_int)
        s_full = np.sqrt(self.w)
        for n in self.modes0:
            m = n + 1
            P, Ps = self.P[n], self.P_star[n]
            L1 = P @ Ps
            self.L1[m] = L1
            sym = (s_int[:, None] * L1) / s_int[None, :]
            sym = 0.5 * (sym + sym.T.conj())
            lam, V = np.linalg.eigh(sym)
            self.eig1[m] = (lam, V / s_int[:, None])
            L0 = Ps @ P
            self.L0[n] = L0
            sym0 = (s_full[:, None] * L0) / s_full[None, :]
            sym0 = 0.5 * (sym0 + sym0.T.conj())
            lam0, V0 = np.linalg.eigh(sym0)
            self.eig0[n] = (lam0, V0 / s_full[:, None])
        self.lam_max1 = max(self.eig1[m][0].max() for m in self.modes1)
        self.lam_max0 = max(self.eig0[n][0].max() for n in self.modes0)

    def _bundle(self, degree: int):
        if degree == 1:
            return self.modes1, self.eig1, self.harmonic_tol * self.lam_max1
        return self.modes0, self.eig0, self.harmonic_tol * self.lam_max0

    # -- inner products ------------------------------------------------------

    def inner(self, phi: DiscreteForm, psi: DiscreteForm) -> complex:
        w = self.w if phi.degree == 0 else self.w_int
        return complex(2.0 * math.pi * np.sum(phi.values * np.conj(psi.values) * w))

    def norm(self, phi: DiscreteForm) -> float:
        return math.sqrt(max(self.inner(phi, phi).real, 0.0))

    # -- operators -----------------------------------------------------------

    def apply_P(self, phi: DiscreteForm) -> DiscreteForm:
        if phi.degree != 0:
            # degree 2 is void at rank one
            return DiscreteForm(2, np.zeros_like(phi.values))
        out = np.stack([self.P[n] @ phi.values[i] for i, n in enumerate(self.modes0)])
        return DiscreteForm(1, out)

    def apply_P_star(self, phi: DiscreteForm) -> DiscreteForm:
        if phi.degree != 1:
            return DiscreteForm(-1, np.zeros_like(phi.values))
        out = np.stack(
            [self.P_star[m - 1] @ phi.values[i] for i, m in enumerate(self.modes1)]
        )
        return DiscreteForm(0, out)

    def apply_box(self, phi: DiscreteForm) -> DiscreteForm:
        table = self.L1 if phi.degree == 1 else self.L0
        modes = self.modes1 if phi.degree == 1 else self.modes0
        out = np.stack([table[m] @ phi.values[i] for i, m in enumerate(modes)])
        return DiscreteForm(phi.degree, out)

    def _spectral_apply(self, phi: DiscreteForm, weight_fn) -> DiscreteForm:
        modes, eig, cut = self._bundle(phi.degree)
        w = self.w_int if phi.degree == 1 else self.w
        out = np.zeros_like(phi.values)
        for i, m in enumerate(modes):
            lam, V = eig[m]
            coeff = V.conj().T @ (w * phi.values[i])
            out[i] = V @ (weight_fn(lam, cut) * coeff)
        return DiscreteForm(phi.degree, out)

    def apply_N(self, phi: DiscreteForm) -> DiscreteForm:
        """Neumann operator: pseudo-inverse of box on the complement of the
        harmonic space, zero on it."""
        return self._spectral_apply(
            phi, lambda lam, cut: np.where(lam > cut, 1.0 / np.where(lam > cut, lam, 1.0), 0.0)
        )

    def apply_pi(self, phi: DiscreteForm) -> DiscreteForm:
        return self._spectral_apply(
            phi, lambda lam, cut: np.where(lam > cut, 0.0, 1.0)
        )

    # -- spectrum bookkeeping --------------------------------------------------

    def harmonic_dim(self, degree: int) -> int:
        modes, eig, cut = self._bundle(degree)
        return int(sum(np.sum(eig[m][0] <= cut) for m in modes))

    def harmonic_basis(self, degree: int) -> List[Tuple[int, np.ndarray]]:
        modes, eig, cut = self._bundle(degree)
        out = []
        for m in modes:
            lam, V = eig[m]
            for j in np.nonzero(lam <= cut)[0]:
                out.append((m, V[:, j]))
        return out

    def smallest_positive_eigenvalue(self, degree: int) -> float:
        modes, eig, cut = self._bundle(degree)
        candidates = [
            lam[lam > cut].min() for m in modes for lam in (eig[m][0],)
            if np.any(lam > cut)
        ]
        return float(min(candidates))

    def operator_norm_N(self, degree: int = 1) -> float:
        return 1.0 / self.smallest_positive_eigenvalue(degree)

    # -- sampling ---------------------------------------------------------------

    def sample(self, degree: int, fn: Callable) -> DiscreteForm:
        """Sample a smooth coefficient fn(z) (z complex) into a DiscreteForm."""
        rho = self.grid.rho()
        if degree == 1:
            rho = rho[1:-1]
        theta = 2.0 * math.pi * np.arange(self.grid.n_theta) / self.grid.n_theta
        z = rho[None, :] * np.exp(1j * theta[:, None])
        vals = np.asarray(fn(z), dtype=complex)
        spec = np.fft.fft(vals, axis=0) / self.grid.n_theta
        modes = self.modes1 if degree == 1 else self.modes0
        out = np.zeros((len(modes), len(rho)), dtype=complex)
        for i, m in enumerate(modes):
            out[i] = spec[m % self.grid.n_theta]
        return DiscreteForm(degree, out)

    def random_form(self, degree: int, rng: np.random.Generator) -> DiscreteForm:
        modes = self.modes1 if degree == 1 else self.modes0
        n_rad = self.grid.n_r - 2 if degree == 1 else self.grid.n_r
        vals = rng.normal(size=(len(modes), n_rad)) + 1j * rng.normal(
            size=(len(modes), n_rad)
        )
        return DiscreteForm(degree, vals)


def assemble(grid: AnnulusGrid, **kwargs) -> NeumannProblem:
    return NeumannProblem(grid, **kwargs)


# ---------------------------------------------------------------------------
# solving dbar


def solve_dbar(problem: NeumannProblem, f: DiscreteForm) -> DiscreteForm:
    """The canonical primitive u = P* N f of a degree-1 field.

    Every (0,1)-form is closed in complex dimension one; with an empty
    degree-1 harmonic space, u satisfies P u = f and is the minimal-norm
    solution (it lies in the range of P*, the orthogonal complement of
    Ker P).
    """
    if f.degree != 1:
        raise ValueError("solve_dbar expects a degree-1 form")
    if problem.harmonic_dim(1) != 0:
        raise RuntimeError(
            "harmonic obstruction present at degree 1 (unexpected on an annulus)"
        )
    return problem.apply_P_star(problem.apply_N(f))


def solve_dbar_lstsq(problem: NeumannProblem, f: DiscreteForm) -> DiscreteForm:
    """Independent oracle: per-mode dense minimal-norm least squares."""
    s0 = np.sqrt(problem.w)
    out = np.zeros((len(problem.modes0), problem.grid.n_r), dtype=complex)
    for i, n in enumerate(problem.modes0):
        B = problem.P[n] / s0[None, :]
        y, *_ = np.linalg.lstsq(B, f.values[i], rcond=None)
        out[i] = y / s0
    return DiscreteForm(0, out)


def hodge_split(problem: NeumannProblem, phi: DiscreteForm):
    """Orthogonal decomposition phi = harmonic + P(...) + P*(...)."""
    harm = problem.apply_pi(phi)
    n_phi = problem.apply_N(phi)
    if phi.degree == 1:
        im_p = problem.apply_P(problem.apply_P_star(n_phi))
        im_p_star = DiscreteForm(1, np.zeros_like(phi.values))
    else:
        im_p = DiscreteForm(0, np.zeros_like(phi.values))
        im_p_star = problem.apply_P_star(problem.apply_P(n_phi))
    return harm, im_p, im_p_star


# ---------------------------------------------------------------------------
# norms for the estimate batteries


def anchor_energy(problem: NeumannProblem, phi: DiscreteForm) -> float:
    """||nabla^eps phi||^2: the anchor-direction derivative of the
    coefficients, for degree-1 fields in the Neumann domain."""
    grid = problem.grid
    rho = grid.rho()
    D = _diff_matrix(grid.n_r, grid.h)
    total = 0.0
    for i, m in enumerate(problem.modes1):
        ext = np.zeros(grid.n_r, dtype=complex)
        ext[1:-1] = phi.values[i]
        dv = problem.scale * 0.5 * (D @ ext - m * ext / rho)
        total += 2.0 * math.pi * float(np.sum(np.abs(dv) ** 2 * problem.w))
    return total


def tangential_mode_norm(problem: NeumannProblem, phi: DiscreteForm, s: float) -> float:
    """|| . ||_{boundary,s} on the annulus: the angular modes are the exact
    tangential frequencies."""
    modes = problem.modes1 if phi.degree == 1 else problem.modes0
    w = problem.w_int if phi.degree == 1 else problem.w
    total = 0.0
    for i, m in enumerate(modes):
        total += (1.0 + m * m) ** s * float(
            np.sum(np.abs(phi.values[i]) ** 2 * w)
        )
    return math.sqrt(2.0 * math.pi * total)


def d_seminorm(problem: NeumannProblem, phi: DiscreteForm, s: float) -> float:
    """||D phi||_{boundary,s}^2 = ||phi||_{d,s+1}^2 + ||d_rho phi||_{d,s}^2."""
    grid = problem.grid
    D = _diff_matrix(grid.n_r, grid.h)
    if phi.degree == 1:
        ext = np.zeros((phi.values.shape[0], grid.n_r), dtype=complex)
        ext[:, 1:-1] = phi.values
    else:
        ext = phi.values
    d_rho = DiscreteForm(0, (D @ ext.T).T)
    base = DiscreteForm(0, ext)
    a = tangential_mode_norm(problem, base, s + 1.0)
    # reuse degree-0 weights for the extended field
    b = tangential_mode_norm(problem, d_rho, s)
    return math.sqrt(a * a + b * b)


def basic_estimate_report(
    problem: NeumannProblem, trials: int = 25, seed: int = 0
) -> Dict:
    """Empirical constants of the basic estimate and the half-norm bound.

    E(phi)^2 = ||anchor phi||^2 + ||phi||^2 + boundary term (zero on the
    Neumann domain); Q(phi)^2 = ||phi||^2 + ||P phi||^2 + ||P* phi||^2.
    Reports max E^2/Q^2 and max ||D phi||^2_{d,-1/2} / E^2 over random
    degree-1 fields in the domain.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    e_vs_q = []
    d_vs_e = []
    for _ in range(trials):
        phi = problem.random_form(1, rng)
        e2 = anchor_energy(problem, phi) + problem.norm(phi) ** 2
        ps = problem.apply_P_star(phi)
        q2 = problem.norm(phi) ** 2 + problem.norm(ps) ** 2
        e_vs_q.append(e2 / q2)
        d_vs_e.append(d_seminorm(problem, phi, -0.5) ** 2 / e2)
    return {
        "trials": trials,
        "seed": seed,
        "C_E_vs_Q": float(np.max(e_vs_q)),
        "C_D_vs_E": float(np.max(d_vs_e)),
        "median_E_vs_Q": float(np.median(e_vs_q)),
        "median_D_vs_E": float(np.median(d_vs_e)),
    }


# ---------------------------------------------------------------------------
# deformation family


def operator_norm_diff(problem_a: NeumannProblem, problem_b: NeumannProblem) -> float:
    """|| N_a - N_b ||_2 in the weighted metric, maximized over modes."""
    s = np.sqrt(problem_a.w_int)
    worst = 0.0
    for m in problem_a.modes1:
        Na = _dense_N(problem_a, m)
        Nb = _dense_N(problem_b, m)
        diff = (s[:, None] * (Na - Nb)) / s[None, :]
        worst = max(worst, float(np.linalg.svd(diff, compute_uv=False)[0]))
    return worst


def _dense_N(problem: NeumannProblem, m: int) -> np.ndarray:
    lam, V = problem.eig1[m]
    cut = problem.harmonic_tol * problem.lam_max1
    inv = np.where(lam > cut, 1.0 / np.where(lam > cut, lam, 1.0), 0.0)
    return (V * inv[None, :]) @ (V.conj().T * problem.w_int[None, :])


def family_continuity(
    grid: AnnulusGrid,
    profile: Callable,
    eps_list: Sequence[float],
    harmonic_tol: float = 1e-8,
) -> Dict:
    """||N_eps - N_0|| for a one-parameter deformation P_eps = (1+eps a) P.

    Returns per-eps operator norms, the fitted log-log slope, and the
    harmonic dimensions (expected empty at degree 1 for all tested eps).
    """
    base = NeumannProblem(grid, harmonic_tol=harmonic_tol)
    rho = grid.rho()
    amax = float(np.max(np.abs(np.asarray(profile(rho), dtype=float))))
    diffs = []
    h_dims = []
    for eps in eps_list:
        if abs(eps) * amax >= 1.0:
            raise ValueError("|eps| * max|a| must stay below 1")
        prob = NeumannProblem(grid, eps=eps, profile=profile, harmonic_tol=harmonic_tol)
        diffs.append(operator_norm_diff(prob, base))
        h_dims.append(prob.harmonic_dim(1))
    eps_arr = np.abs(np.asarray(eps_list, dtype=float))
    slope = float("nan")
    good = [d > 0 and e > 0 for d, e in zip(diffs, eps_arr)]
    if sum(good) >= 2:
        x = np.log(eps_arr[good])
        y = np.log(np.asarray(diffs)[good])
        slope = float(np.polyfit(x, y, 1)[0])
    return {
        "eps": [float(e) for e in eps_list],
        "norm_diffs": [float(d) for d in diffs],
        "fitted_slope": slope,
        "harmonic_dims_deg1": h_dims,
        "max_profile": amax,
    }


# ---------------------------------------------------------------------------
# aggregate report (drives the CLI hodge command)


def dbar_report(
    rho0: float = 0.5,
    n_theta: int = 64,
    n_r: int = 64,
    trials: int = 50,
    seed: int = 0,
    include_spectra: bool = False,
) -> Dict:
    grid = AnnulusGrid(rho0, n_theta, n_r)
    problem = assemble(grid)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 5]))
    worst_identity = 0.0
    worst_npi = 0.0
    worst_ortho = 0.0
    for _ in range(trials):
        deg = int(rng.integers(0, 2))
        phi = problem.random_form(deg, rng)
        lhs = problem.apply_box(problem.apply_N(phi))
        pi = problem.apply_pi(phi)
        resid = lhs.values + pi.values - phi.values
        worst_identity = max(
            worst_identity,
            problem.norm(DiscreteForm(deg, resid)) / problem.norm(phi),
        )
        npi = problem.apply_N(pi)
        pin = problem.apply_pi(problem.apply_N(phi))
        worst_npi = max(
            worst_npi,
            problem.norm(DiscreteForm(deg, npi.values)),
            problem.norm(DiscreteForm(deg, pin.values)),
        )
        harm, im_p, im_ps = hodge_split(problem, phi)
        pieces = [harm, im_p, im_ps]
        total = harm.values + im_p.values + im_ps.values
        worst_ortho = max(
            worst_ortho,
            problem.norm(DiscreteForm(deg, total - phi.values)) / problem.norm(phi),
        )
        for a in range(3):
            for b in range(a + 1, 3):
                ip = abs(problem.inner(pieces[a], pieces[b]))
                worst_ortho = max(worst_ortho, ip / problem.norm(phi) ** 2)
    f = problem.sample(1, np.conj)
    u = solve_dbar(problem, f)
    oracle = solve_dbar_lstsq(problem, f)
    resid_pu = problem.apply_P(u)
    solve_err = problem.norm(
        DiscreteForm(0, u.values - oracle.values)
    ) / problem.norm(oracle)
    pu_err = problem.norm(DiscreteForm(1, resid_pu.values - f.values)) / problem.norm(f)
    estimates = basic_estimate_report(problem, trials=min(trials, 25), seed=seed)
    family = family_continuity(
        grid, lambda r: np.ones_like(r), [1e-1, 1e-2, 1e-3]
    )
    out = {
        "grid": {"rho0": rho0, "n_theta": n_theta, "n_r": n_r},
        "seed": seed,
        "trials": trials,
        "harmonic_dim_deg1": problem.harmonic_dim(1),
        "smallest_eig_deg1": problem.smallest_positive_eigenvalue(1),
        "identity_residual": worst_identity,
        "n_pi_residual": worst_npi,
        "hodge_orthogonality": worst_ortho,
        "solve_dbar_vs_lstsq": solve_err,
        "solve_dbar_residual": pu_err,
        "basic_estimate": estimates,
        "family_rescaling": family,
    }
    if include_spectra:
        out["spectra_deg1"] = {
            str(int(m)): [float(x) for x in problem.eig1[m][0]]
            for m in problem.modes1
        }
    return out
