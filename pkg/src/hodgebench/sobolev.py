"""Fractional Sobolev machinery on periodic grids.

Full-space operators live on a torus [0, 2pi)^m with integer frequencies;
compactly supported smooth functions sit in the central half-box so the
torus acts as a Schwartz-space proxy.  Tangential operators live on a
(torus)^{m-1} x [-R, 0] half grid; the radial direction is non-periodic and
differentiated with 4th-order finite differences.

Fields are plain complex ndarrays; the grid objects carry geometry, norms
and multipliers.  Inequality batteries report empirical LHS/RHS ratios with
C = 1; the underlying constants are existential, so acceptance is
"finite, seed-reproducible, refinement-stable", never a fixed bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, Sequence

import numpy as np

__all__ = [
    "TorusGrid",
    "HalfGrid",
    "SobolevConfig",
    "lambda_full",
    "sobolev_norm",
    "l2_inner",
    "lambda_tangential",
    "tangential_norm",
    "radial_derivative",
    "d_norm",
    "commutator",
    "double_commutator",
    "nested_commutator",
    "kernel_lemma_check",
    "leibniz_battery",
    "half_space_subestimate",
    "random_torus_field",
    "random_half_field",
    "ck_norm",
    "INEQUALITY_IDS",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SobolevConfig:
    """Embedding index a = 1 + m/2 and the quadrature order of the kernel
    lemma's double integral."""

    dim: int
    quad_order: int = 32

    @property
    def a(self) -> float:
        return 1.0 + self.dim / 2.0


@dataclass(frozen=True)
class TorusGrid:
    dim: int
    n: int  # points per axis, power of two
    box: float = TWO_PI

    def __post_init__(self):
        if self.n < 16 or self.n & (self.n - 1):
            raise ValueError("points per axis must be a power of two, >= 16")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def cell(self) -> float:
        return (self.box / self.n) ** self.dim

    def axes(self):
        x = np.arange(self.n) * (self.box / self.n)
        return [x] * self.dim

    def freqs(self):
        base = np.fft.fftfreq(self.n, d=1.0 / self.n) * (TWO_PI / self.box)
        return base

    def freq_square(self) -> np.ndarray:
        base = self.freqs()
        out = np.zeros(self.shape)
        for axis in range(self.dim):
            shape = [1] * self.dim
            shape[axis] = self.n
            out = out + (base**2).reshape(shape)
        return out

    def config(self, quad_order: int = 32) -> SobolevConfig:
        return SobolevConfig(self.dim, quad_order)


def lambda_full(grid: TorusGrid, phi: np.ndarray, s: float) -> np.ndarray:
    """(1 + |xi|^2)^{s/2} as a Fourier multiplier."""
    if s == 0:
        return phi.copy()
    mult = (1.0 + grid.freq_square()) ** (s / 2.0)
    return np.fft.ifftn(np.fft.fftn(phi) * mult)


def l2_inner(grid: TorusGrid, phi: np.ndarray, psi: np.ndarray) -> complex:
    return complex(np.sum(phi * np.conj(psi)) * grid.cell)


def sobolev_norm(grid: TorusGrid, phi: np.ndarray, s: float = 0.0) -> float:
    coeffs = np.fft.fftn(phi) / phi.size
    weight = (1.0 + grid.freq_square()) ** s
    total = np.sum(weight * np.abs(coeffs) ** 2) * grid.box**grid.dim
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# half grid


@dataclass(frozen=True)
class HalfGrid:
    """(m-1)-torus times the radial interval [-R, 0], boundary at r = 0."""

    dim: int  # total dimension, tangential dim is dim - 1
    n_t: int  # tangential points per axis
    n_r: int  # radial points, inclusive endpoints
    depth: float = TWO_PI  # R
    box: float = TWO_PI

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("half grid needs dim >= 2")
        if self.n_r < 4:
            raise ValueError("need at least 4 radial points")

    @property
    def shape(self):
        return (self.n_t,) * (self.dim - 1) + (self.n_r,)

    @property
    def h_r(self) -> float:
        return self.depth / (self.n_r - 1)

    def r_axis(self) -> np.ndarray:
        return -self.depth + np.arange(self.n_r) * self.h_r

    def r_weights(self) -> np.ndarray:
        w = np.full(self.n_r, self.h_r)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def t_axes(self):
        x = np.arange(self.n_t) * (self.box / self.n_t)
        return [x] * (self.dim - 1)

    def tangential_freq_square(self) -> np.ndarray:
        base = np.fft.fftfreq(self.n_t, d=1.0 / self.n_t) * (TWO_PI / self.box)
        out = np.zeros((self.n_t,) * (self.dim - 1))
        for axis in range(self.dim - 1):
            shape = [1] * (self.dim - 1)
            shape[axis] = self.n_t
            out = out + (base**2).reshape(shape)
        return out[..., np.newaxis]

    def config(self, quad_order: int = 32) -> SobolevConfig:
        return SobolevConfig(self.dim, quad_order)


def _t_axes(grid: HalfGrid):
    return tuple(range(grid.dim - 1))


def lambda_tangential(grid: HalfGrid, phi: np.ndarray, s: float) -> np.ndarray:
    """(1 + |tau|^2)^{s/2} acting per radial slice."""
    if s == 0:
        return phi.copy()
    mult = (1.0 + grid.tangential_freq_square()) ** (s / 2.0)
    spec = np.fft.fftn(phi, axes=_t_axes(grid))
    return np.fft.ifftn(spec * mult, axes=_t_axes(grid))


def tangential_norm(grid: HalfGrid, phi: np.ndarray, s: float = 0.0) -> float:
    spec = np.fft.fftn(phi, axes=_t_axes(grid)) / (grid.n_t ** (grid.dim - 1))
    weight = (1.0 + grid.tangential_freq_square()) ** s
    per_slice = weight * np.abs(spec) ** 2
    radial = np.sum(per_slice, axis=tuple(range(grid.dim - 1)))
    total = np.sum(radial * grid.r_weights()) * grid.box ** (grid.dim - 1)
    return float(np.sqrt(total))


def half_inner(grid: HalfGrid, phi: np.ndarray, psi: np.ndarray) -> complex:
    w = grid.r_weights()
    cell_t = (grid.box / grid.n_t) ** (grid.dim - 1)
    return complex(np.sum(phi * np.conj(psi) * w) * cell_t)


def boundary_square(grid: HalfGrid, phi: np.ndarray) -> float:
    """int_{r=0} |phi|^2 over the tangential torus."""
    cell_t = (grid.box / grid.n_t) ** (grid.dim - 1)
    return float(np.sum(np.abs(phi[..., -1]) ** 2) * cell_t)


_D4_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D4_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D4_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def radial_derivative(grid: HalfGrid, phi: np.ndarray) -> np.ndarray:
    """4th-order d/dr, one-sided at the two radial ends."""
    h = grid.h_r
    out = np.zeros_like(phi, dtype=complex)
    f = phi.astype(complex)
    out[..., 2:-2] = (
        f[..., :-4] * _D4_INTERIOR[0]
        + f[..., 1:-3] * _D4_INTERIOR[1]
        + f[..., 3:-1] * _D4_INTERIOR[3]
        + f[..., 4:] * _D4_INTERIOR[4]
    ) / h
    head = f[..., :5]
    out[..., 0] = head @ _D4_EDGE0 / h
    out[..., 1] = head @ _D4_EDGE1 / h
    tail = f[..., -5:]
    out[..., -1] = -(tail[..., ::-1] @ _D4_EDGE0) / h
    out[..., -2] = -(tail[..., ::-1] @ _D4_EDGE1) / h
    return out


def tangential_derivative(grid: HalfGrid, phi: np.ndarray, axis: int) -> np.ndarray:
    base = np.fft.fftfreq(grid.n_t, d=1.0 / grid.n_t) * (TWO_PI / grid.box)
    shape = [1] * grid.dim
    shape[axis] = grid.n_t
    spec = np.fft.fft(phi, axis=axis)
    return np.fft.ifft(spec * (1j * base).reshape(shape), axis=axis)


def d_norm(grid: HalfGrid, phi: np.ndarray, s: float) -> float:
    """||D phi||_{boundary,s}^2 = ||phi||_{d,s+1}^2 + ||d_r phi||_{d,s}^2."""
    a = tangential_norm(grid, phi, s + 1.0)
    b = tangential_norm(grid, radial_derivative(grid, phi), s)
    return float(math.sqrt(a * a + b * b))


# ---------------------------------------------------------------------------
# commutators


def commutator(grid, k: float, f: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """[Lambda^k, f] phi (full or tangential, keyed by the grid type)."""
    lam = lambda_full if isinstance(grid, TorusGrid) else lambda_tangential
    return lam(grid, f * phi, k) - f * lam(grid, phi, k)


def double_commutator(grid, k: float, f: np.ndarray, phi: np.ndarray) -> np.ndarray:
    lam = lambda_full if isinstance(grid, TorusGrid) else lambda_tangential
    inner = commutator(grid, k, f, phi)
    return lam(grid, inner, k) - commutator(grid, k, f, lam(grid, phi, k))


def nested_commutator(
    grid, k: float, f: np.ndarray, g: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    return commutator(grid, k, f, g * phi) - g * commutator(grid, k, f, phi)


# ---------------------------------------------------------------------------
# kernel lemma checks (appendix inequalities on frequency tuples)


def _lattice(coords: Sequence[int], dim: int = 3) -> np.ndarray:
    return np.array(list(product(coords, repeat=dim)), dtype=float)


def _half_power(base: np.ndarray, two_expo: float) -> np.ndarray:
    """base ** (two_expo / 2) with fast paths for half-integer exponents."""
    if two_expo == 0.0:
        return np.ones_like(base)
    if two_expo == 1.0:
        return np.sqrt(base)
    if two_expo == -1.0:
        return 1.0 / np.sqrt(base)
    if two_expo == 2.0:
        return base
    if two_expo == -2.0:
        return 1.0 / base
    if two_expo == -4.0:
        return 1.0 / (base * base)
    return base ** (two_expo / 2.0)


def kernel_lemma_check(
    part: str,
    ks: Iterable[float] = (-2.0, -0.5, 0.0, 1.0, 2.0, 3.0),
    coords: Sequence[int] = (-4, -2, 0, 1, 3),
    quad_order: int = 32,
    stride: int = 5,
) -> Dict[str, float]:
    """Evaluate one part of the kernel lemma on a deterministic lattice.

    Returns {"max_violation": relative excess of LHS over RHS, "tuples": n}.
    The inequalities are proven, so any violation beyond 1e-12 relative
    slack indicates an implementation bug.  Part iii uses the constant
    |k| * max(1, |k-1|) from the lemma's Hessian bound and Gauss-Legendre
    quadrature for the double integral.
    """
    V = _lattice(coords)
    worst = 0.0
    count = 0
    if part == "i":
        xi = V[:, None, :]
        eta = V[None, :, :]
        q = (1.0 + np.sum(xi**2, -1)) / (1.0 + np.sum(eta**2, -1))
        d2 = 1.0 + np.sum((xi - eta) ** 2, -1)
        for k in ks:
            lhs = q**k
            rhs = 2.0 ** abs(k) * d2 ** abs(k)
            worst = max(worst, float(np.max((lhs - rhs) / rhs)))
            count += lhs.size
    elif part == "ii":
        xi = V[:, None, :]
        eta = V[None, :, :]
        s_xi = 1.0 + np.sum(xi**2, -1)
        s_eta = 1.0 + np.sum(eta**2, -1)
        dist = np.sqrt(np.sum((xi - eta) ** 2, -1))
        for k in ks:
            lhs = np.abs(s_xi ** (k / 2.0) - s_eta ** (k / 2.0))
            rhs = abs(k) * dist * (s_xi ** ((k - 1) / 2.0) + s_eta ** ((k - 1) / 2.0))
            ok = rhs > 0
            excess = np.zeros_like(lhs)
            excess[ok] = (lhs[ok] - rhs[ok]) / rhs[ok]
            excess[~ok] = lhs[~ok]  # rhs = 0 forces lhs = 0 (xi = eta)
            worst = max(worst, float(np.max(excess)))
            count += lhs.size
    elif part == "iii":
        eta1 = V[::stride]
        eta2 = V[::stride]
        # flatten all (xi, eta1, eta2) triples to vectors of quadratic-form
        # coefficients: |xi + t a + t' b|^2 with a = eta1-eta2, b = eta2-xi
        X = np.repeat(V, len(eta1) * len(eta2), axis=0)
        E1 = np.tile(np.repeat(eta1, len(eta2), axis=0), (len(V), 1))
        E2 = np.tile(eta2, (len(V) * len(eta1), 1))
        a = E1 - E2
        b = E2 - X
        c_xx = np.sum(X * X, -1)
        c_aa = np.sum(a * a, -1)
        c_bb = np.sum(b * b, -1)
        c_xa = np.sum(X * a, -1)
        c_xb = np.sum(X * b, -1)
        c_ab = np.sum(a * b, -1)
        nodes, weights = np.polynomial.legendre.leggauss(quad_order)
        nodes = 0.5 * (nodes + 1.0)
        weights = 0.5 * weights
        ti, tj = np.meshgrid(nodes, nodes, indexing="ij")
        wij = np.outer(weights, weights).ravel()
        ti, tj = ti.ravel(), tj.ravel()
        g_x = 1.0 + c_xx
        g_e1 = 1.0 + np.sum(E1 * E1, -1)
        g_e2 = 1.0 + np.sum(E2 * E2, -1)
        g_s = 1.0 + np.sum((X + E1 - E2) ** 2, -1)
        dist = np.sqrt(np.sum((X - E2) ** 2, -1) * np.sum((E1 - E2) ** 2, -1))
        ks = list(ks)
        integrals = {k: np.zeros(len(X)) for k in ks}
        chunk = 64
        for lo in range(0, ti.size, chunk):
            t1 = ti[lo : lo + chunk, None]
            t2 = tj[lo : lo + chunk, None]
            base = 1.0 + (
                c_xx[None, :]
                + t1 * t1 * c_aa[None, :]
                + t2 * t2 * c_bb[None, :]
                + 2.0 * t1 * c_xa[None, :]
                + 2.0 * t2 * c_xb[None, :]
                + 2.0 * t1 * t2 * c_ab[None, :]
            )
            w = wij[lo : lo + chunk]
            for k in ks:
                integrals[k] += w @ _half_power(base, k - 2.0)
        for k in ks:
            lhs = np.abs(
                g_x ** (k / 2.0)
                + g_e1 ** (k / 2.0)
                - g_e2 ** (k / 2.0)
                - g_s ** (k / 2.0)
            )
            const = abs(k) * max(1.0, abs(k - 1.0))
            rhs = const * dist * integrals[k]
            ok = rhs > 0
            excess = np.zeros_like(lhs)
            excess[ok] = (lhs[ok] - rhs[ok]) / rhs[ok]
            excess[~ok] = lhs[~ok]
            worst = max(worst, float(np.max(excess)))
            count += lhs.size
    else:
        raise ValueError("part must be one of 'i', 'ii', 'iii'")
    return {"max_violation": worst, "tuples": count}


# ---------------------------------------------------------------------------
# random battery fields (reference-grid construction, resolution independent)

_REFERENCE_N = 64
_BAND = 3 * _REFERENCE_N // 8  # top quarter of the reference spectrum zeroed


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def _smooth_step(u: np.ndarray) -> np.ndarray:
    # 0 for u <= 0, 1 for u >= 1, C^infinity monotone in between
    lo = np.clip(u, 1e-12, None)
    hi = np.clip(1.0 - u, 1e-12, None)
    a = np.exp(-1.0 / lo)
    b = np.exp(-1.0 / hi)
    out = a / (a + b)
    out[u <= 0] = 0.0
    out[u >= 1] = 1.0
    return out


def _reference_coeffs(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Band-limited spectral coefficients of a half-box-supported field,
    produced on the reference grid so any N >= 64 synthesizes the same
    continuum function."""
    n = _REFERENCE_N
    shape = (n,) * dim
    spec = np.zeros(shape, dtype=complex)
    freq = np.fft.fftfreq(n, d=1.0 / n)
    low = np.ones(shape, dtype=bool)
    for axis in range(dim):
        s = [1] * dim
        s[axis] = n
        low &= np.abs(freq).reshape(s) <= n // 5
    count = int(np.sum(low))
    vals = rng.normal(size=count) + 1j * rng.normal(size=count)
    spec[low] = vals
    raw = np.fft.ifftn(spec)
    x = np.arange(n) * (TWO_PI / n)
    window = np.ones(shape)
    for axis in range(dim):
        s = [1] * dim
        s[axis] = n
        window = window * _bump((x - math.pi) / (math.pi / 2)).reshape(s)
    coeffs = np.fft.fftn(raw * window) / raw.size
    keep = np.ones(shape, dtype=bool)
    for axis in range(dim):
        s = [1] * dim
        s[axis] = n
        keep &= np.abs(freq).reshape(s) < _BAND
    coeffs[~keep] = 0.0
    peak = np.max(np.abs(raw * window))
    return coeffs / max(peak, 1e-300)


def _synthesize(coeffs: np.ndarray, n: int, dim: int) -> np.ndarray:
    big = np.zeros((n,) * dim, dtype=complex)
    idx = np.fft.fftfreq(_REFERENCE_N, d=1.0 / _REFERENCE_N).astype(int)
    grids = np.meshgrid(*([idx] * dim), indexing="ij")
    keep = np.ones(coeffs.shape, dtype=bool)
    if n < _REFERENCE_N:
        # keep only modes below the target Nyquist frequency
        for g in grids:
            keep &= np.abs(g) < n // 2
    big[tuple(g[keep] % n for g in grids)] = coeffs[keep]
    return np.fft.ifftn(big) * (n**dim)


def random_torus_field(grid: TorusGrid, rng: np.random.Generator) -> np.ndarray:
    """Band-limited, essentially half-box-supported random field."""
    coeffs = _reference_coeffs(rng, grid.dim)
    return _synthesize(coeffs, grid.n, grid.dim)


def random_half_field(grid: HalfGrid, rng: np.random.Generator) -> np.ndarray:
    """Random half-grid field: band-limited tangential factors times smooth
    radial profiles vanishing near r = -R (Schwartz-proxy on the half space)."""
    t_dim = grid.dim - 1
    r = grid.r_axis()
    R = grid.depth
    window = _smooth_step((r + R) / (0.4 * R))
    out = np.zeros(grid.shape, dtype=complex)
    for _ in range(3):
        coeffs = _reference_coeffs(rng, t_dim)
        tang = _synthesize(coeffs, grid.n_t, t_dim)
        u = 2.0 * (r + R) / R - 1.0
        poly = np.polynomial.chebyshev.chebval(u, rng.normal(size=4))
        out = out + tang[..., np.newaxis] * (poly * window)[np.newaxis, ...].reshape(
            (1,) * t_dim + (grid.n_r,)
        )
    return out


# ---------------------------------------------------------------------------
# C^k norms


def _multi_indices(dim: int, order: int):
    if dim == 1:
        for k in range(order + 1):
            yield (k,)
        return
    for k in range(order + 1):
        for rest in _multi_indices(dim - 1, order - k):
            yield (k,) + rest


def ck_norm(grid, f: np.ndarray, order: int) -> float:
    """max over |alpha| <= order of sup |d^alpha f| (spectral derivatives on
    periodic axes, 4th-order differences on the radial axis)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    worst = 0.0
    if isinstance(grid, TorusGrid):
        base = np.fft.fftfreq(grid.n, d=1.0 / grid.n) * (TWO_PI / grid.box)
        spec0 = np.fft.fftn(f)
        for alpha in _multi_indices(grid.dim, order):
            spec = spec0
            for axis, p in enumerate(alpha):
                if p:
                    s = [1] * grid.dim
                    s[axis] = grid.n
                    spec = spec * (1j * base).reshape(s) ** p
            worst = max(worst, float(np.max(np.abs(np.fft.ifftn(spec)))))
        return worst
    for alpha in _multi_indices(grid.dim, order):
        g = f
        for axis, p in enumerate(alpha[:-1]):
            for _ in range(p):
                g = tangential_derivative(grid, g, axis)
        for _ in range(alpha[-1]):
            g = radial_derivative(grid, g)
        worst = max(worst, float(np.max(np.abs(g))))
    return worst


# ---------------------------------------------------------------------------
# Leibniz batteries

INEQUALITY_IDS = ("A.i", "A.ii", "A.iii", "A.iv", "T.i", "T.ii", "T.iii", "T.iv")

_S_FIRST = (0.0, 0.5, 1.0, 2.0)
_S_SECOND = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
_K_SECOND = (0.5, 1.0, 2.0)


def _battery_cases(part: str):
    """(form, s, k) combinations per proposition part; the first forms need
    s >= 0 and k >= 1 (k >= 2 for the nested part), the second forms allow
    arbitrary real orders."""
    cases = []
    if part == "i":
        cases += [("first", s, None) for s in _S_FIRST]
        cases += [("second", s, None) for s in _S_SECOND]
    elif part in ("ii", "iii"):
        cases += [("first", s, k) for s in _S_FIRST for k in (1.0, 2.0)]
        cases += [("second", s, k) for s in _S_SECOND for k in _K_SECOND]
    elif part == "iv":
        cases += [("first", s, k) for s in _S_FIRST for k in (2.0,)]
        cases += [("second", s, k) for s in _S_SECOND for k in _K_SECOND]
    return cases


def _memoized(fn):
    cache: Dict[float, float] = {}

    def wrapped(t):
        if t not in cache:
            cache[t] = fn(t)
        return cache[t]

    return wrapped


def _full_rhs(grid, cfg, part, form, s, k, nf, ng, np_):
    a = cfg.a
    if part == "i":
        if form == "first":
            return nf(s + a) * np_(0) + nf(a) * np_(s)
        return nf(abs(s) + a) * np_(s)
    if part == "ii":
        if form == "first":
            return (
                nf(s + k + a) * np_(0)
                + nf(k + a) * np_(s)
                + nf(s + 1 + a) * np_(k - 1)
                + nf(1 + a) * np_(s + k - 1)
            )
        return (nf(abs(s + k - 1) + 1 + a) + nf(abs(s) + 1 + a)) * np_(s + k - 1)
    if part == "iii":
        if form == "first":
            return (
                nf(2 * k + s + a) * np_(0)
                + nf(2 * k + a) * np_(s)
                + nf(2 + a) * np_(2 * k + s - 2)
                + nf(s + 2 + a) * np_(2 * k - 2)
            )
        return (nf(abs(s + 2 * k - 2) + 2 + a) + nf(abs(s) + 2 + a)) * np_(
            s + 2 * k - 2
        )
    if part == "iv":
        if form == "first":
            return (
                (
                    nf(k - 1 + s + a) * ng(1 + a)
                    + nf(k - 1 + a) * ng(s + 1 + a)
                    + nf(s + 1 + a) * ng(k - 1 + a)
                    + nf(1 + a) * ng(k - 1 + s + a)
                )
                * np_(0)
                + (nf(k - 1 + a) * ng(1 + a) + nf(1 + a) * ng(k - 1 + a)) * np_(s)
                + (nf(s + 1 + a) * ng(1 + a) + nf(1 + a) * ng(s + 1 + a))
                * np_(k - 2)
                + nf(1 + a) * ng(1 + a) * np_(k - 2 + s)
            )
        return (
            nf(1 + abs(s) + abs(k - 2) + a) * ng(1 + a)
            + nf(1 + abs(s) + a) * ng(1 + abs(k - 2) + a)
            + nf(1 + abs(k - 2) + a) * ng(1 + abs(s) + a)
            + nf(1 + a) * ng(1 + abs(s) + abs(k - 2) + a)
        ) * np_(s + k - 2)
    raise ValueError(part)


def _tang_rhs(grid, cfg, part, form, s, k, cf, cg, np_):
    a = cfg.a
    if part == "i":
        if form == "first":
            return cf(s + a) * np_(0) + cf(a) * np_(s)
        return cf(abs(s) + a) * np_(s)
    if part == "ii":
        if form == "first":
            return (
                cf(s + k + a) * np_(0)
                + cf(k + a) * np_(s)
                + cf(s + 1 + a) * np_(k - 1)
                + cf(1 + a) * np_(s + k - 1)
            )
        return (cf(abs(s + k - 1) + 1 + a) + cf(abs(s) + 1 + a)) * np_(s + k - 1)
    if part == "iii":
        if form == "first":
            return (
                cf(2 * k + s + a) * np_(0)
                + cf(2 * k + a) * np_(s)
                + cf(2 + a) * np_(2 * k + s - 2)
                + cf(s + 2 + a) * np_(2 * k - 2)
            )
        return (cf(abs(s + 2 * k - 2) + 2 + a) + cf(abs(s) + 2 + a)) * np_(
            s + 2 * k - 2
        )
    if part == "iv":
        if form == "first":
            return (
                (
                    cf(k - 1 + s + a) * cg(1 + a)
                    + cf(k - 1 + a) * cg(s + 1 + a)
                    + cf(s + 1 + a) * cg(k - 1 + a)
                    + cf(1 + a) * cg(k - 1 + s + a)
                )
                * np_(0)
                + (cf(k - 1 + a) * cg(1 + a) + cf(1 + a) * cg(k - 1 + a)) * np_(s)
                + (cf(s + 1 + a) * cg(1 + a) + cf(1 + a) * cg(s + 1 + a))
                * np_(k - 2)
                + cf(1 + a) * cg(1 + a) * np_(k - 2 + s)
            )
        return (
            cf(1 + abs(s) + abs(k - 2) + a) * cg(1 + a)
            + cf(1 + abs(s) + a) * cg(1 + abs(k - 2) + a)
            + cf(1 + abs(k - 2) + a) * cg(1 + abs(s) + a)
            + cf(1 + a) * cg(1 + abs(s) + abs(k - 2) + a)
        ) * np_(s + k - 2)
    raise ValueError(part)


def _battery_lhs(grid, part, s, k, f, g, phi):
    norm = sobolev_norm if isinstance(grid, TorusGrid) else tangential_norm
    if part == "i":
        return norm(grid, f * phi, s)
    if part == "ii":
        return norm(grid, commutator(grid, k, f, phi), s)
    if part == "iii":
        return norm(grid, double_commutator(grid, k, f, phi), s)
    if part == "iv":
        return norm(grid, nested_commutator(grid, k, f, g, phi), s)
    raise ValueError(part)


def leibniz_battery(
    inequality: str,
    grid,
    trials: int = 8,
    seed: int = 0,
    quad_order: int = 32,
) -> Dict:
    """Empirical LHS/RHS ratios (C = 1) for one appendix inequality.

    ``inequality`` is one of INEQUALITY_IDS; A-parts take a TorusGrid,
    T-parts a HalfGrid.  Deterministic given the seed: trial fields come
    from per-trial child seeds so the report is scheduling-independent.
    """
    family, part_tag = inequality.split(".")
    part = part_tag
    tangential = family == "T"
    if tangential and not isinstance(grid, HalfGrid):
        raise TypeError("tangential batteries need a HalfGrid")
    if not tangential and not isinstance(grid, TorusGrid):
        raise TypeError("full-space batteries need a TorusGrid")
    cfg = grid.config(quad_order)
    cases = _battery_cases(part)
    make = random_half_field if tangential else random_torus_field
    trial_ratios = []
    case_ratios: Dict[str, float] = {}
    ss = np.random.SeedSequence([seed, INEQUALITY_IDS.index(inequality)])
    children = ss.spawn(trials)
    for t in range(trials):
        rng = np.random.default_rng(children[t])
        f = make(grid, rng)
        phi = make(grid, rng)
        g = make(grid, rng) if part == "iv" else None
        if tangential:
            nf = _memoized(lambda t_: ck_norm(grid, f, math.ceil(t_)))
            ng = _memoized(lambda t_: ck_norm(grid, g, math.ceil(t_)))
            np_ = _memoized(lambda t_: tangential_norm(grid, phi, t_))
            rhs_fn = lambda form, s, k: _tang_rhs(
                grid, cfg, part, form, s, k, nf, ng, np_
            )
        else:
            nf = _memoized(lambda t_: sobolev_norm(grid, f, t_))
            ng = _memoized(lambda t_: sobolev_norm(grid, g, t_))
            np_ = _memoized(lambda t_: sobolev_norm(grid, phi, t_))
            rhs_fn = lambda form, s, k: _full_rhs(
                grid, cfg, part, form, s, k, nf, ng, np_
            )
        best = 0.0
        for form, s, k in cases:
            lhs = _battery_lhs(grid, part, s, k, f, g, phi)
            rhs = rhs_fn(form, s, k)
            ratio = lhs / rhs if rhs > 0 else math.inf
            key = f"{form}:s={s}:k={k}"
            case_ratios[key] = max(case_ratios.get(key, 0.0), ratio)
            best = max(best, ratio)
        trial_ratios.append(best)
    arr = np.array(trial_ratios)
    qs = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {
        "inequality": inequality,
        "grid": _grid_meta(grid),
        "seed": seed,
        "trials": trials,
        "max_ratio": float(arr.max()),
        "quantiles": {
            "min": float(qs[0]),
            "q25": float(qs[1]),
            "median": float(qs[2]),
            "q75": float(qs[3]),
            "max": float(qs[4]),
        },
        "per_trial": [float(v) for v in arr],
        "worst_cases": dict(
            sorted(case_ratios.items(), key=lambda kv: -kv[1])[:5]
        ),
    }


def _grid_meta(grid) -> Dict:
    if isinstance(grid, TorusGrid):
        return {"kind": "torus", "dim": grid.dim, "n": grid.n, "box": grid.box}
    return {
        "kind": "half",
        "dim": grid.dim,
        "n_t": grid.n_t,
        "n_r": grid.n_r,
        "depth": grid.depth,
        "box": grid.box,
    }


def half_space_subestimate(
    grid: HalfGrid, trials: int = 20, seed: int = 0
) -> Dict:
    """Empirical constant for the half-space sub-estimate with v1 = dzbar:

        sum_i ||d_i f||^2_{d,-1/2} <= C ( ||v1 f||^2_{d,-1/2} + int_{dM} |f|^2 )

    on a 2-D half grid, z = t + i r.
    """
    if grid.dim != 2:
        raise ValueError("the sub-estimate battery runs on a 2-D half grid")
    ss = np.random.SeedSequence([seed, 97])
    ratios = []
    for child in ss.spawn(trials):
        rng = np.random.default_rng(child)
        f = random_half_field(grid, rng)
        df_t = tangential_derivative(grid, f, 0)
        df_r = radial_derivative(grid, f)
        lhs = (
            tangential_norm(grid, df_t, -0.5) ** 2
            + tangential_norm(grid, df_r, -0.5) ** 2
        )
        v1 = 0.5 * (df_t + 1j * df_r)
        rhs = tangential_norm(grid, v1, -0.5) ** 2 + boundary_square(grid, f)
        ratios.append(lhs / rhs)
    arr = np.array(ratios)
    return {
        "inequality": "half-space-subestimate",
        "grid": _grid_meta(grid),
        "seed": seed,
        "trials": trials,
        "max_ratio": float(arr.max()),
        "quantiles": {
            "min": float(arr.min()),
            "median": float(np.median(arr)),
            "max": float(arr.max()),
        },
    }
