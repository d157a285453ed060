#!/usr/bin/env python3
"""Fractional Sobolev machinery: multipliers, kernel lemmas, batteries.

The inequality constants are existential, so the batteries report
empirical max LHS/RHS ratios (C = 1) that must be finite, reproducible
under the seed, and stable under grid refinement.
"""

import numpy as np

from hodgebench.sobolev import (
    HalfGrid,
    TorusGrid,
    half_space_subestimate,
    kernel_lemma_check,
    lambda_full,
    leibniz_battery,
    random_torus_field,
)

print("== fractional multiplier basics ==")
grid = TorusGrid(2, 64)
x = grid.axes()[0]
phi = np.exp(1j * (3 * x[:, None] + 4 * x[None, :]))
out = lambda_full(grid, phi, 1.0)
print(f"  Lambda^1 on e^(i(3x+4y)) scales by {abs(out[0, 0]):.6f} (expect sqrt(26) = {np.sqrt(26):.6f})")
rng = np.random.default_rng(0)
f = random_torus_field(grid, rng)
s, t = 0.7, -1.2
group = lambda_full(grid, lambda_full(grid, f, s), t) - lambda_full(grid, f, s + t)
print(f"  multiplier group law residual: {np.max(np.abs(group)):.2e}")

print("\n== appendix kernel lemmas on the deterministic lattice ==")
for part in ("i", "ii", "iii"):
    out = kernel_lemma_check(part)
    print(
        f"  part {part:3s}: {out['tuples']} tuples, max relative violation {out['max_violation']:.2e}"
    )

print("\n== one Leibniz battery, full and tangential ==")
report = leibniz_battery("A.ii", TorusGrid(2, 64), trials=6, seed=7)
print(f"  A.ii  max ratio {report['max_ratio']:.4f}, quantiles {report['quantiles']}")
report_t = leibniz_battery("T.ii", HalfGrid(2, 64, 33), trials=4, seed=7)
print(f"  T.ii  max ratio {report_t['max_ratio']:.4f}")

print("\n== half-space sub-estimate with v1 = dzbar ==")
for n in (64, 128):
    sub = half_space_subestimate(HalfGrid(2, n, n // 2 + 1), trials=10, seed=1)
    print(f"  n = {n:3d}: empirical constant {sub['max_ratio']:.4f}")
