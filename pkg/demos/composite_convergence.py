"""
Composite rule and convergence orders
=====================================

On n equal panels the plain rule converges like n^-2 and the corrected rule
like n^-4.  The dispersions sigma_n (per panel) and omega_n (global) feed the
Gruss-type composite bounds.
"""

import math

from optiquad.composite import CompositeConfig, convergence_study, omega_n, sigma_n

res = convergence_study("exp(t)", (0.0, 1.0), [1, 2, 4, 8, 16, 32], math.e - 1)
print(f"{'n':>3} {'error':>12} {'T4ab bound':>12} {'corrected':>12} {'T4p bound':>12}")
for r in res.rows:
    print(f"{r['n']:3d} {r['abs_error']:12.3e} {r['bound_T4ab']:12.3e} {r['abs_corrected_error']:12.3e} {r['bound_T4p_sigma']:12.3e}")
print("fitted slopes:", round(res.slope_error, 3), round(res.slope_corrected, 3))

# sigma_n <= sqrt(n) omega_n, the step that links the two Gruss forms
for n in (1, 2, 4, 8):
    cfg = CompositeConfig((0.0, 1.0), n)
    s, w = sigma_n("t^2", cfg), omega_n("t^2", cfg)
    print(f"n={n}: sigma_n={s:.6f}  sqrt(n) omega_n={math.sqrt(n) * w:.6f}")
