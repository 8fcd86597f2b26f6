"""Closed-form constants of the optimal 3-point rule and its kernels.

Every constant is an expression in sqrt(2), sqrt(3), sqrt(6) evaluated once at
binary64 precision.  Other modules import from here; nothing else in the
package spells these numbers out.
"""

import math

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

# optimal interior knot of the left kernel branch
BETA_STAR = SQRT2 / 4.0

# quadrature weights on [0, 1]: f(0), f(1/2), f(1)
W_END = SQRT2 / 8.0
W_MID = 1.0 - SQRT2 / 4.0

# minimal kernel L1 norm, and Simpson's counterpart at beta = 1/3
G_STAR = (2.0 - SQRT2) / 48.0
G_SIMPSON = 1.0 / 81.0

# lower bounds of g on the outer cases beta <= 0 and beta >= 1/2
G_CASE_I_MIN = 1.0 / 24.0
G_CASE_III_MIN = 1.0 / 48.0

# first-derivative kernel p1
P1_L1 = 5.0 / 16.0 - SQRT2 / 8.0
P1_SUP = 0.5 - SQRT2 / 8.0
P1_T = 11.0 / 96.0 - SQRT2 / 16.0

# second-derivative kernels p2 and its zero-mean shift p2~
P2_MEAN = 1.0 / 24.0 - SQRT2 / 32.0
P2_SHIFT = SQRT2 / 32.0 - 1.0 / 24.0
P2_SUP = (2.0 - SQRT2) / 16.0
P2_T = 47.0 / 23040.0 - SQRT2 / 768.0
P2T_L1 = 5.0 * SQRT6 / 96.0 - 29.0 * SQRT3 / 432.0
P2T_SUP = 1.0 / 12.0 - SQRT2 / 32.0

# correction term factor: P = (b-a)^2 / 96 * (4 - 3 sqrt 2) * [f'(b) - f'(a)]
CORRECTION_FACTOR = (4.0 - 3.0 * SQRT2) / 96.0

# bound constants, one per inequality
C_SECOND_SUP = G_STAR
C_FIRST_RANGE = (5.0 - 2.0 * SQRT2) / 32.0
C_FIRST_ONE_SIDED = P1_SUP
C_GRUSS_FIRST = math.sqrt(P1_T)
C_SECOND_RANGE = P2T_L1 / 2.0
C_SECOND_ONE_SIDED = P2T_SUP
C_GRUSS_SECOND = math.sqrt(P2_T)

TABLE = {
    "beta_star": BETA_STAR,
    "g_star": G_STAR,
    "g_simpson": G_SIMPSON,
    "p1_l1": P1_L1,
    "p1_sup": P1_SUP,
    "p1_T": P1_T,
    "p2_mean": P2_MEAN,
    "p2_sup": P2_SUP,
    "p2_T": P2_T,
    "p2tilde_l1": P2T_L1,
    "p2tilde_sup": P2T_SUP,
    "correction_factor": CORRECTION_FACTOR,
}
