"""
One interval: rule, correction and Peano residual
=================================================
"""

import math

import numpy as np

from optiquad.rules import correction_p, optimal_rule_estimate, residual_via_kernel, simpson_estimate

iv = (0.0, 1.0)

# exact on constants and linears, not on quadratics
for k in range(4):
    est = optimal_rule_estimate(lambda t: t**k, iv)
    print(f"t^{k}: exact {1 / (k + 1):.6f}  rule {est:.6f}  Simpson {simpson_estimate(lambda t: t**k, iv):.6f}")

# the derivative correction repairs degree 2 and 3
q = 1 / 4 - optimal_rule_estimate(lambda t: t**3, iv)
print("Q(t^3) =", q, " P =", correction_p(0.0, 3.0, iv), " Q - P =", q - correction_p(0.0, 3.0, iv))

# error as an integral of the kernel against f''
q_exp = math.e - 1 - optimal_rule_estimate(math.exp, iv)
print("Q(e^t) directly      ", q_exp)
print("Q(e^t) through kernel", residual_via_kernel(np.exp, iv))
