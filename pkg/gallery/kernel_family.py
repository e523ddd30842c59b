"""
Evaluating the kernel family near t = 1
=======================================

``f(t) = (1 - t)/(1 - t**r)`` is a 0/0 expression at ``t = 1``. The naive
formula loses every significant digit there, while the library evaluator
stays accurate to the last bit.
"""

import numpy as np

from posdef_lab import eval_f, eval_f_naive, eval_g

r = 9.0

# the removable singularity takes the value 1/r
print("f(1) =", eval_f(r, 1.0), " 1/r =", 1 / r)

# walk towards t = 1 and compare with the naive quotient
for k in range(2, 15, 2):
    t = 1 + 10.0**-k
    print(f"t = 1 + 1e-{k:<2d}  careful {eval_f(r, t):.16f}  naive {eval_f_naive(r, t):.16f}")

# g is the reciprocal; for integer r it is the polynomial 1 + t + ... + t**(r-1)
t = np.array([0.0, 0.5, 2.0])
print("g(t) =", eval_g(r, t), " polynomial =", np.polyval(np.ones(9), t))

# r = 4 factorises into simple quadratic terms
t = np.linspace(0, 5, 6)
print(np.allclose(eval_f(4, t), 1 / ((1 + t) * (1 + t * t)), rtol=1e-14, atol=0))
