"""
Positive and negative definiteness on point sets
================================================

A radial function is tested on finite point sets through the smallest
eigenvalue of its kernel matrix. Conditional negative definiteness uses the
subspace of vectors summing to zero.
"""

from posdef_lab import (
    Direction,
    Generator,
    KernelParams,
    PointConfig,
    build_kernel_matrix,
    cnd_verdict,
    hadamard_power,
    psd_verdict,
)

cloud = PointConfig.generate(Generator.RANDOM_GAUSSIAN, m=40, n=5, seed=1, scale=3.0)

# g is conditionally negative definite for 1 <= r <= 3
for r in (1.5, 2.0, 3.0):
    v = cnd_verdict(build_kernel_matrix(cloud, KernelParams(r, Direction.G)))
    print(f"g, r = {r}: {v.status.value:9s} min eigenvalue {v.min_eigenvalue:.3e}")

# beyond r = 3 three points on a line are enough once they are spread out
for k in range(-2, 4):
    line = PointConfig.generate(Generator.GRID_LINE, m=3, n=1, scale=2.0**k)
    v = cnd_verdict(build_kernel_matrix(line, KernelParams(3.5, Direction.G)))
    print(f"g, r = 3.5, spacing 2^{k:<2d}: {v.status.value}")
    if v.violated:
        print("  witness vector", v.witness)
        break

# fractional Hadamard powers of f stay positive semidefinite for r <= 4
f4 = build_kernel_matrix(cloud, KernelParams(4.0))
for alpha in (0.05, 0.5, 2.0):
    print(f"f^{alpha}, r = 4:", psd_verdict(hadamard_power(f4, alpha)).status.value)
