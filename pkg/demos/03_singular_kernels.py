"""Kernels of the Riesz transforms, negative powers and imaginary powers.

All kernels are time integrals of the Mehler kernel and its derivatives,
evaluated with a trapezoid rule in log-time.  Near the diagonal they
match classical Euclidean kernels, and the constant attached to even
Riesz transforms is a one-dimensional integral.
"""
import numpy as np

from invgauss import kernels as K

x = np.array([0.3])
for y in (0.5, 1.0, 2.0, -1.0):
    yy = np.array([y])
    print(f"y={y:+.1f}  R_1 {float(K.riesz_kernel((1,), x, yy)):+.6e}"
          f"  A^-1/2 {float(K.neg_power_kernel(0.5, x, yy)):+.6e}"
          f"  A^i {complex(K.imaginary_kernel(1.0, x, yy)):.6e}")

# near the diagonal the first Riesz kernel approaches -sqrt(2) / (pi (x - y))
for d in (1e-1, 1e-2, 1e-3):
    v = float(K.riesz_kernel((1,), x, x + d))
    print(f"|x-y|={d:g}: pi (x-y) R_1(x, y) = {v * (-d) * np.pi:.6f}   (-sqrt 2 = {-np.sqrt(2):.6f})")

print("c_2 =", K.riesz_constant((2,)), " c_4 =", K.riesz_constant((4,)), " c_(1,1) =", K.riesz_constant((1, 1)))

# the classical even kernels vanish away from the diagonal in one dimension
print("classical R_2 at z=0.7:", K.classical_riesz_kernel((2,), np.array([0.7])))

# the shell constant of the imaginary power turns at constant modulus
for eps in (1e-3, 1e-1, 1.0):
    a = K.alpha_eps(1.0, 1, eps)
    print(f"alpha(eps={eps:g}) = {a:.6f}  |alpha| = {abs(a):.12f}")
