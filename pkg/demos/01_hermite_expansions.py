"""Hermite-function expansions, analysis and synthesis, and the Ornstein-Uhlenbeck semigroup.

Functions are written as g(y) exp(-|y|^2) with g a polynomial.  `analyze`
recovers coefficients on the basis Ht_k(y) = H_k(y) exp(-|y|^2).  `heat_apply`
integrates against the Mehler kernel directly, so the two routes can be
compared on eigenfunctions.
"""
import math

import numpy as np

from invgauss import EnvelopedFunction, HermiteExpansion, analyze, synthesize
from invgauss.hermite import hermite_tilde
from invgauss.semigroup import heat_apply, mehler_kernel

# (4y^2 + 2y - 1) e^{-y^2} is Ht_0 + Ht_1 + Ht_2
f = EnvelopedFunction(1, [((0,), -1.0), ((1,), 2.0), ((2,), 4.0)])
e = analyze(f, 4)
print("coefficients c_0..c_4:", np.round(e.coeffs.real, 12))

x = np.linspace(-2, 2, 5)[:, None]
print("synthesis error:", np.max(np.abs(synthesize(e, x) - f(x))))

# Ht_k is an eigenfunction of the semigroup with eigenvalue e^{-(|k| + n) t}
t, x0 = 0.5, 0.37
for k in range(4):
    fk = HermiteExpansion.from_dict(1, {(k,): 1.0}).to_enveloped()
    got = heat_apply(fk, t, [x0]).real
    want = math.exp(-(k + 1) * t) * float(hermite_tilde((k,), [x0]))
    print(f"k={k}: T_t Ht_k(x) = {got:+.15f}   e^(-(k+1)t) Ht_k(x) = {want:+.15f}")

# two dimensions, mixed index
f2 = HermiteExpansion.from_dict(2, {(1, 2): 1.0}).to_enveloped()
p = np.array([0.2, -0.6])
print("n=2, k=(1,2):", heat_apply(f2, 0.1, p).real, math.exp(-5 * 0.1) * float(hermite_tilde((1, 2), p)))

print("Mehler kernel T_1(0, 0) =", float(mehler_kernel(np.array([1.0]), np.zeros((1, 1)), np.zeros((1, 1)))[0]))
