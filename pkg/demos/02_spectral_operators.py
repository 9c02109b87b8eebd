"""Operators defined through their action on Hermite coefficients.

Each operator attaches a scalar to Ht_k and possibly moves it to another
index.  Riesz transforms shift k up by alpha; the Abar-based transforms
shift it down and kill the ground state.
"""
import numpy as np

from invgauss import HermiteExpansion
from invgauss import spectral as S

for kind, param in [("riesz", (1,)), ("riesz", (2,)), ("riesz_bar", (1,)), ("neg_power", 0.5), ("imaginary", 1.0)]:
    row = []
    for k in range(4):
        c, target = S.multiplier(kind, (k,), param)
        row.append(f"{k}->{target[0] if target else '-'}: {complex(c):.4g}")
    print(f"{kind:>10} {param!s:>6}   " + "   ".join(row))

# applying to an expansion and evaluating
e = HermiteExpansion.from_dict(1, {(0,): 1.0, (3,): 0.5})
x = np.array([0.4])
for kind, param in [("riesz", (1,)), ("riesz_bar", (1,)), ("kbar", 1.0), ("heat", 0.3)]:
    print(f"{kind}({param}) f(0.4) =", complex(S.apply_operator(e, kind, param)(x)))

# R_2 and d^2 A^{-1} agree: both send Ht_k to (k+1)^{-1} Ht_{k+2}
r2 = S.riesz_apply(e, (2,))
direct = S.derivative_apply(S.neg_power_apply(e, 1.0), (2,))
print("R_2 f vs d^2 A^{-1} f:", complex(r2(x)), complex(direct(x)))
