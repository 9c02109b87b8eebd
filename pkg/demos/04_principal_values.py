"""Principal-value integrals against the spectral route.

pv_apply removes a shrinking ball around x, integrates the rest
adaptively, and completes the missing piece with the classical kernel.
The result should agree with the coefficient-side computation.
"""
import numpy as np

from invgauss import HermiteExpansion, kernel_spec, pv_apply
from invgauss import spectral as S

rng = np.random.default_rng(1)
e = HermiteExpansion(1, 4)
e.coeffs = rng.normal(size=5).astype(complex)
f = e.to_enveloped()

for alpha in [(1,), (2,), (3,)]:
    out = S.riesz_apply(e, alpha)
    for x in (-0.5, 0.8):
        r = pv_apply(kernel_spec("riesz", 1, alpha), f, [x])
        print(f"R_{alpha[0]} at {x:+.1f}: pv {r.value.real:+.10f}  spectral {complex(out(np.array([x]))).real:+.10f}"
              f"  constant {r.constant:+.4f}")

# imaginary powers: the raw shells keep turning, the corrected ones settle
g = HermiteExpansion.from_dict(1, {(0,): 1, (1,): 1, (2,): 1})
r = pv_apply(kernel_spec("imaginary", 1, 1.0), g.to_enveloped(), [0.3])
target = complex(S.imaginary_apply(g, 1.0)(np.array([0.3])))
print("\n eps        shell                corrected - target")
for eps, s, c in zip(r.epsilon_sequence, r.shell_values, r.corrected_values):
    print(f"{eps:.2e}  {s.real:+.5f}{s.imag:+.5f}i   {abs(c - target):.2e}")
print("limit error:", abs(r.value - target), " ladder extrapolation error:", abs(r.richardson_value - target))
