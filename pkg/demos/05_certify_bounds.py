"""Grid certification of kernel bounds.

A certificate calibrates a constant C on a coarse grid of (x, y) pairs,
adds 5% headroom, and re-checks on a grid with ten times the points.
This is numerical evidence for an inequality, not a proof.
"""
from invgauss import certify
from invgauss.certify import ESTIMATES

for est in ESTIMATES:
    cert = certify(est, 1)
    print(f"{est:>15}  C={cert.calibrated_C:.4g}  worst ratio={cert.worst_ratio:.4g}  {cert.verdict}  [{cert.region}]")

print()
print(certify("Mbeta", 2, power=1.0).to_json())
