"""Operators of the inverse Gaussian setting: Hermite expansions, Mehler kernels,
singular kernels, principal values and numerical bound certificates."""

from .hermite import EnvelopedFunction, HermiteExpansion, InsufficientOrder, analyze, synthesize
from .pv import KernelSpec, PVResult, kernel_spec, pv_apply
from .certify import BoundCertificate, certify

__all__ = [
    "BoundCertificate",
    "EnvelopedFunction",
    "HermiteExpansion",
    "InsufficientOrder",
    "KernelSpec",
    "PVResult",
    "analyze",
    "certify",
    "kernel_spec",
    "pv_apply",
    "synthesize",
]
