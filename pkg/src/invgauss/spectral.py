"""Operators acting diagonally (or by index shifts) on Hermite coefficients.

On Ht_k the generator A has eigenvalue |k| + n and Abar has eigenvalue |k|.
Derivatives raise the index, d^alpha Ht_k = (-1)^{|alpha|} Ht_{k+alpha}, and
delta^alpha lowers it with the falling factorial k! / (k - alpha)!.
"""

import math

import numpy as np

from .hermite import HermiteExpansion


def _degrees(e):
    return np.array([sum(k) for k in e.indices], dtype=float)


def _check_alpha(alpha, n):
    if len(alpha) != n:
        raise ValueError("multi-index length does not match the dimension")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be non-negative")
    if sum(alpha) == 0:
        raise ValueError("alpha = 0 is not a Riesz transform")


def _diagonal(e, mult):
    out = e.copy()
    out.coeffs = e.coeffs * mult
    return out


def generator_apply(e):
    return _diagonal(e, _degrees(e) + e.dim)


def generator_bar_apply(e):
    return _diagonal(e, _degrees(e))


def heat_apply(e, t):
    """e^{-tA}: multiplier exp(-(|k| + n) t)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return _diagonal(e, np.exp(-(_degrees(e) + e.dim) * t))


def heat_bar_apply(e, t):
    if t < 0:
        raise ValueError("t must be non-negative")
    return _diagonal(e, np.exp(-_degrees(e) * t))


def neg_power_apply(e, beta):
    """A^{-beta}: multiplier (|k| + n)^{-beta}."""
    return _diagonal(e, (_degrees(e) + e.dim) ** (-float(beta)))


def project_zero(e):
    """Remove the Ht_0 component."""
    out = e.copy()
    out.coeffs[e.position[(0,) * e.dim]] = 0
    return out


def kbar_apply(e, beta):
    """Abar^{-beta} on the complement of Ht_0: |k|^{-beta}, and 0 at k = 0."""
    deg = _degrees(e)
    with np.errstate(divide="ignore"):
        mult = np.where(deg > 0, np.where(deg > 0, deg, 1.0) ** (-float(beta)), 0.0)
    return _diagonal(e, mult)


def imaginary_apply(e, gamma):
    """A^{i gamma}: multiplier (|k| + n)^{i gamma}."""
    return _diagonal(e, np.exp(1j * float(gamma) * np.log(_degrees(e) + e.dim)))


def riesz_apply(e, alpha):
    """R_alpha = d^alpha A^{-|alpha|/2}: c_k Ht_k -> (-1)^{|alpha|} (|k|+n)^{-|alpha|/2} c_k Ht_{k+alpha}."""
    alpha = tuple(int(a) for a in alpha)
    _check_alpha(alpha, e.dim)
    m = sum(alpha)
    out = HermiteExpansion(e.dim, e.degree + m)
    sign = (-1) ** m
    for k, c in e.items():
        if c != 0:
            kk = tuple(a + b for a, b in zip(k, alpha))
            out.coeffs[out.position[kk]] = sign * (sum(k) + e.dim) ** (-0.5 * m) * c
    return out


def falling_factorial(k, m):
    """k (k-1) ... (k-m+1) as an exact integer."""
    return math.prod(range(k - m + 1, k + 1)) if m <= k else 0


def riesz_bar_apply(e, alpha):
    """Rbar_alpha = delta^alpha Abar^{-|alpha|/2} Pi_0:
    c_k Ht_k -> (-1)^{|alpha|} |k|^{-|alpha|/2} prod k_i!/(k_i - alpha_i)! c_k Ht_{k-alpha}
    for k >= alpha and k != 0, and zero otherwise."""
    alpha = tuple(int(a) for a in alpha)
    _check_alpha(alpha, e.dim)
    m = sum(alpha)
    out = HermiteExpansion(e.dim, max(e.degree - m, 0))
    sign = (-1) ** m
    for k, c in e.items():
        if c == 0 or sum(k) == 0 or any(ki < ai for ki, ai in zip(k, alpha)):
            continue
        ff = math.prod(falling_factorial(ki, ai) for ki, ai in zip(k, alpha))
        kk = tuple(ki - ai for ki, ai in zip(k, alpha))
        out.coeffs[out.position[kk]] += sign * sum(k) ** (-0.5 * m) * ff * c
    return out


def derivative_apply(e, alpha):
    """d^alpha: Ht_k -> (-1)^{|alpha|} Ht_{k+alpha}."""
    alpha = tuple(int(a) for a in alpha)
    m = sum(alpha)
    out = HermiteExpansion(e.dim, e.degree + m)
    for k, c in e.items():
        kk = tuple(a + b for a, b in zip(k, alpha))
        out.coeffs[out.position[kk]] = (-1) ** m * c
    return out


def delta_apply(e, alpha):
    """delta^alpha: Ht_k -> (-1)^{|alpha|} k!/(k-alpha)! Ht_{k-alpha}."""
    alpha = tuple(int(a) for a in alpha)
    m = sum(alpha)
    out = HermiteExpansion(e.dim, max(e.degree - m, 0))
    for k, c in e.items():
        if any(ki < ai for ki, ai in zip(k, alpha)):
            continue
        ff = math.prod(falling_factorial(ki, ai) for ki, ai in zip(k, alpha))
        kk = tuple(ki - ai for ki, ai in zip(k, alpha))
        out.coeffs[out.position[kk]] += (-1) ** m * ff * c
    return out


def multiplier(kind, k, param=None):
    """(scalar, target index) that the operator attaches to Ht_k; target None means annihilated."""
    k = tuple(int(v) for v in k)
    n, deg = len(k), sum(k)
    if kind == "generator":
        return float(deg + n), k
    if kind == "generator_bar":
        return float(deg), k
    if kind == "heat":
        return math.exp(-(deg + n) * float(param)), k
    if kind == "neg_power":
        return float(deg + n) ** (-float(param)), k
    if kind == "imaginary":
        return complex(np.exp(1j * float(param) * math.log(deg + n))), k
    alpha = tuple(int(a) for a in param)
    _check_alpha(alpha, n)
    m = sum(alpha)
    if kind == "riesz":
        return (-1) ** m * float(deg + n) ** (-0.5 * m), tuple(a + b for a, b in zip(k, alpha))
    if kind == "riesz_bar":
        if deg == 0 or any(ki < ai for ki, ai in zip(k, alpha)):
            return 0.0, None
        ff = math.prod(falling_factorial(ki, ai) for ki, ai in zip(k, alpha))
        return (-1) ** m * deg ** (-0.5 * m) * ff, tuple(ki - ai for ki, ai in zip(k, alpha))
    raise ValueError(f"unknown operator {kind!r}")


def apply_operator(e, kind, param):
    """Dispatch by name: heat, heat_bar, neg_power, kbar, imaginary, riesz, riesz_bar, generator."""
    if kind == "heat":
        return heat_apply(e, float(param))
    if kind == "heat_bar":
        return heat_bar_apply(e, float(param))
    if kind == "neg_power":
        return neg_power_apply(e, float(param))
    if kind == "kbar":
        return kbar_apply(e, float(param))
    if kind == "imaginary":
        return imaginary_apply(e, float(param))
    if kind == "riesz":
        return riesz_apply(e, param)
    if kind == "riesz_bar":
        return riesz_bar_apply(e, param)
    if kind == "generator":
        return generator_apply(e)
    raise ValueError(f"unknown operator {kind!r}")
