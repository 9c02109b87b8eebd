"""Closed forms for the Mehler kernel of the inverse Gaussian semigroup,
its derivatives, the shifted kernel Tbar_t = e^{nt} T_t, and the classical
heat kernel W_t(z) = (2 pi t)^{-n/2} exp(-|z|^2 / (2t)).

Arguments broadcast: t has shape (...), x and y have shape (..., n).  Where a
displacement d = y - x is known exactly it can be passed to avoid losing
digits near the diagonal.
"""

import math

import numpy as np

from .hermite import hermite_multi
from .quadrature import gauss_hermite

LOG_PI = math.log(math.pi)


def _prep(t, x, y, d):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if d is None:
        d = y - x
    d = np.asarray(d, dtype=float)
    if np.any(t <= 0):
        raise ValueError("the kernel is only defined for t > 0")
    n = x.shape[-1]
    q = -np.expm1(-t)  # 1 - e^{-t}
    s = -np.expm1(-2.0 * t)  # 1 - e^{-2t}
    return t, x, y, d, n, q, s


def _sq(v):
    return np.sum(v * v, axis=-1)


def mehler_kernel(t, x, y, d=None):
    """T_t(x, y) = e^{-nt} pi^{-n/2} (1 - e^{-2t})^{-n/2} exp(-|x - e^{-t} y|^2 / (1 - e^{-2t}))."""
    return mehler_dx((0,) * np.shape(x)[-1], t, x, y, d)


def mehler_dx(ell, t, x, y, d=None):
    """x-derivative d_x^ell T_t(x, y)."""
    t, x, y, d, n, q, s = _prep(t, x, y, d)
    m = sum(ell)
    w = (q[..., None] * y - d) / np.sqrt(s)[..., None]  # (x - e^{-t} y) / sqrt(s)
    logv = -n * t - 0.5 * (n + m) * np.log(s) - _sq(w) - 0.5 * n * LOG_PI
    return (-1) ** m * np.exp(logv) * hermite_multi(ell, w)


def mehler_dt(t, x, y, d=None):
    """Time derivative of T_t(x, y)."""
    t, x, y, d, n, q, s = _prep(t, x, y, d)
    e2 = np.exp(-2.0 * t)
    xr = q[..., None] * y - d  # x - e^{-t} y
    bracket = -n + e2 * (_sq(y) - _sq(x)) - s * _sq(x) + (1.0 + e2) / s * _sq(xr)
    return bracket * mehler_kernel(t, x, y, d) / s


def mehler_bar(t, x, y, d=None):
    """Tbar_t(x, y) = e^{nt} T_t(x, y), kernel of the semigroup generated by Abar."""
    t, x, y, d, n, q, s = _prep(t, x, y, d)
    w = (d + q[..., None] * x) / np.sqrt(s)[..., None]  # (y - e^{-t} x) / sqrt(s)
    logv = (2.0 * np.sum(x * d, axis=-1) + _sq(d)) - 0.5 * n * np.log(s) - _sq(w) - 0.5 * n * LOG_PI
    return np.exp(logv)


def delta_dx_tbar(ell, t, x, y, d=None):
    """delta_x^ell Tbar_t(x, y), delta_i = -(1/2) e^{-x_i^2} d/dx_i e^{x_i^2}."""
    t, x, y, d, n, q, s = _prep(t, x, y, d)
    m = sum(ell)
    w = (d + q[..., None] * x) / np.sqrt(s)[..., None]
    logv = (2.0 * np.sum(x * d, axis=-1) + _sq(d)) - m * t - 0.5 * (n + m) * np.log(s)
    logv = logv - _sq(w) - 0.5 * n * LOG_PI - m * math.log(2.0)
    return (-1) ** m * np.exp(logv) * hermite_multi(ell, w)


def classical_heat(ell, t, z):
    """d^ell W_t(z) = (-1)^{|ell|} pi^{-n/2} (2t)^{-(n+|ell|)/2} Ht_ell(z / sqrt(2t))."""
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    m = sum(ell)
    u = z / np.sqrt(2.0 * t)[..., None]
    logv = -0.5 * (n + m) * np.log(2.0 * t) - _sq(u) - 0.5 * n * LOG_PI
    return (-1) ** m * np.exp(logv) * hermite_multi(ell, u)


def classical_heat_dt(t, z):
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    return (-n + _sq(z) / t) * classical_heat((0,) * n, t, z) / (2.0 * t)


def heat_apply(f, t, x, order=40):
    """int T_t(x, y) f(y) dy for f = g exp(-|y|^2), g polynomial.

    Uses a Gauss-Hermite rule centred at e^{-t} x with width sqrt(1 - e^{-2t});
    there the product T_t(x, .) f exp(|u|^2) is a polynomial in u times a
    constant, so the rule is exact for deg g < 2 * order.  t = 0 returns f(x).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    if t == 0:
        return complex(np.asarray(f(x[None, :]))[0])
    u, w = gauss_hermite(order)
    U = np.stack(np.meshgrid(*([u] * n), indexing="ij"), axis=-1).reshape(-1, n)
    W = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), axis=-1).reshape(-1, n), axis=-1)
    r = math.exp(-t)
    s = -math.expm1(-2.0 * t)
    Y = r * x[None, :] + math.sqrt(s) * U
    vals = mehler_kernel(np.full(len(Y), t), np.broadcast_to(x, Y.shape), Y) * np.asarray(f(Y))
    return complex(np.sum(W * np.exp(_sq(U)) * vals) * s ** (n / 2.0))
