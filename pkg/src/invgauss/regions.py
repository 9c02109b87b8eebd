"""Local and global regions adapted to the Gaussian scale m(x) = min(1, 1/|x|^2)."""

import numpy as np


def m_scale(x):
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    with np.errstate(divide="ignore"):
        v = np.where(r2 > 1.0, 1.0 / np.where(r2 > 0, r2, 1.0), 1.0)
    return v[()] if v.ndim == 0 else v


def local_radius(x, beta=1.0):
    """Radius beta * n * min(1, 1/|x|) of the ball about x whose points y make up N_beta at x."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    return beta * n * np.sqrt(m_scale(x))


def in_local(x, y, beta=1.0):
    """(x, y) in N_beta, i.e. |x - y| <= beta n min(1, 1/|x|)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    return d <= local_radius(x, beta)


def rescaling_holds(x, y, a, beta=1.0):
    """(x, y) outside N_beta implies (a x, a y) outside N_{a^2 beta} for a in (0, 1)."""
    if in_local(x, y, beta):
        return True
    return not in_local(a * np.asarray(x), a * np.asarray(y), a * a * beta)


def comparability(x):
    """(1 + |x|) sqrt(m(x)), which lies in [1, 2]: 1 + |x| for |x| <= 1, 1 + 1/|x| beyond."""
    x = np.asarray(x, dtype=float)
    return (1.0 + np.sqrt(np.sum(x * x, axis=-1))) * np.sqrt(m_scale(x))


def angle(x, y):
    """Angle in [0, pi] between x and y; 0 in dimension one or when either vector vanishes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] == 1:
        return np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1])[()]
    nx = np.sqrt(np.sum(x * x, axis=-1))
    ny = np.sqrt(np.sum(y * y, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sum(x * y, axis=-1) / (nx * ny)
    c = np.where((nx > 0) & (ny > 0), np.clip(c, -1.0, 1.0), 1.0)
    return np.arccos(c)[()]


def global_bound_params(x, y):
    """a = |x|^2 + |y|^2, b = 2<x, y>, s0, u0 and the angle, as used by the global envelopes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
    b = 2.0 * np.sum(x * y, axis=-1)
    root = np.sqrt(np.maximum(a * a - b * b, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        s0 = 2.0 * root / (a + root)
    xy_plus = np.sqrt(np.sum((x + y) ** 2, axis=-1))
    xy_minus = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    u0 = 0.5 * (np.sum(y * y, axis=-1) - np.sum(x * x, axis=-1)) + 0.5 * xy_plus * xy_minus
    return {"a": a, "b": b, "s0": s0, "u0": u0, "theta": angle(x, y)}
