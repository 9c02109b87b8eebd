"""Grid certification of kernel envelopes.

Each estimate compares a numerically computed left side L(x, y) with a
closed-form right side B(x, y) on a region.  The constant is calibrated as
C = headroom * max L / B on a coarse grid and then re-checked on a grid
with ten times as many points.  A pass is numerical evidence, not a proof.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels as K
from .quadrature import gauss_legendre, sphere_rule
from .regions import angle, local_radius

DEFAULTS = {
    "power": 1.0,  # beta of A^{-beta} for the M_beta estimates
    "alpha": None,  # Riesz multi-index, defaults to e_1
    "eta": 0.75,
    "c": 0.5,
    "box": 3.5,
    "coarse": 15,
    "rho_min": 1e-3,
    "headroom": 1.05,
    "seed": 0,
}

DISCLAIMER = "numerical evidence only"


@dataclass
class BoundCertificate:
    estimate: str
    params: dict
    calibrated_C: float
    worst_ratio: float
    grid: dict
    verdict: str
    region: str = ""
    disclaimer: str = DISCLAIMER
    extra: dict = field(default_factory=dict)

    def to_json(self):
        d = asdict(self)
        if not d["extra"]:
            del d["extra"]
        return json.dumps(d, sort_keys=True, indent=2) + "\n"


def _norm(v):
    return np.sqrt(np.sum(v * v, axis=-1))


# --------------------------------------------------------------------- grids


def _axis(m, lo, hi, rng=None):
    """m points on [lo, hi]; interior points jittered by up to a quarter spacing."""
    g = np.linspace(lo, hi, m)
    if rng is not None and m > 2:
        h = g[1] - g[0]
        g[1:-1] += rng.uniform(-0.25 * h, 0.25 * h, m - 2)
    return g


def _points(n, m, box, rng=None):
    """Grid on [0, box] x [-box, box]^{n-1}.

    Every kernel modulus and envelope here is unchanged under
    (x, y) -> (-x, -y), so half of the x range suffices.
    """
    axes = [_axis(m, 0.0, box, rng)] + [_axis(m, -box, box, rng) for _ in range(n - 1)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


def fine_count(m, dims, factor=10.0):
    """Points per axis giving `factor` times as many grid points in `dims` dimensions."""
    return int(math.ceil(m * factor ** (1.0 / dims)))


def pair_grid(n, m, box, rng=None, min_sep=1e-3):
    """All pairs of an m^n grid with |x - y| >= min_sep."""
    P = _points(n, m, box, rng)
    X = np.repeat(P, len(P), axis=0)
    Y = np.tile(P, (len(P), 1))
    keep = _norm(X - Y) >= min_sep
    return X[keep], Y[keep]


def _directions(n, m):
    if n == 1:
        return np.array([[1.0], [-1.0]])
    th = 2.0 * np.pi * np.arange(m) / m
    return np.stack([np.cos(th), np.sin(th)], axis=-1)


def local_grid(n, m, beta, box, rho_min, rng=None):
    """Pairs (x, x + rho w): x on an m^n grid, rho log-spaced in [rho_min, beta n sqrt(m(x))], m directions."""
    return _polar_grid(n, m, box, lambda top: (rho_min, top), beta, rng)


def global_grid(n, m, beta, box, rng=None):
    """Pairs (x, x + rho w) with rho log-spaced from the boundary of N_beta out to 2 box.

    The envelopes are sharpest at the boundary |x - y| = beta n sqrt(m(x))
    and at y = 0, so every grid contains both.
    """
    X, Y = _polar_grid(n, m, box, lambda top: (top, max(2.0 * box, 2.0 * top)), beta, rng)
    P = _points(n, m, box, rng)
    return np.concatenate([X, P]), np.concatenate([Y, np.zeros_like(P)])


def _polar_grid(n, m, box, limits, beta, rng):
    P = _points(n, m, box, rng)
    tau = np.linspace(0.0, 1.0, m)
    W = _directions(n, m)
    Xs, Ys = [], []
    for x in P:
        lo, hi = limits(float(local_radius(x, beta)))
        rho = lo * (hi / lo) ** tau
        D = (rho[:, None, None] * W[None, :, :]).reshape(-1, n)
        Xs.append(np.broadcast_to(x, D.shape))
        Ys.append(x + D)
    return np.concatenate(Xs), np.concatenate(Ys)


# ----------------------------------------------------------------- envelopes


def _alpha(params, n):
    a = params.get("alpha")
    return tuple(a) if a is not None else (1,) + (0,) * (n - 1)


def gaussian_envelope(X, Y, eta=1.0):
    """e^{-eta |x|^2} when <x, y> <= 0, else (|x+y|/|x-y|)^{n/2} exp(eta ((|y|^2-|x|^2)/2 - |x-y||x+y|/2))."""
    n = X.shape[-1]
    xp = _norm(X + Y)
    xm = _norm(X - Y)
    inner = np.sum(X * Y, axis=-1)
    x2 = np.sum(X * X, axis=-1)
    y2 = np.sum(Y * Y, axis=-1)
    pos = (xp / xm) ** (0.5 * n) * np.exp(eta * (0.5 * (y2 - x2) - 0.5 * xm * xp))
    return np.where(inner <= 0, np.exp(-eta * x2), pos)


def polynomial_envelope(X, Y, c=0.5):
    """e^{|y|^2-|x|^2} (min{(1+|x|)^n, (|x| sin theta)^{-n}} + |x|^{1-n} + e^{-c|y_perp|^2} |x| (|y|/|x|)^{n-1} [|y| < 2|x|]).

    The angle term has no limit as y -> 0 when n > 1; there, and on the
    jump |y| = 2|x| of the indicator, the smaller one-sided value is used,
    so the envelope is lower semicontinuous and never exceeds the formula.
    """
    n = X.shape[-1]
    rx = _norm(X)
    ry = _norm(Y)
    if n == 1:
        sin_th = np.zeros_like(rx)
    else:
        sin_th = np.where((rx > 0) & (ry > 0), np.sin(angle(X, Y)), 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.minimum((1.0 + rx) ** n, (rx * sin_th) ** (-float(n)))
        second = np.where(rx > 0, rx ** (1.0 - n), np.inf)
        ux = X / rx[:, None]
        yperp = Y - np.sum(Y * ux, axis=-1)[:, None] * ux
        third = np.exp(-c * np.sum(yperp * yperp, axis=-1)) * rx * (ry / rx) ** (n - 1)
    third = np.where((ry < 2.0 * rx) & (rx > 0), third, 0.0)
    return np.exp(ry * ry - rx * rx) * (first + second + third)


def local_envelope(X, Y):
    """sqrt(1 + |x|) / |x - y|^{n - 1/2}."""
    n = X.shape[-1]
    return np.sqrt(1.0 + _norm(X)) / _norm(X - Y) ** (n - 0.5)


# ------------------------------------------------------------ pair estimates


def _outside(X, Y, beta):
    # the boundary itself belongs to N_beta; keep points on it up to rounding
    keep = _norm(X - Y) >= local_radius(X, beta) * (1 - 1e-12)
    return X[keep], Y[keep]


def _mbeta(X, Y, p):
    X, Y = _outside(X, Y, 1.0)
    return np.abs(K.neg_power_kernel(p["power"], X, Y)), gaussian_envelope(X, Y, 1.0)


def _mbeta_poly(X, Y, p):
    X, Y = _outside(X, Y, 1.0)
    return np.abs(K.neg_power_kernel(p["power"], X, Y)), polynomial_envelope(X, Y, p["c"])


def _riesz_global(X, Y, p):
    X, Y = _outside(X, Y, 1.0 / p["eta"])
    a = _alpha(p, X.shape[-1])
    return np.abs(K.riesz_kernel(a, X, Y)), gaussian_envelope(X, Y, p["eta"])


def _riesz_local(X, Y, p):
    a = _alpha(p, X.shape[-1])
    lhs = np.abs(K.riesz_kernel(a, X, Y) - K.classical_riesz_closed(a, X - Y))
    return lhs, local_envelope(X, Y)


def _riesz_bar_local(X, Y, p):
    a = _alpha(p, X.shape[-1])
    weight = np.exp(np.sum(Y * Y, axis=-1) - np.sum(X * X, axis=-1))
    part = 2.0 ** (-sum(a)) * weight * K.classical_riesz_closed(a, Y - X)
    return np.abs(K.riesz_bar_kernel(a, X, Y) - part), local_envelope(X, Y)


def _first_order_local(X, Y, p):
    n = X.shape[-1]
    lhs = np.zeros(len(X))
    for i in range(n):
        e = tuple(int(j == i) for j in range(n))
        v = np.abs(K.riesz_kernel(e, X, Y) - K.euclid_riesz_first(i, X - Y))
        lhs = np.maximum(lhs, v)
    return lhs, local_envelope(X, Y)


def _first_order_global(X, Y, p):
    X, Y = _outside(X, Y, 1.0 / p["eta"])
    n = X.shape[-1]
    lhs = np.zeros(len(X))
    for i in range(n):
        e = tuple(int(j == i) for j in range(n))
        lhs = np.maximum(lhs, np.abs(K.riesz_kernel(e, X, Y)))
    return lhs, gaussian_envelope(X, Y, p["eta"])


# ------------------------------------------------------------- row integrals


def _radial_rule(top, panels=12, ratio=4.0, order=6):
    """Nodes and weights on (top * ratio^{-panels}, top), geometric panels."""
    u, w = gauss_legendre(order)
    edges = top * ratio ** -np.arange(panels, -1, -1.0)
    a, b = edges[:-1, None], edges[1:, None]
    r = 0.5 * (b - a) * u[None, :] + 0.5 * (a + b)
    return r.ravel(), (0.5 * (b - a) * w[None, :]).ravel()


def _row_integrals(P, kernel, radius, n, block=16):
    """For each x in P: int over |y - x| <= radius(x) of kernel(X, Y) dy."""
    W, wa = sphere_rule(n, {1: 0, 2: 4, 3: 3}[n])
    t, wt = _radial_rule(1.0)
    out = np.zeros(len(P))
    for start in range(0, len(P), block):
        Pb = P[start:start + block]
        top = np.array([float(radius(x)) for x in Pb])
        r = top[:, None] * t[None, :]
        D = r[:, :, None, None] * W[None, None, :, :]
        X = np.broadcast_to(Pb[:, None, None, :], D.shape)
        vals = kernel(X.reshape(-1, n), (X + D).reshape(-1, n)).reshape(len(Pb), len(t), len(W))
        w = (top[:, None] * wt[None, :]) * r ** (n - 1)
        out[start:start + len(Pb)] = np.einsum("pr,a,pra->p", w, wa, vals)
    return out


def _schur_row(P, p):
    n = P.shape[-1]
    lhs = _row_integrals(P, lambda X, Y: K.neg_power_kernel(p["power"], X, Y),
                         lambda x: local_radius(x, 1.0), n)
    return lhs, np.ones(len(P))


def _schur_row_diff(P, p):
    n = P.shape[-1]
    a = _alpha(p, n)
    beta = 1.0 / p["eta"]

    def k(X, Y):
        return np.abs(K.riesz_kernel(a, X, Y) - K.classical_riesz_closed(a, X - Y))

    return _row_integrals(P, k, lambda x: local_radius(x, beta), n), np.ones(len(P))


PAIR_ESTIMATES = {
    "Mbeta": (_mbeta, "global", "complement of N"),
    "2.4": (_mbeta_poly, "global", "complement of N"),
    "acotRalpha": (_riesz_global, "global", "complement of N_beta, beta = 1/eta"),
    "acotdif": (_riesz_local, "local", "N_beta, beta = 1/eta"),
    "acotIb": (_riesz_bar_local, "local", "N_beta, beta = 1/eta"),
}
ROW_ESTIMATES = {
    "schur-row": (_schur_row, "sup_x int M_beta(x, y) chi_N(x, y) dy"),
    "schur-row-diff": (_schur_row_diff, "sup_x int |R_alpha - classical|(x, y) chi_N_beta(x, y) dy"),
}
ESTIMATES = tuple(PAIR_ESTIMATES) + ("5.1",) + tuple(ROW_ESTIMATES)


def _ratio(lhs, rhs):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(np.isinf(rhs), 0.0, lhs / rhs)
    if not np.all(np.isfinite(r)):
        raise FloatingPointError("non-finite ratio on the grid")
    return r


def _grids(estimate, n, m, p, rng):
    """List of (kind, X, Y) blocks for an estimate at per-axis count m."""
    beta = 1.0 / p["eta"]
    if estimate in PAIR_ESTIMATES:
        fn, kind, _ = PAIR_ESTIMATES[estimate]
        if kind == "global":
            b = 1.0 if estimate in ("Mbeta", "2.4") else beta
            return [(fn,) + global_grid(n, m, b, p["box"], rng)]
        return [(fn,) + local_grid(n, m, beta, p["box"], p["rho_min"], rng)]
    if estimate == "5.1":
        return [(_first_order_local,) + local_grid(n, m, beta, p["box"], p["rho_min"], rng),
                (_first_order_global,) + global_grid(n, m, beta, p["box"], rng)]
    raise KeyError(estimate)


def _grid_dims(estimate, n):
    if estimate in ROW_ESTIMATES:
        return n
    # x (n axes), rho and, for n > 1, a direction angle: 2n axes
    return 2 * n


def _evaluate(estimate, n, m, p, rng):
    if estimate in ROW_ESTIMATES:
        P = _points(n, m, p["box"], rng)
        lhs, rhs = ROW_ESTIMATES[estimate][0](P, p)
        return _ratio(lhs, rhs), len(P)
    ratios, count = [], 0
    for fn, X, Y in _grids(estimate, n, m, p, rng):
        lhs, rhs = fn(X, Y, p)
        ratios.append(_ratio(lhs, rhs))
        count += len(lhs)
    return np.concatenate(ratios), count


def certify(estimate, n, **params):
    """Calibrate C on the coarse grid, verify on the finer one, return a BoundCertificate."""
    if estimate not in ESTIMATES:
        raise KeyError(f"unknown estimate {estimate!r}; choose from {', '.join(ESTIMATES)}")
    if n not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    p = dict(DEFAULTS)
    p.update({k: v for k, v in params.items() if v is not None})
    if p["alpha"] is not None:
        p["alpha"] = [int(a) for a in p["alpha"]]
        if len(p["alpha"]) != n or sum(p["alpha"]) == 0:
            raise ValueError("alpha must be a nonzero multi-index of length n")
    if not 0 < p["eta"] < 1:
        raise ValueError("eta must lie in (0, 1)")
    m0 = int(p["coarse"])
    if m0 < 2:
        raise ValueError("the coarse grid needs at least two points per axis")
    dims = _grid_dims(estimate, n)
    m1 = fine_count(m0, dims)
    coarse, n0 = _evaluate(estimate, n, m0, p, None)
    fine, n1 = _evaluate(estimate, n, m1, p, np.random.default_rng(p["seed"]))
    if n0 == 0 or n1 == 0:
        raise ValueError("degenerate grid: no points in the region")
    C = float(p["headroom"] * coarse.max())
    worst = float(fine.max())
    region = ROW_ESTIMATES[estimate][1] if estimate in ROW_ESTIMATES else (
        PAIR_ESTIMATES[estimate][2] if estimate in PAIR_ESTIMATES else "N_beta and its complement")
    params_out = {"n": n, "beta": 1.0 / p["eta"], **{k: p[k] for k in ("power", "eta", "c", "headroom")},
                  "alpha": list(_alpha(p, n))}
    grid = {
        "box": [-p["box"], p["box"]],
        "coarse_per_axis": m0,
        "verification_per_axis": m1,
        "axes": dims,
        "coarse_points": n0,
        "verification_points": n1,
        "rho_min": p["rho_min"],
        "seed": p["seed"],
    }
    return BoundCertificate(
        estimate=estimate,
        params=params_out,
        calibrated_C=C,
        worst_ratio=worst,
        grid=grid,
        verdict="pass" if worst <= C else "fail",
        region=region,
    )
