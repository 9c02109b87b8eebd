"""Quadrature rules: Gauss rules by Golub-Welsch, adaptive Gauss-Legendre
panels, time integrals on (0, inf) and integrals over spherical shells."""

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal


@lru_cache(maxsize=None)
def _gauss_hermite(q):
    if not 1 <= q <= 256:
        raise ValueError("Gauss-Hermite order must be in 1..256")
    if q == 1:
        return np.zeros(1), np.array([math.sqrt(math.pi)])
    off = np.sqrt(np.arange(1, q) / 2.0)
    x = eigh_tridiagonal(np.zeros(q), off, eigvals_only=True)
    # w_i = sqrt(pi) / sum_m p_m(x_i)^2 over the orthonormal Hermite polynomials;
    # unlike squared eigenvector entries this keeps full relative accuracy in the tails
    p0, p1 = np.ones(q), math.sqrt(2.0) * x
    total = p0 * p0 + p1 * p1
    for m in range(1, q - 1):
        p0, p1 = p1, math.sqrt(2.0 / (m + 1)) * x * p1 - math.sqrt(m / (m + 1)) * p0
        total += p1 * p1
    w = math.sqrt(math.pi) / total
    # enforce exact symmetry of the rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def gauss_hermite(q):
    """Nodes and weights of the q-point rule for int h(x) exp(-x^2) dx."""
    x, w = _gauss_hermite(int(q))
    return x.copy(), w.copy()


@lru_cache(maxsize=None)
def _gauss_legendre(q):
    if q == 1:
        return np.zeros(1), np.array([2.0])
    k = np.arange(1, q)
    off = k / np.sqrt(4.0 * k * k - 1.0)
    x, v = eigh_tridiagonal(np.zeros(q), off)
    w = 2.0 * v[0] ** 2
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def gauss_legendre(q):
    """Nodes and weights on [-1, 1]."""
    x, w = _gauss_legendre(int(q))
    return x.copy(), w.copy()


def adaptive_panels(f, edges, rtol=1e-10, atol=0.0, order=10, max_depth=64):
    """Integrate f over consecutive panels [edges[i], edges[i+1]].

    Each panel is bisected until the order-q rule on the panel and on its two
    halves agree to within max(atol, rtol * |piece|, rtol * share of total).
    f takes a 1-d array of abscissae and returns values of the same length,
    or a pair (values, magnitudes) when the values are a cancelling sum; the
    magnitudes then set a rounding floor below which no bisection happens.
    Returns (panel integrals, panel error estimates).
    """
    edges = np.asarray(edges, dtype=float)
    npan = len(edges) - 1
    xg, wg = _gauss_legendre(order)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    owner = np.arange(npan)
    depth = np.zeros(npan, dtype=int)
    whole = None
    values = [[] for _ in range(npan)]
    errors = np.zeros(npan)
    scale = None
    while lo.size:
        mid = 0.5 * (lo + hi)
        if whole is None:
            c = 0.5 * (lo + hi)
            r = 0.5 * (hi - lo)
            fx, _ = _split(f((c[:, None] + r[:, None] * xg[None, :]).ravel()))
            whole = r * (fx.reshape(lo.size, order) @ wg)
        # halves
        cl, rl = 0.5 * (lo + mid), 0.5 * (mid - lo)
        cr, rr = 0.5 * (mid + hi), 0.5 * (hi - mid)
        pts = np.concatenate([(cl[:, None] + rl[:, None] * xg).ravel(), (cr[:, None] + rr[:, None] * xg).ravel()])
        fx, mag = _split(f(pts))
        m = lo.size
        left = rl * (fx[: m * order].reshape(m, order) @ wg)
        right = rr * (fx[m * order:].reshape(m, order) @ wg)
        if mag is not None:
            floor = 1e-13 * (rl * (mag[: m * order].reshape(m, order) @ wg)
                             + rr * (mag[m * order:].reshape(m, order) @ wg))
        else:
            floor = 0.0
        both = left + right
        err = np.abs(both - whole)
        if scale is None:
            scale = float(np.sum(np.abs(both)))
        tol = rtol * scale * (hi - lo) / max(edges[-1] - edges[0], 1e-300)
        tol = np.maximum(np.maximum(np.maximum(tol, rtol * np.abs(both)), atol), floor)
        done = (err <= tol) | (depth >= max_depth) | (rl <= 1e-15 * np.abs(mid))
        for i in np.nonzero(done)[0]:
            values[owner[i]].append((lo[i], both[i]))
            errors[owner[i]] += err[i]
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        owner = np.concatenate([owner[keep], owner[keep]])
        depth = np.concatenate([depth[keep], depth[keep]]) + 1
        whole = np.concatenate([left[keep], right[keep]])
    out = np.zeros(npan, dtype=complex)
    for i, parts in enumerate(values):
        parts.sort(key=lambda p: p[0])
        out[i] = np.sum(np.array([p[1] for p in parts], dtype=complex))
    return out, errors


def _split(v):
    if isinstance(v, tuple):
        return np.asarray(v[0]), np.abs(np.asarray(v[1]))
    return np.asarray(v), None


def adaptive_integral(f, a, b, rtol=1e-12, atol=0.0, order=10, max_depth=64):
    vals, errs = adaptive_panels(f, [a, b], rtol=rtol, atol=atol, order=order, max_depth=max_depth)
    return vals[0], errs[0]


def integrate_time(f, p=1.0, lam=1.0, split=1.0, tol=1e-12, max_depth=64, return_error=False):
    """int_0^inf f(t) dt for f ~ t^{p-1} at 0 and ~ exp(-lam t) at infinity.

    On (0, split] the substitution t = split * v^{1/p} flattens the endpoint
    power; on (split, T] the cut T is pushed out until the exponential tail
    |f(T)| / lam is below tol / 10.
    """
    if p <= 0 or lam <= 0:
        raise ValueError("need p > 0 and lam > 0")

    def head(v):
        t = split * v ** (1.0 / p)
        return np.asarray(f(t)) * split / p * v ** (1.0 / p - 1.0)

    v1, e1 = adaptive_integral(head, 0.0, 1.0, rtol=tol, atol=tol / 10, max_depth=max_depth)
    f_split = abs(complex(np.asarray(f(np.array([split])))[0]))
    extra = (math.log(10.0 / tol) + math.log1p(f_split)) / lam
    T = split + extra
    while abs(complex(np.asarray(f(np.array([T])))[0])) / lam >= tol / 10:
        extra *= 1.5
        T = split + extra
        if extra > 1e6:
            raise ArithmeticError("integrand does not decay")
    v2, e2 = adaptive_integral(f, split, T, rtol=tol, atol=tol / 10, max_depth=max_depth)
    val = v1 + v2
    if np.all(np.imag(val) == 0):
        val = float(np.real(val))
    else:
        val = complex(val)
    if return_error:
        return val, float(e1 + e2) + tol / 10
    return val


def log_time_rule(t_lo, t_hi, h=0.1):
    """Trapezoid nodes in u = log t: returns t_k and weights h * t_k."""
    u0, u1 = math.log(t_lo), math.log(t_hi)
    m = max(2, int(math.ceil((u1 - u0) / h)) + 1)
    u = u1 - h * np.arange(m)[::-1]
    t = np.exp(u)
    return t, h * t


def sphere_rule(n, level):
    """Directions and weights for int_{S^{n-1}} g(w) dw.

    n = 1: the two points +-1.  n = 2: 2^level equispaced angles.
    n = 3: Gauss-Legendre in cos(polar) x 2^level equispaced azimuths.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        N = 2 ** level
        th = 2.0 * math.pi * np.arange(N) / N
        return np.stack([np.cos(th), np.sin(th)], axis=-1), np.full(N, 2.0 * math.pi / N)
    if n == 3:
        N = 2 ** level
        m = max(N // 2, 2)
        c, wc = _gauss_legendre(m)
        ph = 2.0 * math.pi * np.arange(N) / N
        C, P = np.meshgrid(c, ph, indexing="ij")
        S = np.sqrt(1.0 - C * C)
        dirs = np.stack([S * np.cos(P), S * np.sin(P), C], axis=-1).reshape(-1, 3)
        w = (wc[:, None] * np.full(N, 2.0 * math.pi / N)[None, :]).ravel()
        return dirs, w
    raise ValueError("sphere rules are provided for n <= 3")


def sphere_area(n):
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def angular_integral(h, rho, n, rtol=1e-11, atol=0.0, level0=4, max_level=12, magnitude=False):
    """S(rho) = int_{S^{n-1}} h(rho * w) dw for each rho, refined per rho.

    h maps an (N, n) array of displacements to N values, or to a pair
    (values, magnitudes) when the values come from a cancelling difference
    and the magnitudes set the rounding floor.  The equispaced
    angular rule is doubled until two successive levels agree, or until the
    difference is at the rounding level of the uncancelled sum of |h|.
    With magnitude=True the angular integral of |h| is returned as well.
    """
    rho = np.asarray(rho, dtype=float)
    if n == 1:
        D = np.concatenate([rho[:, None], -rho[:, None]])
        v, mag = _split(h(D))
        if mag is None:
            mag = np.abs(v)
        out = v[: rho.size] + v[rho.size:]
        return (out, mag[: rho.size] + mag[rho.size:]) if magnitude else out
    out = np.zeros(rho.size, dtype=complex)
    outmag = np.zeros(rho.size)
    todo = np.arange(rho.size)
    level = level0
    prev = None
    while todo.size:
        dirs, w = sphere_rule(n, level)
        D = (rho[todo, None, None] * dirs[None, :, :]).reshape(-1, n)
        hv = h(D)
        if isinstance(hv, tuple):
            hv, mag = hv
        else:
            mag = hv
        hv = np.asarray(hv).reshape(todo.size, -1)
        vals = hv @ w
        absint = np.abs(np.asarray(mag)).reshape(todo.size, -1) @ w
        if prev is None:
            prev = vals
            level += 1
            continue
        noise = 1e-13 * absint
        err = np.abs(vals - prev)
        ok = (err <= np.maximum(np.maximum(atol, rtol * np.abs(vals)), noise)) | (level >= max_level)
        out[todo[ok]] = vals[ok]
        outmag[todo[ok]] = absint[ok]
        todo = todo[~ok]
        prev = vals[~ok]
        level += 1
    return (out, outmag) if magnitude else out


def shell_integral(f, center, eps, R, rtol=1e-11, atol=0.0, order=10, level0=4):
    """int_{eps < |y - center| < R} f(y) dy in polar coordinates about center.

    f takes an (N, n) array of points.  Radial panels are geometric from eps
    to R and adaptively bisected; the angular rule is refined per radius.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = center.size

    def h(D):
        return f(center[None, :] + D)

    val, _ = radial_integral(h, n, eps, R, rtol=rtol, atol=atol, order=order, level0=level0)
    return val


def geometric_edges(a, b, ratio=2.0):
    if a <= 0:
        raise ValueError("geometric edges need a > 0")
    edges = [a]
    while edges[-1] * ratio < b:
        edges.append(edges[-1] * ratio)
    edges.append(b)
    return np.array(edges)


def radial_integral(h, n, eps, R, rtol=1e-11, atol=0.0, order=10, level0=4, edges=None):
    """int_eps^R rho^{n-1} S(rho) d rho with S the angular integral of h."""
    if edges is None:
        edges = geometric_edges(eps, R) if eps > 0 else np.concatenate([[0.0], geometric_edges(R * 1e-12, R)])

    def A(rho):
        v, mag = angular_integral(h, rho, n, rtol=rtol * 0.1, atol=atol, level0=level0, magnitude=True)
        return rho ** (n - 1) * v, rho ** (n - 1) * mag

    vals, errs = adaptive_panels(A, edges, rtol=rtol, atol=atol, order=order)
    total = np.sum(vals)
    if np.all(vals.imag == 0):
        total = total.real
    return total, float(np.sum(errs))
