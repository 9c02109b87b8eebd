"""Kernels of negative powers, Riesz transforms and imaginary powers of the
inverse Gaussian generators, their classical (translation invariant)
counterparts, the constants c_alpha and the imaginary-power correction.

Every non-classical kernel is an integral over t in (0, inf) of a Mehler
type expression.  They are evaluated with the trapezoid rule in u = log t:
the integrand then decays doubly exponentially at both ends and is analytic
in a strip, so the rule converges geometrically in the step.  Points are
grouped by |x - y| so the lower cut-off of each group matches its scale.
"""

import math

import numpy as np
from scipy.special import erfc

from .gamma import complex_gamma, rgamma
from .hermite import hermite_multi, weighted_table
from .quadrature import (
    adaptive_integral,
    gauss_legendre,
    integrate_time,
    log_time_rule,
)
from .semigroup import (
    classical_heat,
    classical_heat_dt,
    delta_dx_tbar,
    mehler_bar,
    mehler_dt,
    mehler_dx,
)

LOG_STEP = 0.15
T_MAX = 60.0
# integrand is below exp(-125) of its scale when t < CUT * |x - y|^2
CUT = 1e-3


def _as_pairs(x, y, d=None):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if y.ndim == 0:
        y = y.reshape(1)
    if d is None:
        X, Y = np.broadcast_arrays(x, y)
        D = Y - X
    else:
        X, D = np.broadcast_arrays(x, np.asarray(d, dtype=float))
        Y = X + D
    shape = X.shape[:-1]
    n = X.shape[-1]
    return X.reshape(-1, n), Y.reshape(-1, n), D.reshape(-1, n), shape


def time_quadrature(integrand, X, Y, D, diag_power=None, diag_coef=0.0, h=LOG_STEP, t_max=T_MAX, chunk=2048,
                    subtract=None):
    """sum_k h t_k g(t_k) over u = log t for each pair.

    integrand(t, X, Y, D) takes t of shape (K, 1) and pair arrays of shape
    (1, m, n) and returns (K, m) values of the t-integrand.  Pairs with
    X == Y are only finite when diag_power = beta - n/2 > 0; then the part
    below 1e-12 is added from the leading term diag_coef * t^{diag_power - 1}.

    subtract = (c, beta) removes c(X) t^{beta-1} from the integrand, a term
    that neither vanishes as t -> 0 nor is integrable at infinity by itself.
    It is switched on smoothly, by psi(u) = (1 + erf((u - u_c) / SIGMA)) / 2
    with u_c well above log t_lo, so the trapezoid sum stays spectrally
    accurate; the part (1 - psi) c t^{beta-1} is integrated in closed form.
    """
    rho = np.sqrt(np.sum(D * D, axis=-1))
    out = np.zeros(len(rho), dtype=complex)
    order = np.argsort(rho, kind="stable")
    zero = order[rho[order] == 0]
    pos = order[rho[order] > 0]
    if zero.size:
        if diag_power is None or diag_power <= 0:
            out[zero] = np.nan
        else:
            t_lo = 1e-12 ** (1.0 / min(diag_power, 1.0))
            for i in range(0, zero.size, chunk):
                idx = zero[i:i + chunk]
                out[idx] = _sum_with_subtraction(integrand, t_lo, t_max, h, X[idx], Y[idx], D[idx], subtract)
                out[idx] += diag_coef * t_lo ** diag_power / diag_power
    start = 0
    while start < pos.size:
        r0 = rho[pos[start]]
        stop = start + 1
        while stop < pos.size and stop - start < chunk and rho[pos[stop]] <= 100.0 * r0:
            stop += 1
        idx = pos[start:stop]
        t_lo = max(CUT * r0 * r0, 1e-280)
        out[idx] = _sum_with_subtraction(integrand, t_lo, t_max, h, X[idx], Y[idx], D[idx], subtract)
        start = stop
    return out


SIGMA = 0.5
SWITCH = 3.5  # erfc(SWITCH / SIGMA) / 2 ~ 2e-23


def _sum_with_subtraction(integrand, t_lo, t_max, h, X, Y, D, subtract):
    if subtract is None:
        t, w = log_time_rule(t_lo, t_max, h)
        return w @ integrand(t[:, None], X[None], Y[None], D[None])
    c, beta = subtract
    u_c = math.log(t_lo) + SWITCH
    t_max = max(t_max, math.exp(u_c + SWITCH))
    t, w = log_time_rule(t_lo, t_max, h)
    psi = 0.5 * erfc(-(np.log(t) - u_c) / SIGMA)
    cx = c(X)
    g = integrand(t[:, None], X[None], Y[None], D[None]) - (psi * t ** (beta - 1.0))[:, None] * cx[None, :]
    closed = math.exp(beta * u_c + 0.25 * (beta * SIGMA) ** 2) / beta
    return w @ g - closed * cx


def _finish(v, shape, real=True):
    v = v.real if real else v
    v = v.reshape(shape)
    return v[()] if v.ndim == 0 else v


# ---------------------------------------------------------------- kernels


def riesz_kernel(alpha, x, y, d=None):
    """R_alpha(x, y) = Gamma(|alpha|/2)^{-1} int_0^inf d_x^alpha T_t(x, y) t^{|alpha|/2 - 1} dt."""
    alpha = tuple(int(a) for a in alpha)
    X, Y, D, shape = _as_pairs(x, y, d)
    b = 0.5 * sum(alpha)
    c = 1.0 / math.gamma(b)

    def g(t, X, Y, D):
        return c * mehler_dx(alpha, t, X, Y, D) * t ** (b - 1.0)

    return _finish(time_quadrature(g, X, Y, D), shape)


def riesz_bar_kernel(alpha, x, y, d=None):
    """Rbar_alpha(x, y) = Gamma(|alpha|/2)^{-1} int_0^inf delta_x^alpha Tbar_t(x, y) t^{|alpha|/2 - 1} dt."""
    alpha = tuple(int(a) for a in alpha)
    X, Y, D, shape = _as_pairs(x, y, d)
    b = 0.5 * sum(alpha)
    c = 1.0 / math.gamma(b)

    def g(t, X, Y, D):
        return c * delta_dx_tbar(alpha, t, X, Y, D) * t ** (b - 1.0)

    return _finish(time_quadrature(g, X, Y, D), shape)


def neg_power_kernel(beta, x, y, d=None):
    """Kernel of A^{-beta}, from the integral over s = 1 - e^{-2t} in (0, 1):

    pi^{-n/2} 2^{-beta} / Gamma(beta) e^{|y|^2 - |x|^2}
      int_0^1 e^{-|y - x sqrt(1-s)|^2 / s} s^{-n/2} (1-s)^{n/2-1} (-log(1-s))^{beta-1} ds.
    """
    X, Y, D, shape = _as_pairs(x, y, d)
    n = X.shape[-1]
    c = math.pi ** (-0.5 * n) * 2.0 ** (-beta) / math.gamma(beta)

    def g(t, X, Y, D):
        s = -np.expm1(-2.0 * t)
        one_minus_s = np.exp(-2.0 * t)
        q = -np.expm1(-t)
        w = D + q[..., None] * X  # y - x sqrt(1 - s)
        expo = 2.0 * np.sum(X * D, axis=-1) + np.sum(D * D, axis=-1) - np.sum(w * w, axis=-1) / s
        dens = np.exp(expo) * s ** (-0.5 * n) * one_minus_s ** (0.5 * n - 1.0) * (2.0 * t) ** (beta - 1.0)
        return c * dens * 2.0 * one_minus_s  # ds = 2 (1 - s) dt

    coef = (2.0 * math.pi) ** (-0.5 * n) / math.gamma(beta)
    v = time_quadrature(g, X, Y, D, diag_power=beta - 0.5 * n, diag_coef=coef)
    return _finish(v, shape)


def kbar_kernel(beta, x, y, d=None):
    """Kernel of Abar^{-beta} restricted to the complement of the ground state:
    Gamma(beta)^{-1} int (Tbar_t(x, y) - pi^{-n/2} e^{-|x|^2}) t^{beta-1} dt."""
    X, Y, D, shape = _as_pairs(x, y, d)
    n = X.shape[-1]
    c = 1.0 / math.gamma(beta)

    def ground(X):
        return c * math.pi ** (-0.5 * n) * np.exp(-np.sum(X * X, axis=-1))

    def g(t, X, Y, D):
        return c * mehler_bar(t, X, Y, D) * t ** (beta - 1.0)

    coef = (2.0 * math.pi) ** (-0.5 * n) / math.gamma(beta)
    v = time_quadrature(g, X, Y, D, diag_power=beta - 0.5 * n, diag_coef=coef, subtract=(ground, beta))
    return _finish(v, shape)


def imaginary_kernel(gamma, x, y, d=None):
    """K_gamma(x, y) = -int_0^inf phi(t) d/dt T_t(x, y) dt, phi(t) = t^{-i gamma} / Gamma(1 - i gamma)."""
    if gamma == 0:
        raise ValueError("gamma = 0 gives the identity, which has no kernel")
    X, Y, D, shape = _as_pairs(x, y, d)
    c = rgamma(1.0 - 1j * gamma)

    def g(t, X, Y, D):
        return -c * np.exp(-1j * gamma * np.log(t)) * mehler_dt(t, X, Y, D)

    return _finish(time_quadrature(g, X, Y, D), shape, real=False)


# ------------------------------------------------------- classical kernels


def classical_riesz_kernel(alpha, z, tol=1e-13):
    """Translation-invariant Riesz kernel Gamma(|alpha|/2)^{-1} int d^alpha W_t(z) t^{|alpha|/2-1} dt.

    With s = |z|^2 / (2t) this is
    (-1)^{|alpha|} pi^{-n/2} 2^{-|alpha|/2} |z|^{-n} / Gamma(|alpha|/2)
        * int_0^inf H_alpha(omega sqrt(s)) e^{-s} s^{n/2-1} ds,  omega = z / |z|,
    evaluated by adaptive quadrature.
    """
    alpha = tuple(int(a) for a in alpha)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = z.size
    r = float(np.linalg.norm(z))
    om = z / r
    m = sum(alpha)

    def f(s):
        s = np.asarray(s, dtype=float)
        return hermite_multi(alpha, om[None, :] * np.sqrt(s)[:, None]) * np.exp(-s) * s ** (0.5 * n - 1.0)

    I = integrate_time(f, p=0.5 * n, lam=1.0, tol=tol)
    return (-1) ** m * math.pi ** (-0.5 * n) * 2.0 ** (-0.5 * m) * r ** (-n) / math.gamma(0.5 * m) * I


def _hermite_coeffs(m):
    # coefficients of H_m in powers of its argument
    return np.polynomial.hermite.herm2poly([0] * m + [1])


def classical_riesz_closed(alpha, z):
    """Same kernel through the moments int s^{p} e^{-s} ds = Gamma(p + 1); vectorised over z."""
    alpha = tuple(int(a) for a in alpha)
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    m = sum(alpha)
    r = np.sqrt(np.sum(z * z, axis=-1))
    om = z / r[..., None]
    polys = [_hermite_coeffs(a) for a in alpha]
    total = np.zeros(r.shape)
    # H_alpha(om sqrt(s)) = sum_g c_g om^g s^{|g|/2}
    for gidx in np.ndindex(*[len(p) for p in polys]):
        coef = 1.0
        for p, gi in zip(polys, gidx):
            coef *= p[gi]
        if coef == 0:
            continue
        mono = np.ones(r.shape)
        for i, gi in enumerate(gidx):
            mono = mono * om[..., i] ** gi
        total = total + coef * mono * math.gamma(0.5 * (sum(gidx) + n))
    return (-1) ** m * math.pi ** (-0.5 * n) * 2.0 ** (-0.5 * m) / math.gamma(0.5 * m) * total * r ** (-n)


def euclid_riesz_first(i, z):
    """First-order classical kernel -sqrt(2) Gamma((n+1)/2) pi^{-(n+1)/2} z_i / |z|^{n+1}."""
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    r = np.sqrt(np.sum(z * z, axis=-1))
    return -math.sqrt(2.0) * math.gamma(0.5 * (n + 1)) * math.pi ** (-0.5 * (n + 1)) * z[..., i] / r ** (n + 1)


def classical_imaginary_kernel(gamma, z):
    """-int phi(t) d/dt W_t(z) dt = 2^{i gamma} Gamma(n/2 + i gamma) / (Gamma(-i gamma) pi^{n/2}) |z|^{-n - 2 i gamma}."""
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    r = np.sqrt(np.sum(z * z, axis=-1))
    c = 2.0 ** (1j * gamma) * complex_gamma(0.5 * n + 1j * gamma) * rgamma(-1j * gamma) * math.pi ** (-0.5 * n)
    return c * np.exp((-n - 2j * gamma) * np.log(r))


def classical_imaginary_numeric(gamma, z, tol=1e-12):
    """The same kernel by quadrature of -phi(t) dW_t/dt in u = log t (reference route)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    r2 = float(z @ z)
    c = rgamma(1.0 - 1j * gamma)

    def f(u):
        t = np.exp(u)
        return -c * np.exp(-1j * gamma * u) * classical_heat_dt(t, np.broadcast_to(z, (len(t), z.size))) * t

    lo = math.log(r2) - 8.0
    hi = math.log(r2) + 60.0
    v, _ = adaptive_integral(f, lo, hi, rtol=tol)
    return complex(v)


# ------------------------------------------------------- constants


def riesz_constant(alpha):
    """Constant c_alpha in R_alpha f = PV int R_alpha(., y) f(y) dy + c_alpha f.

    Zero unless every alpha_i is even.  For n = 1 it is
    -Gamma(alpha/2)^{-1} 2^{1 - alpha/2} pi^{-1/2} int_0^inf Ht_{alpha-1}(sqrt s) ds / s.
    For n > 1 the coordinate carrying the derivative is split off and the
    remaining n - 1 coordinates run over the unit ball:
    -Gamma(|alpha|/2)^{-1} 2^{1 - |alpha|/2} pi^{-n/2}
      int_{|zb|<1} int_0^inf H_{alpha_1 - 1}(sqrt(s (1 - |zb|^2))) prod_{i>=2} H_{alpha_i}(z_i sqrt s)
        e^{-s} s^{(n-3)/2} ds dzb.
    """
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)
    m = sum(alpha)
    if m == 0:
        return 1.0
    if any(a % 2 for a in alpha):
        return 0.0
    pref = -1.0 / math.gamma(0.5 * m) * 2.0 ** (1.0 - 0.5 * m) * math.pi ** (-0.5 * n)
    if n == 1:
        a = alpha[0]

        def f(s):
            s = np.asarray(s, dtype=float)
            return weighted_table(a - 1, np.sqrt(s))[a - 1] / s

        return pref * integrate_time(f, p=0.5, lam=1.0, tol=1e-14)
    # move a nonzero entry to the front (the kernel is symmetric under permutations)
    j = next(i for i, a in enumerate(alpha) if a > 0)
    alpha = (alpha[j],) + alpha[:j] + alpha[j + 1:]
    a1, rest = alpha[0], alpha[1:]

    def inner(zb):
        # s-integral for a fixed point zb of the (n-1)-ball
        rad = max(1.0 - float(zb @ zb), 0.0)

        def f(s):
            s = np.asarray(s, dtype=float)
            v = np.polynomial.hermite.hermval(np.sqrt(s * rad), [0] * (a1 - 1) + [1])
            for zi, ai in zip(zb, rest):
                v = v * np.polynomial.hermite.hermval(zi * np.sqrt(s), [0] * ai + [1])
            return v * np.exp(-s) * s ** (0.5 * (n - 3))

        return integrate_time(f, p=0.5 * (n - 1), lam=1.0, tol=1e-14)

    total = 0.0
    if n == 2:
        # zb = sin(phi), phi in (-pi/2, pi/2)
        x, w = gauss_legendre(48)
        phi = 0.5 * math.pi * x
        for p, wi in zip(phi, w):
            total += 0.5 * math.pi * wi * math.cos(p) * inner(np.array([math.sin(p)]))
    elif n == 3:
        # zb = sin(th) (cos ph, sin ph), th in (0, pi/2)
        x, w = gauss_legendre(32)
        th = 0.25 * math.pi * (x + 1.0)
        M = 32
        for tk, wk in zip(th, w):
            for l in range(M):
                ph = 2.0 * math.pi * l / M
                zb = math.sin(tk) * np.array([math.cos(ph), math.sin(ph)])
                jac = math.sin(tk) * math.cos(tk)
                total += 0.25 * math.pi * wk * (2.0 * math.pi / M) * jac * inner(zb)
    else:
        raise ValueError("c_alpha is provided for n <= 3")
    return pref * total


def riesz_bar_constant(alpha):
    """Constant for the Rbar_alpha principal value: near the diagonal
    delta^alpha acts as (-1/2)^{|alpha|} d^alpha, so the constant is
    (-1/2)^{|alpha|} c_alpha."""
    alpha = tuple(int(a) for a in alpha)
    return (-0.5) ** sum(alpha) * riesz_constant(alpha)


# ------------------------------------------------------- imaginary powers


def phi_gamma(gamma, t):
    return np.exp(-1j * gamma * np.log(t)) * rgamma(1.0 - 1j * gamma)


def alpha_eps(gamma, n, eps, heat_scale=2.0):
    """Correction term for the imaginary-power principal value:
    (eps^2 / heat_scale)^{-i gamma} Gamma(n/2 + i gamma) / (Gamma(n/2) Gamma(1 - i gamma)).

    heat_scale = 2 matches a local heat kernel exp(-|z|^2 / (2t)), which is
    the one of this semigroup; heat_scale = 4 matches exp(-|z|^2 / (4t)).
    """
    eps = np.asarray(eps, dtype=float)
    g = complex_gamma(0.5 * n + 1j * gamma) * rgamma(1.0 - 1j * gamma) / math.gamma(0.5 * n)
    v = np.exp(-1j * gamma * np.log(eps * eps / heat_scale)) * g
    return v[()] if v.ndim == 0 else v


def alpha_eps_integral(gamma, n, eps, heat_scale=2.0, tol=1e-13):
    """Gamma(n/2)^{-1} int_0^inf phi(eps^2 / (heat_scale u)) e^{-u} u^{n/2-1} du by quadrature."""
    c = 1.0 / math.gamma(0.5 * n)

    def f(u):
        u = np.asarray(u, dtype=float)
        return c * phi_gamma(gamma, eps * eps / (heat_scale * u)) * np.exp(-u) * u ** (0.5 * n - 1.0)

    return complex(integrate_time(f, p=0.5 * n, lam=1.0, tol=tol))


# ------------------------------------------------------- radial profile


def radial_profile(x, y, r):
    """r^n (1 - r^2)^{-n/2} exp(-|x - r y|^2 / (1 - r^2)) for r in (0, 1)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.asarray(r, dtype=float)
    n = x.size
    v = x[None, :] - r[:, None] * y[None, :]
    s = 1.0 - r * r
    return np.exp(n * np.log(r) - 0.5 * n * np.log(s) - np.sum(v * v, axis=-1) / s)


def profile_sign_changes(x, y, points=10_000):
    """Number of sign changes of the r-derivative of radial_profile on a grid."""
    r = (np.arange(points) + 0.5) / points
    g = radial_profile(x, y, r)
    dg = np.diff(g)
    sg = np.sign(dg[np.abs(dg) > 1e-12 * np.max(g)])
    return int(np.sum(sg[1:] != sg[:-1]))


def profile_sup(x, y, points=10_000):
    r = (np.arange(points) + 0.5) / points
    return float(np.max(radial_profile(x, y, r)))
