"""Principal-value application of singular kernels on truncated shells.

The operator value at x is the limit of shell integrals over
eps < |x - y| < R, plus a multiple of f(x).  Inside the ball of radius
rho0 = min(1, sqrt(m(x))) the kernel is paired with its classical part
C(x, y): since C has zero mean on spheres (Riesz) or a known shell integral
(imaginary powers), K f - C f(x) can be integrated instead of K f and is
absolutely integrable at the diagonal.  Shell values on the ladder
eps_j = rho0 2^{-j} are therefore exact partial sums of one convergent
radial integral; the limit adds the innermost ball by graded panels.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .quadrature import adaptive_panels, angular_integral
from .regions import local_radius, m_scale

KINDS = ("riesz", "riesz_bar", "neg_power", "kbar", "imaginary")


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    dim: int
    alpha: tuple = None
    beta: float = None
    gamma: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind in ("riesz", "riesz_bar"):
            if self.alpha is None or len(self.alpha) != self.dim or sum(self.alpha) == 0:
                raise ValueError("a nonzero multi-index of length dim is required")
            object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        if self.kind in ("neg_power", "kbar") and not (self.beta and self.beta > 0):
            raise ValueError("beta > 0 is required")
        if self.kind == "imaginary" and not self.gamma:
            raise ValueError("a nonzero gamma is required")

    def label(self):
        if self.alpha is not None:
            return f"{self.kind}[{','.join(map(str, self.alpha))}]"
        if self.beta is not None:
            return f"{self.kind}[{self.beta:g}]"
        return f"{self.kind}[{self.gamma:g}]"

    def kernel(self, X, D):
        if self.kind == "riesz":
            return K.riesz_kernel(self.alpha, X, None, d=D)
        if self.kind == "riesz_bar":
            return K.riesz_bar_kernel(self.alpha, X, None, d=D)
        if self.kind == "neg_power":
            return K.neg_power_kernel(self.beta, X, None, d=D)
        if self.kind == "kbar":
            return K.kbar_kernel(self.beta, X, None, d=D)
        return K.imaginary_kernel(self.gamma, X, None, d=D)

    def classical(self, D):
        """Local singular part C(x, x + D), or None when K is integrable."""
        if self.absolutely_convergent:
            return None
        if self.kind == "riesz":
            return K.classical_riesz_closed(self.alpha, -D)
        if self.kind == "riesz_bar":
            return 2.0 ** (-sum(self.alpha)) * K.classical_riesz_closed(self.alpha, D)
        return K.classical_imaginary_kernel(self.gamma, D)

    @property
    def absolutely_convergent(self):
        if self.kind in ("neg_power", "kbar"):
            return True
        if self.kind in ("riesz", "riesz_bar"):
            return self.dim == 1 and self.alpha[0] % 2 == 0
        return False

    def constant(self):
        if self.kind == "riesz":
            return K.riesz_constant(self.alpha)
        if self.kind == "riesz_bar":
            return K.riesz_bar_constant(self.alpha)
        return 0.0

    def far_width(self, x):
        # the product kernel * f decays like exp(-(|y| - |x|)^2) (Tbar kernels: exp(-(|y| - 2|x|)^2))
        r = float(np.linalg.norm(x))
        return 2.0 * r if self.kind in ("riesz_bar", "kbar") else r


def kernel_spec(kind, dim, param):
    """Build a KernelSpec from a parameter: multi-index for Riesz kernels, real otherwise."""
    if kind in ("riesz", "riesz_bar"):
        return KernelSpec(kind, dim, alpha=tuple(param))
    if kind in ("neg_power", "kbar"):
        return KernelSpec(kind, dim, beta=float(param))
    return KernelSpec(kind, dim, gamma=float(param))


@dataclass
class PVResult:
    value: complex
    epsilon_sequence: list = field(default_factory=list)
    shell_values: list = field(default_factory=list)
    corrected_values: list = field(default_factory=list)
    extrapolation_error: float = 0.0
    converged: bool = True
    richardson_value: complex = None
    constant: float = 0.0
    outer_radius: float = 0.0


def _envelope(f):
    if hasattr(f, "envelope"):
        return f.envelope()
    return 10, 10.0


def outer_radius(f, x, tol, width=None):
    """Radius R beyond which |tail| < tol / 10 for an enveloped integrand."""
    deg, bound = _envelope(f)
    r0 = float(np.linalg.norm(x)) if width is None else width
    n = np.size(x)
    r = 3.0
    for _ in range(50):
        rr = r0 + r
        need = math.log(10.0 * max(bound, 1e-300) / tol) + (deg + n + 4) * math.log(2.0 + rr)
        r_new = math.sqrt(max(need, 1.0))
        if abs(r_new - r) < 1e-6:
            break
        r = r_new
    return r0 + r


def richardson(eps, values):
    """Limit of values(eps) as eps -> 0 on a geometric ladder (ratio 2).

    The order p is read off the ratio of consecutive differences and one
    elimination step is applied per level; returns (limit, error estimate).
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 3:
        return (v[-1] if v.size else 0j), float("inf")
    d = np.diff(v)
    with np.errstate(all="ignore"):
        ratio = np.abs(d[-1] / d[-2]) if d[-2] != 0 else 0.5
    ratio = min(max(ratio, 1e-6), 0.95)
    limit = v[-1] + d[-1] * ratio / (1.0 - ratio)
    prev = v[-2] + d[-2] * ratio / (1.0 - ratio)
    return limit, float(abs(limit - prev))


class _Engine:
    """Radial panel integration of one kernel against one function at one point."""

    def __init__(self, spec, f, x, tol):
        self.spec = spec
        self.f = f
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.x.size != spec.dim:
            raise ValueError("point dimension does not match the kernel")
        self.n = spec.dim
        self.tol = tol
        self.fx = complex(np.asarray(f(self.x[None, :]))[0])
        self.rho0 = float(min(1.0, math.sqrt(m_scale(self.x))))
        self.R = max(outer_radius(f, self.x, tol, spec.far_width(self.x)), 4.0 * self.rho0)
        self.split = not spec.absolutely_convergent

    def integrand(self, D, local):
        X = np.broadcast_to(self.x, D.shape)
        fy = np.asarray(self.f(X + D))
        v = self.spec.kernel(X, D) * fy
        if local and self.split:
            mag = np.abs(v)
            v = v - self.spec.classical(D) * self.fx
            return v, mag
        return v

    def panels(self, edges):
        """Integrals of rho^{n-1} times the angular integral over each panel."""
        n = self.n
        rtol = min(self.tol * 1e-2, 1e-9)
        atol = self.tol * 1e-4 / len(edges)
        out = np.zeros(len(edges) - 1, dtype=complex)
        err = np.zeros(len(edges) - 1)
        loc = edges[1:] <= self.rho0 * (1 + 1e-12)
        for mask, local in ((loc, True), (~loc, False)):
            idx = np.nonzero(mask)[0]
            if idx.size == 0:
                continue
            # consecutive panels share edges, so integrate each run separately
            runs = np.split(idx, np.nonzero(np.diff(idx) != 1)[0] + 1)
            for run in runs:
                e = edges[run[0]:run[-1] + 2]

                def A(rho, local=local):
                    h = lambda D: self.integrand(D, local)
                    return rho ** (n - 1) * angular_integral(h, rho, n, rtol=rtol * 0.1, atol=atol * 1e-2)

                v, er = adaptive_panels(A, e, rtol=rtol, atol=atol, order=10, max_depth=30)
                out[run] = v
                err[run] = er
        return out, err

    def classical_shell(self, eps):
        """Integral of C(x, y) f(x) over eps < |x - y| < rho0 (zero unless imaginary)."""
        if self.spec.kind != "imaginary" or eps >= self.rho0:
            return 0j
        g = self.spec.gamma
        return self.fx * (K.alpha_eps(g, self.n, self.rho0) - K.alpha_eps(g, self.n, eps))


def _edges(points, rho0, R):
    pts = sorted(set(float(p) for p in points if 0 < p < R) | {rho0, R})
    out = [pts[0]]
    for p in pts[1:]:
        # geometric refinement of long outer gaps
        while p > 2.0 * out[-1] and out[-1] >= rho0:
            out.append(2.0 * out[-1])
        out.append(p)
    return np.array(sorted(set(out)))


def pv_apply(spec, f, x, tol=1e-8, depth=12, inner_levels=24):
    """Principal value of f at x under the kernel `spec` plus its constant term."""
    if not 0 <= depth <= 12:
        raise ValueError("ladder depth must be between 0 and 12")
    eng = _Engine(spec, f, x, tol)
    rho0, R = eng.rho0, eng.R
    const = spec.constant() if spec.kind in ("riesz", "riesz_bar") else 0.0
    if spec.absolutely_convergent:
        inner = [rho0 * 2.0 ** (-j) for j in range(1, 40)]
        edges = np.concatenate([[0.0], _edges(inner, rho0, R)])
        vals, errs = eng.panels(edges)
        total = np.sum(vals)
        value = total + const * eng.fx
        err = float(np.sum(errs))
        return PVResult(value=complex(value), extrapolation_error=err, converged=err <= tol,
                        constant=const, outer_radius=R)
    ladder = [rho0 * 2.0 ** (-j) for j in range(depth + 1)]
    eps_min = ladder[-1]
    inner = [eps_min * 2.0 ** (-j) for j in range(1, inner_levels + 1)]
    edges = np.concatenate([[0.0], _edges(ladder + inner, rho0, R)])
    vals, errs = eng.panels(edges)
    # shell value at eps = sum of panels above eps
    shells, corrected = [], []
    for e in ladder:
        k = int(np.searchsorted(edges, e * (1 - 1e-12)))
        s = np.sum(vals[k:]) + eng.classical_shell(e)
        shells.append(complex(s))
        if spec.kind == "imaginary":
            corrected.append(complex(s + K.alpha_eps(spec.gamma, eng.n, e) * eng.fx))
        else:
            corrected.append(complex(s + const * eng.fx))
    total = np.sum(vals)
    if spec.kind == "imaginary":
        limit = total + eng.fx * K.alpha_eps(spec.gamma, eng.n, rho0)
    else:
        limit = total + const * eng.fx
    # error: quadrature estimates plus the size of the innermost completed panel
    innermost = abs(vals[0])
    err = float(np.sum(errs)) + innermost
    rich, _ = richardson(ladder, corrected)
    return PVResult(
        value=complex(limit),
        epsilon_sequence=ladder,
        shell_values=shells,
        corrected_values=corrected,
        extrapolation_error=err,
        converged=err <= tol,
        richardson_value=complex(rich),
        constant=const,
        outer_radius=R,
    )


def shell_values(spec, f, x, eps_grid, tol=1e-8):
    """Truncated integrals int_{|x-y| > eps} K(x, y) f(y) dy for each eps (no correction)."""
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid:
        raise ValueError("empty truncation grid")
    if min(eps_grid) <= 0:
        raise ValueError("truncation radii must be positive")
    eng = _Engine(spec, f, x, tol)
    fixed = [eng.rho0 * 2.0 ** (-j) for j in range(1, 4)]
    out = []
    for e in eps_grid:
        # each value depends on its own radius only, so results do not move when the grid changes
        edges = _edges([e] + fixed, eng.rho0, eng.R)
        edges = edges[edges >= e * (1 - 1e-12)]
        vals, _ = eng.panels(edges)
        out.append(complex(np.sum(vals) + eng.classical_shell(e)))
    return out


def maximal_apply(spec, f, x, eps_grid, tol=1e-8):
    """max over the grid of |int_{|x-y| > eps} K(x, y) f(y) dy|, a lower bound for the sup over eps > 0."""
    return float(max(abs(v) for v in shell_values(spec, f, x, eps_grid, tol)))


def split_apply(spec, f, x, beta=1.0, tol=1e-8):
    """(local, global) parts over N_beta and its complement; they sum to pv_apply."""
    eng = _Engine(spec, f, x, tol)
    rb = float(local_radius(eng.x, beta))
    rho0, R = eng.rho0, max(eng.R, 2 * rb)
    eng.R = R
    inner = [rho0 * 2.0 ** (-j) for j in range(1, 40)]
    edges = np.concatenate([[0.0], _edges(inner + [rb], rho0, R)])
    vals, _ = eng.panels(edges)
    k = int(np.searchsorted(edges, rb * (1 - 1e-12)))
    const = spec.constant() if spec.kind in ("riesz", "riesz_bar") else 0.0
    local = np.sum(vals[:k]) + const * eng.fx
    glob = np.sum(vals[k:])
    if spec.kind == "imaginary":
        # analytic shell integral of the classical part, split at min(rb, rho0)
        a_split = K.alpha_eps(spec.gamma, eng.n, min(rho0, rb))
        local = local + eng.fx * a_split
        glob = glob + eng.fx * (K.alpha_eps(spec.gamma, eng.n, rho0) - a_split)
    return complex(local), complex(glob)
