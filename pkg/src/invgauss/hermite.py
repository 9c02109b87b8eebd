"""Hermite polynomials, weighted Hermite functions and finite expansions.

The weighted functions are Ht_k(x) = exp(-|x|^2) H_k(x), with H_k the
physicists' Hermite polynomial in each coordinate.  Expansions store the
coefficients c_k of f = sum c_k Ht_k in graded lexicographic order.
"""

import itertools
import json
import math
from functools import lru_cache

import numpy as np

from .quadrature import gauss_hermite


def hermite_poly(m, z):
    """H_m(z) by the three-term recurrence."""
    z = np.asarray(z, dtype=float)
    h0 = np.ones_like(z)
    if m == 0:
        return h0
    h1 = 2.0 * z
    for j in range(1, m):
        h0, h1 = h1, 2.0 * z * h1 - 2.0 * j * h0
    return h1


def hermite_table(K, z):
    """Array T with T[m] = H_m(z) for m = 0..K."""
    z = np.asarray(z, dtype=float)
    out = np.empty((K + 1,) + z.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = 2.0 * z
    for j in range(1, K):
        out[j + 1] = 2.0 * z * out[j] - 2.0 * j * out[j - 1]
    return out


def _log_norm_1d(m):
    # log sqrt(2^m m!)
    return 0.5 * (m * math.log(2.0) + math.lgamma(m + 1.0))


def normalized_table(K, z):
    """T[m] = H_m(z) / sqrt(2^m m!) (no weight), stable for large m."""
    z = np.asarray(z, dtype=float)
    out = np.empty((K + 1,) + z.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = math.sqrt(2.0) * z
    for m in range(1, K):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * z * out[m] - math.sqrt(m / (m + 1)) * out[m - 1]
    return out


def weighted_table(K, z):
    """T[m] = Ht_m(z) = exp(-z^2) H_m(z) for m = 0..K.

    Runs the recurrence on H_m exp(-z^2/2) / sqrt(2^m m!), which stays O(1),
    then restores the norm and the remaining half of the Gaussian.
    """
    z = np.asarray(z, dtype=float)
    half = np.exp(-0.5 * z * z)
    psi = normalized_table(K, z) * half
    scale = np.exp([_log_norm_1d(m) for m in range(K + 1)])
    scale = scale.reshape((K + 1,) + (1,) * z.ndim)
    return (psi * scale) * half


def hermite_tilde(k, x):
    """Ht_k at points x of shape (..., n) for a multi-index k of length n."""
    x = np.asarray(x, dtype=float)
    k = tuple(int(v) for v in k)
    if x.ndim == 0:
        x = x.reshape(1)
    out = np.ones(x.shape[:-1])
    for i, ki in enumerate(k):
        out = out * weighted_table(ki, x[..., i])[ki]
    return out


def hermite_multi(k, x):
    """Unweighted product H_k(x) = prod_i H_{k_i}(x_i)."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape[:-1])
    for i, ki in enumerate(k):
        out = out * hermite_poly(int(ki), x[..., i])
    return out


@lru_cache(maxsize=None)
def multi_indices(n, K):
    """All k in N^n with |k| <= K, by total degree then lexicographically descending."""
    out = []
    for d in range(K + 1):
        level = [k for k in itertools.product(range(d + 1), repeat=n) if sum(k) == d]
        level.sort(reverse=True)
        out.extend(level)
    return tuple(out)


def tilde_norm(k):
    """L^2(gamma_{-1}) norm of Ht_k: pi^{n/2} 2^{|k|/2} prod sqrt(k_i!)."""
    n = len(k)
    logv = 0.5 * n * math.log(math.pi) + 0.5 * sum(k) * math.log(2.0)
    logv += 0.5 * sum(math.lgamma(ki + 1.0) for ki in k)
    return math.exp(logv)


class HermiteExpansion:
    """Finite sum f = sum_{|k| <= K} c_k Ht_k on R^n."""

    def __init__(self, dim, degree, coeffs=None):
        self.dim = int(dim)
        self.degree = int(degree)
        self.indices = multi_indices(self.dim, self.degree)
        self.position = {k: i for i, k in enumerate(self.indices)}
        if coeffs is None:
            coeffs = np.zeros(len(self.indices), dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (len(self.indices),):
            raise ValueError("coefficient table has the wrong length")
        self.coeffs = coeffs.copy()

    @classmethod
    def from_dict(cls, dim, terms, degree=None):
        terms = {tuple(int(v) for v in k): complex(c) for k, c in terms.items()}
        if degree is None:
            degree = max((sum(k) for k in terms), default=0)
        out = cls(dim, degree)
        for k, c in terms.items():
            if len(k) != dim:
                raise ValueError(f"multi-index {k} does not have length {dim}")
            out.coeffs[out.position[k]] = c
        return out

    def coefficient(self, k):
        k = tuple(k)
        i = self.position.get(k)
        return 0j if i is None else self.coeffs[i]

    def items(self):
        return zip(self.indices, self.coeffs)

    def copy(self):
        return HermiteExpansion(self.dim, self.degree, self.coeffs)

    def with_degree(self, degree):
        out = HermiteExpansion(self.dim, degree)
        for k, c in self.items():
            if sum(k) <= degree:
                out.coeffs[out.position[k]] = c
        return out

    def coefficient_grid(self):
        """Dense array C[k_1, ..., k_n] (zero outside |k| <= K)."""
        C = np.zeros((self.degree + 1,) * self.dim, dtype=complex)
        for k, c in self.items():
            C[k] = c
        return C

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if x.ndim == 0 or (single and self.dim == 1 and x.shape[0] != 1):
            x = x.reshape(-1, 1)
            single = False
        pts = x.reshape(-1, self.dim)
        tables = [weighted_table(self.degree, pts[:, i]) for i in range(self.dim)]
        C = self.coefficient_grid()
        if self.dim == 1:
            val = C @ tables[0]
        elif self.dim == 2:
            val = np.einsum("ab,an,bn->n", C, tables[0], tables[1])
        else:
            val = np.zeros(pts.shape[0], dtype=complex)
            for k, c in self.items():
                if c != 0:
                    term = np.ones(pts.shape[0])
                    for i, ki in enumerate(k):
                        term = term * tables[i][ki]
                    val = val + c * term
        return val[0] if single else val.reshape(x.shape[:-1])

    def norm(self):
        """L^2(gamma_{-1}) norm from the coefficients, with d gamma_{-1} = pi^{n/2} e^{|x|^2} dx."""
        return math.sqrt(sum(abs(c) ** 2 * tilde_norm(k) ** 2 for k, c in self.items()))

    def envelope(self):
        """(degree, bound) with |f(y)| <= bound * (1 + |y|)^degree * exp(-|y|^2)."""
        bound = 0.0
        for k, c in self.items():
            if c != 0:
                # |H_k(y)| <= prod 2^{k_i} (1 + |y|)^{k_i} * k_i! ... crude but safe
                b = 1.0
                for ki in k:
                    b *= sum(abs(v) for v in np.polynomial.hermite.herm2poly([0] * ki + [1]))
                bound += abs(c) * b
        return self.degree, bound

    def sup_estimate(self, radius=4.0, points=41):
        axes = [np.linspace(-radius, radius, points)] * self.dim
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return float(np.max(np.abs(self(grid))))

    def to_enveloped(self):
        """Rewrite as g(y) exp(-|y|^2) with g in monomials."""
        terms = {}
        for k, c in self.items():
            if c == 0:
                continue
            polys = [np.polynomial.hermite.herm2poly([0] * ki + [1]) for ki in k]
            for exps in itertools.product(*[range(len(p)) for p in polys]):
                v = c
                for p, e in zip(polys, exps):
                    v = v * p[e]
                if v != 0:
                    terms[exps] = terms.get(exps, 0j) + v
        return EnvelopedFunction(self.dim, [(e, v) for e, v in sorted(terms.items())])


class EnvelopedFunction:
    """f(y) = g(y) exp(-|y|^2) with g a polynomial given by monomial terms,
    or by a callable `sampler` returning g at an (m, n) array of points.

    A sampled g needs `bound = (d, B)` with |g(y)| <= B (1 + |y|)^d for the
    truncation radius of the principal-value engine.
    """

    def __init__(self, dim, terms=(), sampler=None, bound=None):
        self.dim = int(dim)
        self.sampler = sampler
        self.bound = bound
        if sampler is not None and bound is None:
            raise ValueError("a sampled payload needs a growth bound (degree, constant)")
        self.terms = []
        for exps, c in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dim or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent vector {exps}")
            self.terms.append((exps, complex(c)))

    @property
    def degree(self):
        return max((sum(e) for e, _ in self.terms), default=0)

    def poly(self, y):
        y = np.asarray(y, dtype=float)
        if self.sampler is not None:
            return np.asarray(self.sampler(y), dtype=complex)
        out = np.zeros(y.shape[:-1], dtype=complex)
        for exps, c in self.terms:
            term = np.full(y.shape[:-1], c)
            for i, e in enumerate(exps):
                if e:
                    term = term * y[..., i] ** e
            out = out + term
        return out

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if y.ndim == 1 and self.dim == 1 and y.shape[0] != 1:
            y = y[:, None]
        return self.poly(y) * np.exp(-np.sum(y * y, axis=-1))

    def envelope(self):
        if self.bound is not None:
            return int(self.bound[0]), float(self.bound[1])
        return self.degree, float(sum(abs(c) for _, c in self.terms))

    def to_json(self):
        if self.sampler is not None:
            raise ValueError("sampled payloads have no JSON form")
        terms = [
            {"exponents": list(e), "coeff_re": c.real, "coeff_im": c.imag} for e, c in self.terms
        ]
        return {"dim": self.dim, "terms": terms}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            dim = int(data["dim"])
            terms = [
                (t["exponents"], complex(float(t["coeff_re"]), float(t.get("coeff_im", 0.0))))
                for t in data["terms"]
            ]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed function description: {exc}") from None
        return cls(dim, terms)


class InsufficientOrder(ValueError):
    pass


def analyze(f, K, order=None, tail_tol=None):
    """Hermite coefficients c_k, |k| <= K, of f = g exp(-|y|^2).

    c_k = pi^{-n/2} / (2^{|k|} k!) * int g H_k exp(-|y|^2) dy, evaluated on a
    tensor Gauss-Hermite rule with `order` nodes per axis (default K + 12).
    `f` is an EnvelopedFunction, a HermiteExpansion, or a callable
    (dim attribute or single-dimension assumed) returning f itself.
    With `tail_tol`, InsufficientOrder is raised when a coefficient of the
    top degree K exceeds it, a sign that K or the order is too small.
    """
    n = f.dim
    q = order or K + 12
    nodes, weights = gauss_hermite(q)
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    Y = np.stack(grids, axis=-1).reshape(-1, n)
    if isinstance(f, EnvelopedFunction):
        G = f.poly(Y)
    else:
        G = np.asarray(f(Y), dtype=complex) * np.exp(np.sum(Y * Y, axis=-1))
    G = G.reshape((q,) * n)
    P = normalized_table(K, nodes)
    lognorm = np.array([_log_norm_1d(m) for m in range(K + 1)])
    P = P * np.exp(-lognorm)[:, None] * weights[None, :]
    # contract each axis with P: A[k_1..k_n] = sum_j P[k_1,j_1]...G[j_1..j_n]
    A = G
    for _ in range(n):
        A = np.tensordot(A, P, axes=([0], [1]))
    A = A * math.pi ** (-0.5 * n)
    out = HermiteExpansion(n, K)
    for i, k in enumerate(out.indices):
        out.coeffs[i] = A[k]
    if tail_tol is not None:
        top = max(abs(c) for k, c in out.items() if sum(k) == K)
        if top > tail_tol:
            raise InsufficientOrder(f"top-degree coefficient {top:.3g} exceeds {tail_tol:.3g}")
    return out


def synthesize(expansion, x):
    return expansion(x)
