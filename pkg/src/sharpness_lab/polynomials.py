"""Multivariate polynomials, Chebyshev ridges and Markov-type checks.

Covers symmetric bodies V (gradient bounded through M(K, V*)) and the
orthant bodies C(V) = {u >= 0 : ||sqrt(u)||_V <= 1} carrying the weighted
gradient ``sqrt(u_j) dQ/du_j``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .convex_geometry import (ConvexBody, LpBall, VPolytope, extreme_points, gauge, gauge_many,
                              polar, reciprocal, s_condition, sample_boundary, sharp_constant,
                              support_argmax, support_max, width_diameter)
from .exp_type import gradient_norm_complex
from .report import VerificationReport, make_entry

MAX_EXPANDED_DEGREE = 16


@dataclass(eq=False)
class MultiPolynomial:
    """``sum_alpha c_alpha x^alpha`` stored as parallel arrays."""
    alphas: np.ndarray  # (T, m) nonnegative ints
    coeffs: np.ndarray  # (T,) complex

    def __post_init__(self):
        self.alphas = np.atleast_2d(np.asarray(self.alphas, dtype=np.int64))
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.alphas.shape[0] != self.coeffs.shape[0]:
            raise ValueError("one coefficient per multi-index")
        if np.any(self.alphas < 0):
            raise ValueError("multi-indices must be nonnegative")

    @classmethod
    def from_terms(cls, terms, dim=None):
        """``terms``: mapping ``alpha tuple -> coefficient``."""
        if not terms:
            if dim is None:
                raise ValueError("empty polynomial needs an explicit dimension")
            return cls(np.zeros((1, dim), dtype=np.int64), [0.0])
        keys = sorted(terms)
        return cls(np.array(keys), np.array([terms[k] for k in keys]))

    @classmethod
    def constant(cls, c, dim):
        return cls(np.zeros((1, dim), dtype=np.int64), [c])

    @property
    def dim(self) -> int:
        return self.alphas.shape[1]

    @property
    def degree(self) -> int:
        nz = np.abs(self.coeffs) > 0
        return int(self.alphas[nz].sum(axis=1).max()) if nz.any() else 0

    def is_real(self) -> bool:
        return not np.any(self.coeffs.imag)

    def _monomials(self, X):
        deg = int(self.alphas.max()) if self.alphas.size else 0
        out = np.ones((X.shape[0], self.alphas.shape[0]))
        for j in range(self.dim):
            powers = X[:, j, None] ** np.arange(deg + 1)
            out *= powers[:, self.alphas[:, j]]
        return out

    def value(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        out = self._monomials(X) @ self.coeffs
        return out[0] if single else out

    def derivative(self, j) -> "MultiPolynomial":
        a = self.alphas.copy()
        c = self.coeffs * a[:, j]
        a[:, j] = np.maximum(a[:, j] - 1, 0)
        return MultiPolynomial(a, c)

    def gradient(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        out = np.stack([self.derivative(j).value(X) for j in range(self.dim)], axis=1)
        return out[0] if single else out

    def as_dict(self):
        return {"dim": self.dim,
                "terms": [{"alpha": [int(v) for v in a], "re": float(c.real), "im": float(c.imag)}
                          for a, c in zip(self.alphas, self.coeffs)]}

    @classmethod
    def from_dict(cls, d):
        alphas = [t["alpha"] for t in d["terms"]]
        coeffs = [complex(t.get("re", 0.0), t.get("im", 0.0)) for t in d["terms"]]
        if not alphas:
            return cls.constant(0.0, int(d["dim"]))
        P = cls(np.array(alphas), np.array(coeffs))
        if "dim" in d and int(d["dim"]) != P.dim:
            raise ValueError("dim does not match the multi-indices")
        return P


def eval_poly(P, x):
    return P.value(x)


def grad_poly(P, x):
    return P.gradient(x)


# ------------------------------------------------------------ Chebyshev

def chebyshev(n: int) -> list:
    """Integer coefficients of T_n, lowest degree first."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    prev, cur = [1], [0, 1]
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def chebyshev_eval(n, t):
    """T_n by the three-term recurrence (valid off [-1, 1] as well)."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.ones_like(t)
    prev, cur = np.ones_like(t), t
    for _ in range(n - 1):
        prev, cur = cur, 2 * t * cur - prev
    return cur


def chebyshev_deriv_eval(n, t):
    """T_n' = n U_{n-1}."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.zeros_like(t)
    prev, cur = np.ones_like(t), 2 * t  # U_0, U_1
    if n == 1:
        return np.ones_like(t)
    for _ in range(n - 2):
        prev, cur = cur, 2 * t * cur - prev
    return n * cur


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(eq=False)
class RidgeChebyshev:
    """``C T_n((a, x))`` evaluated by composition, without expanding."""
    n: int
    a: np.ndarray
    C: complex = 1.0

    @property
    def dim(self):
        return len(self.a)

    @property
    def degree(self):
        return self.n

    def is_real(self):
        return complex(self.C).imag == 0

    def value(self, x):
        return self.C * chebyshev_eval(self.n, np.asarray(x, dtype=float) @ self.a)

    def gradient(self, x):
        d = self.C * chebyshev_deriv_eval(self.n, np.asarray(x, dtype=float) @ self.a)
        return np.multiply.outer(d, self.a)


def ridge_cheb(n, a_star, C=1.0):
    """``C T_n((a*, x))`` as a MultiPolynomial (multinomial expansion, n <= 16)."""
    a = np.asarray(a_star, dtype=float)
    if not np.any(a):
        raise ValueError("a* must be nonzero")
    if n > MAX_EXPANDED_DEGREE:
        return RidgeChebyshev(n, a, C)
    m = len(a)
    t = chebyshev(n)
    terms = {}
    for k, tk in enumerate(t):
        if tk == 0:
            continue
        for alpha in _compositions(k, m):
            multinom = math.factorial(k)
            for e in alpha:
                multinom //= math.factorial(e)
            coef = tk * multinom * float(np.prod(a ** np.array(alpha)))
            if coef != 0:
                terms[alpha] = terms.get(alpha, 0.0) + C * coef
    if not terms:
        return MultiPolynomial.constant(0.0, m)
    return MultiPolynomial.from_terms(terms)


# ------------------------------------------------------- sup norm on bodies

def _interior_samples(V, count, rng):
    if isinstance(V, VPolytope):
        P = V.matrix
        W = rng.dirichlet(np.ones(2 * len(P)), size=count)
        return W @ np.vstack([P, -P])
    U = sample_boundary(V, count, rng)
    return U * rng.uniform(size=(count, 1)) ** (1.0 / V.dim)


def body_samples(V: ConvexBody, resolution=64, n_boundary=256, seed=0, max_grid=1 << 15):
    """Points of V: a filtered bounding-box grid, boundary points and vertices.

    The grid is coarsened per axis so that it never exceeds ``max_grid`` nodes.
    """
    rng = np.random.default_rng(seed)
    m = V.dim
    pieces = []
    per_axis = min(resolution, int(round(max_grid ** (1.0 / m))))
    if isinstance(V, VPolytope):
        pieces.append(_interior_samples(V, min(resolution ** m, max_grid), rng))
    else:
        radii = np.array([support_max(V, e) for e in np.eye(m)])
        ticks = [np.linspace(-r, r, per_axis) for r in radii]
        G = np.stack(np.meshgrid(*ticks, indexing="ij"), axis=-1).reshape(-1, m)
        pieces.append(G[gauge_many(V, G) <= 1.0])
    pieces.append(sample_boundary(V, n_boundary, rng))
    verts = extreme_points(V)
    if verts is not None:
        verts = verts / gauge_many(V, verts)[:, None]
        pieces.append(np.vstack([verts, -verts]))
    return np.vstack(pieces)


def _pattern_refine(fun, V, x, step, min_step=1e-11, max_evals=4000):
    """Coordinate pattern search for a maximum of fun over V."""
    x = np.array(x, dtype=float)
    best = fun(x)
    evals = 0
    m = len(x)
    while step > min_step and evals < max_evals:
        improved = False
        for j in range(m):
            for s in (step, -step):
                z = x.copy()
                z[j] += s
                g = gauge(V, z)
                if g > 1.0:
                    z /= g
                val = fun(z)
                evals += 1
                if val > best:
                    best, x, improved = val, z, True
        if not improved:
            step *= 0.5
    return best, x


def sup_norm_on_body(P, V: ConvexBody, resolution=64, seed=0, starts=4, samples=None):
    """Lower-bound estimate of ``sup_{x in V} |P(x)|`` with its argmax."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    X = body_samples(V, resolution, seed=seed) if samples is None else samples
    vals = np.abs(P.value(X))
    order = np.argsort(-vals, kind="stable")[:starts]
    radius = max(support_max(V, e) for e in np.eye(V.dim))
    step = 2 * radius / resolution

    def absval(z):
        return float(abs(P.value(z)))

    best, arg = -1.0, None
    for i in order:
        val, x = _pattern_refine(absval, V, X[i], step)
        if val > best:
            best, arg = val, x
    return best, arg


# ------------------------------------------------------- Markov checks

def _trial_points(V, n_points, rng):
    half = n_points // 2
    return np.vstack([sample_boundary(V, half, rng), _interior_samples(V, n_points - half, rng)])


def markov_check(P, K: ConvexBody, V: ConvexBody, points=None, n_points=32, n_dirs=8,
                 resolution=64, seed=0, allowance=None, sup=None, samples=None,
                 instance="") -> VerificationReport:
    """Check (3.1) and (3.3) at trial points in V; (3.2) as well when K is the unit ball."""
    rng = np.random.default_rng(seed)
    n = P.degree
    m = V.dim
    allowance = 10.0 / resolution if allowance is None else allowance
    if sup is None:
        pnorm, xsup = sup_norm_on_body(P, V, resolution, seed=seed, samples=samples)
    else:
        pnorm, xsup = float(sup), None
    M = sharp_constant(K, polar(V)).value
    X = _trial_points(V, n_points, rng) if points is None else np.atleast_2d(points)
    if xsup is not None and points is None:
        X = np.vstack([X, xsup])
    dirs = rng.standard_normal((n_dirs, m))
    tag = "real" if P.is_real() else "complex"
    if n == 0:
        tag += "; vacuous"
    grads = np.atleast_2d(P.gradient(X))
    n2 = n * n

    worst31 = worst33 = None
    for x, g in zip(X, grads):
        gn, ystar = gradient_norm_complex(g, K, return_direction=True)
        Y = np.vstack([ystar, dirs])
        lhs = np.abs(Y.astype(complex) @ g)
        rhs = gauge_many(V, Y) * n2 * pnorm
        r = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 1e-12, np.inf, 0.0))
        i = int(np.argmax(r))
        if worst31 is None or r[i] > worst31[0]:
            worst31 = (r[i], lhs[i], rhs[i], x)
        if worst33 is None or gn > worst33[0]:
            worst33 = (gn, x)

    report = VerificationReport(instance)
    _, lhs, rhs, x = worst31
    report.entries.append(make_entry("3.1", lhs, rhs, allowance, witness=x, instance=instance,
                                     note=tag))
    gn, x = worst33
    report.entries.append(make_entry("3.3", gn, M * n2 * pnorm, allowance, witness=x,
                                     instance=instance, note=tag))
    if isinstance(K, LpBall) and K.mu == 2 and K.scale == 1.0:
        w, _ = width_diameter(V)
        report.entries.append(make_entry("3.2", gn, 2 * n2 / w * pnorm, allowance, witness=x,
                                         instance=instance, note=tag))
        report.entries.append(make_entry("1.2a", M, 2.0 / w, 1e-9, kind="eq", instance=instance,
                                         note="M(B,V*) = 2/w(V)"))
    return report


def markov_sharpness(n, K: ConvexBody, V: ConvexBody, C=1.0, tol=1e-6, resolution=64,
                     instance="") -> VerificationReport:
    """Equality in (3.3) for ``C T_n((a*, x))`` at the support points of a* in V."""
    wc = sharp_constant(K, polar(V))
    a = wc.witness_a
    P0 = ridge_cheb(n, a, C)
    exact = abs(C)  # (a*, x) sweeps exactly [-1, 1] over V
    report = VerificationReport(instance)
    x0 = support_argmax(V, a)
    for x in (x0, -x0):
        gn = gradient_norm_complex(P0.gradient(x), K)
        report.entries.append(make_entry("3.3", gn, wc.value * n * n * exact, tol, witness=x,
                                         kind="eq", instance=instance, note=f"ridge T_{n}"))
    est, _ = sup_norm_on_body(P0, V, resolution)
    report.entries.append(make_entry("3.3", est, exact, 10.0 / resolution, kind="eq",
                                     instance=instance, note="sup-norm estimate vs exact"))
    return report


def radial_chebyshev(n, m, R=1.0) -> MultiPolynomial:
    """``R T_n(|x|)`` for even n, a polynomial in ``|x|^2``."""
    if n % 2:
        raise ValueError("R T_n(|x|) is a polynomial only for even n")
    terms = {}
    for k, tk in enumerate(chebyshev(n)):
        if tk == 0:
            continue
        j = k // 2
        for beta in _compositions(j, m):
            multinom = math.factorial(j)
            for e in beta:
                multinom //= math.factorial(e)
            alpha = tuple(2 * e for e in beta)
            terms[alpha] = terms.get(alpha, 0.0) + R * tk * multinom
    return MultiPolynomial.from_terms(terms, dim=m)


def _search_radius(fun, grid=257):
    """Maximizer of fun on [0, 1]: grid scan then golden refinement."""
    r = np.linspace(0.0, 1.0, grid)
    vals = np.array([fun(t) for t in r])
    i = int(np.argmax(vals))
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, grid - 1)]
    g = (math.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    for _ in range(80):
        if fun(c) >= fun(d):
            hi, d = d, c
            c = hi - g * (hi - lo)
        else:
            lo, c = c, d
            d = lo + g * (hi - lo)
    best = max((lo, hi, r[i]), key=fun)
    return float(best)


def radial_markov_sharpness(n, m, R=1.0, tol=1e-6, instance="") -> VerificationReport:
    """Equality in (3.3) for ``R T_n(|x|)`` with K = V = B^m; the extremal
    radius is located by a 1-D search, not assumed."""
    P = radial_chebyshev(n, m, R)
    K = LpBall(2.0, m, 1.0)
    M = sharp_constant(K, polar(K)).value
    e1 = np.eye(m)[0]
    r = _search_radius(lambda t: gradient_norm_complex(P.gradient(t * e1), K))
    x0 = r * e1
    gn = gradient_norm_complex(P.gradient(x0), K)
    report = VerificationReport(instance)
    report.entries.append(make_entry("3.3", gn, M * n * n * abs(R), tol, witness=x0, kind="eq",
                                     instance=instance, note=f"radial T_{n}, radius {r:.12g}"))
    return report


# -------------------------------------------------- weighted (orthant) case

def weighted_gradient(Q, u):
    """``(sqrt(u_j) dQ/du_j)_j`` on the first orthant."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("weighted gradient needs u in the first orthant")
    return np.sqrt(u) * Q.gradient(u)


def lift_square(Q: MultiPolynomial) -> MultiPolynomial:
    """``P(x) = Q(x_1^2, ..., x_m^2)``."""
    return MultiPolynomial(2 * Q.alphas, Q.coeffs.copy())


@dataclass(frozen=True)
class WeightedBody:
    """``C(V) = {u >= 0 : gauge(V, sqrt(u)) <= 1}`` for V symmetric in every coordinate."""
    base: ConvexBody

    def __post_init__(self):
        if not s_condition(self.base):
            raise ValueError("base body is not symmetric about the coordinate hyperplanes")

    @property
    def dim(self):
        return self.base.dim

    def contains(self, u, tol=1e-12) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= 0) and gauge(self.base, np.sqrt(u)) <= 1 + tol)

    def sample(self, n, rng):
        return _trial_points(self.base, n, rng) ** 2


def closed_form_constant_310(mu, lam, m):
    """``M(V_mu, (V_lam)^*)`` with a witness a* for unit l_p balls."""
    s = reciprocal(mu) + reciprocal(lam)
    if s > 1:
        return m ** (s - 1.0), np.full(m, m ** (reciprocal(lam) - 1.0))
    a = np.zeros(m)
    a[0] = 1.0
    return 1.0, a


def a_star_axis(K: ConvexBody, V: ConvexBody, tol=1e-9):
    """Return ``(k, a*)`` when some a* in A(K, V*) lies on coordinate axis k, else None."""
    wc = sharp_constant(K, polar(V))
    M = wc.value
    a = wc.witness_a
    big = np.abs(a) > tol
    if big.sum() == 1:
        return int(np.flatnonzero(big)[0]), a
    for k in range(V.dim):
        e = np.zeros(V.dim)
        e[k] = 1.0
        cand = e / support_max(V, e)  # on the boundary of V*
        if abs(gauge(K, cand) - M) <= tol * max(1.0, M):
            return k, cand
    return None


def weighted_chebyshev(n, k, a_k, m, C=1.0) -> MultiPolynomial:
    """``C T_{2n}(a_k sqrt(u_k))``, a polynomial of degree n in u."""
    t = chebyshev(2 * n)
    terms = {}
    for j in range(n + 1):
        alpha = [0] * m
        alpha[k] = j
        coef = t[2 * j] * a_k ** (2 * j)
        if coef != 0:
            terms[tuple(alpha)] = C * coef
    return MultiPolynomial.from_terms(terms, dim=m)


def weighted_markov_check(Q, K: ConvexBody, W: WeightedBody, points=None, n_points=32,
                          resolution=64, seed=0, allowance=None, tol=1e-6, samples=None,
                          instance="") -> VerificationReport:
    """Check (3.7) on C(V); add the equality case when the a*-condition holds."""
    rng = np.random.default_rng(seed)
    V = W.base
    n = Q.degree
    allowance = 10.0 / resolution if allowance is None else allowance
    P = lift_square(Q)
    # sup over C(V) equals sup of the lifted polynomial over V
    qnorm, xsup = sup_norm_on_body(P, V, resolution, seed=seed, samples=samples)
    M = sharp_constant(K, polar(V)).value
    U = W.sample(n_points, rng) if points is None else np.atleast_2d(points)
    if points is None:
        U = np.vstack([U, xsup ** 2])
    rhs = 2 * M * n * n * qnorm
    worst = None
    for u in U:
        gn = gradient_norm_complex(weighted_gradient(Q, u), K)
        if worst is None or gn > worst[0]:
            worst = (gn, u)
    report = VerificationReport(instance)
    tag = ("real" if Q.is_real() else "complex") + ("; vacuous" if n == 0 else "")
    report.entries.append(make_entry("3.7", worst[0], rhs, allowance, witness=worst[1],
                                     instance=instance, note=tag))

    hit = a_star_axis(K, V)
    if hit is None:
        report.entries[-1].note += "; a*-condition absent, sharpness skipped"
    elif n > 0:
        report.extend(weighted_sharpness(n, K, W, tol=tol, instance=instance))
    return report


def weighted_sharpness(n, K, W: WeightedBody, C=1.0, tol=1e-6, instance="") -> VerificationReport:
    """Equality in (3.7) at ``u0 = a*_k^{-2} e_k`` for ``C T_{2n}(a*_k sqrt(u_k))``."""
    report = VerificationReport(instance)
    hit = a_star_axis(K, W.base)
    if hit is None:
        return report
    k, a = hit
    m = W.dim
    M = sharp_constant(K, polar(W.base)).value
    Q0 = weighted_chebyshev(n, k, a[k], m, C)
    u0 = np.zeros(m)
    u0[k] = a[k] ** -2
    gn = gradient_norm_complex(weighted_gradient(Q0, u0), K)
    report.entries.append(make_entry("3.7", gn, 2 * M * n * n * abs(C), tol, witness=u0,
                                     kind="eq", instance=instance, note=f"T_{2 * n} ridge, axis {k}"))
    return report


def nonconvexity_witness(W: WeightedBody, rng=None, tries=10_000):
    """Points u, v in C(V) whose midpoint leaves C(V); None if none is found."""
    m = W.dim
    for i, j in itertools.combinations(range(m), 2):
        u = np.zeros(m)
        v = np.zeros(m)
        u[i] = support_max(W.base, np.eye(m)[i]) ** 2
        v[j] = support_max(W.base, np.eye(m)[j]) ** 2
        if not W.contains((u + v) / 2):
            return u, v
    rng = rng or np.random.default_rng(0)
    for _ in range(tries):
        u, v = W.sample(2, rng)
        if W.contains(u) and W.contains(v) and not W.contains((u + v) / 2):
            return u, v
    return None
