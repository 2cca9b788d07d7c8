"""Symmetric convex bodies, gauge/support norms and the sharp constant M(K, V).

Three body families are supported, all centrally symmetric by construction:

* ``LpBall(mu, dim, scale)``  -- ``scale * {x : ||x||_mu <= 1}``
* ``HPolytope(rows)``         -- ``{x : |(a_i, x)| <= 1}``
* ``VPolytope(vertices)``     -- ``conv{+-v_i}``

Polarity maps each family into the set exactly, so ``polar`` never approximates.
"""
from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .simplex import lp_box_support

INF = math.inf

TOL_EXACT = 1e-9
TOL_LP = 1e-6


class BodyError(ValueError):
    """Invalid body description (rank deficiency, bad exponent, ...)."""


class WitnessError(ArithmeticError):
    """A witness failed its post-condition check."""


def conjugate(mu: float) -> float:
    """Hoelder conjugate exponent; 1 and inf are swapped explicitly."""
    if mu == 1:
        return INF
    if mu == INF:
        return 1.0
    return mu / (mu - 1.0)


def reciprocal(mu: float) -> float:
    return 0.0 if mu == INF else 1.0 / mu


def _as_rows(vectors) -> tuple:
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    return tuple(tuple(float(v) for v in row) for row in arr)


@dataclass(frozen=True, eq=False)
class LpBall:
    mu: float
    dim: int
    scale: float = 1.0

    def __post_init__(self):
        mu = INF if self.mu in ("inf", INF) else float(self.mu)
        object.__setattr__(self, "mu", mu)
        if not (mu >= 1):
            raise BodyError(f"exponent must lie in [1, inf], got {self.mu}")
        if int(self.dim) < 1:
            raise BodyError("dimension must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise BodyError("scale must be positive")
        object.__setattr__(self, "scale", float(self.scale))

    def __eq__(self, other):
        return (isinstance(other, LpBall) and self.dim == other.dim
                and (self.mu == other.mu or math.isclose(self.mu, other.mu, rel_tol=1e-12))
                and math.isclose(self.scale, other.scale, rel_tol=1e-12))

    def __hash__(self):
        return hash(("lp", self.dim))


@dataclass(frozen=True)
class HPolytope:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", _as_rows(self.rows))
        _check_rank(self.matrix, "rows")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    @property
    def dim(self) -> int:
        return len(self.rows[0])


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", _as_rows(self.vertices))
        _check_rank(self.matrix, "vertices")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])


ConvexBody = Union[LpBall, HPolytope, VPolytope]


def _check_rank(M, what):
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise BodyError(f"{what} must be a nonempty list of vectors")
    if not np.all(np.isfinite(M)):
        raise BodyError(f"{what} must be finite")
    if np.linalg.matrix_rank(M) < M.shape[1]:
        raise BodyError(f"{what} do not span R^{M.shape[1]}")


def unit_ball(m):
    return LpBall(2, m, 1.0)


def cube(m):
    return LpBall(INF, m, 1.0)


def octahedron(m):
    return LpBall(1, m, 1.0)


# ---------------------------------------------------------------- polarity

def polar(V: ConvexBody) -> ConvexBody:
    if isinstance(V, LpBall):
        return LpBall(conjugate(V.mu), V.dim, 1.0 / V.scale)
    if isinstance(V, HPolytope):
        return VPolytope(V.rows)
    if isinstance(V, VPolytope):
        return HPolytope(V.vertices)
    raise TypeError(f"not a convex body: {V!r}")


def scaled(V: ConvexBody, sigma: float) -> ConvexBody:
    """The body ``sigma * V``."""
    if isinstance(V, LpBall):
        return LpBall(V.mu, V.dim, V.scale * sigma)
    if isinstance(V, HPolytope):
        return HPolytope(V.matrix / sigma)
    return VPolytope(V.matrix * sigma)


# ------------------------------------------------------- support and gauge

def _lp_norm(X, p):
    X = np.abs(X)
    if p == INF:
        return X.max(axis=-1)
    if p == 1:
        return X.sum(axis=-1)
    if p == 2:
        return np.sqrt((X * X).sum(axis=-1))
    top = X.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return safe[..., 0] * ((X / safe) ** p).sum(axis=-1) ** (1.0 / p)


def lp_support(H: HPolytope, y):
    """Maximize ``(t, y)`` over H by the dense simplex. Returns ``(value, t)``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (H.dim,):
        raise ValueError("dimension mismatch")
    return lp_box_support(H.matrix, y)


def support_argmax(V: ConvexBody, y):
    """A point ``t in V`` maximizing ``(t, y)``; lies on the boundary of V."""
    y = np.asarray(y, dtype=float)
    m = V.dim
    if isinstance(V, LpBall):
        if not np.any(y):
            h = np.zeros(m)
            h[0] = 1.0
        elif V.mu == 1:
            j = int(np.argmax(np.abs(y)))
            h = np.zeros(m)
            h[j] = 1.0 if y[j] >= 0 else -1.0
        elif V.mu == INF:
            h = np.where(y >= 0, 1.0, -1.0)
        else:
            rho = conjugate(V.mu)
            w = np.abs(y) / np.abs(y).max()
            h = np.sign(y) * w ** (rho - 1.0)
            h /= _lp_norm(h, V.mu)
        return V.scale * h
    if isinstance(V, VPolytope):
        P = V.matrix
        vals = P @ y
        j = _first_max(np.abs(vals))
        return P[j] * (1.0 if vals[j] >= 0 else -1.0)
    _, t = lp_support(V, y)
    return t


def _first_max(values, rel=1e-12):
    values = np.asarray(values)
    top = values.max()
    return int(np.flatnonzero(values >= top - rel * abs(top))[0])


def support_max(V: ConvexBody, y) -> float:
    """``max_{t in V} |(t, y)|``, i.e. the norm of y with respect to the polar of V."""
    y = np.asarray(y, dtype=float)
    if y.shape != (V.dim,):
        raise ValueError("dimension mismatch")
    if isinstance(V, LpBall):
        return float(V.scale * _lp_norm(y, conjugate(V.mu)))
    if isinstance(V, VPolytope):
        return float(np.abs(V.matrix @ y).max())
    return float(lp_support(V, y)[0])


def gauge(V: ConvexBody, x) -> float:
    """Minkowski functional of V; equals ``support_max(polar(V), x)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (V.dim,):
        raise ValueError("dimension mismatch")
    if isinstance(V, LpBall):
        return float(_lp_norm(x, V.mu) / V.scale)
    if isinstance(V, HPolytope):
        return float(np.abs(V.matrix @ x).max())
    return support_max(polar(V), x)


def gauge_many(V: ConvexBody, X) -> np.ndarray:
    """Row-wise gauge of an (N, m) array."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(V, LpBall):
        return _lp_norm(X, V.mu) / V.scale
    if isinstance(V, HPolytope):
        return np.abs(X @ V.matrix.T).max(axis=1)
    P = polar(V)
    return np.array([lp_support(P, x)[0] for x in X])


def support_many(V: ConvexBody, Y) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if isinstance(V, LpBall):
        return V.scale * _lp_norm(Y, conjugate(V.mu))
    if isinstance(V, VPolytope):
        return np.abs(Y @ V.matrix.T).max(axis=1)
    return np.array([lp_support(V, y)[0] for y in Y])


def vectorized_gauge(V: ConvexBody) -> bool:
    return not isinstance(V, VPolytope)


def vectorized_support(V: ConvexBody) -> bool:
    return not isinstance(V, HPolytope)


def contains(V: ConvexBody, x, tol=1e-12) -> bool:
    return gauge(V, x) <= 1 + tol


def hpolytope_vertices_2d(H: HPolytope, tol=1e-10) -> np.ndarray:
    """Vertices of a planar H-polytope, one representative per +- pair."""
    if H.dim != 2:
        raise ValueError("planar polytopes only")
    A = H.matrix
    found = []
    for i, j in itertools.combinations(range(len(A)), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        for s in (1.0, -1.0):
            x = np.linalg.solve(M, np.array([1.0, s]))
            if np.abs(A @ x).max() <= 1 + tol:
                if not any(np.allclose(x, v, atol=1e-9) or np.allclose(x, -v, atol=1e-9)
                           for v in found):
                    found.append(x)
    return np.array(found)


def extreme_points(V: ConvexBody):
    """Finite vertex list (up to sign) when one is cheaply available, else None."""
    if isinstance(V, VPolytope):
        return V.matrix
    if isinstance(V, LpBall):
        m = V.dim
        if V.mu == 1:
            return V.scale * np.eye(m)
        if V.mu == INF and m <= 12:
            signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=m - 1)])
            return V.scale * signs
        return None
    if V.dim == 2:
        return hpolytope_vertices_2d(V)
    return None


# exponents q of the direction law sign(g)|g|^q: q < 1 crowds the diagonals,
# q > 1 the coordinate axes, where l_p extreme points sit
DIRECTION_POWERS = (1.0, 0.125, 8.0)


def sample_boundary(V: ConvexBody, n: int, rng) -> np.ndarray:
    """Boundary points ``t / gauge(V, t)`` for power-transformed Gaussian directions t."""
    G = rng.standard_normal((n, V.dim))
    q = np.array(DIRECTION_POWERS)[np.arange(n) % len(DIRECTION_POWERS)]
    T = np.sign(G) * np.abs(G) ** q[:, None]
    return T / gauge_many(V, T)[:, None]


# ------------------------------------------------------------ M(K, V)

@dataclass(frozen=True)
class WitnessedConstant:
    value: float
    witness_a: np.ndarray
    witness_b: np.ndarray
    method: str  # closed_form | vertex_enumeration | sampling
    lower_bound: bool = False

    def __post_init__(self):
        # shared through the cache; keep witnesses immutable
        for name in ("witness_a", "witness_b"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def as_dict(self):
        return {"value": self.value, "witness_a": [float(v) for v in self.witness_a],
                "witness_b": [float(v) for v in self.witness_b],
                "method": self.method, "lower_bound": self.lower_bound}


def lp_pair_constant(mu, lam, m):
    """Closed form of M(V_mu, V_lam) for unit l_p balls with witnesses a and b."""
    if mu < lam:
        e = reciprocal(mu) - reciprocal(lam)
        value = m ** e
        a = np.full(m, m ** -reciprocal(lam))
        b = np.full(m, m ** (reciprocal(mu) - 1.0))
    else:
        value = 1.0
        a = np.zeros(m)
        a[0] = 1.0
        b = a.copy()
    return value, a, b


def sharp_constant(K: ConvexBody, V: ConvexBody, samples=10_000, seed=0) -> WitnessedConstant:
    """``M(K, V) = max_{y in V} ||y||_K`` with witnesses a in A(K,V), b in B(V*,K*).

    Strategy ladder: closed form for two l_p balls; maximum over the vertices
    of V; maximum over the vertices of K* (duality); otherwise seeded sampling
    of the boundary followed by alternating support ascent, flagged as a lower
    bound. The ``method`` field records which rung answered.
    """
    if K.dim != V.dim:
        raise ValueError("bodies live in different dimensions")
    return _sharp_constant(K, V, samples, seed)


@functools.lru_cache(maxsize=512)
def _sharp_constant(K, V, samples, seed):
    if isinstance(K, LpBall) and isinstance(V, LpBall):
        value, a, b = lp_pair_constant(K.mu, V.mu, K.dim)
        ratio = V.scale / K.scale
        a = V.scale * a
        value = value * ratio
        return WitnessedConstant(value, a, dual_witness(K, V, a, value), "closed_form")

    verts = extreme_points(V)
    if verts is not None:
        vals = gauge_many(K, verts)
        j = _first_max(vals)
        a = verts[j] / gauge(V, verts[j])
        value = float(gauge(K, a))
        return WitnessedConstant(value, a, dual_witness(K, V, a, value), "vertex_enumeration")

    # M(K,V) = M(V*,K*): maximize support_max(V, .) over the vertices of K*
    dual_verts = extreme_points(polar(K))
    if dual_verts is not None:
        vals = support_many(V, dual_verts)
        j = _first_max(vals)
        u = dual_verts[j]
        a = support_argmax(V, u)
        value = float(max(vals[j], gauge(K, a)))
        return WitnessedConstant(value, a, dual_witness(K, V, a, value), "vertex_enumeration")

    return _sampled_constant(K, V, samples, seed)


def _ascend(K, V, y, max_steps=200):
    """Alternate support maximizations over K* and V; the pairing never decreases."""
    Kp = polar(K)
    best = -INF
    a = y
    for _ in range(max_steps):
        u = support_argmax(Kp, y)
        y_new = support_argmax(V, u)
        val = float(u @ y_new)
        if val <= best + 1e-15 * abs(best):
            break
        best, a, y = val, y_new, y_new
    return best, a


def _sampled_constant(K, V, samples, seed, starts=20):
    rng = np.random.default_rng(seed)
    if vectorized_gauge(K) or not vectorized_support(V):
        Y = sample_boundary(V, samples, rng)
        vals = gauge_many(K, Y)
        order = np.argsort(-vals, kind="stable")[:starts]
        seeds = Y[order]
    else:
        # dual side: points of dK* scored by support_max(V, .)
        U = sample_boundary(polar(K), samples, rng)
        vals = support_many(V, U)
        order = np.argsort(-vals, kind="stable")[:starts]
        seeds = np.array([support_argmax(V, u) for u in U[order]])

    best_val, best_a = -INF, None
    for y in seeds:
        _, a = _ascend(K, V, y)
        a = a / gauge(V, a)
        val = gauge(K, a)
        if val > best_val * (1 + 1e-12):
            best_val, best_a = val, a
    return WitnessedConstant(float(best_val), best_a,
                             dual_witness(K, V, best_a, best_val), "sampling", lower_bound=True)


def dual_witness(K: ConvexBody, V: ConvexBody, a, M: float, tol=TOL_LP) -> np.ndarray:
    """Return b on the boundary of K* with ``|(b, a)| = M``."""
    a = np.asarray(a, dtype=float)

    def valid(b):
        return (abs(support_max(K, b) - 1.0) <= tol
                and abs(abs(float(b @ a)) - M) <= tol * max(1.0, M))

    if isinstance(K, LpBall):
        b = (M / float(a @ a)) * a
        if valid(b):
            return b
    b = support_argmax(polar(K), a)
    if float(b @ a) < 0:
        b = -b
    if not valid(b):
        raise WitnessError("dual witness check failed: a is not in A(K, V)")
    return b


def width_diameter(V: ConvexBody):
    """Width and diameter via ``d(V) = 2 M(B, V)`` and ``w(V) = 2 / M(V, B)``."""
    B = unit_ball(V.dim)
    d = 2.0 * sharp_constant(B, V).value
    w = 2.0 / sharp_constant(V, B).value
    return w, d


def s_condition(V: ConvexBody, tol=1e-12) -> bool:
    """Symmetry about every coordinate hyperplane."""
    if isinstance(V, LpBall):
        return True
    P = V.matrix
    for j in range(V.dim):
        flipped = P.copy()
        flipped[:, j] *= -1
        for row in flipped:
            if not any(np.allclose(row, q, atol=tol) or np.allclose(row, -q, atol=tol) for q in P):
                return False
    return True


# ------------------------------------------------------------------- JSON

def describe(V: ConvexBody) -> str:
    if isinstance(V, LpBall):
        mu = "inf" if V.mu == INF else f"{V.mu:g}"
        return f"lp({mu},{V.dim},{V.scale:g})"
    if isinstance(V, HPolytope):
        return f"hrep({len(V.rows)}x{V.dim})"
    return f"vrep({len(V.vertices)}x{V.dim})"


def body_from_dict(d) -> ConvexBody:
    kind = d.get("type")
    if kind == "lp":
        mu = d["mu"]
        mu = INF if mu in ("inf", "Infinity", "∞") else float(mu)
        return LpBall(mu, int(d["dim"]), float(d.get("scale", 1.0)))
    if kind == "hrep":
        return HPolytope(d["rows"])
    if kind == "vrep":
        return VPolytope(d["vertices"])
    raise BodyError(f"unknown body type {kind!r}")


def body_to_dict(V: ConvexBody) -> dict:
    if isinstance(V, LpBall):
        mu = "inf" if V.mu == INF else (int(V.mu) if float(V.mu).is_integer() else V.mu)
        return {"type": "lp", "mu": mu, "dim": V.dim, "scale": V.scale}
    if isinstance(V, HPolytope):
        return {"type": "hrep", "rows": [list(r) for r in V.rows]}
    return {"type": "vrep", "vertices": [list(v) for v in V.vertices]}


def load_body(path) -> ConvexBody:
    with open(path) as fh:
        return body_from_dict(json.load(fh))
