"""Trigonometric polynomials and exponential pairs with spectrum in a body V.

These are the finite-dimensional stand-ins for entire functions of
exponential type V. Everything here is vectorized over evaluation points:
``value`` and ``gradient`` accept a single point or an (N, m) array.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .convex_geometry import (ConvexBody, HPolytope, INF, LpBall, VPolytope, body_from_dict,
                              body_to_dict, gauge, gauge_many, polar, scaled, sharp_constant,
                              support_argmax, support_max)
from .report import VerificationReport, make_entry

TWO_PI = 2.0 * math.pi


def _points(x, m):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != m:
        raise ValueError("dimension mismatch")
    return X, single


@dataclass(eq=False)
class TrigPolynomial:
    freqs: np.ndarray          # (T, m) integer frequencies
    coeffs: np.ndarray         # (T,) complex
    spectrum_body: ConvexBody

    def __post_init__(self):
        self.freqs = np.atleast_2d(np.asarray(self.freqs, dtype=np.int64))
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.freqs.shape[0] == 0 or self.freqs.shape[0] != self.coeffs.shape[0]:
            raise ValueError("need at least one term and one coefficient per frequency")
        if self.freqs.shape[1] != self.spectrum_body.dim:
            raise ValueError("frequency dimension differs from the spectrum body")
        g = gauge_many(self.spectrum_body, self.freqs.astype(float))
        if np.any(g > 1 + 1e-12):
            bad = self.freqs[int(np.argmax(g))]
            raise ValueError(f"frequency {bad.tolist()} lies outside the spectrum body")

    @classmethod
    def from_terms(cls, terms, spectrum_body):
        """``terms``: mapping ``k -> c_k`` with tuple keys."""
        ks = list(terms)
        return cls(np.array(ks), np.array([terms[k] for k in ks]), spectrum_body)

    @property
    def dim(self):
        return self.freqs.shape[1]

    def _phases(self, X):
        return np.exp(1j * (X @ self.freqs.T.astype(float)))

    def value(self, x):
        X, single = _points(x, self.dim)
        out = self._phases(X) @ self.coeffs
        return out[0] if single else out

    def gradient(self, x):
        X, single = _points(x, self.dim)
        out = (self._phases(X) * self.coeffs) @ (1j * self.freqs.astype(float))
        return out[0] if single else out

    def hessian(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        K = self.freqs.astype(float)
        w = self.coeffs * np.exp(1j * (K @ x))
        return -(K.T * w) @ K

    def is_real(self, tol=1e-12) -> bool:
        """True when ``c_{-k} = conj(c_k)`` for every k."""
        table = {}
        for k, c in zip(map(tuple, self.freqs), self.coeffs):
            table[k] = table.get(k, 0) + c
        scale = max(1.0, max(abs(c) for c in table.values()))
        for k, c in table.items():
            partner = table.get(tuple(-v for v in k), 0)
            if abs(partner - np.conj(c)) > tol * scale:
                return False
        return True

    def as_dict(self):
        return {"dim": self.dim, "spectrum": body_to_dict(self.spectrum_body),
                "terms": [{"k": [int(v) for v in k], "re": float(c.real), "im": float(c.imag)}
                          for k, c in zip(self.freqs, self.coeffs)]}

    @classmethod
    def from_dict(cls, d):
        body = body_from_dict(d["spectrum"])
        freqs = [t["k"] for t in d["terms"]]
        coeffs = [complex(t.get("re", 0.0), t.get("im", 0.0)) for t in d["terms"]]
        if int(d.get("dim", body.dim)) != body.dim:
            raise ValueError("dim does not match the spectrum body")
        return cls(np.array(freqs), np.array(coeffs), body)


@dataclass(eq=False)
class ExpPair:
    """``C1 exp(i(a,x)) + C2 exp(-i(a,x))``."""
    a: np.ndarray
    C1: complex
    C2: complex

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float).reshape(-1)
        if not np.any(self.a):
            raise ValueError("frequency vector a must be nonzero")
        self.C1, self.C2 = complex(self.C1), complex(self.C2)

    @classmethod
    def from_real(cls, a, R1, R2):
        """``R1 cos(a,x) + R2 sin(a,x)``."""
        c = complex(R1, -R2) / 2
        return cls(a, c, c.conjugate())

    @property
    def dim(self):
        return self.a.shape[0]

    def value(self, x):
        X, single = _points(x, self.dim)
        th = X @ self.a
        out = self.C1 * np.exp(1j * th) + self.C2 * np.exp(-1j * th)
        return out[0] if single else out

    def gradient(self, x):
        X, single = _points(x, self.dim)
        th = X @ self.a
        s = 1j * (self.C1 * np.exp(1j * th) - self.C2 * np.exp(-1j * th))
        out = s[:, None] * self.a
        return out[0] if single else out

    def is_real(self, tol=1e-12):
        return abs(self.C2 - self.C1.conjugate()) <= tol * max(1.0, abs(self.C1))

    def point_at_phase(self, theta):
        """The point on the line through 0 along a with ``(a, x) = theta``."""
        return theta * self.a / float(self.a @ self.a)

    def peak_phase(self):
        """Phase where ``|C1 e^{i th} + C2 e^{-i th}|`` equals ``|C1| + |C2|``."""
        return 0.5 * (cmath.phase(self.C2) - cmath.phase(self.C1))

    def bernstein_peak(self, alpha):
        """Point where the Bernstein-Szego expression at angle alpha is extremal."""
        return self.point_at_phase(self.peak_phase() + alpha)

    def as_dict(self):
        return {"dim": self.dim, "a": [float(v) for v in self.a],
                "C1": {"re": self.C1.real, "im": self.C1.imag},
                "C2": {"re": self.C2.real, "im": self.C2.imag}}

    @classmethod
    def from_dict(cls, d):
        def c(v):
            return complex(v["re"], v.get("im", 0.0)) if isinstance(v, dict) else complex(v)
        return cls(np.array(d["a"], dtype=float), c(d["C1"]), c(d["C2"]))


@dataclass(eq=False)
class RadialCosine:
    """``R cos(sigma |x|)``, an extremal function of exponential type sigma*B^m."""
    R: float
    sigma: float
    dim: int

    def value(self, x):
        X, single = _points(x, self.dim)
        out = self.R * np.cos(self.sigma * np.linalg.norm(X, axis=1))
        return out[0] if single else out

    def gradient(self, x):
        X, single = _points(x, self.dim)
        r = np.linalg.norm(X, axis=1)
        safe = np.where(r > 0, r, 1.0)
        # removable singularity at the origin: gradient 0 by continuity
        coef = np.where(r > 0, -self.R * self.sigma * np.sin(self.sigma * r) / safe, 0.0)
        out = coef[:, None] * X
        return out[0] if single else out


def evaluate(f, x):
    return f.value(x)


def gradient(f, x):
    return f.gradient(x)


def lattice_points(V: ConvexBody) -> np.ndarray:
    """Integer points of V, lexicographically ordered."""
    m = V.dim
    radii = [int(math.floor(support_max(V, np.eye(m)[j]) + 1e-12)) for j in range(m)]
    axes = [np.arange(-r, r + 1) for r in radii]
    grid = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, m)
    keep = gauge_many(V, grid.astype(float)) <= 1 + 1e-12
    return grid[keep]


def restrict_to_line(f: TrigPolynomial, x, y):
    """Univariate frequencies and coefficients of ``tau -> f(x + tau y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    freqs = f.freqs.astype(float) @ y
    coeffs = f.coeffs * np.exp(1j * (f.freqs.astype(float) @ x))
    return freqs, coeffs


# ------------------------------------------------------------ sup norms

def _golden_max(fun, lo, hi, iters=40):
    g = (math.sqrt(5) - 1) / 2
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def _refine_coordinates(fun, x, h, sweeps=3):
    x = np.array(x, dtype=float)
    best = fun(x)
    for _ in range(sweeps):
        for j in range(len(x)):
            def along(s, j=j):
                z = x.copy()
                z[j] = s
                return fun(z)
            s, val = _golden_max(along, x[j] - h, x[j] + h)
            if val > best:
                best, x[j] = val, s
    return best, x


def _newton_polish(f, x, val, steps=8):
    """Newton steps on |f|^2, kept only while they increase |f|."""
    for _ in range(steps):
        v = complex(f.value(x))
        g = f.gradient(x)
        grad = 2 * np.real(np.conj(v) * g)
        H = 2 * np.real(np.outer(np.conj(g), g) + np.conj(v) * f.hessian(x))
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            break
        z = x + step
        new = float(abs(f.value(z)))
        if not new > val:
            break
        x, val = z, new
    return val, x


def sup_norm(f: TrigPolynomial, resolution=64, chunk=1 << 16, starts=4):
    """Grid-plus-refinement estimate of ``sup |f|`` over the torus.

    The estimate is a lower bound; returns ``(estimate, argmax)``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    m = f.dim
    h = TWO_PI / resolution
    ticks = np.arange(resolution) * h
    total = resolution ** m
    best_vals = np.empty(0)
    best_idx = np.empty(0, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        X = ticks[np.stack(np.unravel_index(idx, (resolution,) * m), axis=1)]
        vals = np.abs(f.value(X))
        best_vals = np.concatenate([best_vals, vals])
        best_idx = np.concatenate([best_idx, idx])
        keep = np.argsort(-best_vals, kind="stable")[:starts]
        best_vals, best_idx = best_vals[keep], best_idx[keep]

    def absval(z):
        return float(abs(f.value(z)))

    best, arg = -1.0, None
    for idx in best_idx:
        x0 = ticks[np.array(np.unravel_index(idx, (resolution,) * m))]
        val, x = _refine_coordinates(absval, x0, h)
        val, x = _newton_polish(f, x, val)
        if val > best:
            best, arg = val, x
    return best, arg


def sup_norm_exp_pair(f: ExpPair) -> float:
    """Exact ``sup_x |C1 e^{i(a,x)} + C2 e^{-i(a,x)}| = |C1| + |C2|``."""
    return abs(f.C1) + abs(f.C2)


# ------------------------------------------------ gradient norms and h(lambda)

def h_lambda(ab: complex, cd: complex, lam: float) -> float:
    """Closed form of ``sup_alpha |lam sin(alpha) ab - cos(alpha) cd|``."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    ab, cd = complex(ab), complex(cd)
    p2 = lam * lam * abs(ab) ** 2
    q2 = abs(cd) ** 2
    cross = ab.real * cd.real + ab.imag * cd.imag
    root = math.sqrt((p2 - q2) ** 2 + 4 * lam * lam * cross * cross)
    return math.sqrt(0.5 * (p2 + q2 + root))


def bernstein_lhs(f, x, y, alpha, M) -> float:
    """``|sin(alpha) (grad f(x), y) - M cos(alpha) f(x)|``."""
    p = complex(np.asarray(f.gradient(x)) @ np.asarray(y, dtype=float))
    q = complex(f.value(x))
    return abs(math.sin(alpha) * p - M * math.cos(alpha) * q)


def _max_modulus_polytope(B, re, im, depth=40):
    """``max_{t in B} |(t, re + i im)|`` via the planar projection of B."""
    def probe(d):
        t = support_argmax(B, d[0] * re + d[1] * im)
        return t, np.array([t @ re, t @ im])

    found = []

    def refine(p1, p2, level):
        seg = p2 - p1
        if level == 0 or np.linalg.norm(seg) <= 1e-13 * (1 + np.linalg.norm(p1)):
            return
        n = np.array([seg[1], -seg[0]])
        t, p = probe(n)
        if n @ p <= n @ p1 + 1e-12 * (1 + abs(n @ p1)):
            return
        found.append((t, p))
        refine(p1, p, level - 1)
        refine(p, p2, level - 1)

    angles = np.arange(8) * (TWO_PI / 8)
    ring = [probe((math.cos(a), math.sin(a))) for a in angles]
    found.extend(ring)
    for i in range(len(ring)):
        refine(ring[i][1], ring[(i + 1) % len(ring)][1], depth)
    t, p = max(found, key=lambda tp: float(np.hypot(*tp[1])))
    return float(np.hypot(*p)), t


def gradient_norm_complex(g, K: ConvexBody, grid=256, return_direction=False):
    """``sup_phi gauge(K, Re(e^{i phi} g))`` = ``max_{y in K*} |(g, y)|``.

    Closed forms are used for H-polytopes and l_2 / l_inf balls, an exact
    planar-projection walk for V-polytopes, and a phase grid with golden
    refinement otherwise. Optionally returns the maximizing real ``y``.
    """
    g = np.asarray(g, dtype=complex).reshape(-1)
    re, im = g.real.copy(), g.imag.copy()
    Kp = polar(K)
    if not np.any(im) or not np.any(re):
        w = re if np.any(re) else im
        y = support_argmax(Kp, w)
        val = gauge(K, w)
    elif isinstance(K, HPolytope):
        vals = np.abs(K.matrix @ g)
        j = int(np.argmax(vals))
        y, val = K.matrix[j], float(vals[j])
    elif isinstance(K, VPolytope):
        val, y = _max_modulus_polytope(Kp, re, im)
    elif isinstance(K, LpBall) and K.mu == INF:
        j = int(np.argmax(np.abs(g)))
        y = np.zeros(K.dim)
        y[j] = 1.0 / K.scale
        val = float(abs(g[j]) / K.scale)
    elif isinstance(K, LpBall) and K.mu == 2:
        G = np.array([[re @ re, -(re @ im)], [-(re @ im), im @ im]])
        evals, evecs = np.linalg.eigh(G)
        c, s = evecs[:, -1]
        w = c * re - s * im
        y = support_argmax(Kp, w)
        val = float(math.sqrt(max(evals[-1], 0.0)) / K.scale)
    else:
        phis = np.arange(grid) * (math.pi / grid)
        W = np.cos(phis)[:, None] * re - np.sin(phis)[:, None] * im
        vals = gauge_many(K, W)
        j = int(np.argmax(vals))
        h = math.pi / grid
        phi, _ = _golden_max(lambda p: gauge(K, math.cos(p) * re - math.sin(p) * im),
                             phis[j] - h, phis[j] + h)
        y = support_argmax(Kp, math.cos(phi) * re - math.sin(phi) * im)
        val = max(float(vals[j]), float(abs(g @ y)))
    val = max(float(val), float(abs(g @ y)))
    return (val, np.asarray(y, dtype=float)) if return_direction else val


# ------------------------------------------------------------ checks

def alpha_grid(n=360):
    alphas = np.arange(n) * (TWO_PI / n)
    return np.unique(np.concatenate([alphas, [0.0, math.pi / 2]]))


def _normalize_dk(K, Y):
    """Scale directions onto the boundary of K*."""
    Y = np.atleast_2d(Y)
    norms = np.array([support_max(K, y) for y in Y])
    return Y / norms[:, None]


def check_bernstein(f, K: ConvexBody, V: ConvexBody = None, points=None, alphas=None,
                    resolution=64, n_points=32, n_dirs=8, seed=0, allowance=None,
                    instance="") -> VerificationReport:
    """Check the Bernstein-type inequalities (2.4), (2.8) and, for real f, (2.9).

    One entry per inequality is produced, carrying the worst ratio over the
    trial points and the point where it occurred.
    """
    if V is None:
        if isinstance(f, ExpPair):
            raise ValueError("an ExpPair needs its spectrum body V")
        V = f.spectrum_body
    rng = np.random.default_rng(seed)
    wc = sharp_constant(K, V)
    M = wc.value
    m = K.dim
    alphas = alpha_grid() if alphas is None else np.asarray(alphas, dtype=float)

    if isinstance(f, ExpPair):
        fnorm = sup_norm_exp_pair(f)
        allowance = 1e-9 if allowance is None else allowance
        extra = [f.bernstein_peak(al) for al in alphas]
        extra.append(f.point_at_phase(f.peak_phase()))
    else:
        fnorm, xsup = sup_norm(f, resolution)
        allowance = 10.0 / resolution if allowance is None else allowance
        extra = [xsup]
    X = [np.asarray(p, dtype=float) for p in (points if points is not None else [])]
    if points is None:
        X.extend(rng.uniform(0, TWO_PI, size=(n_points, m)))
    X.extend(extra)
    X = np.array(X)
    dirs = _normalize_dk(K, rng.standard_normal((n_dirs, m)))
    real = f.is_real()

    vals = np.asarray(f.value(X))
    grads = np.asarray(f.gradient(X))
    if real:
        vals, grads = vals.real, grads.real
    rhs = M * fnorm
    worst = {"2.4": (-1.0, None), "2.8": (-1.0, None), "2.9": (-1.0, None)}
    sa, ca = np.sin(alphas), np.cos(alphas)
    for x, q, g in zip(X, vals, grads):
        gn, ystar = gradient_norm_complex(g, K, return_direction=True)
        if gn > worst["2.8"][0]:
            worst["2.8"] = (gn, x)
        Y = np.vstack([ystar, wc.witness_b, dirs])
        P = Y @ g
        lhs24 = np.abs(sa[None, :] * P[:, None] - M * ca[None, :] * q).max()
        if lhs24 > worst["2.4"][0]:
            worst["2.4"] = (float(lhs24), x)
        if real:
            lhs29 = math.sqrt(gn * gn + (M * q.real) ** 2)
            if lhs29 > worst["2.9"][0]:
                worst["2.9"] = (lhs29, x)

    report = VerificationReport(instance)
    for ineq in ("2.4", "2.8", "2.9"):
        lhs, x = worst[ineq]
        if x is None:
            continue
        report.entries.append(make_entry(ineq, lhs, rhs, allowance, witness=x, instance=instance,
                                         note="" if ineq != "2.9" else "root form"))
    return report


def bernstein_alpha_profile(f: ExpPair, K, V, alphas=None):
    """Per angle, the ratio LHS(2.4) / (M ||f||) at the analytic extremal point."""
    wc = sharp_constant(K, V)
    M = wc.value
    alphas = alpha_grid() if alphas is None else np.asarray(alphas)
    fnorm = sup_norm_exp_pair(f)
    return np.array([bernstein_lhs(f, f.bernstein_peak(al), wc.witness_b, al, M) / (M * fnorm)
                     for al in alphas])


def nearest_lattice_point(lattice, target):
    """Closest lattice point; ties go to the lexicographically smallest."""
    d = np.linalg.norm(lattice - target, axis=1)
    best = d.min()
    cands = lattice[d <= best + 1e-12 * max(1.0, best)]
    order = np.lexsort(cands.T[::-1])
    return cands[order[0]]


def asymptotic_sharpness(K: ConvexBody, V: ConvexBody, sigmas, C1=0.5, C2=0.5):
    """Ratios ``sup ||grad f0||_K / ||f0||`` for lattice-rounded exponential pairs."""
    wc = sharp_constant(K, V)
    M, a = wc.value, wc.witness_a
    rows = []
    for sigma in sigmas:
        lattice = lattice_points(scaled(V, sigma))
        k0 = nearest_lattice_point(lattice, sigma * a)
        row = {"sigma": float(sigma), "k0": [int(v) for v in k0], "M": M}
        if not np.any(k0):
            row.update(ratio=0.0, defect=sigma * M, normalized=0.0, degenerate=True)
            rows.append(row)
            continue
        f0 = ExpPair(k0.astype(float), C1, C2)
        thetas = np.concatenate([np.arange(64) * (TWO_PI / 64),
                                 [f0.peak_phase() + math.pi / 2]])
        grads = f0.gradient(np.array([f0.point_at_phase(t) for t in thetas]))
        best = max(gradient_norm_complex(g, K) for g in grads)
        ratio = best / sup_norm_exp_pair(f0)
        row.update(ratio=ratio, defect=sigma * M - ratio, normalized=ratio / sigma,
                   degenerate=False)
        rows.append(row)
    return rows


def fit_ridge(f0, a, y0, x0):
    """Coefficients R1, R2 of ``R1 cos(a,x) + R2 sin(a,x)`` matching f0 and its
    derivative along y0 at x0."""
    a = np.asarray(a, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    th = float(a @ x0)
    ay = float(a @ y0)
    if abs(ay) < 1e-14:
        raise ValueError("direction y0 is orthogonal to a")
    v = complex(f0.value(x0))
    dv = complex(np.asarray(f0.gradient(x0)) @ y0) / ay
    c, s = math.cos(th), math.sin(th)
    # [c s; -s c] [R1 R2]^T = [v dv]^T
    return c * v - s * dv, s * v + c * dv


def extremal_line_check(f0, a, y0, x0, taus=None, tol=1e-9, instance="") -> VerificationReport:
    """Check that f0 agrees with a fitted ridge g, with gradients, along x0 + tau y0,
    and that f0(x0) = 0."""
    a = np.asarray(a, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    taus = np.linspace(-10, 10, 201) if taus is None else np.asarray(taus, dtype=float)
    R1, R2 = fit_ridge(f0, a, y0, x0)
    X = x0 + taus[:, None] * y0
    th = X @ a
    g_val = R1 * np.cos(th) + R2 * np.sin(th)
    g_grad = (-R1 * np.sin(th) + R2 * np.cos(th))[:, None] * a
    dv = np.abs(np.asarray(f0.value(X)) - g_val)
    dg = np.abs(np.asarray(f0.gradient(X)) - g_grad).max(axis=1)
    zero = abs(complex(f0.value(x0)))

    report = VerificationReport(instance)
    i, j = int(np.argmax(dv)), int(np.argmax(dg))
    note = f"R1={complex(R1).real:.12g} R2={complex(R2).real:.12g}"
    report.entries.append(make_entry("3.1n", dv[i], tol, 0.0, witness=X[i], instance=instance,
                                     note=note))
    report.entries.append(make_entry("3.2n", dg[j], tol, 0.0, witness=X[j], instance=instance))
    report.entries.append(make_entry("3.1n-zero", zero, tol, 0.0, witness=x0, instance=instance))
    return report
