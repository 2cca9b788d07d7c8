"""Random instances, seeded campaigns and report aggregation.

Every trial draws from its own generator derived from ``(seed, trial)``, so
serial and parallel runs produce the same entries.
"""
from __future__ import annotations

import functools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import convex_geometry as cg
from .convex_geometry import INF, HPolytope, LpBall, VPolytope, BodyError
from .exp_type import TrigPolynomial, check_bernstein, lattice_points
from .polynomials import (MultiPolynomial, WeightedBody, _compositions, body_samples,
                          markov_check, weighted_markov_check)
from .report import VerificationReport, make_entry, merge

LP_EXPONENTS = (1.0, 1.5, 2.0, 3.0, INF)
BERNSTEIN_IDS = {"2.4", "2.8", "2.9"}
MARKOV_IDS = {"3.1", "3.2", "3.3"}


class GenerationError(RuntimeError):
    """Random instance generation gave up."""


@dataclass(frozen=True)
class RngConfig:
    seed: int = 0
    family: str = "PCG64"

    def trial(self, index: int) -> np.random.Generator:
        if self.family != "PCG64":
            raise ValueError(f"unsupported generator family {self.family!r}")
        ss = np.random.SeedSequence(self.seed, spawn_key=(index,))
        return np.random.Generator(np.random.PCG64(ss))


# ------------------------------------------------------------ generators

def random_body(m, cls, rng, attempts=100):
    if m < 1:
        raise ValueError("dimension must be >= 1")
    if cls == "lp":
        mu = LP_EXPONENTS[int(rng.integers(len(LP_EXPONENTS)))]
        return LpBall(mu, m, float(rng.uniform(0.5, 2.0)))
    if cls not in ("hrep", "vrep"):
        raise ValueError(f"unknown body class {cls!r}")
    for _ in range(attempts):
        count = int(rng.integers(2 * m, 4 * m + 1))
        P = rng.standard_normal((count, m))
        P /= np.linalg.norm(P, axis=1, keepdims=True)
        try:
            return HPolytope(P) if cls == "hrep" else VPolytope(P)
        except BodyError:
            continue
    raise GenerationError("rank validation failed repeatedly")


def random_trig(V, sigma, max_terms, rng, real=False) -> TrigPolynomial:
    """Random trigonometric polynomial with spectrum in ``sigma V``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    body = cg.scaled(V, sigma)
    lattice = lattice_points(body)
    nonzero = lattice[np.any(lattice != 0, axis=1)]
    if len(nonzero) == 0:
        raise GenerationError("sigma V contains no nonzero lattice point")
    count = int(rng.integers(1, min(max_terms, len(lattice)) + 1))
    idx = rng.choice(len(lattice), size=count, replace=False)
    coeffs = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    if not real:
        return TrigPolynomial(lattice[idx], coeffs, body)
    terms = {}
    for k, c in zip(map(tuple, lattice[idx]), coeffs):
        neg = tuple(-v for v in k)
        if k == neg:
            terms[k] = terms.get(k, 0) + 2 * c.real
        else:
            terms[k] = terms.get(k, 0) + c
            terms[neg] = terms.get(neg, 0) + np.conj(c)
    return TrigPolynomial.from_terms(terms, body)


def random_poly(n, m, kind, rng) -> MultiPolynomial:
    """Standard normal coefficients on every multi-index of total degree <= n."""
    alphas = [a for k in range(n + 1) for a in _compositions(k, m)]
    c = rng.standard_normal(len(alphas))
    if kind == "complex":
        c = c + 1j * rng.standard_normal(len(alphas))
    elif kind != "real":
        raise ValueError(f"kind must be real or complex, not {kind!r}")
    return MultiPolynomial(np.array(alphas), c)


# ------------------------------------------------------------ campaigns

DEFAULTS = {
    "campaign": "campaign",
    "inequalities": [],
    "dim": 2,
    "trials": 10,
    "seed": 0,
    "classes": ["lp"],
    "sigma": 3.0,
    "max_terms": 6,
    "degree": 3,
    "coefficients": "mixed",
    "resolution": 64,
    "allowance": None,
    "points": 16,
}


def normalize_descriptor(desc) -> dict:
    d = dict(DEFAULTS)
    d.update(desc)
    if "ids" in desc:
        d["inequalities"] = desc["ids"]
    if "m" in desc:
        d["dim"] = desc["m"]
    d["inequalities"] = [str(i) for i in d["inequalities"]]
    unknown = set(d["inequalities"]) - (BERNSTEIN_IDS | MARKOV_IDS | {"1.2", "1.2a", "3.7"})
    if unknown:
        raise ValueError(f"unknown inequality ids: {sorted(unknown)}")
    for key in ("K", "V"):
        if isinstance(d.get(key), dict):
            d[key] = cg.body_from_dict(d[key])
    return d


@functools.lru_cache(maxsize=64)
def _cached_samples(V, resolution):
    return body_samples(V, resolution)


def _pick_bodies(d, rng, need_s_condition=False):
    m = int(d["dim"])
    classes = ["lp"] if need_s_condition else d["classes"]
    K = d.get("K") or random_body(m, classes[int(rng.integers(len(classes)))], rng)
    V = d.get("V") or random_body(m, classes[int(rng.integers(len(classes)))], rng)
    return K, V


def _coeff_kind(d, trial):
    kind = d["coefficients"]
    if kind == "mixed":
        return "real" if trial % 2 == 0 else "complex"
    return kind


def _duality_entries(K, V, inst):
    tol = cg.TOL_LP
    left = cg.sharp_constant(K, V)
    right = cg.sharp_constant(cg.polar(V), cg.polar(K))
    a, b = left.witness_a, left.witness_b
    return [
        make_entry("1.2", left.value, right.value, tol, witness=a, kind="eq", instance=inst,
                   note=f"M(K,V) vs M(V*,K*) [{left.method}/{right.method}]"),
        make_entry("1.2", abs(float(a @ b)), left.value, tol, witness=b, kind="eq", instance=inst,
                   note="|(b,a)| = M"),
    ]


def _width_entries(V, inst):
    B = cg.unit_ball(V.dim)
    Vp = cg.polar(V)
    d_half = cg.sharp_constant(B, Vp)
    m1 = cg.sharp_constant(V, B)
    w, _ = cg.width_diameter(V)
    exact = not (d_half.lower_bound or m1.lower_bound)
    tol = cg.TOL_EXACT if exact else 1e-2
    return [
        make_entry("1.2a", d_half.value, m1.value, tol, kind="eq", instance=inst,
                   note="d(V*)/2 = M(B,V*) vs M(V,B)"),
        make_entry("1.2a", m1.value, 2.0 / w, tol, kind="eq", instance=inst,
                   note="M(V,B) vs 2/w(V)"),
    ]


def run_trial(d, trial):
    """All entries of one trial; errors become failing entries."""
    rng = RngConfig(int(d["seed"])).trial(trial)
    ids = set(d["inequalities"])
    res = int(d["resolution"])
    allowance = d["allowance"]
    report = VerificationReport(d["campaign"])
    try:
        if ids & {"1.2", "1.2a"}:
            K, V = _pick_bodies(d, rng)
            inst = f"K={cg.describe(K)} V={cg.describe(V)}"
            if "1.2" in ids:
                report.entries.extend(_duality_entries(K, V, inst))
            if "1.2a" in ids:
                report.entries.extend(_width_entries(V, inst))
        if ids & BERNSTEIN_IDS:
            K, V = _pick_bodies(d, rng)
            real = _coeff_kind(d, trial) == "real"
            f = random_trig(V, float(d["sigma"]), int(d["max_terms"]), rng, real=real)
            inst = f"K={cg.describe(K)} V={float(d['sigma']):g}*{cg.describe(V)} terms={len(f.coeffs)}"
            sub = check_bernstein(f, K, points=None, resolution=res, n_points=int(d["points"]),
                                  seed=int(rng.integers(2**31)), allowance=allowance,
                                  instance=inst)
            report.entries.extend(e for e in sub.entries if e.inequality in ids)
        if ids & MARKOV_IDS:
            K, V = _pick_bodies(d, rng)
            if "3.2" in ids and d.get("K") is None:
                K = cg.unit_ball(V.dim)
            P = random_poly(int(d["degree"]), V.dim, _coeff_kind(d, trial), rng)
            inst = f"K={cg.describe(K)} V={cg.describe(V)} n={P.degree}"
            sub = markov_check(P, K, V, n_points=int(d["points"]), resolution=res,
                               seed=int(rng.integers(2**31)), allowance=allowance,
                               samples=_cached_samples(V, res), instance=inst)
            report.entries.extend(e for e in sub.entries if e.inequality in ids)
        if "3.7" in ids:
            K, V = _pick_bodies(d, rng, need_s_condition=True)
            W = WeightedBody(V)
            Q = random_poly(int(d["degree"]), V.dim, _coeff_kind(d, trial), rng)
            inst = f"K={cg.describe(K)} C({cg.describe(V)}) n={Q.degree}"
            sub = weighted_markov_check(Q, K, W, n_points=int(d["points"]), resolution=res,
                                        seed=int(rng.integers(2**31)), allowance=allowance,
                                        samples=_cached_samples(V, res), instance=inst)
            report.entries.extend(sub.entries)
    except Exception as exc:  # record and continue
        report.entries.append(make_entry(",".join(sorted(ids)), math.nan, math.nan, 0.0,
                                         note=f"error: {type(exc).__name__}: {exc}"))
        report.entries[-1].passed = False
    for e in report.entries:
        e.trial = trial
    return report


def _worker_count():
    try:
        return max(1, int(os.environ.get("SHARPNESS_LAB_THREADS", "1")))
    except ValueError:
        return 1


def run_campaign(desc, workers=None) -> VerificationReport:
    d = normalize_descriptor(desc)
    start = time.perf_counter()
    trials = int(d["trials"]) if d["inequalities"] else 0
    workers = _worker_count() if workers is None else workers
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_trial, [d] * trials, range(trials)))
    else:
        parts = [run_trial(d, t) for t in range(trials)]
    report = merge(parts, d["campaign"])
    report.wall_time = time.perf_counter() - start
    return report
