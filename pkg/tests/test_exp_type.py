import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sharpness_lab import convex_geometry as cg
from sharpness_lab.convex_geometry import INF, HPolytope, LpBall, VPolytope
from sharpness_lab.exp_type import (ExpPair, RadialCosine, TrigPolynomial, alpha_grid,
                                    asymptotic_sharpness, bernstein_alpha_profile, bernstein_lhs,
                                    check_bernstein, extremal_line_check, gradient_norm_complex,
                                    h_lambda, lattice_points, nearest_lattice_point,
                                    restrict_to_line, sup_norm, sup_norm_exp_pair)
from sharpness_lab.harness import random_body, random_trig

seeds = st.integers(0, 2**31 - 1)
B2 = LpBall(2.0, 2, 1.0)
SQ = LpBall(INF, 2, 1.0)


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = []
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        out.append((f.value(x + e) - f.value(x - e)) / (2 * h))
    return np.array(out)


def trig(terms, body=None):
    m = len(next(iter(terms)))
    return TrigPolynomial.from_terms(terms, body or cg.scaled(LpBall(INF, m, 1.0), 3))


# ---- evaluation

def test_value_examples():
    a = np.array([1.0, 2.0])
    f = ExpPair(a, 0.5, 0.5)
    assert f.value([2.0, -1.0]) == pytest.approx(1.0)
    assert trig({(1, 0): 1}).value([math.pi / 2, 0]) == pytest.approx(1j)
    g = ExpPair(a, 1, 0)
    assert abs(g.value([0.3, 0.7])) == pytest.approx(1.0)


def test_gradient_examples():
    a = np.array([1.0, 2.0])
    f = ExpPair(a, 0.5, 0.5)
    x = f.point_at_phase(math.pi / 2)
    assert np.real(f.gradient(x)) == pytest.approx(-a)
    c = trig({(0, 0): 2.0 + 1j})
    assert np.abs(c.gradient([0.4, 0.1])).max() == 0


@given(seeds)
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    f = random_trig(SQ, 3.0, 6, rng)
    x = rng.uniform(-3, 3, 2)
    assert np.abs(f.gradient(x) - fd_gradient(f, x)).max() < 1e-6 * max(1, np.abs(f.coeffs).sum())
    p = ExpPair(rng.standard_normal(2), complex(*rng.standard_normal(2)),
                complex(*rng.standard_normal(2)))
    assert np.abs(p.gradient(x) - fd_gradient(p, x)).max() < 1e-5


def test_radial_gradient():
    f = RadialCosine(2.0, 3.0, 3)
    x = np.array([0.2, -0.1, 0.4])
    assert f.gradient(x) == pytest.approx(fd_gradient(f, x), abs=1e-6)
    assert not np.any(f.gradient(np.zeros(3)))


def test_spectrum_validation():
    with pytest.raises(ValueError):
        TrigPolynomial.from_terms({(2, 0): 1}, B2)


@given(seeds)
def test_real_trig_is_real(seed):
    rng = np.random.default_rng(seed)
    f = random_trig(B2, 3.0, 5, rng, real=True)
    assert f.is_real()
    X = rng.uniform(-10, 10, (100, 2))
    assert np.abs(np.imag(f.value(X))).max() < 1e-12


def test_json_round_trip(rng):
    f = random_trig(cg.octahedron(3), 4.0, 6, rng)
    g = TrigPolynomial.from_dict(f.as_dict())
    x = rng.standard_normal(3)
    assert g.value(x) == f.value(x)
    p = ExpPair.from_real([1.0, 2.0], 3.0, 4.0)
    q = ExpPair.from_dict(p.as_dict())
    assert q.value(x[:2]) == p.value(x[:2])


# ---- lattices

def test_lattice_counts():
    assert len(lattice_points(cg.scaled(SQ, 2))) == 25
    assert len(lattice_points(cg.scaled(B2, 2))) == 13
    pts = lattice_points(cg.scaled(B2, 2))
    assert np.all(np.sum(pts.astype(float) ** 2, axis=1) <= 4)


def test_nearest_lattice_tie_breaks_lexicographically():
    L = np.array([[1, 0], [0, 1]])
    assert list(nearest_lattice_point(L, np.array([0.5, 0.5]))) == [0, 1]


@given(seeds)
def test_restriction_spectrum_contained(seed):
    rng = np.random.default_rng(seed)
    V = random_body(2, "lp", rng)
    f = random_trig(V, 4.0, 6, rng)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    freqs, coeffs = restrict_to_line(f, x, y)
    assert np.abs(freqs).max() <= cg.support_max(f.spectrum_body, y) * (1 + 1e-12)
    tau = 0.37
    assert np.sum(coeffs * np.exp(1j * freqs * tau)) == pytest.approx(f.value(x + tau * y))


# ---- sup norms

def test_sup_norm_examples():
    est, _ = sup_norm(trig({(1, 2): 1}))
    assert est == pytest.approx(1.0, abs=1e-12)
    est, x = sup_norm(trig({(1, 0): 0.5, (-1, 0): 0.5}))
    assert est == pytest.approx(1.0, abs=1e-12)
    assert math.cos(x[0]) == pytest.approx(1.0)
    f = trig({(0, 0): 1, (1, 0): 1, (0, 1): 1})
    est, _ = sup_norm(f)
    assert est == pytest.approx(3.0, abs=1e-9)
    oracle, _ = sup_norm(f, resolution=512)
    assert est == pytest.approx(oracle, abs=1e-9)


def test_sup_norm_exp_pair():
    a = np.array([1.0, 0.0])
    assert sup_norm_exp_pair(ExpPair(a, 0.5, 0.5)) == 1
    assert sup_norm_exp_pair(ExpPair(a, 1, 0)) == 1
    f = ExpPair.from_real(a, 3, 4)
    theta = np.linspace(0, 2 * math.pi, 1_000_000, endpoint=False)
    grid = np.abs(f.C1 * np.exp(1j * theta) + f.C2 * np.exp(-1j * theta)).max()
    assert sup_norm_exp_pair(f) == pytest.approx(5)
    assert grid == pytest.approx(5, abs=1e-9)


@given(seeds)
def test_sup_norm_exp_pair_matches_phase_grid(seed):
    rng = np.random.default_rng(seed)
    C1, C2 = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    theta = np.linspace(0, 2 * math.pi, 20001)
    grid = np.abs(C1 * np.exp(1j * theta) + C2 * np.exp(-1j * theta)).max()
    exact = sup_norm_exp_pair(ExpPair([1.0], C1, C2))
    assert grid <= exact * (1 + 1e-12)
    assert grid == pytest.approx(exact, rel=1e-6)


# ---- h(lambda)

def test_h_lambda_examples():
    assert h_lambda(0, 1, 0.7) == pytest.approx(1)
    assert h_lambda(1, 0, 2) == pytest.approx(2)
    al = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
    grid = np.abs(np.sin(al) * 1 - np.cos(al) * 1j).max()
    assert h_lambda(1, 1j, 1) == pytest.approx(grid, abs=1e-6)


@given(seeds)
def test_h_lambda_matches_grid_and_is_monotone(seed):
    rng = np.random.default_rng(seed)
    ab, cd = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    l1, l2 = np.sort(rng.uniform(0.01, 5, 2))
    al = alpha_grid(4096)
    grid = np.abs(l1 * np.sin(al) * ab - np.cos(al) * cd).max()
    assert grid <= h_lambda(ab, cd, l1) * (1 + 1e-12)
    assert grid == pytest.approx(h_lambda(ab, cd, l1), rel=1e-5)
    assert h_lambda(ab, cd, l1) <= h_lambda(ab, cd, l2) + 1e-12


# ---- complex gradient norm

@pytest.mark.parametrize("K", [B2, SQ, LpBall(1.0, 2, 1.0), LpBall(3.0, 2, 1.0),
                               HPolytope([[1, 2], [2, -1]]), VPolytope([[2, 0], [0.5, 1]])])
def test_gradient_norm_complex_properties(K, rng):
    for _ in range(5):
        g = rng.standard_normal(2)
        assert gradient_norm_complex(g, K) == pytest.approx(cg.gauge(K, g), rel=1e-9)
        assert gradient_norm_complex(1j * g, K) == pytest.approx(cg.gauge(K, g), rel=1e-9)
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        phi = np.linspace(0, 2 * math.pi, 20001)
        sweep = max(cg.gauge(K, np.real(np.exp(1j * p) * z)) for p in phi[::20])
        val = gradient_norm_complex(z, K)
        assert sweep <= val * (1 + 1e-9)
        assert val == pytest.approx(sweep, rel=1e-4)


def test_gradient_norm_complex_example():
    assert gradient_norm_complex(np.array([1, 1j]), B2) == pytest.approx(1)


# ---- Bernstein checks

def test_bernstein_lhs_examples():
    K, V = B2, SQ
    wc = cg.sharp_constant(K, V)
    M, a, b = wc.value, wc.witness_a, wc.witness_b
    f = ExpPair(a, 0.5, 0.5)
    x = f.point_at_phase(0.3)
    y = np.array([0.3, -0.8])
    assert bernstein_lhs(f, x, y, math.pi / 2, M) == pytest.approx(abs(f.gradient(x) @ y))
    assert bernstein_lhs(f, f.point_at_phase(0.0), y, 0.0, M) == pytest.approx(M)
    # ridge cos(a,x) at (a,x) = pi/4 with y = b: |sin a (-sin t)(a,b) - M cos a cos t|
    x = f.point_at_phase(math.pi / 4)
    direct = abs(-math.sin(math.pi / 4) * math.sin(math.pi / 4) * (a @ b)
                 - M * math.cos(math.pi / 4) * math.cos(math.pi / 4))
    assert bernstein_lhs(f, x, b, math.pi / 4, M) == pytest.approx(direct)
    assert direct == pytest.approx(M / math.sqrt(2) * abs(math.sin(math.pi / 4)
                                                           + math.cos(math.pi / 4)))


PAIRS = [(B2, SQ), (LpBall(1.0, 2, 1.0), SQ), (SQ, B2), (HPolytope([[1, 2], [2, -1]]), B2),
         (B2, VPolytope([[1, 1], [1, -1]])), (LpBall(1.5, 3, 1.0), LpBall(3.0, 3, 1.0))]


@pytest.mark.parametrize("K,V", PAIRS)
def test_exp_pair_is_extremal(K, V):
    wc = cg.sharp_constant(K, V)
    f = ExpPair(wc.witness_a, 0.3 - 0.4j, 1.1 + 0.2j)
    r = check_bernstein(f, K, V)
    assert r.ok
    for e in r.entries:
        assert e.ratio == pytest.approx(1.0, abs=1e-6)
    prof = bernstein_alpha_profile(f, K, V)
    assert np.abs(prof - 1).max() < 1e-9


@pytest.mark.parametrize("K,V", PAIRS[:4])
def test_identity_29_pointwise(K, V, rng):
    wc = cg.sharp_constant(K, V)
    R1, R2 = rng.standard_normal(2)
    f = ExpPair.from_real(wc.witness_a, R1, R2)
    M = wc.value
    for x in rng.uniform(-5, 5, (200, V.dim)):
        g = np.real(f.gradient(x))
        lhs = cg.gauge(K, g) ** 2 + (M * np.real(f.value(x))) ** 2
        assert lhs == pytest.approx(M * M * (R1 * R1 + R2 * R2), rel=1e-9)


def test_random_bernstein_square_sigma3():
    K, V = B2, cg.scaled(SQ, 3)
    rng = np.random.default_rng(5)
    for _ in range(25):
        f = random_trig(SQ, 3.0, 6, rng, real=bool(rng.integers(2)))
        r = check_bernstein(f, K, seed=int(rng.integers(1000)))
        for e in r.entries:
            assert e.ratio <= 1 + 1e-6, e


def test_scaling_covariance(rng):
    f = random_trig(B2, 3.0, 5, rng)
    g = TrigPolynomial(f.freqs, (2 - 3j) * f.coeffs, f.spectrum_body)
    r1 = check_bernstein(f, SQ, seed=1)
    r2 = check_bernstein(g, SQ, seed=1)
    for a, b in zip(r1.entries, r2.entries):
        assert a.ratio == pytest.approx(b.ratio, rel=1e-7)


def test_exp_pair_needs_spectrum():
    with pytest.raises(ValueError):
        check_bernstein(ExpPair([1.0, 0], 1, 0), B2)


# ---- asymptotics and extremal lines

def test_asymptotic_disk():
    rows = asymptotic_sharpness(B2, B2, [10, 20, 40])
    for row, tol in zip(rows, (0.15, 0.08, 0.04)):
        assert row["defect"] <= 2 * math.sqrt(2)
        assert abs(row["normalized"] - row["M"]) <= tol


def test_asymptotic_vertex_has_no_defect():
    rows = asymptotic_sharpness(LpBall(1.0, 2, 1.0), SQ, [3, 7])
    for row in rows:
        assert row["defect"] == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("sigma", [1.0, 10.0])
def test_radial_cosine_line(m, sigma):
    e1 = np.eye(m)[0]
    f = RadialCosine(1.7, sigma, m)
    r = extremal_line_check(f, sigma * e1, e1, math.pi / (2 * sigma) * e1)
    assert r.ok, r.table()
    assert len(r.entries) == 3


def test_line_check_of_ridge_itself():
    a = np.array([1.0, 2.0])
    g = ExpPair.from_real(a, 0.6, -0.8)
    assert extremal_line_check(g, a, np.array([0.3, 0.1]), np.zeros(2) + 0.4).entries[0].passed


def test_negative_control_fails():
    class Shifted:
        a = np.array([2.0, 0.0])

        def value(self, x):
            return np.cos(np.asarray(x) @ self.a) + 0.5

        def gradient(self, x):
            return np.multiply.outer(-np.sin(np.asarray(x) @ self.a), self.a)

    e1 = np.array([1.0, 0.0])
    r = extremal_line_check(Shifted(), Shifted.a, e1, math.pi / 4 * e1)
    assert not r.ok
