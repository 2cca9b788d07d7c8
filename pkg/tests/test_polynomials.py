import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sharpness_lab import convex_geometry as cg
from sharpness_lab.convex_geometry import INF, HPolytope, LpBall, VPolytope
from sharpness_lab.harness import random_body, random_poly
from sharpness_lab.polynomials import (MultiPolynomial, RidgeChebyshev, WeightedBody,
                                       a_star_axis, body_samples, chebyshev,
                                       chebyshev_deriv_eval, chebyshev_eval,
                                       closed_form_constant_310, eval_poly, grad_poly,
                                       lift_square, markov_check, markov_sharpness,
                                       nonconvexity_witness, radial_chebyshev,
                                       radial_markov_sharpness, ridge_cheb, sup_norm_on_body,
                                       weighted_chebyshev, weighted_gradient,
                                       weighted_markov_check, weighted_sharpness)

seeds = st.integers(0, 2**31 - 1)
B2 = LpBall(2.0, 2, 1.0)
SQ = LpBall(INF, 2, 1.0)


def naive_eval(P, x):
    return sum(c * np.prod(np.asarray(x, dtype=complex) ** a) for a, c in zip(P.alphas, P.coeffs))


def P_(terms, dim=None):
    return MultiPolynomial.from_terms(terms, dim=dim)


# ---- evaluation

def test_eval_examples():
    P = P_({(2, 1): 1.0})
    assert eval_poly(P, [2, 3]) == pytest.approx(12)
    c = MultiPolynomial.constant(2.5 - 1j, 3)
    assert eval_poly(c, [0.3, -4, 9]) == pytest.approx(2.5 - 1j)
    assert not np.any(grad_poly(c, [1, 2, 3]))
    assert grad_poly(P_({(2, 0, 0): 1.0}), [3, 1, 1]) == pytest.approx([6, 0, 0])


@given(seeds)
def test_eval_matches_naive(seed):
    rng = np.random.default_rng(seed)
    P = random_poly(int(rng.integers(0, 6)), int(rng.integers(1, 4)), "complex", rng)
    x = rng.uniform(-1.5, 1.5, P.dim)
    ref = naive_eval(P, x)
    assert abs(eval_poly(P, x) - ref) <= 1e-12 * max(1.0, np.abs(P.coeffs).sum() * 2 ** P.degree)


@given(seeds)
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    P = random_poly(4, 3, "real", rng)
    x = rng.uniform(-1, 1, 3)
    h = 1e-6
    fd = [(P.value(x + h * e) - P.value(x - h * e)) / (2 * h) for e in np.eye(3)]
    assert np.abs(P.gradient(x) - np.array(fd)).max() < 1e-5


def test_json_round_trip(rng):
    P = random_poly(3, 2, "complex", rng)
    Q = MultiPolynomial.from_dict(P.as_dict())
    x = rng.standard_normal(2)
    assert Q.value(x) == P.value(x)
    assert Q.degree == 3


# ---- Chebyshev

def test_chebyshev_examples():
    assert chebyshev(3) == [0, -3, 0, 4]
    assert chebyshev_eval(3, 0.5) == pytest.approx(-1)
    for n in range(13):
        assert chebyshev_eval(n, 1.0) == pytest.approx(1)


@pytest.mark.parametrize("n", range(1, 13))
def test_chebyshev_derivative_at_one(n):
    h = 1e-6
    coeffs = chebyshev(n)
    poly = np.polynomial.Polynomial(coeffs)
    assert chebyshev_deriv_eval(n, 1.0) == pytest.approx(n * n)
    fd = (poly(1 + h) - poly(1 - h)) / (2 * h)
    assert fd == pytest.approx(n * n, rel=1e-6)


@given(st.integers(0, 20), st.floats(-1, 1))
def test_chebyshev_is_cosine(n, t):
    assert chebyshev_eval(n, t) == pytest.approx(math.cos(n * math.acos(t)), abs=1e-9)


def test_ridge_examples(rng):
    a = np.array([0.3, -0.7])
    x = rng.standard_normal((5, 2))
    assert ridge_cheb(1, a, 2j).value(x) == pytest.approx(2j * (x @ a))
    e1 = np.array([1.0, 0.0])
    assert ridge_cheb(2, e1, 3).value(x) == pytest.approx(3 * (2 * x[:, 0] ** 2 - 1))
    for n in range(1, 8):
        z = math.cos(math.pi / (2 * n)) * a / (a @ a)
        assert abs(ridge_cheb(n, a).value(z)) < 1e-12


def test_high_degree_ridge_is_composed(rng):
    a = np.array([0.2, 0.5])
    P = ridge_cheb(20, a)
    assert isinstance(P, RidgeChebyshev)
    x = rng.standard_normal(2) * 0.5
    assert P.value(x) == pytest.approx(math.cos(20 * math.acos(x @ a)))


def test_radial_chebyshev_matches_composition(rng):
    for n in (2, 4, 6):
        P = radial_chebyshev(n, 3)
        x = rng.uniform(-0.5, 0.5, 3)
        assert P.value(x) == pytest.approx(chebyshev_eval(n, np.linalg.norm(x)))
    with pytest.raises(ValueError):
        radial_chebyshev(3, 2)


# ---- sup norm on bodies

def test_sup_norm_examples():
    P = P_({(0, 0): 1.0, (2, 0): -1.0, (0, 2): -1.0})
    est, x = sup_norm_on_body(P, B2)
    assert est == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(x) < 1e-6
    wc = cg.sharp_constant(B2, cg.polar(SQ))
    est, _ = sup_norm_on_body(ridge_cheb(5, wc.witness_a), SQ)
    assert est == pytest.approx(1.0, abs=1e-9)


def test_sup_norm_quadratic_on_square_against_dense_grid():
    rng = np.random.default_rng(2)
    P = random_poly(2, 2, "real", rng)
    g = np.linspace(-1, 1, 1001)
    X, Y = np.meshgrid(g, g)
    oracle = np.abs(P.value(np.column_stack([X.ravel(), Y.ravel()]))).max()
    est, _ = sup_norm_on_body(P, SQ)
    assert est == pytest.approx(oracle, rel=1e-3)


def test_body_samples_inside():
    for V in (B2, SQ, HPolytope([[1, 2], [2, -1]]), VPolytope([[1, 0.2], [0.3, 1]])):
        S = body_samples(V, 32)
        assert np.all(cg.gauge_many(V, S) <= 1 + 1e-9)


# ---- Markov checks

PAIRS = [(B2, B2), (B2, SQ), (LpBall(1.0, 2, 1.0), LpBall(3.0, 2, 1.0)),
         (SQ, VPolytope([[1, 0.5], [-0.2, 1]]))]


@pytest.mark.parametrize("K,V", PAIRS)
@pytest.mark.parametrize("n", [1, 3, 6])
def test_ridge_is_sharp(K, V, n):
    r = markov_sharpness(n, K, V)
    assert r.ok, r.table()
    for e in r.entries[:2]:
        assert e.ratio == pytest.approx(1, abs=1e-6)


def test_random_real_on_disk():
    rng = np.random.default_rng(9)
    S = body_samples(B2, 64)
    for t in range(30):
        P = random_poly(3, 2, "real", rng)
        r = markov_check(P, B2, B2, seed=t, samples=S)
        assert r.ok, r.table()


def test_width_identity_entry():
    rng = np.random.default_rng(4)
    r = markov_check(random_poly(2, 2, "complex", rng), B2, SQ)
    ids = [e.inequality for e in r.entries]
    assert ids == ["3.1", "3.3", "3.2", "1.2a"]
    assert r.by_inequality("3.3")[0].lhs == r.by_inequality("3.2")[0].lhs
    assert r.by_inequality("3.3")[0].rhs == pytest.approx(r.by_inequality("3.2")[0].rhs, rel=1e-9)


def test_constant_polynomial_is_vacuous():
    r = markov_check(MultiPolynomial.constant(3.0, 2), B2, SQ)
    assert r.ok
    assert all("vacuous" in e.note for e in r.entries if e.inequality in ("3.1", "3.3"))


def test_radial_extremal():
    for m in (2, 3):
        for n in (2, 4, 6):
            e = radial_markov_sharpness(n, m).entries[0]
            assert e.ratio == pytest.approx(1, abs=1e-6)


# ---- weighted case

def test_weighted_gradient_examples():
    Q = P_({(1, 0): 1.0})
    assert weighted_gradient(Q, [4.0, 1.0])[0] == pytest.approx(2)
    Q = P_({(1, 1): 1.0, (2, 0): 1.0})
    assert weighted_gradient(Q, [0.0, 2.0])[0] == 0
    T4 = weighted_chebyshev(2, 0, 1.0, 1)
    assert weighted_gradient(T4, [1.0])[0] == pytest.approx(8)
    with pytest.raises(ValueError):
        weighted_gradient(Q, [-1.0, 0.0])


def test_lift_square_examples():
    assert lift_square(P_({(1, 0): 1.0})).alphas.tolist() == [[2, 0]]
    assert lift_square(P_({(1, 1): 1.0})).alphas.tolist() == [[2, 2]]


@given(seeds)
def test_lift_square_half_identity(seed):
    rng = np.random.default_rng(seed)
    Q = random_poly(3, 3, "complex", rng)
    P = lift_square(Q)
    x = rng.uniform(-1, 1, 3)
    u = x * x
    assert P.value(x) == pytest.approx(Q.value(u), rel=1e-9, abs=1e-12)
    # x_j dP/dx_j = 2 u_j dQ/du_j
    assert x * P.gradient(x) == pytest.approx(2 * u * Q.gradient(u), rel=1e-9, abs=1e-12)


def test_closed_form_310():
    assert closed_form_constant_310(1, 2, 9)[0] == pytest.approx(3)
    for m in (2, 3, 7):
        assert closed_form_constant_310(2, 2, m)[0] == pytest.approx(1)
        assert closed_form_constant_310(3, 4, m)[0] == pytest.approx(1)
    val, a = closed_form_constant_310(1.0, 1.0, 3)
    assert val == pytest.approx(3)
    K, V = LpBall(1.0, 3, 1.0), LpBall(1.0, 3, 1.0)
    assert cg.sharp_constant(K, cg.polar(V)).value == pytest.approx(val)


def test_weighted_body():
    W = WeightedBody(LpBall(1.0, 2, 1.0))
    assert W.contains([1.0, 0.0]) and W.contains([0.25, 0.25])
    assert not W.contains([0.5, 0.5])
    with pytest.raises(ValueError):
        WeightedBody(HPolytope([[1, 1], [1, -2]]))
    u, v = nonconvexity_witness(W)
    assert W.contains(u) and W.contains(v) and not W.contains((u + v) / 2)
    assert nonconvexity_witness(WeightedBody(B2)) is None


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [2, 3])
def test_simplex_sharpness(n, m):
    B = LpBall(2.0, m, 1.0)
    r = weighted_sharpness(n, B, WeightedBody(B))
    e = r.entries[0]
    assert e.lhs == pytest.approx(2 * n * n, abs=1e-6)
    assert e.ratio == pytest.approx(1, abs=1e-6)


def test_weighted_random_l1():
    K = LpBall(1.0, 3, 1.0)
    W = WeightedBody(K)
    rng = np.random.default_rng(8)
    for t in range(10):
        Q = random_poly(2, 3, "real" if t % 2 else "complex", rng)
        r = weighted_markov_check(Q, K, W, seed=t)
        assert r.ok, r.table()
        assert r.entries[0].rhs == pytest.approx(2 * 3 * 4 * sup_norm_on_body(lift_square(Q), K)[0])


def test_a_star_axis():
    hit = a_star_axis(B2, SQ)
    assert hit is None or abs(hit[1][hit[0]]) > 0
    k, a = a_star_axis(LpBall(2.0, 3, 1.0), LpBall(2.0, 3, 1.0))
    assert abs(a[k]) == pytest.approx(1)


def test_vacuous_weighted():
    W = WeightedBody(B2)
    r = weighted_markov_check(MultiPolynomial.constant(1.0, 2), B2, W)
    assert r.entries[0].lhs == 0 and r.ok
