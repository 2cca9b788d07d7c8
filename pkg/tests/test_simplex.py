import numpy as np
import pytest
from hypothesis import given, strategies as st

from sharpness_lab.simplex import CyclingError, UnboundedError, lp_box_support, simplex_max


def brute_box(A, y, vertices):
    return max(abs(v @ y) for v in vertices)


def test_small_lp():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    val, z = simplex_max(np.array([1.0, 1.0]), np.array([[1.0, 2], [3, 1]]), np.array([4.0, 6]))
    assert val == pytest.approx(2.8)
    assert z == pytest.approx([1.6, 1.2])


def test_unbounded():
    with pytest.raises(UnboundedError):
        simplex_max(np.array([1.0, 0]), np.array([[0.0, 1.0]]), np.array([1.0]))


def test_iteration_cap():
    c = np.ones(3)
    A = np.eye(3)
    b = np.ones(3)
    with pytest.raises(CyclingError):
        simplex_max(c, A, b, max_iter=1)


def test_degenerate_klee_minty_like():
    # degenerate vertex at the origin: several constraints with b = 0
    A = np.array([[1.0, -1], [-1, 1], [1, 1], [0.5, -0.5]])
    b = np.array([0.0, 0.0, 2.0, 0.0])
    val, z = simplex_max(np.array([1.0, 1.0]), A, b)
    assert val == pytest.approx(2.0)


def test_box_support_square():
    val, t = lp_box_support(np.eye(2), np.array([3.0, 4.0]))
    assert val == pytest.approx(7.0)
    assert t == pytest.approx([1.0, 1.0])


def test_box_support_rotated():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    val, t = lp_box_support(A, np.array([1.0, 0.0]))
    assert val == pytest.approx(1.0)
    assert t == pytest.approx([1.0, 0.0])


def test_box_support_zero():
    val, t = lp_box_support(np.eye(3), np.zeros(3))
    assert val == 0.0 and not np.any(t)


@given(st.integers(0, 2**31 - 1))
def test_box_support_matches_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((int(rng.integers(2, 6)), 2))
    if np.linalg.matrix_rank(A) < 2:
        return
    y = rng.standard_normal(2)
    # vertices of {|A t| <= 1} in the plane: intersections of pairs of lines
    verts = []
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            for si in (-1, 1):
                for sj in (-1, 1):
                    M = A[[i, j]]
                    if abs(np.linalg.det(M)) < 1e-9:
                        continue
                    t = np.linalg.solve(M, [si, sj])
                    if np.all(np.abs(A @ t) <= 1 + 1e-9):
                        verts.append(t)
    val, t = lp_box_support(A, y)
    assert val == pytest.approx(brute_box(A, y, verts), rel=1e-9, abs=1e-9)
    assert np.all(np.abs(A @ t) <= 1 + 1e-8)
    assert t @ y == pytest.approx(val, rel=1e-9, abs=1e-9)
