"""Dense tableau simplex for the tiny LPs behind polytope support functions.

Only the form ``max c.z  s.t.  A z <= b, z >= 0`` with ``b >= 0`` is needed:
the origin is always feasible, so the slack basis starts the method and no
phase one is required.
"""
import numpy as np

FEAS_TOL = 1e-10


class UnboundedError(ArithmeticError):
    """The objective is unbounded above on the feasible set."""


class CyclingError(ArithmeticError):
    """Pivot budget exhausted."""


def simplex_max(c, A, b, max_iter=None):
    """Maximize ``c.z`` subject to ``A z <= b``, ``z >= 0`` with ``b >= 0``.

    Pivots with Dantzig's rule and switches to Bland's rule once a run of
    degenerate pivots is seen, which rules out cycling.

    Returns ``(value, z)``.
    """
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    rows, n = A.shape
    if np.any(b < -FEAS_TOL):
        raise ValueError("right-hand side must be nonnegative")

    T = np.zeros((rows + 1, n + rows + 1))
    T[:rows, :n] = A
    T[:rows, n:n + rows] = np.eye(rows)
    T[:rows, -1] = np.maximum(b, 0.0)
    T[-1, :n] = -c
    basis = list(range(n, n + rows))

    if max_iter is None:
        max_iter = 50 * (n + rows)
    bland = False
    degenerate_run = 0
    for _ in range(max_iter):
        cost = T[-1, :-1]
        if bland:
            candidates = np.flatnonzero(cost < -FEAS_TOL)
            if candidates.size == 0:
                break
            col = int(candidates[0])
        else:
            col = int(np.argmin(cost))
            if cost[col] >= -FEAS_TOL:
                break

        column = T[:rows, col]
        positive = column > FEAS_TOL
        if not positive.any():
            raise UnboundedError("LP is unbounded")
        ratios = np.full(rows, np.inf)
        ratios[positive] = T[:rows, -1][positive] / column[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + FEAS_TOL)
        # Bland: leave with the smallest basic variable index among ties
        row = int(min(ties, key=lambda r: basis[r])) if bland else int(ties[0])

        if best <= FEAS_TOL:
            degenerate_run += 1
            if degenerate_run > rows:
                bland = True
        else:
            degenerate_run = 0

        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        basis[row] = col
    else:
        raise CyclingError(f"no optimum after {max_iter} pivots")

    z = np.zeros(n + rows)
    z[basis] = T[:rows, -1]
    return float(T[-1, -1]), z[:n]


def lp_box_support(rows, y):
    """Maximize ``(t, y)`` over ``{t : |(a_i, t)| <= 1 for all rows a_i}``.

    Free variables are split as ``t = t+ - t-``. Returns ``(value, t)``.
    """
    A = np.atleast_2d(np.asarray(rows, dtype=float))
    y = np.asarray(y, dtype=float)
    m = A.shape[1]
    if not np.any(y):
        return 0.0, np.zeros(m)
    G = np.block([[A, -A], [-A, A]])
    h = np.ones(2 * A.shape[0])
    value, z = simplex_max(np.concatenate([y, -y]), G, h)
    t = z[:m] - z[m:]
    return value, t
