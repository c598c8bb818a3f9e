"""Gauss-Lobatto-Legendre basis machinery.

Computes the GLL quadrature nodes and weights on [-1, 1] and the nodal
Lagrange differentiation matrix used by the tensor-product operator.
The nodes are the zeros of (1 - x^2) * P'_{n-1}(x), i.e. the interval
endpoints plus the extrema of the Legendre polynomial of degree n - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PolynomialBasis", "build_basis"]

MIN_POINTS = 2
MAX_POINTS = 16

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class PolynomialBasis:
    """1D GLL basis of n points (polynomial degree n - 1).

    nodes   : n reference coordinates in [-1, 1], ascending
    weights : n positive quadrature weights, summing to 2
    diff    : (n, n) differentiation matrix; diff[i, l] is the derivative
              of the l-th Lagrange cardinal function at node i
    diff_t  : transpose of diff, stored explicitly for the second
              contraction phase
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    diff: np.ndarray
    diff_t: np.ndarray


def _legendre(m: int, x: np.ndarray):
    """Evaluate P_m and P'_m by the Bonnet recurrences.

    The derivative recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k avoids the
    1/(1-x^2) singularity at the endpoints.
    """
    x = np.asarray(x, dtype=np.float64)
    p_prev = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    if m == 0:
        return p_prev, dp_prev
    p = x.copy()
    dp = np.ones_like(x)
    for k in range(1, m):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp_next = dp_prev + (2 * k + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def _interior_nodes(n: int) -> np.ndarray:
    """Interior GLL nodes: zeros of P'_{n-1}, by Newton iteration.

    Initial guesses are the Chebyshev-Gauss-Lobatto points
    -cos(pi * i / (n - 1)). The second derivative in the Newton update
    comes from the Legendre differential equation,
    (1 - x^2) P'' = 2 x P' - m (m + 1) P.
    """
    m = n - 1
    x = -np.cos(np.pi * np.arange(1, m) / m)
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = _legendre(m, x)
        ddp = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x)
        step = dp / ddp
        x = x - step
        if np.max(np.abs(step)) <= _NEWTON_TOL:
            return x
    raise RuntimeError(
        f"GLL node solve did not converge for n={n} "
        f"(tol={_NEWTON_TOL}, max {_NEWTON_MAX_ITER} iterations)"
    )


def _lagrange_diff_matrix(x: np.ndarray) -> np.ndarray:
    """Differentiation matrix D[i, l] = L'_l(x_i) for Lagrange cardinals.

    Off-diagonal entries use the product weights c_k = prod_{j!=k}(x_k - x_j);
    the diagonal is the negative row sum so constants differentiate to zero.
    """
    n = x.size
    c = np.ones(n)
    for k in range(n):
        for j in range(n):
            if j != k:
                c[k] *= x[k] - x[j]
    d = np.zeros((n, n))
    for i in range(n):
        for l in range(n):
            if l != i:
                d[i, l] = c[i] / (c[l] * (x[i] - x[l]))
        d[i, i] = -np.sum(d[i, :])
    return d


def build_basis(n: int) -> PolynomialBasis:
    """Build the GLL basis for n points per dimension (2 <= n <= 16).

    Weights follow w_i = 2 / (n (n-1) P_{n-1}(x_i)^2). All returned arrays
    are frozen (non-writeable) so the basis can be shared across workers.
    """
    if not isinstance(n, (int, np.integer)) or not MIN_POINTS <= n <= MAX_POINTS:
        raise ValueError(f"n must be an integer in [{MIN_POINTS}, {MAX_POINTS}], got {n!r}")
    n = int(n)

    nodes = np.empty(n)
    nodes[0] = -1.0
    nodes[-1] = 1.0
    if n > 2:
        nodes[1:-1] = _interior_nodes(n)

    p, _ = _legendre(n - 1, nodes)
    weights = 2.0 / (n * (n - 1) * p * p)

    diff = _lagrange_diff_matrix(nodes)
    diff_t = diff.T.copy()

    for arr in (nodes, weights, diff, diff_t):
        arr.flags.writeable = False
    return PolynomialBasis(n=n, nodes=nodes, weights=weights, diff=diff, diff_t=diff_t)
