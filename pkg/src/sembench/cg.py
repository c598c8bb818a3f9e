"""Unpreconditioned conjugate gradient on the global masked operator.

The loop mirrors the proxy solver it models: per iteration one operator
application, three multiply-add vector updates and three weighted
reductions,

    rtz_old = rtz;  rtz = <r, r>_c
    beta    = rtz / rtz_old          (0 on the first iteration)
    p       = r + beta p
    w       = A p
    pap     = <p, w>_c
    alpha   = rtz / pap
    x      += alpha p;  r -= alpha w
    rnorm   = sqrt(<r, r>_c)

where <a, b>_c = sum a b / multiplicity weights duplicated interface
copies so the reduction equals the unique-dof inner product.

Flop accounting per iteration is the documented vector-op constant of
this loop: 2 flops per point for each of the three axpy-form updates and
2 per point for each of the two inner products and the norm reduction,
12 D in total on top of the operator flops. The multiplicity weighting
and scalar arithmetic are not counted, matching the equal-weight
convention. Word traffic per iteration: the three reductions read three
streams each (operands plus weight, 9 D), the three updates read 2 D and
write 1 D each (6 D reads, 3 D writes).

Reductions are chunked with a fixed chunk size and combined in index
order, so results are bit-reproducible for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .assembly import Topology, mask
from .fields import validate_field
from .kernels import TrafficCounters

__all__ = ["CgConfig", "CgResult", "CgBreakdownError", "weighted_dot", "cg_solve",
           "CG_VECTOR_FLOPS_PER_POINT"]

# 3 axpy updates + 3 weighted reductions at 2 flops per point each.
CG_VECTOR_FLOPS_PER_POINT = 12

_CHUNK = 1 << 16


class CgBreakdownError(RuntimeError):
    """<p, A p>_c was non-positive: the operator is not SPD on this subspace."""


@dataclass
class CgConfig:
    max_iterations: int = 100
    tolerance: float = 0.0  # 0 disables the early exit (fixed-work runs)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tolerance < 0.0:
            raise ValueError("tolerance must be non-negative")


@dataclass
class CgResult:
    solution: np.ndarray
    residual_history: np.ndarray
    iterations_run: int
    counters: TrafficCounters = field(default_factory=TrafficCounters)


@njit(cache=True, parallel=True)
def _wdot3(a, b, wgt):  # pragma: no cover - jitted
    m = a.size
    nchunks = (m + _CHUNK - 1) // _CHUNK
    partial = np.empty(nchunks)
    for c in prange(nchunks):
        lo = c * _CHUNK
        hi = min(m, lo + _CHUNK)
        s = 0.0
        for i in range(lo, hi):
            s += a[i] * b[i] * wgt[i]
        partial[c] = s
    total = 0.0
    for c in range(nchunks):
        total += partial[c]
    return total


@njit(cache=True, parallel=True)
def _axpy_into(x, y, alpha):  # x += alpha * y       # pragma: no cover - jitted
    for i in prange(x.size):
        x[i] += alpha * y[i]


@njit(cache=True, parallel=True)
def _scale_add(p, z, beta):  # p = beta * p + z      # pragma: no cover - jitted
    for i in prange(p.size):
        p[i] = beta * p[i] + z[i]


def weighted_dot(u: np.ndarray, v: np.ndarray, topo: Topology) -> float:
    """Multiplicity-weighted inner product sum(u * v / multiplicity)."""
    validate_field(u, topo.num_elements, topo.n, "u")
    validate_field(v, topo.num_elements, topo.n, "v")
    return float(_wdot3(u.ravel(), v.ravel(), topo.inv_multiplicity))


def cg_solve(
    f: np.ndarray,
    operator,
    topo: Topology,
    cfg: CgConfig,
    counters: TrafficCounters | None = None,
    callback=None,
) -> CgResult:
    """Run CG on A x = f with the given operator closure.

    `operator` maps a field to a field and must be symmetric positive
    semidefinite in the weighted inner product on the masked,
    inter-element-consistent subspace (apply_global is). The right-hand
    side is masked on entry. With tolerance 0 exactly max_iterations
    operator applications are performed, except that an exactly zero
    residual stops the loop (nothing left to solve). `callback(it, x, r)`
    is invoked after each iteration. `counters`, when given, accumulates
    the vector-op flop and word inventory documented in the module
    docstring; pass the same object to the operator closure to collect
    the kernel traffic in one place.
    """
    if counters is None:
        counters = TrafficCounters()
    dofs = topo.dofs

    r = mask(f, topo, counters)
    x = np.zeros_like(r)
    p = np.zeros_like(r)
    xf, rf = x.ravel(), r.ravel()
    pf = p.ravel()

    history: list[float] = []
    rtz = 1.0
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        rtz_old = rtz
        rtz = weighted_dot(r, r, topo)
        if rtz == 0.0:
            # exact convergence (zero right-hand side reaches this on entry)
            iterations = it
            history.append(0.0)
            counters.add(reads=3 * dofs, flops=2 * dofs)
            if callback is not None:
                callback(it, x, r)
            break
        beta = 0.0 if it == 1 else rtz / rtz_old
        _scale_add(pf, rf, beta)

        w = operator(p)
        pap = weighted_dot(p, w, topo)
        if pap <= 0.0:
            ppc = weighted_dot(p, p, topo)
            raise CgBreakdownError(
                f"<p, A p>_c = {pap:.3e} at iteration {it} "
                f"(scale <p, p>_c = {ppc:.3e}); operator is not SPD here"
            )
        alpha = rtz / pap
        wf = w.ravel()
        _axpy_into(xf, pf, alpha)
        _axpy_into(rf, wf, -alpha)
        rtr = weighted_dot(r, r, topo)
        rnorm = math.sqrt(rtr)
        history.append(rnorm)
        iterations = it
        counters.add(
            reads=(9 + 6) * dofs,
            writes=3 * dofs,
            flops=CG_VECTOR_FLOPS_PER_POINT * dofs,
        )
        if callback is not None:
            callback(it, x, r)
        if cfg.tolerance > 0.0 and rnorm < cfg.tolerance:
            break

    return CgResult(
        solution=x,
        residual_history=np.asarray(history),
        iterations_run=iterations,
        counters=counters.copy(),
    )
