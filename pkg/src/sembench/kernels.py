"""Element-local Poisson operator as a tensor-product contraction.

Three kernel variants compute the same mathematics,

  phase 1:  wr_i = sum_l D[i,l] u(l,j,k),  ws, wt analogous per direction,
            then (ur, us, ut) = G (wr, ws, wt) with the symmetric metric G,
  phase 2:  w(i,j,k) = sum_l Dt[i,l] ur(l,j,k) + Dt[j,l] us(i,l,k)
                              + Dt[k,l] ut(i,j,l),

but differ in where the intermediate values live:

  REFERENCE  full-size E*n^3 arrays for the three intermediates, traversed
             in complete passes: a derivative pass writes them, the
             geometric pass reads and rewrites them in place, the transpose
             pass reads them back. Worst temporal locality; every
             intermediate word crosses main memory twice in each direction.
  SCRATCH    per element, the nodal block and the differentiation matrix
             are staged into an element-sized scratch buffer and both
             phases run entirely in scratch; only the final block is
             written back. Refuses n > 10, mirroring the capacity cliff of
             a fixed-size fast buffer.
  LAYERED    per element, one k-layer at a time: an n^2 layer working set
             plus per-(i,j) column accumulators of length n that carry the
             k-direction contraction state across layers. Two sub-passes
             per layer (phase-1 results are finalized before phase-2
             consumption). The n = 10 path is compile-time specialized with
             the contraction loops unrolled; a generic-n path covers other
             sizes. No size ceiling.

Traffic accounting counts 8-byte words moved to or from full-size
(E x n^3) arrays only; per-element scratch, layer buffers, column
accumulators and the n^2 differentiation matrix are exempt. Word counts
per apply, with D = E n^3:

  variant     reads                              writes
  REFERENCE   13 D  (u, 6 geom, 3+3 intermediates)  7 D  (3+3 intermediates, w)
  SCRATCH      7 D  (u, 6 geom)                     1 D  (w)
  LAYERED      7 D  (u, 6 geom)                     1 D  (w)

Flops per apply are D (12 n + 15): 6n for the three derivative dot
products, 15 for the metric combination (9 multiplies, 6 adds), 6n for
the transpose contraction, weighting multiply and add equally. The count
is a property of the mandated contraction, invariant under the variants'
reassociation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .basis import PolynomialBasis
from .mesh import GeomFactors

__all__ = [
    "KernelVariant",
    "TrafficCounters",
    "ScratchCapacityError",
    "apply_ax",
    "flops_per_apply",
    "apply_read_words",
    "apply_write_words",
    "reference_workspace",
    "SCRATCH_MAX_POINTS",
    "SCRATCH_WORD_BUDGET",
]

# Largest n the scratch variant accepts, and the fast-buffer budget the
# per-element staging is asserted against (6144 words = 48 KiB).
SCRATCH_MAX_POINTS = 10
SCRATCH_WORD_BUDGET = 6144


class KernelVariant(enum.Enum):
    REFERENCE = "reference"
    SCRATCH = "scratch"
    LAYERED = "layered"

    @classmethod
    def parse(cls, name: str) -> "KernelVariant":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown kernel variant {name!r} (expected one of {valid})") from None


class ScratchCapacityError(ValueError):
    """The scratch variant cannot stage an element of this size."""


@dataclass
class TrafficCounters:
    """Main-memory word traffic and flop tally for instrumented runs.

    reads/writes count 8-byte words moved across full-size arrays per the
    module inventory above; flops follow the equal-weight convention
    (multiply = add = 1, a fused multiply-add counts 2). Boundary-mask
    multiplies and interface summation adds are not flop-counted; the
    mandated operator and solver vector work is.
    """

    reads: int = 0
    writes: int = 0
    flops: int = 0

    def add(self, reads: int = 0, writes: int = 0, flops: int = 0) -> None:
        if reads < 0 or writes < 0 or flops < 0:
            raise ValueError("counter increments must be non-negative")
        self.reads += reads
        self.writes += writes
        self.flops += flops

    def copy(self) -> "TrafficCounters":
        return TrafficCounters(self.reads, self.writes, self.flops)


def flops_per_apply(dofs: int, n: int) -> int:
    """Flops of one local operator application: D * (12 n + 15)."""
    if dofs < 1 or n < 1:
        raise ValueError("dofs and n must be positive")
    return dofs * (12 * n + 15)


def apply_read_words(variant: KernelVariant, dofs: int) -> int:
    """Words read from full-size arrays by one apply (inventory above)."""
    return dofs * (13 if variant is KernelVariant.REFERENCE else 7)


def apply_write_words(variant: KernelVariant, dofs: int) -> int:
    """Words written to full-size arrays by one apply (inventory above)."""
    return dofs * (7 if variant is KernelVariant.REFERENCE else 1)


def scratch_words(n: int) -> int:
    """Per-element scratch footprint of the SCRATCH variant, in words:
    nodal block, three intermediate blocks, differentiation matrix."""
    return 4 * n**3 + n * n


def reference_workspace(num_elements: int, n: int):
    """Allocate the three full-size intermediate arrays for REFERENCE.

    Passing the same workspace to repeated applies keeps benchmark pages
    resident; contents are overwritten every call.
    """
    shape = (num_elements, n, n, n)
    return np.empty(shape), np.empty(shape), np.empty(shape)


# ---------------------------------------------------------------------------
# REFERENCE: full-size intermediates, three complete passes.
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _ax_reference(u, g, dx, dxt, ur, us, ut, w):  # pragma: no cover - jitted
    E = u.shape[0]
    n = u.shape[3]
    # derivative pass: write the three intermediate arrays
    for e in prange(E):
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    ar = 0.0
                    as_ = 0.0
                    at = 0.0
                    for l in range(n):
                        ar += dx[i, l] * u[e, k, j, l]
                        as_ += dx[j, l] * u[e, k, l, i]
                        at += dx[k, l] * u[e, l, j, i]
                    ur[e, k, j, i] = ar
                    us[e, k, j, i] = as_
                    ut[e, k, j, i] = at
    # geometric pass: combine with the metric, rewriting in place
    for e in prange(E):
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    wr = ur[e, k, j, i]
                    ws = us[e, k, j, i]
                    wt = ut[e, k, j, i]
                    g1 = g[e, 0, k, j, i]
                    g2 = g[e, 1, k, j, i]
                    g3 = g[e, 2, k, j, i]
                    g4 = g[e, 3, k, j, i]
                    g5 = g[e, 4, k, j, i]
                    g6 = g[e, 5, k, j, i]
                    ur[e, k, j, i] = g1 * wr + g2 * ws + g3 * wt
                    us[e, k, j, i] = g2 * wr + g4 * ws + g5 * wt
                    ut[e, k, j, i] = g3 * wr + g5 * ws + g6 * wt
    # transpose pass: contract the intermediates into the output
    for e in prange(E):
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc += dxt[i, l] * ur[e, k, j, l]
                        acc += dxt[j, l] * us[e, k, l, i]
                        acc += dxt[k, l] * ut[e, l, j, i]
                    w[e, k, j, i] = acc


# ---------------------------------------------------------------------------
# SCRATCH: whole element staged into a per-worker buffer, single pass.
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _ax_scratch(u, g, dx, w):  # pragma: no cover - jitted
    E = u.shape[0]
    n = u.shape[3]
    for e in prange(E):
        su = np.empty((n, n, n))
        sur = np.empty((n, n, n))
        sus = np.empty((n, n, n))
        sut = np.empty((n, n, n))
        sd = np.empty((n, n))
        for i in range(n):
            for l in range(n):
                sd[i, l] = dx[i, l]
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    su[k, j, i] = u[e, k, j, i]
        # phase 1 entirely in scratch; metric read per point
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    wr = 0.0
                    ws = 0.0
                    wt = 0.0
                    for l in range(n):
                        wr += sd[i, l] * su[k, j, l]
                        ws += sd[j, l] * su[k, l, i]
                        wt += sd[k, l] * su[l, j, i]
                    g1 = g[e, 0, k, j, i]
                    g2 = g[e, 1, k, j, i]
                    g3 = g[e, 2, k, j, i]
                    g4 = g[e, 3, k, j, i]
                    g5 = g[e, 4, k, j, i]
                    g6 = g[e, 5, k, j, i]
                    sur[k, j, i] = g1 * wr + g2 * ws + g3 * wt
                    sus[k, j, i] = g2 * wr + g4 * ws + g5 * wt
                    sut[k, j, i] = g3 * wr + g5 * ws + g6 * wt
        # phase 2 from scratch; transpose read of sd stands in for diff_t
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc += sd[l, i] * sur[k, j, l]
                        acc += sd[l, j] * sus[k, l, i]
                        acc += sd[l, k] * sut[l, j, i]
                    w[e, k, j, i] = acc


# ---------------------------------------------------------------------------
# LAYERED: per-layer lock-step walk with per-(i,j) column accumulators.
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _ax_layered_generic(u, g, dx, dxt, w):  # pragma: no cover - jitted
    E = u.shape[0]
    n = u.shape[3]
    for e in prange(E):
        sd = np.empty((n, n))
        sdt = np.empty((n, n))
        for i in range(n):
            for l in range(n):
                sd[i, l] = dx[i, l]
                sdt[i, l] = dxt[i, l]
        # per-(i,j) length-n column state: preloaded u columns and the
        # running output accumulators
        ru = np.empty((n, n, n))  # [j, i, l]
        rw = np.zeros((n, n, n))  # [j, i, k']
        shu = np.empty((n, n))
        shur = np.empty((n, n))
        shus = np.empty((n, n))
        shut = np.empty((n, n))
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    ru[j, i, k] = u[e, k, j, i]
        for k in range(n):
            # sub-pass 1: finalize phase-1 results for this layer
            for j in range(n):
                for i in range(n):
                    shu[j, i] = ru[j, i, k]
            for j in range(n):
                for i in range(n):
                    wr = 0.0
                    ws = 0.0
                    wt = 0.0
                    for l in range(n):
                        wr += sd[i, l] * shu[j, l]
                        ws += sd[j, l] * shu[l, i]
                        wt += sd[k, l] * ru[j, i, l]
                    g1 = g[e, 0, k, j, i]
                    g2 = g[e, 1, k, j, i]
                    g3 = g[e, 2, k, j, i]
                    g4 = g[e, 3, k, j, i]
                    g5 = g[e, 4, k, j, i]
                    g6 = g[e, 5, k, j, i]
                    shur[j, i] = g1 * wr + g2 * ws + g3 * wt
                    shus[j, i] = g2 * wr + g4 * ws + g5 * wt
                    shut[j, i] = g3 * wr + g5 * ws + g6 * wt
            # sub-pass 2: phase-2 consumption of the layer; the t-direction
            # contribution scatters across the column accumulators
            for j in range(n):
                for i in range(n):
                    accr = 0.0
                    accs = 0.0
                    for l in range(n):
                        accr += sdt[i, l] * shur[j, l]
                        accs += sdt[j, l] * shus[l, i]
                    rw[j, i, k] += accr + accs
                    ut_ji = shut[j, i]
                    for kk in range(n):
                        rw[j, i, kk] += sdt[kk, k] * ut_ji
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    w[e, k, j, i] = rw[j, i, k]


@njit(cache=True, parallel=True)
def _ax_layered_n10(u, g, dx, dxt, w):  # pragma: no cover - jitted
    """n = 10 specialization of the layered kernel, contraction loops unrolled."""
    E = u.shape[0]
    for e in prange(E):
        sd = np.empty((10, 10))
        sdt = np.empty((10, 10))
        for i in range(10):
            for l in range(10):
                sd[i, l] = dx[i, l]
                sdt[i, l] = dxt[i, l]
        ru = np.empty((10, 10, 10))
        rw = np.zeros((10, 10, 10))
        shu = np.empty((10, 10))
        shur = np.empty((10, 10))
        shus = np.empty((10, 10))
        shut = np.empty((10, 10))
        for k in range(10):
            for j in range(10):
                for i in range(10):
                    ru[j, i, k] = u[e, k, j, i]
        for k in range(10):
            for j in range(10):
                for i in range(10):
                    shu[j, i] = ru[j, i, k]
            for j in range(10):
                for i in range(10):
                    wr = (sd[i, 0] * shu[j, 0] + sd[i, 1] * shu[j, 1]
                          + sd[i, 2] * shu[j, 2] + sd[i, 3] * shu[j, 3]
                          + sd[i, 4] * shu[j, 4] + sd[i, 5] * shu[j, 5]
                          + sd[i, 6] * shu[j, 6] + sd[i, 7] * shu[j, 7]
                          + sd[i, 8] * shu[j, 8] + sd[i, 9] * shu[j, 9])
                    ws = (sd[j, 0] * shu[0, i] + sd[j, 1] * shu[1, i]
                          + sd[j, 2] * shu[2, i] + sd[j, 3] * shu[3, i]
                          + sd[j, 4] * shu[4, i] + sd[j, 5] * shu[5, i]
                          + sd[j, 6] * shu[6, i] + sd[j, 7] * shu[7, i]
                          + sd[j, 8] * shu[8, i] + sd[j, 9] * shu[9, i])
                    wt = (sd[k, 0] * ru[j, i, 0] + sd[k, 1] * ru[j, i, 1]
                          + sd[k, 2] * ru[j, i, 2] + sd[k, 3] * ru[j, i, 3]
                          + sd[k, 4] * ru[j, i, 4] + sd[k, 5] * ru[j, i, 5]
                          + sd[k, 6] * ru[j, i, 6] + sd[k, 7] * ru[j, i, 7]
                          + sd[k, 8] * ru[j, i, 8] + sd[k, 9] * ru[j, i, 9])
                    g1 = g[e, 0, k, j, i]
                    g2 = g[e, 1, k, j, i]
                    g3 = g[e, 2, k, j, i]
                    g4 = g[e, 3, k, j, i]
                    g5 = g[e, 4, k, j, i]
                    g6 = g[e, 5, k, j, i]
                    shur[j, i] = g1 * wr + g2 * ws + g3 * wt
                    shus[j, i] = g2 * wr + g4 * ws + g5 * wt
                    shut[j, i] = g3 * wr + g5 * ws + g6 * wt
            for j in range(10):
                for i in range(10):
                    accr = (sdt[i, 0] * shur[j, 0] + sdt[i, 1] * shur[j, 1]
                            + sdt[i, 2] * shur[j, 2] + sdt[i, 3] * shur[j, 3]
                            + sdt[i, 4] * shur[j, 4] + sdt[i, 5] * shur[j, 5]
                            + sdt[i, 6] * shur[j, 6] + sdt[i, 7] * shur[j, 7]
                            + sdt[i, 8] * shur[j, 8] + sdt[i, 9] * shur[j, 9])
                    accs = (sdt[j, 0] * shus[0, i] + sdt[j, 1] * shus[1, i]
                            + sdt[j, 2] * shus[2, i] + sdt[j, 3] * shus[3, i]
                            + sdt[j, 4] * shus[4, i] + sdt[j, 5] * shus[5, i]
                            + sdt[j, 6] * shus[6, i] + sdt[j, 7] * shus[7, i]
                            + sdt[j, 8] * shus[8, i] + sdt[j, 9] * shus[9, i])
                    rw[j, i, k] += accr + accs
                    ut_ji = shut[j, i]
                    rw[j, i, 0] += sdt[0, k] * ut_ji
                    rw[j, i, 1] += sdt[1, k] * ut_ji
                    rw[j, i, 2] += sdt[2, k] * ut_ji
                    rw[j, i, 3] += sdt[3, k] * ut_ji
                    rw[j, i, 4] += sdt[4, k] * ut_ji
                    rw[j, i, 5] += sdt[5, k] * ut_ji
                    rw[j, i, 6] += sdt[6, k] * ut_ji
                    rw[j, i, 7] += sdt[7, k] * ut_ji
                    rw[j, i, 8] += sdt[8, k] * ut_ji
                    rw[j, i, 9] += sdt[9, k] * ut_ji
        for k in range(10):
            for j in range(10):
                for i in range(10):
                    w[e, k, j, i] = rw[j, i, k]


def apply_ax(
    u: np.ndarray,
    geom: GeomFactors,
    basis: PolynomialBasis,
    variant: KernelVariant = KernelVariant.LAYERED,
    counters: TrafficCounters | None = None,
    workspace=None,
) -> np.ndarray:
    """Apply the element-local operator, w = A_local u.

    All variants agree to relative 1e-12 (they may reassociate the
    contractions). `workspace` optionally supplies the REFERENCE variant's
    three full-size intermediate arrays so benchmark loops can reuse pages.
    Elements are processed in parallel over disjoint ranges; output is
    bit-identical across runs for a fixed kernel build.
    """
    if not isinstance(variant, KernelVariant):
        variant = KernelVariant.parse(variant)
    g = geom.values
    n = basis.n
    if u.ndim != 4 or u.shape[1:] != (n, n, n):
        raise ValueError(f"field shape {u.shape} does not match basis n={n}")
    if g.shape != (u.shape[0], 6, n, n, n):
        raise ValueError(f"geometry shape {g.shape} does not match field {u.shape}")
    u = np.ascontiguousarray(u, dtype=np.float64)
    dofs = u.size

    w = np.empty_like(u)
    if variant is KernelVariant.REFERENCE:
        if workspace is None:
            workspace = reference_workspace(u.shape[0], n)
        ur, us, ut = workspace
        if ur.shape != u.shape or us.shape != u.shape or ut.shape != u.shape:
            raise ValueError("workspace arrays must match the field shape")
        _ax_reference(u, g, basis.diff, basis.diff_t, ur, us, ut, w)
    elif variant is KernelVariant.SCRATCH:
        if n > SCRATCH_MAX_POINTS:
            raise ScratchCapacityError(
                f"scratch variant supports at most {SCRATCH_MAX_POINTS} points per "
                f"dimension, got n={n}"
            )
        assert scratch_words(n) <= SCRATCH_WORD_BUDGET, "element does not fit the scratch budget"
        _ax_scratch(u, g, basis.diff, w)
    else:
        if n == 10:
            _ax_layered_n10(u, g, basis.diff, basis.diff_t, w)
        else:
            _ax_layered_generic(u, g, basis.diff, basis.diff_t, w)

    if counters is not None:
        counters.add(
            reads=apply_read_words(variant, dofs),
            writes=apply_write_words(variant, dofs),
            flops=flops_per_apply(dofs, n),
        )
    return w
