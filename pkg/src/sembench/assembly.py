"""Direct-stiffness summation and Dirichlet masking.

Coincident interface nodes of neighboring elements are identified by exact
integer lattice arithmetic on the global (ex(n-1)+1) x (ey(n-1)+1) x
(ez(n-1)+1) point grid; no floating-point coordinate matching. dssum
gathers every duplicated class into a global accumulator and scatters the
sum back, so all copies of a physical node end up holding the same value.
Contributions within a class accumulate in ascending local-index order,
which makes the reduction deterministic.

Homogeneous Dirichlet conditions on all six outer faces are enforced by a
0/1 mask; the global operator is mask(dssum(A_local(mask(u)))), which is
symmetric positive semidefinite in the multiplicity-weighted inner product
on inter-element-consistent masked fields.

Word-traffic inventory (full-size arrays, 8-byte words, D = E n^3):
dssum reads D and writes D; mask reads 2 D (field and mask) and writes D.
Neither contributes to the flop counter: the summation adds and 0/1
multiplies are outside the equal-weight operator inventory.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .basis import PolynomialBasis
from .fields import validate_field
from .kernels import KernelVariant, TrafficCounters, apply_ax
from .mesh import BoxMesh, GeomFactors

__all__ = ["Topology", "OperatorTimers", "build_topology", "dssum", "mask", "apply_global"]


@dataclass(frozen=True)
class Topology:
    """Global node identification for a box lattice.

    global_id    : (E, n, n, n) int64, shared across coincident points
    multiplicity : (E, n, n, n) int64 copies per global id (1, 2, 4 or 8)
    mask         : (E, n, n, n) float64, 0.0 on the outer boundary, 1.0 inside
    num_global   : count of distinct global ids
    """

    num_elements: int
    n: int
    global_id: np.ndarray
    multiplicity: np.ndarray
    mask: np.ndarray
    num_global: int
    inv_multiplicity: np.ndarray = field(repr=False)

    @property
    def dofs(self) -> int:
        return self.num_elements * self.n**3


@dataclass
class OperatorTimers:
    """Scoped wall-clock accumulators for the global operator pieces."""

    ax_seconds: float = 0.0
    dssum_seconds: float = 0.0
    applies: int = 0


def build_topology(mesh: BoxMesh) -> Topology:
    n = mesh.n
    ex, ey, ez = mesh.ex, mesh.ey, mesh.ez
    gx_count = ex * (n - 1) + 1
    gy_count = ey * (n - 1) + 1
    gz_count = ez * (n - 1) + 1

    e_idx = np.arange(mesh.num_elements, dtype=np.int64)
    exi = e_idx % ex
    eyi = (e_idx // ex) % ey
    ezi = e_idx // (ex * ey)

    pt = np.arange(n, dtype=np.int64)
    gx = exi[:, None, None, None] * (n - 1) + pt[None, None, None, :]
    gy = eyi[:, None, None, None] * (n - 1) + pt[None, None, :, None]
    gz = ezi[:, None, None, None] * (n - 1) + pt[None, :, None, None]

    gid = (gz * gy_count + gy) * gx_count + gx
    num_global = gx_count * gy_count * gz_count

    counts = np.bincount(gid.ravel(), minlength=num_global)
    multiplicity = counts[gid]

    interior = (
        (gx > 0) & (gx < gx_count - 1)
        & (gy > 0) & (gy < gy_count - 1)
        & (gz > 0) & (gz < gz_count - 1)
    )
    bc_mask = interior.astype(np.float64)

    inv_mult = (1.0 / multiplicity.astype(np.float64)).ravel()
    for arr in (gid, multiplicity, bc_mask, inv_mult):
        arr.flags.writeable = False
    return Topology(
        num_elements=mesh.num_elements,
        n=n,
        global_id=gid,
        multiplicity=multiplicity,
        mask=bc_mask,
        num_global=num_global,
        inv_multiplicity=inv_mult,
    )


def dssum(f: np.ndarray, topo: Topology, counters: TrafficCounters | None = None) -> np.ndarray:
    """Sum every class of coincident nodes; all copies receive the total."""
    validate_field(f, topo.num_elements, topo.n)
    acc = np.bincount(topo.global_id.ravel(), weights=f.ravel(), minlength=topo.num_global)
    out = acc[topo.global_id]
    if counters is not None:
        counters.add(reads=f.size, writes=f.size)
    return out


def mask(f: np.ndarray, topo: Topology, counters: TrafficCounters | None = None) -> np.ndarray:
    """Zero the boundary nodes (pointwise product with the 0/1 mask)."""
    validate_field(f, topo.num_elements, topo.n)
    out = f * topo.mask
    if counters is not None:
        counters.add(reads=2 * f.size, writes=f.size)
    return out


def apply_global(
    u: np.ndarray,
    geom: GeomFactors,
    basis: PolynomialBasis,
    topo: Topology,
    variant: KernelVariant = KernelVariant.LAYERED,
    counters: TrafficCounters | None = None,
    timers: OperatorTimers | None = None,
    workspace=None,
) -> np.ndarray:
    """Global masked Poisson operator: mask(dssum(A_local(mask(u))))."""
    um = mask(u, topo, counters)
    if timers is None:
        w = apply_ax(um, geom, basis, variant, counters, workspace)
        w = dssum(w, topo, counters)
    else:
        t0 = time.perf_counter()
        w = apply_ax(um, geom, basis, variant, counters, workspace)
        timers.ax_seconds += time.perf_counter() - t0
        timers.applies += 1
        t0 = time.perf_counter()
        w = dssum(w, topo, counters)
        timers.dssum_seconds += time.perf_counter() - t0
    return mask(w, topo, counters)
