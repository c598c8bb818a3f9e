"""Box mesh of hexahedral elements and the affine geometric factors.

The domain is a lattice of ex x ey x ez axis-aligned cubical elements of
uniform edge length. Metric terms for this mapping are diagonal: the three
cross components vanish and the diagonal ones reduce to the quadrature
weight product times h/2 per nodal point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import PolynomialBasis

__all__ = ["BoxMesh", "GeomFactors", "build_mesh", "build_geom"]


@dataclass(frozen=True)
class BoxMesh:
    """Element lattice: counts per axis, points per dimension, edge length."""

    ex: int
    ey: int
    ez: int
    n: int
    element_extent: float

    @property
    def num_elements(self) -> int:
        return self.ex * self.ey * self.ez

    @property
    def dofs(self) -> int:
        """Element-local degrees of freedom E * n^3 (interface nodes duplicated)."""
        return self.num_elements * self.n**3


@dataclass(frozen=True)
class GeomFactors:
    """Symmetric metric tensor per nodal point, six components per point.

    values has shape (E, 6, n, n, n) indexed [e, m, k, j, i]; component
    order m = 0..5 lays out the tensor as
        (g1 g2 g3; g2 g4 g5; g3 g5 g6).
    """

    values: np.ndarray

    @property
    def num_elements(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[2]


def build_mesh(ex: int, ey: int, ez: int, n: int, element_extent: float) -> BoxMesh:
    for name, v in (("ex", ex), ("ey", ey), ("ez", ez), ("n", n)):
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not element_extent > 0.0:
        raise ValueError(f"element_extent must be positive, got {element_extent!r}")
    return BoxMesh(ex=int(ex), ey=int(ey), ez=int(ez), n=int(n),
                   element_extent=float(element_extent))


def build_geom(mesh: BoxMesh, basis: PolynomialBasis) -> GeomFactors:
    """Geometric factors for the uniform axis-aligned box mapping.

    For edge length h the affine map gives g1 = g4 = g6 = w_i w_j w_k * h/2
    (weight times Jacobian times squared inverse metric) and zero cross
    terms. The output is deterministic and frozen.
    """
    if basis.n != mesh.n:
        raise ValueError(f"basis has n={basis.n} but mesh has n={mesh.n}")
    n = mesh.n
    w = basis.weights
    wprod = w[:, None, None] * w[None, :, None] * w[None, None, :]  # [k, j, i]
    diag = wprod * (mesh.element_extent / 2.0)

    g = np.zeros((mesh.num_elements, 6, n, n, n))
    g[:, 0] = diag
    g[:, 3] = diag
    g[:, 5] = diag
    g.flags.writeable = False
    return GeomFactors(values=g)
