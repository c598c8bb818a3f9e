"""Invariant suite and the independent oracles it checks against.

Every property is a named callable that raises AssertionError on
violation; the runner prints one PASS/FAIL line per property and is the
CI gate behind the `verify` command. The oracles here are deliberately
independent of the tensor-contraction code path: the dense local operator
is assembled from Kronecker products of the differentiation matrix and
the pointwise metric, and the interface summation oracle groups local
indices by global id in a dictionary.
"""

from __future__ import annotations

import sys

import numpy as np

from . import perf, report
from .assembly import OperatorTimers, apply_global, build_topology, dssum, mask
from .basis import build_basis
from .cg import CgConfig, cg_solve, weighted_dot
from .fields import constant_field, random_field
from .kernels import (KernelVariant, ScratchCapacityError, TrafficCounters,
                      _ax_layered_generic, apply_ax, apply_read_words,
                      apply_write_words, flops_per_apply)
from .mesh import build_geom, build_mesh

__all__ = ["assemble_dense_local", "dssum_oracle", "consistent_random_field",
           "rel_diff", "PROPERTIES", "run_verify"]

_VARIANTS = (KernelVariant.REFERENCE, KernelVariant.SCRATCH, KernelVariant.LAYERED)

# symmetric component index of the metric tensor, (direction, direction) -> 0..5
_G_INDEX = ((0, 1, 2), (1, 3, 4), (2, 4, 5))


def rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm difference relative to the larger operand magnitude."""
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def assemble_dense_local(basis, geom, element: int = 0) -> np.ndarray:
    """Dense n^3 x n^3 local operator, assembled without sum factorization.

    Rows and columns follow the field's flat [k, j, i] order (i fastest).
    Each directional derivative is a Kronecker product of the 1D
    differentiation matrix with identities, and the nine metric blocks are
    applied as diagonal scalings, so the construction shares only the
    basis and the geometry with the tensor kernels.
    """
    n = basis.n
    eye = np.eye(n)
    d = np.asarray(basis.diff)
    derivs = (
        np.kron(eye, np.kron(eye, d)),  # d/dr, i-direction
        np.kron(eye, np.kron(d, eye)),  # d/ds, j-direction
        np.kron(d, np.kron(eye, eye)),  # d/dt, k-direction
    )
    g = geom.values[element]
    K = np.zeros((n**3, n**3))
    for a in range(3):
        for b in range(3):
            diag = g[_G_INDEX[a][b]].ravel()
            K += derivs[a].T @ (diag[:, None] * derivs[b])
    return K


def apply_dense(basis, geom, u: np.ndarray) -> np.ndarray:
    """Apply the dense local operator element by element."""
    out = np.empty_like(u)
    for e in range(u.shape[0]):
        K = assemble_dense_local(basis, geom, e)
        out[e] = (K @ u[e].ravel()).reshape(u.shape[1:])
    return out


def dssum_oracle(f: np.ndarray, topo) -> np.ndarray:
    """Group local values by global id and sum, one dictionary pass."""
    flat = f.ravel()
    gid = topo.global_id.ravel()
    sums: dict[int, float] = {}
    for idx in range(flat.size):
        key = int(gid[idx])
        sums[key] = sums.get(key, 0.0) + float(flat[idx])
    return np.array([sums[int(g)] for g in gid]).reshape(f.shape)


def consistent_random_field(num_elements: int, n: int, topo, seed: int) -> np.ndarray:
    """Random masked field with coincident interface copies agreeing.

    The solver state lives on this subspace (the right-hand side is summed
    across interfaces before use), and the weighted-inner-product symmetry
    and positivity of the global operator hold there.
    """
    return mask(dssum(random_field(num_elements, n, seed), topo), topo)


def _setup(ex, ey, ez, n, extent=1.0):
    basis = build_basis(n)
    mesh = build_mesh(ex, ey, ez, n, extent)
    geom = build_geom(mesh, basis)
    topo = build_topology(mesh)
    return basis, mesh, geom, topo


# ---------------------------------------------------------------------------
# basis properties
# ---------------------------------------------------------------------------


def check_basis_frozen_values():
    b2 = build_basis(2)
    assert np.array_equal(b2.nodes, [-1.0, 1.0])
    assert np.array_equal(b2.weights, [1.0, 1.0])
    assert np.allclose(b2.diff, [[-0.5, 0.5], [-0.5, 0.5]], rtol=0, atol=1e-15)
    b3 = build_basis(3)
    assert np.max(np.abs(b3.nodes - [-1.0, 0.0, 1.0])) <= 1e-15
    assert np.max(np.abs(b3.weights - [1 / 3, 4 / 3, 1 / 3])) <= 1e-14
    b4 = build_basis(4)
    root = 1.0 / np.sqrt(5.0)
    assert np.max(np.abs(b4.nodes[1:3] - [-root, root])) <= 1e-14


def check_basis_node_layout():
    for n in range(2, 17):
        b = build_basis(n)
        assert b.nodes[0] == -1.0 and b.nodes[-1] == 1.0
        assert np.all(np.diff(b.nodes) > 0), f"nodes not ascending for n={n}"
        assert np.max(np.abs(b.nodes + b.nodes[::-1])) <= 1e-14, f"asymmetry at n={n}"


def check_basis_weights():
    for n in range(2, 17):
        b = build_basis(n)
        assert np.all(b.weights > 0)
        assert abs(np.sum(b.weights) - 2.0) <= 1e-13


def check_basis_diff_rows():
    for n in range(2, 17):
        b = build_basis(n)
        assert np.max(np.abs(b.diff @ np.ones(n))) <= 1e-12


def check_basis_monomials():
    for n in range(2, 17):
        b = build_basis(n)
        for p in range(n):
            want = np.zeros(n) if p == 0 else p * b.nodes ** (p - 1)
            got = b.diff @ b.nodes**p
            assert np.max(np.abs(got - want)) <= 1e-11, f"monomial p={p}, n={n}"


def check_basis_quadrature():
    for n in range(2, 17):
        b = build_basis(n)
        for p in range(2 * n - 2):
            exact = 2.0 / (p + 1) if p % 2 == 0 else 0.0
            got = np.sum(b.weights * b.nodes**p)
            assert abs(got - exact) <= 1e-12, f"quadrature p={p}, n={n}"


def check_basis_transpose():
    for n in (2, 7, 16):
        b = build_basis(n)
        assert np.array_equal(b.diff_t, b.diff.T)


def check_basis_rejects():
    for bad in (1, 0, -3, 17):
        try:
            build_basis(bad)
        except ValueError:
            continue
        raise AssertionError(f"build_basis accepted n={bad}")


# ---------------------------------------------------------------------------
# mesh and geometry properties
# ---------------------------------------------------------------------------


def check_mesh_arithmetic():
    m = build_mesh(4, 4, 4, 10, 0.25)
    assert m.num_elements == 64 and m.dofs == 64000
    m = build_mesh(16, 16, 16, 10, 0.25)
    assert m.num_elements == 4096 and m.dofs == 4_096_000
    m = build_mesh(1, 1, 1, 2, 2.0)
    assert m.num_elements == 1 and m.dofs == 8
    for bad in ((0, 1, 1, 3, 1.0), (1, -1, 1, 3, 1.0), (1, 1, 1, 3, 0.0)):
        try:
            build_mesh(*bad)
        except ValueError:
            continue
        raise AssertionError(f"build_mesh accepted {bad}")


def check_geom_affine():
    basis, mesh, geom, _ = _setup(1, 1, 1, 2, extent=2.0)
    g = geom.values
    assert np.array_equal(g[:, 1], np.zeros_like(g[:, 1]))
    assert np.array_equal(g[:, 2], np.zeros_like(g[:, 2]))
    assert np.array_equal(g[:, 4], np.zeros_like(g[:, 4]))
    assert np.max(np.abs(g[:, 0] - 1.0)) == 0.0  # unit weights, h/2 = 1
    assert np.array_equal(g[:, 0], g[:, 3]) and np.array_equal(g[:, 0], g[:, 5])

    basis3, mesh3, geom3, _ = _setup(2, 1, 1, 3, extent=2.0)
    corner = geom3.values[0, 0, 0, 0, 0]
    assert abs(corner - 1.0 / 27.0) <= 1e-15
    assert np.all(geom3.values[:, 0] > 0)

    again = build_geom(mesh3, basis3)
    assert np.array_equal(again.values, geom3.values)


# ---------------------------------------------------------------------------
# operator kernel properties
# ---------------------------------------------------------------------------


def _null_tolerance(basis, geom, value):
    scale = (basis.n * np.max(np.abs(basis.diff))) ** 2 * np.max(geom.values)
    return 1e-12 * max(1.0, abs(value)) * scale


def check_ax_constant_null():
    basis, mesh, geom, _ = _setup(2, 2, 2, 4)
    u = constant_field(mesh.num_elements, 4, 3.25)
    tol = _null_tolerance(basis, geom, 3.25)
    for variant in _VARIANTS:
        w = apply_ax(u, geom, basis, variant)
        assert np.max(np.abs(w)) <= tol, f"{variant.value} constant residue"


def check_ax_dense_oracle():
    for n in (2, 3, 4, 5):
        for dims in ((1, 1, 1), (2, 2, 2)):
            basis, mesh, geom, _ = _setup(*dims, n)
            u = random_field(mesh.num_elements, n, seed=41 * n + dims[0])
            want = apply_dense(basis, geom, u)
            for variant in _VARIANTS:
                got = apply_ax(u, geom, basis, variant)
                d = rel_diff(got, want)
                assert d <= 1e-12, f"{variant.value} n={n} E={mesh.num_elements}: {d:.2e}"


def check_ax_variant_equivalence():
    basis, mesh, geom, _ = _setup(4, 4, 4, 10)
    for seed in range(3):
        u = random_field(mesh.num_elements, 10, seed)
        results = [apply_ax(u, geom, basis, v) for v in _VARIANTS]
        for a in range(len(results)):
            for b in range(a + 1, len(results)):
                d = rel_diff(results[a], results[b])
                assert d <= 1e-12, f"seed={seed} pair ({a},{b}): {d:.2e}"


def check_ax_layered_specialization():
    basis, mesh, geom, _ = _setup(2, 2, 1, 10)
    u = random_field(mesh.num_elements, 10, seed=7)
    unrolled = apply_ax(u, geom, basis, KernelVariant.LAYERED)
    generic = np.empty_like(u)
    _ax_layered_generic(u, geom.values, basis.diff, basis.diff_t, generic)
    assert rel_diff(unrolled, generic) <= 1e-12


def check_ax_linearity():
    basis, mesh, geom, _ = _setup(2, 1, 2, 6)
    u = random_field(mesh.num_elements, 6, 1)
    v = random_field(mesh.num_elements, 6, 2)
    alpha, beta = 1.7, -0.3
    for variant in _VARIANTS:
        lhs = apply_ax(alpha * u + beta * v, geom, basis, variant)
        rhs = alpha * apply_ax(u, geom, basis, variant) + beta * apply_ax(v, geom, basis, variant)
        assert rel_diff(lhs, rhs) <= 1e-12, variant.value


def check_ax_local_symmetry_psd():
    basis, mesh, geom, _ = _setup(2, 2, 2, 5)
    u = random_field(mesh.num_elements, 5, 11)
    v = random_field(mesh.num_elements, 5, 12)
    for variant in _VARIANTS:
        au = apply_ax(u, geom, basis, variant)
        av = apply_ax(v, geom, basis, variant)
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        op_scale = max(np.linalg.norm(au) / nu, np.linalg.norm(av) / nv)
        skew = abs(float(np.vdot(v, au)) - float(np.vdot(u, av)))
        assert skew <= 1e-12 * nu * nv * op_scale, f"{variant.value} symmetry"
        quad = float(np.vdot(u, au))
        assert quad >= -1e-12 * nu * nu * op_scale, f"{variant.value} positivity"


def check_ax_traffic_and_flops():
    basis, mesh, geom, _ = _setup(2, 2, 2, 10)
    dofs = mesh.dofs
    u = random_field(mesh.num_elements, 10, 3)
    tallies = {}
    for variant in _VARIANTS:
        counters = TrafficCounters()
        apply_ax(u, geom, basis, variant, counters)
        assert counters.flops == flops_per_apply(dofs, 10)
        assert counters.reads == apply_read_words(variant, dofs)
        assert counters.writes == apply_write_words(variant, dofs)
        tallies[variant] = counters
    ref, scr, lay = (tallies[v] for v in _VARIANTS)
    assert ref.reads - scr.reads == 6 * dofs
    assert ref.writes - scr.writes == 6 * dofs
    assert lay.reads == scr.reads and lay.writes == scr.writes
    assert flops_per_apply(1, 10) == 135
    assert flops_per_apply(64000, 10) == 8_640_000


def check_ax_scratch_refusal():
    basis, mesh, geom, _ = _setup(1, 1, 1, 11)
    u = random_field(1, 11, 0)
    try:
        apply_ax(u, geom, basis, KernelVariant.SCRATCH)
    except ScratchCapacityError:
        pass
    else:
        raise AssertionError("scratch variant accepted n=11")
    apply_ax(u, geom, basis, KernelVariant.LAYERED)  # no ceiling
    apply_ax(u, geom, basis, KernelVariant.REFERENCE)


# ---------------------------------------------------------------------------
# assembly properties
# ---------------------------------------------------------------------------


def check_topology_multiplicity():
    for dims, n in (((2, 2, 2), 3), ((3, 2, 1), 4), ((1, 1, 1), 5)):
        _, mesh, _, topo = _setup(*dims, n)
        values = np.unique(topo.multiplicity)
        assert set(values.tolist()) <= {1, 2, 4, 8}, f"multiplicities {values}"
        total = float(np.sum(1.0 / topo.multiplicity))
        assert abs(total - topo.num_global) <= 1e-9
        flat_gid = topo.global_id.ravel()
        flat_mult = topo.multiplicity.ravel()
        flat_mask = topo.mask.ravel()
        order = np.argsort(flat_gid, kind="stable")
        gid_sorted = flat_gid[order]
        for arr in (flat_mult[order], flat_mask[order]):
            starts = np.searchsorted(gid_sorted, np.unique(gid_sorted))
            grouped = np.split(arr, starts[1:])
            assert all(np.all(chunk == chunk[0]) for chunk in grouped)


def check_dssum_oracle():
    for dims in ((1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 3, 3), (3, 2, 2)):
        for n in (2, 3, 4):
            _, mesh, _, topo = _setup(*dims, n)
            rng_vals = np.floor(10 * random_field(mesh.num_elements, n, seed=n)) + 3
            got = dssum(rng_vals, topo)
            want = dssum_oracle(rng_vals, topo)
            assert np.array_equal(got, want), f"dims={dims} n={n}"


def check_dssum_identity_and_linearity():
    _, mesh, _, topo = _setup(1, 1, 1, 3)
    f = random_field(1, 3, 5)
    assert np.array_equal(dssum(f, topo), f)

    _, mesh2, _, topo2 = _setup(2, 1, 1, 2)
    a = np.floor(5 * random_field(2, 2, 1))
    b = np.floor(5 * random_field(2, 2, 2))
    lhs = dssum(2.0 * a + 3.0 * b, topo2)
    rhs = 2.0 * dssum(a, topo2) + 3.0 * dssum(b, topo2)
    assert np.array_equal(lhs, rhs)


def check_dssum_conservation():
    _, mesh, _, topo = _setup(3, 2, 2, 4)
    f = random_field(mesh.num_elements, 4, 9)
    before = float(np.sum(f))
    after = float(np.sum(dssum(f, topo) / topo.multiplicity))
    assert abs(after - before) <= 1e-12 * max(1.0, abs(before))


def check_mask_behavior():
    _, mesh, _, topo = _setup(1, 1, 1, 3)
    ones = constant_field(1, 3, 1.0)
    masked = mask(ones, topo)
    assert np.count_nonzero(masked) == 1 and masked[0, 1, 1, 1] == 1.0
    assert np.array_equal(mask(masked, topo), masked)
    zeros = constant_field(1, 3, 0.0)
    assert np.array_equal(mask(zeros, topo), zeros)


def check_global_symmetry_psd():
    basis, mesh, geom, topo = _setup(2, 2, 2, 4)
    u = consistent_random_field(mesh.num_elements, 4, topo, 21)
    v = consistent_random_field(mesh.num_elements, 4, topo, 22)
    au = apply_global(u, geom, basis, topo)
    av = apply_global(v, geom, basis, topo)
    vau = weighted_dot(v, au, topo)
    uav = weighted_dot(u, av, topo)
    scale = max(abs(vau), abs(uav), 1e-30)
    assert abs(vau - uav) <= 1e-12 * scale
    uau = weighted_dot(u, au, topo)
    assert uau > 0.0


def check_global_boundary_null():
    basis, mesh, geom, topo = _setup(2, 2, 2, 3)
    boundary_only = random_field(mesh.num_elements, 3, 31) * (1.0 - topo.mask)
    out = apply_global(boundary_only, geom, basis, topo)
    assert np.array_equal(out, np.zeros_like(out))

    basis2, mesh2, geom2, topo2 = _setup(1, 1, 1, 2)
    u = random_field(1, 2, 32)
    out2 = apply_global(u, geom2, basis2, topo2)
    assert np.array_equal(out2, np.zeros_like(out2))


# ---------------------------------------------------------------------------
# solver properties
# ---------------------------------------------------------------------------


def check_weighted_dot():
    _, mesh, _, topo = _setup(1, 1, 1, 4)
    u = random_field(1, 4, 1)
    v = random_field(1, 4, 2)
    assert abs(weighted_dot(u, v, topo) - float(np.vdot(u, v))) <= 1e-12 * abs(np.vdot(u, v))

    _, mesh2, _, topo2 = _setup(2, 1, 1, 2)
    ones = constant_field(2, 2, 1.0)
    assert weighted_dot(ones, ones, topo2) == 12.0

    w = random_field(2, 2, 3)
    assert weighted_dot(w, w, topo2) > 0.0
    zero = constant_field(2, 2, 0.0)
    assert weighted_dot(zero, zero, topo2) == 0.0


def _global_operator(basis, geom, topo, variant=KernelVariant.LAYERED, counters=None,
                     timers=None):
    def op(u):
        return apply_global(u, geom, basis, topo, variant, counters=counters,
                            timers=timers)
    return op


def check_cg_zero_rhs():
    basis, mesh, geom, topo = _setup(2, 2, 2, 3)
    f = constant_field(mesh.num_elements, 3, 0.0)
    result = cg_solve(f, _global_operator(basis, geom, topo), topo, CgConfig(100, 0.0))
    assert result.iterations_run == 1
    assert np.array_equal(result.residual_history, [0.0])
    assert np.array_equal(result.solution, np.zeros_like(f))


def check_cg_manufactured():
    basis, mesh, geom, topo = _setup(4, 4, 4, 4)
    target = consistent_random_field(mesh.num_elements, 4, topo, 77)
    f = apply_global(target, geom, basis, topo)
    free = int(round(float(np.sum(topo.mask / topo.multiplicity))))
    op = _global_operator(basis, geom, topo)

    anorms = []

    def track(it, x, r):
        err = x - target
        anorms.append(weighted_dot(err, op(err), topo))

    result = cg_solve(f, op, topo, CgConfig(free, 0.0), callback=track)
    err = result.solution - target
    rel = np.sqrt(weighted_dot(err, err, topo) / weighted_dot(target, target, topo))
    assert rel <= 1e-8, f"relative error {rel:.2e} after {result.iterations_run} iterations"
    slack = 1e-12 * max(anorms)
    drops = np.diff(np.asarray(anorms))
    assert np.all(drops <= slack), "error A-norm increased"


def check_cg_counter_identity():
    basis, mesh, geom, topo = _setup(2, 2, 2, 5)
    dofs = mesh.dofs
    counters = TrafficCounters()
    op = _global_operator(basis, geom, topo, counters=counters)
    f = consistent_random_field(mesh.num_elements, 5, topo, 4)
    marks = []
    cg_solve(f, op, topo, CgConfig(5, 0.0), counters=counters,
             callback=lambda it, x, r: marks.append(counters.flops))
    per_iter = flops_per_apply(dofs, 5) + 12 * dofs
    assert marks[0] == per_iter
    assert all(b - a == per_iter for a, b in zip(marks, marks[1:]))


def check_cg_fixed_iteration_protocol():
    basis, mesh, geom, topo = _setup(2, 2, 2, 3)
    timers = OperatorTimers()
    op = _global_operator(basis, geom, topo, timers=timers)
    f = consistent_random_field(mesh.num_elements, 3, topo, 6)
    result = cg_solve(f, op, topo, CgConfig(100, 0.0))
    assert timers.applies == 100
    assert result.iterations_run == 100
    assert result.residual_history.shape == (100,)


def check_cg_scaling():
    basis, mesh, geom, topo = _setup(2, 2, 2, 3)
    op = _global_operator(basis, geom, topo)
    f = consistent_random_field(mesh.num_elements, 3, topo, 15)
    base = cg_solve(f, op, topo, CgConfig(20, 0.0))
    scaled = cg_solve(3.5 * f, op, topo, CgConfig(20, 0.0))
    assert scaled.iterations_run == base.iterations_run
    assert rel_diff(scaled.solution, 3.5 * base.solution) <= 1e-12


# ---------------------------------------------------------------------------
# cost model and reporting properties
# ---------------------------------------------------------------------------


def check_model_anchors():
    assert perf.model_flops_per_iteration(1, 10) == 154
    assert perf.model_flops_per_iteration(64000, 10) == 9_856_000
    assert perf.model_flops_per_iteration(4_096_000, 10) == 630_784_000
    assert perf.model_flops_per_iteration(1, 0) == 34
    assert perf.model_bytes_per_iteration(1) == 240
    assert perf.model_bytes_per_iteration(64000) == 15_360_000
    assert perf.model_read_bytes_per_iteration(1) == 192
    assert perf.model_write_bytes_per_iteration(1) == 48


def check_intensity_roofline():
    assert perf.intensity(10) == 154 / 240
    for n in range(2, 17):
        assert perf.intensity(n) * 240 == 12 * n + 34
    assert perf.intensity(8) == 130 / 240
    assert perf.roofline_peak(720e9, 10) == 462.0e9
    assert perf.roofline_peak(900e9, 10) == 577.5e9
    assert perf.roofline_peak(2 * 720e9, 10) == 2 * 462.0e9


def check_probe_accounting():
    payload, counted = perf.probe_byte_accounting(64000)
    assert payload == 15_360_000 and counted == 30_720_000
    res = perf.evaluate_roofline(462, 1.0, 720.0, 10)
    assert res.fraction == 1.0 and res.flags == ()
    flagged = perf.evaluate_roofline(1000, 1.0, 720.0, 10)
    assert flagged.fraction > perf.CACHE_EFFECT_THRESHOLD
    assert "cache-effect" in flagged.flags


def check_report_roundtrip():
    row = report.PerfReport(
        schema_version=report.SCHEMA_VERSION, variant="layered", elements=64,
        box="4x4x4", n=10, dofs=64000, iterations=100, workers=2, seed=1,
        include_dssum=False, total_seconds=1.5, seconds_per_iteration=0.015,
        ax_seconds=1.0, dssum_seconds=0.25, model_flops_per_iteration=9_856_000,
        model_bytes_per_iteration=15_360_000,
        model_read_bytes_per_iteration=12_288_000,
        model_write_bytes_per_iteration=3_072_000, instr_flops=10, instr_read_words=11,
        instr_write_words=12, achieved_gflops=0.657066,
        measured_bandwidth=1.1e10, roofline_peak_gflops=7.058333,
        roofline_fraction=0.0931, flags="")
    assert report.parse_csv(report.emit_csv([row])) == [row]
    assert report.parse_json(report.emit_json([row])) == [row]
    gp = report.emit_gnuplot([row])
    assert "variant: layered" in gp and "roofline" in gp


PROPERTIES: list[tuple[str, object]] = [
    ("basis.frozen_values", check_basis_frozen_values),
    ("basis.node_layout", check_basis_node_layout),
    ("basis.weights", check_basis_weights),
    ("basis.diff_row_sums", check_basis_diff_rows),
    ("basis.monomial_derivatives", check_basis_monomials),
    ("basis.quadrature_exactness", check_basis_quadrature),
    ("basis.transpose_bitexact", check_basis_transpose),
    ("basis.rejects_bad_n", check_basis_rejects),
    ("mesh.dof_arithmetic", check_mesh_arithmetic),
    ("mesh.geom_affine", check_geom_affine),
    ("ax.constant_null", check_ax_constant_null),
    ("ax.dense_oracle", check_ax_dense_oracle),
    ("ax.variant_equivalence", check_ax_variant_equivalence),
    ("ax.layered_specialization", check_ax_layered_specialization),
    ("ax.linearity", check_ax_linearity),
    ("ax.local_symmetry_psd", check_ax_local_symmetry_psd),
    ("ax.traffic_and_flops", check_ax_traffic_and_flops),
    ("ax.scratch_refusal", check_ax_scratch_refusal),
    ("assembly.multiplicity", check_topology_multiplicity),
    ("assembly.dssum_oracle", check_dssum_oracle),
    ("assembly.dssum_identity_linearity", check_dssum_identity_and_linearity),
    ("assembly.dssum_conservation", check_dssum_conservation),
    ("assembly.mask", check_mask_behavior),
    ("assembly.global_symmetry_psd", check_global_symmetry_psd),
    ("assembly.boundary_null", check_global_boundary_null),
    ("cg.weighted_dot", check_weighted_dot),
    ("cg.zero_rhs", check_cg_zero_rhs),
    ("cg.manufactured_solution", check_cg_manufactured),
    ("cg.counter_identity", check_cg_counter_identity),
    ("cg.fixed_iteration_protocol", check_cg_fixed_iteration_protocol),
    ("cg.scaling_equivariance", check_cg_scaling),
    ("perf.model_anchors", check_model_anchors),
    ("perf.intensity_roofline", check_intensity_roofline),
    ("perf.probe_accounting", check_probe_accounting),
    ("report.roundtrip", check_report_roundtrip),
]


def run_verify(name_filter: str | None = None, stream=None) -> int:
    """Run the suite, print one line per property, return the failure count."""
    if stream is None:
        stream = sys.stdout
    selected = [(name, fn) for name, fn in PROPERTIES
                if name_filter is None or name_filter in name]
    if not selected:
        print(f"no properties match filter {name_filter!r}", file=stream)
        return 1
    failures = 0
    for name, fn in selected:
        try:
            fn()
        except AssertionError as exc:
            failures += 1
            print(f"FAIL {name}: {exc}", file=stream)
        except Exception as exc:  # construction errors are failures too
            failures += 1
            print(f"FAIL {name}: {type(exc).__name__}: {exc}", file=stream)
        else:
            print(f"PASS {name}", file=stream)
    print(f"{len(selected) - failures}/{len(selected)} properties passed", file=stream)
    return failures
