"""Benchmark drivers: single runs and element-count sweeps.

Protocol defaults follow the fixed-work setup the harness models: 100
solver iterations at polynomial degree 9 (10 points per dimension) over
element counts 64 to 4096, each factored into a near-cubic box. Per run
the right-hand side is a seeded random field made inter-element
consistent (summed across interfaces) and masked, a short warm-up solve
absorbs compilation and first-touch costs, and the timed solve reports
wall-clock totals plus scoped operator and interface-summation times.

Achieved GFlop/s pairs the per-iteration model flops with the solve time
excluding the interface summation (the communication-off reading); with
include_dssum the full solve time is used instead. The operator-only time
is reported separately either way.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from . import perf, report
from .assembly import OperatorTimers, apply_global, build_topology, dssum, mask
from .basis import build_basis
from .cg import CgConfig, cg_solve
from .fields import mix64, random_field
from .kernels import (KernelVariant, TrafficCounters, reference_workspace)
from .mesh import build_geom, build_mesh

__all__ = ["BenchConfig", "DEFAULT_SWEEP", "KEBNEKAISE_SWEEP", "factor_elements",
           "make_rhs", "run_bench", "run_sweep", "run_roofline", "set_workers"]

DEFAULT_SWEEP = (64, 128, 256, 512, 1024, 2048, 4096)
# CPU-node-matched series: 16 to 128 elements per core on 28 cores.
KEBNEKAISE_SWEEP = (448, 896, 1792, 3584)

_WARMUP_ITERATIONS = 3
_TIMER_OVERHEAD_BUDGET = 0.01


@dataclass
class BenchConfig:
    elements: int | None = None
    sweep: tuple[int, ...] | None = None
    degree: int = 9
    iterations: int = 100
    variant: str = "all"
    include_dssum: bool = False
    seed: int = 1
    workers: int | None = None
    probe_repetitions: int = 10

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.elements is not None and self.elements < 1:
            raise ValueError("elements must be positive")
        if self.sweep is not None:
            if len(self.sweep) == 0 or any(e < 1 for e in self.sweep):
                raise ValueError("sweep sizes must be positive")
        self.resolve_variants()  # validates the variant name

    @property
    def n(self) -> int:
        return self.degree + 1

    def resolve_variants(self) -> list[KernelVariant]:
        if self.variant == "all":
            return [KernelVariant.REFERENCE, KernelVariant.SCRATCH, KernelVariant.LAYERED]
        return [KernelVariant.parse(self.variant)]

    def sweep_sizes(self) -> tuple[int, ...]:
        if self.sweep is not None:
            return tuple(self.sweep)
        if self.elements is not None:
            return (self.elements,)
        return DEFAULT_SWEEP


def set_workers(workers: int | None) -> int:
    """Pin the worker count for all parallel regions; returns the count in use."""
    if workers is not None:
        limit = numba.config.NUMBA_NUM_THREADS
        if workers < 1:
            raise ValueError("workers must be positive")
        if workers > limit:
            warnings.warn(f"workers={workers} exceeds available {limit}; clamping",
                          RuntimeWarning, stacklevel=2)
            workers = limit
        numba.set_num_threads(workers)
    return numba.get_num_threads()


def factor_elements(count: int) -> tuple[int, int, int]:
    """Factor an element count into the most cubic ex >= ey >= ez box."""
    if count < 1:
        raise ValueError("element count must be positive")
    best = (count, 1, 1)
    best_key = (count / 1, count + 2)
    for ez in range(1, round(count ** (1 / 3)) + 1):
        if count % ez:
            continue
        rest = count // ez
        ey = ez
        while ey * ey <= rest:
            if rest % ey == 0:
                ex = rest // ey
                key = (ex / ez, ex - ez)
                if key < best_key:
                    best_key = key
                    best = (ex, ey, ez)
            ey += 1
    return best


def make_rhs(num_elements: int, n: int, topo, seed: int) -> np.ndarray:
    """Seeded benchmark right-hand side: random, interface-consistent, masked."""
    f = random_field(num_elements, n, seed)
    return mask(dssum(f, topo), topo)


def _timer_pair_cost() -> float:
    t0 = time.perf_counter()
    for _ in range(1000):
        time.perf_counter()
        time.perf_counter()
    return (time.perf_counter() - t0) / 1000.0


def _run_one(cfg: BenchConfig, elements: int, variant: KernelVariant,
             bandwidth: float, probe_flags: tuple[str, ...],
             workers: int) -> report.PerfReport:
    n = cfg.n
    ex, ey, ez = factor_elements(elements)
    basis = build_basis(n)
    mesh = build_mesh(ex, ey, ez, n, 1.0)
    geom = build_geom(mesh, basis)
    topo = build_topology(mesh)
    dofs = mesh.dofs
    workspace = reference_workspace(mesh.num_elements, n) \
        if variant is KernelVariant.REFERENCE else None

    f = make_rhs(mesh.num_elements, n, topo, mix64(cfg.seed, elements))

    def make_operator(counters, timers):
        def op(u):
            return apply_global(u, geom, basis, topo, variant,
                                counters=counters, timers=timers, workspace=workspace)
        return op

    warm = CgConfig(max_iterations=min(_WARMUP_ITERATIONS, cfg.iterations), tolerance=0.0)
    cg_solve(f, make_operator(TrafficCounters(), None), topo, warm)

    counters = TrafficCounters()
    timers = OperatorTimers()
    t0 = time.perf_counter()
    result = cg_solve(f, make_operator(counters, timers), topo,
                      CgConfig(max_iterations=cfg.iterations, tolerance=0.0),
                      counters=counters)
    total = time.perf_counter() - t0

    flags = list(probe_flags)
    overhead = 2.0 * timers.applies * _timer_pair_cost()
    if timers.ax_seconds > 0 and overhead > _TIMER_OVERHEAD_BUDGET * timers.ax_seconds:
        flags.append("timer-overhead")

    model_flops = perf.model_flops_per_iteration(dofs, n)
    run_flops = model_flops * result.iterations_run
    achieved_seconds = total if cfg.include_dssum else max(total - timers.dssum_seconds, 1e-12)
    roof = perf.evaluate_roofline(run_flops, achieved_seconds, bandwidth, n)
    flags.extend(roof.flags)

    return report.PerfReport(
        schema_version=report.SCHEMA_VERSION,
        variant=variant.value,
        elements=elements,
        box=f"{ex}x{ey}x{ez}",
        n=n,
        dofs=dofs,
        iterations=result.iterations_run,
        workers=workers,
        seed=cfg.seed,
        include_dssum=cfg.include_dssum,
        total_seconds=total,
        seconds_per_iteration=total / result.iterations_run,
        ax_seconds=timers.ax_seconds,
        dssum_seconds=timers.dssum_seconds,
        model_flops_per_iteration=model_flops,
        model_bytes_per_iteration=perf.model_bytes_per_iteration(dofs),
        model_read_bytes_per_iteration=perf.model_read_bytes_per_iteration(dofs),
        model_write_bytes_per_iteration=perf.model_write_bytes_per_iteration(dofs),
        instr_flops=result.counters.flops,
        instr_read_words=result.counters.reads,
        instr_write_words=result.counters.writes,
        achieved_gflops=roof.achieved_flops / 1e9,
        measured_bandwidth=roof.measured_bandwidth,
        roofline_peak_gflops=roof.peak_flops / 1e9,
        roofline_fraction=roof.fraction,
        flags=";".join(flags),
    )


def _probe(cfg: BenchConfig, dofs: int) -> tuple[float, tuple[str, ...]]:
    payload, _ = perf.probe_byte_accounting(dofs)
    flags: tuple[str, ...] = ()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        bandwidth = perf.measure_bandwidth(dofs, repetitions=cfg.probe_repetitions)
    if payload < perf.LLC_WARN_BYTES:
        flags = ("probe-under-llc",)
    return bandwidth, flags


def run_bench(cfg: BenchConfig) -> list[report.PerfReport]:
    """One problem size, one row per selected variant."""
    if cfg.elements is None:
        raise ValueError("bench requires an element count")
    workers = set_workers(cfg.workers)
    dofs = cfg.elements * cfg.n**3
    bandwidth, probe_flags = _probe(cfg, dofs)
    return [_run_one(cfg, cfg.elements, v, bandwidth, probe_flags, workers)
            for v in cfg.resolve_variants()]


def run_sweep(cfg: BenchConfig) -> list[report.PerfReport]:
    """Element-count sweep; allocation failures skip the row and continue."""
    workers = set_workers(cfg.workers)
    rows: list[report.PerfReport] = []
    for elements in cfg.sweep_sizes():
        try:
            bandwidth, probe_flags = _probe(cfg, elements * cfg.n**3)
            for variant in cfg.resolve_variants():
                rows.append(_run_one(cfg, elements, variant, bandwidth,
                                     probe_flags, workers))
        except MemoryError as exc:
            warnings.warn(f"skipping {elements} elements: {exc}", RuntimeWarning,
                          stacklevel=2)
    if not rows:
        raise MemoryError("every sweep size failed to allocate")
    return rows


def run_roofline(cfg: BenchConfig) -> dict:
    """Standalone bandwidth probe plus the derived performance ceiling."""
    set_workers(cfg.workers)
    elements = cfg.elements if cfg.elements is not None else 4096
    dofs = elements * cfg.n**3
    bandwidth, flags = _probe(cfg, dofs)
    payload, counted = perf.probe_byte_accounting(dofs)
    return {
        "schema_version": report.SCHEMA_VERSION,
        "elements": elements,
        "n": cfg.n,
        "dofs": dofs,
        "payload_bytes_per_repetition": payload,
        "counted_bytes_per_repetition": counted,
        "measured_bandwidth": bandwidth,
        "measured_bandwidth_gbs": bandwidth / 1e9,
        "intensity": perf.intensity(cfg.n),
        "roofline_peak_gflops": perf.roofline_peak(bandwidth, cfg.n) / 1e9,
        "flags": ";".join(flags),
    }
