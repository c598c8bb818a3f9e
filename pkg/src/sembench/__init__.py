"""Matrix-free spectral-element Poisson proxy benchmark.

Builds the GLL discretization of the Poisson operator on a box of
hexahedral elements, applies it matrix-free through tensor-product
kernels with three intermediate-storage strategies, solves with
unpreconditioned CG under multiplicity-weighted inner products, and
evaluates measured runs against an analytic traffic model and a
streaming-bandwidth roofline.
"""

from .assembly import OperatorTimers, Topology, apply_global, build_topology, dssum, mask
from .basis import PolynomialBasis, build_basis
from .bench import (BenchConfig, DEFAULT_SWEEP, KEBNEKAISE_SWEEP, factor_elements,
                    make_rhs, run_bench, run_roofline, run_sweep, set_workers)
from .cg import CgBreakdownError, CgConfig, CgResult, cg_solve, weighted_dot
from .fields import constant_field, random_field, zeros_field
from .kernels import (KernelVariant, ScratchCapacityError, TrafficCounters, apply_ax,
                      flops_per_apply, reference_workspace)
from .mesh import BoxMesh, GeomFactors, build_geom, build_mesh
from .perf import (CostModel, RooflineResult, evaluate_roofline, intensity,
                   measure_bandwidth, model_bytes_per_iteration,
                   model_flops_per_iteration, roofline_peak)
from .report import PerfReport, SCHEMA_VERSION, emit_csv, emit_gnuplot, emit_json, parse_csv
from .verify import assemble_dense_local, dssum_oracle, run_verify

__version__ = "0.1.0"

__all__ = [
    "BenchConfig", "BoxMesh", "CgBreakdownError", "CgConfig", "CgResult", "CostModel",
    "DEFAULT_SWEEP", "GeomFactors", "KEBNEKAISE_SWEEP", "KernelVariant",
    "OperatorTimers", "PerfReport", "PolynomialBasis", "RooflineResult",
    "SCHEMA_VERSION", "ScratchCapacityError", "Topology", "TrafficCounters",
    "apply_ax", "apply_global", "assemble_dense_local", "build_basis", "build_geom",
    "build_mesh", "build_topology", "cg_solve", "constant_field", "dssum",
    "dssum_oracle", "emit_csv", "emit_gnuplot", "emit_json", "evaluate_roofline",
    "factor_elements", "flops_per_apply", "intensity", "make_rhs", "mask",
    "measure_bandwidth", "model_bytes_per_iteration", "model_flops_per_iteration",
    "parse_csv", "random_field", "reference_workspace", "roofline_peak", "run_bench",
    "run_roofline", "run_sweep", "run_verify", "set_workers", "weighted_dot",
    "zeros_field",
]
