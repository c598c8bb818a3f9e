"""Analytic cost model, streaming bandwidth probe, roofline evaluation.

The per-iteration cost model weights all floating point operations
equally and puts the solver at

    flops(D, n) = D (12 n + 34),
    bytes(D)    = 8 * 30 D = 240 D   (24 D word reads, 6 D word writes),

so the computational intensity is (12 n + 34) / 240 flops per byte and a
machine streaming at B bytes/s can sustain at most intensity * B flops/s.
The probe estimates B the way the model's roofline is meant to be read:
it streams copies of model-sized buffers rather than replaying the
kernel's access pattern, counting both the read and the write stream, so
the resulting roofline is an optimistic bound.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

__all__ = [
    "CostModel",
    "RooflineResult",
    "model_flops_per_iteration",
    "model_bytes_per_iteration",
    "model_read_bytes_per_iteration",
    "model_write_bytes_per_iteration",
    "intensity",
    "roofline_peak",
    "probe_byte_accounting",
    "measure_bandwidth",
    "evaluate_roofline",
    "CACHE_EFFECT_THRESHOLD",
    "LLC_WARN_BYTES",
]

WORD_BYTES = 8
MODEL_READ_WORDS_PER_POINT = 24
MODEL_WRITE_WORDS_PER_POINT = 6

# Fractions above this are reported with a cache-effect flag, not clamped.
CACHE_EFFECT_THRESHOLD = 1.2

# Probe buffers below this are assumed to fit last-level cache somewhere.
LLC_WARN_BYTES = 64 * 1024 * 1024

_MIN_REPETITIONS = 10
_MIN_ELAPSED_SECONDS = 1e-3


def model_flops_per_iteration(dofs: int, n: int) -> int:
    """Model flops of one solver iteration, D (12 n + 34), exact integer.

    n = 0 is accepted for inspecting the vector-op constant alone.
    """
    if dofs < 1 or n < 0:
        raise ValueError("dofs must be positive and n non-negative")
    return dofs * (12 * n + 34)


def model_bytes_per_iteration(dofs: int) -> int:
    """Model main-memory bytes of one solver iteration, 240 D."""
    if dofs < 1:
        raise ValueError("dofs must be positive")
    return WORD_BYTES * (MODEL_READ_WORDS_PER_POINT + MODEL_WRITE_WORDS_PER_POINT) * dofs


def model_read_bytes_per_iteration(dofs: int) -> int:
    """Read share of the model traffic: 24 D words = 192 D bytes."""
    return WORD_BYTES * MODEL_READ_WORDS_PER_POINT * dofs


def model_write_bytes_per_iteration(dofs: int) -> int:
    """Write share of the model traffic: 6 D words = 48 D bytes."""
    return WORD_BYTES * MODEL_WRITE_WORDS_PER_POINT * dofs


def intensity(n: int) -> float:
    """Computational intensity (12 n + 34) / 240, flops per byte."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return (12 * n + 34) / 240.0


def roofline_peak(bandwidth: float, n: int) -> float:
    """Memory-bound performance ceiling, intensity(n) * bandwidth.

    Multiplies before dividing so integer-valued anchors come out exact
    (720e9 B/s at n = 10 gives 462e9 flops/s).
    """
    if not bandwidth > 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return bandwidth * (12 * n + 34) / 240.0


@dataclass(frozen=True)
class CostModel:
    """Degrees of freedom and points per dimension for the cost formulas."""

    dofs: int
    n: int

    def __post_init__(self):
        if self.dofs < 1 or self.n < 2:
            raise ValueError("require dofs >= 1 and n >= 2")

    @property
    def flops_per_iteration(self) -> int:
        return model_flops_per_iteration(self.dofs, self.n)

    @property
    def bytes_per_iteration(self) -> int:
        return model_bytes_per_iteration(self.dofs)

    @property
    def intensity(self) -> float:
        return intensity(self.n)


@dataclass(frozen=True)
class RooflineResult:
    """Measured-roofline evaluation of one run."""

    measured_bandwidth: float  # bytes/second
    intensity: float  # flops/byte
    peak_flops: float  # flops/second
    achieved_flops: float  # flops/second
    fraction: float
    flags: tuple = ()

    def __post_init__(self):
        for name in ("measured_bandwidth", "intensity", "peak_flops", "achieved_flops"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


def probe_byte_accounting(dofs: int) -> tuple[int, int]:
    """(payload, counted) probe bytes per repetition.

    The payload equals the per-iteration model traffic, 240 D bytes; the
    counted movement doubles it because a copy both reads and writes every
    payload byte.
    """
    payload = model_bytes_per_iteration(dofs)
    return payload, 2 * payload


@njit(cache=True, parallel=True)
def _stream_copy(dst, src):  # pragma: no cover - jitted
    for i in prange(src.size):
        dst[i] = src[i]


def measure_bandwidth(dofs: int, repetitions: int = 10, warmup: int = 2) -> float:
    """Streaming-copy bandwidth in bytes/second at the model's buffer size.

    Allocates a source and a destination of 240 D bytes each, copies
    source to destination once per repetition and reports the median of
    the per-repetition rates, counting read plus write streams. Warm-up
    repetitions (which also absorb compilation) are excluded.
    """
    if repetitions < _MIN_REPETITIONS:
        raise ValueError(f"repetitions must be at least {_MIN_REPETITIONS}, got {repetitions}")
    payload, counted = probe_byte_accounting(dofs)
    if payload < LLC_WARN_BYTES:
        warnings.warn(
            f"probe payload {payload} bytes may fit in cache "
            f"(below {LLC_WARN_BYTES}); bandwidth may read high",
            RuntimeWarning,
            stacklevel=2,
        )
    nwords = payload // WORD_BYTES
    try:
        src = np.ones(nwords)
        dst = np.empty(nwords)
    except MemoryError as exc:
        raise MemoryError(f"cannot allocate two {payload}-byte probe buffers") from exc

    for _ in range(max(warmup, 1)):
        _stream_copy(dst, src)

    rates = np.empty(repetitions)
    elapsed = 0.0
    for rep in range(repetitions):
        t0 = time.perf_counter()
        _stream_copy(dst, src)
        dt = time.perf_counter() - t0
        elapsed += dt
        rates[rep] = counted / dt if dt > 0.0 else np.inf
    if elapsed < _MIN_ELAPSED_SECONDS:
        raise RuntimeError(
            f"probe finished in {elapsed:.2e} s, below timer resolution; "
            "increase repetitions or the problem size"
        )
    return float(np.median(rates))


def evaluate_roofline(run_flops: int, run_seconds: float, bandwidth: float, n: int) -> RooflineResult:
    """Compare a measured run against the bandwidth-derived ceiling."""
    if run_flops <= 0 or not run_seconds > 0.0:
        raise ValueError("run_flops and run_seconds must be positive")
    achieved = run_flops / run_seconds
    peak = roofline_peak(bandwidth, n)
    fraction = achieved / peak
    flags = ("cache-effect",) if fraction > CACHE_EFFECT_THRESHOLD else ()
    return RooflineResult(
        measured_bandwidth=bandwidth,
        intensity=intensity(n),
        peak_flops=peak,
        achieved_flops=achieved,
        fraction=fraction,
        flags=flags,
    )
