"""Element-local scalar fields and the portable seeded generator.

A field is a plain float64 ndarray of shape (E, n, n, n) indexed
[e, k, j, i] with i fastest, so a fixed-k layer of an element is a
contiguous (n, n) block. Interface nodes are duplicated between
neighboring elements; assembly resolves the duplication.
"""

from __future__ import annotations

import numpy as np

__all__ = ["zeros_field", "constant_field", "random_field", "validate_field", "mix64"]

# SplitMix64 mixing constants (shift-xor-multiply finalizer).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(state: np.ndarray) -> np.ndarray:
    z = state + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def mix64(a: int, b: int = 0) -> int:
    """Mix two integers into one 64-bit seed value."""
    state = np.uint64((a * 0x100000001B3 + b) & 0xFFFFFFFFFFFFFFFF)
    return int(_splitmix64(state[None])[0])


def zeros_field(num_elements: int, n: int) -> np.ndarray:
    return np.zeros((num_elements, n, n, n))


def constant_field(num_elements: int, n: int, value: float = 1.0) -> np.ndarray:
    return np.full((num_elements, n, n, n), float(value))


def random_field(num_elements: int, n: int, seed: int) -> np.ndarray:
    """Seeded uniform field in [-1, 1), identical on every platform.

    Counter-based: entry i is the SplitMix64 mix of seed + i, with the top
    53 bits mapped to a double. No sequential state, so the stream is
    reproducible and cheap to vectorize.
    """
    count = num_elements * n**3
    with np.errstate(over="ignore"):
        idx = np.arange(count, dtype=np.uint64)
        bits = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx)
    u01 = (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return (2.0 * u01 - 1.0).reshape(num_elements, n, n, n)


def validate_field(f: np.ndarray, num_elements: int, n: int, name: str = "field") -> None:
    expected = (num_elements, n, n, n)
    if not isinstance(f, np.ndarray) or f.shape != expected:
        got = getattr(f, "shape", None)
        raise ValueError(f"{name} must have shape {expected}, got {got}")
