"""Small numeric helpers used throughout the package."""

import math

import numpy as np

# 1/phi; multiples of it mod 1 are the standard low-discrepancy sequence.
GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0


def fsum(values) -> float:
    """Exactly rounded float sum (Shewchuk).

    Order-independent by construction, which is what makes every
    prime-sum in this package bit-stable under chunking.
    """
    if isinstance(values, np.ndarray):
        return math.fsum(values.tolist())
    return math.fsum(values)


def fmt17(x: float) -> str:
    """17-significant-digit decimal, round-trip safe for float64."""
    return format(float(x), ".17g")
