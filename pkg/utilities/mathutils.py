from typing import Sequence

import numpy as np


def point_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Max coordinatewise distance between two points."""
    return float(np.max(np.abs(np.asarray(a, dtype=np.complex128) - np.asarray(b, dtype=np.complex128))))


def nan_count(ar) -> int:
    return int(np.sum(~np.isfinite(np.asarray(ar, dtype=np.float64))))
