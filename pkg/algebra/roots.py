"""Roots of univariate polynomials with exact rational coefficients.

Approximations come from Aberth-Ehrlich simultaneous iteration in double
precision and are then polished by Newton steps at extended precision against
the exact coefficients.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

import constants
from algebra.polynomial import MultiPoly, to_mp
from utilities.logs import logger


@dataclass(frozen=True)
class RootCluster:
    """A root (cluster center) with the number of approximations merged into it."""

    value: complex
    multiplicity: int
    correction: float = 0.0


def _strip_zero_roots(coeffs: List[Fraction]):
    # Coefficients run from the highest power down; trailing zeros are roots at 0.
    zeros = 0
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
        zeros += 1
    return coeffs, zeros


def _scaled_floats(coeffs: Sequence[Fraction]) -> Optional[np.ndarray]:
    scale = max(abs(c) for c in coeffs)
    values = np.array([float(c / scale) for c in coeffs], dtype=np.float64)
    if values[0] == 0.0 or not np.all(np.isfinite(values)):
        return None
    return values / values[0]


def aberth(coeffs: np.ndarray, max_iter: int = constants.ABERTH_MAX_ITER, tol: float = 1e-14) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration on a monic polynomial (highest power first)."""
    n = coeffs.shape[0] - 1
    deriv = coeffs[:-1] * np.arange(n, 0, -1)
    # Cauchy bound, with a rotated start so no guess sits on a symmetry axis.
    radius = 1.0 + np.max(np.abs(coeffs[1:]))
    angles = 2 * math.pi * np.arange(n) / n + 0.4
    x = radius * np.exp(1j * angles)
    for _ in range(max_iter):
        pv = np.polyval(coeffs, x)
        dpv = np.polyval(deriv, x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dpv
            delta = ratio / (1.0 - ratio * inv.sum(axis=1))
        delta = np.where(np.isfinite(delta), delta, 0.0)
        x = x - delta
        if np.all(np.abs(delta) <= tol * (1.0 + np.abs(x))):
            break
    return x


def _mp_start(coeffs: Sequence[Fraction]) -> List:
    with mpmath.workprec(constants.POLISH_PRECISION_BITS):
        values = [to_mp(c) for c in coeffs]
        roots = mpmath.polyroots(values, maxsteps=constants.ABERTH_MAX_ITER, extraprec=constants.POLISH_PRECISION_BITS)
    return [complex(r) for r in roots]


def _newton(values: Sequence, x, max_steps: int):
    # Runs at the caller's working precision.
    threshold = mpmath.mpf(2) ** (16 - mpmath.mp.prec)
    last = mpmath.mpf(0)
    for _ in range(max_steps):
        value, slope = mpmath.polyval(values, x, derivative=True)
        if slope == 0:
            break
        step = value / slope
        x = x - step
        last = abs(step)
        if last <= threshold * (1 + abs(x)):
            break
    return x, last


def newton_polish(coeffs: Sequence[Fraction], start: complex, bits: int = constants.POLISH_PRECISION_BITS,
                  max_steps: int = constants.POLISH_MAX_STEPS):
    """Newton iteration at ``bits`` of precision; returns the root and the last correction size."""
    with mpmath.workprec(bits):
        x, last = _newton([to_mp(c) for c in coeffs], mpmath.mpc(start), max_steps)
        return complex(x), float(last)


def mp_newton(values: Sequence, start, max_steps: int = constants.POLISH_MAX_STEPS):
    """Newton iteration on mpmath coefficients at the working precision."""
    return _newton(values, mpmath.mpc(start), max_steps)


def mp_roots(values: Sequence, max_steps: int = constants.POLISH_MAX_STEPS) -> List[Tuple[object, object]]:
    """Roots of a polynomial with mpmath coefficients (highest power first, nonzero leading one).

    Works at the caller's precision. Returns ``(root, last correction)`` pairs; a root of
    multiplicity m appears m times.

    Raises:
        ValueError: When the leading coefficient is zero.
    """
    values = list(values)
    if not values or values[0] == 0:
        raise ValueError("expected a nonzero leading coefficient")
    zeros = 0
    while len(values) > 1 and values[-1] == 0:
        values.pop()
        zeros += 1
    degree = len(values) - 1
    found = []
    if degree == 1:
        found.append((-values[1] / values[0], mpmath.mpf(0)))
    elif degree > 1:
        scale = max(abs(v) for v in values)
        scaled = np.array([complex(v / scale) for v in values], dtype=np.complex128)
        if scaled[0] == 0 or not np.all(np.isfinite(scaled)):
            starts = mpmath.polyroots(values, maxsteps=constants.ABERTH_MAX_ITER, extraprec=mpmath.mp.prec)
        else:
            starts = aberth(scaled / scaled[0])
        for start in starts:
            found.append(mp_newton(values, start, max_steps))
    found.extend([(mpmath.mpc(0), mpmath.mpf(0))] * zeros)
    return found


def _cluster(values: List[complex], corrections: List[float], radius: float) -> List[RootCluster]:
    remaining = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    clusters = []
    used = set()
    for i in remaining:
        if i in used:
            continue
        members = [i]
        used.add(i)
        for j in remaining:
            if j not in used and abs(values[j] - values[i]) <= radius * (1 + abs(values[i])):
                members.append(j)
                used.add(j)
        center = sum(values[k] for k in members) / len(members)
        clusters.append(RootCluster(center, len(members), max(corrections[k] for k in members)))
    return clusters


def polynomial_roots(coeffs: Sequence[Fraction], cluster_radius: float = constants.CLUSTER_RADIUS) -> List[RootCluster]:
    """All complex roots of the polynomial with exact ``coeffs`` (highest power first)."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if not coeffs:
        raise ValueError("the zero polynomial has no finite root set")
    coeffs, zeros = _strip_zero_roots(coeffs)
    values: List[complex] = []
    corrections: List[float] = []
    degree = len(coeffs) - 1
    if degree == 1:
        values.append(complex(-coeffs[1] / coeffs[0]))
        corrections.append(0.0)
    elif degree > 1:
        scaled = _scaled_floats(coeffs)
        if scaled is None:
            logger.debug(f"Degree {degree} coefficients do not fit doubles; starting from mpmath roots")
            starts = _mp_start(coeffs)
        else:
            starts = list(aberth(scaled))
        for start in starts:
            root, correction = newton_polish(coeffs, start)
            values.append(root)
            corrections.append(correction)
    values.extend([0j] * zeros)
    corrections.extend([0.0] * zeros)
    return _cluster(values, corrections, cluster_radius)


def univariate_roots(p: MultiPoly, tol: float = constants.CLUSTER_RADIUS) -> List[RootCluster]:
    """Roots of a polynomial with at most one effective variable, clustered with multiplicity.

    Raises:
        ValueError: For the zero polynomial or a polynomial in several variables.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    used = p.variables()
    if len(used) > 1:
        raise ValueError(f"expected a univariate polynomial, found variables {used}")
    if not used:
        return []
    return polynomial_roots(p.univariate_coefficients(used[0]), tol)

