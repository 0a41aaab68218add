"""All complex zeros of a zero-dimensional ideal from its reduced lex basis."""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

import constants
from algebra import roots
from algebra.groebner import GroebnerResult, PositiveDimensionalError
from algebra.polynomial import MultiPoly, evaluate, to_mp
from utilities.logs import logger
from utilities.mathutils import point_distance


class NonTriangularBasisError(Exception):
    """A lex basis that neither is in shape position nor can be solved level by level."""


class IncompleteSolutionError(NonTriangularBasisError):
    """Fewer solutions, counted with multiplicity, were found than the degree of the ideal."""


@dataclass(frozen=True)
class ComplexPoint:
    coordinates: Tuple[complex, ...]
    residuals: Tuple[float, ...]
    multiplicity_hint: int = 1
    verified: bool = True
    # Size of the last Newton correction applied while polishing.
    correction: float = 0.0

    def is_real(self, real_tol: float = constants.REAL_TOL) -> bool:
        return all(abs(c.imag) <= real_tol * (1 + abs(c.real)) for c in self.coordinates)

    def real_part(self) -> Tuple[float, ...]:
        return tuple(float(c.real) for c in self.coordinates)


@dataclass(frozen=True)
class SolutionSet:
    points: Tuple[ComplexPoint, ...]
    degree: int
    all_real: bool
    shape_position: bool = True
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def total_multiplicity(self) -> int:
        return sum(p.multiplicity_hint for p in self.points)


def _is_lex(gb: GroebnerResult) -> bool:
    return gb.order.kind == "lex"


def shape_position(gb: GroebnerResult) -> Optional[Dict[int, MultiPoly]]:
    """Returns ``{var: h_var}`` with ``x_var = h_var(x_last)`` and the eliminant under key ``last``,
    or None when the basis is not in shape position."""
    last = gb.order.last_variable
    if len(gb.basis) != gb.nvars:
        return None
    result: Dict[int, MultiPoly] = {}
    for g in gb.basis:
        lm = g.leading_monomial(gb.order)
        used = g.variables()
        if used == (last,):
            if last in result:
                return None
            result[last] = g
            continue
        if sum(lm) != 1:
            return None
        var = lm.index(1)
        rest = g - MultiPoly.variable(var, gb.nvars)
        if var == last or any(v != last for v in rest.variables()):
            return None
        result[var] = -rest
    if last not in result or len(result) != gb.nvars:
        return None
    return result


@dataclass
class _Partial:
    values: Dict[int, object]
    multiplicity: int
    # Relative accuracy of the assigned coordinates.
    error: float


def _specialize(g: MultiPoly, var: int, assignment: Dict[int, object]):
    """Coefficients of ``g`` in ``var`` (highest power first) at the assigned values, together
    with the sum of the absolute term values that went into each coefficient."""
    degree = g.degree_in(var)
    coeffs = [mpmath.mpc(0)] * (degree + 1)
    sizes = [mpmath.mpf(0)] * (degree + 1)
    for monom, coeff in g.terms.items():
        value = to_mp(coeff)
        for v, e in enumerate(monom):
            if e and v != var:
                value *= assignment[v] ** e
        k = degree - monom[var]
        coeffs[k] += value
        sizes[k] += abs(value)
    return coeffs, sizes


def _fiber(coeffs: List, sizes: List, zero_tol: float) -> List:
    # Cancelled coefficients become exact zeros; an empty result means g vanishes over the point.
    kept = [c if abs(c) > zero_tol * s else mpmath.mpc(0) for c, s in zip(coeffs, sizes)]
    start = next((i for i, c in enumerate(kept) if c != 0), len(kept))
    return kept[start:]


def _root_multiplicity(coeffs: List, z, tol: float, cap: int) -> int:
    """Order of vanishing of ``coeffs`` at ``z``, at most ``cap``."""
    current = list(coeffs)
    count = 0
    while count < cap and len(current) > 1:
        scale = mpmath.polyval([abs(c) for c in current], abs(z))
        if abs(mpmath.polyval(current, z)) > tol * scale:
            break
        count += 1
        n = len(current) - 1
        current = [c * (n - i) for i, c in enumerate(current[:-1])]
    return count


def _extend(part: _Partial, var: int, level_polys: Sequence[MultiPoly], cluster_radius: float,
            zero_floor: float) -> List[_Partial]:
    zero_tol = max(zero_floor, 1e4 * part.error)
    root_tol = max(constants.FIBER_ROOT_TOL, 1e4 * part.error)
    fibers = [_fiber(*_specialize(g, var, part.values), zero_tol) for g in level_polys]
    fibers = [f for f in fibers if f]
    if not fibers:
        raise NonTriangularBasisError(f"every basis element vanishes over a partial point at variable {var}")
    pivot = min(fibers, key=len)
    if len(pivot) == 1:
        logger.debug(f"Partial point does not extend to variable {var}")
        return []

    groups: List[List[Tuple[object, object]]] = []
    for z, step in roots.mp_roots(pivot):
        for group in groups:
            if abs(group[0][0] - z) <= cluster_radius * (1 + abs(z)):
                group.append((z, step))
                break
        else:
            groups.append([(z, step)])

    extended = []
    for group in groups:
        z = sum(v for v, _ in group) / len(group)
        counts = [(_root_multiplicity(f, z, root_tol, len(group)), f) for f in fibers if f is not pivot]
        multiplicity = min([len(group)] + [c for c, _ in counts])
        if multiplicity == 0:
            continue
        error = max(abs(v - z) + step for v, step in group) / (1 + abs(z))
        if multiplicity == 1 and len(group) > 1:
            simple = next(f for c, f in counts if c == 1)
            z, step = roots.mp_newton(simple, z)
            error = step / (1 + abs(z))
        extended.append(_Partial({**part.values, var: z}, part.multiplicity * multiplicity,
                                 max(part.error, float(error))))
    return extended


def _triangular_points(gb: GroebnerResult, cluster_radius: float) -> List[_Partial]:
    """Solves the lex basis one variable at a time, smallest variable first.

    Over each partial point the basis elements in the solved variables are specialized at
    extended precision; elements that vanish there are dropped and the new coordinate runs
    over the common roots of the rest, with the smallest multiplicity among them.
    """
    levels = list(reversed(gb.order.permutation))
    partial = [_Partial({}, 1, 0.0)]
    with mpmath.workprec(constants.POLISH_PRECISION_BITS):
        zero_floor = float(mpmath.mpf(2) ** (32 - constants.POLISH_PRECISION_BITS))
        for depth, var in enumerate(levels):
            allowed = set(levels[:depth + 1])
            level_polys = [g for g in gb.basis if var in g.variables() and set(g.variables()) <= allowed]
            if not level_polys:
                raise NonTriangularBasisError(f"no basis element determines variable {var}")
            extended = []
            for part in partial:
                extended.extend(_extend(part, var, level_polys, cluster_radius, zero_floor))
            partial = extended
    return partial


def _newton_system(polys: Sequence[MultiPoly], jacobian: Sequence[Sequence[MultiPoly]], start: Sequence[complex],
                   bits: int = constants.POLISH_PRECISION_BITS, max_steps: int = constants.POLISH_MAX_STEPS):
    """Newton iteration on a square polynomial system at ``bits`` of precision."""
    with mpmath.workprec(bits):
        x = [mpmath.mpc(z) for z in start]
        threshold = mpmath.mpf(2) ** (16 - bits)
        last = mpmath.mpf(0)
        for _ in range(max_steps):
            values = mpmath.matrix([evaluate(p, x) for p in polys])
            jac = mpmath.matrix([[evaluate(d, x) for d in row] for row in jacobian])
            try:
                step = mpmath.lu_solve(jac, values)
            except ZeroDivisionError:
                break
            x = [xi - step[i] for i, xi in enumerate(x)]
            last = mpmath.norm(step)
            if last <= threshold * (1 + mpmath.norm(mpmath.matrix(x))):
                break
        return x, float(last)


def _residuals(polys: Sequence[MultiPoly], point) -> Tuple[float, ...]:
    with mpmath.workprec(constants.POLISH_PRECISION_BITS):
        mp_point = [mpmath.mpc(z) if not isinstance(z, mpmath.mpc) else z for z in point]
        return tuple(float(abs(evaluate(p, mp_point))) for p in polys)


def _point_key(point: ComplexPoint):
    return tuple(itertools.chain.from_iterable((c.real, c.imag) for c in point.coordinates))


def _jumped(candidate: Sequence[complex], index: int, starts: Sequence[Sequence[complex]]) -> bool:
    # Newton ended closer to another start than to its own.
    own = point_distance(candidate, starts[index])
    return any(point_distance(candidate, other) < own for j, other in enumerate(starts) if j != index)


def solve_zero_dim(gb: GroebnerResult, tol: float = constants.RESIDUAL_TOL,
                   generators: Optional[Sequence[MultiPoly]] = None,
                   real_tol: float = constants.REAL_TOL,
                   cluster_radius: float = constants.CLUSTER_RADIUS) -> SolutionSet:
    """Enumerates the complex zeros of a zero-dimensional ideal from its reduced lex basis.

    Points are polished by Newton's method on ``generators`` (the original square system)
    when given, otherwise on the basis when it is square. Residuals are reported
    against ``generators`` or the basis.

    Raises:
        ValueError: If the basis is not a lex basis.
        PositiveDimensionalError: If the ideal has positive dimension.
        NonTriangularBasisError: If the lex basis cannot be solved level by level.
        IncompleteSolutionError: If fewer solutions than the degree were recovered.
    """
    if not _is_lex(gb):
        raise ValueError(f"solving needs a lex basis, got {gb.order.kind}")
    if gb.is_unit:
        return SolutionSet((), 0, True)
    if gb.dimension != 0:
        raise PositiveDimensionalError(gb.dimension, gb.degree)

    nvars = gb.nvars
    checks = list(generators) if generators is not None else list(gb.basis)
    polish_system = None
    if len(checks) == nvars:
        polish_system = checks
    elif len(gb.basis) == nvars:
        polish_system = list(gb.basis)
    jacobian = [[p.diff(v) for v in range(nvars)] for p in polish_system] if polish_system else None

    shape = shape_position(gb)
    raw: List[Tuple[List, int, float]] = []
    if shape is not None:
        last = gb.order.last_variable
        for cluster in roots.univariate_roots(shape[last], cluster_radius):
            with mpmath.workprec(constants.POLISH_PRECISION_BITS):
                t = mpmath.mpc(cluster.value)
                coords = [t if v == last else evaluate(shape[v], [t if i == last else mpmath.mpc(0)
                                                               for i in range(nvars)])
                          for v in range(nvars)]
            raw.append((coords, cluster.multiplicity, cluster.correction))
    else:
        logger.debug("Lex basis is not in shape position; solving level by level")
        for part in _triangular_points(gb, cluster_radius):
            raw.append(([part.values[v] for v in range(nvars)], part.multiplicity, part.error))

    starts = [tuple(complex(c) for c in coords) for coords, _, _ in raw]
    points = []
    for index, (coords, multiplicity, correction) in enumerate(raw):
        if polish_system is not None and multiplicity == 1:
            polished, step = _newton_system(polish_system, jacobian, starts[index])
            before = max(_residuals(checks, coords), default=0.0)
            after = max(_residuals(checks, polished), default=0.0)
            if _jumped([complex(c) for c in polished], index, starts):
                logger.debug(f"Newton from {starts[index]} moved to another solution; keeping the start")
            elif after <= before:
                coords, correction = polished, step
        residuals = _residuals(checks, coords)
        verified = all(r <= tol * (1 + float(p.max_abs_coefficient())) for r, p in zip(residuals, checks))
        point = ComplexPoint(tuple(complex(c) for c in coords), residuals, multiplicity, verified, correction)
        if not verified:
            logger.warning(f"Point {point.coordinates} failed the residual check: {max(residuals):.3e}")
        points.append(point)

    points.sort(key=_point_key)
    warnings = []
    total = sum(p.multiplicity_hint for p in points)
    if total < gb.degree:
        message = f"found {total} solutions counted with multiplicity, ideal degree {gb.degree}"
        logger.error(message)
        raise IncompleteSolutionError(message)
    if len(points) != gb.degree or total != gb.degree:
        message = (f"non-radical or clustered: {len(points)} distinct points, multiplicity total {total}, "
                   f"ideal degree {gb.degree}")
        logger.warning(message)
        warnings.append(message)
    all_real = all(p.is_real(real_tol) for p in points)
    return SolutionSet(tuple(points), gb.degree, all_real, shape is not None, tuple(warnings))


def filter_real(solutions: SolutionSet, real_tol: float = constants.REAL_TOL) -> List[Tuple[float, ...]]:
    """Real points of ``solutions`` with their imaginary parts dropped."""
    return [p.real_part() for p in solutions.points if p.is_real(real_tol)]
