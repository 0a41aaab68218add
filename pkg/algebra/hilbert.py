"""Hilbert series of monomial ideals.

The affine Hilbert series of ``Q[x]/I`` for a monomial ideal ``I`` in n
variables is ``N(t) / (1 - t)^n``; we compute the numerator ``N`` by
recursive pivot splitting:

    N(I) = N(I + <p>) + t^deg(p) * N(I : p)

for a pure power ``p`` of a variable. Polynomials in ``t`` are lists of
integer coefficients indexed by the power of ``t``.
"""

from collections import Counter
from typing import Iterable, List, Sequence, Tuple

from sympy.polys.monomials import monomial_divides

Monomial = Tuple[int, ...]
TPoly = List[int]


def _trim(p: TPoly) -> TPoly:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _t_mul(a: TPoly, b: TPoly) -> TPoly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _t_add(a: TPoly, b: TPoly) -> TPoly:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] += y
    return _trim(out)


def _t_shift(a: TPoly, k: int) -> TPoly:
    return [0] * k + list(a)


def _one_minus_t_power(k: int) -> TPoly:
    p = [0] * (k + 1)
    p[0] = 1
    p[k] -= 1
    return _trim(p)


def minimal_generators(monomials: Iterable[Monomial]) -> List[Monomial]:
    """Removes duplicates and monomials divisible by another generator."""
    unique = sorted(set(tuple(m) for m in monomials), key=lambda m: (sum(m), m))
    minimal: List[Monomial] = []
    for m in unique:
        if not any(monomial_divides(g, m) for g in minimal):
            minimal.append(m)
    return minimal


def _support(m: Monomial) -> List[int]:
    return [i for i, e in enumerate(m) if e]


def hilbert_numerator(generators: Iterable[Monomial], nvars: int) -> TPoly:
    """Numerator of the Hilbert series of Q[x_1..x_nvars] / <generators>."""
    gens = minimal_generators(generators)
    if not gens:
        return [1]
    if any(sum(g) == 0 for g in gens):
        return [0]
    mixed = [g for g in gens if len(_support(g)) > 1]
    if not mixed:
        # Pure powers of distinct variables form a regular sequence.
        result = [1]
        for g in gens:
            result = _t_mul(result, _one_minus_t_power(sum(g)))
        return result
    if len(gens) == 1:
        return _one_minus_t_power(sum(gens[0]))

    # Pivot on the variable shared by the most mixed generators.
    counts = Counter(i for g in mixed for i in _support(g))
    var = min(counts, key=lambda i: (-counts[i], i))
    exponent = min(g[var] for g in gens if g[var])
    pivot = tuple(exponent if i == var else 0 for i in range(nvars))

    with_pivot = hilbert_numerator(gens + [pivot], nvars)
    quotient = [tuple(e - min(e, p) for e, p in zip(g, pivot)) for g in gens]
    colon = hilbert_numerator(quotient, nvars)
    return _t_add(with_pivot, _t_shift(colon, exponent))


def dimension_degree(numerator: Sequence[int], nvars: int) -> Tuple[int, int]:
    """Krull dimension and degree from a Hilbert numerator over (1 - t)^nvars.

    The zero numerator (unit ideal) gives dimension -1 and degree 0.
    """
    p = _trim(list(numerator))
    if p == [0]:
        return -1, 0
    cancelled = 0
    while sum(p) == 0 and cancelled < nvars:
        # Divide by (1 - t): prefix sums.
        q = []
        running = 0
        for coeff in p[:-1]:
            running += coeff
            q.append(running)
        p = _trim(q) if q else [0]
        cancelled += 1
    return nvars - cancelled, sum(p)
