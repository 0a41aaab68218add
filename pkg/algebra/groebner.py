"""Groebner bases over Q: Buchberger's algorithm with the normal selection
strategy and Gebauer-Moeller pair elimination, plus FGLM order change.

The Buchberger working set holds primitive integer polynomials: after every
reduction denominators are cleared and the integer content is removed, so
coefficient growth stays under control. Returned bases are reduced and monic.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from sympy.polys.monomials import monomial_div, monomial_divides, monomial_lcm, monomial_mul

from algebra import hilbert
from algebra.polynomial import Monomial, MonomialOrder, MultiPoly, VariableCountError
from utilities.logs import logger

IntTerms = Dict[Monomial, int]


class PositiveDimensionalError(Exception):
    """The ideal has infinitely many complex zeros."""

    def __init__(self, dimension: int, degree: int):
        super().__init__(f"ideal is positive-dimensional (dim {dimension}, degree {degree})")
        self.dimension = dimension
        self.degree = degree


@dataclass(frozen=True)
class Ideal:
    """An ideal given by nonzero generators in a common ring."""

    generators: Tuple[MultiPoly, ...]
    nvars: int

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        for g in gens:
            if g.nvars != self.nvars:
                raise VariableCountError(f"generator in {g.nvars} variables, ideal in {self.nvars}")
            if g.is_zero():
                raise ValueError("ideal generators must be nonzero")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, generators: Iterable[MultiPoly]) -> "Ideal":
        gens = tuple(generators)
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        return cls(gens, gens[0].nvars)


@dataclass(frozen=True)
class GroebnerResult:
    """A reduced monic Groebner basis with the invariants of its leading-term ideal."""

    basis: Tuple[MultiPoly, ...]
    order: MonomialOrder
    dimension: int
    degree: int

    @property
    def nvars(self) -> int:
        return self.order.nvars

    @property
    def is_unit(self) -> bool:
        return self.dimension == -1

    @property
    def is_zero_dimensional(self) -> bool:
        return self.dimension == 0

    def leading_monomials(self) -> List[Monomial]:
        return [g.leading_monomial(self.order) for g in self.basis]


# ---------------------------------
# Rational-coefficient operations
# ---------------------------------

def normal_form(p: MultiPoly, basis: Sequence[MultiPoly], order: MonomialOrder) -> MultiPoly:
    """Remainder of multivariate division of ``p`` by ``basis``.

    No term of the result is divisible by a leading monomial of the basis.
    """
    if not basis:
        return p
    leads = []
    for g in basis:
        if g.nvars != p.nvars:
            raise VariableCountError(f"basis element in {g.nvars} variables, polynomial in {p.nvars}")
        if g.is_zero():
            raise ValueError("basis elements must be nonzero")
        lm, lc = g.leading_term(order)
        leads.append((lm, lc, g.terms))
    key = order.key
    work = dict(p.terms)
    remainder: Dict[Monomial, Fraction] = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        for lm, lc, terms in leads:
            if monomial_divides(lm, m):
                q = monomial_div(m, lm)
                factor = c / lc
                for gm, gc in terms.items():
                    mm = monomial_mul(gm, q)
                    value = work.get(mm, 0) - factor * gc
                    if value:
                        work[mm] = value
                    else:
                        work.pop(mm, None)
                break
        else:
            remainder[m] = c
            del work[m]
    return MultiPoly._raw(p.nvars, remainder)


def s_polynomial(f: MultiPoly, g: MultiPoly, order: MonomialOrder) -> MultiPoly:
    lmf, lcf = f.leading_term(order)
    lmg, lcg = g.leading_term(order)
    lcm = monomial_lcm(lmf, lmg)
    return f.mul_term(monomial_div(lcm, lmf), 1 / lcf) - g.mul_term(monomial_div(lcm, lmg), 1 / lcg)


def is_groebner(basis: Sequence[MultiPoly], order: MonomialOrder) -> bool:
    """Buchberger certificate: every S-polynomial reduces to zero."""
    for f, g in itertools.combinations(basis, 2):
        if normal_form(s_polynomial(f, g, order), basis, order):
            return False
    return True


def is_reduced(basis: Sequence[MultiPoly], order: MonomialOrder) -> bool:
    leads = [g.leading_monomial(order) for g in basis]
    for i, g in enumerate(basis):
        if g.leading_coefficient(order) != 1:
            return False
        others = leads[:i] + leads[i + 1:]
        for m in g.terms:
            if any(monomial_divides(lm, m) for lm in others):
                return False
    return True


# ---------------------------------
# Integer working set
# ---------------------------------

def _primitive_terms(terms: Dict[Monomial, Fraction], lead: Monomial) -> IntTerms:
    """Clears denominators and content; the leading coefficient ends up positive."""
    den = 1
    for c in terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    ints = {m: int(c * den) for m, c in terms.items()}
    return _strip_content(ints, lead)


def _strip_content(ints: IntTerms, lead: Optional[Monomial] = None) -> IntTerms:
    content = 0
    for c in ints.values():
        content = gcd(content, c)
        if content == 1:
            break
    if lead is not None and ints[lead] < 0:
        content = -content
    if content in (0, 1):
        return ints
    return {m: c // content for m, c in ints.items()}


class _WorkPoly:
    __slots__ = ("lm", "lc", "terms")

    def __init__(self, lm: Monomial, terms: IntTerms):
        self.lm = lm
        self.lc = terms[lm]
        self.terms = terms


def _reduce_int(terms: IntTerms, reducers: Sequence[_WorkPoly], key) -> IntTerms:
    """Fraction-free full reduction; the result is primitive."""
    work = dict(terms)
    remainder: IntTerms = {}
    steps = 0
    while work:
        m = max(work, key=key)
        c = work[m]
        for g in reducers:
            if monomial_divides(g.lm, m):
                break
        else:
            remainder[m] = c
            del work[m]
            continue
        q = monomial_div(m, g.lm)
        d = gcd(c, g.lc)
        a = g.lc // d
        b = c // d
        if a != 1:
            work = {mm: v * a for mm, v in work.items()}
            remainder = {mm: v * a for mm, v in remainder.items()}
        for gm, gc in g.terms.items():
            mm = monomial_mul(gm, q)
            value = work.get(mm, 0) - b * gc
            if value:
                work[mm] = value
            else:
                work.pop(mm, None)
        steps += 1
        if steps % 32 == 0 and (work or remainder):
            both = dict(work)
            both.update(remainder)
            content = 0
            for v in both.values():
                content = gcd(content, v)
                if content == 1:
                    break
            if content > 1:
                work = {mm: v // content for mm, v in work.items()}
                remainder = {mm: v // content for mm, v in remainder.items()}
    if not remainder:
        return remainder
    return _strip_content(remainder, max(remainder, key=key))


def _int_spoly(f: _WorkPoly, g: _WorkPoly) -> IntTerms:
    lcm = monomial_lcm(f.lm, g.lm)
    d = gcd(f.lc, g.lc)
    ff = g.lc // d
    gg = f.lc // d
    qf = monomial_div(lcm, f.lm)
    qg = monomial_div(lcm, g.lm)
    out: IntTerms = {}
    for m, c in f.terms.items():
        out[monomial_mul(m, qf)] = c * ff
    for m, c in g.terms.items():
        mm = monomial_mul(m, qg)
        value = out.get(mm, 0) - c * gg
        if value:
            out[mm] = value
        else:
            out.pop(mm, None)
    return out


def _update_pairs(leads: List[Monomial], pairs: Set[Tuple[int, int]], new: int, key) -> Set[Tuple[int, int]]:
    """Gebauer-Moeller update when basis element ``new`` joins."""
    lmf = leads[new]
    kept = set()
    for i, j in pairs:
        l_ij = monomial_lcm(leads[i], leads[j])
        if (not monomial_divides(lmf, l_ij)
                or l_ij == monomial_lcm(leads[i], lmf)
                or l_ij == monomial_lcm(leads[j], lmf)):
            kept.add((i, j))
    lcm_groups: Dict[Monomial, List[int]] = {}
    for i in range(new):
        lcm_groups.setdefault(monomial_lcm(leads[i], lmf), []).append(i)
    minimal_lcms: List[Monomial] = []
    for lcm in sorted(lcm_groups, key=lambda m: (sum(m), key(m))):
        if all(not monomial_divides(other, lcm) for other in minimal_lcms):
            minimal_lcms.append(lcm)
    for lcm in minimal_lcms:
        group = lcm_groups[lcm]
        # Coprime leading monomials: the S-polynomial reduces to zero.
        if not any(lcm == monomial_mul(leads[i], lmf) for i in group):
            kept.add((min(group), new))
    return kept


def _to_result_poly(nvars: int, terms: IntTerms, lead: Monomial) -> MultiPoly:
    lc = terms[lead]
    return MultiPoly._raw(nvars, {m: Fraction(c, lc) for m, c in terms.items()})


def _finish(basis: List[MultiPoly], order: MonomialOrder) -> GroebnerResult:
    basis = sorted(basis, key=lambda g: order.key(g.leading_monomial(order)))
    dimension, degree = hilbert_dim_degree_of(basis, order)
    return GroebnerResult(tuple(basis), order, dimension, degree)


def _unit_result(order: MonomialOrder) -> GroebnerResult:
    return GroebnerResult((MultiPoly.constant(1, order.nvars),), order, -1, 0)


def buchberger(ideal: Ideal, order: MonomialOrder) -> GroebnerResult:
    """Reduced monic Groebner basis of ``ideal`` with respect to ``order``."""
    if order.nvars != ideal.nvars:
        raise VariableCountError(f"order on {order.nvars} variables, ideal in {ideal.nvars}")
    key = order.key
    nvars = ideal.nvars
    polys: List[_WorkPoly] = []
    leads: List[Monomial] = []
    pairs: Set[Tuple[int, int]] = set()

    def add(terms: IntTerms) -> bool:
        lead = max(terms, key=key)
        if sum(lead) == 0:
            return False
        polys.append(_WorkPoly(lead, terms))
        leads.append(lead)
        pairs_update = _update_pairs(leads, pairs, len(polys) - 1, key)
        pairs.clear()
        pairs.update(pairs_update)
        return True

    for g in ideal.generators:
        terms = _primitive_terms(g.terms, g.leading_monomial(order))
        if not add(terms):
            return _unit_result(order)

    def pair_key(p):
        lcm = monomial_lcm(leads[p[0]], leads[p[1]])
        return sum(lcm), key(lcm), p

    processed = 0
    while pairs:
        pair = min(pairs, key=pair_key)
        pairs.remove(pair)
        spoly = _int_spoly(polys[pair[0]], polys[pair[1]])
        processed += 1
        if not spoly:
            continue
        remainder = _reduce_int(spoly, polys, key)
        if remainder:
            if not add(remainder):
                logger.debug("Buchberger reached the unit ideal")
                return _unit_result(order)
        if processed % 100 == 0:
            logger.debug(f"Buchberger: {processed} pairs processed, basis size {len(polys)}, {len(pairs)} pending")

    # Minimalize, then interreduce.
    minimal: List[_WorkPoly] = []
    for p in sorted(polys, key=lambda p: key(p.lm)):
        if all(not monomial_divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    reduced = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        terms = _reduce_int(p.terms, others, key)
        reduced.append(_to_result_poly(nvars, terms, p.lm))
    logger.debug(f"Buchberger done after {processed} pairs: {len(reduced)} basis elements")
    return _finish(reduced, order)


# ---------------------------------
# Invariants of the leading-term ideal
# ---------------------------------

def hilbert_dim_degree_of(basis: Sequence[MultiPoly], order: MonomialOrder) -> Tuple[int, int]:
    leads = [g.leading_monomial(order) for g in basis]
    numerator = hilbert.hilbert_numerator(leads, order.nvars)
    return hilbert.dimension_degree(numerator, order.nvars)


def hilbert_dim_degree(gb: GroebnerResult) -> Tuple[int, int]:
    """Dimension and degree read off the Hilbert series of the leading-term ideal."""
    return hilbert_dim_degree_of(gb.basis, gb.order)


def standard_monomials(gb: GroebnerResult) -> List[Monomial]:
    """Monomials outside the leading-term ideal, ascending in the basis order."""
    if gb.is_unit:
        return []
    if gb.dimension != 0:
        raise PositiveDimensionalError(gb.dimension, gb.degree)
    leads = gb.leading_monomials()
    bounds = []
    for var in range(gb.nvars):
        powers = [lm[var] for lm in leads if lm[var] and sum(lm) == lm[var]]
        bounds.append(min(powers))
    monomials = [m for m in itertools.product(*(range(b) for b in bounds))
                 if not any(monomial_divides(lm, m) for lm in leads)]
    return sorted(monomials, key=gb.order.key)


# ---------------------------------
# Order change
# ---------------------------------

def fglm(gb: GroebnerResult, target: MonomialOrder) -> GroebnerResult:
    """Converts a zero-dimensional reduced basis to the reduced basis of ``target``."""
    if gb.is_unit:
        return _unit_result(target)
    if gb.dimension != 0:
        raise PositiveDimensionalError(gb.dimension, gb.degree)
    if gb.order == target:
        return gb
    nvars = gb.nvars
    source = gb.basis
    one = (0,) * nvars
    unit_vectors = [tuple(1 if i == v else 0 for i in range(nvars)) for v in range(nvars)]

    staircase: List[Monomial] = []
    normal_forms: Dict[Monomial, MultiPoly] = {}
    # Echelon rows: (pivot monomial, vector, combination over candidate indices).
    echelon: List[Tuple[Monomial, Dict[Monomial, Fraction], Dict[int, Fraction]]] = []
    new_basis: List[MultiPoly] = []
    new_leads: List[Monomial] = []
    candidates: Dict[Monomial, Tuple[Optional[Monomial], int]] = {one: (None, -1)}

    while candidates:
        m = min(candidates, key=target.key)
        parent, var = candidates.pop(m)
        if any(monomial_divides(lm, m) for lm in new_leads):
            continue
        if parent is None:
            nf = normal_form(MultiPoly.constant(1, nvars), source, gb.order)
        else:
            nf = normal_form(normal_forms[parent].mul_term(unit_vectors[var]), source, gb.order)
        index = len(staircase)
        vector = dict(nf.terms)
        combination: Dict[int, Fraction] = {index: Fraction(1)}
        for pivot, row, row_comb in echelon:
            c = vector.get(pivot)
            if not c:
                continue
            for mm, v in row.items():
                value = vector.get(mm, 0) - c * v
                if value:
                    vector[mm] = value
                else:
                    vector.pop(mm, None)
            for k, v in row_comb.items():
                value = combination.get(k, 0) - c * v
                if value:
                    combination[k] = value
                else:
                    combination.pop(k, None)
        if not vector:
            terms = {(m if k == index else staircase[k]): c for k, c in combination.items()}
            new_basis.append(MultiPoly._raw(nvars, terms))
            new_leads.append(m)
            continue
        pivot = max(vector, key=gb.order.key)
        scale = 1 / vector[pivot]
        echelon.append((pivot,
                        {mm: v * scale for mm, v in vector.items()},
                        {k: v * scale for k, v in combination.items()}))
        staircase.append(m)
        normal_forms[m] = nf
        for v in range(nvars):
            child = monomial_mul(m, unit_vectors[v])
            if child not in candidates:
                candidates[child] = (m, v)

    logger.debug(f"FGLM: {len(new_basis)} elements, {len(staircase)} standard monomials")
    return _finish(new_basis, target)
