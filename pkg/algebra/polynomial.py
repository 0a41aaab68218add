"""Exact sparse multivariate polynomials over the rationals.

Polynomials are immutable maps from exponent tuples to nonzero ``Fraction``
coefficients. Monomial helpers and the term orders themselves come from
``sympy.polys``; everything here only adds the exact-rational carrier.
"""

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, ClassVar, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from sympy.polys import orderings
from sympy.polys.monomials import monomial_mul

import constants

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


class VariableCountError(ValueError):
    """Operands live in polynomial rings with different variable counts."""


class PolynomialIndexError(IndexError):
    """A variable index outside the ambient ring."""


def to_rational(value) -> Fraction:
    """Converts ints, Fractions and decimal or ratio strings to an exact Fraction.

    Floats are read through their shortest decimal repr, so 0.1 becomes 1/10.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    if isinstance(value, float):
        if not np.isfinite(value):
            raise ValueError(f"non-finite value {value}")
        return Fraction(repr(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


@dataclass(frozen=True)
class MonomialOrder:
    """A total monomial order: lexicographic or graded reverse lexicographic,
    applied after permuting the variables by ``permutation`` (first = largest)."""

    KINDS: ClassVar[Tuple[str, ...]] = ("lex", "grevlex")

    kind: str
    permutation: Tuple[int, ...]
    _identity: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {self.kind}, expected one of {self.KINDS}")
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ValueError(f"{self.permutation} is not a permutation")
        object.__setattr__(self, "permutation", tuple(self.permutation))
        object.__setattr__(self, "_identity", self.permutation == tuple(range(len(self.permutation))))

    @classmethod
    def lex(cls, nvars: int) -> "MonomialOrder":
        return cls("lex", tuple(range(nvars)))

    @classmethod
    def grevlex(cls, nvars: int) -> "MonomialOrder":
        return cls("grevlex", tuple(range(nvars)))

    @classmethod
    def named(cls, kind: str, nvars: int) -> "MonomialOrder":
        return cls(kind, tuple(range(nvars)))

    @property
    def nvars(self) -> int:
        return len(self.permutation)

    @property
    def last_variable(self) -> int:
        """The smallest variable; the eliminant of a lex basis lives in it."""
        return self.permutation[-1]

    def key(self, monom: Monomial):
        if not self._identity:
            monom = tuple(monom[i] for i in self.permutation)
        if self.kind == "lex":
            return orderings.lex(monom)
        return orderings.grevlex(monom)


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with exact rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash", "_nested")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, Scalar]] = None):
        if nvars < 0:
            raise ValueError("variable count must be non-negative")
        clean: Dict[Monomial, Fraction] = {}
        for monom, coeff in (terms or {}).items():
            monom = tuple(int(e) for e in monom)
            if len(monom) != nvars:
                raise VariableCountError(f"monomial {monom} does not have {nvars} exponents")
            if any(e < 0 for e in monom):
                raise ValueError(f"negative exponent in {monom}")
            value = clean.get(monom, Fraction(0)) + to_rational(coeff)
            if value:
                clean[monom] = value
            else:
                clean.pop(monom, None)
        self.nvars = nvars
        self.terms = clean
        self._hash = None
        self._nested = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Monomial, Fraction]) -> "MultiPoly":
        # Trusted constructor: terms already normalized and owned by the result.
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly.terms = terms
        poly._hash = None
        poly._nested = None
        return poly

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, value: Scalar, nvars: int) -> "MultiPoly":
        value = to_rational(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise PolynomialIndexError(f"variable {index} out of range for {nvars} variables")
        monom = tuple(1 if i == index else 0 for i in range(nvars))
        return cls._raw(nvars, {monom: Fraction(1)})

    # ---------------------------------
    # Basic properties
    # ---------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Maximal total degree of a term; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        self._check_index(var)
        return max((m[var] for m in self.terms), default=-1)

    def variables(self) -> Tuple[int, ...]:
        """Indices of the variables that occur with a positive exponent."""
        used = set()
        for monom in self.terms:
            used.update(i for i, e in enumerate(monom) if e)
        return tuple(sorted(used))

    def max_abs_coefficient(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == MultiPoly.constant(other, self.nvars).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # ---------------------------------
    # Ring operations
    # ---------------------------------

    def _check_index(self, var: int):
        if not 0 <= var < self.nvars:
            raise PolynomialIndexError(f"variable {var} out of range for {self.nvars} variables")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise VariableCountError(f"variable count mismatch: {self.nvars} != {other.nvars}")
            return other
        if isinstance(other, (int, Fraction, str)) and not isinstance(other, bool):
            return MultiPoly.constant(other, self.nvars)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            return other + self
        terms = dict(self.terms)
        for monom, coeff in other.terms.items():
            value = terms.get(monom, 0) + coeff
            if value:
                terms[monom] = value
            else:
                del terms[monom]
        return MultiPoly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        terms: Dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                monom = monomial_mul(ma, mb)
                value = terms.get(monom, 0) + ca * cb
                if value:
                    terms[monom] = value
                else:
                    del terms[monom]
        return MultiPoly._raw(self.nvars, terms)

    def __rmul__(self, other) -> "MultiPoly":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "MultiPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(1, self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Scalar) -> "MultiPoly":
        factor = to_rational(factor)
        if not factor:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {m: c * factor for m, c in self.terms.items()})

    def mul_term(self, monom: Monomial, coeff: Scalar = 1) -> "MultiPoly":
        coeff = to_rational(coeff)
        if not coeff:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {monomial_mul(m, monom): c * coeff for m, c in self.terms.items()})

    # ---------------------------------
    # Ordered access
    # ---------------------------------

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def leading_term(self, order: MonomialOrder) -> Tuple[Monomial, Fraction]:
        monom = self.leading_monomial(order)
        return monom, self.terms[monom]

    def sorted_terms(self, order: MonomialOrder) -> List[Tuple[Monomial, Fraction]]:
        """Terms in descending order."""
        return sorted(self.terms.items(), key=lambda item: order.key(item[0]), reverse=True)

    def monic(self, order: MonomialOrder) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coefficient(order))

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for coeff in self.terms.values():
            num = gcd(num, coeff.numerator)
            den = lcm(den, coeff.denominator)
        return Fraction(num, den)

    def primitive(self, order: Optional[MonomialOrder] = None) -> "MultiPoly":
        """Integer-coefficient associate with content 1; positive leading
        coefficient when an order is given."""
        if not self.terms:
            return self
        content = self.content()
        if order is not None and self.leading_coefficient(order) < 0:
            content = -content
        return self.scale(1 / content)

    # ---------------------------------
    # Calculus and evaluation
    # ---------------------------------

    def diff(self, var: int) -> "MultiPoly":
        self._check_index(var)
        terms: Dict[Monomial, Fraction] = {}
        for monom, coeff in self.terms.items():
            e = monom[var]
            if e:
                lowered = monom[:var] + (e - 1,) + monom[var + 1:]
                terms[lowered] = coeff * e
        return MultiPoly._raw(self.nvars, terms)

    def univariate_coefficients(self, var: int) -> List[Fraction]:
        """Coefficients from the highest power of ``var`` down to the constant.

        Raises ValueError if another variable occurs.
        """
        self._check_index(var)
        if any(i != var for i in self.variables()):
            raise ValueError(f"polynomial is not univariate in variable {var}")
        degree = self.degree_in(var)
        coeffs = [Fraction(0)] * (degree + 1)
        for monom, coeff in self.terms.items():
            coeffs[degree - monom[var]] = coeff
        return coeffs

    def nested(self):
        """Coefficients laid out for Horner evaluation.

        A list indexed by the exponent of the first variable; each entry is the same layout
        in the remaining variables (None where no term has that exponent), with Fraction
        coefficients once no variables are left.
        """
        if self._nested is None:
            self._nested = _nest(self.terms)
        return self._nested

    def format(self, names: Optional[Sequence[str]] = None, order: Optional[MonomialOrder] = None) -> str:
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        order = order or MonomialOrder.grevlex(self.nvars)
        pieces = []
        for monom, coeff in self.sorted_terms(order):
            factors = []
            for name, e in zip(names, monom):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = f"{magnitude}*" + "*".join(factors)
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.format()})"


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Exact ring operation ``op`` in {"add", "sub", "mul"}."""
    if a.nvars != b.nvars:
        raise VariableCountError(f"variable count mismatch: {a.nvars} != {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op}")


def differentiate(p: MultiPoly, var: int) -> MultiPoly:
    return p.diff(var)


def _nest(terms: Mapping[Monomial, Fraction]):
    if not terms:
        return None
    if not next(iter(terms)):
        return terms[()]
    groups: Dict[int, Dict[Monomial, Fraction]] = {}
    for monom, coeff in terms.items():
        groups.setdefault(monom[0], {})[monom[1:]] = coeff
    layout: List = [None] * (max(groups) + 1)
    for e, inner in groups.items():
        layout[e] = _nest(inner)
    return layout


def _horner(layout, point: Sequence, depth: int, convert: Callable):
    # Horner in point[depth], with coefficients that are polynomials in the later coordinates.
    if depth == len(point):
        return convert(layout)
    x = point[depth]
    result = None
    for inner in reversed(layout):
        if result is not None:
            result = result * x
        if inner is not None:
            value = _horner(inner, point, depth + 1, convert)
            result = value if result is None else result + value
    return result


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def _is_mp(value) -> bool:
    return isinstance(value, (mpmath.mpf, mpmath.mpc))


def to_mp(value: Fraction):
    """Rounds an exact rational to the current mpmath working precision."""
    return mpmath.mpf(value.numerator) / value.denominator


def evaluate(p: MultiPoly, point: Sequence):
    """Evaluates ``p`` at ``point`` by nested Horner steps, one variable at a time.

    Rational points give the exact Fraction value. mpmath points are evaluated
    at the active mpmath precision with coefficients rounded to it. Float or
    complex points use double precision with coefficients rounded at use.
    """
    point = list(point)
    if len(point) != p.nvars:
        raise VariableCountError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    if all(_is_exact(v) for v in point):
        point = [Fraction(v) for v in point]
        zero = Fraction(0)
        convert: Callable = lambda c: c
    elif any(_is_mp(v) for v in point):
        point = [v if _is_mp(v) else to_mp(Fraction(v)) if _is_exact(v) else mpmath.mpmathify(v) for v in point]
        zero = mpmath.mpf(0)
        convert = to_mp
    else:
        if any(isinstance(v, complex) or np.iscomplexobj(v) for v in point):
            point = [complex(v) for v in point]
        else:
            point = [float(v) for v in point]
        zero = 0.0
        convert = float
    if not p.terms:
        return zero
    return _horner(p.nested(), point, 0, convert)


def evaluate_many(p: MultiPoly, points: np.ndarray) -> np.ndarray:
    """Vectorized double-precision evaluation at the rows of ``points``."""
    points = np.atleast_2d(np.asarray(points))
    if points.shape[1] != p.nvars:
        raise VariableCountError(f"points have {points.shape[1]} coordinates, polynomial has {p.nvars} variables")
    dtype = np.result_type(points.dtype, np.float64)
    if not p.terms:
        return np.zeros(points.shape[0], dtype=dtype)
    columns = [points[:, v].astype(dtype) for v in range(p.nvars)]
    values = _horner(p.nested(), columns, 0, float)
    return np.broadcast_to(values, (points.shape[0],)).astype(dtype)


class PolyMatrix:
    """Rectangular matrix of MultiPoly entries over a common ring."""

    __slots__ = ("rows", "cols", "nvars", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]]):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise ValueError("matrix must have at least one row and one column")
        cols = len(entries[0])
        if any(len(row) != cols for row in entries):
            raise ValueError("matrix rows differ in length")
        nvars = entries[0][0].nvars
        if any(e.nvars != nvars for row in entries for e in row):
            raise VariableCountError("matrix entries differ in variable count")
        self.rows = len(entries)
        self.cols = cols
        self.nvars = nvars
        self.entries = entries

    @classmethod
    def from_rationals(cls, values: Sequence[Sequence[Scalar]], nvars: int) -> "PolyMatrix":
        return cls([[MultiPoly.constant(v, nvars) for v in row] for row in values])

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def _check_shape(self, other: "PolyMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_shape(other)
        return PolyMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        result = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                total = MultiPoly.zero(self.nvars)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a and b:
                        total = total + a * b
                row.append(total)
            result.append(row)
        return PolyMatrix(result)


def poly_det(m: PolyMatrix) -> MultiPoly:
    """Exact determinant by Laplace expansion along successive rows,
    memoized over the set of remaining columns."""
    if m.rows != m.cols:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    if m.rows > constants.MAX_DET_SIZE:
        raise ValueError(f"determinant expansion supports at most {constants.MAX_DET_SIZE} rows, got {m.rows}")
    n = m.rows
    one = MultiPoly.constant(1, m.nvars)
    memo: Dict[int, MultiPoly] = {}

    def minor(mask: int) -> MultiPoly:
        # Determinant of the trailing rows restricted to the columns in mask.
        row = n - bin(mask).count("1")
        if row == n:
            return one
        if mask in memo:
            return memo[mask]
        total = MultiPoly.zero(m.nvars)
        position = 0
        for col in range(n):
            if not mask >> col & 1:
                continue
            entry = m.entries[row][col]
            if entry:
                term = entry * minor(mask & ~(1 << col))
                total = total + term if position % 2 == 0 else total - term
            position += 1
        memo[mask] = total
        return total

    return minor((1 << n) - 1)
