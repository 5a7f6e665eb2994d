"""Exact field arithmetic and canonical sparse multivariate polynomials.

Coefficients are either `fractions.Fraction` (rationals) or plain ints in
``0..p-1`` (prime fields); no floating point appears anywhere.  A polynomial
is a mapping from monomials to nonzero coefficients, so two polynomials are
equal exactly when their mappings are equal and the zero polynomial is the
empty mapping.  The degree of the zero polynomial is the sentinel ``None``,
never ``0`` or ``-1``.

Monomials order their variables by ``(namespace, index)`` and polynomials
print in graded lexicographic order, which makes serialization deterministic.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dataclasses_field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import FieldMismatchError

Coeff = Union[Fraction, int]
IndexPart = Union[int, str]


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldTag:
    """Identifies the coefficient field: the rationals or a prime field."""

    kind: str  # "Q" or "Fp"
    characteristic: int = 0

    def __post_init__(self) -> None:
        if self.kind == "Q":
            if self.characteristic != 0:
                raise ValueError("rationals have characteristic 0")
            object.__setattr__(self, "zero", Fraction(0))
            object.__setattr__(self, "one", Fraction(1))
        elif self.kind == "Fp":
            if not _is_prime(self.characteristic):
                raise ValueError(f"{self.characteristic} is not prime")
            object.__setattr__(self, "zero", 0)
            object.__setattr__(self, "one", 1)
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    # --- scalar arithmetic ------------------------------------------------

    zero: Coeff = dataclasses_field(init=False, repr=False, compare=False, default=0)
    one: Coeff = dataclasses_field(init=False, repr=False, compare=False, default=1)

    def coerce(self, value: Coeff) -> Coeff:
        if self.kind == "Q":
            return value if isinstance(value, Fraction) else Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.characteristic == 0:
                raise ZeroDivisionError("denominator vanishes in the field")
            return (
                value.numerator
                * pow(value.denominator, -1, self.characteristic)
            ) % self.characteristic
        return value % self.characteristic

    def add(self, a: Coeff, b: Coeff) -> Coeff:
        return (a + b) % self.characteristic if self.kind == "Fp" else a + b

    def sub(self, a: Coeff, b: Coeff) -> Coeff:
        return (a - b) % self.characteristic if self.kind == "Fp" else a - b

    def mul(self, a: Coeff, b: Coeff) -> Coeff:
        return (a * b) % self.characteristic if self.kind == "Fp" else a * b

    def neg(self, a: Coeff) -> Coeff:
        return (-a) % self.characteristic if self.kind == "Fp" else -a

    def inv(self, a: Coeff) -> Coeff:
        if self.kind == "Fp":
            return pow(a, -1, self.characteristic)
        return 1 / Fraction(a)

    def div(self, a: Coeff, b: Coeff) -> Coeff:
        return self.mul(a, self.inv(b))

    def format_coeff(self, a: Coeff) -> str:
        if self.kind == "Fp":
            return f"({a} mod {self.characteristic})"
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def __str__(self) -> str:
        return "Q" if self.kind == "Q" else f"F{self.characteristic}"


QQ = FieldTag("Q", 0)
GF2 = FieldTag("Fp", 2)


def prime_field(p: int) -> FieldTag:
    return FieldTag("Fp", p)


@functools.total_ordering
@dataclass(frozen=True)
class Variable:
    """A namespaced variable such as ``x[1,2,0]``.

    The namespace plus index tuple gives structured identities (edge
    variables, axiom-selector variables, ...) and a total order used for
    canonical printing.
    """

    namespace: str
    index: tuple[IndexPart, ...] = ()
    _key: tuple = dataclasses_field(init=False, repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "_key",
            (
                self.namespace,
                tuple((1, p) if isinstance(p, str) else (0, p) for p in self.index),
            ),
        )

    def sort_key(self) -> tuple:
        return self._key

    def __lt__(self, other: "Variable") -> bool:
        return self._key < other._key

    def __str__(self) -> str:
        if not self.index:
            return f"{self.namespace}[]"
        return f"{self.namespace}[{','.join(str(p) for p in self.index)}]"

    __repr__ = __str__


class Monomial:
    """A product of variable powers, stored as sorted (variable, exponent) pairs."""

    __slots__ = ("pairs", "_hash")

    def __init__(self, pairs: Iterable[tuple[Variable, int]] = ()):
        cleaned = tuple(
            sorted(((v, e) for v, e in pairs if e != 0), key=lambda p: p[0]._key)
        )
        if any(e < 0 for _, e in cleaned):
            raise ValueError("negative exponent")
        object.__setattr__(self, "pairs", cleaned)
        object.__setattr__(self, "_hash", hash(cleaned))

    @staticmethod
    def _from_sorted(pairs: tuple[tuple[Variable, int], ...]) -> "Monomial":
        m = object.__new__(Monomial)
        object.__setattr__(m, "pairs", pairs)
        object.__setattr__(m, "_hash", hash(pairs))
        return m

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("Monomial is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.pairs == other.pairs

    @staticmethod
    def one() -> "Monomial":
        return _MONOMIAL_ONE

    @staticmethod
    def of(*vars_and_exps: Variable | tuple[Variable, int]) -> "Monomial":
        pairs: dict[Variable, int] = {}
        for item in vars_and_exps:
            v, e = item if isinstance(item, tuple) else (item, 1)
            pairs[v] = pairs.get(v, 0) + e
        return Monomial(pairs.items())

    def degree(self) -> int:
        return sum(e for _, e in self.pairs)

    def degree_in(self, var_set: frozenset[Variable] | set[Variable]) -> int:
        return sum(e for v, e in self.pairs if v in var_set)

    def variables(self) -> Iterator[Variable]:
        return (v for v, _ in self.pairs)

    def exponent(self, var: Variable) -> int:
        for v, e in self.pairs:
            if v == var:
                return e
        return 0

    def mul(self, other: "Monomial") -> "Monomial":
        a, b = self.pairs, other.pairs
        if not a:
            return other
        if not b:
            return self
        out: list[tuple[Variable, int]] = []
        i = j = 0
        na, nb = len(a), len(b)
        while i < na and j < nb:
            va, ea = a[i]
            vb, eb = b[j]
            if va is vb or va == vb:
                out.append((va, ea + eb))
                i += 1
                j += 1
            elif va._key < vb._key:
                out.append(a[i])
                i += 1
            else:
                out.append(b[j])
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return Monomial._from_sorted(tuple(out))

    def divides(self, other: "Monomial") -> bool:
        exps = dict(other.pairs)
        return all(exps.get(v, 0) >= e for v, e in self.pairs)

    def divide(self, other: "Monomial") -> "Monomial":
        """Return self / other; other must divide self."""
        merged: dict[Variable, int] = dict(self.pairs)
        for v, e in other.pairs:
            merged[v] = merged.get(v, 0) - e
            if merged[v] < 0:
                raise ValueError(f"{other} does not divide {self}")
        return Monomial(merged.items())

    def rename(self, mapping) -> "Monomial":
        """Apply a variable-to-variable mapping (callable or dict)."""
        get = mapping.get if isinstance(mapping, dict) else None
        out: dict[Variable, int] = {}
        for v, e in self.pairs:
            w = get(v, v) if get else mapping(v)
            out[w] = out.get(w, 0) + e
        return Monomial(out.items())

    def __str__(self) -> str:
        if not self.pairs:
            return "1"
        return " * ".join(
            str(v) if e == 1 else f"{v}^{e}" for v, e in self.pairs
        )

    __repr__ = __str__


_MONOMIAL_ONE = Monomial()


def _grlex_cmp(a: Monomial, b: Monomial) -> int:
    """Graded lexicographic comparison; larger monomial compares greater."""
    da, db = a.degree(), b.degree()
    if da != db:
        return -1 if da < db else 1
    ia, ib = iter(a.pairs), iter(b.pairs)
    pa, pb = next(ia, None), next(ib, None)
    while pa is not None and pb is not None:
        ka, kb = pa[0]._key, pb[0]._key
        if ka != kb:
            # the monomial owning the earlier variable is lex-larger
            return 1 if ka < kb else -1
        if pa[1] != pb[1]:
            return 1 if pa[1] > pb[1] else -1
        pa, pb = next(ia, None), next(ib, None)
    if pa is pb:
        return 0
    return 1 if pa is not None else -1


grlex_key = functools.cmp_to_key(_grlex_cmp)


class Polynomial:
    """Canonical sparse polynomial: mapping {Monomial: nonzero coeff} plus a field tag."""

    __slots__ = ("field", "terms")

    def __init__(self, field: FieldTag, terms: Mapping[Monomial, Coeff] | None = None):
        data: dict[Monomial, Coeff] = {}
        if terms:
            for m, c in terms.items():
                c = field.coerce(c)
                if c != field.zero:
                    data[m] = c
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "terms", data)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    # --- constructors -----------------------------------------------------

    @staticmethod
    def _raw(field: FieldTag, terms: dict) -> "Polynomial":
        p = object.__new__(Polynomial)
        object.__setattr__(p, "field", field)
        object.__setattr__(p, "terms", terms)
        return p

    @staticmethod
    def zero(field: FieldTag) -> "Polynomial":
        return Polynomial(field)

    @staticmethod
    def const(field: FieldTag, value: Coeff) -> "Polynomial":
        return Polynomial(field, {Monomial.one(): value})

    @staticmethod
    def var(field: FieldTag, v: Variable, exp: int = 1) -> "Polynomial":
        return Polynomial(field, {Monomial.of((v, exp)): field.one})

    @staticmethod
    def from_terms(field: FieldTag, items: Iterable[tuple[Monomial, Coeff]]) -> "Polynomial":
        acc: dict[Monomial, Coeff] = {}
        for m, c in items:
            acc[m] = field.add(acc.get(m, field.zero), field.coerce(c))
        return Polynomial(field, acc)

    # --- basics -----------------------------------------------------------

    def _check_field(self, other: "Polynomial") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self) -> tuple:
        """Hashable canonical identity (used for axiom lookup tables)."""
        return (self.field, tuple(sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))))

    def degree(self) -> int | None:
        """Total degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(m.degree() for m in self.terms)

    def degree_in(self, var_set) -> int | None:
        if not self.terms:
            return None
        vs = frozenset(var_set)
        return max(m.degree_in(vs) for m in self.terms)

    def variables(self) -> set[Variable]:
        out: set[Variable] = set()
        for m in self.terms:
            out.update(m.variables())
        return out

    def constant_term(self) -> Coeff:
        return self.terms.get(Monomial.one(), self.field.zero)

    def coefficient(self, m: Monomial) -> Coeff:
        return self.terms.get(m, self.field.zero)

    def num_terms(self) -> int:
        return len(self.terms)

    # --- ring operations ----------------------------------------------------

    def add(self, other: "Polynomial") -> "Polynomial":
        self._check_field(other)
        f = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = f.add(out.get(m, f.zero), c)
            if s == f.zero:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial._raw(f, out)

    def sub(self, other: "Polynomial") -> "Polynomial":
        self._check_field(other)
        f = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = f.sub(out.get(m, f.zero), c)
            if s == f.zero:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial._raw(f, out)

    def neg(self) -> "Polynomial":
        f = self.field
        return Polynomial._raw(f, {m: f.neg(c) for m, c in self.terms.items()})

    def scale(self, scalar: Coeff) -> "Polynomial":
        f = self.field
        s = f.coerce(scalar)
        if s == f.zero:
            return Polynomial(f)
        return Polynomial._raw(f, {m: f.mul(c, s) for m, c in self.terms.items()})

    def mul(self, other: "Polynomial") -> "Polynomial":
        self._check_field(other)
        f = self.field
        if not self.terms or not other.terms:
            return Polynomial(f)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[Monomial, Coeff] = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma.mul(mb)
                s = f.add(out.get(m, f.zero), f.mul(ca, cb))
                if s == f.zero:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial._raw(f, out)

    def mul_monomial(self, m: Monomial, coeff: Coeff | None = None) -> "Polynomial":
        f = self.field
        c0 = f.one if coeff is None else f.coerce(coeff)
        if c0 == f.zero:
            return Polynomial(f)
        return Polynomial._raw(f, {t.mul(m): f.mul(c, c0) for t, c in self.terms.items()})

    def pow(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.const(self.field, self.field.one)
        base = self
        while n:
            if n & 1:
                out = out.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return out

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg

    # --- substitution and group action --------------------------------------

    def substitute(self, sigma: Mapping[Variable, "Polynomial"]) -> "Polynomial":
        """Homomorphic image; variables absent from sigma stay untouched."""
        f = self.field
        for p in sigma.values():
            if p.field != f:
                raise FieldMismatchError(f"{f} vs {p.field}")
        out = Polynomial(f)
        for m, c in self.terms.items():
            term = Polynomial.const(f, c)
            for v, e in m.pairs:
                repl = sigma.get(v)
                if repl is None:
                    term = term.mul_monomial(Monomial.of((v, e)))
                else:
                    term = term.mul(repl.pow(e))
            out = out.add(term)
        return out

    def rename(self, mapping) -> "Polynomial":
        """Monomial-wise relabeling under a variable bijection; coefficients unchanged."""
        f = self.field
        out: dict[Monomial, Coeff] = {}
        for m, c in self.terms.items():
            m2 = m.rename(mapping)
            if m2 in out:
                raise ValueError("variable mapping is not injective on this polynomial")
            out[m2] = c
        return Polynomial(f, out)

    def evaluate(self, assignment: Mapping[Variable, Coeff]) -> Coeff:
        f = self.field
        total = f.zero
        for m, c in self.terms.items():
            val = c
            for v, e in m.pairs:
                if v not in assignment:
                    raise KeyError(f"no value for {v}")
                base = f.coerce(assignment[v])
                for _ in range(e):
                    val = f.mul(val, base)
            total = f.add(total, val)
        return total

    # --- printing -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            cs = self.field.format_coeff(c)
            parts.append(cs if m.degree() == 0 else f"{cs} * {m}")
        return " + ".join(parts)

    __repr__ = __str__


def poly_arith(op: str, p: Polynomial, q: Polynomial | Coeff) -> Polynomial:
    """Dispatch form of the ring operations: op in {add, sub, mul, scale}."""
    if op == "scale":
        if isinstance(q, Polynomial):
            raise TypeError("scale expects a scalar")
        return p.scale(q)
    if not isinstance(q, Polynomial):
        q = Polynomial.const(p.field, q)
    if op == "add":
        return p.add(q)
    if op == "sub":
        return p.sub(q)
    if op == "mul":
        return p.mul(q)
    raise ValueError(f"unknown op {op!r}")


def elementary_symmetric(
    n: int, k: int, variables: Sequence[Variable], field: FieldTag = QQ
) -> Polynomial:
    """The k-th elementary symmetric polynomial in the given n variables."""
    if len(variables) != n:
        raise ValueError("need exactly n variables")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range 0..{n}")
    one = field.one
    return Polynomial(
        field,
        {Monomial.of(*combo): one for combo in itertools.combinations(variables, k)},
    )
