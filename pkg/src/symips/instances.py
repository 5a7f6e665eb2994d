"""Generators for the polynomial-equation instance families and their symmetry groups.

Every instance carries its Boolean axioms explicitly, each axiom owning its
own selector variable, so certificates see one uniform axiom interface.
Axiom ordering is fixed per family (documented at each generator) to keep
selector indices stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import GF2, Coeff, FieldTag, Monomial, Polynomial, Variable
from .errors import InvarianceError, MalformedInputError
from .symmetry import (
    TRIVIAL_GROUP,
    GroupPresentation,
    VariablePermutation,
    check_invariance,
    cycle_space_generators,
    index_permutation,
    induce_y_action,
)


@dataclass(frozen=True)
class GraphInput:
    """An undirected graph; edges are vertex pairs, parallel edges get a copy index."""

    vertices: tuple
    edges: tuple[tuple, ...]
    vertex_colours: dict = dc_field(default_factory=dict)
    edge_colours: dict = dc_field(default_factory=dict)

    @staticmethod
    def make(vertices: Iterable, edges: Iterable[tuple], **colours) -> "GraphInput":
        vs = tuple(vertices)
        seen: dict[tuple, int] = {}
        keys = []
        for a, b in edges:
            if a == b:
                raise MalformedInputError("loops are not supported")
            base = tuple(sorted((a, b)))
            k = seen.get(base, 0)
            seen[base] = k + 1
            keys.append(base if k == 0 else base + (k,))
        return GraphInput(vs, tuple(keys), **colours)

    def edge_keys_at(self, v) -> list[tuple]:
        return sorted(e for e in self.edges if v in (e[0], e[1]))

    def is_regular(self, d: int) -> bool:
        return all(len(self.edge_keys_at(v)) == d for v in self.vertices)

    def has_edge(self, a, b) -> bool:
        base = tuple(sorted((a, b)))
        return any(e[:2] == base for e in self.edges)


def k4() -> GraphInput:
    return GraphInput.make(range(4), list(itertools.combinations(range(4), 2)))


def prism() -> GraphInput:
    """The 3-regular triangular prism: two triangles joined by a perfect matching."""
    tri1 = [(0, 1), (1, 2), (0, 2)]
    tri2 = [(3, 4), (4, 5), (3, 5)]
    rungs = [(0, 3), (1, 4), (2, 5)]
    return GraphInput.make(range(6), tri1 + tri2 + rungs)


@dataclass(frozen=True)
class Instance:
    """A variable universe, ordered axioms with selector variables, and a group."""

    name: str
    field: FieldTag
    xvars: tuple[Variable, ...]
    axioms: tuple[Polynomial, ...]
    yvars: tuple[Variable, ...]
    group: GroupPresentation
    induced_group: GroupPresentation
    meta: dict = dc_field(default_factory=dict)

    def size(self) -> int:
        """Instance size: number of axioms plus number of variables."""
        return len(self.axioms) + len(self.xvars)

    def yvar_index(self) -> dict[Variable, int]:
        return {y: i for i, y in enumerate(self.yvars)}

    def axiom_for_boolean(self, v: Variable) -> int:
        """Index of the Boolean axiom v^2 - v, if the instance carries it."""
        target = boolean_axiom(self.field, v).key()
        for i, a in enumerate(self.axioms):
            if a.key() == target:
                return i
        raise KeyError(f"no Boolean axiom for {v}")

    def substitution(self) -> dict[Variable, Polynomial]:
        """Leaf substitution sending each selector variable to its axiom."""
        return dict(zip(self.yvars, self.axioms))

    def zero_substitution(self) -> dict[Variable, Polynomial]:
        zero = Polynomial.zero(self.field)
        return {y: zero for y in self.yvars}


def boolean_axiom(field: FieldTag, v: Variable) -> Polynomial:
    return Polynomial(field, {Monomial.of((v, 2)): field.one, Monomial.of(v): field.neg(field.one)})


def make_instance(
    name: str,
    field: FieldTag,
    xvars: Sequence[Variable],
    axioms: Sequence[tuple[Polynomial, Variable]],
    group: GroupPresentation = TRIVIAL_GROUP,
    meta: dict | None = None,
) -> Instance:
    """Validate and assemble an instance: invariance plus the induced action."""
    polys = tuple(p for p, _ in axioms)
    yvars = tuple(y for _, y in axioms)
    if len(set(yvars)) != len(yvars):
        raise InvarianceError("selector variables must be distinct")
    if not check_invariance(group, polys):
        raise InvarianceError(f"{name}: axiom set is not invariant under the group")
    induced = induce_y_action(group, polys, yvars)
    return Instance(
        name=name,
        field=field,
        xvars=tuple(xvars),
        axioms=polys,
        yvars=yvars,
        group=group,
        induced_group=induced,
        meta=dict(meta or {}),
    )


def brute_force_boolean_satisfiable(inst: Instance) -> bool:
    """Exhaustive 0/1 search; decisive for instances carrying all Boolean axioms.

    Backtracks variable by variable and prunes as soon as a fully assigned
    axiom is nonzero, which keeps the search exact but fast on structured
    systems.
    """
    f = inst.field
    order = list(inst.xvars)
    position = {v: i for i, v in enumerate(order)}
    ready_at: list[list[Polynomial]] = [[] for _ in order]
    for a in inst.axioms:
        vs = a.variables()
        if not vs:
            if a.constant_term() != f.zero:
                return False
            continue
        ready_at[max(position[v] for v in vs)].append(a)
    point: dict[Variable, Coeff] = {}

    def assign(i: int) -> bool:
        if i == len(order):
            return True
        for val in (f.zero, f.one):
            point[order[i]] = val
            if all(a.evaluate(point) == f.zero for a in ready_at[i]) and assign(i + 1):
                return True
        del point[order[i]]
        return False

    return assign(0)


# --- CFI parity systems ---------------------------------------------------------


def cfi_x(e: tuple, i: int) -> Variable:
    return Variable("x", tuple(e) + (i,))


def cfi_yv(v, i, j, k) -> Variable:
    return Variable("yv", (v, i, j, k))


def cfi_ye(e: tuple) -> Variable:
    return Variable("ye", tuple(e))


def cfi_yb(e: tuple, i: int) -> Variable:
    return Variable("yb", tuple(e) + (i,))


def gen_cfi(g: GraphInput, u=None, a: int = 1) -> Instance:
    """Parity system of a 3-regular connected graph with one twisted vertex.

    Over GF(2): eight vertex equations per vertex (one per local index triple,
    the right side shifted by `a` at the special vertex), one edge equation
    per edge, and Boolean axioms for all 2|E| variables.  Axiom order:
    vertex-major (vertices in input order, triples in lexicographic order),
    then edges, then Boolean axioms.  The symmetry group is the cycle space
    of the graph acting by edge flips.
    """
    if a not in (0, 1):
        raise MalformedInputError("twist must be 0 or 1")
    if not g.is_regular(3):
        raise MalformedInputError("graph is not 3-regular")
    if u is None:
        u = sorted(g.vertices)[0]
    if u not in g.vertices:
        raise MalformedInputError(f"unknown special vertex {u}")
    f = GF2
    xvars = [cfi_x(e, i) for e in g.edges for i in (0, 1)]
    axioms: list[tuple[Polynomial, Variable]] = []
    for v in g.vertices:
        e1, e2, e3 = g.edge_keys_at(v)
        for i, j, k in itertools.product((0, 1), repeat=3):
            rhs = (i + j + k + (a if v == u else 0)) % 2
            p = Polynomial.from_terms(
                f,
                [
                    (Monomial.of(cfi_x(e1, i)), 1),
                    (Monomial.of(cfi_x(e2, j)), 1),
                    (Monomial.of(cfi_x(e3, k)), 1),
                    (Monomial.one(), rhs),
                ],
            )
            axioms.append((p, cfi_yv(v, i, j, k)))
    for e in g.edges:
        p = Polynomial.from_terms(
            f,
            [
                (Monomial.of(cfi_x(e, 0)), 1),
                (Monomial.of(cfi_x(e, 1)), 1),
                (Monomial.one(), 1),
            ],
        )
        axioms.append((p, cfi_ye(e)))
    for e in g.edges:
        for i in (0, 1):
            axioms.append((boolean_axiom(f, cfi_x(e, i)), cfi_yb(e, i)))
    group = cycle_space_generators(g.vertices, g.edges, var_of=cfi_x)
    return make_instance(
        name=f"cfi-{len(g.vertices)}v{len(g.edges)}e-u{u}-a{a}",
        field=f,
        xvars=xvars,
        axioms=axioms,
        group=group,
        meta={
            "family": "cfi",
            "vertices": list(g.vertices),
            "edges": [list(e) for e in g.edges],
            "u": u,
            "a": a,
        },
    )


# --- subset sum -------------------------------------------------------------------


def gen_subset_sum(
    n: int, field: FieldTag, beta: Coeff, lifted: bool = False
) -> Instance:
    """Sum axiom plus Boolean axioms; the full symmetric group permutes indices.

    The plain variant has the axiom sum(x_i) - beta; the lifted variant uses
    sum(x_i y_i) - beta and Boolean axioms for both variable blocks, with the
    group acting on x and y indices simultaneously.  Axiom order: sum axiom,
    x-Boolean axioms, then y-Boolean axioms.
    """
    if n < 1:
        raise MalformedInputError("need n >= 1")
    if field.kind == "Fp" and field.characteristic <= n:
        raise MalformedInputError("field characteristic must exceed n")
    b = field.coerce(beta)
    if any(b == field.coerce(t) for t in range(n + 1)):
        raise MalformedInputError(
            f"beta={beta} makes the instance satisfiable (0..{n} are attainable sums)"
        )
    xs = [Variable("x", (i,)) for i in range(1, n + 1)]
    ys = [Variable("y", (i,)) for i in range(1, n + 1)] if lifted else []
    if lifted:
        sum_terms = [(Monomial.of(x, y), field.one) for x, y in zip(xs, ys)]
    else:
        sum_terms = [(Monomial.of(x), field.one) for x in xs]
    sum_axiom = Polynomial.from_terms(
        field, sum_terms + [(Monomial.one(), field.neg(b))]
    )
    axioms: list[tuple[Polynomial, Variable]] = [(sum_axiom, Variable("ysum", ()))]
    for x in xs:
        axioms.append((boolean_axiom(field, x), Variable("Bx", x.index)))
    for y in ys:
        axioms.append((boolean_axiom(field, y), Variable("By", y.index)))
    all_vars = xs + ys
    gens = []
    if n >= 2:
        gens.append(index_permutation(all_vars, "x", 0, [(1, 2)]).compose(
            index_permutation(all_vars, "y", 0, [(1, 2)])
        ) if lifted else index_permutation(all_vars, "x", 0, [(1, 2)]))
    if n >= 3:
        cycle = [tuple(range(1, n + 1))]
        gens.append(
            index_permutation(all_vars, "x", 0, cycle).compose(
                index_permutation(all_vars, "y", 0, cycle)
            ) if lifted else index_permutation(all_vars, "x", 0, cycle)
        )
    return make_instance(
        name=f"subsetsum-n{n}-beta{beta}" + ("-lifted" if lifted else ""),
        field=field,
        xvars=all_vars,
        axioms=axioms,
        group=GroupPresentation(tuple(gens)),
        meta={
            "family": "subsetsum",
            "n": n,
            "beta": str(beta),
            "lifted": lifted,
        },
    )


# --- pigeonhole -------------------------------------------------------------------


def php_x(i: int, j: int) -> Variable:
    return Variable("x", (i, j))


def gen_php(n: int) -> Instance:
    """Pigeonhole system for n+1 pigeons and n holes over the rationals.

    Axiom order: row sums for pigeons 1..n+1, collision products in
    lexicographic (i, i', j) order, then Boolean axioms row-major.  The group
    is the product of the symmetric groups on pigeons and holes.
    """
    if n < 1:
        raise MalformedInputError("need n >= 1")
    f = FieldTag("Q")
    m = n + 1
    pigeons = range(1, m + 1)
    holes = range(1, n + 1)
    xs = [php_x(i, j) for i in pigeons for j in holes]
    axioms: list[tuple[Polynomial, Variable]] = []
    for i in pigeons:
        p = Polynomial.from_terms(
            f,
            [(Monomial.of(php_x(i, j)), 1) for j in holes]
            + [(Monomial.one(), -1)],
        )
        axioms.append((p, Variable("yrow", (i,))))
    for i, i2 in itertools.combinations(pigeons, 2):
        for j in holes:
            p = Polynomial(f, {Monomial.of(php_x(i, j), php_x(i2, j)): Fraction(1)})
            axioms.append((p, Variable("ycol", (i, i2, j))))
    for i in pigeons:
        for j in holes:
            axioms.append((boolean_axiom(f, php_x(i, j)), Variable("Bx", (i, j))))
    gens = []
    if m >= 2:
        gens.append(index_permutation(xs, "x", 0, [(1, 2)]))
    if m >= 3:
        gens.append(index_permutation(xs, "x", 0, [tuple(pigeons)]))
    if n >= 2:
        gens.append(index_permutation(xs, "x", 1, [(1, 2)]))
    if n >= 3:
        gens.append(index_permutation(xs, "x", 1, [tuple(holes)]))
    return make_instance(
        name=f"php-{m}to{n}",
        field=f,
        xvars=xs,
        axioms=axioms,
        group=GroupPresentation(tuple(gens)),
        meta={"family": "php", "n": n},
    )


# --- graph isomorphism encoding -----------------------------------------------------


def gen_piso(
    g: GraphInput,
    h: GraphInput,
    group_generators: Sequence[VariablePermutation] = (),
) -> Instance:
    """Equations whose Boolean solutions encode isomorphisms between two graphs.

    Variables x[v,w] range over colour-compatible vertex pairs.  Axioms: one
    sum per vertex of the second graph, one sum per vertex of the first,
    products forbidding local non-isomorphisms, then Boolean axioms.
    Automorphism generators are caller-supplied (default: trivial group).
    """
    f = FieldTag("Q")

    def compatible(v, w) -> bool:
        return g.vertex_colours.get(v) == h.vertex_colours.get(w)

    pairs = [(v, w) for v in g.vertices for w in h.vertices if compatible(v, w)]
    xv = {(v, w): Variable("x", (v, w)) for v, w in pairs}
    axioms: list[tuple[Polynomial, Variable]] = []
    covered: set = set()

    def push(p: Polynomial, y: Variable) -> None:
        # row and column sums can coincide on sparse colour classes; the
        # first occurrence keeps the selector
        if p.key() in covered:
            return
        covered.add(p.key())
        axioms.append((p, y))

    for w in h.vertices:
        p = Polynomial.from_terms(
            f,
            [(Monomial.of(xv[(v, w)]), 1) for v in g.vertices if (v, w) in xv]
            + [(Monomial.one(), -1)],
        )
        push(p, Variable("ycol", (w,)))
    for v in g.vertices:
        p = Polynomial.from_terms(
            f,
            [(Monomial.of(xv[(v, w)]), 1) for w in h.vertices if (v, w) in xv]
            + [(Monomial.one(), -1)],
        )
        push(p, Variable("yrow", (v,)))

    def local_iso(v, v2, w, w2) -> bool:
        if (v == v2) != (w == w2):
            return False
        if v == v2:
            return True
        if g.has_edge(v, v2) != h.has_edge(w, w2):
            return False
        if g.has_edge(v, v2) and g.edge_colours.get(tuple(sorted((v, v2)))) != h.edge_colours.get(
            tuple(sorted((w, w2)))
        ):
            return False
        return True

    seen = set()
    for (v, w), (v2, w2) in itertools.combinations(pairs, 2):
        if local_iso(v, v2, w, w2):
            continue
        key = tuple(sorted((xv[(v, w)], xv[(v2, w2)]), key=lambda t: t.sort_key()))
        if key in seen:
            continue
        seen.add(key)
        p = Polynomial(f, {Monomial.of(*key): Fraction(1)})
        push(p, Variable("yforbid", key[0].index + key[1].index))
    for v, w in pairs:
        push(boolean_axiom(f, xv[(v, w)]), Variable("Bx", (v, w)))
    return make_instance(
        name=f"piso-{len(g.vertices)}x{len(h.vertices)}",
        field=f,
        xvars=[xv[p] for p in pairs],
        axioms=axioms,
        group=GroupPresentation(tuple(group_generators)),
        meta={"family": "piso"},
    )


# --- the characteristic-2 counterexample ----------------------------------------------


def gen_counterexample_f2() -> Instance:
    """Six GF(2) equations on four variables whose orbit structure blocks any
    symmetric certificate that is linear in the selector variables.

    Variables x1, x1*, x2, x2* (the star is index component 1).  The group is
    generated by the index swap 1<->2 and the star swap.
    """
    f = GF2
    x1 = Variable("x", (1, 0))
    x1s = Variable("x", (1, 1))
    x2 = Variable("x", (2, 0))
    x2s = Variable("x", (2, 1))
    xs = [x1, x1s, x2, x2s]

    def eq(u, v):
        return Polynomial.from_terms(
            f, [(Monomial.of(u), 1), (Monomial.of(v), 1), (Monomial.one(), 1)]
        )

    pairs = [(x1, x2), (x1s, x2s), (x1s, x2), (x1, x2s), (x1, x1s), (x2, x2s)]
    axioms: list[tuple[Polynomial, Variable]] = [
        (eq(u, v), Variable("yeq", (i + 1,))) for i, (u, v) in enumerate(pairs)
    ]
    for v in xs:
        axioms.append((boolean_axiom(f, v), Variable("Bx", v.index)))
    swap_idx = index_permutation(xs, "x", 0, [(1, 2)])
    swap_star = index_permutation(xs, "x", 1, [(0, 1)])
    return make_instance(
        name="example-f2",
        field=f,
        xvars=xs,
        axioms=axioms,
        group=GroupPresentation((swap_idx, swap_star)),
        meta={"family": "example42"},
    )
