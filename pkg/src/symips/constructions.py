"""Builders for explicit certificates: the two symmetrization transforms and
the per-family refutation constructions.

Every builder checks its own output before returning: the substituted
polynomial must be exactly 1 and the zero-substituted polynomial exactly 0,
so construction bugs surface at build time rather than at audit time.
Symmetry witnesses are computed by structural relabeling of the hash-consed
gate store and stored on the returned circuit, one per group generator.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Coeff, Monomial, Polynomial, Variable, grlex_key
from .circuit import Budget, Circuit, CircuitBuilder, Gate, IN, CONST, eval_symbolic
from .errors import MalformedInputError, SymipsError
from .instances import Instance, cfi_x, cfi_yb, cfi_ye, cfi_yv, php_x
from .symmetry import GROUP_CAP, group_elements, orbit


@dataclass(frozen=True)
class Claims:
    """Re-checkable assertions a builder makes about its certificate."""

    y_linear: bool | None = None
    exact_degree: int | None = None
    group: str | None = None  # "instance" when symmetric under the instance group
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Certificate:
    """A circuit over the instance variables claimed to satisfy both
    certificate conditions: zero at zero selectors, one at the axioms."""

    circuit: Circuit
    instance_name: str
    claims: Claims = Claims()


class ConstructionError(SymipsError):
    """An internal expansion check failed while assembling a certificate."""


def _self_check(b: CircuitBuilder, out: int, inst: Instance, what: str) -> None:
    one = Polynomial.const(inst.field, inst.field.one)
    if b.eval(out, leaf_subst=inst.zero_substitution()) != Polynomial.zero(inst.field):
        raise ConstructionError(f"{what}: nonzero at zero selectors")
    if b.eval(out, leaf_subst=inst.substitution()) != one:
        raise ConstructionError(f"{what}: substituted value is not 1")


def _witness_renames(inst: Instance) -> dict[int, object]:
    return {i: g for i, g in enumerate(inst.induced_group.generators)}


def finish_certificate(
    b: CircuitBuilder,
    out: int,
    inst: Instance,
    *,
    y_linear: bool | None,
    notes: tuple[str, ...] = (),
) -> Certificate:
    _self_check(b, out, inst, "certificate")
    circuit = b.build([out], _witness_renames(inst))
    try:
        exact_deg = b.eval(out, budget=Budget(2_000_000)).degree()
    except SymipsError:
        exact_deg = None
    return Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(
            y_linear=y_linear,
            exact_degree=exact_deg,
            group="instance" if inst.group.generators else "trivial",
            notes=notes,
        ),
    )


# --- product symmetrization -----------------------------------------------------


def symmetrize_product(
    inst: Instance, cert: Certificate, cap: int = GROUP_CAP
) -> Certificate:
    """One copy of the certificate per group element, joined by a single
    multiplication gate; copies share input gates and nothing else.

    Every group generator acts by permuting the copies, which is stored as an
    explicit witness.  Works over any field because products of ones stay one.
    """
    elements = sorted(group_elements(inst.induced_group, cap=cap), key=str)
    elem_index = {p: i for i, p in enumerate(elements)}
    src = cert.circuit
    if len(src.outputs) != 1:
        raise MalformedInputError("certificate circuits have a single output")

    in_vars: set[Variable] = set()
    for p in elements:
        for v in src.input_variables():
            in_vars.add(p(v))
    const_vals = sorted(
        {g.payload for g in src.gates if g.label == CONST}, key=str
    )
    gates: list[Gate] = []
    input_id: dict[Variable, int] = {}
    for v in sorted(in_vars, key=lambda t: t.sort_key()):
        input_id[v] = len(gates)
        gates.append(Gate(IN, v, ()))
    const_id: dict = {}
    for c in const_vals:
        const_id[c] = len(gates)
        gates.append(Gate(CONST, c, ()))

    internal = [i for i, g in enumerate(src.gates) if not g.is_input()]
    copy_id: dict[tuple[int, int], int] = {}
    for pi, p in enumerate(elements):
        local: dict[int, int] = {}
        for i, g in enumerate(src.gates):
            if g.label == IN:
                local[i] = input_id[p(g.payload)]
            elif g.label == CONST:
                local[i] = const_id[g.payload]
            else:
                ch = tuple(sorted(local[c] for c in g.children))
                gid = len(gates)
                gates.append(Gate(g.label, None, ch))
                local[i] = gid
                copy_id[(pi, i)] = gid
        copy_id[(pi, -1)] = local[src.outputs[0]]
    top = len(gates)
    gates.append(
        Gate("mul", None, tuple(sorted(copy_id[(pi, -1)] for pi in range(len(elements)))))
    )

    witnesses: dict[int, tuple[int, ...]] = {}
    for gi, gen in enumerate(inst.induced_group.generators):
        w = list(range(len(gates)))
        for v, i in input_id.items():
            w[i] = input_id[gen(v)]
        for (pi, i), gid in copy_id.items():
            if i == -1:
                continue
            target = elem_index[gen.compose(elements[pi])]
            w[gid] = copy_id[(target, i)]
        w[top] = top
        witnesses[gi] = tuple(w)

    circuit = Circuit(
        field=src.field, gates=tuple(gates), outputs=(top,), witnesses=witnesses
    )
    out_cert = Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(
            y_linear=False if len(elements) > 1 else cert.claims.y_linear,
            exact_degree=None,
            group="instance" if inst.group.generators else "trivial",
            notes=("product-symmetrized",),
        ),
    )
    return out_cert


# --- averaging symmetrization ----------------------------------------------------


def symmetrize_average(
    inst: Instance, cert: Certificate, budget: Budget | None = None, cap: int = GROUP_CAP
) -> Certificate:
    """Orbit-averaged certificate, emitted as a depth-2 sum of monomials.

    Each monomial with coefficient c contributes c/|orbit| on every monomial
    of its orbit; orbit sizes divide the group order, so invertibility of the
    group order in the field is exactly what gets used.  The result is fixed
    by every generator as a polynomial and keeps linearity in the selector
    variables.
    """
    f = inst.field
    p = eval_symbolic(cert.circuit, budget=budget or Budget())
    group = inst.induced_group
    if f.kind == "Fp":
        try:
            n_elems = len(group_elements(group, cap=cap))
            if n_elems % f.characteristic == 0:
                raise MalformedInputError(
                    f"group order {n_elems} is divisible by the characteristic"
                )
        except MalformedInputError:
            raise
        except SymipsError:
            pass  # enumeration capped; orbit sizes are checked below instead
    averaged: dict[Monomial, Coeff] = {}
    done: set[Monomial] = set()
    for m, c in sorted(p.terms.items(), key=lambda t: grlex_key(t[0])):
        if m in done:
            continue
        orb = sorted(orbit(group, m, cap=cap), key=grlex_key)
        done.update(orb)
        if f.kind == "Fp" and len(orb) % f.characteristic == 0:
            raise MalformedInputError(
                f"orbit size {len(orb)} not invertible in characteristic {f.characteristic}"
            )
        total = f.zero
        for m2 in orb:
            total = f.add(total, p.coefficient(m2))
        share = f.div(total, f.coerce(len(orb)))
        if share != f.zero:
            for m2 in orb:
                averaged[m2] = share
    avg_poly = Polynomial(f, averaged)

    b = CircuitBuilder(f)
    out = b.poly_sum(avg_poly)
    _self_check(b, out, inst, "averaged certificate")
    circuit = b.build([out], _witness_renames(inst))
    ys = frozenset(inst.yvars)
    return Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(
            y_linear=all(m.degree_in(ys) == 1 for m in avg_poly.terms),
            exact_degree=avg_poly.degree(),
            group="instance" if inst.group.generators else "trivial",
            notes=("orbit-averaged",),
        ),
    )


# --- CFI helpers ------------------------------------------------------------------


class _CfiData:
    """Vertex/edge bookkeeping shared by the two CFI builders."""

    def __init__(self, inst: Instance):
        meta = inst.meta
        if meta.get("family") != "cfi":
            raise MalformedInputError("not a CFI instance")
        self.inst = inst
        self.vertices = [tuple(v) if isinstance(v, list) else v for v in meta["vertices"]]
        self.edges = [tuple(e) for e in meta["edges"]]
        self.u = meta["u"]
        self.a = meta["a"]
        if self.a != 1:
            raise MalformedInputError("refutations exist only for the twisted system")

    def incident(self, v) -> list[tuple]:
        return sorted(e for e in self.edges if v in (e[0], e[1]))

    def triples(self, parity: int) -> list[tuple[int, int, int]]:
        return [
            t for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == parity
        ]

    def charge(self, v) -> int:
        return self.a if v == self.u else 0

    def solves(self, lam: dict, v) -> bool:
        """Does an edge assignment satisfy the single parity equation at v."""
        return sum(lam[e] for e in self.incident(v)) % 2 == self.charge(v)

    def local_target(self, v, flipped: bool) -> Polynomial:
        """Sum of the index-triple monomials the certificate must reproduce at v.

        Unflipped: triples whose parity disagrees with the local equation
        right side, plus the constant one.  Flipped: the complementary
        triples, without the constant.
        """
        e1, e2, e3 = self.incident(v)
        par = ((1 if v != self.u else 0) + (1 if flipped else 0)) % 2
        terms = {
            Monomial.of(cfi_x(e1, i), cfi_x(e2, j), cfi_x(e3, k)): 1
            for (i, j, k) in self.triples(par)
        }
        if not flipped:
            terms[Monomial.one()] = 1
        return Polynomial(self.inst.field, terms)


def _conflict_gate(b: CircuitBuilder, e: tuple) -> int:
    """Constant-size gate whose substituted value is x[e,0]*x[e,1]."""
    return b.add(
        b.mul(b.inp(cfi_ye(e)), b.inp(cfi_x(e, 0)), b.inp(cfi_x(e, 1))),
        b.mul(b.inp(cfi_yb(e, 0)), b.inp(cfi_x(e, 1))),
        b.mul(b.inp(cfi_yb(e, 1)), b.inp(cfi_x(e, 0))),
    )


def _edge_of(v: Variable) -> tuple:
    return v.index[:-1]


def _vertex_gate(b: CircuitBuilder, data: _CfiData, v, flipped: bool) -> int:
    """Gate computing the local target at v after substitution, zero at zero.

    Starts from the product of the four matching selector variables and adds
    mechanical corrections: conflict-gate multiples remove monomials carrying
    both indices of an edge, Boolean-axiom multiples multilinearise squares,
    and a combination of edge-axiom pairs and singles clears the remainder.
    Each step is asserted by exact expansion.
    """
    inst = data.inst
    f = inst.field
    e1, e2, e3 = data.incident(v)
    par = ((1 if v != data.u else 0) + (1 if flipped else 0)) % 2
    prod = b.mul_all(
        b.inp(cfi_yv(v, i, j, k)) for (i, j, k) in data.triples(par)
    )
    target = data.local_target(v, flipped)
    subst = inst.substitution()
    delta = b.eval(prod, leaf_subst=subst).add(target)  # char 2: add == sub
    pieces = [prod]

    # conflict monomials first: they absorb the doubly-squared cases
    for e in (e1, e2, e3):
        conf = Monomial.of(cfi_x(e, 0), cfi_x(e, 1))
        q = Polynomial(
            f, {m.divide(conf): c for m, c in delta.terms.items() if conf.divides(m)}
        )
        if q.is_zero():
            continue
        gate = b.mul(_conflict_gate(b, e), b.poly_sum(q))
        pieces.append(gate)
        delta = delta.add(q.mul_monomial(conf))

    # multilinearise, one full sweep per round so flip-related monomials are
    # corrected together
    while True:
        squared = [m for m in delta.terms if any(e >= 2 for _, e in m.pairs)]
        if not squared:
            break
        for m in squared:
            if m not in delta.terms:
                continue
            var, exp = min(
                ((vv, ee) for vv, ee in m.pairs if ee >= 2),
                key=lambda t: t[0].sort_key(),
            )
            rest = m.divide(Monomial.of((var, 2)))
            parts = [b.inp(cfi_yb(_edge_of(var), var.index[-1]))]
            if rest.degree() > 0:
                parts.append(b.monomial(rest))
            pieces.append(b.mul_all(parts))
            booly = Polynomial(
                f, {Monomial.of((var, 2)): 1, Monomial.of(var): 1}
            )
            delta = delta.add(booly.mul_monomial(rest))

    if not delta.is_zero():
        # remainder must be a combination of edge-axiom pairs and singles
        basis_gates = []
        basis_polys = []
        for a, bb in itertools.combinations((e1, e2, e3), 2):
            basis_gates.append(b.mul(b.inp(cfi_ye(a)), b.inp(cfi_ye(bb))))
            basis_polys.append(subst[cfi_ye(a)].mul(subst[cfi_ye(bb)]))
        for a in (e1, e2, e3):
            basis_gates.append(b.inp(cfi_ye(a)))
            basis_polys.append(subst[cfi_ye(a)])
        chosen = _solve_gf2_subset(basis_polys, delta)
        if chosen is None:
            raise ConstructionError(f"vertex {v}: remainder outside the edge-axiom span")
        for idx in chosen:
            pieces.append(basis_gates[idx])
            delta = delta.add(basis_polys[idx])
    if not delta.is_zero():
        raise ConstructionError(f"vertex {v}: corrections do not close")

    gate = b.add_all(pieces)
    if b.eval(gate, leaf_subst=subst) != target:
        raise ConstructionError(f"vertex {v}: expansion check failed")
    if b.eval(gate, leaf_subst=inst.zero_substitution()) != Polynomial.zero(f):
        raise ConstructionError(f"vertex {v}: nonzero at zero selectors")
    return gate


def _solve_gf2_subset(
    basis: list[Polynomial], target: Polynomial
) -> list[int] | None:
    """Indices of a basis subset summing to target over GF(2), or None."""
    monos = sorted(
        {m for p in basis for m in p.terms} | set(target.terms),
        key=lambda m: str(m),
    )
    pos = {m: i for i, m in enumerate(monos)}

    def vec(p: Polynomial) -> int:
        out = 0
        for m in p.terms:
            out |= 1 << pos[m]
        return out

    rows = [(vec(p), 1 << i) for i, p in enumerate(basis)]
    t = vec(target)
    sel = 0
    for col in range(len(monos)):
        piv = next((r for r in range(len(rows)) if (rows[r][0] >> col) & 1), None)
        if piv is None:
            continue
        pv, ptag = rows.pop(piv)
        if (t >> col) & 1:
            t ^= pv
            sel ^= ptag
        rows = [
            (v ^ pv, g ^ ptag) if (v >> col) & 1 else (v, g) for v, g in rows
        ]
    if t != 0:
        return None
    return [i for i in range(len(basis)) if (sel >> i) & 1]


def build_cfi_mu(inst: Instance) -> Certificate:
    """Polynomial-size symmetric refutation of the twisted parity system.

    Combines the per-vertex gates along the vertex order; level i accumulates
    the sum over all edge assignments of the first i vertex neighbourhoods
    that satisfy an even number of local parity equations (plus one), so the
    final level collapses to the constant one.
    """
    cert, _ = build_cfi_mu_with_levels(inst)
    return cert


def build_cfi_mu_with_levels(inst: Instance) -> tuple[Certificate, list[Polynomial]]:
    """build_cfi_mu plus the substituted accumulator polynomial of every level,
    which enumeration oracles compare against directly."""
    data = _CfiData(inst)
    b = CircuitBuilder(inst.field)
    subst = inst.substitution()
    verts = data.vertices
    even_g = _vertex_gate(b, data, verts[0], flipped=False)
    odd_g = _vertex_gate(b, data, verts[0], flipped=True)
    levels = [b.eval(even_g, leaf_subst=subst)]
    for v in verts[1:]:
        t = _vertex_gate(b, data, v, flipped=False)
        tt = _vertex_gate(b, data, v, flipped=True)
        new_even = b.add(b.mul(even_g, t), even_g, t, b.mul(odd_g, tt))
        new_odd = b.add(b.mul(even_g, tt), tt, b.mul(odd_g, t), odd_g)
        even_g, odd_g = new_even, new_odd
        levels.append(b.eval(even_g, leaf_subst=subst))
    cert = finish_certificate(
        b, even_g, inst, y_linear=False, notes=("cfi-mu",)
    )
    return cert, levels


def build_cfi_linear(inst: Instance, budget: Budget | None = None) -> Certificate:
    """Selector-linear symmetric refutation of size proportional to 2^|E|.

    A telescoping sum turns the edge axioms into one plus the sum over all
    full edge assignments; the remaining monomials are cancelled orbit block
    by orbit block, grouped by the least vertex whose parity equation the
    assignment satisfies.
    """
    data = _CfiData(inst)
    f = inst.field
    edges = data.edges
    m = len(edges)
    budget = budget or Budget()
    budget.charge(2 ** m)
    b = CircuitBuilder(f)

    terms = []
    for t in range(m):
        parts = [b.inp(cfi_ye(edges[t]))]
        if t > 0:
            parts.append(
                b.mul_all(
                    b.add(b.inp(cfi_x(edges[s], 0)), b.inp(cfi_x(edges[s], 1)))
                    for s in range(t)
                )
            )
        terms.append(b.mul_all(parts))
    telescope = b.add_all(terms)

    blocks: dict[int, list[dict]] = {}
    for bits in itertools.product((0, 1), repeat=m):
        lam = dict(zip(edges, bits))
        sat = [i for i, v in enumerate(data.vertices) if data.solves(lam, v)]
        if not sat:
            raise ConstructionError("an assignment satisfies no parity equation")
        blocks.setdefault(sat[0], []).append(lam)
    assert sum(len(v) for v in blocks.values()) == 2 ** m

    block_gates = []
    for i in sorted(blocks):
        v = data.vertices[i]
        e1, e2, e3 = data.incident(v)
        par = data.charge(v)
        rest_edges = [e for e in edges if e not in (e1, e2, e3)]
        by_triple: dict[tuple, list[dict]] = {}
        for lam in blocks[i]:
            by_triple.setdefault((lam[e1], lam[e2], lam[e3]), []).append(lam)
        parts = []
        for (j, k, l) in data.triples(par):
            lams = by_triple.get((j, k, l), [])
            if not lams:
                continue
            bare = b.add_all(
                b.mul_all(b.inp(cfi_x(e, lam[e])) for e in rest_edges)
                for lam in lams
            )
            full = b.mul(
                b.inp(cfi_x(e1, j)), b.inp(cfi_x(e2, k)), b.inp(cfi_x(e3, l)), bare
            )
            sel = b.mul(full, b.inp(cfi_yv(v, j, k, l)))
            boolean_part = b.mul(
                bare,
                b.add(
                    b.mul(b.inp(cfi_yb(e1, j)), b.inp(cfi_x(e2, k)), b.inp(cfi_x(e3, l))),
                    b.mul(b.inp(cfi_yb(e2, k)), b.inp(cfi_x(e1, j)), b.inp(cfi_x(e3, l))),
                    b.mul(b.inp(cfi_yb(e3, l)), b.inp(cfi_x(e1, j)), b.inp(cfi_x(e2, k))),
                ),
            )
            parts.append(b.add(sel, boolean_part))
        block_gates.append(b.add_all(parts))

    out = b.add_all([telescope] + block_gates)
    return finish_certificate(b, out, inst, y_linear=True, notes=("cfi-linear",))


# --- subset sum -------------------------------------------------------------------


def _subset_sum_coeffs(n: int, beta: Coeff, field) -> list[Coeff]:
    """Coefficient of each elementary symmetric part in the sum-axiom multiplier."""
    out = []
    for k in range(n + 1):
        denom = field.one
        for j in range(k + 1):
            denom = field.mul(denom, field.sub(field.coerce(beta), field.coerce(j)))
        out.append(field.neg(field.div(field.coerce(math.factorial(k)), denom)))
    return out


def build_subsetsum(inst: Instance) -> Certificate:
    """Selector-linear symmetric refutation of the subset-sum system.

    The sum axiom is multiplied by an expanded combination of elementary
    symmetric polynomials; each Boolean axiom gets the matching stabilizer-
    symmetric coefficient.  The lifted variant routes products x_i*y_i through
    shared gates and derives the Boolean coefficients from the exact identity
    x^2 y^2 - x y = (x^2 - x) y + (y^2 - y) x^2.
    """
    meta = inst.meta
    if meta.get("family") != "subsetsum":
        raise MalformedInputError("not a subset-sum instance")
    n = meta["n"]
    lifted = meta["lifted"]
    f = inst.field
    beta = Fraction(meta["beta"]) if f.kind == "Q" else int(Fraction(meta["beta"]))
    coeffs = _subset_sum_coeffs(n, beta, f)
    b = CircuitBuilder(f)

    xs = [Variable("x", (i,)) for i in range(1, n + 1)]
    ys = [Variable("y", (i,)) for i in range(1, n + 1)]
    if lifted:
        vals = {i: b.mul(b.inp(xs[i - 1]), b.inp(ys[i - 1])) for i in range(1, n + 1)}
    else:
        vals = {i: b.inp(xs[i - 1]) for i in range(1, n + 1)}

    def sym_gate(indices: tuple[int, ...], k: int) -> int:
        return b.add_all(
            b.mul_all(vals[i] for i in combo)
            for combo in itertools.combinations(indices, k)
        )

    full = tuple(range(1, n + 1))
    multiplier = b.add_all(
        b.scaled(coeffs[k], sym_gate(full, k)) for k in range(n + 1)
    )
    terms = [b.mul(b.inp(Variable("ysum", ())), multiplier)]
    minus_one = f.neg(f.one)
    for i in range(1, n + 1):
        rest = tuple(j for j in full if j != i)
        p_gate = b.add_all(
            b.scaled(coeffs[k], sym_gate(rest, k - 1)) for k in range(1, n + 1)
        )
        if lifted:
            terms.append(
                b.scaled(
                    minus_one,
                    b.mul(b.inp(Variable("Bx", (i,))), b.inp(ys[i - 1]), p_gate),
                )
            )
            xsq = b.mul(b.inp(xs[i - 1]), b.inp(xs[i - 1]))
            terms.append(
                b.scaled(
                    minus_one,
                    b.mul(b.inp(Variable("By", (i,))), xsq, p_gate),
                )
            )
        else:
            terms.append(
                b.scaled(minus_one, b.mul(b.inp(Variable("Bx", (i,))), p_gate))
            )
    out = b.add_all(terms)
    return finish_certificate(
        b,
        out,
        inst,
        y_linear=True,
        notes=("subset-sum", "lifted" if lifted else "plain"),
    )


# --- pigeonhole -------------------------------------------------------------------


def _alpha(m: int, k: int) -> Fraction:
    return Fraction(1, math.comb(m, k) * (m - k))


def build_php(inst: Instance, budget: Budget | None = None) -> Certificate:
    """Selector-linear symmetric refutation of the pigeonhole system.

    A shared recursive circuit family computes, for every pigeon subset, the
    sum over all injective placements into the holes; hole-deleted variants
    reuse the same recursion with one hole removed.  Row and collision
    selectors get coefficient layers that telescope to the constant one.
    """
    meta = inst.meta
    if meta.get("family") != "php":
        raise MalformedInputError("not a pigeonhole instance")
    n = meta["n"]
    m = n + 1
    pigeons = tuple(range(1, m + 1))
    budget = budget or Budget()
    budget.charge(n * 3 ** n)
    f = inst.field
    b = CircuitBuilder(f)

    inj_cache: dict[tuple, int] = {}

    def injection_gate(D: tuple[int, ...], holes: tuple[int, ...]) -> int:
        key = (D, holes)
        got = inj_cache.get(key)
        if got is not None:
            return got
        if len(D) == 0:
            gate = b.const(1)
        elif len(D) == 1:
            gate = b.add_all(b.inp(php_x(D[0], j)) for j in holes)
        else:
            parts = []
            for k in range(1, len(D) + 1):
                coeff = Fraction((-1) ** (k - 1) * math.factorial(k), len(D))
                for sub in itertools.combinations(D, k):
                    hole_sum = b.add_all(
                        b.mul_all(b.inp(php_x(i, j)) for i in sub) for j in holes
                    )
                    rest = tuple(i for i in D if i not in sub)
                    parts.append(
                        b.scaled(coeff, b.mul(hole_sum, injection_gate(rest, holes)))
                    )
            gate = b.add_all(parts)
        inj_cache[key] = gate
        return gate

    holes_all = tuple(range(1, n + 1))
    terms = []
    for i in pigeons:
        rest = tuple(p for p in pigeons if p != i)
        parts = []
        for size in range(0, n + 1):
            coeff = -_alpha(m, size)
            for D in itertools.combinations(rest, size):
                parts.append(b.scaled(coeff, injection_gate(D, holes_all)))
        terms.append(b.mul(b.inp(Variable("yrow", (i,))), b.add_all(parts)))
    for i, i2 in itertools.combinations(pigeons, 2):
        rest = tuple(p for p in pigeons if p not in (i, i2))
        for j in holes_all:
            holes_del = tuple(h for h in holes_all if h != j)
            parts = []
            for size in range(0, len(rest) + 1):
                coeff = 2 * _alpha(m, size + 1)
                for D in itertools.combinations(rest, size):
                    parts.append(b.scaled(coeff, injection_gate(D, holes_del)))
            terms.append(
                b.mul(b.inp(Variable("ycol", (i, i2, j))), b.add_all(parts))
            )
    out = b.add_all(terms)
    return finish_certificate(b, out, inst, y_linear=True, notes=("php",))


def php_injection_polynomial(inst: Instance, D: tuple[int, ...], holes: tuple[int, ...] | None = None) -> Polynomial:
    """Expansion of the shared injection-sum gate, for oracle comparisons."""
    meta = inst.meta
    n = meta["n"]
    b = CircuitBuilder(inst.field)
    if holes is None:
        holes = tuple(range(1, n + 1))
    cache: dict[tuple, int] = {}

    def gate(D2, hs):
        key = (D2, hs)
        if key in cache:
            return cache[key]
        if len(D2) == 0:
            g = b.const(1)
        elif len(D2) == 1:
            g = b.add_all(b.inp(php_x(D2[0], j)) for j in hs)
        else:
            parts = []
            for k in range(1, len(D2) + 1):
                coeff = Fraction((-1) ** (k - 1) * math.factorial(k), len(D2))
                for sub in itertools.combinations(D2, k):
                    hole_sum = b.add_all(
                        b.mul_all(b.inp(php_x(i, j)) for i in sub) for j in hs
                    )
                    rest = tuple(i for i in D2 if i not in sub)
                    parts.append(b.scaled(coeff, b.mul(hole_sum, gate(rest, hs))))
            g = b.add_all(parts)
        cache[key] = g
        return g

    return b.eval(gate(tuple(sorted(D)), holes))
