"""Rule-based proofs over the instance axioms: checking, bounded-degree search,
and the translations into selector-linear certificate circuits.

A proof is a sequence of lines; each line carries its polynomial and the rule
that produced it (an axiom, a Boolean axiom, a multiplication by one variable,
or a linear combination of two earlier lines).  The checker recomputes every
line exactly.  Proof search is linear-algebra saturation over the space of
bounded-degree polynomials with an echelon basis in graded lexicographic
order, reconstructing an explicit proof from the elimination trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebra import Coeff, FieldTag, Monomial, Polynomial, Variable, grlex_key
from .circuit import Budget, CircuitBuilder, eval_symbolic
from .constructions import Certificate, Claims, _witness_renames
from .errors import MalformedInputError
from .instances import Instance, boolean_axiom, make_instance
from .symmetry import GroupPresentation, VariablePermutation, orbit


# --- proof objects ------------------------------------------------------------


@dataclass(frozen=True)
class Ax:
    index: int


@dataclass(frozen=True)
class Bool:
    var: Variable


@dataclass(frozen=True)
class Mult:
    line: int
    var: Variable


@dataclass(frozen=True)
class Lin:
    line_a: int
    line_b: int
    coeff_a: Coeff
    coeff_b: Coeff


Justification = Ax | Bool | Mult | Lin


@dataclass(frozen=True)
class PcProof:
    lines: tuple[tuple[Polynomial, Justification], ...]

    def degree(self) -> int:
        ds = [p.degree() for p, _ in self.lines if not p.is_zero()]
        return max(ds) if ds else 0

    def num_lines(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class PcCheckResult:
    valid: bool
    degree: int
    lines: int
    error: str | None = None


def check_pc_proof(inst: Instance, proof: PcProof) -> PcCheckResult:
    """Recompute every line exactly; the last line must be the constant one."""
    f = inst.field
    polys: list[Polynomial] = []
    for idx, (claimed, just) in enumerate(proof.lines):
        try:
            if isinstance(just, Ax):
                p = inst.axioms[just.index]
            elif isinstance(just, Bool):
                if just.var not in inst.xvars:
                    raise MalformedInputError(f"{just.var} is not an instance variable")
                p = boolean_axiom(f, just.var)
            elif isinstance(just, Mult):
                p = polys[just.line].mul(Polynomial.var(f, just.var))
            elif isinstance(just, Lin):
                p = polys[just.line_a].scale(just.coeff_a).add(
                    polys[just.line_b].scale(just.coeff_b)
                )
            else:
                raise MalformedInputError(f"unknown rule {just!r}")
            if isinstance(just, (Mult, Lin)):
                refs = (
                    (just.line,) if isinstance(just, Mult) else (just.line_a, just.line_b)
                )
                if any(r >= idx or r < 0 for r in refs):
                    raise MalformedInputError("rule references a non-earlier line")
        except (IndexError, MalformedInputError) as exc:
            return PcCheckResult(False, 0, len(proof.lines), f"line {idx}: {exc}")
        if p != claimed:
            return PcCheckResult(
                False, 0, len(proof.lines), f"line {idx}: polynomial does not recompute"
            )
        polys.append(p)
    if not polys or polys[-1] != Polynomial.const(f, f.one):
        return PcCheckResult(False, 0, len(proof.lines), "last line is not 1")
    return PcCheckResult(True, proof.degree(), len(proof.lines), None)


# --- bounded-degree saturation ---------------------------------------------------


class _Echelon:
    """Echelon basis keyed by graded-lex leading monomials, with proof lines."""

    def __init__(self, field: FieldTag, budget: Budget):
        self.field = field
        self.budget = budget
        self.rows: dict[Monomial, tuple[Polynomial, int]] = {}
        self.lines: list[tuple[Polynomial, Justification]] = []

    def emit(self, poly: Polynomial, just: Justification) -> int:
        self.lines.append((poly, just))
        return len(self.lines) - 1

    @staticmethod
    def leading(p: Polynomial) -> Monomial:
        return max(p.terms, key=grlex_key)

    def insert(self, p: Polynomial, line: int) -> tuple[Monomial, int] | None:
        """Reduce against leading monomials; store and return the new pivot row."""
        f = self.field
        while not p.is_zero():
            lm = self.leading(p)
            row = self.rows.get(lm)
            if row is None:
                self.rows[lm] = (p, line)
                return lm, line
            rp, rline = row
            factor = f.neg(f.div(p.coefficient(lm), rp.coefficient(lm)))
            self.budget.charge(p.num_terms() + rp.num_terms())
            p = p.add(rp.scale(factor))
            line = self.emit(p, Lin(line, rline, f.one, factor))
        return None

    def constant_row(self) -> tuple[Polynomial, int] | None:
        return self.rows.get(Monomial.one())


def pc_search_bounded_degree(
    inst: Instance, k: int, budget: Budget | None = None
) -> PcProof | None:
    """Decision procedure for bounded-degree derivability of the constant one.

    Saturates the span of the degree-bounded axioms under multiplication by
    single variables (results truncated at degree k are never formed: a line
    of degree d can only be multiplied when d < k) and linear combinations.
    Returns an explicit proof on success, None at the fixed point.
    """
    f = inst.field
    budget = budget or Budget()
    ech = _Echelon(f, budget)
    queue: list[tuple[Monomial, int]] = []

    def push(p: Polynomial, just: Justification) -> bool:
        """Insert a candidate; returns True when the constant is reached."""
        if p.is_zero():
            return False
        line = ech.emit(p, just)
        got = ech.insert(p, line)
        if got is not None:
            lm, _ = got
            row_poly, _ = ech.rows[lm]
            if lm.degree() < k and not row_poly.is_zero():
                queue.append(got)
        return ech.constant_row() is not None

    for i, axiom in enumerate(inst.axioms):
        d = axiom.degree()
        if d is not None and d <= k:
            if push(axiom, Ax(i)):
                return _finish_proof(ech)
    xvars = sorted(inst.xvars)
    qi = 0
    while qi < len(queue):
        lm, _ = queue[qi]
        qi += 1
        row = ech.rows.get(lm)
        if row is None:
            continue
        rp, rline = row
        if rp.degree() >= k:
            continue
        for x in xvars:
            prod = rp.mul(Polynomial.var(f, x))
            budget.charge(prod.num_terms())
            line = ech.emit(prod, Mult(rline, x))
            got = ech.insert(prod, line)
            if got is not None and got[0].degree() < k:
                queue.append(got)
            if ech.constant_row() is not None:
                return _finish_proof(ech)
    return None


def _finish_proof(ech: _Echelon) -> PcProof:
    poly, line = ech.constant_row()
    f = ech.field
    c = poly.coefficient(Monomial.one())
    if c != f.one:
        inv = f.inv(c)
        line = ech.emit(poly.scale(inv), Lin(line, line, inv, f.zero))
    return PcProof(tuple(ech.lines[: line + 1]))


def derivable_space_dense(inst: Instance, k: int) -> bool:
    """Independent dense-matrix oracle: is 1 in the degree-k closure?

    Enumerates the full bounded-degree monomial space and iterates closure
    under variable multiplication with rank checks; no proof reconstruction.
    """
    f = inst.field
    monos = all_monomials(inst.xvars, k)
    idx = {m: i for i, m in enumerate(monos)}

    def vec(p: Polynomial) -> tuple:
        out = [f.zero] * len(monos)
        for m, c in p.terms.items():
            out[idx[m]] = c
        return tuple(out)

    basis: list[list[Coeff]] = []

    def reduce_insert(v) -> bool:
        v = list(v)
        for row in basis:
            piv = next(i for i, c in enumerate(row) if c != f.zero)
            if v[piv] != f.zero:
                fac = f.neg(f.div(v[piv], row[piv]))
                v = [f.add(a, f.mul(fac, b)) for a, b in zip(v, row)]
        if all(c == f.zero for c in v):
            return False
        basis.append(v)
        return True

    frontier = [a for a in inst.axioms if a.degree() is not None and a.degree() <= k]
    polys = []
    for a in frontier:
        if reduce_insert(vec(a)):
            polys.append(a)
    changed = True
    while changed:
        changed = False
        for p in list(polys):
            if p.degree() >= k:
                continue
            for x in inst.xvars:
                q = p.mul(Polynomial.var(f, x))
                if reduce_insert(vec(q)):
                    polys.append(q)
                    changed = True
    one = vec(Polynomial.const(f, f.one))
    return not reduce_insert(one)


def all_monomials(variables: Sequence[Variable], max_degree: int) -> list[Monomial]:
    """Every monomial over the variables with total degree at most the bound."""
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(sorted(variables), d):
            out.append(Monomial.of(*combo))
    return out


# --- translation into certificate circuits ------------------------------------------


def pc_to_ipslin(inst: Instance, proof: PcProof) -> Certificate:
    """Skew, selector-linear certificate from a valid proof: each line becomes
    a gate combination with the selector variable replacing its axiom."""
    res = check_pc_proof(inst, proof)
    if not res.valid:
        raise MalformedInputError(f"invalid proof: {res.error}")
    f = inst.field
    b = CircuitBuilder(f)
    gates: list[int] = []
    for poly, just in proof.lines:
        if isinstance(just, Ax):
            g = b.inp(inst.yvars[just.index])
        elif isinstance(just, Bool):
            g = b.inp(inst.yvars[inst.axiom_for_boolean(just.var)])
        elif isinstance(just, Mult):
            g = b.mul(b.inp(just.var), gates[just.line])
        else:
            g = b.add(
                b.scaled(just.coeff_a, gates[just.line_a]),
                b.scaled(just.coeff_b, gates[just.line_b]),
            )
        gates.append(g)
    out = gates[-1]
    one = Polynomial.const(f, f.one)
    if b.eval(out, leaf_subst=inst.substitution()) != one:
        raise MalformedInputError("translated certificate does not substitute to 1")
    circuit = b.build([out])
    return Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(y_linear=True, exact_degree=b.eval(out).degree(), group=None),
    )


def skewize(inst: Instance, cert: Certificate, k: int, budget: Budget | None = None) -> Certificate:
    """Expand a bounded-degree certificate into a skew chain-of-multiplications
    circuit that is linear in the selector variables.

    In every monomial one selector variable is kept and any further ones are
    replaced by the axioms they stand for; each resulting monomial becomes a
    chain of fan-in-2 multiplications by input gates.
    """
    budget = budget or Budget()
    f = inst.field
    p = eval_symbolic(cert.circuit, budget=budget)
    d = p.degree()
    if d is not None and d > k:
        raise MalformedInputError(f"certificate degree {d} exceeds the stated bound {k}")
    yidx = inst.yvar_index()
    ys = frozenset(inst.yvars)
    expanded = Polynomial.zero(f)
    for m, c in p.terms.items():
        selectors = [(v, e) for v, e in m.pairs if v in ys]
        if not selectors:
            raise MalformedInputError("certificate has a monomial without a selector")
        keep = selectors[0][0]
        rest = Polynomial.const(f, c)
        xpart = Monomial([(v, e) for v, e in m.pairs if v not in ys])
        rest = rest.mul_monomial(xpart.mul(Monomial.of(keep)))
        for v, e in selectors:
            power = e - 1 if v == keep else e
            for _ in range(power):
                budget.charge(rest.num_terms() * inst.axioms[yidx[v]].num_terms())
                rest = rest.mul(inst.axioms[yidx[v]])
        expanded = expanded.add(rest)

    b = CircuitBuilder(f)
    terms = []
    for m, c in expanded.terms.items():
        factors: list[Variable] = []
        for v, e in m.pairs:
            factors.extend([v] * e)
        chain = b.inp(factors[0]) if factors else b.const(1)
        for v in factors[1:]:
            chain = b.mul(chain, b.inp(v))
        terms.append(b.scaled(c, chain) if c != f.one else chain)
    out = b.add_all(terms)
    one = Polynomial.const(f, f.one)
    if b.eval(out, leaf_subst=inst.substitution()) != one:
        raise MalformedInputError("skew form does not substitute to 1")
    return Certificate(
        circuit=b.build([out]),
        instance_name=inst.name,
        claims=Claims(y_linear=True, exact_degree=expanded.degree(), group=None,
                      notes=("skewized",)),
    )


# --- extension axioms and their symmetric lift ---------------------------------------


@dataclass(frozen=True)
class ExtensionAxiomSet:
    """Hierarchical definitions: entry i introduces variable entries[i][0] with
    definition entries[i][1]; classes partition the entry indices."""

    entries: tuple[tuple[Variable, Polynomial], ...]
    classes: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class EpcProof:
    base: PcProof  # a proof over the instance axioms plus the extension axioms
    extensions: ExtensionAxiomSet


def _lift_extension_action(
    ext: ExtensionAxiomSet, group: GroupPresentation
) -> tuple[list[VariablePermutation] | None, str | None]:
    """Extend each generator over the extension variables, or say which of the
    three closure conditions fails."""
    flat = list(range(len(ext.entries)))
    if sorted(i for cls in ext.classes for i in cls) != flat:
        return None, "condition 1: classes do not partition the extension axioms"
    defs = {}
    for i, (_, d) in enumerate(ext.entries):
        kd = d.key()
        if kd in defs:
            return None, f"condition 2: entries {defs[kd]} and {i} share a definition"
        defs[kd] = i
    ext_vars = {v for v, _ in ext.entries}
    allowed: set[Variable] = set()
    class_of = {}
    for ci, cls in enumerate(ext.classes):
        for i in cls:
            class_of[i] = ci
            v, d = ext.entries[i]
            bad = (d.variables() & ext_vars) - allowed
            if bad:
                return None, (
                    f"condition 1: definition of {v} uses same-or-later-class "
                    f"variables {sorted(map(str, bad))}"
                )
        allowed |= {ext.entries[i][0] for i in cls}
    lifted = []
    for gi, g in enumerate(group.generators):
        cur = g
        for ci, cls in enumerate(ext.classes):
            vmap: dict[Variable, Variable] = {}
            for i in cls:
                v, d = ext.entries[i]
                img = cur.apply_poly(d).key()
                j = defs.get(img)
                if j is None or class_of[j] != ci:
                    return None, (
                        f"condition 3: generator {gi} maps the definition of {v} "
                        "outside its class"
                    )
                if v != ext.entries[j][0]:
                    vmap[v] = ext.entries[j][0]
            cur = cur.extend(vmap)
        lifted.append(cur)
    return lifted, None


def check_sym_epc(inst: Instance, proof: EpcProof, group: GroupPresentation | None = None) -> bool:
    """Do the extension axioms admit the inductively lifted group action?"""
    lifted, _ = _lift_extension_action(proof.extensions, group or inst.group)
    return lifted is not None


def sym_epc_failure(inst: Instance, proof: EpcProof, group: GroupPresentation | None = None) -> str | None:
    _, why = _lift_extension_action(proof.extensions, group or inst.group)
    return why


def extended_instance(inst: Instance, ext: ExtensionAxiomSet, lifted_generators) -> Instance:
    """The instance together with the extension axioms and the lifted group."""
    new_axioms = list(zip(inst.axioms, inst.yvars))
    for i, (v, d) in enumerate(ext.entries):
        poly = Polynomial.var(inst.field, v).sub(d)
        new_axioms.append((poly, Variable("yext", (i,))))
    return make_instance(
        name=inst.name + "+ext",
        field=inst.field,
        xvars=tuple(inst.xvars) + tuple(v for v, _ in ext.entries),
        axioms=new_axioms,
        group=GroupPresentation(tuple(lifted_generators)),
        meta={"family": "extended"},
    )


def epc_to_symipslin(
    inst: Instance,
    proof: EpcProof,
    group: GroupPresentation | None = None,
    budget: Budget | None = None,
) -> Certificate:
    """Symmetric selector-linear certificate from a symmetric extension proof.

    Pipeline: translate the base proof over the extended axiom set, average it
    over the lifted group orbit-wise, then eliminate extension machinery by
    substituting each extension selector with its defining axiom and each
    extension variable with its fully inlined definition (hierarchical order
    makes that well-founded; the defining axioms collapse to zero under it).
    """
    from .constructions import symmetrize_average

    group = group or inst.group
    if inst.field.kind == "Fp":
        # the averaging step divides by orbit sizes; its own checks still run
        pass
    lifted, why = _lift_extension_action(proof.extensions, group)
    if lifted is None:
        raise MalformedInputError(f"extension axioms are not symmetric: {why}")
    ext_inst = extended_instance(inst, proof.extensions, lifted)
    base_res = check_pc_proof(ext_inst, proof.base)
    if not base_res.valid:
        raise MalformedInputError(f"base proof invalid: {base_res.error}")
    cert0 = pc_to_ipslin(ext_inst, proof.base)
    avg = symmetrize_average(ext_inst, cert0, budget=budget)

    theta: dict[Variable, Polynomial] = {}
    for cls in proof.extensions.classes:
        layer = {}
        for i in cls:
            v, d = proof.extensions.entries[i]
            layer[v] = d.substitute(theta)
        theta.update(layer)
    ysubst = {
        Variable("yext", (i,)): Polynomial.var(inst.field, v).sub(d)
        for i, (v, d) in enumerate(proof.extensions.entries)
    }
    p = eval_symbolic(avg.circuit, budget=budget or Budget())
    p = p.substitute(ysubst).substitute(theta)

    b = CircuitBuilder(inst.field)
    out = b.poly_sum(p)
    one = Polynomial.const(inst.field, inst.field.one)
    if b.eval(out, leaf_subst=inst.substitution()) != one:
        raise MalformedInputError("inlined certificate does not substitute to 1")
    if not b.eval(out, leaf_subst=inst.zero_substitution()).is_zero():
        raise MalformedInputError("inlined certificate is nonzero at zero selectors")
    circuit = b.build([out], _witness_renames(inst))
    ys = frozenset(inst.yvars)
    return Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(
            y_linear=all(m.degree_in(ys) == 1 for m in p.terms),
            exact_degree=p.degree(),
            group="instance" if inst.group.generators else "trivial",
            notes=("extension-proof",),
        ),
    )


# --- symmetric linear certificate search ----------------------------------------------


def sym_linear_certificate_search(
    inst: Instance,
    group: GroupPresentation | None = None,
    d: int = 2,
    budget: Budget | None = None,
) -> Certificate | None:
    """Exact search for a symmetric certificate that is linear in the selector
    variables with coefficient polynomials of bounded degree.

    One unknown per orbit of (selector times monomial) products bakes the
    symmetry constraint into the unknowns; the two certificate conditions
    become exact linear constraints on the substituted expansion.  Returns a
    certificate or None when the linear system is infeasible at this degree.
    """
    f = inst.field
    budget = budget or Budget()
    group = group if group is not None else inst.induced_group
    monos = all_monomials(inst.xvars, d)
    seen: set[Monomial] = set()
    orbits: list[list[tuple[int, Monomial]]] = []
    yset = set(inst.yvars)
    yindex = inst.yvar_index()
    for i, y in enumerate(inst.yvars):
        for m in monos:
            full = m.mul(Monomial.of(y))
            if full in seen:
                continue
            orb = sorted(orbit(group, full), key=grlex_key)
            seen |= set(orb)
            pairs = []
            for om in orb:
                oys = [v for v in om.variables() if v in yset]
                if len(oys) != 1 or om.degree_in(yset) != 1:
                    raise MalformedInputError("group does not preserve the selector block")
                oy = oys[0]
                pairs.append((yindex[oy], om.divide(Monomial.of(oy))))
            orbits.append(pairs)

    # substituted expansion of each orbit sum
    columns: list[dict[Monomial, Coeff]] = []
    for pairs in orbits:
        acc = Polynomial.zero(f)
        for yi, m in pairs:
            budget.charge(inst.axioms[yi].num_terms())
            acc = acc.add(inst.axioms[yi].mul_monomial(m))
        columns.append(dict(acc.terms))

    rows_of: dict[Monomial, int] = {}
    for col in columns:
        for m in col:
            rows_of.setdefault(m, len(rows_of))
    nrows = len(rows_of)
    matrix = [[f.zero] * len(columns) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for m, c in col.items():
            matrix[rows_of[m]][j] = c
    rhs = [f.zero] * nrows
    one_row = rows_of.get(Monomial.one())
    if one_row is None:
        return None
    rhs[one_row] = f.one

    sol = _solve_linear_system(f, matrix, rhs)
    if sol is None:
        return None
    cert_poly = Polynomial.zero(f)
    for j, coeff in enumerate(sol):
        if coeff == f.zero:
            continue
        for yi, m in orbits[j]:
            cert_poly = cert_poly.add(
                Polynomial(f, {m.mul(Monomial.of(inst.yvars[yi])): coeff})
            )
    b = CircuitBuilder(f)
    out = b.poly_sum(cert_poly)
    renames = (
        {i: g for i, g in enumerate(group.generators)} if group.generators else None
    )
    circuit = b.build([out], renames)
    return Certificate(
        circuit=circuit,
        instance_name=inst.name,
        claims=Claims(
            y_linear=True,
            exact_degree=cert_poly.degree(),
            group="instance" if group.generators else "trivial",
            notes=("linear-search",),
        ),
    )


def _solve_linear_system(
    f: FieldTag, matrix: list[list[Coeff]], rhs: list[Coeff]
) -> list[Coeff] | None:
    """Gaussian elimination over the field; any solution or None."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    aug = [list(row) + [r] for row, r in zip(matrix, rhs)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c] != f.zero), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = f.inv(aug[r][c])
        aug[r] = [f.mul(inv, x) for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != f.zero:
                fac = aug[i][c]
                aug[i] = [f.sub(x, f.mul(fac, y)) for x, y in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols] != f.zero:
            return None
    if any(all(x == f.zero for x in aug[i][:ncols]) and aug[i][ncols] != f.zero
           for i in range(nrows)):
        return None
    sol = [f.zero] * ncols
    for i, c in pivots:
        sol[c] = aug[i][ncols]
    return sol