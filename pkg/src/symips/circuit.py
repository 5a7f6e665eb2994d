"""Algebraic-circuit DAGs: construction, evaluation, degree, structural predicates.

A circuit is a sequence of gates in topological order.  Children are stored as
a sorted tuple of gate ids and form a multiset, so ``mul(g, g)`` is a legal
fan-in-2 gate.  Gates unreachable from every designated output are rejected.

`CircuitBuilder` hash-conses gates by content: building the same expression
twice yields the same gate id.  That gives shared subcircuits for free and
makes symmetry witnesses computable by structural relabeling: renaming the
input variables of a consed DAG either reproduces exactly the same gates (the
induced gate permutation is the witness) or it does not (no witness from this
construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import Coeff, FieldTag, Monomial, Polynomial, Variable
from .errors import BudgetExceededError, FieldMismatchError, MalformedInputError

IN, CONST, ADD, MUL = "in", "const", "add", "mul"


class Budget:
    """Mutable term-operation budget for exact expansions."""

    DEFAULT = 10_000_000

    def __init__(self, limit: int | None = None):
        self.limit = Budget.DEFAULT if limit is None else limit
        self.spent = 0

    def charge(self, amount: int) -> None:
        self.spent += amount
        if self.spent > self.limit:
            raise BudgetExceededError(
                f"term-operation budget exceeded ({self.spent} > {self.limit})"
            )


@dataclass(frozen=True)
class Gate:
    """One circuit node.  payload: Variable for `in`, coefficient for `const`."""

    label: str
    payload: object = None
    children: tuple[int, ...] = ()

    def is_input(self) -> bool:
        return self.label in (IN, CONST)


@dataclass(frozen=True)
class Circuit:
    """Validated gate DAG with designated outputs and optional symmetry witnesses.

    witnesses maps a generator id to a gate permutation, stored as a tuple w
    with w[i] = image of gate i.
    """

    field: FieldTag
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    witnesses: dict[int, tuple[int, ...]] = field(default_factory=dict)
    witnesses_dropped: bool = False

    def __post_init__(self) -> None:
        n = len(self.gates)
        if not self.outputs:
            raise MalformedInputError("circuit needs at least one output")
        for i, g in enumerate(self.gates):
            if g.label in (IN, CONST):
                if g.children:
                    raise MalformedInputError(f"gate {i}: input gates have no children")
                if g.label == IN and not isinstance(g.payload, Variable):
                    raise MalformedInputError(f"gate {i}: bad input payload")
            elif g.label in (ADD, MUL):
                if not g.children:
                    raise MalformedInputError(f"gate {i}: {g.label} needs children")
                if any(c >= i or c < 0 for c in g.children):
                    raise MalformedInputError(f"gate {i}: children must come earlier")
                if tuple(sorted(g.children)) != g.children:
                    raise MalformedInputError(f"gate {i}: children not sorted")
            else:
                raise MalformedInputError(f"gate {i}: unknown label {g.label!r}")
        for o in self.outputs:
            if not 0 <= o < n:
                raise MalformedInputError(f"output {o} out of range")
        reach = self.reachable(self.outputs)
        if len(reach) != n:
            raise MalformedInputError(
                f"{n - len(reach)} gate(s) unreachable from the outputs"
            )

    def reachable(self, roots: Iterable[int]) -> set[int]:
        seen: set[int] = set()
        stack = list(roots)
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            stack.extend(self.gates[i].children)
        return seen

    def input_variables(self) -> set[Variable]:
        return {g.payload for g in self.gates if g.label == IN}

    def gate_count(self) -> int:
        return len(self.gates)

    def wire_count(self) -> int:
        return sum(len(g.children) for g in self.gates)

    def with_witnesses(self, witnesses: dict[int, tuple[int, ...]]) -> "Circuit":
        return replace(self, witnesses=dict(witnesses), witnesses_dropped=False)


@dataclass(frozen=True)
class SizeMetrics:
    gate_count: int
    wire_count: int
    instance_vars: int
    proof_size: int       # max(gates, |X|+|Y|): size is at least the instance size
    min_convention: int   # min(gates, |X|+|Y|), recorded alongside


def size_metrics(c: Circuit, instance_vars: int) -> SizeMetrics:
    g = c.gate_count()
    return SizeMetrics(
        gate_count=g,
        wire_count=c.wire_count(),
        instance_vars=instance_vars,
        proof_size=max(g, instance_vars),
        min_convention=min(g, instance_vars),
    )


class CircuitBuilder:
    """Hash-consing gate store.  Use inp/const/add/mul, then build(outputs)."""

    def __init__(self, field: FieldTag):
        self.field = field
        self._gates: list[Gate] = []
        self._index: dict[tuple, int] = {}

    def _cons(self, label: str, payload, children: tuple[int, ...]) -> int:
        key = (label, payload, children)
        got = self._index.get(key)
        if got is not None:
            return got
        gid = len(self._gates)
        self._gates.append(Gate(label, payload, children))
        self._index[key] = gid
        return gid

    def inp(self, var: Variable) -> int:
        return self._cons(IN, var, ())

    def const(self, value: Coeff) -> int:
        return self._cons(CONST, self.field.coerce(value), ())

    def add(self, *children: int) -> int:
        return self.add_all(children)

    def add_all(self, children: Iterable[int]) -> int:
        ch = tuple(sorted(children))
        if not ch:
            return self.const(0)
        if len(ch) == 1:
            return ch[0]
        return self._cons(ADD, None, ch)

    def mul(self, *children: int) -> int:
        return self.mul_all(children)

    def mul_all(self, children: Iterable[int]) -> int:
        ch = tuple(sorted(children))
        if not ch:
            return self.const(1)
        if len(ch) == 1:
            return ch[0]
        return self._cons(MUL, None, ch)

    def monomial(self, m: Monomial, coeff: Coeff | None = None) -> int:
        """Gate computing coeff * m as a flat product."""
        ids: list[int] = []
        if coeff is not None and coeff != self.field.one:
            ids.append(self.const(coeff))
        for v, e in m.pairs:
            ids.extend([self.inp(v)] * e)
        if not ids:
            return self.const(1)
        return self.mul_all(ids)

    def poly_sum(self, p: Polynomial) -> int:
        """Depth-2 sum-of-monomials gate for an explicit polynomial."""
        if p.field != self.field:
            raise FieldMismatchError(f"{p.field} vs {self.field}")
        if p.is_zero():
            return self.const(0)
        return self.add_all(
            self.monomial(m, c) for m, c in p.sorted_terms()
        )

    def scaled(self, coeff: Coeff, gate: int) -> int:
        c = self.field.coerce(coeff)
        if c == self.field.one:
            return gate
        return self.mul(self.const(c), gate)

    def gate(self, gid: int) -> Gate:
        return self._gates[gid]

    def eval(
        self,
        gid: int,
        leaf_subst: Mapping[Variable, Polynomial] | None = None,
        budget: Budget | None = None,
    ) -> Polynomial:
        """Exact polynomial at a builder gate (ids are already topological)."""
        budget = budget or Budget()
        need: set[int] = set()
        stack = [gid]
        while stack:
            i = stack.pop()
            if i in need:
                continue
            need.add(i)
            stack.extend(self._gates[i].children)
        cache = _eval_gate_list(self._gates, sorted(need), self.field, leaf_subst, budget)
        return cache[gid]

    # --- relabeling under a variable permutation ---------------------------

    def relabel_map(self, rename: Callable[[Variable], Variable]) -> dict[int, int]:
        """Image gate of every current gate under an input renaming.

        New gates may be consed for images that did not exist yet; the caller
        checks whether the part it cares about is closed.
        """
        out: dict[int, int] = {}
        for gid in range(len(self._gates)):  # store may grow; iterate snapshot ids
            g = self._gates[gid]
            if g.label == IN:
                out[gid] = self.inp(rename(g.payload))
            elif g.label == CONST:
                out[gid] = gid
            else:
                ch = tuple(sorted(out[c] for c in g.children))
                out[gid] = self._cons(g.label, None, ch)
        return out

    def witness_for(
        self, outputs: Sequence[int], rename: Callable[[Variable], Variable]
    ) -> dict[int, int] | None:
        """Gate permutation realizing the renaming on the sub-DAG of outputs, or None."""
        m = self.relabel_map(rename)
        if sorted(m[o] for o in outputs) != sorted(outputs):
            return None
        return m

    # --- extraction ---------------------------------------------------------

    def build(
        self,
        outputs: Sequence[int],
        witness_renames: Mapping[int, Callable[[Variable], Variable]] | None = None,
    ) -> Circuit:
        """Extract the reachable, topologically compacted circuit.

        witness_renames maps generator ids to variable renamings; each one
        must be realizable by relabeling, and is stored as a gate witness.
        """
        outputs = tuple(outputs)
        maps: dict[int, dict[int, int]] = {}
        if witness_renames:
            for gen_id, rename in witness_renames.items():
                m = self.witness_for(outputs, rename)
                if m is None:
                    raise MalformedInputError(
                        f"generator {gen_id}: construction is not closed under relabeling"
                    )
                maps[gen_id] = m
        # witness images of reachable gates stay reachable because the output
        # set is fixed setwise, so one sweep suffices
        reach: set[int] = set()
        stack = list(outputs)
        while stack:
            i = stack.pop()
            if i in reach:
                continue
            reach.add(i)
            stack.extend(self._gates[i].children)
        order = sorted(reach)
        new_id = {old: i for i, old in enumerate(order)}
        gates = tuple(
            Gate(
                self._gates[old].label,
                self._gates[old].payload,
                tuple(sorted(new_id[c] for c in self._gates[old].children)),
            )
            for old in order
        )
        witnesses = {
            gen_id: tuple(new_id[m[old]] for old in order)
            for gen_id, m in maps.items()
        }
        return Circuit(
            field=self.field,
            gates=gates,
            outputs=tuple(new_id[o] for o in outputs),
            witnesses=witnesses,
            witnesses_dropped=witness_renames is None,
        )

    @staticmethod
    def import_circuit(dst: "CircuitBuilder", c: Circuit) -> list[int]:
        """Cons all gates of c into dst; returns the id translation list."""
        if dst.field != c.field:
            raise FieldMismatchError(f"{c.field} vs {dst.field}")
        trans: list[int] = []
        for g in c.gates:
            if g.label == IN:
                trans.append(dst.inp(g.payload))
            elif g.label == CONST:
                trans.append(dst.const(g.payload))
            else:
                ch = tuple(sorted(trans[i] for i in g.children))
                trans.append(dst._cons(g.label, None, ch))
        return trans


# --- evaluation -------------------------------------------------------------


def eval_symbolic(
    c: Circuit,
    output: int | None = None,
    *,
    leaf_subst: Mapping[Variable, Polynomial] | None = None,
    budget: Budget | None = None,
) -> Polynomial:
    """Exact polynomial computed at a designated output.

    leaf_subst replaces input variables by polynomials before gate evaluation,
    which keeps intermediate results small when the substituted form collapses
    (certificate checking relies on this).
    """
    if output is None:
        if len(c.outputs) != 1:
            raise ValueError("output gate must be named for multi-output circuits")
        output = c.outputs[0]
    if output not in c.outputs:
        raise ValueError(f"gate {output} is not a designated output")
    return _eval_gates(c, [output], leaf_subst, budget or Budget())[output]


def _eval_gates(
    c: Circuit,
    roots: Iterable[int],
    leaf_subst: Mapping[Variable, Polynomial] | None,
    budget: Budget,
) -> dict[int, Polynomial]:
    return _eval_gate_list(c.gates, sorted(c.reachable(roots)), c.field, leaf_subst, budget)


def _eval_gate_list(
    gates: Sequence[Gate],
    order: Sequence[int],
    f: FieldTag,
    leaf_subst: Mapping[Variable, Polynomial] | None,
    budget: Budget,
) -> dict[int, Polynomial]:
    cache: dict[int, Polynomial] = {}
    zero = f.zero
    fadd = f.add
    for i in order:
        g = gates[i]
        if g.label == IN:
            if leaf_subst is not None and g.payload in leaf_subst:
                cache[i] = leaf_subst[g.payload]
            else:
                cache[i] = Polynomial.var(f, g.payload)
        elif g.label == CONST:
            cache[i] = Polynomial.const(f, g.payload)
        elif g.label == ADD:
            acc: dict = {}
            for ch in g.children:
                terms = cache[ch].terms
                budget.charge(len(terms))
                for m, cf in terms.items():
                    s = fadd(acc.get(m, zero), cf)
                    if s == zero:
                        acc.pop(m, None)
                    else:
                        acc[m] = s
            cache[i] = Polynomial._raw(f, acc)
        else:
            factors = sorted((cache[ch] for ch in g.children), key=Polynomial.num_terms)
            acc_p = factors[0]
            for p in factors[1:]:
                budget.charge(max(1, acc_p.num_terms() * p.num_terms()))
                acc_p = acc_p.mul(p)
            cache[i] = acc_p
    return cache


def eval_point(c: Circuit, assignment: Mapping[Variable, Coeff]) -> dict[int, Coeff]:
    """Field evaluation of every designated output at a point."""
    f = c.field
    need = c.reachable(c.outputs)
    val: dict[int, Coeff] = {}
    for i in sorted(need):
        g = c.gates[i]
        if g.label == IN:
            if g.payload not in assignment:
                raise KeyError(f"no value for {g.payload}")
            val[i] = f.coerce(assignment[g.payload])
        elif g.label == CONST:
            val[i] = g.payload
        elif g.label == ADD:
            acc = f.zero
            for ch in g.children:
                acc = f.add(acc, val[ch])
            val[i] = acc
        else:
            acc = f.one
            for ch in g.children:
                acc = f.mul(acc, val[ch])
            val[i] = acc
    return {o: val[o] for o in c.outputs}


# --- degree ------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeReport:
    mode: str  # "exact" or "structural-upper-bound"
    per_gate: dict[int, int | None]
    max: int | None


def degree(c: Circuit, mode: str = "exact", budget: Budget | None = None) -> DegreeReport:
    """Semantic degree per gate.  None marks the zero polynomial (undefined degree).

    Exact mode expands every gate; structural mode is the sound upper bound
    Add=max, Mul=sum, Input=1, Const=0 (or undefined for the zero constant).
    """
    if mode == "exact":
        cache = _eval_gates(c, range(len(c.gates)), None, budget or Budget())
        per = {i: p.degree() for i, p in cache.items()}
    elif mode == "structural":
        per = {}
        for i, g in enumerate(c.gates):
            if g.label == IN:
                per[i] = 1
            elif g.label == CONST:
                per[i] = None if g.payload == c.field.zero else 0
            elif g.label == ADD:
                ds = [per[ch] for ch in g.children if per[ch] is not None]
                per[i] = max(ds) if ds else None
            else:
                ds = [per[ch] for ch in g.children]
                per[i] = None if any(d is None for d in ds) else sum(ds)
    else:
        raise ValueError(f"unknown degree mode {mode!r}")
    defined = [d for d in per.values() if d is not None]
    return DegreeReport(
        mode="exact" if mode == "exact" else "structural-upper-bound",
        per_gate=per,
        max=max(defined) if defined else None,
    )


# --- structural predicates ----------------------------------------------------


def check_y_linear(
    c: Circuit, yvars: Iterable[Variable], budget: Budget | None = None
) -> bool:
    """True iff every monomial of the computed output has total Y-degree exactly 1.

    Cheap one-sided probes run first: collapsing the circuit to a univariate
    polynomial in a fresh marker variable (X inputs to a constant, every Y
    input to the marker) leaves any surviving degree-d term witnessing a
    monomial of Y-degree d.  Proving linearity requires the full expansion,
    so the budget applies to that step.
    """
    ys = frozenset(yvars)
    f = c.field
    marker = Variable("linearity-probe", ())
    t = Polynomial.var(f, marker)
    for x_value in (f.zero, f.one):
        collapse = {
            v: (t if v in ys else Polynomial.const(f, x_value))
            for v in c.input_variables()
        }
        probed = eval_symbolic(c, budget=Budget(), leaf_subst=collapse)
        if any(m.degree() != 1 for m in probed.terms):
            return False
    full = eval_symbolic(c, budget=budget or Budget())
    return not full.is_zero() and all(m.degree_in(ys) == 1 for m in full.terms)


def check_skew(c: Circuit) -> bool:
    """Every Mul gate has fan-in at most 2 and at least one in-degree-0 child."""
    for g in c.gates:
        if g.label != MUL:
            continue
        if len(g.children) > 2:
            return False
        if not any(c.gates[ch].is_input() for ch in g.children):
            return False
    return True


# --- gate-level substitution ---------------------------------------------------


def inline(
    c: Circuit,
    sigma: Mapping[Variable, Circuit],
    witness_renames: Mapping[int, Callable[[Variable], Variable]] | None = None,
) -> Circuit:
    """Replace mapped input gates by copies of the mapped subcircuits.

    Pass witness_renames to recompute symmetry witnesses for the result;
    otherwise any witnesses are dropped and the result is flagged.
    """
    b = CircuitBuilder(c.field)
    repl: dict[Variable, int] = {}
    for v, sub in sigma.items():
        if sub.field != c.field:
            raise FieldMismatchError(f"{sub.field} vs {c.field}")
        if len(sub.outputs) != 1:
            raise MalformedInputError("inlined subcircuits need a single output")
        trans = CircuitBuilder.import_circuit(b, sub)
        repl[v] = trans[sub.outputs[0]]
    trans: list[int] = []
    for g in c.gates:
        if g.label == IN:
            trans.append(repl.get(g.payload, b.inp(g.payload)))
        elif g.label == CONST:
            trans.append(b.const(g.payload))
        else:
            ch = tuple(sorted(trans[i] for i in g.children))
            trans.append(b._cons(g.label, None, ch))
    return b.build([trans[o] for o in c.outputs], witness_renames)
