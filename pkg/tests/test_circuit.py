"""Circuit evaluation, degree reports, structural predicates, and inlining."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from symips.algebra import GF2, QQ, Monomial, Polynomial, Variable, elementary_symmetric
from symips.circuit import (
    Budget,
    Circuit,
    CircuitBuilder,
    Gate,
    check_skew,
    check_y_linear,
    degree,
    eval_point,
    eval_symbolic,
    inline,
    size_metrics,
)
from symips.errors import BudgetExceededError, MalformedInputError

X = Variable("x", (0,))
X1, X2 = Variable("x", (1,)), Variable("x", (2,))
Y1, Y2 = Variable("y", (1,)), Variable("y", (2,))


def test_add_input_and_constant():
    b = CircuitBuilder(QQ)
    out = b.add(b.inp(X), b.const(-1))
    c = b.build([out])
    assert eval_symbolic(c) == Polynomial.var(QQ, X).sub(Polynomial.const(QQ, 1))


def test_square_of_sum():
    b = CircuitBuilder(QQ)
    s = b.add(b.inp(X1), b.inp(X2))
    c = b.build([b.mul(s, s)])
    got = eval_symbolic(c)
    want = Polynomial.from_terms(
        QQ,
        [
            (Monomial.of((X1, 2)), 1),
            (Monomial.of(X1, X2), 2),
            (Monomial.of((X2, 2)), 1),
        ],
    )
    assert got == want


def test_counterexample_certificate_polynomial():
    ys = [Variable("yeq", (i,)) for i in (1, 4, 6)]
    b = CircuitBuilder(GF2)
    c = b.build([b.add_all(b.inp(y) for y in ys)])
    got = eval_symbolic(c)
    assert got == Polynomial.from_terms(GF2, [(Monomial.of(y), 1) for y in ys])


class TestEvalPoint:
    def test_root_of_linear(self):
        b = CircuitBuilder(QQ)
        out = b.add(b.inp(X), b.const(-1))
        c = b.build([out])
        assert eval_point(c, {X: 1})[out] == 0

    def test_boolean_axiom_roots(self):
        b = CircuitBuilder(QQ)
        out = b.add(b.mul(b.inp(X), b.inp(X)), b.mul(b.const(-1), b.inp(X)))
        c = b.build([out])
        for v in (0, 1):
            assert eval_point(c, {X: v})[out] == 0

    def test_symmetric_sum_at_ones(self):
        vs = [Variable("x", (i,)) for i in range(3)]
        b = CircuitBuilder(QQ)
        out = b.poly_sum(elementary_symmetric(3, 2, vs))
        c = b.build([out])
        # 3 = number of 2-subsets of a 3-set, by direct enumeration
        assert eval_point(c, {v: 1 for v in vs})[out] == 3

    def test_missing_assignment(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.inp(X)])
        with pytest.raises(KeyError):
            eval_point(c, {})


class TestDegree:
    def test_square_exact_and_structural(self):
        b = CircuitBuilder(QQ)
        out = b.mul(b.inp(X), b.inp(X))
        c = b.build([out])
        assert degree(c, "exact").max == 2
        assert degree(c, "structural").max == 2

    def test_cancellation_gap(self):
        b = CircuitBuilder(QQ)
        sq = b.mul(b.inp(X), b.inp(X))
        out = b.add(sq, b.mul(b.const(-1), sq))
        c = b.build([out])
        rep = degree(c, "exact")
        assert rep.per_gate[c.outputs[0]] is None
        struct = degree(c, "structural")
        assert struct.per_gate[c.outputs[0]] == 2

    def test_structural_dominates_exact_gatewise(self):
        rng = random.Random(7)
        for _ in range(20):
            c = _random_circuit(rng, QQ)
            ex = degree(c, "exact").per_gate
            stp = degree(c, "structural").per_gate
            for gid, d in ex.items():
                if d is not None:
                    assert stp[gid] is not None and stp[gid] >= d


def _random_circuit(rng: random.Random, field) -> Circuit:
    b = CircuitBuilder(field)
    pool = [b.inp(Variable("x", (i,))) for i in range(3)]
    pool.append(b.const(field.coerce(rng.randint(-2, 2))))
    for _ in range(rng.randint(1, 6)):
        k = rng.randint(2, 3)
        args = [rng.choice(pool) for _ in range(k)]
        pool.append(b.add(*args) if rng.random() < 0.5 else b.mul(*args))
    return b.build([pool[-1]])


def test_eval_point_agrees_with_symbolic_evaluation():
    rng = random.Random(11)
    for _ in range(25):
        c = _random_circuit(rng, QQ)
        point = {Variable("x", (i,)): Fraction(rng.randint(-3, 3)) for i in range(3)}
        sym = eval_symbolic(c)
        direct = eval_point(c, point)[c.outputs[0]]
        assert sym.evaluate(point) == direct


class TestYLinear:
    def test_linear_certificate(self):
        b = CircuitBuilder(QQ)
        out = b.mul(b.inp(Y1), b.add(b.inp(X1), b.inp(X2)))
        c = b.build([out])
        assert check_y_linear(c, [Y1, Y2])

    def test_selector_degree_two(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.mul(b.inp(Y1), b.inp(Y2))])
        assert not check_y_linear(c, [Y1, Y2])

    def test_constant_is_not_linear(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.const(1)])
        assert not check_y_linear(c, [Y1, Y2])


class TestSkew:
    def test_input_times_internal(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.mul(b.inp(X), b.add(b.inp(X), b.inp(Y1)))])
        assert check_skew(c)

    def test_internal_times_internal(self):
        b = CircuitBuilder(QQ)
        s = b.add(b.inp(X), b.inp(Y1))
        c = b.build([b.mul(s, s)])
        assert not check_skew(c)

    def test_no_multiplications_is_vacuous(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.add(b.inp(X), b.inp(Y1))])
        assert check_skew(c)

    def test_skew_multiplications_grow_degree_by_at_most_one(self):
        from symips.instances import gen_subset_sum
        from symips.constructions import build_subsetsum
        from symips.pc import skewize
        from symips.algebra import QQ as FQ

        inst = gen_subset_sum(3, FQ, 4)
        cert = build_subsetsum(inst)
        skew = skewize(inst, cert, k=cert.claims.exact_degree)
        assert check_skew(skew.circuit)
        per = degree(skew.circuit, "structural").per_gate
        for i, g in enumerate(skew.circuit.gates):
            if g.label != "mul":
                continue
            internal = [per[ch] for ch in g.children if not skew.circuit.gates[ch].is_input()]
            bound = 1 + max(internal) if internal else 2
            assert per[i] is None or per[i] <= bound


class TestInline:
    def _boolean_circuit(self):
        b = CircuitBuilder(QQ)
        out = b.add(b.mul(b.inp(X), b.inp(X)), b.mul(b.const(-1), b.inp(X)))
        return b.build([out])

    def test_boolean_image(self):
        b = CircuitBuilder(QQ)
        host = b.build([b.add(b.inp(Y1), b.const(1))])
        inlined = inline(host, {Y1: self._boolean_circuit()})
        want = Polynomial.from_terms(
            QQ, [(Monomial.of((X, 2)), 1), (Monomial.of(X), -1), (Monomial.one(), 1)]
        )
        assert eval_symbolic(inlined) == want
        assert inlined.witnesses_dropped

    def test_empty_sigma_preserves_semantics(self):
        b = CircuitBuilder(QQ)
        host = b.build([b.mul(b.inp(X1), b.add(b.inp(X1), b.inp(X2)))])
        assert eval_symbolic(inline(host, {})) == eval_symbolic(host)

    def test_matches_polynomial_substitution_oracle(self):
        rng = random.Random(23)
        for _ in range(15):
            host = _random_circuit(rng, QQ)
            sub = _random_circuit(rng, QQ)
            target = Variable("x", (rng.randint(0, 2),))
            got = eval_symbolic(inline(host, {target: sub}))
            want = eval_symbolic(host).substitute({target: eval_symbolic(sub)})
            assert got == want

    def test_witnesses_recomputed_on_request(self):
        from symips.symmetry import VariablePermutation, verify_witness

        b = CircuitBuilder(QQ)
        host = b.build([b.add(b.inp(X1), b.inp(X2))])

        def square_circuit(v):
            bb = CircuitBuilder(QQ)
            return bb.build([bb.mul(bb.inp(v), bb.inp(v))])

        swap = VariablePermutation({X1: X2, X2: X1})
        out = inline(
            host,
            {X1: square_circuit(X1), X2: square_circuit(X2)},
            witness_renames={0: swap},
        )
        assert not out.witnesses_dropped
        assert verify_witness(out, swap, out.witnesses[0])


class TestSizeMetrics:
    def test_instance_size_floor(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.inp(X)])
        m = size_metrics(c, 5)
        assert m.gate_count == 1 and m.proof_size == 5 and m.min_convention == 1

    def test_gate_count_dominates(self):
        b = CircuitBuilder(QQ)
        g = b.inp(X)
        for i in range(99):
            g = b.add(g, b.const(i + 1))
        c = b.build([g])
        assert c.gate_count() == 199
        m = size_metrics(c, 5)
        assert m.proof_size == 199 and m.min_convention == 5


class TestValidation:
    def test_unreachable_gates_rejected(self):
        gates = (Gate("in", X, ()), Gate("in", Y1, ()))
        with pytest.raises(MalformedInputError):
            Circuit(field=QQ, gates=gates, outputs=(0,))

    def test_children_must_be_earlier(self):
        gates = (Gate("add", None, (1,)), Gate("in", X, ()))
        with pytest.raises(MalformedInputError):
            Circuit(field=QQ, gates=gates, outputs=(0, 1))

    def test_repeated_child_is_a_legal_multiset(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.mul(b.inp(X), b.inp(X))])
        mul_gate = c.gates[c.outputs[0]]
        assert mul_gate.children == (0, 0)

    def test_budget_exceeded_reported(self):
        b = CircuitBuilder(QQ)
        g = b.add(b.inp(X), b.const(1))
        for _ in range(8):
            g = b.mul(g, g)
        c = b.build([g])
        with pytest.raises(BudgetExceededError):
            eval_symbolic(c, budget=Budget(100))

    def test_hash_consing_shares_subcircuits(self):
        b = CircuitBuilder(QQ)
        a1 = b.add(b.inp(X1), b.inp(X2))
        a2 = b.add(b.inp(X2), b.inp(X1))
        assert a1 == a2

    def test_multiple_designated_outputs(self):
        b = CircuitBuilder(QQ)
        g1 = b.add(b.inp(X1), b.inp(X2))
        g2 = b.mul(g1, b.inp(X1))
        c = b.build([g1, g2])
        assert set(c.outputs) == {c.outputs[0], c.outputs[1]}
        with pytest.raises(ValueError):
            eval_symbolic(c)  # ambiguous: the output must be named
        p1 = eval_symbolic(c, c.outputs[0])
        p2 = eval_symbolic(c, c.outputs[1])
        assert p2 == p1.mul(Polynomial.var(QQ, X1))
