"""Orbits, group enumeration, induced actions, and circuit automorphisms."""

from __future__ import annotations

import pytest

from symips.algebra import GF2, QQ, Monomial, Polynomial, Variable
from symips.circuit import CircuitBuilder, eval_symbolic
from symips.errors import CapExceededError, InvarianceError
from symips.instances import cfi_x, gen_cfi, gen_php, k4
from symips.symmetry import (
    TRIVIAL_GROUP,
    GroupPresentation,
    VariablePermutation,
    check_invariance,
    cycle_space_generators,
    group_elements,
    index_permutation,
    induce_y_action,
    orbit,
    search_automorphism,
    verify_witness,
)

X1, X2, X3 = (Variable("x", (i,)) for i in (1, 2, 3))


def sym3() -> GroupPresentation:
    swap = VariablePermutation({X1: X2, X2: X1})
    cyc = VariablePermutation({X1: X2, X2: X3, X3: X1})
    return GroupPresentation((swap, cyc))


class TestOrbits:
    def test_trivial_group_singleton(self):
        assert orbit(TRIVIAL_GROUP, X1) == {X1}

    def test_sym3_orbit_of_variable(self):
        assert orbit(sym3(), X1) == {X1, X2, X3}

    def test_cfi_k4_monomial_orbit(self):
        inst = gen_cfi(k4(), a=1)
        e = inst.meta["edges"][0]
        m = Monomial.of(cfi_x(tuple(e), 0))
        # every K4 edge lies on a fundamental cycle, so the flip orbit has 2 points
        assert len(orbit(inst.group, m)) == 2

    def test_orbit_sizes_divide_group_order(self):
        for group, items in (
            (sym3(), [X1, Monomial.of(X1, X2), Monomial.of((X1, 2))]),
            (gen_cfi(k4(), a=1).group, [Monomial.of(cfi_x((0, 1), 0))]),
        ):
            order = len(group_elements(group))
            for item in items:
                assert order % len(orbit(group, item)) == 0


class TestGroupElements:
    def test_identity_only(self):
        g = GroupPresentation((VariablePermutation({}),))
        assert group_elements(g) == {VariablePermutation({})}

    def test_sym3_has_six_elements(self):
        assert len(group_elements(sym3())) == 6

    def test_cfi_k4_is_the_cycle_space(self):
        inst = gen_cfi(k4(), a=1)
        assert len(inst.group.generators) == 3  # |E| - |V| + 1
        assert len(group_elements(inst.group)) == 8

    def test_cap_exceeded(self):
        with pytest.raises(CapExceededError):
            group_elements(sym3(), cap=3)


class TestInduceYAction:
    def test_trivial_group_identity_on_selectors(self):
        f1 = Polynomial.var(QQ, X1)
        ind = induce_y_action(TRIVIAL_GROUP, [f1], [Variable("ya", (0,))])
        assert ind.generators == ()

    def test_swap_on_two_axioms(self):
        f1 = Polynomial.var(QQ, X1).sub(Polynomial.const(QQ, 1))
        f2 = Polynomial.var(QQ, X2).sub(Polynomial.const(QQ, 1))
        y1, y2 = Variable("ya", (1,)), Variable("ya", (2,))
        swap = VariablePermutation({X1: X2, X2: X1})
        ind = induce_y_action(GroupPresentation((swap,)), [f1, f2], [y1, y2])
        assert ind.generators[0](y1) == y2 and ind.generators[0](y2) == y1

    def test_cfi_selector_action_matches_index_shift(self):
        inst = gen_cfi(k4(), a=1)
        for gen, ind in zip(inst.group.generators, inst.induced_group.generators):
            flipped = {v.index[:-1] for v in gen.support()}
            for v in inst.meta["vertices"]:
                edges = sorted(
                    tuple(e) for e in inst.meta["edges"] if v in (e[0], e[1])
                )
                for (i, j, k) in [(0, 0, 0), (1, 0, 1)]:
                    src = Variable("yv", (v, i, j, k))
                    shift = [
                        (idx + (1 if e in flipped else 0)) % 2
                        for e, idx in zip(edges, (i, j, k))
                    ]
                    assert ind(src) == Variable("yv", (v, *shift))
            for e in map(tuple, inst.meta["edges"]):
                assert ind(Variable("ye", e)) == Variable("ye", e)
                want = Variable("yb", e + (1,)) if e in flipped else Variable("yb", e + (0,))
                assert ind(Variable("yb", e + (0,))) == want

    def test_non_invariant_axioms_reported(self):
        f1 = Polynomial.var(QQ, X1).sub(Polynomial.const(QQ, 1))
        swap = VariablePermutation({X1: X2, X2: X1})
        with pytest.raises(InvarianceError, match="generator 0"):
            induce_y_action(GroupPresentation((swap,)), [f1], [Variable("ya", (0,))])

    def test_duplicate_axioms_rejected(self):
        f1 = Polynomial.var(QQ, X1)
        with pytest.raises(InvarianceError, match="identical"):
            induce_y_action(
                TRIVIAL_GROUP, [f1, f1], [Variable("ya", (0,)), Variable("ya", (1,))]
            )

    def test_induced_images_resubstitute(self):
        inst = gen_php(2)
        for gen, ind in zip(inst.group.generators, inst.induced_group.generators):
            for i, (axiom, y) in enumerate(zip(inst.axioms, inst.yvars)):
                j = inst.yvars.index(ind(y))
                assert gen.apply_poly(axiom) == inst.axioms[j]


class TestInvariance:
    def test_trivial_group_always_invariant(self):
        assert check_invariance(TRIVIAL_GROUP, [Polynomial.var(QQ, X1)])

    def test_asymmetric_singleton(self):
        swap = VariablePermutation({X1: X2, X2: X1})
        f1 = Polynomial.var(QQ, X1).sub(Polynomial.const(QQ, 1))
        assert not check_invariance(GroupPresentation((swap,)), [f1])

    def test_pigeonhole_axioms_invariant(self):
        inst = gen_php(2)
        assert check_invariance(inst.group, inst.axioms)


class TestWitnesses:
    def test_identity_witness(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.add(b.inp(X1), b.inp(X2))])
        assert verify_witness(c, VariablePermutation({}), tuple(range(len(c.gates))))

    def test_swap_witness_on_sum(self):
        b = CircuitBuilder(QQ)
        g1, g2 = b.inp(X1), b.inp(X2)
        c = b.build([b.add(g1, g2)])
        swap = VariablePermutation({X1: X2, X2: X1})
        w = {g1: g2, g2: g1, c.outputs[0]: c.outputs[0]}
        assert verify_witness(c, swap, w)
        assert not verify_witness(c, swap, tuple(range(len(c.gates))))

    def test_asymmetric_use_blocks_extension(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.mul(b.inp(X1), b.add(b.inp(X1), b.inp(X2)))])
        swap = VariablePermutation({X1: X2, X2: X1})
        assert search_automorphism(c, swap) is None

    def test_witness_implies_polynomial_invariance(self):
        from symips.constructions import build_subsetsum
        from symips.instances import gen_subset_sum

        inst = gen_subset_sum(3, QQ, 4)
        cert = build_subsetsum(inst)
        poly = eval_symbolic(cert.circuit)
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])
            assert gen.apply_poly(poly) == poly


class TestAutomorphismSearch:
    def test_finds_swap_on_monomial_sum(self):
        b = CircuitBuilder(QQ)
        c = b.build([b.add(b.inp(X1), b.inp(X2))])
        swap = VariablePermutation({X1: X2, X2: X1})
        w = search_automorphism(c, swap)
        assert w is not None and verify_witness(c, swap, w)

    def test_finds_witnesses_on_product_symmetrization(self):
        from symips.constructions import Certificate, Claims, symmetrize_product
        from symips.instances import gen_counterexample_f2

        inst = gen_counterexample_f2()
        b = CircuitBuilder(GF2)
        out = b.add_all(b.inp(Variable("yeq", (i,))) for i in (1, 4, 6))
        cert = Certificate(b.build([out]), inst.name, Claims())
        sym = symmetrize_product(inst, cert)
        for gi, gen in enumerate(inst.induced_group.generators):
            found = search_automorphism(sym.circuit, gen)
            assert found is not None and verify_witness(sym.circuit, gen, found)
            assert verify_witness(sym.circuit, gen, sym.circuit.witnesses[gi])

    def test_broken_copy_has_no_witness(self):
        b = CircuitBuilder(QQ)
        t1 = b.mul(b.const(2), b.inp(X1))
        t2 = b.mul(b.const(3), b.inp(X2))
        c = b.build([b.add(t1, t2)])
        swap = VariablePermutation({X1: X2, X2: X1})
        assert search_automorphism(c, swap) is None

    def test_gate_cap_enforced(self):
        b = CircuitBuilder(QQ)
        g = b.inp(X1)
        for i in range(10):
            g = b.add(g, b.const(i))
        c = b.build([g])
        with pytest.raises(CapExceededError):
            search_automorphism(c, VariablePermutation({}), cap=5)


class TestCycleSpace:
    def test_tree_has_trivial_group(self):
        g = cycle_space_generators([0, 1, 2], [(0, 1), (1, 2)])
        assert g.generators == ()

    def test_triangle_flips_all_edges(self):
        g = cycle_space_generators([0, 1, 2], [(0, 1), (0, 2), (1, 2)])
        assert len(g.generators) == 1
        gen = g.generators[0]
        assert gen.support() == {
            Variable("x", (a, b, i)) for (a, b) in [(0, 1), (0, 2), (1, 2)] for i in (0, 1)
        }

    def test_k4_dimension_and_closure(self):
        g4 = k4()
        g = cycle_space_generators(g4.vertices, g4.edges)
        assert len(g.generators) == 3
        assert len(group_elements(g)) == 8

    def test_disconnected_rejected(self):
        with pytest.raises(InvarianceError):
            cycle_space_generators([0, 1, 2, 3], [(0, 1), (2, 3)])

    def test_generators_preserve_cfi_axioms(self):
        inst = gen_cfi(k4(), a=1)
        assert check_invariance(inst.group, inst.axioms)


def test_index_permutation_lifts_cycles():
    vs = [Variable("x", (i, j)) for i in (1, 2, 3) for j in (0, 1)]
    perm = index_permutation(vs, "x", 0, [(1, 2)])
    assert perm(Variable("x", (1, 0))) == Variable("x", (2, 0))
    assert perm(Variable("x", (3, 1))) == Variable("x", (3, 1))
