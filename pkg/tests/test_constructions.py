"""Certificate builders checked against independent enumeration oracles."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from symips.algebra import GF2, QQ, Monomial, Polynomial, Variable, prime_field
from symips.circuit import CircuitBuilder, check_y_linear, eval_symbolic
from symips.constructions import (
    Certificate,
    Claims,
    build_cfi_linear,
    build_cfi_mu,
    build_cfi_mu_with_levels,
    build_php,
    build_subsetsum,
    php_injection_polynomial,
    symmetrize_average,
    symmetrize_product,
)
from symips.instances import (
    boolean_axiom,
    cfi_x,
    gen_cfi,
    gen_counterexample_f2,
    gen_php,
    gen_subset_sum,
    k4,
    make_instance,
    prism,
)
from symips.pc import pc_search_bounded_degree, pc_to_ipslin
from symips.symmetry import (
    GroupPresentation,
    VariablePermutation,
    group_elements,
    search_automorphism,
    verify_witness,
)
from symips.verify import verify_certificate

X1, X2 = Variable("x", (1,)), Variable("x", (2,))
ONE_GF2 = Polynomial.const(GF2, 1)


def _edge_assignments(edges):
    for bits in itertools.product((0, 1), repeat=len(edges)):
        yield dict(zip(edges, bits))


def _satisfied_vertices(inst, lam):
    out = set()
    for v in inst.meta["vertices"]:
        incident = [tuple(e) for e in inst.meta["edges"] if v in (e[0], e[1])]
        charge = inst.meta["a"] if v == inst.meta["u"] else 0
        if sum(lam[e] for e in incident) % 2 == charge:
            out.add(v)
    return out


class TestProductSymmetrization:
    def _hand_cert(self, inst):
        b = CircuitBuilder(GF2)
        out = b.add_all(b.inp(Variable("yeq", (i,))) for i in (1, 4, 6))
        return Certificate(b.build([out]), inst.name, Claims())

    def test_trivial_group_preserves_semantics(self):
        inst = make_instance(
            "single",
            QQ,
            [X1],
            [
                (Polynomial.var(QQ, X1), Variable("ya", (0,))),
                (Polynomial.var(QQ, X1).sub(Polynomial.const(QQ, 1)), Variable("ya", (1,))),
            ],
        )
        b = CircuitBuilder(QQ)
        out = b.add(b.inp(Variable("ya", (0,))), b.scaled(-1, b.inp(Variable("ya", (1,)))))
        cert = Certificate(b.build([out]), inst.name, Claims())
        sym = symmetrize_product(inst, cert)
        assert eval_symbolic(sym.circuit) == eval_symbolic(cert.circuit)

    def test_counterexample_product_of_four_images(self):
        inst = gen_counterexample_f2()
        cert = self._hand_cert(inst)
        sym = symmetrize_product(inst, cert)
        rep = verify_certificate(inst, sym)
        assert rep.valid()
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(sym.circuit, gen, sym.circuit.witnesses[gi])

    def test_output_polynomial_is_fixed_by_every_generator(self):
        inst = gen_counterexample_f2()
        sym = symmetrize_product(inst, self._hand_cert(inst))
        poly = eval_symbolic(sym.circuit)
        for gen in inst.induced_group.generators:
            assert gen.apply_poly(poly) == poly

    def test_gate_count_formula(self):
        inst = gen_counterexample_f2()
        cert = self._hand_cert(inst)
        sym = symmetrize_product(inst, cert)
        n_elems = len(group_elements(inst.induced_group))
        internal = sum(1 for g in cert.circuit.gates if not g.is_input())
        shared_inputs = len(
            {gen(v) for v in cert.circuit.input_variables()
             for gen in group_elements(inst.induced_group)}
        )
        n_consts = len({g.payload for g in cert.circuit.gates if g.label == "const"})
        assert sym.circuit.gate_count() == n_elems * internal + shared_inputs + n_consts + 1


class TestAverageSymmetrization:
    def test_symmetric_input_is_a_fixed_point(self):
        inst = gen_subset_sum(2, QQ, 3)
        cert = build_subsetsum(inst)
        avg = symmetrize_average(inst, cert)
        assert eval_symbolic(avg.circuit) == eval_symbolic(cert.circuit)

    def test_average_commutes_with_generators(self):
        inst = gen_subset_sum(3, QQ, 4)
        proof = pc_search_bounded_degree(inst, 3)
        cert = pc_to_ipslin(inst, proof)
        avg_poly = eval_symbolic(symmetrize_average(inst, cert).circuit)
        for gen in inst.induced_group.generators:
            moved = Certificate(
                _poly_circuit(inst.field, gen.apply_poly(eval_symbolic(cert.circuit))),
                inst.name,
                Claims(),
            )
            assert eval_symbolic(symmetrize_average(inst, moved).circuit) == avg_poly

    def test_asymmetric_search_certificate_becomes_symmetric(self):
        inst = _swap_pair_instance(QQ)
        proof = pc_search_bounded_degree(inst, 2)
        cert = pc_to_ipslin(inst, proof)
        cert = _skew_by_selector_trade(inst, cert)
        base_poly = eval_symbolic(cert.circuit)
        swapped = inst.induced_group.generators[0].apply_poly(base_poly)
        assert swapped != base_poly  # genuinely asymmetric input
        avg = symmetrize_average(inst, cert)
        rep = verify_certificate(inst, avg)
        assert rep.valid()
        avg_poly = eval_symbolic(avg.circuit)
        for gen in inst.induced_group.generators:
            assert gen.apply_poly(avg_poly) == avg_poly
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(avg.circuit, gen, avg.circuit.witnesses[gi])
            found = search_automorphism(avg.circuit, gen)
            assert found is not None and verify_witness(avg.circuit, gen, found)

    def test_linearity_survives_averaging(self):
        inst = _swap_pair_instance(QQ)
        cert = _skew_by_selector_trade(
            inst, pc_to_ipslin(inst, pc_search_bounded_degree(inst, 2))
        )
        avg = symmetrize_average(inst, cert)
        assert check_y_linear(avg.circuit, inst.yvars)

    def test_gate_count_envelope(self):
        inst = _swap_pair_instance(QQ)
        cert = pc_to_ipslin(inst, pc_search_bounded_degree(inst, 2))
        k = eval_symbolic(cert.circuit).degree()
        avg = symmetrize_average(inst, cert)
        n_vars = len(inst.xvars) + len(inst.yvars)
        assert avg.circuit.gate_count() <= (n_vars + 1) ** k * 4

    def test_characteristic_dividing_group_order_rejected(self):
        from symips.errors import MalformedInputError
        from symips.pc import sym_linear_certificate_search
        from symips.symmetry import TRIVIAL_GROUP

        inst = gen_counterexample_f2()  # group of order 4 over characteristic 2
        cert = sym_linear_certificate_search(inst, group=TRIVIAL_GROUP, d=1)
        with pytest.raises(MalformedInputError):
            symmetrize_average(inst, cert)


def _poly_circuit(field, poly):
    b = CircuitBuilder(field)
    return b.build([b.poly_sum(poly)])


def _skew_by_selector_trade(inst, cert):
    """Add Bx1*(x2^2-x2) - Bx2*(x1^2-x1): zero under both substitutions, but
    antisymmetric under the swap, so the result is a valid asymmetric certificate."""
    f = inst.field
    poly = eval_symbolic(cert.circuit)
    trade = (
        Polynomial.var(f, Variable("Bx", (1,)))
        .mul(boolean_axiom(f, X2))
        .sub(Polynomial.var(f, Variable("Bx", (2,))).mul(boolean_axiom(f, X1)))
    )
    return Certificate(_poly_circuit(f, poly.add(trade)), inst.name, Claims())


def _swap_pair_instance(field):
    sum_ax = (
        Polynomial.var(field, X1)
        .add(Polynomial.var(field, X2))
        .sub(Polynomial.const(field, 2))
    )
    prod_ax = Polynomial(field, {Monomial.of(X1, X2): field.one})
    swap = VariablePermutation({X1: X2, X2: X1})
    return make_instance(
        "swap-pair",
        field,
        [X1, X2],
        [
            (sum_ax, Variable("ya", (0,))),
            (prod_ax, Variable("ya", (1,))),
            (boolean_axiom(field, X1), Variable("Bx", (1,))),
            (boolean_axiom(field, X2), Variable("Bx", (2,))),
        ],
        GroupPresentation((swap,)),
    )


class TestCfiMu:
    def test_k4_certificate_verifies_exactly(self):
        inst = gen_cfi(k4(), a=1)
        cert, levels = build_cfi_mu_with_levels(inst)
        rep = verify_certificate(inst, cert)
        assert rep.valid()
        assert levels[-1] == ONE_GF2

    def test_first_level_matches_local_target_for_nonspecial_vertex(self):
        # with the special vertex moved off the first position, the first
        # level is the sum over odd-parity index triples plus one
        inst = gen_cfi(k4(), u=2, a=1)
        _, levels = build_cfi_mu_with_levels(inst)
        v = inst.meta["vertices"][0]
        edges = sorted(tuple(e) for e in inst.meta["edges"] if v in (e[0], e[1]))
        want_terms = {}
        for (i, j, k) in itertools.product((0, 1), repeat=3):
            if (i + j + k) % 2 == 1:
                want_terms[
                    Monomial.of(cfi_x(edges[0], i), cfi_x(edges[1], j), cfi_x(edges[2], k))
                ] = 1
        want_terms[Monomial.one()] = 1
        assert levels[0] == Polynomial(GF2, want_terms)

    def test_levels_match_assignment_enumeration(self):
        # oracle: level i sums, over all assignments to the edges touching the
        # first i vertices, the monomials of those satisfying an even number
        # of the local parity equations, with squares on inner edges, plus 1
        inst = gen_cfi(k4(), a=1)
        _, levels = build_cfi_mu_with_levels(inst)
        vertices = inst.meta["vertices"]
        edges = [tuple(e) for e in inst.meta["edges"]]
        for i in (1, 2, 3):
            prefix = vertices[:i]
            e_i = sorted({e for e in edges for v in prefix if v in (e[0], e[1])})
            expected = {Monomial.one(): 1}
            for lam in _edge_assignments(e_i):
                sat = 0
                for v in prefix:
                    incident = [e for e in e_i if v in (e[0], e[1])]
                    charge = 1 if v == inst.meta["u"] else 0
                    if sum(lam[e] for e in incident) % 2 == charge:
                        sat += 1
                if sat % 2 == 0:
                    kappa = lambda e: sum(1 for v in prefix if v in (e[0], e[1]))
                    m = Monomial([(cfi_x(e, lam[e]), kappa(e)) for e in e_i])
                    expected[m] = (expected.get(m, 0) + 1) % 2
            assert levels[i - 1] == Polynomial(GF2, expected), i

    def test_not_selector_linear(self):
        inst = gen_cfi(k4(), a=1)
        cert = build_cfi_mu(inst)
        assert cert.claims.y_linear is False
        assert not check_y_linear(cert.circuit, inst.yvars)

    def test_witnesses_for_every_generator(self):
        inst = gen_cfi(prism(), a=1)
        cert = build_cfi_mu(inst)
        assert len(cert.circuit.witnesses) == len(inst.group.generators)
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])

    def test_untwisted_instance_rejected(self):
        from symips.errors import MalformedInputError

        with pytest.raises(MalformedInputError):
            build_cfi_mu(gen_cfi(k4(), a=0))


class TestCfiLinear:
    def test_k4_verifies_and_is_linear(self):
        inst = gen_cfi(k4(), a=1)
        cert = build_cfi_linear(inst)
        assert verify_certificate(inst, cert).valid()
        assert check_y_linear(cert.circuit, inst.yvars)

    def test_every_assignment_satisfies_some_vertex(self):
        inst = gen_cfi(k4(), a=1)
        edges = [tuple(e) for e in inst.meta["edges"]]
        for lam in _edge_assignments(edges):
            assert _satisfied_vertices(inst, lam)

    def test_orbit_blocks_partition_all_assignments(self):
        inst = gen_cfi(k4(), a=1)
        edges = [tuple(e) for e in inst.meta["edges"]]
        vertices = inst.meta["vertices"]
        counts = {v: 0 for v in vertices}
        total = 0
        for lam in _edge_assignments(edges):
            least = min(
                vertices.index(v) for v in _satisfied_vertices(inst, lam)
            )
            counts[vertices[least]] += 1
            total += 1
        assert total == 2 ** len(edges) == sum(counts.values())

    def test_telescoping_sum_expansion(self):
        inst = gen_cfi(k4(), a=1)
        edges = [tuple(e) for e in inst.meta["edges"]]
        b = CircuitBuilder(GF2)
        from symips.instances import cfi_ye

        terms = []
        for t in range(len(edges)):
            parts = [b.inp(cfi_ye(edges[t]))]
            if t > 0:
                parts.append(
                    b.mul_all(
                        b.add(b.inp(cfi_x(edges[s], 0)), b.inp(cfi_x(edges[s], 1)))
                        for s in range(t)
                    )
                )
            terms.append(b.mul_all(parts))
        tele = b.build([b.add_all(terms)])
        got = eval_symbolic(tele, leaf_subst=inst.substitution())
        expected = {Monomial.one(): 1}
        for lam in _edge_assignments(edges):
            m = Monomial([(cfi_x(e, lam[e]), 1) for e in edges])
            expected[m] = (expected.get(m, 0) + 1) % 2
        assert got == Polynomial(GF2, expected)

    def test_prism_verifies_with_witnesses(self):
        inst = gen_cfi(prism(), a=1)
        cert = build_cfi_linear(inst)
        assert verify_certificate(inst, cert).valid()
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])

    def test_bipartite_graph_exercises_both_builders(self):
        from symips.instances import GraphInput

        k33 = GraphInput.make(range(6), [(a, b) for a in (0, 1, 2) for b in (3, 4, 5)])
        inst = gen_cfi(k33, a=1)
        for cert in (build_cfi_mu(inst), build_cfi_linear(inst)):
            assert verify_certificate(inst, cert).valid()
            for gi, gen in enumerate(inst.induced_group.generators):
                assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])

    def test_gate_count_within_a_fixed_multiple_of_assignment_count(self):
        c_k4 = build_cfi_linear(gen_cfi(k4(), a=1)).circuit.gate_count() / 2 ** 6
        c_prism = build_cfi_linear(gen_cfi(prism(), a=1)).circuit.gate_count() / 2 ** 9
        assert max(c_k4, c_prism) <= 4.0


class TestSubsetSum:
    def test_explicit_multiplier_for_two_variables(self):
        inst = gen_subset_sum(2, QQ, 3)
        cert = build_subsetsum(inst)
        poly = eval_symbolic(cert.circuit)
        ysum = Variable("ysum", ())
        got_f = Polynomial(
            QQ,
            {
                m.divide(Monomial.of(ysum)): c
                for m, c in poly.terms.items()
                if m.exponent(ysum) == 1
            },
        )
        want_f = Polynomial.from_terms(
            QQ,
            [
                (Monomial.one(), Fraction(-1, 3)),
                (Monomial.of(X1), Fraction(-1, 6)),
                (Monomial.of(X2), Fraction(-1, 6)),
                (Monomial.of(X1, X2), Fraction(-1, 3)),
            ],
        )
        assert got_f == want_f

    def test_certificate_identity_explicit(self):
        inst = gen_subset_sum(2, QQ, 3)
        cert = build_subsetsum(inst)
        assert eval_symbolic(
            cert.circuit, leaf_subst=inst.substitution()
        ) == Polynomial.const(QQ, 1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_selector_linear_across_the_grid(self, n):
        inst = gen_subset_sum(n, QQ, n + 1)
        cert = build_subsetsum(inst)
        assert check_y_linear(cert.circuit, inst.yvars)

    def test_stabilizer_symmetry_of_coefficients(self):
        inst = gen_subset_sum(3, QQ, 4)
        cert = build_subsetsum(inst)
        poly = eval_symbolic(cert.circuit)
        b1 = Variable("Bx", (1,))
        p1 = Polynomial(
            QQ,
            {
                m.divide(Monomial.of(b1)): c
                for m, c in poly.terms.items()
                if m.exponent(b1) == 1
            },
        )
        stab = VariablePermutation({X2: Variable("x", (3,)), Variable("x", (3,)): X2})
        assert stab.apply_poly(p1) == p1

    @pytest.mark.parametrize("n", (2, 3, 4))
    def test_lifted_variant_verifies(self, n):
        inst = gen_subset_sum(n, QQ, n + 1, lifted=True)
        cert = build_subsetsum(inst)
        assert verify_certificate(inst, cert).valid()
        assert check_y_linear(cert.circuit, inst.yvars)
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])

    def test_prime_field_variant_verifies(self):
        inst = gen_subset_sum(3, prime_field(11), 5)
        cert = build_subsetsum(inst)
        assert verify_certificate(inst, cert).valid()


class TestPhp:
    def test_alpha_value_at_smallest_case(self):
        assert Fraction(1, math.comb(2, 1) * (2 - 1)) == Fraction(1, 2)
        inst = gen_php(1)
        cert = build_php(inst)
        assert verify_certificate(inst, cert).valid()

    @pytest.mark.parametrize("size", range(0, 5))
    def test_injection_sums_match_enumeration(self, size):
        inst = gen_php(3)
        holes = (1, 2, 3)
        D = tuple(range(1, size + 1))
        got = php_injection_polynomial(inst, D)
        expected_terms = {}
        for image in itertools.permutations(holes, len(D)):
            m = Monomial.of(*(Variable("x", (i, j)) for i, j in zip(D, image)))
            expected_terms[m] = Fraction(1)
        assert got == Polynomial(QQ, expected_terms)

    def test_hole_deleted_injection_sums(self):
        inst = gen_php(3)
        D = (1, 2)
        got = php_injection_polynomial(inst, D, holes=(1, 3))
        expected_terms = {}
        for image in itertools.permutations((1, 3), 2):
            m = Monomial.of(*(Variable("x", (i, j)) for i, j in zip(D, image)))
            expected_terms[m] = Fraction(1)
        assert got == Polynomial(QQ, expected_terms)

    @pytest.mark.parametrize("n", (2, 3, 4))
    def test_certificates_verify_exactly(self, n):
        inst = gen_php(n)
        cert = build_php(inst)
        assert verify_certificate(inst, cert).valid()
        assert check_y_linear(cert.circuit, inst.yvars)

    def test_witnesses_for_both_symmetric_groups(self):
        inst = gen_php(3)
        cert = build_php(inst)
        assert len(cert.circuit.witnesses) == 4
        for gi, gen in enumerate(inst.induced_group.generators):
            assert verify_witness(cert.circuit, gen, cert.circuit.witnesses[gi])

    def test_gate_count_envelope_is_stable(self):
        ratios = []
        for n in (2, 3, 4, 5):
            inst = gen_php(n)
            cert = build_php(inst)
            ratios.append(cert.circuit.gate_count() / (3 ** n * n))
        assert max(ratios) <= 2 * min(ratios)
