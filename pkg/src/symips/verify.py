"""The certificate judge: the two substitution conditions, symmetry, degree,
linearity, and a consolidated audit report.

Exact mode substitutes at the input gates and evaluates gate by gate, so a
pass is a proof of the polynomial identities.  The randomized mode evaluates
at uniform residues modulo a fresh 62-bit prime; it is one-sided and never
rejects a certificate that exact mode accepts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Polynomial
from .circuit import Budget, check_skew, check_y_linear, degree, eval_symbolic, size_metrics
from .constructions import Certificate
from .errors import BudgetExceededError, CapExceededError, MalformedInputError
from .instances import Instance
from .symmetry import SEARCH_CAP, search_automorphism, verify_witness

PASS, FAIL, PROBABLY = "pass", "fail", "probabilistic-pass"


@dataclass(frozen=True)
class SymmetryEntry:
    generator: int
    status: str      # pass / fail
    provenance: str  # stored / searched / failed / capped


@dataclass(frozen=True)
class AuditReport:
    instance: str
    zero_condition: str          # pass / fail / probabilistic-pass
    one_condition: str
    y_linear: bool | None = None
    skew: bool | None = None
    degree_mode: str | None = None
    degree_max: int | None = None
    symmetry: tuple[SymmetryEntry, ...] = ()
    gate_count: int = 0
    wire_count: int = 0
    instance_vars: int = 0
    proof_size: int = 0
    min_size_convention: int = 0
    pit_rounds: int = 0
    pit_seed: int | None = None
    pit_error_bound: str | None = None
    notes: tuple[str, ...] = ()

    def valid(self) -> bool:
        return self.zero_condition != FAIL and self.one_condition != FAIL

    def symmetry_ok(self) -> bool:
        return all(e.status == PASS for e in self.symmetry)

    def as_text(self) -> str:
        lines = [
            f"instance: {self.instance}",
            f"zero-condition: {self.zero_condition}",
            f"one-condition: {self.one_condition}",
        ]
        if self.y_linear is not None:
            lines.append(f"y-linear: {str(self.y_linear).lower()}")
        if self.skew is not None:
            lines.append(f"skew: {str(self.skew).lower()}")
        if self.degree_mode is not None:
            lines.append(f"degree-mode: {self.degree_mode}")
            lines.append(f"degree-max: {self.degree_max}")
        for e in self.symmetry:
            lines.append(
                f"symmetry-generator-{e.generator}: {e.status} ({e.provenance})"
            )
        lines.append(f"gate-count: {self.gate_count}")
        lines.append(f"wire-count: {self.wire_count}")
        lines.append(f"instance-vars: {self.instance_vars}")
        lines.append(f"proof-size: {self.proof_size}")
        lines.append(f"proof-size-min-convention: {self.min_size_convention}")
        if self.pit_rounds:
            lines.append(f"pit-rounds: {self.pit_rounds}")
            lines.append(f"pit-seed: {self.pit_seed}")
            lines.append(f"pit-error-bound: {self.pit_error_bound}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {
            "instance": self.instance,
            "zero_condition": self.zero_condition,
            "one_condition": self.one_condition,
            "y_linear": self.y_linear,
            "skew": self.skew,
            "degree_mode": self.degree_mode,
            "degree_max": self.degree_max,
            "symmetry": [
                {"generator": e.generator, "status": e.status, "provenance": e.provenance}
                for e in self.symmetry
            ],
            "gate_count": self.gate_count,
            "wire_count": self.wire_count,
            "instance_vars": self.instance_vars,
            "proof_size": self.proof_size,
            "min_size_convention": self.min_size_convention,
            "pit_rounds": self.pit_rounds,
            "pit_seed": self.pit_seed,
            "pit_error_bound": self.pit_error_bound,
            "notes": list(self.notes),
        }


def _fresh_prime(rng: random.Random) -> int:
    from .algebra import _is_prime

    while True:
        cand = rng.getrandbits(62) | (1 << 61) | 1
        if _is_prime(cand):
            return cand


def verify_certificate(
    inst: Instance,
    cert: Certificate,
    mode: str = "exact",
    rounds: int = 20,
    seed: int = 0,
    budget: Budget | None = None,
) -> AuditReport:
    """Check the two certificate conditions; exact mode is decisive.

    Randomized mode requires characteristic zero: axioms and certificate are
    evaluated at uniform residues modulo a fresh 62-bit prime for the given
    number of rounds.
    """
    circ = cert.circuit
    metrics = size_metrics(circ, len(inst.xvars) + len(inst.yvars))
    base = dict(
        instance=inst.name,
        gate_count=metrics.gate_count,
        wire_count=metrics.wire_count,
        instance_vars=metrics.instance_vars,
        proof_size=metrics.proof_size,
        min_size_convention=metrics.min_convention,
    )
    if mode == "exact":
        budget = budget or Budget()
        zero_ok = eval_symbolic(
            circ, budget=budget, leaf_subst=inst.zero_substitution()
        ).is_zero()
        one = Polynomial.const(inst.field, inst.field.one)
        one_ok = (
            eval_symbolic(circ, budget=budget, leaf_subst=inst.substitution()) == one
        )
        return AuditReport(
            zero_condition=PASS if zero_ok else FAIL,
            one_condition=PASS if one_ok else FAIL,
            **base,
        )
    if mode != "pit":
        raise MalformedInputError(f"unknown mode {mode!r}")
    if inst.field.kind != "Q":
        raise MalformedInputError(
            "randomized identity testing runs over characteristic zero only"
        )
    rng = random.Random(seed)
    p = _fresh_prime(rng)
    zero_ok = one_ok = True
    for _ in range(rounds):
        point = {v: rng.randrange(p) for v in inst.xvars}
        axiom_vals = {
            y: _eval_mod(a, point, p) for y, a in zip(inst.yvars, inst.axioms)
        }
        full = dict(point)
        full.update(axiom_vals)
        zeroed = dict(point)
        zeroed.update({y: 0 for y in inst.yvars})
        if _eval_circuit_mod(circ, zeroed, p) != 0:
            zero_ok = False
        if _eval_circuit_mod(circ, full, p) != 1:
            one_ok = False
    return AuditReport(
        zero_condition=PROBABLY if zero_ok else FAIL,
        one_condition=PROBABLY if one_ok else FAIL,
        pit_rounds=rounds,
        pit_seed=seed,
        pit_error_bound=f"1-(1/2)^{rounds}",
        **base,
    )


def _eval_mod(poly: Polynomial, point: dict, p: int) -> int:
    total = 0
    for m, c in poly.terms.items():
        frac = Fraction(c)
        val = frac.numerator * pow(frac.denominator, -1, p) % p
        for v, e in m.pairs:
            val = val * pow(point[v], e, p) % p
        total = (total + val) % p
    return total


def _eval_circuit_mod(circ, point: dict, p: int) -> int:
    vals: dict[int, int] = {}
    for i, g in enumerate(circ.gates):
        if g.label == "in":
            vals[i] = point[g.payload] % p
        elif g.label == "const":
            frac = Fraction(g.payload)
            vals[i] = frac.numerator * pow(frac.denominator, -1, p) % p
        elif g.label == "add":
            acc = 0
            for ch in g.children:
                acc = (acc + vals[ch]) % p
            vals[i] = acc
        else:
            acc = 1
            for ch in g.children:
                acc = acc * vals[ch] % p
            vals[i] = acc
    return vals[circ.outputs[0]]


def audit(
    inst: Instance,
    cert: Certificate,
    mode: str = "exact",
    rounds: int = 20,
    seed: int = 0,
    budget: Budget | None = None,
    analysis_budget_limit: int = 1_000_000,
    search_cap: int = SEARCH_CAP,
) -> AuditReport:
    """Consolidated report: conditions, linearity, skewness, degree, symmetry, sizes.

    The linearity and exact-degree probes run under their own (smaller)
    budget: those analyses expand the unsubstituted certificate, which for
    the deliberately non-linear constructions is exponentially larger than
    anything verification touches, and the report degrades gracefully to the
    structural bound.
    """
    report = verify_certificate(inst, cert, mode=mode, rounds=rounds, seed=seed, budget=budget)
    notes: list[str] = []
    try:
        ylin = check_y_linear(cert.circuit, inst.yvars, budget=Budget(analysis_budget_limit))
    except BudgetExceededError:
        ylin = None
        notes.append("y-linearity undecided within the expansion budget")
    skew = check_skew(cert.circuit)
    try:
        dr = degree(cert.circuit, "exact", budget=Budget(analysis_budget_limit))
        degree_mode, degree_max = dr.mode, dr.max
    except BudgetExceededError:
        dr = degree(cert.circuit, "structural")
        degree_mode, degree_max = dr.mode, dr.max
        notes.append("exact degree exceeded the expansion budget; structural bound reported")

    entries: list[SymmetryEntry] = []
    for gi, gen in enumerate(inst.induced_group.generators):
        stored = cert.circuit.witnesses.get(gi)
        if stored is not None and verify_witness(cert.circuit, gen, stored):
            entries.append(SymmetryEntry(gi, PASS, "stored"))
            continue
        try:
            found = search_automorphism(cert.circuit, gen, cap=search_cap)
        except CapExceededError:
            entries.append(SymmetryEntry(gi, FAIL, "capped"))
            continue
        if found is not None:
            entries.append(SymmetryEntry(gi, PASS, "searched"))
        else:
            entries.append(SymmetryEntry(gi, FAIL, "failed"))

    from dataclasses import replace

    return replace(
        report,
        y_linear=ylin,
        skew=skew,
        degree_mode=degree_mode,
        degree_max=degree_max,
        symmetry=tuple(entries),
        notes=tuple(notes),
    )
