"""Line-oriented workspace files: graphs, groups, instances, circuits,
certificates, proofs, and reports.

Every file starts with ``symips <kind> v<version>``.  Writers emit canonical
order (variables sorted, polynomial terms in graded lexicographic order), so
write-parse-write is byte identical.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import Coeff, FieldTag, Monomial, Polynomial, Variable, prime_field
from .circuit import CONST, IN, Circuit, Gate
from .constructions import Certificate, Claims
from .errors import MalformedInputError
from .instances import GraphInput, Instance, make_instance
from .pc import Ax, Bool, ExtensionAxiomSet, Lin, Mult, PcProof
from .symmetry import GroupPresentation, VariablePermutation, index_permutation

VERSION = 1

_VAR_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_-]*)\[([^\]]*)\]$")
_INT_RE = re.compile(r"^-?\d+$")


def _header(kind: str) -> str:
    return f"symips {kind} v{VERSION}"


def _check_header(lines: Sequence[str], kind: str) -> list[str]:
    if not lines or lines[0].strip() != _header(kind):
        raise MalformedInputError(f"expected a '{_header(kind)}' header")
    return [ln.rstrip("\n") for ln in lines[1:] if ln.strip()]


# --- variables and polynomials -------------------------------------------------


def format_variable(v: Variable) -> str:
    return str(v)


def parse_variable(text: str) -> Variable:
    m = _VAR_RE.match(text.strip())
    if not m:
        raise MalformedInputError(f"bad variable syntax: {text!r}")
    ns, inner = m.group(1), m.group(2)
    if inner == "":
        return Variable(ns, ())
    parts = tuple(
        int(p) if _INT_RE.match(p) else p for p in (s.strip() for s in inner.split(","))
    )
    return Variable(ns, parts)


def format_coeff(field: FieldTag, c: Coeff) -> str:
    return field.format_coeff(c)


def parse_coeff(field: FieldTag, text: str) -> Coeff:
    text = text.strip()
    if field.kind == "Fp":
        m = re.match(r"^\((-?\d+) mod (\d+)\)$", text)
        if m:
            if int(m.group(2)) != field.characteristic:
                raise MalformedInputError(f"coefficient modulus mismatch in {text!r}")
            return field.coerce(int(m.group(1)))
        if _INT_RE.match(text):
            return field.coerce(int(text))
        raise MalformedInputError(f"bad coefficient: {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInputError(f"bad coefficient: {text!r}") from exc


def format_polynomial(p: Polynomial) -> str:
    return str(p)


def parse_polynomial(field: FieldTag, text: str) -> Polynomial:
    text = text.strip()
    if text == "0":
        return Polynomial.zero(field)
    terms: list[tuple[Monomial, Coeff]] = []
    for chunk in text.split(" + "):
        factors = chunk.split(" * ")
        coeff = parse_coeff(field, factors[0])
        pairs: list[tuple[Variable, int]] = []
        for fac in factors[1:]:
            if "^" in fac:
                vtxt, etxt = fac.rsplit("^", 1)
                pairs.append((parse_variable(vtxt), int(etxt)))
            else:
                pairs.append((parse_variable(fac), 1))
        terms.append((Monomial.of(*pairs), coeff))
    return Polynomial.from_terms(field, terms)


def format_field(field: FieldTag) -> str:
    return "Q" if field.kind == "Q" else f"F {field.characteristic}"


def parse_field(text: str) -> FieldTag:
    parts = text.split()
    if parts == ["Q"]:
        return FieldTag("Q")
    if len(parts) == 2 and parts[0] == "F" and _INT_RE.match(parts[1]):
        return prime_field(int(parts[1]))
    raise MalformedInputError(f"bad field: {text!r}")


# --- graphs ----------------------------------------------------------------------


def dump_graph(g: GraphInput) -> str:
    out = [_header("graph")]
    for v in g.vertices:
        out.append(f"vertex {v}")
    for e in g.edges:
        out.append("edge " + " ".join(str(p) for p in e[:2]))
    for v, c in sorted(g.vertex_colours.items(), key=lambda t: str(t)):
        out.append(f"colour vertex {v} {c}")
    for e, c in sorted(g.edge_colours.items(), key=lambda t: str(t)):
        out.append(f"colour edge {e[0]} {e[1]} {c}")
    return "\n".join(out) + "\n"


def _parse_label(tok: str):
    return int(tok) if _INT_RE.match(tok) else tok


def load_graph(text: str) -> GraphInput:
    lines = _check_header(text.splitlines(), "graph")
    vertices: list = []
    edges: list[tuple] = []
    vcol: dict = {}
    ecol: dict = {}
    for ln in lines:
        toks = ln.split()
        if toks[0] == "vertex" and len(toks) == 2:
            vertices.append(_parse_label(toks[1]))
        elif toks[0] == "edge" and len(toks) == 3:
            edges.append((_parse_label(toks[1]), _parse_label(toks[2])))
        elif toks[:2] == ["colour", "vertex"] and len(toks) == 4:
            vcol[_parse_label(toks[2])] = toks[3]
        elif toks[:2] == ["colour", "edge"] and len(toks) == 5:
            ecol[tuple(sorted((_parse_label(toks[2]), _parse_label(toks[3]))))] = toks[4]
        else:
            raise MalformedInputError(f"bad graph line: {ln!r}")
    return GraphInput.make(vertices, edges, vertex_colours=vcol, edge_colours=ecol)


# --- groups ----------------------------------------------------------------------


def dump_group(group: GroupPresentation) -> str:
    out = [_header("group")]
    for gen in group.generators:
        out.append("generator")
        for v, w in sorted(gen.mapping.items(), key=lambda t: t[0].sort_key()):
            out.append(f"{v} -> {w}")
        out.append("end")
    return "\n".join(out) + "\n"


def load_group(text: str, variables: Iterable[Variable] = ()) -> GroupPresentation:
    """Parse generators; index-perm lines are lifted over the given variables."""
    lines = _check_header(text.splitlines(), "group")
    variables = list(variables)
    gens: list[VariablePermutation] = []
    cur: dict[Variable, Variable] | None = None
    cur_perm: VariablePermutation | None = None
    for ln in lines:
        if ln == "generator":
            if cur is not None:
                raise MalformedInputError("nested generator block")
            cur = {}
            cur_perm = None
        elif ln == "end":
            if cur is None:
                raise MalformedInputError("end outside a generator block")
            perm = VariablePermutation(cur)
            if cur_perm is not None:
                perm = cur_perm.compose(perm)
            gens.append(perm)
            cur = None
        elif cur is not None and ln.startswith("index-perm "):
            toks = ln.split(maxsplit=3)
            if len(toks) != 4:
                raise MalformedInputError(f"bad index-perm line: {ln!r}")
            ns, pos, cycles_txt = toks[1], int(toks[2]), toks[3]
            cycles = [
                [_parse_label(t) for t in body.replace(",", " ").split()]
                for body in re.findall(r"\(([^)]*)\)", cycles_txt)
            ]
            lifted = index_permutation(variables, ns, pos, cycles)
            cur_perm = lifted if cur_perm is None else cur_perm.compose(lifted)
        elif cur is not None and " -> " in ln:
            left, right = ln.split(" -> ")
            cur[parse_variable(left)] = parse_variable(right)
        else:
            raise MalformedInputError(f"bad group line: {ln!r}")
    if cur is not None:
        raise MalformedInputError("unterminated generator block")
    return GroupPresentation(tuple(gens))


# --- instances -------------------------------------------------------------------


def dump_instance(inst: Instance) -> str:
    out = [_header("instance")]
    out.append(f"name {inst.name}")
    out.append(f"field {format_field(inst.field)}")
    for k in sorted(inst.meta):
        out.append(f"meta {k} {json.dumps(inst.meta[k])}")
    for v in inst.xvars:
        out.append(f"xvar {v}")
    for p, y in zip(inst.axioms, inst.yvars):
        out.append(f"axiom {format_polynomial(p)} ; {y}")
    for gen in inst.group.generators:
        out.append("generator")
        for v, w in sorted(gen.mapping.items(), key=lambda t: t[0].sort_key()):
            out.append(f"{v} -> {w}")
        out.append("end")
    return "\n".join(out) + "\n"


def load_instance(text: str) -> Instance:
    lines = _check_header(text.splitlines(), "instance")
    name = "unnamed"
    field: FieldTag | None = None
    meta: dict = {}
    xvars: list[Variable] = []
    axioms: list[tuple[Polynomial, Variable]] = []
    gens: list[VariablePermutation] = []
    cur: dict[Variable, Variable] | None = None
    for ln in lines:
        if cur is not None:
            if ln == "end":
                gens.append(VariablePermutation(cur))
                cur = None
            elif " -> " in ln:
                left, right = ln.split(" -> ")
                cur[parse_variable(left)] = parse_variable(right)
            else:
                raise MalformedInputError(f"bad generator line: {ln!r}")
            continue
        if ln.startswith("name "):
            name = ln[5:].strip()
        elif ln.startswith("field "):
            field = parse_field(ln[6:])
        elif ln.startswith("meta "):
            _, k, v = ln.split(maxsplit=2)
            meta[k] = json.loads(v)
        elif ln.startswith("xvar "):
            xvars.append(parse_variable(ln[5:]))
        elif ln.startswith("axiom "):
            if field is None:
                raise MalformedInputError("axiom before field declaration")
            body, ytxt = ln[6:].rsplit(" ; ", 1)
            axioms.append((parse_polynomial(field, body), parse_variable(ytxt)))
        elif ln == "generator":
            cur = {}
        else:
            raise MalformedInputError(f"bad instance line: {ln!r}")
    if field is None:
        raise MalformedInputError("missing field declaration")
    return make_instance(
        name, field, xvars, axioms, GroupPresentation(tuple(gens)), meta
    )


# --- circuits and certificates ------------------------------------------------------


def dump_circuit(c: Circuit, kind: str = "circuit", trailer: list[str] | None = None) -> str:
    out = [_header(kind)]
    out.append(f"field {format_field(c.field)}")
    for v in sorted(c.input_variables(), key=lambda t: t.sort_key()):
        out.append(f"var {v}")
    for i, g in enumerate(c.gates):
        if g.label == IN:
            out.append(f"gate {i} in {g.payload}")
        elif g.label == CONST:
            out.append(f"gate {i} const {format_coeff(c.field, g.payload)}")
        else:
            out.append(f"gate {i} {g.label} " + " ".join(map(str, g.children)))
    out.append("outputs " + " ".join(map(str, c.outputs)))
    for gid in sorted(c.witnesses):
        pairs = " ".join(f"{i}:{img}" for i, img in enumerate(c.witnesses[gid]))
        out.append(f"witness {gid} {pairs}")
    out.extend(trailer or [])
    return "\n".join(out) + "\n"


def _parse_circuit_lines(
    lines: list[str], kind: str
) -> tuple[Circuit, list[str]]:
    field: FieldTag | None = None
    gates: list[Gate] = []
    outputs: tuple[int, ...] = ()
    witnesses: dict[int, tuple[int, ...]] = {}
    rest: list[str] = []
    for ln in lines:
        toks = ln.split()
        if toks[0] == "field":
            field = parse_field(ln[6:])
        elif toks[0] == "var":
            parse_variable(toks[1])  # declaration only; validated for syntax
        elif toks[0] == "gate":
            if field is None:
                raise MalformedInputError("gate before field declaration")
            gid = int(toks[1])
            if gid != len(gates):
                raise MalformedInputError(f"gate ids must be consecutive ({ln!r})")
            label = toks[2]
            if label == "in":
                gates.append(Gate(IN, parse_variable(toks[3]), ()))
            elif label == "const":
                gates.append(Gate(CONST, parse_coeff(field, " ".join(toks[3:])), ()))
            elif label in ("add", "mul"):
                gates.append(
                    Gate(label, None, tuple(sorted(int(t) for t in toks[3:])))
                )
            else:
                raise MalformedInputError(f"bad gate label: {ln!r}")
        elif toks[0] == "outputs":
            outputs = tuple(int(t) for t in toks[1:])
        elif toks[0] == "witness":
            gid = int(toks[1])
            mapping = dict(
                (int(a), int(b)) for a, b in (pair.split(":") for pair in toks[2:])
            )
            witnesses[gid] = tuple(mapping[i] for i in range(len(mapping)))
        else:
            rest.append(ln)
    if field is None:
        raise MalformedInputError("missing field declaration")
    return (
        Circuit(field=field, gates=tuple(gates), outputs=outputs, witnesses=witnesses),
        rest,
    )


def load_circuit(text: str) -> Circuit:
    lines = _check_header(text.splitlines(), "circuit")
    circuit, rest = _parse_circuit_lines(lines, "circuit")
    if rest:
        raise MalformedInputError(f"unexpected line: {rest[0]!r}")
    return circuit


def dump_certificate(cert: Certificate) -> str:
    cl = cert.claims
    claim_parts = []
    if cl.y_linear is not None:
        claim_parts.append(f"linear={str(cl.y_linear).lower()}")
    if cl.exact_degree is not None:
        claim_parts.append(f"degree={cl.exact_degree}")
    if cl.group is not None:
        claim_parts.append(f"group={cl.group}")
    trailer = []
    if claim_parts:
        trailer.append("claims " + " ".join(claim_parts))
    for n in cl.notes:
        trailer.append(f"note {n}")
    trailer.append(f"instance {cert.instance_name}")
    return dump_circuit(cert.circuit, "certificate", trailer)


def load_certificate(text: str) -> Certificate:
    lines = _check_header(text.splitlines(), "certificate")
    circuit, rest = _parse_circuit_lines(lines, "certificate")
    y_linear = None
    degree = None
    group = None
    notes: list[str] = []
    instance_name = "unknown"
    for ln in rest:
        if ln.startswith("claims "):
            for part in ln[7:].split():
                k, v = part.split("=", 1)
                if k == "linear":
                    y_linear = v == "true"
                elif k == "degree":
                    degree = int(v)
                elif k == "group":
                    group = v
        elif ln.startswith("note "):
            notes.append(ln[5:])
        elif ln.startswith("instance "):
            instance_name = ln[9:].strip()
        else:
            raise MalformedInputError(f"bad certificate line: {ln!r}")
    return Certificate(
        circuit=circuit,
        instance_name=instance_name,
        claims=Claims(
            y_linear=y_linear, exact_degree=degree, group=group, notes=tuple(notes)
        ),
    )


# --- proofs ----------------------------------------------------------------------


def dump_pcproof(field: FieldTag, proof: PcProof, extensions: ExtensionAxiomSet | None = None) -> str:
    out = [_header("pcproof")]
    out.append(f"field {format_field(field)}")
    if extensions is not None:
        for ci, cls in enumerate(extensions.classes):
            for i in cls:
                v, d = extensions.entries[i]
                out.append(f"ext {v} := {format_polynomial(d)} ; class {ci}")
    for p, just in proof.lines:
        if isinstance(just, Ax):
            rule = f"axiom {just.index}"
        elif isinstance(just, Bool):
            rule = f"boolean {just.var}"
        elif isinstance(just, Mult):
            rule = f"mult {just.line} {just.var}"
        else:
            ca = _plain_coeff(field, just.coeff_a)
            cb = _plain_coeff(field, just.coeff_b)
            rule = f"lincomb {just.line_a} {just.line_b} {ca} {cb}"
        out.append(f"line {format_polynomial(p)} ; {rule}")
    return "\n".join(out) + "\n"


def _plain_coeff(field: FieldTag, c: Coeff) -> str:
    if field.kind == "Fp":
        return str(c)
    frac = Fraction(c)
    return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"


def _parse_plain_coeff(field: FieldTag, text: str) -> Coeff:
    return field.coerce(int(text)) if field.kind == "Fp" else Fraction(text)


def load_pcproof(text: str) -> tuple[FieldTag, PcProof, ExtensionAxiomSet | None]:
    lines = _check_header(text.splitlines(), "pcproof")
    field: FieldTag | None = None
    proof_lines: list[tuple[Polynomial, object]] = []
    ext_entries: list[tuple[Variable, Polynomial]] = []
    ext_classes: dict[int, list[int]] = {}
    for ln in lines:
        if ln.startswith("field "):
            field = parse_field(ln[6:])
        elif ln.startswith("ext "):
            if field is None:
                raise MalformedInputError("ext before field declaration")
            body, cls_txt = ln[4:].rsplit(" ; class ", 1)
            vtxt, dtxt = body.split(" := ", 1)
            idx = len(ext_entries)
            ext_entries.append((parse_variable(vtxt), parse_polynomial(field, dtxt)))
            ext_classes.setdefault(int(cls_txt), []).append(idx)
        elif ln.startswith("line "):
            if field is None:
                raise MalformedInputError("line before field declaration")
            body, rule = ln[5:].rsplit(" ; ", 1)
            poly = parse_polynomial(field, body)
            toks = rule.split()
            if toks[0] == "axiom":
                just = Ax(int(toks[1]))
            elif toks[0] == "boolean":
                just = Bool(parse_variable(toks[1]))
            elif toks[0] == "mult":
                just = Mult(int(toks[1]), parse_variable(toks[2]))
            elif toks[0] == "lincomb":
                just = Lin(
                    int(toks[1]),
                    int(toks[2]),
                    _parse_plain_coeff(field, toks[3]),
                    _parse_plain_coeff(field, toks[4]),
                )
            else:
                raise MalformedInputError(f"bad rule: {rule!r}")
            proof_lines.append((poly, just))
        else:
            raise MalformedInputError(f"bad proof line: {ln!r}")
    if field is None:
        raise MalformedInputError("missing field declaration")
    proof = PcProof(tuple(proof_lines))
    ext = None
    if ext_entries:
        classes = tuple(
            tuple(ext_classes[k]) for k in sorted(ext_classes)
        )
        ext = ExtensionAxiomSet(tuple(ext_entries), classes)
    return field, proof, ext
