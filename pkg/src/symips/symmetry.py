"""Permutation groups acting on variables: orbits, induced actions, witnesses.

Groups are given by generators only.  Full enumeration is on demand and
capped, because symmetric-group actions would otherwise force factorial
blowups; orbit computations never need the full group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .algebra import Monomial, Polynomial, Variable
from .circuit import ADD, CONST, IN, MUL, Circuit
from .errors import CapExceededError, InvarianceError

GROUP_CAP = 1_000_000
SEARCH_CAP = 5_000


class VariablePermutation:
    """A bijection on a finite support of variables; identity elsewhere."""

    __slots__ = ("mapping", "_key")

    def __init__(self, mapping: dict[Variable, Variable]):
        mapping = {v: w for v, w in mapping.items() if v != w}
        if set(mapping.keys()) != set(mapping.values()):
            raise InvarianceError("mapping is not a bijection on its support")
        object.__setattr__(self, "mapping", mapping)
        object.__setattr__(
            self, "_key", frozenset(mapping.items())
        )

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("VariablePermutation is immutable")

    def __call__(self, v: Variable) -> Variable:
        return self.mapping.get(v, v)

    def __eq__(self, other) -> bool:
        return isinstance(other, VariablePermutation) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def is_identity(self) -> bool:
        return not self.mapping

    def support(self) -> set[Variable]:
        return set(self.mapping)

    def compose(self, other: "VariablePermutation") -> "VariablePermutation":
        """self after other: (self.compose(other))(v) == self(other(v))."""
        keys = set(self.mapping) | set(other.mapping)
        return VariablePermutation({v: self(other(v)) for v in keys})

    def inverse(self) -> "VariablePermutation":
        return VariablePermutation({w: v for v, w in self.mapping.items()})

    def extend(self, more: dict[Variable, Variable]) -> "VariablePermutation":
        overlap = set(more) & set(self.mapping)
        if overlap:
            raise InvarianceError(f"extension clashes on {sorted(overlap)[:3]}")
        merged = dict(self.mapping)
        merged.update(more)
        return VariablePermutation(merged)

    def apply_monomial(self, m: Monomial) -> Monomial:
        return m.rename(self)

    def apply_poly(self, p: Polynomial) -> Polynomial:
        return p.rename(self)

    def __str__(self) -> str:
        if not self.mapping:
            return "id"
        return ", ".join(
            f"{v} -> {w}" for v, w in sorted(self.mapping.items(), key=lambda t: t[0].sort_key())
        )

    __repr__ = __str__


IDENTITY = VariablePermutation({})


def index_permutation(
    variables: Iterable[Variable],
    namespace: str,
    position: int,
    cycles: Sequence[Sequence[object]],
) -> VariablePermutation:
    """Lift an index permutation (given in cycle notation) to variables.

    Every variable in the namespace whose index component at `position`
    appears in a cycle is mapped to the variable with that component advanced
    along its cycle.
    """
    nxt: dict[object, object] = {}
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            if a in nxt:
                raise InvarianceError(f"index {a} appears twice in cycles")
            nxt[a] = b
    mapping: dict[Variable, Variable] = {}
    for v in variables:
        if v.namespace != namespace or position >= len(v.index):
            continue
        part = v.index[position]
        if part in nxt:
            idx = list(v.index)
            idx[position] = nxt[part]
            mapping[v] = Variable(v.namespace, tuple(idx))
    return VariablePermutation(mapping)


@dataclass(frozen=True)
class GroupPresentation:
    """A permutation group given by its generators."""

    generators: tuple[VariablePermutation, ...] = ()
    order_hint: int | None = None

    def is_trivial(self) -> bool:
        return all(g.is_identity() for g in self.generators)

    def __iter__(self):
        return iter(self.generators)


TRIVIAL_GROUP = GroupPresentation(())


def orbit(group: GroupPresentation, item: Variable | Monomial, cap: int = GROUP_CAP) -> set:
    """BFS closure of item under the generators (exact orbit for finite groups)."""
    apply = (
        (lambda g, x: g(x))
        if isinstance(item, Variable)
        else (lambda g, x: g.apply_monomial(x))
    )
    seen = {item}
    frontier = [item]
    while frontier:
        nxt = []
        for x in frontier:
            for g in group.generators:
                y = apply(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceededError(f"orbit larger than cap {cap}")
        frontier = nxt
    return seen


def group_elements(group: GroupPresentation, cap: int = GROUP_CAP) -> set[VariablePermutation]:
    """Full group by closure of generator composition, or a cap error."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for p in frontier:
            for g in group.generators:
                q = g.compose(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > cap:
                        raise CapExceededError(f"group larger than cap {cap}")
        frontier = nxt
    return seen


def check_invariance(group: GroupPresentation, axioms: Sequence[Polynomial]) -> bool:
    """True iff every generator permutes the axiom multiset."""
    keys: dict = {}
    for p in axioms:
        k = p.key()
        keys[k] = keys.get(k, 0) + 1
    for g in group.generators:
        img: dict = {}
        for p in axioms:
            img_key = g.apply_poly(p).key()
            img[img_key] = img.get(img_key, 0) + 1
        if img != keys:
            return False
    return True


def induce_y_action(
    group: GroupPresentation,
    axioms: Sequence[Polynomial],
    yvars: Sequence[Variable],
) -> GroupPresentation:
    """Extend each generator to the axiom-selector variables: y_i -> y_j when
    the generator maps axiom i to axiom j."""
    if len(axioms) != len(yvars):
        raise InvarianceError("need exactly one selector variable per axiom")
    where: dict = {}
    for i, p in enumerate(axioms):
        k = p.key()
        if k in where:
            raise InvarianceError(f"axioms {where[k]} and {i} are identical")
        where[k] = i
    out = []
    for gi, g in enumerate(group.generators):
        ymap: dict[Variable, Variable] = {}
        for i, p in enumerate(axioms):
            k = g.apply_poly(p).key()
            j = where.get(k)
            if j is None:
                raise InvarianceError(
                    f"generator {gi} maps axiom {i} outside the axiom set"
                )
            if yvars[i] != yvars[j]:
                ymap[yvars[i]] = yvars[j]
        out.append(g.extend(ymap))
    return GroupPresentation(tuple(out), order_hint=group.order_hint)


# --- circuit automorphisms -----------------------------------------------------


def verify_witness(
    c: Circuit, gen: VariablePermutation, witness: Sequence[int] | dict[int, int]
) -> bool:
    """Check that a gate permutation is a label-preserving automorphism
    extending the generator on input gates and fixing the output set."""
    n = len(c.gates)
    if isinstance(witness, dict):
        if sorted(witness) != list(range(n)):
            return False
        w = [witness[i] for i in range(n)]
    else:
        w = list(witness)
    if len(w) != n or sorted(w) != list(range(n)):
        return False
    for i, g in enumerate(c.gates):
        h = c.gates[w[i]]
        if g.label != h.label:
            return False
        if g.label == IN:
            if h.payload != gen(g.payload):
                return False
        elif g.label == CONST:
            if h.payload != g.payload:
                return False
        else:
            if tuple(sorted(w[ch] for ch in g.children)) != h.children:
                return False
    return sorted(w[o] for o in c.outputs) == sorted(c.outputs)


def search_automorphism(
    c: Circuit, gen: VariablePermutation, cap: int = SEARCH_CAP
) -> dict[int, int] | None:
    """Backtracking search for a witness, guided by iterated structural hashing.

    Domain and image sides are refined jointly: input gates are coloured by
    their variable on the domain side and by the generator preimage of their
    variable on the image side, so gate i can map to gate j only when their
    stable colours coincide.  Returns a valid witness or None; the search is
    exhaustive, so None is definitive.  Raises above the gate cap.
    """
    n = len(c.gates)
    if n > cap:
        raise CapExceededError(f"{n} gates exceed the search cap {cap}")
    inv = gen.inverse()
    out_set = set(c.outputs)

    # joint colour vector: entries 0..n-1 are the domain side, n..2n-1 the image side
    initial: list = []
    for side, colour_in in ((0, lambda v: v), (1, inv)):
        for i, g in enumerate(c.gates):
            if g.label == IN:
                base = (IN, colour_in(g.payload))
            elif g.label == CONST:
                base = (CONST, g.payload)
            else:
                base = (g.label,)
            initial.append((base, i in out_set))

    def canon(values: list) -> tuple[list[int], int]:
        table: dict = {}
        return [table.setdefault(v, len(table)) for v in values], len(table)

    col, k = canon(initial)
    while True:
        stepped = [
            (
                col[off + i],
                tuple(sorted(col[off + ch] for ch in c.gates[i].children)),
            )
            for off in (0, n)
            for i in range(n)
        ]
        col2, k2 = canon(stepped)
        if k2 == k:
            break
        col, k = col2, k2
    dom, img = col[:n], col[n:]

    by_colour: dict[int, list[int]] = {}
    for j in range(n):
        by_colour.setdefault(img[j], []).append(j)
    if any(dom[i] not in by_colour for i in range(n)):
        return None

    w: dict[int, int] = {}
    used: set[int] = set()

    def candidates(i: int) -> list[int]:
        g = c.gates[i]
        if g.label in (ADD, MUL):
            want = tuple(sorted(w[ch] for ch in g.children))
            return [
                j
                for j in by_colour.get(dom[i], ())
                if j not in used and c.gates[j].children == want
            ]
        return [j for j in by_colour.get(dom[i], ()) if j not in used]

    # iterative depth-first search: children precede parents, so by the time
    # gate i is placed all its children already have images
    stack: list[Iterator[int]] = [iter(candidates(0))] if n else []
    while stack:
        i = len(stack) - 1
        j = next(stack[-1], None)
        if j is None:
            stack.pop()
            if i - 1 >= 0:
                used.remove(w[i - 1])
                del w[i - 1]
            continue
        w[i] = j
        used.add(j)
        if i + 1 == n:
            assert verify_witness(c, gen, w)
            return dict(w)
        stack.append(iter(candidates(i + 1)))
        continue
    return None


# --- cycle space of a graph -----------------------------------------------------


def cycle_space_generators(
    vertices: Sequence, edge_keys: Sequence[tuple], var_of: callable = None
) -> GroupPresentation:
    """Fundamental-cycle generators of a connected (multi)graph, as edge flips.

    Each non-tree edge of a BFS spanning tree rooted at the lowest-index
    vertex yields one generator; the generator swaps ``x[e,0] <-> x[e,1]``
    for every edge e on the fundamental cycle.  edge_keys are tuples whose
    first two components are the endpoints.
    """
    if var_of is None:
        var_of = lambda e, i: Variable("x", tuple(e) + (i,))
    adj: dict = {v: [] for v in vertices}
    for e in edge_keys:
        a, b = e[0], e[1]
        adj[a].append((b, e))
        adj[b].append((a, e))
    root = sorted(vertices)[0]
    parent_edge: dict = {root: None}
    orderq = [root]
    tree_edges: set = set()
    while orderq:
        v = orderq.pop(0)
        for w, e in sorted(adj[v], key=lambda t: (str(t[0]), str(t[1]))):
            if w not in parent_edge:
                parent_edge[w] = (v, e)
                tree_edges.add(e)
                orderq.append(w)
    if len(parent_edge) != len(vertices):
        raise InvarianceError("graph is disconnected")

    def path_to_root(v) -> list:
        out = []
        while parent_edge[v] is not None:
            p, e = parent_edge[v]
            out.append(e)
            v = p
        return out

    gens = []
    for e in edge_keys:
        if e in tree_edges:
            continue
        a, b = e[0], e[1]
        pa, pb = path_to_root(a), path_to_root(b)
        cycle = set(pa) ^ set(pb)
        cycle.add(e)
        mapping: dict[Variable, Variable] = {}
        for ce in cycle:
            mapping[var_of(ce, 0)] = var_of(ce, 1)
            mapping[var_of(ce, 1)] = var_of(ce, 0)
        gens.append(VariablePermutation(mapping))
    return GroupPresentation(tuple(gens))
