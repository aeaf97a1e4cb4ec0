"""Stratification of typed diagrams as pullbacks over a shared type diagram."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .acset import ACSet, Homomorphism, require_valid
from .errors import AttributeConflictError, CatflowError, SchemaError, TypingError
from .homs import SearchOptions, assign_types, is_homomorphism


@dataclass
class TypedDiagram:
    diagram: ACSet
    type_diagram: ACSet
    typing: Homomorphism

    def check(self) -> None:
        if self.typing.source.counts() != self.diagram.counts() or self.typing.target.counts() != self.type_diagram.counts():
            raise TypingError("typing does not connect the diagram to its type diagram")
        if not is_homomorphism(Homomorphism(self.diagram, self.type_diagram, self.typing.components)):
            raise TypingError("typing is not a homomorphism (names ignored)")

    @classmethod
    def auto(cls, diagram: ACSet, type_diagram: ACSet, opts: Optional[SearchOptions] = None) -> "TypedDiagram":
        """Type a diagram by search; ambiguity is an error."""
        typing, _ = assign_types(diagram, type_diagram, opts, strict=True)
        return cls(diagram, type_diagram, typing)


@dataclass
class PullbackResult:
    stratified: ACSet
    p1: Homomorphism  # stratified -> aggregate
    p2: Homomorphism  # stratified -> strata


def pullback(agg: TypedDiagram, strata: TypedDiagram, sep: str = "_") -> PullbackResult:
    """Fibre product ``agg x_type strata``.

    Parts of each object are pairs ``(a, s)`` with equal types, in
    lexicographic order; names are joined with ``sep``; every other
    attribute must agree between the two coordinates.
    """
    if agg.type_diagram != strata.type_diagram:
        raise TypingError("aggregate and strata are typed over different type diagrams")
    agg.check()
    strata.check()
    A, B = agg.diagram, strata.diagram
    schema = A.schema
    if B.schema != schema:
        raise SchemaError("aggregate and strata have different schemas")
    require_valid(A, "aggregate")
    require_valid(B, "strata")
    ta, tb = agg.typing.components, strata.typing.components

    pairs = {}
    index = {}
    for ob in schema.objects:
        by_type = {}
        for s, t in enumerate(tb[ob], start=1):
            by_type.setdefault(t, []).append(s)
        ps = [(a, s) for a, t in enumerate(ta[ob], start=1) for s in by_type.get(t, ())]
        pairs[ob] = ps
        index[ob] = {p: k for k, p in enumerate(ps, start=1)}

    out = ACSet(schema)
    for ob in schema.objects:
        out.add_parts(ob, len(pairs[ob]))
    for name, dom, cod in schema.homs:
        ca, cb = A._cols[name], B._cols[name]
        out._cols[name] = [index[cod][(ca[a - 1], cb[s - 1])] for a, s in pairs[dom]]
    names = schema.name_attrs
    for name, dom, _ in schema.attrs:
        ca, cb = A._cols[name], B._cols[name]
        col = []
        for a, s in pairs[dom]:
            va, vb = ca[a - 1], cb[s - 1]
            if name in names:
                col.append(f"{va}{sep}{vb}")
            elif va != vb:
                raise AttributeConflictError(f"{dom} pair ({a}, {s}) disagrees on {name}: {va!r} vs {vb!r}")
            else:
                col.append(va)
        out._cols[name] = col

    p1 = Homomorphism(out, A, {ob: [a for a, _ in pairs[ob]] for ob in schema.objects})
    p2 = Homomorphism(out, B, {ob: [s for _, s in pairs[ob]] for ob in schema.objects})
    return PullbackResult(out, p1, p2)


def check_square(result: PullbackResult, agg: TypedDiagram, strata: TypedDiagram) -> bool:
    """Projections are homomorphisms and ``t_agg . p1 == t_strata . p2``."""
    try:
        if not (is_homomorphism(result.p1) and is_homomorphism(result.p2)):
            return False
        left = result.p1.then(agg.typing)
        right = result.p2.then(strata.typing)
    except (IndexError, KeyError, SchemaError):
        return False
    return left.components == right.components
