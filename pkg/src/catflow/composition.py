"""Open diagrams (structured cospans) and their composition by pushout."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

from .acset import ACSet, Homomorphism, Part, coproduct, identity, promote_instance, require_valid, validate
from .errors import AttributeConflictError, CatflowError, SchemaError
from .homs import SearchOptions, find_homomorphisms, is_homomorphism
from .schemas import INTERFACES, SCHEMAS, kind_of


class NameConflictWarning(UserWarning):
    """Parts merged by a pushout carried different names; the left name was kept."""


class UnionFind:
    """Disjoint sets over 1..n; the root of every class is its smallest member."""

    def __init__(self, n: int):
        self.parent = list(range(n + 1))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx


def promote(foot: ACSet, schema=None) -> ACSet:
    """Interface instance -> full diagram instance (other objects empty)."""
    if schema is None:
        schema = SCHEMAS[kind_of(foot.schema)]
    return promote_instance(foot, schema)


@dataclass
class OpenDiagram:
    apex: ACSet
    feet: List[ACSet]
    legs: List[Homomorphism] = field(default_factory=list)

    def __post_init__(self):
        if len(self.feet) != len(self.legs):
            raise SchemaError("an open diagram needs exactly one leg per foot")
        for k, (foot, leg) in enumerate(zip(self.feet, self.legs)):
            if leg.target is not self.apex and leg.target != self.apex:
                raise SchemaError(f"leg {k} does not land in the apex")
            if leg.source.schema != self.apex.schema:
                raise SchemaError(f"leg {k} does not start at the promoted foot")
            if leg.source.counts() != promote(foot, self.apex.schema).counts():
                raise SchemaError(f"leg {k} does not start at the promoted foot")

    def check(self) -> None:
        """Raise unless every leg is an injective homomorphism (names ignored)."""
        require_valid(self.apex, "apex")
        for k, (foot, leg) in enumerate(zip(self.feet, self.legs)):
            require_valid(foot, f"foot {k}")
            if not is_homomorphism(leg):
                raise CatflowError(f"leg {k} is not a homomorphism")
            if not all(leg.is_injective(ob) for ob in leg.source.schema.objects):
                raise CatflowError(f"leg {k} is not injective")


def leg_by_names(foot: ACSet, apex: ACSet) -> Homomorphism:
    """Inclusion of a foot into an apex, matching named parts by name."""
    promoted = promote(foot, apex.schema)
    schema = apex.schema
    pins = {}
    for attr, ob, _ in schema.attrs:
        if attr not in schema.name_attrs:
            continue
        for i in range(1, promoted.nparts(ob) + 1):
            name = promoted.subpart(i, attr)
            hits = apex.find(attr, name)
            if len(hits) != 1:
                raise CatflowError(f"foot part {name!r} matches {len(hits)} apex parts")
            pins[Part(ob, i)] = hits[0]
    found = find_homomorphisms(promoted, apex, SearchOptions(monic=True, pins=pins, max_matches=1))
    if not found:
        raise CatflowError("foot does not embed in the apex" + _attr_conflicts(promoted, apex, pins))
    return found[0]


def _attr_conflicts(src: ACSet, tgt: ACSet, pins) -> str:
    """Explain a failed embedding.

    Parts without names are located through their morphisms into named parts;
    any remaining column that disagrees is reported with readable values.
    """
    schema = src.schema
    named = {p.ob for p in pins}

    def shown(inst, col, idx):
        v = inst.subpart(idx, col)
        if schema.has_hom(col):
            cod = next(c for h, _, c in schema.homs if h == col)
            vals = [inst.subpart(v, a) for a, ob, _ in schema.attrs if ob == cod]
            return vals[0] if len(vals) == 1 else v
        return v

    msgs = []
    for ob in schema.objects:
        if ob in named:
            continue
        keyed = [(h, c) for h, d, c in schema.homs if d == ob and c in named]
        if not keyed:
            continue
        other = [c for c in schema.columns(ob) if c not in {h for h, _ in keyed} and c not in schema.name_attrs]
        for i in range(1, src.nparts(ob) + 1):
            cands = [
                j for j in range(1, tgt.nparts(ob) + 1)
                if all(pins[Part(c, src.subpart(i, h))].idx == tgt.subpart(j, h) for h, c in keyed)
            ]
            if not cands:
                continue
            diffs = [[c for c in other if shown(src, c, i) != shown(tgt, c, j)] for j in cands]
            if all(diffs):
                j, d = cands[0], diffs[0]
                msgs += [f"{ob}#{i}.{c} is {shown(src, c, i)!r} in the foot but {shown(tgt, c, j)!r} in the apex" for c in d]
    return (": " + "; ".join(msgs)) if msgs else ""


def correspondence_by_names(left_foot: ACSet, right_foot: ACSet) -> Homomorphism:
    """Bijection between two feet matching named parts by name."""
    if left_foot.counts() != right_foot.counts():
        raise CatflowError("feet have different part counts")
    return leg_by_names(left_foot, right_foot)


def identity_open(foot: ACSet, schema=None) -> OpenDiagram:
    apex = promote(foot, schema)
    leg = identity(apex)
    return OpenDiagram(apex, [foot, foot.copy()], [leg, Homomorphism(apex, apex, leg.components)])


@dataclass
class GluingSpec:
    left: OpenDiagram
    left_foot: int
    right: OpenDiagram
    right_foot: int
    correspondence: Homomorphism  # left foot -> right foot

    def check(self) -> None:
        lf = self.left.feet[self.left_foot]
        rf = self.right.feet[self.right_foot]
        if lf.schema != rf.schema:
            raise SchemaError("feet are on different interface schemas")
        if self.left.apex.schema != self.right.apex.schema:
            raise SchemaError("apexes are on different diagram schemas")
        c = self.correspondence
        if c.source.counts() != lf.counts() or c.target.counts() != rf.counts():
            raise CatflowError("correspondence does not connect the chosen feet")
        if not is_homomorphism(Homomorphism(lf, rf, c.components)):
            raise CatflowError("correspondence is not a homomorphism")
        for ob in lf.schema.objects:
            if not (c.is_injective(ob) and c.is_surjective(ob)):
                raise CatflowError(f"correspondence is not bijective on {ob}")
        for leg in (self.left.legs[self.left_foot], self.right.legs[self.right_foot]):
            if not is_homomorphism(leg) or not all(leg.is_injective(ob) for ob in leg.source.schema.objects):
                raise CatflowError("legs must be injective homomorphisms")


@dataclass
class PushoutResult:
    composite: ACSet
    inj_left: Homomorphism
    inj_right: Homomorphism
    warnings: List[str] = field(default_factory=list)


def pushout(spec: GluingSpec) -> PushoutResult:
    """Glue the two apexes along the chosen feet.

    The composite is the coproduct quotiented, object by object, by the
    equivalence generated by ``leg_left(b) ~ leg_right(corr(b))``.
    """
    spec.check()
    x, y = spec.left.apex, spec.right.apex
    leg_l = spec.left.legs[spec.left_foot]
    leg_r = spec.right.legs[spec.right_foot]
    corr = spec.correspondence
    schema = x.schema
    foot_schema = spec.left.feet[spec.left_foot].schema
    total, ix, iy = coproduct(x, y)

    cls = {}  # ob -> list: coproduct index -> new index
    for ob in schema.objects:
        n = total.nparts(ob)
        uf = UnionFind(n)
        if ob in foot_schema.objects:
            shift = x.nparts(ob)
            for b, c in enumerate(corr.components[ob], start=1):
                uf.union(leg_l.components[ob][b - 1], shift + leg_r.components[ob][c - 1])
        new = [0] * (n + 1)
        count = 0
        for i in range(1, n + 1):
            r = uf.find(i)
            if r == i:
                count += 1
                new[i] = count
            else:
                new[i] = new[r]
        cls[ob] = (new, count)

    out = ACSet(schema)
    for ob in schema.objects:
        out.add_parts(ob, cls[ob][1])
    for name, dom, cod in schema.homs:
        new_dom, new_cod = cls[dom][0], cls[cod][0]
        col = out._cols[name]
        for i, v in enumerate(total._cols[name], start=1):
            k = new_dom[i] - 1
            w = new_cod[v]
            if col[k] is None:
                col[k] = w
            elif col[k] != w:
                raise CatflowError(f"gluing is not a congruence on {name}")
    notes = []
    names = schema.name_attrs
    for name, dom, _ in schema.attrs:
        new_dom = cls[dom][0]
        col = out._cols[name]
        for i, v in enumerate(total._cols[name], start=1):
            k = new_dom[i] - 1
            if col[k] is None:
                col[k] = v
            elif col[k] != v:
                if name not in names:
                    raise AttributeConflictError(
                        f"merging {dom} parts with different {name}: {col[k]!r} vs {v!r}"
                    )
                notes.append(f"{name}: kept {col[k]!r}, discarded {v!r}")
    for msg in notes:
        warnings.warn(msg, NameConflictWarning, stacklevel=2)

    inj_l = Homomorphism(x, out, {ob: [cls[ob][0][i] for i in ix.components[ob]] for ob in schema.objects})
    inj_r = Homomorphism(y, out, {ob: [cls[ob][0][i] for i in iy.components[ob]] for ob in schema.objects})
    return PushoutResult(out, inj_l, inj_r, notes)


def compose_open(left: OpenDiagram, right: OpenDiagram, l_foot: int, r_foot: int, correspondence: Homomorphism):
    """Compose two open diagrams; unused feet are carried to the result.

    Returns ``(open_diagram, warnings)``.
    """
    res = pushout(GluingSpec(left, l_foot, right, r_foot, correspondence))
    feet, legs = [], []
    for k, (foot, leg) in enumerate(zip(left.feet, left.legs)):
        if k != l_foot:
            feet.append(foot)
            legs.append(_retarget(leg.then(res.inj_left), res.composite))
    for k, (foot, leg) in enumerate(zip(right.feet, right.legs)):
        if k != r_foot:
            feet.append(foot)
            legs.append(_retarget(leg.then(res.inj_right), res.composite))
    return OpenDiagram(res.composite, feet, legs), res.warnings


def _retarget(h: Homomorphism, target: ACSet) -> Homomorphism:
    return Homomorphism(h.source, target, h.components)
