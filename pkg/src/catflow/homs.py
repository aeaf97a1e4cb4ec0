"""Homomorphism checking and search between instances of one schema."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .acset import ACSet, Homomorphism, Part
from .errors import SchemaError, TypingError

DEFAULT_MATCH_CAP = 10_000


@dataclass
class SearchOptions:
    """Search configuration.

    ``monic`` is either a bool applied to every object or an iterable of
    object names that must be mapped injectively. ``ignore_attrs`` defaults
    to the schema's name attributes. ``pins`` pre-assigns source parts.
    """

    monic: object = False
    ignore_attrs: Optional[FrozenSet[str]] = None
    pins: Mapping[Part, Part] = field(default_factory=dict)
    max_matches: int = DEFAULT_MATCH_CAP

    def monic_objects(self, schema) -> FrozenSet[str]:
        if self.monic is True:
            return frozenset(schema.objects)
        if not self.monic:
            return frozenset()
        return frozenset(self.monic)

    def ignored(self, schema) -> FrozenSet[str]:
        return schema.name_attrs if self.ignore_attrs is None else frozenset(self.ignore_attrs)


def is_homomorphism(h: Homomorphism, ignore_attrs: Optional[Iterable[str]] = None) -> bool:
    """Naturality on every morphism plus equality on non-ignored attributes.

    ``ignore_attrs=None`` ignores the schema's name attributes.
    """
    src, tgt = h.source, h.target
    schema = src.schema
    if tgt.schema != schema:
        raise SchemaError("homomorphism between different schemas")
    ignore = schema.name_attrs if ignore_attrs is None else frozenset(ignore_attrs)
    comps = h.components
    for ob in schema.objects:
        c = comps[ob]
        if len(c) != src.nparts(ob):
            return False
        if any(not 1 <= v <= tgt.nparts(ob) for v in c):
            return False
    for name, dom, cod in schema.homs:
        s_col, t_col = src._cols[name], tgt._cols[name]
        cd, cc = comps[dom], comps[cod]
        for x, y in enumerate(s_col):
            if cc[y - 1] != t_col[cd[x] - 1]:
                return False
    for name, dom, _ in schema.attrs:
        if name in ignore:
            continue
        s_col, t_col = src._cols[name], tgt._cols[name]
        cd = comps[dom]
        for x, v in enumerate(s_col):
            if v != t_col[cd[x] - 1]:
                return False
    return True


class _Search:
    def __init__(self, pattern: ACSet, target: ACSet, opts: SearchOptions):
        self.p, self.t = pattern, target
        schema = pattern.schema
        self.schema = schema
        self.monic = opts.monic_objects(schema)
        self.cap = opts.max_matches
        ignore = opts.ignored(schema)
        self.obs = list(schema.objects)
        self.ob_rank = {ob: i for i, ob in enumerate(self.obs)}
        self.vars = [(ob, i) for ob in self.obs for i in range(1, pattern.nparts(ob) + 1)]

        # outgoing / incoming morphism lists per object
        self.out_homs = {ob: [] for ob in self.obs}
        self.in_homs = {ob: [] for ob in self.obs}
        for name, dom, cod in schema.homs:
            self.out_homs[dom].append((name, cod))
            self.in_homs[cod].append((name, dom))
        # pattern preimages: (hom, y) -> [x...]
        self.p_pre = {}
        for name, dom, cod in schema.homs:
            pre = {}
            for x, y in enumerate(pattern._cols[name], start=1):
                pre.setdefault(y, []).append(x)
            self.p_pre[name] = pre
        self.t_pre = {}
        for name, dom, cod in schema.homs:
            pre = {}
            for x, y in enumerate(target._cols[name], start=1):
                pre.setdefault(y, set()).add(x)
            self.t_pre[name] = pre

        attrs_by_ob = {ob: [a for a, d, _ in schema.attrs if d == ob and a not in ignore] for ob in self.obs}
        domains = {}
        for ob, i in self.vars:
            cands = []
            for j in range(1, target.nparts(ob) + 1):
                if all(pattern._cols[a][i - 1] == target._cols[a][j - 1] for a in attrs_by_ob[ob]):
                    cands.append(j)
            domains[(ob, i)] = frozenset(cands)
        self.domains = domains
        self.pins = {}
        for k, v in opts.pins.items():
            if k.ob != v.ob:
                raise SchemaError(f"pin {k} -> {v} crosses objects")
            self.pins[(k.ob, k.idx)] = v.idx
        self.results: List[Tuple[Tuple[int, ...], ...]] = []

    def run(self):
        domains = dict(self.domains)
        assign: Dict[tuple, int] = {}
        for var, val in self.pins.items():
            if var not in domains:
                raise SchemaError(f"pinned part {Part(*var)} does not exist in the pattern")
            if val not in domains[var]:
                return []
            domains = self._assign(var, val, domains, assign)
            if domains is None:
                return []
        limit = sys.getrecursionlimit()
        if limit < len(self.vars) + 100:
            sys.setrecursionlimit(len(self.vars) + 100)
        self._recurse(domains, assign)
        return self.results

    def _assign(self, var, val, domains, assign):
        """Fix ``var := val`` and forward-check; None on a wipe-out."""
        ob, i = var
        assign[var] = val
        domains = dict(domains)
        domains[var] = frozenset((val,))
        t = self.t
        for name, cod in self.out_homs[ob]:
            y = self.p._cols[name][i - 1]
            need = t._cols[name][val - 1]
            key = (cod, y)
            if key in assign:
                if assign[key] != need:
                    return None
            elif need in domains[key]:
                domains[key] = frozenset((need,))
            else:
                return None
        for name, dom in self.in_homs[ob]:
            allowed = self.t_pre[name].get(val, set())
            for x in self.p_pre[name].get(i, ()):
                key = (dom, x)
                if key in assign:
                    if assign[key] not in allowed:
                        return None
                else:
                    d = domains[key] & allowed
                    if not d:
                        return None
                    domains[key] = d
        if ob in self.monic:
            for k in range(1, self.p.nparts(ob) + 1):
                key = (ob, k)
                if key != var and key not in assign and val in domains[key]:
                    d = domains[key] - {val}
                    if not d:
                        return None
                    domains[key] = d
        return domains

    def _recurse(self, domains, assign):
        if len(self.results) >= self.cap:
            return
        free = [v for v in self.vars if v not in assign]
        if not free:
            self._emit(assign)
            return
        # most constrained first, ties by declaration order
        var = min(free, key=lambda v: (len(domains[v]), self.ob_rank[v[0]], v[1]))
        for val in sorted(domains[var]):
            if var[0] in self.monic and any(
                assign.get((var[0], k)) == val for k in range(1, self.p.nparts(var[0]) + 1)
            ):
                continue
            trial = dict(assign)
            nd = self._assign(var, val, domains, trial)
            if nd is not None:
                # singleton domains fixed by propagation get assigned lazily
                self._recurse(nd, trial)
            if len(self.results) >= self.cap:
                return

    def _emit(self, assign):
        key = tuple(
            tuple(assign[(ob, i)] for i in range(1, self.p.nparts(ob) + 1)) for ob in self.obs
        )
        self.results.append(key)


def find_homomorphisms(pattern: ACSet, target: ACSet, opts: Optional[SearchOptions] = None) -> List[Homomorphism]:
    """All homomorphisms ``pattern -> target`` satisfying ``opts``.

    Sorted lexicographically by component tuples in object declaration order.
    """
    if pattern.schema != target.schema:
        raise SchemaError("pattern and target have different schemas")
    opts = opts or SearchOptions()
    keys = sorted(set(_Search(pattern, target, opts).run()))
    obs = pattern.schema.objects
    return [Homomorphism(pattern, target, dict(zip(obs, k))) for k in keys]


def assign_types(source: ACSet, type_diagram: ACSet, opts: Optional[SearchOptions] = None, strict: bool = False):
    """Typing homomorphism of ``source`` into ``type_diagram``.

    Returns ``(typing, count)`` where ``count`` is the number of candidate
    typings found (bounded by the match cap). With ``strict`` an ambiguous
    typing raises :class:`TypingError`.
    """
    opts = opts or SearchOptions()
    found = find_homomorphisms(source, type_diagram, opts)
    if not found:
        raise TypingError("no typing homomorphism exists", 0)
    if strict and len(found) > 1:
        raise TypingError(f"ambiguous typing: {len(found)} candidate homomorphisms", len(found))
    return found[0], len(found)


def is_isomorphic(a: ACSet, b: ACSet, ignore_attrs=None) -> bool:
    if a.schema != b.schema or a.counts() != b.counts():
        return False
    opts = SearchOptions(monic=True, ignore_attrs=ignore_attrs, max_matches=1)
    return bool(find_homomorphisms(a, b, opts))
