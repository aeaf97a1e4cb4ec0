"""Independent reference implementations used as test oracles.

The brute-force homomorphism enumerator is deliberately different from the
library search: it materializes every per-object function as a numpy
array, filters by attributes, and hash-joins objects codomain-first.
"""

import itertools
import random
from collections import Counter

import numpy as np

from catflow.acset import SIGNS, OPERATORS, ACSet, Homomorphism, Part, validate
from catflow.composition import promote

NAME_POOL = ("a", "b", "c")
VALUE_POOLS = {"Name": NAME_POOL, "Sign": SIGNS, "Op": OPERATORS, "Int": (1, 2), "Real": (0.0, 1.0)}


class TooLarge(Exception):
    pass


# -- random instances -----------------------------------------------------------

def _fix_counts(schema, counts):
    changed = True
    while changed:
        changed = False
        for _, dom, cod in schema.homs:
            if counts[dom] and not counts[cod]:
                counts[cod] = 1
                changed = True
    return counts


def random_instance(schema, rng: random.Random, max_parts=5, counts=None) -> ACSet:
    counts = dict(counts) if counts else {ob: rng.randint(0, max_parts) for ob in schema.objects}
    counts = _fix_counts(schema, counts)
    inst = ACSet(schema)
    for ob in schema.objects:
        inst.add_parts(ob, counts[ob])
    for name, dom, cod in schema.homs:
        inst._cols[name] = [rng.randint(1, counts[cod]) for _ in range(counts[dom])]
    for name, dom, _ in schema.attrs:
        pool = VALUE_POOLS[schema.attr_kind(name)]
        inst._cols[name] = [rng.choice(pool) for _ in range(counts[dom])]
    assert not validate(inst)
    return inst


def sub_instance(inst: ACSet, rng: random.Random, keep=0.5) -> ACSet:
    """Random sub-instance closed under morphisms, re-indexed in random order."""
    schema = inst.schema
    chosen = {ob: {i for i in range(1, inst.nparts(ob) + 1) if rng.random() < keep} for ob in schema.objects}
    changed = True
    while changed:
        changed = False
        for name, dom, cod in schema.homs:
            for i in chosen[dom]:
                j = inst._cols[name][i - 1]
                if j not in chosen[cod]:
                    chosen[cod].add(j)
                    changed = True
    order = {}
    for ob in schema.objects:
        xs = sorted(chosen[ob])
        rng.shuffle(xs)
        order[ob] = xs
    return _relabel(inst, order)


def _relabel(inst: ACSet, order) -> ACSet:
    """Instance whose part k of ``ob`` is ``order[ob][k-1]`` of ``inst``."""
    schema = inst.schema
    pos = {ob: {old: new for new, old in enumerate(order[ob], start=1)} for ob in schema.objects}
    out = ACSet(schema)
    for ob in schema.objects:
        out.add_parts(ob, len(order[ob]))
    for name, dom, cod in schema.homs:
        out._cols[name] = [pos[cod][inst._cols[name][i - 1]] for i in order[dom]]
    for name, dom, _ in schema.attrs:
        out._cols[name] = [inst._cols[name][i - 1] for i in order[dom]]
    return out


def permuted(inst: ACSet, rng: random.Random):
    """Random re-indexing; returns ``(copy, iso)`` with ``iso: inst -> copy``."""
    order = {}
    for ob in inst.schema.objects:
        xs = list(range(1, inst.nparts(ob) + 1))
        rng.shuffle(xs)
        order[ob] = xs
    out = _relabel(inst, order)
    comps = {}
    for ob, xs in order.items():
        inv = [0] * len(xs)
        for new, old in enumerate(xs, start=1):
            inv[old - 1] = new
        comps[ob] = inv
    return out, Homomorphism(inst, out, comps)


def random_over(type_diagram: ACSet, rng: random.Random, max_per_type=2, copy_names=False) -> tuple:
    """Random instance with a typing into ``type_diagram``; returns ``(inst, typing)``.

    Non-name attributes are copied from the type part so the typing is a
    homomorphism that preserves them.
    """
    schema = type_diagram.schema
    order = _cod_first(schema)
    types = {}
    for ob in order:
        nt = type_diagram.nparts(ob)
        ts = []
        for t in range(1, nt + 1):
            ts += [t] * rng.randint(0, max_per_type)
        types[ob] = ts
    # make sure every hom has somewhere to land
    changed = True
    while changed:
        changed = False
        for name, dom, cod in schema.homs:
            for t in types[dom]:
                need = type_diagram._cols[name][t - 1]
                if need not in types[cod]:
                    types[cod].append(need)
                    changed = True
    inst = ACSet(schema)
    for ob in schema.objects:
        inst.add_parts(ob, len(types[ob]))
    for name, dom, cod in schema.homs:
        col = []
        for t in types[dom]:
            need = type_diagram._cols[name][t - 1]
            col.append(rng.choice([k for k, u in enumerate(types[cod], start=1) if u == need]))
        inst._cols[name] = col
    for name, dom, _ in schema.attrs:
        if name in schema.name_attrs and not copy_names:
            inst._cols[name] = [rng.choice(NAME_POOL) for _ in types[dom]]
        else:
            inst._cols[name] = [type_diagram._cols[name][t - 1] for t in types[dom]]
    assert not validate(inst)
    return inst, Homomorphism(inst, type_diagram, {ob: types[ob] for ob in schema.objects})


# -- brute-force homomorphisms ------------------------------------------------------

def _cod_first(schema):
    """Objects ordered so every morphism's codomain precedes its domain."""
    out, seen = [], set()

    def visit(ob):
        if ob in seen:
            return
        seen.add(ob)
        for _, dom, cod in schema.homs:
            if dom == ob:
                visit(cod)
        out.append(ob)

    for ob in schema.objects:
        visit(ob)
    return out


def _all_functions(ns, nt):
    if ns == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if nt == 0:
        return np.zeros((0, ns), dtype=np.int64)
    grids = np.indices((nt,) * ns).reshape(ns, -1).T
    return grids.astype(np.int64) + 1


def brute_force_homs(pattern: ACSet, target: ACSet, ignore=None, monic=False, limit=200_000):
    """Set of component-key tuples of every homomorphism ``pattern -> target``."""
    schema = pattern.schema
    ignore = schema.name_attrs if ignore is None else frozenset(ignore)
    monic_obs = set(schema.objects) if monic is True else set(monic or ())
    order = _cod_first(schema)
    rows = [dict()]
    for ob in order:
        ns, nt = pattern.nparts(ob), target.nparts(ob)
        if nt ** ns > 100_000:
            raise TooLarge(ob)
        cand = _all_functions(ns, nt)
        for name, dom, _ in schema.attrs:
            if dom != ob or name in ignore or not len(cand):
                continue
            tv = np.array(target._cols[name], dtype=object)
            sv = np.array(pattern._cols[name], dtype=object)
            cand = cand[(tv[cand - 1] == sv).all(axis=1)]
        if ob in monic_obs and len(cand):
            s = np.sort(cand, axis=1)
            cand = cand[(np.diff(s, axis=1) != 0).all(axis=1)]
        homs = [(n, c) for n, d, c in schema.homs if d == ob]
        # hash-join: key of a candidate = images of its parts under every outgoing hom
        cand_keys = {}
        if homs:
            key_arr = np.hstack([np.asarray(target._cols[n], dtype=np.int64)[cand - 1] for n, _ in homs]) if len(cand) else cand
        else:
            key_arr = np.zeros((len(cand), 0), dtype=np.int64)
        for key, row in zip(map(tuple, key_arr.tolist()), map(tuple, cand.tolist())):
            cand_keys.setdefault(key, []).append(row)
        new_rows = []
        for r in rows:
            key = tuple(r[c][pattern._cols[n][x] - 1] for n, c in homs for x in range(ns))
            for comp in cand_keys.get(key, ()):
                nr = dict(r)
                nr[ob] = comp
                new_rows.append(nr)
            if len(new_rows) > limit:
                raise TooLarge(ob)
        rows = new_rows
        if not rows:
            return set()
    return {tuple(r[ob] for ob in schema.objects) for r in rows}


def key_of(h: Homomorphism):
    return tuple(tuple(h.components[ob]) for ob in h.source.schema.objects)


def hom_from_key(source, target, key):
    return Homomorphism(source, target, dict(zip(source.schema.objects, key)))


# -- universal properties -------------------------------------------------------------

def pushout_factorizations(res, spec, z: ACSet, limit=50_000):
    """For every cocone ``(f, g)`` into ``z`` agreeing on the glued foot,
    the number of ``u: composite -> z`` with ``u.inj_l = f`` and ``u.inj_r = g``.
    Returns the list of counts (one per cocone)."""
    x, y = spec.left.apex, spec.right.apex
    leg_l = spec.left.legs[spec.left_foot]
    leg_r = spec.right.legs[spec.right_foot]
    schema = x.schema
    corr = spec.correspondence.components
    fs = brute_force_homs(x, z, limit=limit)
    gs = brute_force_homs(y, z, limit=limit)
    # index every u by the cocone it induces, then look cocones up
    induced = Counter()
    for k in brute_force_homs(res.composite, z, limit=limit):
        u = hom_from_key(res.composite, z, k)
        induced[key_of(res.inj_left.then(u)), key_of(res.inj_right.then(u))] += 1
    # a cocone is a pair (f, g) agreeing on the glued foot: join on foot values
    objs = list(schema.objects)
    pos = {ob: k for k, ob in enumerate(objs)}
    glue = [
        (pos[ob], a - 1, leg_r.components[ob][corr[ob][i] - 1] - 1)
        for ob in leg_l.source.schema.objects if ob in corr
        for i, a in enumerate(leg_l.components[ob]) if i < len(corr[ob])
    ]
    by_foot = {}
    for gk in gs:
        by_foot.setdefault(tuple(gk[o][b] for o, _, b in glue), []).append(gk)
    counts = []
    for fk in sorted(fs):
        for gk in sorted(by_foot.get(tuple(fk[o][a] for o, a, _ in glue), ())):
            counts.append(induced[fk, gk])
    return counts


def pullback_factorizations(res, agg, strata, z: ACSet, limit=50_000):
    """For every cone ``(q1, q2)`` from ``z`` over the type diagram, the
    number of ``u: z -> stratified`` with ``p1.u = q1`` and ``p2.u = q2``."""
    q1s = [hom_from_key(z, agg.diagram, k) for k in sorted(brute_force_homs(z, agg.diagram, limit=limit))]
    q2s = [hom_from_key(z, strata.diagram, k) for k in sorted(brute_force_homs(z, strata.diagram, limit=limit))]
    us = [hom_from_key(z, res.stratified, k) for k in brute_force_homs(z, res.stratified, limit=limit)]
    counts = []
    for q1 in q1s:
        t1 = q1.then(agg.typing).components
        for q2 in q2s:
            if q2.then(strata.typing).components != t1:
                continue
            n = sum(
                1 for u in us if u.then(res.p1).components == q1.components and u.then(res.p2).components == q2.components
            )
            counts.append(n)
    return counts


def random_open_pair(schema, interface, rng: random.Random, max_parts=4):
    """Two open diagrams sharing a foot, for gluing tests.

    Left apex is random and its foot a random sub-instance on the interface
    objects. The right apex contains a copy of the foot with extra parts
    whose morphisms may point into it, and is then re-indexed randomly.
    Returns ``(left, right, correspondence)``.
    """
    from catflow.acset import restrict, promote_instance
    from catflow.composition import OpenDiagram

    x = random_instance(schema, rng, max_parts)
    # foot = sub-instance on interface objects (closed under interface morphisms)
    full_sub = sub_instance(x, rng, keep=0.5)
    foot = restrict(_interface_only(full_sub, interface), interface)
    leg_x = _find_embedding(promote_instance(foot, schema), x)
    if leg_x is None:
        return None
    extra = random_instance(schema, rng, max(1, max_parts // 2))
    pf = promote_instance(foot, schema)
    from catflow.acset import coproduct

    y0, _, _ = coproduct(pf, extra)
    # rewire morphisms of the extra parts so they may point into the foot
    for name, dom, cod in schema.homs:
        n_foot = pf.nparts(dom)
        for k in range(n_foot, y0.nparts(dom)):
            if rng.random() < 0.5:
                y0._cols[name][k] = rng.randint(1, y0.nparts(cod))
    y, iso = permuted(y0, rng)
    foot_copy = foot.copy()
    leg_y = Homomorphism(promote_instance(foot_copy, schema), y, {ob: iso.components[ob][: pf.nparts(ob)] for ob in schema.objects})
    left = OpenDiagram(x, [foot], [leg_x])
    right = OpenDiagram(y, [foot_copy], [leg_y])
    corr = Homomorphism(foot, foot_copy, {ob: range(1, foot.nparts(ob) + 1) for ob in interface.objects})
    return left, right, corr


def _interface_only(inst, interface):
    """Keep only the interface objects' parts (interface objects are closed)."""
    schema = inst.schema
    order = {ob: (list(range(1, inst.nparts(ob) + 1)) if ob in interface.objects else []) for ob in schema.objects}
    return _relabel_partial(inst, order)


def _relabel_partial(inst, order):
    schema = inst.schema
    pos = {ob: {old: new for new, old in enumerate(order[ob], start=1)} for ob in schema.objects}
    out = ACSet(schema)
    for ob in schema.objects:
        out.add_parts(ob, len(order[ob]))
    for name, dom, cod in schema.homs:
        out._cols[name] = [pos[cod][inst._cols[name][i - 1]] for i in order[dom]]
    for name, dom, _ in schema.attrs:
        out._cols[name] = [inst._cols[name][i - 1] for i in order[dom]]
    return out


def _find_embedding(pattern, target):
    from catflow.homs import SearchOptions, find_homomorphisms

    found = find_homomorphisms(pattern, target, SearchOptions(monic=True, ignore_attrs=(), max_matches=1))
    return found[0] if found else None
