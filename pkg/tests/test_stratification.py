import random

import pytest

from catflow.acset import Homomorphism, identity
from catflow.errors import TypingError
from catflow.homs import is_isomorphic
from catflow.models import age_strata_sfd, smoking_aggregate_sfd, smoking_type_sfd, smoking_typings
from catflow.schemas import SchCLD, SchSFD, build_sfd
from catflow.stratification import TypedDiagram, check_square, pullback

from oracles import TooLarge, pullback_factorizations, random_instance, random_over


def _square():
    typ = smoking_type_sfd()
    ta, ts = smoking_typings()
    return TypedDiagram(smoking_aggregate_sfd(), typ, ta), TypedDiagram(age_strata_sfd(), typ, ts)


def hand_built_stratified():
    states = ["NonSmoker", "Smoker", "FormerSmoker"]
    ages = ["child", "adult", "senior"]
    behav = [("initiation", "v_init", "rInit", "NonSmoker", "Smoker"),
             ("cessation", "v_quit", "rQuit", "Smoker", "FormerSmoker"),
             ("relapse", "v_relapse", "rRelapse", "FormerSmoker", "Smoker")]
    aging = [("aging_child", "v_ageChild", "rAgeChild", "child", "adult"),
             ("aging_adult", "v_ageAdult", "rAgeAdult", "adult", "senior")]
    stocks = [f"{s}_{a}" for s in states for a in ages]
    params = [f"{p}_behavior" for _, _, p, _, _ in behav] + [f"rAging_{p}" for _, _, p, _, _ in aging]
    aux, flows = [], []
    for fl, v, p, src, tgt in behav:
        for a in ages:
            name = f"{v}_v_{a}"
            aux.append((name, "*", [f"{src}_{a}", f"{p}_behavior"]))
            flows.append((f"{fl}_behavior_{a}", name, f"{src}_{a}", f"{tgt}_{a}"))
    for s in states:
        for fl, v, p, src, tgt in aging:
            name = f"v_aging{s}_{v}"
            aux.append((name, "*", [f"{s}_{src}", f"rAging_{p}"]))
            flows.append((f"aging{s}_{fl}", name, f"{s}_{src}", f"{s}_{tgt}"))
    return build_sfd(stocks=stocks, sum_vars=[("N_N", stocks)], params=params, aux_vars=aux, flows=flows)


def test_smoking_by_age_counts():
    agg, strata = _square()
    res = pullback(agg, strata)
    c = res.stratified.counts()
    assert c["S"] == 3 * agg.diagram.nparts("S")
    assert (c["F"], c["V"], c["P"], c["SV"]) == (15, 15, 5, 1)
    assert check_square(res, agg, strata)


def test_matches_hand_built_model():
    agg, strata = _square()
    res = pullback(agg, strata)
    hand = hand_built_stratified()
    assert is_isomorphic(res.stratified, hand, ignore_attrs=())
    typ = smoking_type_sfd()
    assert check_square(res, agg, strata)


def test_count_law():
    agg, strata = _square()
    res = pullback(agg, strata)
    for ob in SchSFD.objects:
        expected = sum(
            agg.typing[ob].count(t) * strata.typing[ob].count(t) for t in range(1, agg.type_diagram.nparts(ob) + 1)
        )
        assert res.stratified.nparts(ob) == expected


def test_identity_typing_gives_aggregate():
    agg, _ = _square()
    typ = agg.type_diagram
    res = pullback(agg, TypedDiagram(typ, typ, identity(typ)))
    assert is_isomorphic(res.stratified, agg.diagram)


def test_empty_fiber():
    typ = smoking_type_sfd()
    only_behavior = build_sfd(
        stocks=["a"], sum_vars=[("N", ["a"])], params=["b"],
        aux_vars=[("v", "*", ["a", "b"])], flows=[("f", "v", "a", "a")],
    )
    from catflow.models import typing_by_flows

    ts = typing_by_flows(only_behavior, typ, {"f": "f_behavior"})
    agg, _ = _square()
    res = pullback(agg, TypedDiagram(only_behavior, typ, ts))
    names = res.stratified.column("fname")
    assert not any(n.startswith("aging") for n in names)
    assert res.stratified.nparts("F") == 3


def test_corrupted_projection_fails_square():
    agg, strata = _square()
    res = pullback(agg, strata)
    comps = dict(res.p1.components)
    comps["S"] = (comps["S"][0] % 3 + 1,) + comps["S"][1:]
    bad = type(res)(res.stratified, Homomorphism(res.stratified, agg.diagram, comps), res.p2)
    assert not check_square(bad, agg, strata)


def test_symmetry():
    agg, strata = _square()
    a = pullback(agg, strata).stratified
    b = pullback(strata, agg).stratified
    assert is_isomorphic(a, b)


def test_mismatched_type_diagrams():
    agg, strata = _square()
    other = build_sfd(stocks=["Pop"])
    with pytest.raises(TypingError):
        pullback(agg, TypedDiagram(other, other, identity(other)))


@pytest.mark.parametrize("seed", range(10))
def test_universal_property_random(seed):
    rng = random.Random(seed)
    schema = SchCLD if seed % 2 else SchSFD
    typ = random_instance(schema, rng, 2)
    a, ta = random_over(typ, rng)
    b, tb = random_over(typ, rng)
    A, B = TypedDiagram(a, typ, ta), TypedDiagram(b, typ, tb)
    res = pullback(A, B)
    assert check_square(res, A, B)
    z, _ = random_over(typ, rng, 1)
    try:
        counts = pullback_factorizations(res, A, B, z, limit=5000)
    except TooLarge:
        pytest.skip("hom set too large for brute force")
    assert all(c == 1 for c in counts)
