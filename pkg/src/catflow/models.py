"""Bundled example diagrams: the SIR family, the vaccination module, the
smoking causal loop diagrams and the smoking/age stratification square.

Numeric scenario constants are fixtures chosen for tests. The type diagram,
the age strata and the second smoking CLD are minimal constructions.
"""

from __future__ import annotations

from .acset import Homomorphism, Part
from .homs import SearchOptions, find_homomorphisms
from .schemas import build_cld, build_foot, build_sfd
from .composition import OpenDiagram, leg_by_names


def sir_sfd():
    return build_sfd(
        stocks=["S", "I", "R"],
        sum_vars=[("N", ["S", "I", "R"])],
        params=["c", "beta", "tRec"],
        aux_vars=[
            ("v_prevalence", "/", ["I", "N"]),
            ("v_meanInfectiousContactsPerS", "*", ["c", "v_prevalence"]),
            ("v_forceOfInfection", "*", ["beta", "v_meanInfectiousContactsPerS"]),
            ("v_newInfections", "*", ["S", "v_forceOfInfection"]),
            ("v_newRecovery", "/", ["I", "tRec"]),
        ],
        flows=[("inf", "v_newInfections", "S", "I"), ("rec", "v_newRecovery", "I", "R")],
    )


def sv_sfd():
    """Vaccination module: S -> V at rate rVac, waning V -> S after tWane."""
    return build_sfd(
        stocks=["S", "V"],
        sum_vars=[("N", ["S", "V"])],
        params=["rVac", "tWane"],
        aux_vars=[
            ("v_vaccination", "*", ["S", "rVac"]),
            ("v_waning", "/", ["V", "tWane"]),
        ],
        flows=[("vac", "v_vaccination", "S", "V"), ("wane", "v_waning", "V", "S")],
    )


def first_order_delay():
    return build_sfd(
        stocks=["X", "Y"],
        params=["t"],
        aux_vars=[("v", "/", ["X", "t"])],
        flows=[("f", "v", "X", "Y")],
    )


def s_n_foot(stock="S"):
    return build_foot("sfd", stocks=[stock], sum_vars=[("N", [stock])])


def open_sir():
    """SIR with feet {I, N, I->N} and {S, N, S->N}."""
    apex = sir_sfd()
    feet = [s_n_foot("I"), s_n_foot("S")]
    return OpenDiagram(apex, feet, [leg_by_names(f, apex) for f in feet])


def open_sv():
    apex = sv_sfd()
    feet = [s_n_foot("S")]
    return OpenDiagram(apex, feet, [leg_by_names(f, apex) for f in feet])


SIR_SCENARIO = {
    "stocks": {"S": 990.0, "I": 10.0, "R": 0.0},
    "params": {"beta": 0.05, "c": 10.0, "tRec": 5.0},
    "t0": 0.0,
    "tf": 100.0,
    "dt": 0.1,
}

SIRV_SCENARIO = {
    "stocks": {"S": 990.0, "I": 10.0, "R": 0.0, "V": 0.0},
    "params": {"beta": 0.05, "c": 10.0, "tRec": 5.0, "rVac": 0.02, "tWane": 60.0},
    "t0": 0.0,
    "tf": 100.0,
    "dt": 0.1,
}


SMOKING_VARIABLES = ["Nicotine Addiction", "Smoking", "Health", "CommitmentToCessation"]


def smoking_cld():
    """Four variables, five signed links; the polarities are a reconstruction."""
    return build_cld(
        SMOKING_VARIABLES,
        [
            ("Nicotine Addiction", "Smoking", "+"),
            ("Smoking", "Nicotine Addiction", "+"),
            ("Smoking", "Health", "-"),
            ("Health", "CommitmentToCessation", "-"),
            ("CommitmentToCessation", "Smoking", "-"),
        ],
    )


def smoking_stress_cld():
    """Second smoking CLD sharing the addiction loop, adding stress."""
    return build_cld(
        ["Nicotine Addiction", "Smoking", "Stress"],
        [
            ("Nicotine Addiction", "Smoking", "+"),
            ("Smoking", "Nicotine Addiction", "+"),
            ("Stress", "Smoking", "+"),
        ],
    )


def addiction_loop_cld(suffix=""):
    return build_cld(
        [f"Nicotine Addiction{suffix}", f"Smoking{suffix}"],
        [
            (f"Nicotine Addiction{suffix}", f"Smoking{suffix}", "+"),
            (f"Smoking{suffix}", f"Nicotine Addiction{suffix}", "+"),
        ],
    )


def open_smoking_cld():
    apex = smoking_cld()
    feet = [build_cld([], []), addiction_loop_cld()]
    return OpenDiagram(apex, feet, [leg_by_names(f, apex) for f in feet])


def open_smoking_stress_cld():
    apex = smoking_stress_cld()
    feet = [addiction_loop_cld()]
    return OpenDiagram(apex, feet, [leg_by_names(f, apex) for f in feet])


def elaborate_smoking_cld():
    """Addiction loop with nicotine level in body as an intermediate variable."""
    return build_cld(
        ["Nicotine Addiction 2", "Smoking 2", "Nicotine Level in Body"],
        [
            ("Nicotine Addiction 2", "Smoking 2", "+"),
            ("Smoking 2", "Nicotine Level in Body", "+"),
            ("Nicotine Level in Body", "Nicotine Addiction 2", "+"),
        ],
    )


# -- stratification square -----------------------------------------------------

def smoking_type_sfd():
    """One population stock type; one flow type per stratification dimension."""
    return build_sfd(
        stocks=["Pop"],
        sum_vars=[("N", ["Pop"])],
        params=["p_behavior", "p_aging"],
        aux_vars=[
            ("v_behavior", "*", ["Pop", "p_behavior"]),
            ("v_aging", "*", ["Pop", "p_aging"]),
        ],
        flows=[("f_behavior", "v_behavior", "Pop", "Pop"), ("f_aging", "v_aging", "Pop", "Pop")],
    )


def smoking_aggregate_sfd():
    """Tobacco-use structure; carries one aging self-process per stock."""
    states = ["NonSmoker", "Smoker", "FormerSmoker"]
    return build_sfd(
        stocks=states,
        sum_vars=[("N", states)],
        params=["rInit", "rQuit", "rRelapse", "rAging"],
        aux_vars=[
            ("v_init", "*", ["NonSmoker", "rInit"]),
            ("v_quit", "*", ["Smoker", "rQuit"]),
            ("v_relapse", "*", ["FormerSmoker", "rRelapse"]),
        ]
        + [(f"v_aging{s}", "*", [s, "rAging"]) for s in states],
        flows=[
            ("initiation", "v_init", "NonSmoker", "Smoker"),
            ("cessation", "v_quit", "Smoker", "FormerSmoker"),
            ("relapse", "v_relapse", "FormerSmoker", "Smoker"),
        ]
        + [(f"aging{s}", f"v_aging{s}", s, s) for s in states],
    )


def age_strata_sfd():
    """Child/adult/senior with aging flows and one behavior self-process per stratum."""
    ages = ["child", "adult", "senior"]
    return build_sfd(
        stocks=ages,
        sum_vars=[("N", ages)],
        params=["behavior", "rAgeChild", "rAgeAdult"],
        aux_vars=[(f"v_{a}", "*", [a, "behavior"]) for a in ages]
        + [
            ("v_ageChild", "*", ["child", "rAgeChild"]),
            ("v_ageAdult", "*", ["adult", "rAgeAdult"]),
        ],
        flows=[(f"behavior_{a}", f"v_{a}", a, a) for a in ages]
        + [
            ("aging_child", "v_ageChild", "child", "adult"),
            ("aging_adult", "v_ageAdult", "adult", "senior"),
        ],
    )


def typing_by_flows(diagram, type_diagram, flow_types):
    """Typing determined by naming the type flow of every flow.

    ``flow_types`` maps flow name -> type flow name; flows pin the rest of
    the map because every other part is reachable from a flow.
    """
    pins = {}
    for fname, tname in flow_types.items():
        pins[diagram.lookup("fname", fname)] = type_diagram.lookup("fname", tname)
    found = find_homomorphisms(diagram, type_diagram, SearchOptions(pins=pins, max_matches=2))
    if len(found) != 1:
        raise ValueError(f"flow pins leave {len(found)} typings")
    return found[0]


def smoking_typings():
    typ = smoking_type_sfd()
    agg = smoking_aggregate_sfd()
    strata = age_strata_sfd()
    agg_types = {f: "f_behavior" for f in ("initiation", "cessation", "relapse")}
    agg_types.update({f"aging{s}": "f_aging" for s in ("NonSmoker", "Smoker", "FormerSmoker")})
    strata_types = {f"behavior_{a}": "f_behavior" for a in ("child", "adult", "senior")}
    strata_types.update({"aging_child": "f_aging", "aging_adult": "f_aging"})
    return (
        typing_by_flows(agg, typ, agg_types),
        typing_by_flows(strata, typ, strata_types),
    )


def _scenario(d):
    from .semantics.ode import Scenario

    return Scenario.from_json(d)


def fixture_bodies():
    """Name -> model body for every bundled JSON fixture, in a fixed order."""
    typ = smoking_type_sfd()
    agg = smoking_aggregate_sfd()
    strata = age_strata_sfd()
    t_agg, t_strata = smoking_typings()
    sir_to_sv = open_sir().feet[1]
    return {
        "sir": sir_sfd(),
        "sv": sv_sfd(),
        "first_order_delay": first_order_delay(),
        "open_sir": open_sir(),
        "open_sv": open_sv(),
        "s_n_identity": Homomorphism(sir_to_sv, open_sv().feet[0], {"S": (1,), "SV": (1,), "LS": (1,)}),
        "sir_scenario": _scenario(SIR_SCENARIO),
        "sirv_scenario": _scenario(SIRV_SCENARIO),
        "smoking_cld": smoking_cld(),
        "smoking_stress_cld": smoking_stress_cld(),
        "open_smoking_cld": open_smoking_cld(),
        "open_smoking_stress_cld": open_smoking_stress_cld(),
        "elaborate_smoking_cld": elaborate_smoking_cld(),
        "addiction_loop_cld": addiction_loop_cld(" 1"),
        "smoking_type": typ,
        "smoking_aggregate": agg,
        "age_strata": strata,
        "typing_smoking_aggregate": t_agg,
        "typing_age_strata": t_strata,
    }


def write_fixtures(directory):
    """Write every fixture as ``<name>.json``; returns the paths."""
    import os

    from .io import save_model

    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, body in fixture_bodies().items():
        path = os.path.join(directory, f"{name}.json")
        save_model(body, path)
        paths.append(path)
    return paths
