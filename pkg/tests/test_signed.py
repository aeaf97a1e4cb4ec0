import random

import networkx as nx
import pytest

from catflow.errors import CatflowError
from catflow.homs import find_homomorphisms
from catflow.models import addiction_loop_cld, elaborate_smoking_cld, smoking_cld
from catflow.signed import (
    SignedGraph,
    SignedPath,
    distinct_images,
    enumerate_implied_links,
    find_feedback_loops,
    johnson_cycles,
    match_signed_pattern,
    path_sign,
    simple_cycles,
    to_dot,
)


def graph(n, edges):
    return SignedGraph(tuple(f"v{i}" for i in range(n)), tuple(edges))


def random_graph(rng, n_max=5, e_max=8):
    n = rng.randint(1, n_max)
    edges = [(rng.randrange(n), rng.randrange(n), rng.choice("+-")) for _ in range(rng.randint(0, e_max))]
    return graph(n, edges)


def test_path_sign():
    g = graph(3, [(0, 1, "+"), (1, 2, "+"), (1, 2, "-")])
    assert path_sign(g, [0, 1]) == "+"
    assert path_sign(g, [0, 2]) == "-"
    assert path_sign(g, []) == "+"
    assert path_sign(g, SignedPath((), start=1)) == "+"
    with pytest.raises(CatflowError):
        path_sign(g, [1, 0])


def test_smoking_reinforcing_loop():
    g = SignedGraph.from_cld(smoking_cld())
    loops = find_feedback_loops(g, "+", 8)
    assert [c.names(g) for c in loops] == [["Nicotine Addiction", "Smoking"]]
    bal = find_feedback_loops(g, "-", 8)
    assert [c.names(g) for c in bal] == [["Smoking", "Health", "CommitmentToCessation"]]


def test_acyclic_and_sign_product():
    assert find_feedback_loops(graph(3, [(0, 1, "+"), (1, 2, "-")]), None, 8) == []
    tri = graph(3, [(0, 1, "+"), (1, 2, "+"), (2, 0, "-")])
    assert len(find_feedback_loops(tri, "-", 8)) == 1
    assert find_feedback_loops(tri, "+", 8) == []
    assert find_feedback_loops(tri, "-", 2) == []


def test_self_loops_and_parallel_edges():
    g = graph(2, [(0, 0, "-"), (0, 1, "+"), (1, 0, "+"), (1, 0, "-")])
    cycles = simple_cycles(g)
    assert [(c.vertices, c.edges, c.sign) for c in cycles] == [
        ((0,), (0,), "-"),
        ((0, 1), (1, 2), "+"),
        ((0, 1), (1, 3), "-"),
    ]


@pytest.mark.parametrize("seed", range(30))
def test_cycles_match_networkx(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 6, 10)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(g.vertices)))
    dg.add_edges_from((s, t) for s, t, _ in g.edges)
    expected = set()
    for cyc in nx.simple_cycles(dg):
        k = cyc.index(min(cyc))
        expected.add(tuple(cyc[k:] + cyc[:k]))
    assert set(johnson_cycles(g)) == expected
    for L in range(1, 4):
        bounded = {c.vertices for c in simple_cycles(g, L)}
        assert bounded == {c for c in expected if len(c) <= L}


def test_implied_link_in_elaborate_cld():
    g = SignedGraph.from_cld(elaborate_smoking_cld())
    names = g.vertices
    implied = {(names[s], names[t], sg, tuple(names[g.edges[e][1]] for e in p[:-1])) for s, t, sg, p in enumerate_implied_links(g, 8)}
    assert ("Smoking 2", "Nicotine Addiction 2", "+", ("Nicotine Level in Body",)) in implied
    assert len(implied) == 3


def test_implied_links_trivial_cases():
    assert enumerate_implied_links(graph(2, [(0, 1, "+")]), 8) == []
    g = graph(4, [(0, 1, "+"), (1, 3, "+"), (0, 2, "+"), (2, 3, "-")])
    found = [(s, t, sg) for s, t, sg, _ in enumerate_implied_links(g, 8)]
    assert sorted(found) == [(0, 3, "+"), (0, 3, "-")]


def test_pattern_into_elaborate_cld():
    pat = SignedGraph.from_cld(addiction_loop_cld(" 1"))
    tgt = SignedGraph.from_cld(elaborate_smoking_cld())
    na2, s2 = tgt.vertices.index("Nicotine Addiction 2"), tgt.vertices.index("Smoking 2")
    pinned = match_signed_pattern(pat, tgt, 8, pins={0: na2, 1: s2})
    assert len(pinned) == 1
    lengths = sorted(len(p) for p in pinned[0].edge_paths)
    assert lengths == [1, 2]
    every = match_signed_pattern(pat, tgt, 8)
    assert len(distinct_images(every)) == 1  # one occurrence, seen from each rotation


def test_pattern_into_itself_contains_identity():
    g = SignedGraph.from_cld(smoking_cld())
    ms = match_signed_pattern(g, g, 3)
    ident = tuple((e,) for e in range(len(g.edges)))
    assert any(m.vertex_map == tuple(range(len(g.vertices))) and m.edge_paths == ident for m in ms)


def test_negative_self_loop_no_match():
    pat = graph(1, [(0, 0, "-")])
    tgt = SignedGraph.from_cld(elaborate_smoking_cld())
    assert match_signed_pattern(pat, tgt, 8) == []
    pos = graph(1, [(0, 0, "+")])
    assert len(match_signed_pattern(pos, tgt, 8)) == 3


@pytest.mark.parametrize("seed", range(25))
def test_length_one_agrees_with_hom_search(seed):
    rng = random.Random(seed)
    pat, tgt = random_graph(rng, 3, 4), random_graph(rng, 4, 7)
    ours = {
        (tuple(v + 1 for v in m.vertex_map), tuple(p[0] + 1 for p in m.edge_paths))
        for m in match_signed_pattern(pat, tgt, 1)
    }
    homs = {(h["V"], h["L"]) for h in find_homomorphisms(pat.to_cld(), tgt.to_cld())}
    assert ours == homs


def test_cld_roundtrip():
    cld = smoking_cld()
    assert SignedGraph.from_cld(cld).to_cld() == cld


def test_dot_output():
    g = SignedGraph.from_cld(elaborate_smoking_cld())
    dot = to_dot(g, enumerate_implied_links(g, 8), find_feedback_loops(g, "+", 8))
    assert dot.startswith('digraph "cld" {') and dot.rstrip().endswith("}")
    assert dot.count("style=dashed") == 3
    assert dot.count('label="+"') == 6
