"""Causal loop diagrams as signed categories: path polarities, feedback
loops, implied links, and pattern matching where a pattern edge may map to
a whole path of the target."""

from __future__ import annotations

import itertools
import sys
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .acset import ACSet
from .errors import CatflowError, SchemaError
from .schemas import SchCLD, build_cld

POS, NEG = "+", "-"


def sign_mul(a: str, b: str) -> str:
    return POS if a == b else NEG


@dataclass(frozen=True)
class SignedGraph:
    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[int, int, str], ...]  # 0-based (src, tgt, sign)

    def __post_init__(self):
        n = len(self.vertices)
        for s, t, sg in self.edges:
            if not (0 <= s < n and 0 <= t < n) or sg not in (POS, NEG):
                raise SchemaError(f"bad signed edge {(s, t, sg)}")

    @classmethod
    def from_cld(cls, cld: ACSet) -> "SignedGraph":
        if cld.schema != SchCLD:
            raise SchemaError("signed graphs come from causal loop diagrams")
        sgn = cld.column("sgn")
        edges = tuple(
            (s - 1, t - 1, sgn[p - 1])
            for s, t, p in zip(cld.column("src"), cld.column("tgt"), cld.column("polarity"))
        )
        return cls(tuple(cld.column("vname")), edges)

    def to_cld(self) -> ACSet:
        return build_cld(self.vertices, [(self.vertices[s], self.vertices[t], sg) for s, t, sg in self.edges])

    def successors(self) -> List[List[int]]:
        """Edge indices leaving each vertex, in edge order."""
        out = [[] for _ in self.vertices]
        for e, (s, _, _) in enumerate(self.edges):
            out[s].append(e)
        return out

    def edges_between(self) -> Dict[Tuple[int, int], List[int]]:
        out: Dict[Tuple[int, int], List[int]] = {}
        for e, (s, t, _) in enumerate(self.edges):
            out.setdefault((s, t), []).append(e)
        return out


@dataclass(frozen=True)
class SignedPath:
    """Edge-index sequence; ``start`` identifies the empty path's vertex."""

    edges: Tuple[int, ...]
    start: Optional[int] = None


def path_sign(g: SignedGraph, path) -> str:
    """Product of the edge signs; the empty path is positive."""
    edges = path.edges if isinstance(path, SignedPath) else tuple(path)
    sign = POS
    prev = path.start if isinstance(path, SignedPath) else None
    for e in edges:
        s, t, sg = g.edges[e]
        if prev is not None and s != prev:
            raise CatflowError(f"edge {e} does not start where the previous edge ended")
        sign = sign_mul(sign, sg)
        prev = t
    return sign


def path_vertices(g: SignedGraph, edges: Sequence[int]) -> List[int]:
    if not edges:
        return []
    return [g.edges[edges[0]][0]] + [g.edges[e][1] for e in edges]


@dataclass(frozen=True)
class Cycle:
    vertices: Tuple[int, ...]  # starts at the smallest vertex index
    edges: Tuple[int, ...]
    sign: str

    def names(self, g: SignedGraph) -> List[str]:
        return [g.vertices[v] for v in self.vertices]


# -- cycle enumeration ---------------------------------------------------------

def _vertex_succ(g: SignedGraph) -> List[List[int]]:
    succ = [set() for _ in g.vertices]
    for s, t, _ in g.edges:
        succ[s].add(t)
    return [sorted(x) for x in succ]


def _scc_of(start: int, nodes: set, succ) -> set:
    """Strongly connected component of ``start`` within ``nodes``."""
    fwd = {start}
    dq = deque([start])
    while dq:
        v = dq.popleft()
        for w in succ[v]:
            if w in nodes and w not in fwd:
                fwd.add(w)
                dq.append(w)
    pred = [[] for _ in succ]
    for v in nodes:
        for w in succ[v]:
            if w in nodes:
                pred[w].append(v)
    bwd = {start}
    dq = deque([start])
    while dq:
        v = dq.popleft()
        for w in pred[v]:
            if w not in bwd:
                bwd.add(w)
                dq.append(w)
    return fwd & bwd


def johnson_cycles(g: SignedGraph) -> List[Tuple[int, ...]]:
    """Elementary circuits (vertex tuples, smallest vertex first), Johnson's algorithm."""
    n = len(g.vertices)
    succ = _vertex_succ(g)
    out = []
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 2 * n + 100))
    for s in range(n):
        comp = _scc_of(s, set(range(s, n)), succ)
        if len(comp) == 1 and s not in succ[s]:
            continue
        adj = {v: [w for w in succ[v] if w in comp] for v in comp}
        blocked = {v: False for v in comp}
        B = {v: set() for v in comp}
        stack = []

        def unblock(u):
            work = [u]
            while work:
                x = work.pop()
                if blocked[x]:
                    blocked[x] = False
                    work.extend(B[x])
                    B[x].clear()

        def circuit(v):
            found = False
            stack.append(v)
            blocked[v] = True
            for w in adj[v]:
                if w == s:
                    out.append(tuple(stack))
                    found = True
                elif not blocked[w] and circuit(w):
                    found = True
            if found:
                unblock(v)
            else:
                for w in adj[v]:
                    B[w].add(v)
            stack.pop()
            return found

        circuit(s)
    return out


def bounded_cycles(g: SignedGraph, max_len: int) -> List[Tuple[int, ...]]:
    """Elementary circuits with at most ``max_len`` edges (depth-bounded DFS)."""
    n = len(g.vertices)
    succ = _vertex_succ(g)
    pred = [[] for _ in range(n)]
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)
    out = []
    for s in range(n):
        # distance from each vertex >= s back to s
        dist = {s: 0}
        dq = deque([s])
        while dq:
            v = dq.popleft()
            for u in pred[v]:
                if u >= s and u not in dist:
                    dist[u] = dist[v] + 1
                    dq.append(u)
        path = [s]
        on_path = {s}

        def dfs(v):
            for w in succ[v]:
                if w == s:
                    out.append(tuple(path))
                elif w > s and w not in on_path and w in dist and len(path) + dist[w] <= max_len:
                    path.append(w)
                    on_path.add(w)
                    dfs(w)
                    path.pop()
                    on_path.discard(w)

        dfs(s)
    return out


def _expand(g: SignedGraph, vcycles: Iterable[Tuple[int, ...]]) -> List[Cycle]:
    between = g.edges_between()
    out = []
    for vc in vcycles:
        hops = [between[(vc[i], vc[(i + 1) % len(vc)])] for i in range(len(vc))]
        for choice in itertools.product(*hops):
            sign = POS
            for e in choice:
                sign = sign_mul(sign, g.edges[e][2])
            out.append(Cycle(tuple(vc), tuple(choice), sign))
    out.sort(key=lambda c: (c.vertices, c.edges))
    return out


def simple_cycles(g: SignedGraph, max_len: Optional[int] = None) -> List[Cycle]:
    """Every simple cycle (as an edge sequence), optionally length-bounded."""
    n = len(g.vertices)
    if max_len is None or max_len >= n:
        return _expand(g, johnson_cycles(g))
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    return _expand(g, bounded_cycles(g, max_len))


def find_feedback_loops(g: SignedGraph, want: Optional[str], max_len: int = 8) -> List[Cycle]:
    """Simple cycles of at most ``max_len`` links whose net sign is ``want``
    (``None`` for both signs); reinforcing loops are ``+``, balancing ``-``."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    return [c for c in simple_cycles(g, max_len) if want is None or c.sign == want]


# -- paths ---------------------------------------------------------------------

def _paths_from(g: SignedGraph, u: int, max_len: int, succ_edges) -> List[Tuple[int, ...]]:
    """Simple paths from ``u`` of 1..max_len edges; closed ones end back at ``u``."""
    out = []
    path: List[int] = []
    on_path = {u}

    def dfs(v):
        for e in succ_edges[v]:
            w = g.edges[e][1]
            if w == u:
                out.append(tuple(path + [e]))
            elif w not in on_path:
                path.append(e)
                out.append(tuple(path))
                if len(path) < max_len:
                    on_path.add(w)
                    dfs(w)
                    on_path.discard(w)
                path.pop()

    if max_len >= 1:
        dfs(u)
    return out


def enumerate_implied_links(g: SignedGraph, max_len: int = 8):
    """``(src, tgt, sign, edges)`` for every open simple path of 2..max_len links."""
    if max_len < 2:
        raise ValueError("implied links need max_len >= 2")
    succ = g.successors()
    out = []
    for u in range(len(g.vertices)):
        for p in _paths_from(g, u, max_len, succ):
            tgt = g.edges[p[-1]][1]
            if len(p) >= 2 and tgt != u:
                out.append((u, tgt, path_sign(g, p), p))
    out.sort(key=lambda r: (r[0], r[3]))
    return out


@dataclass(frozen=True)
class PathPatternMatch:
    vertex_map: Tuple[int, ...]
    edge_paths: Tuple[Tuple[int, ...], ...]

    def image_edges(self) -> frozenset:
        return frozenset(e for p in self.edge_paths for e in p)


def match_signed_pattern(
    pattern: SignedGraph,
    target: SignedGraph,
    max_path_len: int = 8,
    injective: bool = False,
    pins: Optional[Mapping[int, int]] = None,
    max_matches: int = 10_000,
) -> List[PathPatternMatch]:
    """Maps sending vertices to vertices and each pattern edge to a simple
    target path (1..max_path_len links) between the image endpoints with the
    same net sign. A pattern self-loop maps to a closed simple path."""
    if max_path_len < 1:
        raise ValueError("max_path_len must be at least 1")
    pins = dict(pins or {})
    succ = target.successors()
    by_ends: Dict[Tuple[int, int, str], List[Tuple[int, ...]]] = {}
    for u in range(len(target.vertices)):
        for p in _paths_from(target, u, max_path_len, succ):
            key = (u, target.edges[p[-1]][1], path_sign(target, p))
            by_ends.setdefault(key, []).append(p)

    npv = len(pattern.vertices)
    # edges checkable once both endpoints are mapped, indexed by the later vertex
    ready: List[List[int]] = [[] for _ in range(npv)]
    for e, (s, t, _) in enumerate(pattern.edges):
        ready[max(s, t)].append(e)
    vmap: List[int] = [-1] * npv
    results: List[PathPatternMatch] = []

    def extend(i):
        if len(results) >= max_matches:
            return
        if i == npv:
            choices = [by_ends[(vmap[s], vmap[t], sg)] for s, t, sg in pattern.edges]
            for combo in itertools.product(*choices):
                results.append(PathPatternMatch(tuple(vmap), tuple(combo)))
                if len(results) >= max_matches:
                    return
            return
        cands = [pins[i]] if i in pins else range(len(target.vertices))
        for v in cands:
            if injective and v in vmap[:i]:
                continue
            vmap[i] = v
            if all((vmap[pattern.edges[e][0]], vmap[pattern.edges[e][1]], pattern.edges[e][2]) in by_ends for e in ready[i]):
                extend(i + 1)
        vmap[i] = -1

    extend(0)
    results.sort(key=lambda m: (m.vertex_map, m.edge_paths))
    return results


def distinct_images(matches: Iterable[PathPatternMatch]) -> List[frozenset]:
    """Occurrences of a pattern: matches grouped by the set of target links they use."""
    seen = []
    for m in matches:
        img = m.image_edges()
        if img not in seen:
            seen.append(img)
    return seen


# -- reports -------------------------------------------------------------------

def loops_report(g: SignedGraph, loops: Sequence[Cycle]) -> list:
    return [{"vertices": c.names(g), "sign": c.sign, "length": len(c.edges)} for c in loops]


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: SignedGraph, implied: Sequence = (), loops: Sequence[Cycle] = (), name: str = "cld") -> str:
    """Primitive links solid blue, implied links dashed magenta, loop links red."""
    loop_edges = {e for c in loops for e in c.edges}
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for v in g.vertices:
        lines.append(f"  {_dot_id(v)};")
    for e, (s, t, sg) in enumerate(g.edges):
        color = "red" if e in loop_edges else "blue"
        lines.append(f"  {_dot_id(g.vertices[s])} -> {_dot_id(g.vertices[t])} [label={_dot_id(sg)}, color={color}];")
    for s, t, sg, _ in implied:
        lines.append(
            f"  {_dot_id(g.vertices[s])} -> {_dot_id(g.vertices[t])} [label={_dot_id(sg)}, color=magenta, style=dashed];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
