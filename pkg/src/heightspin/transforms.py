"""Graph surgery that controls the height-function variance: edge splitting
(exact), vertex gluing (variance non-increasing), degree reduction, the full
star-tree transform to maximum neighbor count three, parallel-edge merging
and planarization of range-two lattice boxes.

Each operation returns a :class:`TransformResult` carrying the new graph, a
registry of the potential pairs it references, the map from original to new
vertex indices, and a replayable log.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import FiniteGraph
from .potentials import PotentialPair, merge_parallel, split_potential

__all__ = [
    "TransformResult",
    "TransformLog",
    "resolve_pairs",
    "split_edge",
    "glue_vertices",
    "degree_reduce",
    "star_tree_transform",
    "planarize_long_range",
    "merge_parallel_edges",
    "simple_support_size",
    "euler_planar_bound",
    "replay",
]


@dataclass
class TransformLog:
    """Ordered list of applied operations with their parameters."""

    steps: list[tuple[str, tuple]] = field(default_factory=list)

    def record(self, op: str, *params):
        self.steps.append((op, params))

    def extend(self, other: "TransformLog"):
        self.steps.extend(other.steps)

    def to_text(self) -> str:
        return "\n".join(f"{op} {' '.join(str(p) for p in ps)}" for op, ps in self.steps)

    @staticmethod
    def from_text(text: str) -> "TransformLog":
        log = TransformLog()
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            log.record(parts[0], *[int(p) for p in parts[1:]])
        return log


@dataclass
class TransformResult:
    graph: FiniteGraph
    registry: dict[str, PotentialPair]
    vertex_map: np.ndarray  # original vertex index -> new vertex index
    log: TransformLog


def resolve_pairs(graph: FiniteGraph, registry: dict[str, PotentialPair]) -> list[PotentialPair]:
    return [registry[pid] for pid in graph.potential_ids]


def _register(registry: dict[str, PotentialPair], pair: PotentialPair) -> str:
    """Deterministic id for a pair: its label, disambiguated on collision."""
    base = pair.label()
    pid = base
    k = 1
    while pid in registry and registry[pid] is not pair and registry[pid].height.table != pair.height.table:
        pid = f"{base}#{k}"
        k += 1
    registry[pid] = pair
    return pid


def _rebuild(graph, n_vertices, edges, pids, boundary, name, coords) -> FiniteGraph:
    tails = np.array([e[0] for e in edges], dtype=np.int64)
    heads = np.array([e[1] for e in edges], dtype=np.int64)
    return FiniteGraph(n_vertices, tails, heads, boundary, tuple(pids),
                       name=name, coords=coords)


def split_edge(graph: FiniteGraph, registry: dict[str, PotentialPair],
               edge: int, k: int) -> TransformResult:
    """Replace an edge by a path of k sub-edges whose potentials convolve
    back to the original; the joint law of the original vertices is
    unchanged.  Requires a potential with a temperature scale."""
    if k < 2:
        raise ValueError("k must be at least 2")
    registry = dict(registry)
    pair = registry[graph.potential_ids[edge]]
    sub = split_potential(pair, k)
    sub_id = _register(registry, sub)

    edges, pids = [], []
    for i in range(graph.n_edges):
        if i == edge:
            continue
        edges.append((int(graph.tails[i]), int(graph.heads[i])))
        pids.append(graph.potential_ids[i])
    t, h = int(graph.tails[edge]), int(graph.heads[edge])
    chain = [t] + [graph.n_vertices + j for j in range(k - 1)] + [h]
    for a, b in zip(chain, chain[1:]):
        edges.append((a, b))
        pids.append(sub_id)
    g2 = _rebuild(graph, graph.n_vertices + k - 1, edges, pids, graph.boundary,
                  f"{graph.name}+split", dict(graph.coords))
    log = TransformLog()
    log.record("split", edge, k)
    return TransformResult(g2, registry, np.arange(graph.n_vertices), log)


def glue_vertices(graph: FiniteGraph, registry: dict[str, PotentialPair],
                  v1: int, v2: int) -> TransformResult:
    """Identify two vertices; the merged vertex inherits all edges and any
    self-loops created by the identification are deleted."""
    if v1 == v2:
        raise ValueError("cannot glue a vertex to itself")
    keep = min(v1, v2)
    drop = max(v1, v2)
    vmap = np.empty(graph.n_vertices, dtype=np.int64)
    for v in range(graph.n_vertices):
        u = keep if v == drop else v
        vmap[v] = u - (1 if u > drop else 0)
    edges, pids = [], []
    for i in range(graph.n_edges):
        t, h = vmap[graph.tails[i]], vmap[graph.heads[i]]
        if t == h:
            continue
        edges.append((int(t), int(h)))
        pids.append(graph.potential_ids[i])
    coords = {int(vmap[v]): xy for v, xy in graph.coords.items() if v != drop}
    g2 = _rebuild(graph, graph.n_vertices - 1, edges, pids,
                  int(vmap[graph.boundary]), f"{graph.name}+glue", coords)
    log = TransformLog()
    log.record("glue", v1, v2)
    return TransformResult(g2, dict(registry), vmap, log)


def degree_reduce(graph: FiniteGraph, registry: dict[str, PotentialPair],
                  v0: int) -> TransformResult:
    """One halving pass of the neighbor count at v0.

    Neighbors are taken in edge-storage order (the stand-in for a cyclic
    order on abstract graphs), the last one is left out when their number
    is odd, every edge toward a labeled neighbor is subdivided with the
    half-temperature potential on both halves, and the midpoints of each
    consecutive neighbor pair are glued into a single new vertex.
    """
    registry = dict(registry)
    nbrs = graph.neighbors(v0)
    log = TransformLog()
    log.record("degree_reduce", v0)
    if len(nbrs) < 4:
        return TransformResult(graph, registry, np.arange(graph.n_vertices), log)
    labeled = nbrs[:len(nbrs) - (len(nbrs) % 2)]
    group_of = {v: graph.n_vertices + i // 2 for i, v in enumerate(labeled)}

    edges, pids = [], []
    for i in range(graph.n_edges):
        t, h = int(graph.tails[i]), int(graph.heads[i])
        other = h if t == v0 else (t if h == v0 else None)
        if other is None or other not in group_of:
            edges.append((t, h))
            pids.append(graph.potential_ids[i])
            continue
        half = split_potential(registry[graph.potential_ids[i]], 2)
        hid = _register(registry, half)
        x = group_of[other]
        edges.append((v0, x))
        pids.append(hid)
        edges.append((x, other))
        pids.append(hid)
    g2 = _rebuild(graph, graph.n_vertices + len(labeled) // 2, edges, pids,
                  graph.boundary, f"{graph.name}+reduce", dict(graph.coords))
    return TransformResult(g2, registry, np.arange(graph.n_vertices), log)


def merge_parallel_edges(graph: FiniteGraph,
                         registry: dict[str, PotentialPair]) -> TransformResult:
    """Collapse parallel edges into single edges with the entrywise product
    of their weight tables (height energies add)."""
    registry = dict(registry)
    groups: dict[tuple[int, int], list[int]] = {}
    for i in range(graph.n_edges):
        key = (min(graph.tails[i], graph.heads[i]), max(graph.tails[i], graph.heads[i]))
        groups.setdefault((int(key[0]), int(key[1])), []).append(i)
    edges, pids = [], []
    for (a, b), members in sorted(groups.items()):
        pair = registry[graph.potential_ids[members[0]]]
        for j in members[1:]:
            pair = merge_parallel(pair, registry[graph.potential_ids[j]])
        pid = _register(registry, pair)
        edges.append((a, b))
        pids.append(pid)
    g2 = _rebuild(graph, graph.n_vertices, edges, pids, graph.boundary,
                  f"{graph.name}+merged", dict(graph.coords))
    log = TransformLog()
    log.record("merge_parallel")
    return TransformResult(g2, registry, np.arange(graph.n_vertices), log)


def star_tree_transform(graph: FiniteGraph,
                        registry: dict[str, PotentialPair]) -> TransformResult:
    """Iterate degree reduction over all non-boundary vertices until every
    one of them has at most three neighbors, then merge parallel edges.

    The height variance at any original vertex is not increased, and the
    resulting potentials are entrywise powers of half-temperature splits of
    the originals.
    """
    g, reg = graph, dict(registry)
    vmap = np.arange(graph.n_vertices)
    log = TransformLog()
    for v in range(graph.n_vertices):
        if v == graph.boundary:
            continue
        while len(g.neighbors(int(vmap[v]))) > 3:
            res = degree_reduce(g, reg, int(vmap[v]))
            g, reg = res.graph, res.registry
            vmap = res.vertex_map[vmap]
            log.extend(res.log)
    res = merge_parallel_edges(g, reg)
    log.extend(res.log)
    return TransformResult(res.graph, res.registry, res.vertex_map[vmap], log)


def _intermediate_vertex(graph: FiniteGraph, t: int, h: int) -> int:
    """Lattice vertex at distance one from both endpoints of a range-two
    edge; ties (the diagonal case) break to the lexicographically smaller
    coordinate."""
    ct, ch = graph.coords[t], graph.coords[h]
    dx, dy = ch[0] - ct[0], ch[1] - ct[1]
    if dx * dx + dy * dy == 4:
        cands = [(ct[0] + dx // 2, ct[1] + dy // 2)]
    elif dx * dx + dy * dy == 2:
        cands = sorted([(ct[0] + dx, ct[1]), (ct[0], ct[1] + dy)])
    else:
        raise ValueError(f"edge {t}-{h} is not a range-two interaction")
    lookup = {xy: v for v, xy in graph.coords.items()}
    for c in cands:
        if c in lookup:
            return lookup[c]
    raise ValueError(f"no lattice vertex between {ct} and {ch}")


def planarize_long_range(graph: FiniteGraph,
                         registry: dict[str, PotentialPair]) -> TransformResult:
    """Subdivide every range-two edge of a coordinate-carrying box graph and
    glue the midpoint to the lattice vertex between its endpoints.

    Edges touching vertices without coordinates (the wired boundary) are
    left as they are.  The output's simple support satisfies the planar
    edge-count bound; parallel edges may appear and are kept.
    """
    registry = dict(registry)
    edges, pids = [], []
    for i in range(graph.n_edges):
        t, h = int(graph.tails[i]), int(graph.heads[i])
        if t not in graph.coords or h not in graph.coords:
            edges.append((t, h))
            pids.append(graph.potential_ids[i])
            continue
        ct, ch = graph.coords[t], graph.coords[h]
        d2 = (ch[0] - ct[0]) ** 2 + (ch[1] - ct[1]) ** 2
        if d2 == 1:
            edges.append((t, h))
            pids.append(graph.potential_ids[i])
            continue
        mid = _intermediate_vertex(graph, t, h)
        half = split_potential(registry[graph.potential_ids[i]], 2)
        hid = _register(registry, half)
        edges.append((t, mid))
        pids.append(hid)
        edges.append((mid, h))
        pids.append(hid)
    g2 = _rebuild(graph, graph.n_vertices, edges, pids, graph.boundary,
                  f"{graph.name}+planar", dict(graph.coords))
    log = TransformLog()
    log.record("planarize")
    return TransformResult(g2, registry, np.arange(graph.n_vertices), log)


def simple_support_size(graph: FiniteGraph) -> int:
    """Number of distinct adjacent vertex pairs (parallel edges collapsed)."""
    return len({(min(t, h), max(t, h)) for t, h in zip(graph.tails, graph.heads)})


def euler_planar_bound(graph: FiniteGraph) -> bool:
    """Necessary planarity condition on the simple support: E <= 3V - 6."""
    if graph.n_vertices < 3:
        return True
    return simple_support_size(graph) <= 3 * graph.n_vertices - 6


def replay(graph: FiniteGraph, registry: dict[str, PotentialPair],
           log: TransformLog) -> TransformResult:
    """Re-apply a recorded sequence of operations to a graph."""
    g, reg = graph, dict(registry)
    vmap = np.arange(graph.n_vertices)
    out_log = TransformLog()
    for op, params in log.steps:
        if op == "split":
            res = split_edge(g, reg, int(params[0]), int(params[1]))
        elif op == "glue":
            res = glue_vertices(g, reg, int(params[0]), int(params[1]))
        elif op == "degree_reduce":
            res = degree_reduce(g, reg, int(params[0]))
        elif op == "merge_parallel":
            res = merge_parallel_edges(g, reg)
        elif op == "planarize":
            res = planarize_long_range(g, reg)
        elif op == "star_tree":
            res = star_tree_transform(g, reg)
        else:
            raise ValueError(f"unknown transform op {op!r}")
        g, reg = res.graph, res.registry
        vmap = res.vertex_map[vmap]
        out_log.extend(res.log)
    return TransformResult(g, reg, vmap, out_log)
