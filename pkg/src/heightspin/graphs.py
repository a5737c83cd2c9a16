"""Finite multigraphs with a distinguished boundary vertex.

Conventions used throughout the package:

* Vertices are integers ``0 .. n_vertices-1``; one of them is the boundary
  vertex ``boundary`` (written ``@`` in serialized files).
* Edges are stored once with a fixed orientation ``tails[i] -> heads[i]``.
  A 1-form is a vector indexed by edge; its value on the reversed edge is
  the negation of the stored value.
* Parallel edges are first class (several edges may share endpoints);
  self-loops are never stored (construction helpers delete them).
* Each edge carries a potential id, a key into a potential registry that
  is resolved when a model is built.

Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FiniteGraph",
    "build_path",
    "build_cycle",
    "build_star",
    "build_torus",
    "build_wired_box",
    "from_edges",
    "graph_to_text",
    "graph_from_text",
    "NEAREST_NEIGHBOR",
    "RANGE_TWO",
    "TorusLayout",
]

# Neighbor offset sets for box builders. Only offsets with a positive
# leading nonzero component are listed so each undirected edge appears once.
NEAREST_NEIGHBOR = ((1, 0), (0, 1))
RANGE_TWO = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2))


@dataclass(eq=False)
class FiniteGraph:
    """A connected finite multigraph with oriented edges and a boundary vertex."""

    n_vertices: int
    tails: np.ndarray
    heads: np.ndarray
    boundary: int
    potential_ids: tuple[str, ...]
    name: str = ""
    coords: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.tails = np.asarray(self.tails, dtype=np.int64)
        self.heads = np.asarray(self.heads, dtype=np.int64)
        if self.tails.shape != self.heads.shape:
            raise ValueError("tails and heads must have equal length")
        if len(self.potential_ids) != self.n_edges:
            raise ValueError("one potential id per edge required")
        if not (0 <= self.boundary < self.n_vertices):
            raise ValueError(f"boundary vertex {self.boundary} out of range")
        if np.any(self.tails == self.heads):
            raise ValueError("self-loops are not allowed")
        if self.n_edges and (self.tails.min() < 0 or
                             max(self.tails.max(), self.heads.max()) >= self.n_vertices):
            raise ValueError("edge endpoint out of range")
        if not self._connected():
            raise ValueError("graph must be connected")
        self.tails.setflags(write=False)
        self.heads.setflags(write=False)

    def _connected(self) -> bool:
        if self.n_vertices == 1:
            return True
        seen = np.zeros(self.n_vertices, dtype=bool)
        seen[self.boundary] = True
        stack = [self.boundary]
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for t, h in zip(self.tails, self.heads):
            adj[t].append(h)
            adj[h].append(t)
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        return bool(seen.all())

    @property
    def n_edges(self) -> int:
        return len(self.tails)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.tails, 1)
        np.add.at(deg, self.heads, 1)
        return deg

    def neighbors(self, v: int) -> list[int]:
        """Distinct neighbor vertices of ``v`` in edge-storage order."""
        out: list[int] = []
        for t, h in zip(self.tails, self.heads):
            u = h if t == v else (t if h == v else None)
            if u is not None and u not in out:
                out.append(u)
        return out

    def incident_edges(self, v: int) -> list[int]:
        return [i for i in range(self.n_edges)
                if self.tails[i] == v or self.heads[i] == v]

    def edge_count_between(self, u: int, v: int) -> int:
        return int(np.sum(((self.tails == u) & (self.heads == v))
                          | ((self.tails == v) & (self.heads == u))))

    def with_potentials(self, potential_ids) -> "FiniteGraph":
        ids = tuple(potential_ids)
        if len(ids) == 1:
            ids = ids * self.n_edges
        return FiniteGraph(self.n_vertices, self.tails.copy(), self.heads.copy(),
                           self.boundary, ids, name=self.name, coords=dict(self.coords))

    def __repr__(self):
        label = self.name or "graph"
        return f"FiniteGraph({label}: V={self.n_vertices}, E={self.n_edges}, boundary={self.boundary})"


def from_edges(n_vertices: int, edges, boundary: int = 0, potential_id: str = "default",
               name: str = "", coords=None) -> FiniteGraph:
    """Build a graph from an iterable of (tail, head) pairs, one potential id for all."""
    edges = list(edges)
    tails = np.array([e[0] for e in edges], dtype=np.int64)
    heads = np.array([e[1] for e in edges], dtype=np.int64)
    return FiniteGraph(n_vertices, tails, heads, boundary,
                       (potential_id,) * len(edges), name=name, coords=coords or {})


def build_path(n_vertices: int, potential_id: str = "default") -> FiniteGraph:
    """Path on ``n_vertices`` vertices; the first vertex is the boundary."""
    if n_vertices < 2:
        raise ValueError("a path needs at least 2 vertices")
    return from_edges(n_vertices, [(i, i + 1) for i in range(n_vertices - 1)],
                      name=f"path{n_vertices}", potential_id=potential_id)


def build_cycle(n_vertices: int, potential_id: str = "default") -> FiniteGraph:
    """Cycle on ``n_vertices >= 2`` vertices (n=2 gives a doubled edge)."""
    if n_vertices < 2:
        raise ValueError("a cycle needs at least 2 vertices")
    edges = [(i, (i + 1) % n_vertices) for i in range(n_vertices)]
    # normalize the wrap edge orientation for n=2 so both parallels are 0->1
    if n_vertices == 2:
        edges = [(0, 1), (0, 1)]
    return from_edges(n_vertices, edges, name=f"cycle{n_vertices}",
                      potential_id=potential_id)


def build_star(n_leaves: int, potential_id: str = "default") -> FiniteGraph:
    """Star with the center as boundary vertex."""
    if n_leaves < 1:
        raise ValueError("a star needs at least one leaf")
    return from_edges(n_leaves + 1, [(0, i + 1) for i in range(n_leaves)],
                      name=f"star{n_leaves}", potential_id=potential_id)


class TorusLayout:
    """Coordinate bookkeeping for the square torus built by :func:`build_torus`.

    Vertices are ``(x, y)`` with index ``x * side + y``.  Edges come in two
    families: horizontal edges ``(x, y) -> (x+1, y)`` stored first, then
    vertical edges ``(x, y) -> (x, y+1)``, both wrapping modulo ``side``.
    """

    def __init__(self, side: int):
        self.side = side

    def vertex(self, x: int, y: int) -> int:
        s = self.side
        return (x % s) * s + (y % s)

    def horizontal_edge(self, x: int, y: int) -> int:
        s = self.side
        return (x % s) * s + (y % s)

    def vertical_edge(self, x: int, y: int) -> int:
        s = self.side
        return s * s + (x % s) * s + (y % s)

    def horizontal_path(self, n: int, x0: int = 0, y0: int = 0) -> list[int]:
        """Edge indices of the directed horizontal path of length ``n`` from (x0, y0)."""
        return [self.horizontal_edge(x0 + i, y0) for i in range(n)]

    def column_reflection_maps(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Reflection x -> -x through the column of vertical edges at x = 0.

        Returns (vertex_perm, edge_perm, edge_signs): the vertex permutation,
        the induced edge permutation, and the orientation sign picked up by a
        1-form on each edge.
        """
        s = self.side
        vperm = np.empty(s * s, dtype=np.int64)
        eperm = np.empty(2 * s * s, dtype=np.int64)
        esign = np.empty(2 * s * s, dtype=np.float64)
        for x in range(s):
            for y in range(s):
                vperm[self.vertex(x, y)] = self.vertex(-x, y)
                # horizontal (x,y)->(x+1,y) maps to (-x,y)->(-x-1,y),
                # i.e. the stored edge (-x-1, y)->(-x, y) reversed.
                eperm[self.horizontal_edge(x, y)] = self.horizontal_edge(-x - 1, y)
                esign[self.horizontal_edge(x, y)] = -1.0
                eperm[self.vertical_edge(x, y)] = self.vertical_edge(-x, y)
                esign[self.vertical_edge(x, y)] = 1.0
        return vperm, eperm, esign


def build_torus(side: int, potential_id: str = "default") -> FiniteGraph:
    """Square torus of linear size ``side`` (so ``side**2`` vertices, ``2 side**2`` edges).

    The origin is the distinguished vertex usable as the boundary for
    height pinning and as the spanning-tree root.
    """
    if side < 2:
        raise ValueError("torus side must be at least 2")
    lay = TorusLayout(side)
    edges = []
    for x in range(side):
        for y in range(side):
            edges.append((lay.vertex(x, y), lay.vertex(x + 1, y)))
    for x in range(side):
        for y in range(side):
            edges.append((lay.vertex(x, y), lay.vertex(x, y + 1)))
    coords = {lay.vertex(x, y): (x, y) for x in range(side) for y in range(side)}
    return from_edges(side * side, edges, name=f"torus{side}",
                      potential_id=potential_id, coords=coords)


def build_wired_box(n: int, offsets=NEAREST_NEIGHBOR, potential_id: str = "default") -> FiniteGraph:
    """Box ``[-n, n]^2`` of the square lattice with wired exterior.

    All lattice edges leaving the box are rerouted to a single boundary
    vertex; self-loops created by the wiring are dropped (they never arise
    here) and parallel wired edges are kept.  ``offsets`` selects the
    interaction range, e.g. :data:`NEAREST_NEIGHBOR` or :data:`RANGE_TWO`.
    """
    if n < 0:
        raise ValueError("box radius must be nonnegative")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)]
    index = {p: i + 1 for i, p in enumerate(pts)}  # 0 is the wired boundary
    edges = []
    for (x, y) in pts:
        for (dx, dy) in offsets:
            q = (x + dx, y + dy)
            edges.append((index[(x, y)], index.get(q, 0)))
        # offsets only cover "forward" directions; backward neighbors outside
        # the box still contribute wired edges.
        for (dx, dy) in offsets:
            q = (x - dx, y - dy)
            if q not in index:
                edges.append((index[(x, y)], 0))
    coords = {index[p]: p for p in pts}
    return from_edges(len(pts) + 1, edges, boundary=0, potential_id=potential_id,
                      name=f"wired_box{n}", coords=coords)


def graph_to_text(g: FiniteGraph) -> str:
    """Serialize to the line format ``v/e/boundary`` (plus optional coord lines)."""
    out = io.StringIO()
    for v in range(g.n_vertices):
        out.write(f"v {v}\n")
    for i in range(g.n_edges):
        out.write(f"e {g.tails[i]} {g.heads[i]} {g.potential_ids[i]}\n")
    out.write(f"boundary {g.boundary}\n")
    for v in sorted(g.coords):
        xy = " ".join(str(c) for c in g.coords[v])
        out.write(f"coord {v} {xy}\n")
    return out.getvalue()


def graph_from_text(text: str, name: str = "") -> FiniteGraph:
    """Parse the serialization produced by :func:`graph_to_text`."""
    vertices: list[int] = []
    edges: list[tuple[int, int]] = []
    pids: list[str] = []
    boundary = None
    coords: dict[int, tuple[int, ...]] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v":
            vertices.append(int(parts[1]))
        elif kind == "e":
            if len(parts) != 4:
                raise ValueError(f"line {ln}: edge lines are 'e <tail> <head> <potential-id>'")
            edges.append((int(parts[1]), int(parts[2])))
            pids.append(parts[3])
        elif kind == "boundary":
            boundary = int(parts[1])
        elif kind == "coord":
            coords[int(parts[1])] = tuple(int(c) for c in parts[2:])
        else:
            raise ValueError(f"line {ln}: unknown record {kind!r}")
    if boundary is None:
        raise ValueError("missing boundary line")
    if sorted(vertices) != list(range(len(vertices))):
        raise ValueError("vertex ids must be 0..n-1, each declared once")
    tails = np.array([e[0] for e in edges], dtype=np.int64)
    heads = np.array([e[1] for e in edges], dtype=np.int64)
    return FiniteGraph(len(vertices), tails, heads, boundary, tuple(pids),
                       name=name, coords=coords)
