"""Discrete calculus on finite graphs: d, d*, Laplacian, Green's function,
Hodge projections and the spanning-tree gauge for co-closed 1-forms.

A 0-form is a float/int vector indexed by vertex, a 1-form a vector indexed
by stored edge (values on reversed edges are implied by antisymmetry).  The
inner products are the plain dot products over vertices and stored edges.
All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import FiniteGraph

__all__ = [
    "d",
    "d_star",
    "incidence",
    "laplacian",
    "GreenSolver",
    "green_solve",
    "green_matrix",
    "hodge_project",
    "TreeGauge",
    "tree_gauge",
    "wrap_angle",
]


def incidence(g: FiniteGraph) -> np.ndarray:
    """Signed incidence matrix B of shape (E, V): B[e, head]=+1, B[e, tail]=-1.

    d f = B f and d* omega = B^T omega, which makes the adjointness
    (df, omega)_1 = (f, d* omega)_0 automatic.
    """
    B = np.zeros((g.n_edges, g.n_vertices), dtype=np.float64)
    rows = np.arange(g.n_edges)
    np.add.at(B, (rows, g.heads), 1.0)
    np.add.at(B, (rows, g.tails), -1.0)
    return B


def d(g: FiniteGraph, f: np.ndarray) -> np.ndarray:
    """Coboundary: (df)_{xy} = f_y - f_x on each stored edge x -> y."""
    f = np.asarray(f)
    return f[g.heads] - f[g.tails]


def d_star(g: FiniteGraph, omega: np.ndarray) -> np.ndarray:
    """Boundary: (d* omega)_x = sum over edges at x of the value flowing into x."""
    omega = np.asarray(omega, dtype=np.float64)
    out = np.zeros(g.n_vertices, dtype=np.float64)
    np.add.at(out, g.heads, omega)
    np.add.at(out, g.tails, -omega)
    return out


def laplacian(g: FiniteGraph) -> np.ndarray:
    """Graph Laplacian d* d as a dense (V, V) matrix."""
    B = incidence(g)
    return B.T @ B


# Above this size the dense inverse is replaced by conjugate gradients.
_DENSE_LIMIT = 2000


class GreenSolver:
    """Solver for the Laplacian with Dirichlet condition at the boundary vertex.

    Solves Delta u = f on V \\ {boundary} with u(boundary) = 0.  For graphs
    up to ``_DENSE_LIMIT`` vertices the reduced inverse is precomputed once,
    which makes repeated solves (e.g. per Monte Carlo sample) a matmul.
    """

    def __init__(self, g: FiniteGraph):
        self.graph = g
        self.interior = np.array([v for v in range(g.n_vertices) if v != g.boundary])
        L = laplacian(g)
        self._L_red = L[np.ix_(self.interior, self.interior)]
        self._inv = None
        if g.n_vertices <= _DENSE_LIMIT:
            self._inv = np.linalg.inv(self._L_red)

    def solve(self, f: np.ndarray) -> np.ndarray:
        """Return u with Delta u = f on the interior, u(boundary) = 0.

        ``f`` may be a vector over all vertices (the boundary entry is
        ignored) or a matrix of shape (V, k) solved column by column.
        """
        f = np.asarray(f, dtype=np.float64)
        single = f.ndim == 1
        fr = f[self.interior] if single else f[self.interior, :]
        if self._inv is not None:
            ur = self._inv @ fr
        else:
            ur = self._cg(fr)
        out_shape = (self.graph.n_vertices,) if single else (self.graph.n_vertices, f.shape[1])
        u = np.zeros(out_shape)
        u[self.interior] = ur
        return u

    def _cg(self, b: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        b = np.atleast_2d(b.T).T
        x = np.zeros_like(b)
        r = b - self._L_red @ x
        p = r.copy()
        rs = np.sum(r * r, axis=0)
        bnorm = np.maximum(np.sqrt(np.sum(b * b, axis=0)), 1e-300)
        for _ in range(10 * self._L_red.shape[0]):
            Ap = self._L_red @ p
            alpha = rs / np.sum(p * Ap, axis=0)
            x += alpha * p
            r -= alpha * Ap
            rs_new = np.sum(r * r, axis=0)
            if np.all(np.sqrt(rs_new) <= tol * bnorm):
                return x if b.shape[1] > 1 else x[:, 0]
            p = r + (rs_new / rs) * p
            rs = rs_new
        raise RuntimeError("conjugate gradient failed to reach the requested residual")

    def inverse_laplacian(self) -> np.ndarray:
        """Dense reduced inverse Laplacian on V \\ {boundary}."""
        if self._inv is None:
            self._inv = self._cg(np.eye(len(self.interior)))
        return self._inv

    def green(self) -> np.ndarray:
        """Green's function of simple random walk killed at the boundary.

        G = Delta^{-1} D on V \\ {boundary}: G(v, v') is the expected number
        of visits to v' before hitting the boundary, started at v.
        """
        deg = self.graph.degrees()[self.interior]
        return self.inverse_laplacian() * deg[np.newaxis, :]

    def quadratic_form(self, f: np.ndarray, gvec: np.ndarray | None = None) -> float:
        """(f, Delta^{-1} g) over the interior; g defaults to f."""
        if gvec is None:
            gvec = f
        return float(f[self.interior] @ (self.inverse_laplacian() @ np.asarray(gvec, float)[self.interior]))


def green_solve(g: FiniteGraph, f: np.ndarray) -> np.ndarray:
    """One-shot Dirichlet solve; see :class:`GreenSolver` for repeated use."""
    return GreenSolver(g).solve(f)


def green_matrix(g: FiniteGraph) -> np.ndarray:
    return GreenSolver(g).green()


def hodge_project(g: FiniteGraph, omega: np.ndarray, sector: str,
                  solver: GreenSolver | None = None) -> np.ndarray:
    """Orthogonal projection of a real 1-form onto the exact ("star") or
    co-closed ("diamond") subspace.

    The exact part is d Delta^{-1} d* omega; the co-closed part is the
    complement.  The two projections are idempotent and mutually orthogonal.
    """
    omega = np.asarray(omega, dtype=np.float64)
    solver = solver or GreenSolver(g)
    exact = d(g, solver.solve(d_star(g, omega)))
    if sector == "star":
        return exact
    if sector == "diamond":
        return omega - exact
    raise ValueError(f"unknown sector {sector!r}, expected 'star' or 'diamond'")


def wrap_angle(x: np.ndarray) -> np.ndarray:
    """Reduce angles to the fundamental domain (-pi, pi]."""
    x = np.asarray(x, dtype=np.float64)
    out = np.mod(-x + np.pi, 2.0 * np.pi)
    return np.pi - out


@dataclass(eq=False)
class TreeGauge:
    """Spanning tree rooted at the boundary plus its fundamental cycle basis.

    ``cycle_matrix`` C has shape (E, F) with F = E - V + 1: column f is the
    signed indicator of the fundamental cycle of the f-th non-tree edge,
    normalized so that the non-tree edge itself has coefficient +1.  Every
    column is co-closed, so assignments on the non-tree edges extend to
    co-closed 1-forms via ``extend``.  ``tree_path_matrix`` P has shape
    (V, V-1): row v gives the signed tree edges on the path boundary -> v,
    so vertex potentials are recovered from tree-edge increments by P.
    """

    graph: FiniteGraph
    tree_edges: np.ndarray          # indices into the edge list, |V|-1 of them
    free_edges: np.ndarray          # the remaining edge indices
    parent_edge: np.ndarray         # per vertex, tree edge toward the root (-1 at root)
    order: np.ndarray               # vertices ordered root -> leaves
    cycle_matrix: np.ndarray        # (E, F) signed cycle basis
    tree_path_matrix: np.ndarray    # (V, |V|-1) signed tree paths from the root

    @property
    def n_free(self) -> int:
        return len(self.free_edges)

    def extend(self, free_values: np.ndarray, wrap: bool = False) -> np.ndarray:
        """Extend values on the non-tree edges to a co-closed 1-form.

        Over the reals the divergence of the result vanishes exactly; with
        ``wrap=True`` the values are reduced to (-pi, pi], which preserves
        zero divergence modulo 2 pi.
        """
        free_values = np.asarray(free_values, dtype=np.float64)
        ext = self.cycle_matrix @ free_values
        return wrap_angle(ext) if wrap else ext

    def fundamental_cycles(self) -> list[list[tuple[int, int]]]:
        """Cycle basis as lists of (edge index, sign) pairs, one per free edge."""
        out = []
        for j in range(self.n_free):
            col = self.cycle_matrix[:, j]
            out.append([(int(e), int(col[e])) for e in np.nonzero(col)[0]])
        return out


def tree_gauge(g: FiniteGraph) -> TreeGauge:
    """Deterministic BFS spanning tree from the boundary with fundamental cycles.

    The BFS explores edges sorted by (tail, head, edge index), so the gauge
    is reproducible; the extension map does not depend on this choice.
    """
    order_idx = sorted(range(g.n_edges), key=lambda i: (int(g.tails[i]), int(g.heads[i]), i))
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n_vertices)]
    for i in order_idx:
        adj[g.tails[i]].append((g.heads[i], i))
        adj[g.heads[i]].append((g.tails[i], i))

    parent_edge = np.full(g.n_vertices, -1, dtype=np.int64)
    parent = np.full(g.n_vertices, -1, dtype=np.int64)
    visited = np.zeros(g.n_vertices, dtype=bool)
    visited[g.boundary] = True
    frontier = [g.boundary]
    order = [g.boundary]
    tree: list[int] = []
    while frontier:
        nxt = []
        for v in frontier:
            for (u, e) in adj[v]:
                if not visited[u]:
                    visited[u] = True
                    parent[u] = v
                    parent_edge[u] = e
                    tree.append(e)
                    nxt.append(u)
                    order.append(u)
        frontier = nxt

    tree_edges = np.array(sorted(tree), dtype=np.int64)
    in_tree = np.zeros(g.n_edges, dtype=bool)
    in_tree[tree_edges] = True
    free_edges = np.array([e for e in range(g.n_edges) if not in_tree[e]], dtype=np.int64)

    # Signed path from the root to each vertex, as a row over tree edges.
    tree_pos = {int(e): k for k, e in enumerate(tree_edges)}
    P = np.zeros((g.n_vertices, len(tree_edges)), dtype=np.int8)
    for v in order[1:]:
        e = int(parent_edge[v])
        P[v] = P[parent[v]]
        P[v, tree_pos[e]] = 1 if g.heads[e] == v else -1

    # Fundamental cycle of a free edge f = (t, h): f plus the tree path h -> t.
    # The column annihilates gradients and has zero divergence.
    C = np.zeros((g.n_edges, len(free_edges)), dtype=np.int8)
    for j, f in enumerate(free_edges):
        C[f, j] = 1
        path = P[g.tails[f]] - P[g.heads[f]]  # tree 1-form with d* = delta_h - delta_t
        C[tree_edges, j] += path
    return TreeGauge(graph=g, tree_edges=tree_edges, free_edges=free_edges,
                     parent_edge=parent_edge, order=np.array(order), cycle_matrix=C,
                     tree_path_matrix=P)
