"""Coupling graphs, topology generators, and Steiner tree search.

The Steiner tree approximation follows Mehlhorn's construction: Voronoi
labeling by multi-source shortest paths from the terminals, a terminal
distance graph built from region-crossing edges, its minimum spanning
tree expanded back to graph paths, a second MST on the induced subgraph,
and finally pruning of non-terminal leaves.  Total weight is within a
factor (2 - 2/|S|) of the optimum.

All tie-breaking is by lowest vertex index so identical inputs always
produce identical trees.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "CouplingGraph",
    "SteinerTree",
    "make_line",
    "make_grid",
    "make_complete",
    "make_barbell",
    "make_heavy_hex",
    "augment_random_edges",
    "articulation_points",
    "steiner_tree",
    "decreasing_steiner_tree",
    "delete_vertex",
    "from_spec",
    "parse_topology",
    "format_topology",
    "load_topology",
    "save_topology",
]


class CouplingGraph:
    """Undirected simple graph with non-negative edge weights.

    Vertices are integer qubit indices (not necessarily contiguous once
    vertices have been deleted).  Edges are kept canonically as (u, v)
    with u < v, sorted lexicographically.
    """

    __slots__ = ("_verts", "_us", "_vs", "_w", "_nbrs", "_dense_idx")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple] = ()) -> None:
        self._verts: list[int] = sorted(set(int(v) for v in vertices))
        vert_set = set(self._verts)
        seen: dict[tuple[int, int], float] = {}
        for edge in edges:
            if len(edge) == 3:
                u, v, w = edge
            else:
                u, v = edge
                w = 1.0
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in vert_set or v not in vert_set:
                raise ValueError(f"edge ({u}, {v}) references unknown vertex")
            if w < 0 or not np.isfinite(w):
                raise ValueError(f"edge weight must be finite and >= 0, got {w}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen[key] = w
        pairs = sorted(seen)
        self._us = np.array([p[0] for p in pairs], dtype=np.intp)
        self._vs = np.array([p[1] for p in pairs], dtype=np.intp)
        self._w = np.array([seen[p] for p in pairs], dtype=np.float64)
        self._nbrs: dict[int, list[int]] | None = None
        self._dense_idx = None

    # -- basic accessors -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self._verts)

    @property
    def n_edges(self) -> int:
        return len(self._us)

    def vertices(self) -> tuple[int, ...]:
        return tuple(self._verts)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self._us.tolist(), self._vs.tolist()))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(us, vs, weights) views in canonical edge order."""
        return self._us, self._vs, self._w

    def has_vertex(self, v: int) -> bool:
        return v in set(self._verts) if self._nbrs is None else v in self._nbrs

    def has_edge(self, u: int, v: int) -> bool:
        return self._edge_pos(u, v) >= 0

    def _edge_pos(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        lo = int(np.searchsorted(self._us, u))
        hi = int(np.searchsorted(self._us, u, side="right"))
        if lo == hi:
            return -1
        sub = int(np.searchsorted(self._vs[lo:hi], v))
        pos = lo + sub
        if pos < hi and self._vs[pos] == v:
            return pos
        return -1

    def edge_weight(self, u: int, v: int) -> float:
        pos = self._edge_pos(u, v)
        if pos < 0:
            raise KeyError(f"no edge ({u}, {v})")
        return float(self._w[pos])

    def set_edge_weight(self, u: int, v: int, w: float) -> None:
        if w < 0 or not np.isfinite(w):
            raise ValueError(f"edge weight must be finite and >= 0, got {w}")
        pos = self._edge_pos(u, v)
        if pos < 0:
            raise KeyError(f"no edge ({u}, {v})")
        self._w[pos] = w

    def set_all_weights(self, weights) -> None:
        """Replace all weights; ``weights`` aligns with canonical edge order."""
        arr = np.asarray(weights, dtype=np.float64)
        if arr.shape != self._w.shape:
            raise ValueError(f"expected {self._w.shape[0]} weights, got {arr.shape}")
        if arr.size and (arr.min() < 0 or not np.isfinite(arr).all()):
            raise ValueError("weights must be finite and >= 0")
        self._w = arr.copy()

    def reset_weights(self, value: float = 1.0) -> None:
        self._w = np.full(len(self._us), float(value))

    def neighbors(self, v: int) -> list[int]:
        if self._nbrs is None:
            nbrs: dict[int, list[int]] = {u: [] for u in self._verts}
            for u, w in zip(self._us.tolist(), self._vs.tolist()):
                nbrs[u].append(w)
                nbrs[w].append(u)
            for lst in nbrs.values():
                lst.sort()
            self._nbrs = nbrs
        if v not in self._nbrs:
            raise KeyError(f"no vertex {v}")
        return list(self._nbrs[v])

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    # -- mutation --------------------------------------------------------

    def add_edge(self, u: int, v: int, w: float = 1.0) -> None:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if self.has_edge(u, v):
            raise ValueError(f"edge ({u}, {v}) already present")
        vert_set = set(self._verts)
        if u not in vert_set or v not in vert_set:
            raise ValueError(f"edge ({u}, {v}) references unknown vertex")
        if w < 0 or not np.isfinite(w):
            raise ValueError(f"edge weight must be finite and >= 0, got {w}")
        if u > v:
            u, v = v, u
        us = np.append(self._us, u)
        vs = np.append(self._vs, v)
        ws = np.append(self._w, float(w))
        order = np.lexsort((vs, us))
        self._us, self._vs, self._w = us[order], vs[order], ws[order]
        self._nbrs = None
        self._dense_idx = None

    def delete_vertex(self, v: int) -> "CouplingGraph":
        if v not in set(self._verts):
            raise KeyError(f"no vertex {v}")
        keep = (self._us != v) & (self._vs != v)
        self._us = self._us[keep]
        self._vs = self._vs[keep]
        self._w = self._w[keep]
        self._verts.remove(v)
        self._nbrs = None
        self._dense_idx = None
        return self

    def copy(self) -> "CouplingGraph":
        g = CouplingGraph.__new__(CouplingGraph)
        g._verts = list(self._verts)
        g._us = self._us.copy()
        g._vs = self._vs.copy()
        g._w = self._w.copy()
        g._nbrs = None
        g._dense_idx = None
        return g

    def subgraph(self, vertices: Iterable[int]) -> "CouplingGraph":
        keep_set = set(vertices)
        if not keep_set <= set(self._verts):
            raise ValueError("subgraph vertices must belong to the graph")
        if len(self._us):
            keep_sorted = np.fromiter(sorted(keep_set), dtype=np.intp)
            keep_arr = np.isin(self._us, keep_sorted) & np.isin(self._vs, keep_sorted)
        else:
            keep_arr = np.zeros(0, dtype=bool)
        g = CouplingGraph.__new__(CouplingGraph)
        g._verts = sorted(keep_set)
        g._us = self._us[keep_arr]
        g._vs = self._vs[keep_arr]
        g._w = self._w[keep_arr]
        g._nbrs = None
        g._dense_idx = None
        return g

    # -- structure queries -----------------------------------------------

    def _dense_index(self):
        """Cached (pos map, dense edge endpoint arrays); weight-agnostic."""
        if self._dense_idx is None:
            pos = {v: i for i, v in enumerate(self._verts)}
            ui = np.array([pos[u] for u in self._us.tolist()], dtype=np.intp)
            vi = np.array([pos[v] for v in self._vs.tolist()], dtype=np.intp)
            self._dense_idx = (pos, ui, vi)
        return self._dense_idx

    def dense_adjacency(self) -> tuple[list[int], np.ndarray]:
        """(sorted vertices, k x k weight matrix with inf for non-edges)."""
        verts = self._verts
        k = len(verts)
        _, ui, vi = self._dense_index()
        mat = np.full((k, k), np.inf)
        if len(ui):
            mat[ui, vi] = self._w
            mat[vi, ui] = self._w
        return verts, mat

    def is_connected(self) -> bool:
        if not self._verts:
            return True
        seen = {self._verts[0]}
        stack = [self._verts[0]]
        while stack:
            u = stack.pop()
            for w in self.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._verts)

    def __repr__(self) -> str:
        return f"CouplingGraph(|V|={self.n_vertices}, |E|={self.n_edges})"


def delete_vertex(g: CouplingGraph, v: int) -> CouplingGraph:
    """Remove ``v`` and its incident edges (in place, returns ``g``)."""
    return g.delete_vertex(v)


# -- generators ------------------------------------------------------------


def make_line(n: int) -> CouplingGraph:
    if n < 1:
        raise ValueError("line needs at least 1 vertex")
    return CouplingGraph(range(n), [(i, i + 1) for i in range(n - 1)])


def make_complete(n: int) -> CouplingGraph:
    if n < 1:
        raise ValueError("complete graph needs at least 1 vertex")
    return CouplingGraph(
        range(n), [(i, j) for i in range(n) for j in range(i + 1, n)]
    )


def make_grid(rows: int, cols: int) -> CouplingGraph:
    """2D grid, numbered along a boustrophedon path.

    Consecutive indices are adjacent, so every suffix of the numbering
    induces a connected subgraph and index-monotone paths exist between
    any ordered pair.  Both properties are relied on by the triangular
    synthesis route.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")

    def vid(r: int, c: int) -> int:
        return r * cols + (c if r % 2 == 0 else cols - 1 - c)

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
    return CouplingGraph(range(rows * cols), edges)


def make_barbell(m: int, bridge: int = 1) -> CouplingGraph:
    """Two complete graphs K_m joined by a path of 1 or 2 edges."""
    if m < 2:
        raise ValueError("barbell cliques need at least 2 vertices")
    if bridge not in (1, 2):
        raise ValueError("bridge length must be 1 or 2")
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    if bridge == 1:
        offset = m
        edges.append((m - 1, m))
    else:
        offset = m + 1
        edges.append((m - 1, m))
        edges.append((m, m + 1))
    edges.extend(
        (offset + i, offset + j) for i in range(m) for j in range(i + 1, m)
    )
    return CouplingGraph(range(offset + m), edges)


def make_heavy_hex(rows: int, cols: int) -> CouplingGraph:
    """Heavy-hex lattice with ``rows`` x ``cols`` hexagonal cells.

    Horizontal chains of 4*cols+1 qubits, with subdivided vertical bonds
    at alternating corners (even corners on even gaps, odd corners on odd
    gaps), giving the 12-cycle cells and degree <= 3 of the IBM pattern.
    Numbering interleaves each chain with the bridge qubits below it.
    """
    if rows < 1 or cols < 1:
        raise ValueError("heavy-hex dimensions must be positive")
    line_len = 4 * cols + 1
    edges = []
    line_base = []
    next_id = 0
    bridge_ids: list[list[int]] = []
    for r in range(rows + 1):
        line_base.append(next_id)
        for c in range(line_len - 1):
            edges.append((next_id + c, next_id + c + 1))
        next_id += line_len
        if r < rows:
            corners = range(0, 2 * cols + 1, 2) if r % 2 == 0 else range(1, 2 * cols, 2)
            ids = []
            for _ in corners:
                ids.append(next_id)
                next_id += 1
            bridge_ids.append(ids)
    for r in range(rows):
        corners = range(0, 2 * cols + 1, 2) if r % 2 == 0 else range(1, 2 * cols, 2)
        for bid, corner in zip(bridge_ids[r], corners):
            top = line_base[r] + 2 * corner
            bottom = line_base[r + 1] + 2 * corner
            edges.append((top, bid))
            edges.append((bid, bottom))
    return CouplingGraph(range(next_id), edges)


def augment_random_edges(g: CouplingGraph, k: int, rng: np.random.Generator) -> CouplingGraph:
    """Copy of ``g`` with ``k`` random missing edges added at weight 1.

    Edges are taken as a prefix of a seeded permutation of all missing
    edges, so for a fixed generator state the sets are nested in ``k``.
    """
    verts = g.vertices()
    candidates = [
        (u, v)
        for i, u in enumerate(verts)
        for v in verts[i + 1 :]
        if not g.has_edge(u, v)
    ]
    if k < 0 or k > len(candidates):
        raise ValueError(f"cannot add {k} edges, only {len(candidates)} missing")
    out = g.copy()
    perm = rng.permutation(len(candidates))
    for idx in perm[:k]:
        u, v = candidates[int(idx)]
        out.add_edge(u, v, 1.0)
    return out


# -- articulation points ----------------------------------------------------


def articulation_points(g: CouplingGraph) -> set[int]:
    """Cut vertices of a connected graph (iterative DFS low-link)."""
    if not g.is_connected():
        raise ValueError("articulation points require a connected graph")
    verts = g.vertices()
    if len(verts) <= 2:
        return set()
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    points: set[int] = set()
    timer = 0
    root = verts[0]
    parent[root] = None
    stack: list[tuple[int, Iterable]] = [(root, iter(g.neighbors(root)))]
    disc[root] = low[root] = timer
    timer += 1
    root_children = 0
    while stack:
        u, it = stack[-1]
        advanced = False
        for w in it:
            if w not in disc:
                parent[w] = u
                if u == root:
                    root_children += 1
                disc[w] = low[w] = timer
                timer += 1
                stack.append((w, iter(g.neighbors(w))))
                advanced = True
                break
            elif w != parent[u]:
                low[u] = min(low[u], disc[w])
        if not advanced:
            stack.pop()
            p = parent[u]
            if p is not None:
                low[p] = min(low[p], low[u])
                if p != root and low[u] >= disc[p]:
                    points.add(p)
    if root_children > 1:
        points.add(root)
    return points


# -- shortest paths (dense, deterministic) ----------------------------------


def _dijkstra_dense(mat: np.ndarray, sources: Sequence[int]):
    """Multi-source Dijkstra on a dense weight matrix.

    Paths are compared lexicographically by (total weight, hop count) and
    settlement ties break by lowest index, so zero-weight regions are
    crossed with as few edges as possible and the output is fully
    deterministic.  Returns (dist, hops, pred, label) where label[v] is
    the source whose region v belongs to.
    """
    k = mat.shape[0]
    dist = np.full(k, np.inf)
    hops = np.full(k, np.inf)
    pred = np.full(k, -1, dtype=np.intp)
    label = np.full(k, -1, dtype=np.intp)
    for s in sources:
        dist[s] = 0.0
        hops[s] = 0.0
        label[s] = s
    # ``cand`` mirrors ``dist`` but holds inf for settled vertices; with
    # non-negative weights a settled vertex can never be re-improved, so
    # relaxing against ``dist``/``hops`` alone is sound.
    cand = dist.copy()
    for _ in range(k):
        m = cand.min()
        if not np.isfinite(m):
            break
        at_min = cand == m
        # Lowest hop count among minimal-weight candidates, then lowest
        # index (argmin returns the first occurrence).
        u = int(np.where(at_min, hops, np.inf).argmin())
        cand[u] = np.inf
        nd = dist[u] + mat[u]
        nh = hops[u] + 1.0
        improve = (nd < dist) | ((nd == dist) & (nh < hops))
        if improve.any():
            dist[improve] = nd[improve]
            cand[improve] = nd[improve]
            hops[improve] = nh
            pred[improve] = u
            label[improve] = label[u]
    return dist, hops, pred, label


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, k: int) -> None:
        self.parent = list(range(k))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


# -- Steiner trees -----------------------------------------------------------


class SteinerTree:
    """Rooted tree subgraph spanning a terminal set.

    Stores a parent map (root excluded); traversal child order is always
    ascending, so traversals are deterministic.
    """

    __slots__ = ("root", "parent", "terminals", "weight", "_children")

    def __init__(self, root: int, parent: Mapping[int, int], terminals, weight: float) -> None:
        self.root = root
        self.parent = dict(parent)
        self.terminals = frozenset(terminals)
        self.weight = float(weight)
        children: dict[int, list[int]] = {v: [] for v in self.nodes()}
        for child, par in self.parent.items():
            children[par].append(child)
        for lst in children.values():
            lst.sort()
        self._children = children

    def nodes(self) -> set[int]:
        return set(self.parent) | {self.root}

    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(c, p), max(c, p)) for c, p in self.parent.items())

    def children(self, v: int) -> list[int]:
        return list(self._children[v])

    def leaves(self) -> set[int]:
        return {v for v in self.nodes() if not self._children[v] and v != self.root}

    def postorder(self) -> list[tuple[int, int]]:
        """(child, parent) pairs, children before parents; root excluded."""
        out: list[tuple[int, int]] = []

        def visit(v: int) -> None:
            for c in self._children[v]:
                visit(c)
            if v != self.root:
                out.append((v, self.parent[v]))

        visit(self.root)
        return out

    def preorder(self) -> list[tuple[int, int]]:
        """(child, parent) pairs, parents before children; root excluded."""
        out: list[tuple[int, int]] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            if v != self.root:
                out.append((v, self.parent[v]))
            stack.extend(reversed(self._children[v]))
        return out

    def rooted_at(self, new_root: int) -> "SteinerTree":
        """Same tree re-rooted (re-rooting changes no edges)."""
        if new_root not in self.nodes():
            raise ValueError(f"{new_root} is not a tree node")
        adj: dict[int, list[int]] = {v: [] for v in self.nodes()}
        for c, p in self.parent.items():
            adj[c].append(p)
            adj[p].append(c)
        parent: dict[int, int] = {}
        seen = {new_root}
        queue = [new_root]
        while queue:
            u = queue.pop(0)
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    queue.append(w)
        return SteinerTree(new_root, parent, self.terminals, self.weight)


def steiner_tree(g: CouplingGraph, terminals: Iterable[int], root: int | None = None) -> SteinerTree:
    """Approximate minimum-weight tree containing all terminals.

    Mehlhorn's (2 - 2/|S|)-approximation; see the module docstring for
    the construction.  ``root`` defaults to the smallest terminal.
    """
    terms = sorted(set(int(t) for t in terminals))
    if not terms:
        raise ValueError("need at least one terminal")
    vert_set = set(g.vertices())
    for t in terms:
        if t not in vert_set:
            raise ValueError(f"terminal {t} is not in the graph")
    if root is None:
        root = terms[0]
    if len(terms) == 1:
        if root != terms[0]:
            raise ValueError("root must be a tree node")
        return SteinerTree(terms[0], {}, terms, 0.0)

    verts, mat = g.dense_adjacency()
    pos, ui, vi = g._dense_index()
    term_idx = [pos[t] for t in terms]
    dist, hops, pred, label = _dijkstra_dense(mat, term_idx)

    t_count = len(terms)
    term_ordinal = np.full(len(verts), -1, dtype=np.intp)
    for ordinal, ti in enumerate(term_idx):
        term_ordinal[ti] = ordinal

    us, vs, ws = g.edge_arrays()
    cross = label[ui] != label[vi]
    if not cross.any():
        raise ValueError("terminals are not connected in the graph")
    cu = term_ordinal[label[ui[cross]]]
    cv = term_ordinal[label[vi[cross]]]
    cost = dist[ui[cross]] + ws[cross] + dist[vi[cross]]
    cost_h = hops[ui[cross]] + 1.0 + hops[vi[cross]]
    edge_ids = np.nonzero(cross)[0]
    pair_lo = np.minimum(cu, cv)
    pair_hi = np.maximum(cu, cv)
    pair_key = pair_lo * t_count + pair_hi
    order = np.lexsort((edge_ids, cost_h, cost, pair_key))
    sorted_keys = pair_key[order]
    _, first = np.unique(sorted_keys, return_index=True)
    reps = order[first]  # best crossing edge per terminal pair

    # Kruskal on the terminal distance graph.
    rep_order = np.lexsort((pair_hi[reps], pair_lo[reps], cost[reps]))
    uf = _UnionFind(t_count)
    chosen_edges: list[int] = []
    accepted = 0
    for j in rep_order:
        r = reps[j]
        if uf.union(int(pair_lo[r]), int(pair_hi[r])):
            chosen_edges.append(int(edge_ids[r]))
            accepted += 1
            if accepted == t_count - 1:
                break
    if accepted != t_count - 1:
        raise ValueError("terminals are not connected in the graph")

    # Expand selected crossing edges into paths; collect the node set.
    node_set: set[int] = set(term_idx)
    for eid in chosen_edges:
        for endpoint in (int(ui[eid]), int(vi[eid])):
            v = endpoint
            while v != -1 and v not in node_set:
                node_set.add(v)
                v = int(pred[v])

    # MST of the subgraph induced on the collected nodes.
    in_nodes = np.zeros(len(verts), dtype=bool)
    in_nodes[list(node_set)] = True
    induced = np.nonzero(in_nodes[ui] & in_nodes[vi])[0]
    ind_order = induced[np.lexsort((vi[induced], ui[induced], ws[induced]))]
    node_list = sorted(node_set)
    node_pos = {v: i for i, v in enumerate(node_list)}
    uf2 = _UnionFind(len(node_list))
    tree_adj: dict[int, list[int]] = {v: [] for v in node_list}
    tree_edges: list[int] = []
    for eid in ind_order:
        a, b = int(ui[eid]), int(vi[eid])
        if uf2.union(node_pos[a], node_pos[b]):
            tree_adj[a].append(b)
            tree_adj[b].append(a)
            tree_edges.append(int(eid))
            if len(tree_edges) == len(node_list) - 1:
                break

    # Prune non-terminal leaves (peel inward from the fringe).
    term_set = set(term_idx)
    removed: set[int] = set()
    deg = {v: len(tree_adj[v]) for v in node_list}
    peel = [v for v in node_list if deg[v] <= 1 and v not in term_set]
    while peel:
        v = peel.pop()
        if v in removed:
            continue
        removed.add(v)
        for w in tree_adj[v]:
            if w in removed:
                continue
            deg[w] -= 1
            if deg[w] <= 1 and w not in term_set:
                peel.append(w)

    keep = [v for v in node_list if v not in removed]
    final_edges = [
        eid
        for eid in tree_edges
        if int(ui[eid]) not in removed and int(vi[eid]) not in removed
    ]
    total = float(ws[final_edges].sum()) if final_edges else 0.0

    if root not in vert_set or pos[root] not in set(keep):
        raise ValueError("root must be a tree node")
    adj: dict[int, list[int]] = {verts[v]: [] for v in keep}
    for eid in final_edges:
        a, b = verts[int(ui[eid])], verts[int(vi[eid])]
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[int, int] = {}
    seen = {root}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for w in sorted(adj[u]):
            if w not in seen:
                seen.add(w)
                parent[w] = u
                queue.append(w)
    return SteinerTree(root, parent, terms, total)


def decreasing_steiner_tree(
    g: CouplingGraph,
    terminals: Iterable[int],
    root: int,
    ordering: Mapping[int, int] | Sequence[int] | None = None,
) -> SteinerTree | None:
    """Steiner tree in which every node is larger than its children.

    "Larger" is judged under ``ordering`` (vertex -> rank; identity when
    omitted); ``root`` must be the ordering-maximal terminal.  The search
    is best-first over order-admissible edges (shortest paths in the DAG
    of rank-decreasing steps), giving the union of cheapest decreasing
    paths from the root to each terminal.  Returns None when some
    terminal admits no decreasing path, i.e. no such tree exists.
    """
    terms = sorted(set(int(t) for t in terminals))
    if not terms:
        raise ValueError("need at least one terminal")
    vert_set = set(g.vertices())
    for t in terms:
        if t not in vert_set:
            raise ValueError(f"terminal {t} is not in the graph")
    if root not in vert_set:
        raise ValueError(f"root {root} is not in the graph")

    if ordering is None:
        rank = {v: v for v in vert_set}
    elif isinstance(ordering, Mapping):
        rank = {v: int(ordering[v]) for v in vert_set}
    else:
        rank = {v: int(ordering[v]) for v in vert_set}
    if any(rank[t] > rank[root] for t in terms):
        raise ValueError("root must be the ordering-maximal terminal")
    if root not in terms:
        terms = sorted(set(terms) | {root})

    if len(terms) == 1:
        return SteinerTree(root, {}, terms, 0.0)

    verts, mat = g.dense_adjacency()
    pos, _, _ = g._dense_index()
    ranks = np.array([rank[v] for v in verts])
    # Directed admissibility: u -> v allowed only when rank[v] < rank[u].
    directed = np.where(ranks[None, :] < ranks[:, None], mat, np.inf)

    # Best-first search from the root over the admissible edges (cheapest
    # cumulative weight, then fewest hops, ties by lowest index); the
    # candidate node set is the union of the winning paths to the
    # terminals.
    root_i = pos[root]
    dist, _, pred, _ = _dijkstra_dense(directed, [root_i])

    term_idx = [pos[t] for t in terms]
    if any(not np.isfinite(dist[t]) for t in term_idx):
        return None

    node_set = {root_i}
    for ti in term_idx:
        v = ti
        while v not in node_set:
            node_set.add(v)
            v = int(pred[v])

    # Mirror the undirected construction's final steps: rebuild a
    # spanning arborescence over the collected nodes (greedy cheapest
    # attachment), which rewires separate path wiggles into shared
    # trunks, then prune non-terminal leaves.
    nodes = sorted(node_set)
    sub = directed[np.ix_(nodes, nodes)]
    kk = len(nodes)
    local_root = nodes.index(root_i)
    in_tree = np.zeros(kk, dtype=bool)
    in_tree[local_root] = True
    best_w = sub[local_root].copy()
    best_par = np.full(kk, local_root, dtype=np.intp)
    best_w[local_root] = np.inf
    par = np.full(kk, -1, dtype=np.intp)
    for _ in range(kk - 1):
        v = int(best_w.argmin())
        if not np.isfinite(best_w[v]):
            raise AssertionError("arborescence nodes must stay connected")
        in_tree[v] = True
        best_w[v] = np.inf
        par[v] = best_par[v]
        improve = (sub[v] < best_w) & ~in_tree
        if improve.any():
            best_w[improve] = sub[v][improve]
            best_par[improve] = v

    term_local = {nodes.index(t) for t in term_idx}
    children: dict[int, list[int]] = {v: [] for v in range(kk)}
    for v in range(kk):
        if par[v] >= 0:
            children[int(par[v])].append(v)
    deg = {v: len(children[v]) for v in range(kk)}
    removed: set[int] = set()
    peel = [v for v in range(kk) if deg[v] == 0 and v not in term_local]
    while peel:
        v = peel.pop()
        removed.add(v)
        p = int(par[v])
        deg[p] -= 1
        if deg[p] == 0 and p not in term_local and p != local_root:
            peel.append(p)

    parent: dict[int, int] = {}
    total = 0.0
    for v in range(kk):
        if v in removed or par[v] < 0:
            continue
        child_g = verts[nodes[v]]
        parent_g = verts[nodes[int(par[v])]]
        parent[child_g] = parent_g
        total += float(mat[nodes[int(par[v])], nodes[v]])
    return SteinerTree(root, parent, terms, total)


# -- text format -------------------------------------------------------------


def parse_topology(text: str) -> CouplingGraph:
    """Parse the coupling file format: line "n", then "u v [w]" per edge."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty topology text")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"first line must be the vertex count, got {lines[0]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((u, v, w))
    return CouplingGraph(range(n), edges)


def format_topology(g: CouplingGraph) -> str:
    verts = g.vertices()
    if verts != tuple(range(len(verts))):
        raise ValueError("topology format requires contiguous vertices 0..n-1")
    lines = [str(len(verts))]
    us, vs, ws = g.edge_arrays()
    for u, v, w in zip(us.tolist(), vs.tolist(), ws.tolist()):
        if w == 1.0:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {w:g}")
    return "\n".join(lines) + "\n"


def load_topology(path) -> CouplingGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_topology(fh.read())


def save_topology(g: CouplingGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_topology(g))


def from_spec(spec: str) -> CouplingGraph:
    """Build a named topology from a spec string.

    Supported: ``line:N``, ``grid:RxC``, ``heavyhex:RxC``, ``barbell:M:B``,
    ``complete:N``.
    """
    parts = spec.strip().lower().split(":")
    kind = parts[0]
    try:
        if kind == "line" and len(parts) == 2:
            return make_line(int(parts[1]))
        if kind == "complete" and len(parts) == 2:
            return make_complete(int(parts[1]))
        if kind == "grid" and len(parts) == 2:
            r, c = parts[1].split("x")
            return make_grid(int(r), int(c))
        if kind == "heavyhex" and len(parts) == 2:
            r, c = parts[1].split("x")
            return make_heavy_hex(int(r), int(c))
        if kind == "barbell" and len(parts) == 3:
            return make_barbell(int(parts[1]), int(parts[2]))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad topology spec {spec!r}") from exc
    raise ValueError(f"unknown topology spec {spec!r}")
