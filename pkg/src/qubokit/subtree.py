"""Random induced sub-tree selection and the conditioned sub-problem.

The selection rule grows a set from a uniformly random start node: at each
step a uniformly random outside variable coupled to exactly one current
member joins the set, with that member as its parent.  Variables seeing two
or more members are permanently excluded, so the induced subgraph stays
chordless and the grown set is a tree.  Growth stops when no candidate
remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qubo import QuboInstance


@dataclass
class SubTree:
    """Induced sub-tree in selection order: nodes[0] is the root.

    parent_pos[p] is the position (index into nodes) of node p's parent,
    -1 for the root.  edge_w[p] is the coupling to the parent, 0.0 at the
    root.  Selection order is topological: parents precede children.
    """

    nodes: list[int]
    parent_pos: np.ndarray
    edge_w: np.ndarray
    children: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        m = len(self.nodes)
        self.parent_pos = np.asarray(self.parent_pos, dtype=np.int64)
        self.edge_w = np.asarray(self.edge_w, dtype=np.float64)
        if self.parent_pos.shape != (m,) or self.edge_w.shape != (m,):
            raise ValueError("parent_pos and edge_w must have one entry per node")
        if m == 0:
            raise ValueError("sub-tree must contain at least one node")
        if len(set(self.nodes)) != m:
            raise ValueError("duplicate node in sub-tree")
        if self.parent_pos[0] != -1:
            raise ValueError("first node must be the root (parent_pos -1)")
        for p in range(1, m):
            if not 0 <= self.parent_pos[p] < p:
                raise ValueError(f"parent of position {p} must precede it")
        self.children = [[] for _ in range(m)]
        for p in range(1, m):
            self.children[int(self.parent_pos[p])].append(p)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def tree_edges(self) -> list[tuple[int, int, float]]:
        """(parent node, child node, coupling) for each non-root position."""
        return [
            (self.nodes[int(self.parent_pos[p])], self.nodes[p], float(self.edge_w[p]))
            for p in range(1, self.size)
        ]

    def position(self, node: int) -> int:
        """Position of `node` in selection order; ValueError if absent."""
        try:
            return self.nodes.index(node)
        except ValueError:
            raise ValueError(f"node {node} is not in the sub-tree") from None


@dataclass
class TreeProblem:
    """Sub-tree with frozen-neighbor fields folded in, at fixed beta.

    eff_field[p] = h_i + sum of w_ik x_k over neighbors k of i outside the
    tree, for the node i at position p.
    """

    tree: SubTree
    eff_field: np.ndarray
    beta: float

    def __post_init__(self) -> None:
        self.eff_field = np.asarray(self.eff_field, dtype=np.float64)
        if self.eff_field.shape != (self.tree.size,):
            raise ValueError(
                f"eff_field must have length {self.tree.size}, "
                f"got shape {self.eff_field.shape}"
            )
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


def select_subtree(q: QuboInstance, rng: np.random.Generator) -> SubTree:
    """Grow a random induced sub-tree; frontier = outside nodes with exactly
    one coupling into the current set."""
    start = int(rng.integers(q.n))
    in_tree = np.zeros(q.n, dtype=bool)
    conn = np.zeros(q.n, dtype=np.int64)
    entry_parent = np.full(q.n, -1, dtype=np.int64)
    entry_w = np.zeros(q.n, dtype=np.float64)
    frontier: list[int] = []
    fpos = np.full(q.n, -1, dtype=np.int64)  # position in frontier, -1 absent

    def drop(v: int) -> None:
        p = int(fpos[v])
        last = frontier[-1]
        frontier[p] = last
        fpos[last] = p
        frontier.pop()
        fpos[v] = -1

    def absorb(u: int, pos_u: int) -> None:
        in_tree[u] = True
        if fpos[u] >= 0:
            drop(u)
        for v, w in q.adjacency[u]:
            if in_tree[v]:
                continue
            conn[v] += 1
            if conn[v] == 1:
                entry_parent[v] = pos_u
                entry_w[v] = w
                fpos[v] = len(frontier)
                frontier.append(v)
            elif conn[v] == 2:
                drop(v)

    nodes = [start]
    parent_pos = [-1]
    edge_w = [0.0]
    absorb(start, 0)
    while frontier:
        v = frontier[int(rng.integers(len(frontier)))]
        nodes.append(v)
        parent_pos.append(int(entry_parent[v]))
        edge_w.append(float(entry_w[v]))
        absorb(v, len(nodes) - 1)
    return SubTree(nodes, np.array(parent_pos), np.array(edge_w))


def build_tree_problem(
    q: QuboInstance, tree: SubTree, x: np.ndarray, beta: float
) -> TreeProblem:
    """Freeze neighbors outside the tree at their current values in x."""
    x = np.asarray(x)
    in_tree = np.zeros(q.n, dtype=bool)
    in_tree[tree.nodes] = True
    b = np.empty(tree.size, dtype=np.float64)
    for p, i in enumerate(tree.nodes):
        acc = q.h[i]
        for k, w in q.adjacency[i]:
            if not in_tree[k]:
                acc += w * float(x[k])
        b[p] = acc
    return TreeProblem(tree, b, beta)


# ----------------------------------------------------------------------
# Vectorized effective fields for a replica ensemble.
# ----------------------------------------------------------------------


def frozen_neighbor_arrays(
    q: QuboInstance, tree: SubTree
) -> tuple[np.ndarray, np.ndarray]:
    """Padded (M, D) index and weight arrays of each tree node's outside
    neighbors; padding has weight 0 so it never contributes."""
    in_tree = np.zeros(q.n, dtype=bool)
    in_tree[tree.nodes] = True
    rows = []
    for i in tree.nodes:
        rows.append([(k, w) for k, w in q.adjacency[i] if not in_tree[k]])
    width = max((len(r) for r in rows), default=0)
    idx = np.zeros((tree.size, width), dtype=np.int64)
    wmat = np.zeros((tree.size, width), dtype=np.float64)
    for p, row in enumerate(rows):
        for d, (k, w) in enumerate(row):
            idx[p, d] = k
            wmat[p, d] = w
    return idx, wmat
