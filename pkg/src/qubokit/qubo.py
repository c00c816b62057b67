"""Sparse QUBO instance representation, energy evaluation, and file I/O."""

from __future__ import annotations

from typing import Iterator, Mapping

import numpy as np


class ParseError(ValueError):
    """Malformed instance or graph file; carries the 1-based line number."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class QuboInstance:
    """Sparse quadratic unconstrained binary optimisation problem.

    Minimize  E(x) = sum_i h[i] x_i  +  sum_{i<j} w[i,j] x_i x_j
    over x in {0,1}^n.  Each unordered pair {i,j} carries a single total
    coupling w[i,j]; a symmetric matrix Q maps onto this form via
    h[i] = Q[i,i] and w[i,j] = Q[i,j] + Q[j,i] (see :meth:`from_matrix`).

    Couplings with value exactly 0 are never stored.  Instances are
    immutable after construction and safe to share across threads.
    """

    def __init__(
        self,
        n: int,
        h: Mapping[int, float] | np.ndarray | list[float] | None = None,
        couplings: Mapping[tuple[int, int], float] | None = None,
    ) -> None:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = int(n)

        self.h = np.zeros(self.n, dtype=np.float64)
        if isinstance(h, Mapping):
            for i, v in h.items():
                self._check_index(int(i))
                self.h[int(i)] = float(v)
        elif h is not None:
            arr = np.asarray(h, dtype=np.float64)
            if arr.shape != (self.n,):
                raise ValueError(f"h has shape {arr.shape}, expected ({self.n},)")
            self.h[:] = arr

        # Canonicalise couplings: unordered keys merged by summation (so both
        # Q[i,j] and Q[j,i] may be supplied), sorted by (i, j), zeros dropped.
        merged: dict[tuple[int, int], float] = {}
        for (i, j), v in (couplings or {}).items():
            i, j = int(i), int(j)
            self._check_index(i)
            self._check_index(j)
            if i == j:
                raise ValueError(f"self-coupling ({i},{j}); diagonal terms belong in h")
            key = (i, j) if i < j else (j, i)
            merged[key] = merged.get(key, 0.0) + float(v)

        pairs = sorted((i, j, v) for (i, j), v in merged.items() if v != 0.0)
        self.pair_i = np.array([p[0] for p in pairs], dtype=np.int64)
        self.pair_j = np.array([p[1] for p in pairs], dtype=np.int64)
        self.pair_w = np.array([p[2] for p in pairs], dtype=np.float64)

        # Adjacency in two layouts: python lists of (neighbor, w) for the
        # scalar code paths, index/weight array pairs for vectorised ones.
        # Neighbor order is ascending, fixed at construction.
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, v in pairs:
            adj[i].append((j, v))
            adj[j].append((i, v))
        for lst in adj:
            lst.sort()
        self.adjacency = adj
        self.adj_index = [np.array([t[0] for t in lst], dtype=np.int64) for lst in adj]
        self.adj_weight = [np.array([t[1] for t in lst], dtype=np.float64) for lst in adj]

        self._padded_adj: tuple[np.ndarray, np.ndarray] | None = None

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError(f"variable index {i} out of range [0, {self.n})")

    @classmethod
    def from_matrix(cls, Q: np.ndarray) -> "QuboInstance":
        """Build from an n x n matrix: h[i] = Q[i,i], w[i,j] = Q[i,j] + Q[j,i]."""
        Q = np.asarray(Q, dtype=np.float64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be a square 2-D array")
        n = Q.shape[0]
        couplings = {
            (i, j): Q[i, j] + Q[j, i]
            for i in range(n)
            for j in range(i + 1, n)
            if Q[i, j] + Q[j, i] != 0.0
        }
        return cls(n, h=np.diag(Q).copy(), couplings=couplings)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def num_couplings(self) -> int:
        return int(self.pair_w.size)

    def couplings(self) -> Iterator[tuple[int, int, float]]:
        """Iterate stored couplings as (i, j, w) with i < j, sorted."""
        for i, j, v in zip(self.pair_i, self.pair_j, self.pair_w):
            yield int(i), int(j), float(v)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def padded_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (n, max_degree) neighbor-index and weight arrays.

        Rows are padded with index 0 / weight 0.0, so padded entries
        contribute nothing to field sums.  Built once and cached.
        """
        if self._padded_adj is None:
            dmax = max((len(a) for a in self.adjacency), default=0)
            idx = np.zeros((self.n, dmax), dtype=np.int64)
            wgt = np.zeros((self.n, dmax), dtype=np.float64)
            for i, lst in enumerate(self.adjacency):
                if lst:
                    idx[i, : len(lst)] = [t[0] for t in lst]
                    wgt[i, : len(lst)] = [t[1] for t in lst]
            self._padded_adj = (idx, wgt)
        return self._padded_adj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuboInstance):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.pair_i, other.pair_i)
            and np.array_equal(self.pair_j, other.pair_j)
            and np.array_equal(self.pair_w, other.pair_w)
        )

    def __repr__(self) -> str:
        return f"QuboInstance(n={self.n}, couplings={self.num_couplings})"


# ----------------------------------------------------------------------
# Energy evaluation
# ----------------------------------------------------------------------


def _as_assignment(q: QuboInstance, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (q.n,):
        raise ValueError(f"assignment has shape {arr.shape}, expected ({q.n},)")
    return arr


def energy(q: QuboInstance, x) -> float:
    """E(x) = sum_i h[i] x_i + sum_{i<j} w[i,j] x_i x_j for binary x."""
    xf = _as_assignment(q, x)
    e = float(xf @ q.h)
    if q.pair_w.size:
        e += float(np.dot(q.pair_w, xf[q.pair_i] * xf[q.pair_j]))
    return e


def energy_batch(q: QuboInstance, states: np.ndarray) -> np.ndarray:
    """Energies of a (R, n) batch of binary assignments."""
    X = np.asarray(states, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != q.n:
        raise ValueError(f"states have shape {X.shape}, expected (R, {q.n})")
    e = X @ q.h
    if q.pair_w.size:
        e += (X[:, q.pair_i] * X[:, q.pair_j]) @ q.pair_w
    return e


def delta_energy(q: QuboInstance, x, i: int) -> float:
    """Energy change from flipping bit i, in O(degree(i)).

    Equals (1 - 2 x_i) * (h[i] + sum_{j in adj(i)} w[i,j] x_j).
    """
    xf = _as_assignment(q, x)
    if not 0 <= i < q.n:
        raise ValueError(f"variable index {i} out of range [0, {q.n})")
    field = q.h[i]
    idx = q.adj_index[i]
    if idx.size:
        field += float(q.adj_weight[i] @ xf[idx])
    return float((1.0 - 2.0 * xf[i]) * field)


# ----------------------------------------------------------------------
# Instance file format
#
#   # comment lines start with '#'
#   qubo <n> <nnz>
#   i j v        (nnz entry lines; 0-based, i <= j; i == j sets h[i],
#                 i < j sets the pair coupling w[i,j])
#
# Values are serialised with repr(), i.e. shortest decimal string that
# round-trips the exact float64, so load(save(q)) == q bitwise.
# ----------------------------------------------------------------------


def save_instance(q: QuboInstance) -> str:
    """Serialise to the text instance format (entries sorted by (i, j))."""
    entries = [(i, i, float(q.h[i])) for i in range(q.n) if q.h[i] != 0.0]
    entries.extend(q.couplings())
    entries.sort()
    lines = [f"qubo {q.n} {len(entries)}"]
    lines.extend(f"{i} {j} {v!r}" for i, j, v in entries)
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> QuboInstance:
    """Parse the text instance format; raises ParseError with line numbers."""
    n = nnz = -1
    h: dict[int, float] = {}
    couplings: dict[tuple[int, int], float] = {}
    seen: set[tuple[int, int]] = set()
    count = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if n < 0:
            if len(tokens) != 3 or tokens[0] != "qubo":
                raise ParseError(lineno, f"expected header 'qubo <n> <nnz>', got {line!r}")
            try:
                n, nnz = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise ParseError(lineno, f"non-integer header fields in {line!r}") from None
            if n < 1 or nnz < 0:
                raise ParseError(lineno, f"invalid header values n={n}, nnz={nnz}")
            continue
        if count >= nnz:
            raise ParseError(lineno, f"unexpected extra entry {line!r} (header declared {nnz})")
        if len(tokens) != 3:
            raise ParseError(lineno, f"expected 'i j v', got {line!r}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
            v = float(tokens[2])
        except ValueError:
            raise ParseError(lineno, f"malformed entry {line!r}") from None
        if not 0 <= i < n or not 0 <= j < n:
            raise ParseError(lineno, f"index out of range [0, {n}) in {line!r}")
        if i > j:
            raise ParseError(lineno, f"entries require i <= j, got {line!r}")
        if not np.isfinite(v):
            raise ParseError(lineno, f"non-finite value in {line!r}")
        if (i, j) in seen:
            raise ParseError(lineno, f"duplicate entry for pair ({i},{j})")
        seen.add((i, j))
        count += 1
        if i == j:
            h[i] = v
        elif v != 0.0:
            couplings[(i, j)] = v

    if n < 0:
        raise ParseError(1, "missing header line")
    if count != nnz:
        raise ParseError(1, f"header declared {nnz} entries, found {count}")
    return QuboInstance(n, h=h, couplings=couplings)
