"""Data model for grown hypergraphs.

A recursive hypergraph is stored as the rooted tree of its edges: edge i
is the edge created together with vertex i, its parent is the maternal
edge, and edge 1 is the primordial edge {v1}.  Edge i's member set is the
root path of i, so

    degree(v_i) = size of the subtree of edge i,
    rank(v_i)   = depth(edge i) + 1  (= size of edge i).

This keeps a size-N realization in O(N) memory with all analysis in O(N).
The duplication model, where edges repeat and |V| <= |E|, gets the
separate ``MultiHypergraph`` with per-edge provenance.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .backend import kernels


class Histogram:
    """Counts indexed by integer value; counts[k] = number of items equal k."""

    __slots__ = ("counts",)

    def __init__(self, counts):
        self.counts = np.asarray(counts, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, k: int) -> int:
        if 0 <= k < len(self.counts):
            return int(self.counts[k])
        return 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        a, b = self.counts, other.counts
        n = max(len(a), len(b))
        return bool(
            (np.pad(a, (0, n - len(a))) == np.pad(b, (0, n - len(b)))).all()
        )

    def items(self):
        """(k, count) pairs for nonzero counts, ascending in k."""
        for k in np.nonzero(self.counts)[0]:
            yield int(k), int(self.counts[k])

    def as_dict(self) -> dict[int, int]:
        return dict(self.items())

    def to_csv(self, fileobj=None, header=("k", "count")) -> str | None:
        out = fileobj or io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for k, c in self.items():
            w.writerow([k, c])
        if fileobj is None:
            return out.getvalue()
        return None

    def __repr__(self):
        return f"Histogram({self.as_dict()!r})"


class EdgeTree:
    """Immutable realization of a recursively grown hypergraph."""

    __slots__ = ("parents", "_sizes", "_depths")

    def __init__(self, parents, validate: bool = True):
        """``parents`` is the full int64 array of length n+1 (slot 0 unused,
        parents[1] = 0).  Use :meth:`from_parent_list` for the compact
        [p2..pn] form."""
        arr = np.ascontiguousarray(parents, dtype=np.int64)
        if arr.ndim != 1 or len(arr) < 2:
            raise ValueError("parents must be a 1-d array of length n+1 >= 2")
        if validate:
            n = len(arr) - 1
            idx = np.arange(2, n + 1)
            if arr[0] != 0 or arr[1] != 0:
                raise ValueError("slots 0 and 1 must be 0")
            if n >= 2 and not ((arr[2:] >= 1) & (arr[2:] < idx)).all():
                raise ValueError("parent of edge i must lie in 1..i-1")
        self.parents = arr
        self.parents.flags.writeable = False
        self._sizes = None
        self._depths = None

    @classmethod
    def from_parent_list(cls, parent_list) -> "EdgeTree":
        """Build from [p2, p3, ..., pn] (the JSON wire form)."""
        full = np.zeros(len(parent_list) + 2, dtype=np.int64)
        full[2:] = parent_list
        return cls(full)

    @property
    def n(self) -> int:
        """Number of vertices = number of edges."""
        return len(self.parents) - 1

    def _size_arr(self):
        if self._sizes is None:
            self._sizes = kernels.subtree_sizes(self.parents)
        return self._sizes

    def _depth_arr(self):
        if self._depths is None:
            self._depths = kernels.depths(self.parents)
        return self._depths

    def _check_id(self, v: int):
        if not 1 <= v <= self.n:
            raise IndexError(f"id {v} out of range 1..{self.n}")

    def degree_of(self, v: int) -> int:
        """Number of edges containing vertex v."""
        self._check_id(v)
        return int(self._size_arr()[v])

    def rank_of(self, v: int) -> int:
        """Size of the minimal edge containing v (its creation edge)."""
        self._check_id(v)
        return int(self._depth_arr()[v]) + 1

    def degree_histogram(self) -> Histogram:
        return Histogram(np.bincount(self._size_arr()[1:], minlength=self.n + 1))

    def rank_histogram(self) -> Histogram:
        """Also the edge-size histogram: vertices of rank k <-> edges of size k."""
        return Histogram(np.bincount(self._depth_arr()[1:] + 1, minlength=self.n + 1))

    def count_leaves(self) -> int:
        """Vertices of degree one in an edge of size two: childless edges
        whose maternal edge is the primordial one."""
        if self.n < 2:
            return 0
        p, s = self.parents, self._size_arr()
        return int(((p[2:] == 1) & (s[2:] == 1)).sum())

    def leader_id(self) -> tuple[int, bool]:
        """Smallest non-primordial vertex of maximal degree and a flag
        telling whether that maximum is shared."""
        if self.n < 2:
            raise ValueError("leader undefined for n < 2")
        degs = self._size_arr()[2:]
        best = degs.max()
        where = np.nonzero(degs == best)[0]
        return int(where[0]) + 2, len(where) > 1

    def edge_members(self, e: int) -> list[int]:
        """Vertex ids of edge e in creation order (the root path of e)."""
        self._check_id(e)
        path = []
        while e != 0:
            path.append(int(e))
            e = int(self.parents[e])
        return path[::-1]

    def to_json_dict(self, expanded: bool = False) -> dict:
        d = {"n": self.n, "parents": [int(p) for p in self.parents[2:]]}
        if expanded:
            d["edges"] = [self.edge_members(e) for e in range(1, self.n + 1)]
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "EdgeTree":
        tree = cls.from_parent_list(d["parents"])
        if tree.n != d["n"]:
            raise ValueError("parents length inconsistent with n")
        return tree

    def __repr__(self):
        return f"EdgeTree(n={self.n})"


class MultiHypergraph:
    """Realization of the duplication model: edges may repeat, so the edge
    tree carries a per-edge flag telling whether the edge introduced a new
    vertex (grown) or copies its source (duplicated)."""

    __slots__ = ("src", "grown", "_vnum")

    def __init__(self, src, grown):
        self.src = np.ascontiguousarray(src, dtype=np.int64)
        self.grown = np.ascontiguousarray(grown, dtype=np.uint8)
        if len(self.src) != len(self.grown) or len(self.src) < 2:
            raise ValueError("src/grown must have equal length n_edges+1 >= 2")
        n = len(self.src) - 1
        idx = np.arange(2, n + 1)
        if n >= 2 and not ((self.src[2:] >= 1) & (self.src[2:] < idx)).all():
            raise ValueError("source of edge j must lie in 1..j-1")
        if self.grown[1] != 1:
            raise ValueError("the primordial edge carries vertex 1")
        # vertex label of each grown edge, 0 for duplicates
        vn = np.cumsum(self.grown).astype(np.int64)
        vn[self.grown == 0] = 0
        vn[0] = 0
        self._vnum = vn

    @property
    def n_edges(self) -> int:
        return len(self.src) - 1

    @property
    def n_vertices(self) -> int:
        return int(self.grown[1:].sum())

    def provenance(self, e: int) -> str:
        if not 1 <= e <= self.n_edges:
            raise IndexError(f"edge {e} out of range")
        return "grown" if self.grown[e] else "duplicated"

    def edge_members(self, e: int) -> list[int]:
        """Vertex ids of edge e (vertices are numbered by creation order)."""
        if not 1 <= e <= self.n_edges:
            raise IndexError(f"edge {e} out of range")
        out = []
        while e != 0:
            if self.grown[e]:
                out.append(int(self._vnum[e]))
            e = int(self.src[e])
        return out[::-1]

    def edge_size_histogram(self) -> Histogram:
        sizes = np.zeros(self.n_edges + 1, dtype=np.int64)
        sizes[1] = 1
        for j in range(2, self.n_edges + 1):
            sizes[j] = sizes[self.src[j]] + self.grown[j]
        return Histogram(np.bincount(sizes[1:], minlength=self.n_edges + 1))

    def degree_of(self, v: int) -> int:
        """Number of edges containing vertex v (duplicates count)."""
        if not 1 <= v <= self.n_vertices:
            raise IndexError(f"vertex {v} out of range")
        creation = int(np.nonzero(self._vnum == v)[0][0])
        return int(kernels.subtree_sizes(self.src)[creation])

    def to_json_dict(self, expanded: bool = False) -> dict:
        d = {
            "n_edges": self.n_edges,
            "n_vertices": self.n_vertices,
            "src": [int(s) for s in self.src[2:]],
            "provenance": [self.provenance(e) for e in range(1, self.n_edges + 1)],
        }
        if expanded:
            d["edges"] = [self.edge_members(e) for e in range(1, self.n_edges + 1)]
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "MultiHypergraph":
        n = d["n_edges"]
        src = np.zeros(n + 1, dtype=np.int64)
        src[2:] = d["src"]
        grown = np.array(
            [0] + [1 if tag == "grown" else 0 for tag in d["provenance"]],
            dtype=np.uint8,
        )
        return cls(src, grown)

    def __repr__(self):
        return f"MultiHypergraph(edges={self.n_edges}, vertices={self.n_vertices})"
