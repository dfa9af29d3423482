"""Graph structure, BFS distances, weighted medians, and reply sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .weights import CompatibleSet, WeightState

__all__ = [
    "GraphFormatError",
    "Graph",
    "DistanceMatrix",
    "all_pairs_distances",
    "weighted_median",
    "consistent_set",
    "load_graph",
    "path_graph",
    "cycle_graph",
    "star_graph",
    "grid_graph",
    "random_tree",
    "gnm_graph",
    "generate_graph",
    "GENERATORS",
]


class GraphFormatError(ValueError):
    """Malformed, self-looped, or disconnected graph input."""


@dataclass(frozen=True)
class Graph:
    """Undirected, unweighted, connected graph with sorted adjacency lists.

    layout_hint marks graphs whose vertex numbering encodes the metric
    ("path": id distance, "grid": Manhattan on a rows x cols lattice),
    enabling O(n) median computation. Loaded graphs never carry a hint.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    layout_hint: str | None = None
    layout_shape: tuple[int, int] | None = None

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges,
        layout_hint: str | None = None,
        layout_shape: tuple[int, int] | None = None,
    ) -> "Graph":
        if n < 1:
            raise GraphFormatError(f"graph needs at least one vertex, got n={n}")
        neighbors: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            neighbors[u].add(v)
            neighbors[v].add(u)
        g = cls(
            n=n,
            adjacency=tuple(tuple(sorted(s)) for s in neighbors),
            layout_hint=layout_hint,
            layout_shape=layout_shape,
        )
        unreachable = g._first_unreachable()
        if unreachable is not None:
            raise GraphFormatError(
                f"graph is disconnected: vertex {unreachable} unreachable from vertex 0"
            )
        return g

    def _first_unreachable(self) -> int | None:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in self.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        nxt.append(v)
            frontier = nxt
        if seen.all():
            return None
        return int(np.flatnonzero(~seen)[0])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


@dataclass
class DistanceMatrix:
    """All-pairs hop distances; float copy cached lazily for fast matvecs."""

    dist: np.ndarray
    _distf: np.ndarray | None = field(default=None, repr=False)

    def as_float(self) -> np.ndarray:
        if self._distf is None:
            self._distf = self.dist.astype(np.float64)
        return self._distf


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """Exact hop distances via one BFS per source vertex."""
    n = g.n
    adj = g.adjacency
    dist = np.full((n, n), -1, dtype=np.int32)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if row[v] < 0:
                        row[v] = d
                        nxt.append(v)
            frontier = nxt
    if (dist < 0).any():
        raise GraphFormatError("graph is disconnected")
    return DistanceMatrix(dist=dist)


def _line_costs(w: np.ndarray) -> np.ndarray:
    """Sum of |i - v| * w[i] for every v, via prefix sums, O(n)."""
    idx = np.arange(w.size, dtype=np.float64)
    cw = np.cumsum(w)
    cwx = np.cumsum(w * idx)
    total_w = cw[-1]
    total_wx = cwx[-1]
    # left part: v*sum(w[<=v]) - sum(i*w[i], i<=v); right part symmetric
    return idx * cw - cwx + (total_wx - cwx) - idx * (total_w - cw)


def median_costs(g: Graph, d: DistanceMatrix, relative: np.ndarray) -> np.ndarray:
    """Weighted distance cost of every vertex: cost(v) = sum_u d(u,v) w(u)."""
    if g.layout_hint == "path":
        return _line_costs(relative)
    if g.layout_hint == "grid" and g.layout_shape is not None:
        rows, cols = g.layout_shape
        w2 = relative.reshape(rows, cols)
        row_cost = _line_costs(w2.sum(axis=1))
        col_cost = _line_costs(w2.sum(axis=0))
        return np.add.outer(row_cost, col_cost).reshape(-1)
    return d.as_float() @ relative


def weighted_median(g: Graph, d: DistanceMatrix, w: WeightState) -> int:
    """Vertex minimizing the weighted distance cost; ties to smallest id.

    A vertex holding strictly more than half the weight is always the
    unique minimizer (moving away from it costs more than it saves), so
    the full cost vector is only computed when no such vertex exists.
    """
    rel = w.relative
    top = int(np.argmax(rel))
    if rel[top] > 0.5 + 1e-9:
        return top
    return int(np.argmin(median_costs(g, d, rel)))


def consistent_set(g: Graph, d: DistanceMatrix, q: int, reply) -> CompatibleSet:
    """Vertices for which the reply at query q could have been truthful.

    A yes reply is consistent with q alone. A neighbor reply u is
    consistent with every vertex having u on some shortest path from q,
    i.e. d(u, x) = d(q, x) - 1.
    """
    from .oracle import Answer, ProtocolError  # cycle-free: oracle imports nothing from here

    if isinstance(reply, Answer):
        if reply.kind == "yes":
            return CompatibleSet.singleton(g.n, q)
        if reply.kind != "neighbor":
            raise ProtocolError(f"graph reply must be yes/neighbor, got {reply.kind}")
        u = reply.vertex
    else:
        u = int(reply)
        if u == q:
            return CompatibleSet.singleton(g.n, q)
    if u is None or u not in g.adjacency[q]:
        raise ProtocolError(f"reply vertex {u} is not a neighbor of query {q}")
    mask = d.dist[u] == d.dist[q] - 1
    return CompatibleSet(mask)


# ---------------------------------------------------------------------------
# Loading and generation
# ---------------------------------------------------------------------------


def load_graph(path) -> Graph:
    """Read a graph file: header "n m", then m lines "u v", 0-based ids.

    Blank lines and lines starting with '#' are ignored. Self-loops,
    out-of-range ids, malformed lines, and disconnected graphs are
    rejected with the offending line named where one exists.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 2:
                    raise GraphFormatError(f"{path}:{lineno}: expected header 'n m'")
                header = (int(parts[0]), int(parts[1]))
                continue
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected edge 'u v'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphFormatError(f"{path}:{lineno}: non-integer vertex id") from exc
            n = header[0]
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"{path}:{lineno}: vertex id out of range [0, {n})")
            if u == v:
                raise GraphFormatError(f"{path}:{lineno}: self-loop {u} {v}")
            edges.append((u, v))
    if header is None:
        raise GraphFormatError(f"{path}: empty graph file")
    n, m = header
    if len(edges) != m:
        raise GraphFormatError(f"{path}: header promises {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], layout_hint="path")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphFormatError("cycle needs n >= 3")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Graph.from_edges(n, edges)


def star_graph(n: int) -> Graph:
    """Center is vertex 0, leaves are 1..n-1."""
    if n < 2:
        raise GraphFormatError("star needs n >= 2")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def grid_graph(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise GraphFormatError("grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(
        rows * cols, edges, layout_hint="grid", layout_shape=(rows, cols)
    )


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    return Graph.from_edges(n, edges)


def gnm_graph(n: int, m: int, rng: np.random.Generator, max_tries: int = 200) -> Graph:
    """Uniform n-vertex m-edge graph conditioned on connectivity."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if m < n - 1 or m > len(pairs):
        raise GraphFormatError(f"gnm needs n-1 <= m <= n(n-1)/2, got m={m}")
    for _ in range(max_tries):
        chosen = rng.choice(len(pairs), size=m, replace=False)
        try:
            return Graph.from_edges(n, [pairs[int(i)] for i in chosen])
        except GraphFormatError:
            continue
    raise GraphFormatError(f"no connected graph with n={n}, m={m} after {max_tries} tries")


def _square_factor(n: int) -> tuple[int, int]:
    r = int(np.sqrt(n))
    while r > 1 and n % r != 0:
        r -= 1
    return r, n // r


def generate_graph(name: str, n: int, rng: np.random.Generator | None = None) -> Graph:
    """Build a named generator graph on n vertices (CLI --gen dispatch)."""
    if name == "path":
        return path_graph(n)
    if name == "cycle":
        return cycle_graph(n)
    if name == "star":
        return star_graph(n)
    if name == "grid":
        rows, cols = _square_factor(n)
        return grid_graph(rows, cols)
    if name == "random-tree":
        if rng is None:
            raise GraphFormatError("random-tree generator needs a seeded rng")
        return random_tree(n, rng)
    if name == "gnm":
        if rng is None:
            raise GraphFormatError("gnm generator needs a seeded rng")
        m = min(2 * n, n * (n - 1) // 2)
        return gnm_graph(n, m, rng)
    raise GraphFormatError(f"unknown graph generator {name!r}; choose from {sorted(GENERATORS)}")


GENERATORS = ("path", "cycle", "star", "grid", "random-tree", "gnm")
