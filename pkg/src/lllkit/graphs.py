"""Simple undirected graphs on ``0..n-1`` and vertex colorings of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._common import ValidationError

__all__ = ["Graph", "ColoredGraph"]


class Graph:
    """Undirected simple graph; loops and repeated edges are dropped."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        self.n = int(n)
        adj = [set() for _ in range(self.n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self._paths: dict[int, dict[int, np.ndarray]] = {}

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def subgraph(self, vertices: Sequence[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph, relabeled; also returns the old labels."""
        keep = sorted(set(vertices))
        new = {v: i for i, v in enumerate(keep)}
        return Graph(len(keep), [(new[u], new[v]) for u, v in self.edges if u in new and v in new]), keep

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def from_edgelist(cls, text: str, n: int | None = None) -> "Graph":
        """Parse ``u v`` lines (0-based); ``#`` starts a comment."""
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            u, v = line.split()[:2]
            edges.append((int(u), int(v)))
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return cls(n, edges)

    @classmethod
    def from_patch(cls, patch) -> "Graph":
        """Undirected Cayley graph induced on a :class:`~lllkit.groups.GroupPatch`."""
        return cls(len(patch), [(i, j) for i, _, j in patch.cayley_edges()])

    def to_edgelist(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True, eq=False)
class ColoredGraph:
    """A graph with colors in ``1..alphabet_size``.

    ``certified`` records whether the alphabet met the proven bound when the
    coloring was produced (``None`` when not produced by a solver).
    """

    graph: Graph
    colors: tuple[int, ...]
    alphabet_size: int
    certified: bool | None = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        colors = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        if len(colors) != self.graph.n:
            raise ValidationError("every vertex needs exactly one color")
        if any(not 1 <= c <= self.alphabet_size for c in colors):
            raise ValidationError(f"colors must lie in 1..{self.alphabet_size}")

    def restrict(self, vertices: Sequence[int]) -> "ColoredGraph":
        sub, keep = self.graph.subgraph(vertices)
        return ColoredGraph(sub, tuple(self.colors[v] for v in keep), self.alphabet_size)

    def to_dict(self) -> dict:
        return {"n": self.graph.n, "edges": [list(e) for e in self.graph.edges],
                "C": self.alphabet_size, "colors": {str(v): c for v, c in enumerate(self.colors)},
                "certified": self.certified}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ColoredGraph":
        g = Graph(int(d["n"]), [tuple(e) for e in d["edges"]])
        colors = [int(d["colors"][str(v)]) for v in range(g.n)]
        return cls(g, tuple(colors), int(d.get("C", max(colors, default=1))), d.get("certified"))

    def to_dot(self) -> str:
        lines = ["graph coloring {"]
        for v, c in enumerate(self.colors):
            lines.append(f'  {v} [label="{v}:{c}"];')
        for u, v in self.graph.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"
