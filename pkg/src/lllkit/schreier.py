"""Colored Schreier graphs as points ``(H, omega)``.

A point is a Schreier graph of a finite transitive right action, rooted at
the point whose stabilizer is ``H``, together with a vertex coloring.  An
element ``g`` of the normalizer of ``H`` moves the point by the graph
automorphism ``theta_g(Ha) = H g^-1 a``; when ``theta_g`` preserves the
coloring and ``g`` is not in ``H`` the coloring contains a repetitive path,
which :func:`repetitive_witness` builds explicitly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._common import NormalizerError, PreconditionError
from .graphs import ColoredGraph, Graph
from .groups import GroupFamily, GroupPatch, SchreierGraph, family_from_spec, schreier_graph
from .subgroups import FiniteGroup, FiniteGSystem, Subgroup, conjugate, stability_system, stabilizer_map

__all__ = [
    "ColoredSchreierPoint",
    "GraphAutomorphism",
    "RepetitiveWitness",
    "automorphism_from_normalizer",
    "repetitive_witness",
    "stabilizer_on_patch",
    "find_automorphisms",
    "finite_index_realization",
]


@dataclass(frozen=True, eq=False)
class ColoredSchreierPoint:
    graph: SchreierGraph
    colors: tuple[int, ...]
    alphabet_size: int | None = None

    def __post_init__(self):
        colors = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        if len(colors) != self.graph.n:
            raise PreconditionError("every vertex needs a color")
        if self.alphabet_size is None:
            object.__setattr__(self, "alphabet_size", max(colors, default=1))

    @property
    def root(self) -> int:
        return self.graph.root

    def colored_graph(self) -> ColoredGraph:
        """The underlying simple undirected graph with the same coloring."""
        return ColoredGraph(Graph(self.graph.n, self.graph.undirected_edges()), self.colors, self.alphabet_size)

    def to_dict(self) -> dict:
        d = self.graph.to_dict()
        d["colors"] = list(self.colors)
        d["C"] = self.alphabet_size
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ColoredSchreierPoint":
        family = family_from_spec(d["family"])
        n = len(d["vertices"])
        table = np.full((n, family.d), -1, dtype=np.int64)
        for v, name, w in d["edges"]:
            table[int(v), family.names.index(name)] = int(w)
        if (table < 0).any():
            raise PreconditionError("edge list misses some (vertex, generator) pairs")
        graph = SchreierGraph(family, table, int(d.get("root", 0)))
        return cls(graph, tuple(d["colors"]), d.get("C"))


@dataclass(frozen=True)
class GraphAutomorphism:
    """Vertex permutation commuting with every generator: ``theta(v.s) = theta(v).s``."""

    perm: tuple[int, ...]

    @classmethod
    def checked(cls, graph: SchreierGraph, perm: Sequence[int]) -> "GraphAutomorphism":
        perm = tuple(int(x) for x in perm)
        if sorted(perm) != list(range(graph.n)):
            raise PreconditionError("not a permutation of the vertices")
        for v, s, w in graph.labeled_edges():
            if graph.table[perm[v], s] != perm[w]:
                raise PreconditionError(f"labeled edge ({v}, {graph.family.names[s]}, {w}) is not preserved")
        return cls(perm)

    def __call__(self, v: int) -> int:
        return self.perm[v]

    @property
    def is_identity(self) -> bool:
        return all(v == w for v, w in enumerate(self.perm))

    @property
    def fixed_points(self) -> list[int]:
        return [v for v, w in enumerate(self.perm) if v == w]

    def preserves(self, colors: Sequence[int]) -> bool:
        return all(colors[w] == colors[v] for v, w in enumerate(self.perm))


def automorphism_from_normalizer(point: ColoredSchreierPoint, g) -> GraphAutomorphism:
    """``theta_g: H a -> H g^-1 a``.  Raises :class:`NormalizerError` naming a
    labeled edge that the would-be map breaks when ``g`` does not normalize
    ``H``."""
    graph = point.graph
    fam = graph.family
    start = graph.act(graph.root, fam.inverse(g))
    perm = [graph.act_word(start, w) for w in graph.tree_words]
    for v, s, w in graph.labeled_edges():
        if graph.table[perm[v], s] != perm[w]:
            raise NormalizerError((v, fam.names[s], w))
    if len(set(perm)) != graph.n:
        raise NormalizerError(None, "induced map is not injective")
    theta = GraphAutomorphism(tuple(perm))
    if not graph.contains(g):
        assert not theta.fixed_points, "g outside H must act without fixed points"
    return theta


@dataclass(frozen=True)
class RepetitiveWitness:
    path: tuple[int, ...]
    word: tuple[str, ...]  # generators along a_1 -> a_{n+1}

    def __len__(self):
        return len(self.path)


def _bfs(graph: SchreierGraph, a: int) -> tuple[list[int], list]:
    """Distances from ``a`` and, for each vertex, ``(parent, generator)`` of its
    shortlex-least word."""
    dist = [-1] * graph.n
    parent: list = [None] * graph.n
    dist[a] = 0
    queue = deque([a])
    while queue:
        v = queue.popleft()
        for s in range(graph.family.d):
            w = int(graph.table[v, s])
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                parent[w] = (v, s)
                queue.append(w)
    return dist, parent


def repetitive_witness(point: ColoredSchreierPoint, theta: GraphAutomorphism) -> RepetitiveWitness:
    """Repetitive simple path forced by a fixed-point-free color-preserving automorphism.

    Picks ``a`` minimizing ``dist(a, theta(a))`` (smallest vertex on ties),
    walks a shortlex-least shortest path ``a_1 .. a_{n+1}`` to ``theta(a)``,
    then repeats the same generator word to reach ``a_{2n} = theta(a_n)``.
    """
    graph = point.graph
    if theta.is_identity or theta.fixed_points:
        raise PreconditionError("automorphism must be fixed-point free")
    if not theta.preserves(point.colors):
        raise PreconditionError("automorphism does not preserve the coloring")
    GraphAutomorphism.checked(graph, theta.perm)

    best = None
    for a in range(graph.n):
        dist, parent = _bfs(graph, a)
        if best is None or dist[theta(a)] < best[0]:
            best = (dist[theta(a)], a, parent)
    n, a, parent = best
    word = []
    v = theta(a)
    while v != a:
        v, s = parent[v]
        word.append(s)
    word.reverse()

    path = [a]
    for s in word:
        path.append(int(graph.table[path[-1], s]))
    for s in word[:-1]:
        path.append(int(graph.table[path[-1], s]))
    assert all(path[n + i] == theta(path[i]) for i in range(n))
    assert len(set(path)) == 2 * n, "walk is not a simple path"
    assert all(point.colors[path[i]] == point.colors[path[n + i]] for i in range(n))
    return RepetitiveWitness(tuple(path), tuple(graph.family.names[s] for s in word))


def stabilizer_on_patch(point: ColoredSchreierPoint, test_elements: GroupPatch) -> list:
    """Elements ``g`` of the patch with ``g (H, omega) = (H, omega)``, in patch order."""
    out = []
    for g in test_elements.elements:
        try:
            theta = automorphism_from_normalizer(point, g)
        except NormalizerError:
            continue
        if theta.preserves(point.colors):
            out.append(g)
    return out


def find_automorphisms(graph: SchreierGraph, colors: Sequence[int] | None = None,
                       labeled: bool = True) -> list[GraphAutomorphism]:
    """Every automorphism of the graph (optionally color-preserving), sorted.

    ``labeled=True`` searches generator-preserving automorphisms, which are
    fixed by the image of the root; ``labeled=False`` searches automorphisms
    of the underlying simple graph with a VF2 matcher.
    """
    found = set()
    if labeled:
        for t in range(graph.n):
            perm = [graph.act_word(t, w) for w in graph.tree_words]
            if len(set(perm)) != graph.n:
                continue
            if any(graph.table[perm[v], s] != perm[w] for v, s, w in graph.labeled_edges()):
                continue
            found.add(tuple(perm))
    else:
        from networkx.algorithms.isomorphism import GraphMatcher

        nxg = Graph(graph.n, graph.undirected_edges()).to_networkx()
        for m in GraphMatcher(nxg, nxg).isomorphisms_iter():
            found.add(tuple(m[v] for v in range(graph.n)))
    autos = [GraphAutomorphism(p) for p in sorted(found)]
    if colors is not None:
        autos = [th for th in autos if th.preserves(colors)]
    return autos


def finite_index_realization(Z: Sequence[Subgroup], H: Subgroup, G: FiniteGroup) -> FiniteGSystem:
    """The orbit of ``(H, H)`` in ``Z x G/H``; ``G`` conjugates the first
    coordinate and left-multiplies the coset.  Its stabilizer at ``(H, H)``
    is ``H`` and its stability system is ``Z``."""
    Z = list(Z)
    if H not in Z:
        raise PreconditionError("H is not a member of Z")
    orbit_H = {conjugate(G, g, H) for g in range(G.order)}
    if set(Z) != orbit_H:
        raise PreconditionError("Z is not the conjugation orbit of H")

    def coset(x):
        return tuple(sorted(G.mul(x, h) for h in H.elements))

    x0 = (H, coset(G.identity))
    points = [x0]
    index = {x0: 0}
    queue = deque([x0])
    while queue:
        K, c = queue.popleft()
        for g in range(G.order):
            y = (conjugate(G, g, K), coset(G.mul(g, c[0])))
            if y not in index:
                index[y] = len(points)
                points.append(y)
                queue.append(y)
    table = np.empty((G.order, len(points)), dtype=np.int64)
    for g in range(G.order):
        for i, (K, c) in enumerate(points):
            table[g, i] = index[(conjugate(G, g, K), coset(G.mul(g, c[0])))]
    X = FiniteGSystem(G, table, points)
    assert stabilizer_map(X, G)[0] == H
    assert set(stability_system(X, G)) == set(Z)
    return X
