"""Finitely generated groups at desk scale: canonical forms, word-metric
balls, shift actions on configurations and Schreier graphs of finite actions.

Generators are always a symmetric list ``S``; ``inv[i]`` is the index of the
inverse of ``S[i]``.  Generator names are single letters: ``a, b, ...`` for
the given generators and the upper case letter for an inverse (a
self-inverse generator has no separate upper case letter).
"""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Mapping, Sequence

import numpy as np

from ._common import CapExceededError, NotTransitiveError, PreconditionError, ValidationError

__all__ = [
    "GroupFamily",
    "FreeGroup",
    "FreeAbelian",
    "FinitePermutation",
    "FiniteTable",
    "GroupPatch",
    "Configuration",
    "SchreierGraph",
    "ball",
    "shift",
    "schreier_graph",
    "regular_action",
    "family_from_spec",
    "DEFAULT_BALL_CAP",
]

DEFAULT_BALL_CAP = 10**6

Element = Hashable


class GroupFamily:
    """Common interface; subclasses fix the canonical form of elements."""

    generators: list
    inv: list[int]
    names: list[str]

    @property
    def d(self) -> int:
        return len(self.generators)

    def identity(self):
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def key(self, g):
        """Sort key of the canonical form (lexicographic order within a layer)."""
        raise NotImplementedError

    def word(self, g) -> list[int]:
        """A word in generator indices representing ``g``."""
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError

    def to_json(self, g) -> Any:
        return g

    def from_json(self, x) -> Element:
        return x

    def mul_gen(self, g, i: int):
        return self.multiply(g, self.generators[i])

    def product(self, *elements):
        out = self.identity()
        for g in elements:
            out = self.multiply(out, g)
        return out

    def parse(self, text: str):
        """Element spelled by generator letters, e.g. ``"aB"``; ``"e"`` is the identity."""
        text = text.strip()
        out = self.identity()
        if text in ("", "e", "1"):
            return out
        for ch in text:
            if ch not in self.names:
                raise ValidationError(f"unknown generator letter {ch!r}; have {self.names}")
            out = self.mul_gen(out, self.names.index(ch))
        return out

    def format(self, g) -> str:
        w = self.word(g)
        return "".join(self.names[i] for i in w) or "e"


def _pair_names(k: int) -> list[str]:
    if k > 26:
        raise ValidationError("at most 26 generators are supported")
    names = []
    for i in range(k):
        names += [string.ascii_lowercase[i], string.ascii_uppercase[i]]
    return names


class FreeGroup(GroupFamily):
    """Free group of rank ``k``; elements are reduced words, letters ``±(i+1)``."""

    def __init__(self, k: int):
        if k < 1:
            raise ValidationError("rank must be >= 1")
        self.k = k
        self.generators = []
        for i in range(1, k + 1):
            self.generators += [(i,), (-i,)]
        self.inv = [i ^ 1 for i in range(2 * k)]
        self.names = _pair_names(k)

    def __repr__(self):
        return f"FreeGroup({self.k})"

    def identity(self):
        return ()

    def multiply(self, g, h):
        out = list(g)
        for x in h:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def inverse(self, g):
        return tuple(-x for x in reversed(g))

    @staticmethod
    def _letter_key(x):
        return 2 * (abs(x) - 1) + (x < 0)

    def key(self, g):
        return tuple(self._letter_key(x) for x in g)

    def word(self, g):
        return [self._letter_key(x) for x in g]

    def spec(self):
        return {"family": "free", "params": {"rank": self.k}}

    def to_json(self, g):
        return self.format(g)

    def from_json(self, x):
        return self.parse(x)


class FreeAbelian(GroupFamily):
    """``Z^d`` with standard generators ordered ``e1, -e1, e2, -e2, ...``."""

    def __init__(self, d: int):
        if d < 1:
            raise ValidationError("rank must be >= 1")
        self.rank = d
        self.generators = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            self.generators += [tuple(e), tuple(-x for x in e)]
        self.inv = [i ^ 1 for i in range(2 * d)]
        self.names = _pair_names(d)

    def __repr__(self):
        return f"FreeAbelian({self.rank})"

    def identity(self):
        return (0,) * self.rank

    def multiply(self, g, h):
        return tuple(x + y for x, y in zip(g, h))

    def inverse(self, g):
        return tuple(-x for x in g)

    def key(self, g):
        # 0, 1, -1, 2, -2, ...: positive generators sort before their inverses
        return tuple(2 * x - 1 if x > 0 else -2 * x for x in g)

    def word(self, g):
        w = []
        for i, x in enumerate(g):
            w += [2 * i if x > 0 else 2 * i + 1] * abs(x)
        return w

    def spec(self):
        return {"family": "abelian", "params": {"rank": self.rank}}

    def to_json(self, g):
        return list(g)

    def from_json(self, x):
        if isinstance(x, str):
            return self.parse(x)
        return tuple(int(v) for v in x)


class _FiniteFamily(GroupFamily):
    """Shared machinery for finite families: words come from a BFS tree."""

    @cached_property
    def _words(self) -> dict:
        words = {self.identity(): []}
        queue = deque([self.identity()])
        while queue:
            g = queue.popleft()
            for i in range(self.d):
                h = self.mul_gen(g, i)
                if h not in words:
                    words[h] = words[g] + [i]
                    queue.append(h)
        return words

    def word(self, g):
        return list(self._words[g])

    @property
    def order(self) -> int:
        return len(self._words)

    def elements(self) -> list:
        return sorted(self._words, key=lambda g: (len(self._words[g]), self.key(g)))


class FinitePermutation(_FiniteFamily):
    """Permutation group on ``range(degree)``; elements are image tuples.

    Products compose left to right: ``(p * q)[v] == q[p[v]]``, so that points
    are acted on from the right.
    """

    def __init__(self, degree: int, gens: Sequence[Sequence[int]]):
        self.degree = degree
        base = [tuple(int(x) for x in g) for g in gens]
        for g in base:
            if sorted(g) != list(range(degree)):
                raise ValidationError(f"{g} is not a permutation of range({degree})")
            if g == tuple(range(degree)):
                raise ValidationError("generating set may not contain the identity")
        self.base = base
        self.generators, self.inv, self.names = [], [], []
        for i, g in enumerate(base):
            gi = self.inverse(g)
            lo = string.ascii_lowercase[i]
            if gi == g:
                self.generators.append(g)
                self.inv.append(len(self.generators) - 1)
                self.names.append(lo)
            else:
                j = len(self.generators)
                self.generators += [g, gi]
                self.inv += [j + 1, j]
                self.names += [lo, lo.upper()]

    def __repr__(self):
        return f"FinitePermutation({self.degree}, {self.base})"

    def identity(self):
        return tuple(range(self.degree))

    def multiply(self, g, h):
        return tuple(h[x] for x in g)

    def inverse(self, g):
        out = [0] * len(g)
        for i, x in enumerate(g):
            out[x] = i
        return tuple(out)

    def key(self, g):
        return g

    def spec(self):
        return {"family": "perm", "params": {"degree": self.degree, "generators": [list(g) for g in self.base]}}

    def to_json(self, g):
        return list(g)

    def from_json(self, x):
        if isinstance(x, str):
            return self.parse(x)
        return tuple(int(v) for v in x)


class FiniteTable(_FiniteFamily):
    """Finite group from a Cayley table over ``0..n-1``; ``table[a][b] = ab``."""

    def __init__(self, table: Sequence[Sequence[int]], gens: Sequence[int]):
        self.table = np.asarray(table, dtype=np.int64)
        n = len(self.table)
        if self.table.shape != (n, n):
            raise ValidationError("Cayley table must be square")
        ids = [e for e in range(n) if (self.table[e] == np.arange(n)).all() and (self.table[:, e] == np.arange(n)).all()]
        if len(ids) != 1:
            raise ValidationError("Cayley table has no identity")
        self.e = ids[0]
        inverses = {}
        for a in range(n):
            hits = np.flatnonzero(self.table[a] == self.e)
            if len(hits) != 1:
                raise ValidationError(f"element {a} has no unique inverse")
            inverses[a] = int(hits[0])
        self._inverse = inverses
        self.base = [int(g) for g in gens]
        self.generators, self.inv, self.names = [], [], []
        for i, g in enumerate(self.base):
            if g == self.e:
                raise ValidationError("generating set may not contain the identity")
            lo = string.ascii_lowercase[i]
            if inverses[g] == g:
                self.generators.append(g)
                self.inv.append(len(self.generators) - 1)
                self.names.append(lo)
            else:
                j = len(self.generators)
                self.generators += [g, inverses[g]]
                self.inv += [j + 1, j]
                self.names += [lo, lo.upper()]

    def __repr__(self):
        return f"FiniteTable(order={len(self.table)}, gens={self.base})"

    def identity(self):
        return self.e

    def multiply(self, g, h):
        return int(self.table[g, h])

    def inverse(self, g):
        return self._inverse[g]

    def key(self, g):
        return (g,)

    def spec(self):
        return {"family": "table", "params": {"table": self.table.tolist(), "generators": self.base}}

    def from_json(self, x):
        if isinstance(x, str):
            return self.parse(x)
        return int(x)


def family_from_spec(spec: Mapping | str) -> GroupFamily:
    """Build a family from ``{"family": ..., "params": ...}`` or a short string.

    Short strings: ``free:k``, ``abelian:d``, ``cyclic:n`` (``Z/n`` on one
    generator), ``sym:n`` (transposition and long cycle).
    """
    if isinstance(spec, str):
        kind, _, arg = spec.partition(":")
        if kind == "free":
            return FreeGroup(int(arg or 2))
        if kind == "abelian":
            return FreeAbelian(int(arg or 1))
        if kind == "cyclic":
            n = int(arg)
            return FinitePermutation(n, [tuple((i + 1) % n for i in range(n))])
        if kind == "sym":
            n = int(arg)
            swap = (1, 0) + tuple(range(2, n))
            cycle = tuple((i + 1) % n for i in range(n))
            return FinitePermutation(n, [swap, cycle] if n > 2 else [swap])
        raise ValidationError(f"unknown group family {spec!r}")
    kind, params = spec["family"], spec.get("params", {})
    if kind == "free":
        return FreeGroup(int(params["rank"]))
    if kind == "abelian":
        return FreeAbelian(int(params["rank"]))
    if kind == "perm":
        return FinitePermutation(int(params["degree"]), params["generators"])
    if kind == "table":
        return FiniteTable(params["table"], params["generators"])
    raise ValidationError(f"unknown family {kind!r}")


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True, eq=False)
class GroupPatch:
    """Word-metric ball in BFS order with its right-multiplication edge table.

    ``edges[i, s]`` is the index of ``elements[i] * S[s]`` or ``-1`` when that
    product lies outside the patch.
    """

    family: GroupFamily
    radius: int
    elements: tuple
    edges: np.ndarray
    layer: np.ndarray
    center: Any = None

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def cayley_edges(self) -> list[tuple[int, int, int]]:
        """Labeled edges ``(i, s, j)`` with both ends in the patch."""
        return [(i, s, int(j)) for i in range(len(self)) for s, j in enumerate(self.edges[i]) if j >= 0]


def ball(family: GroupFamily, r: int, cap: int = DEFAULT_BALL_CAP) -> GroupPatch:
    """All elements at word distance ``<= r`` from the identity."""
    if r < 0:
        raise PreconditionError("radius must be >= 0")
    e = family.identity()
    elements = [e]
    seen = {e: 0}
    layers = [0]
    frontier = [e]
    for rho in range(1, r + 1):
        new = set()
        for g in frontier:
            for s in range(family.d):
                h = family.mul_gen(g, s)
                if h not in seen and h not in new:
                    new.add(h)
        if not new:
            break
        frontier = sorted(new, key=family.key)
        if len(elements) + len(frontier) > cap:
            raise CapExceededError(f"ball of radius {r} exceeds {cap} elements")
        for h in frontier:
            seen[h] = len(elements)
            elements.append(h)
            layers.append(rho)
    edges = np.full((len(elements), family.d), -1, dtype=np.int64)
    for i, g in enumerate(elements):
        for s in range(family.d):
            edges[i, s] = seen.get(family.mul_gen(g, s), -1)
    return GroupPatch(family, r, tuple(elements), edges, np.array(layers, dtype=np.int64), e)


# ---------------------------------------------------------------------------
# configurations and the shift


@dataclass(frozen=True, eq=False)
class Configuration:
    """A finite window of a point of ``K^G``: ``values[g]`` for ``g`` in the window."""

    family: GroupFamily
    values: Mapping
    alphabet_size: int = 2

    @property
    def window(self) -> list:
        return sorted(self.values, key=lambda g: self.family.key(g))

    def __getitem__(self, g):
        return self.values[g]

    def __eq__(self, other):
        return isinstance(other, Configuration) and dict(self.values) == dict(other.values)

    @classmethod
    def from_array(cls, patch: GroupPatch, array: Sequence[int], alphabet_size: int = 2) -> "Configuration":
        if len(array) != len(patch):
            raise ValidationError("array length does not match the patch")
        return cls(patch.family, {g: int(v) for g, v in zip(patch.elements, array)}, alphabet_size)

    def to_array(self, patch: GroupPatch) -> np.ndarray:
        return np.array([self.values[g] for g in patch.elements], dtype=np.int64)

    def restrict(self, elements) -> "Configuration":
        return Configuration(self.family, {g: self.values[g] for g in elements}, self.alphabet_size)


def shift(g, omega: Configuration, window=None) -> Configuration:
    """``(g omega)(h) = omega(g^-1 h)`` on the valid window.

    Without ``window`` the result lives on ``g`` times omega's window.  With
    ``window`` (e.g. the elements of a patch) the result is restricted to
    those ``h`` in it for which ``g^-1 h`` is in omega's window; the returned
    configuration's ``window`` reports what survived.
    """
    fam = omega.family
    if window is None:
        values = {fam.multiply(g, k): v for k, v in omega.values.items()}
    else:
        gi = fam.inverse(g)
        values = {}
        for h in window:
            k = fam.multiply(gi, h)
            if k in omega.values:
                values[h] = omega.values[k]
    if not values:
        raise PreconditionError("empty valid window")
    return Configuration(fam, values, omega.alphabet_size)


# ---------------------------------------------------------------------------
# Schreier graphs


@dataclass(frozen=True, eq=False)
class SchreierGraph:
    """Orbit graph of a transitive right action on ``0..n-1``.

    ``table[v, s]`` is ``v . S[s]``; the root's stabilizer is the realized
    subgroup ``H`` and vertex ``v`` stands for the coset ``H a`` with
    ``root . a == v``.
    """

    family: GroupFamily
    table: np.ndarray
    root: int = 0

    @property
    def n(self) -> int:
        return len(self.table)

    def act(self, v: int, g) -> int:
        for s in self.family.word(g):
            v = int(self.table[v, s])
        return v

    def act_word(self, v: int, word: Sequence[int]) -> int:
        for s in word:
            v = int(self.table[v, s])
        return v

    def labeled_edges(self) -> list[tuple[int, int, int]]:
        return [(v, s, int(self.table[v, s])) for v in range(self.n) for s in range(self.family.d)]

    def neighbors(self, v: int) -> list[int]:
        return sorted({int(w) for w in self.table[v] if w != v})

    def undirected_edges(self) -> list[tuple[int, int]]:
        return sorted({(min(v, int(w)), max(v, int(w))) for v in range(self.n) for w in self.table[v] if w != v})

    def contains(self, g) -> bool:
        """Is ``g`` in the root stabilizer ``H``?"""
        return self.act(self.root, g) == self.root

    @cached_property
    def tree_words(self) -> list[list[int]]:
        """For every vertex the shortlex-least generator word leading from the root."""
        words: list = [None] * self.n
        words[self.root] = []
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for s in range(self.family.d):
                w = int(self.table[v, s])
                if words[w] is None:
                    words[w] = words[v] + [s]
                    queue.append(w)
        return words

    def to_dict(self) -> dict:
        return {"family": self.family.spec(), "root": self.root,
                "vertices": list(range(self.n)),
                "edges": [[v, self.family.names[s], w] for v, s, w in self.labeled_edges()]}

    def to_dot(self, colors: Sequence[int] | None = None) -> str:
        lines = ["digraph schreier {"]
        for v in range(self.n):
            label = f"{v}" if colors is None else f"{v}:{colors[v]}"
            shape = ", shape=doublecircle" if v == self.root else ""
            lines.append(f'  {v} [label="{label}"{shape}];')
        for v, s, w in self.labeled_edges():
            # draw each generator pair once
            if self.family.inv[s] >= s:
                lines.append(f'  {v} -> {w} [label="{self.family.names[s]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def schreier_graph(family: GroupFamily, action: Sequence[Sequence[int]], basepoint: int = 0) -> SchreierGraph:
    """Schreier graph of the right action given by one permutation per
    *named* generator (``family.base`` order for finite families, one per
    rank for free families); inverse generators act by the inverse
    permutation."""
    perms = [tuple(int(x) for x in p) for p in action]
    if not perms:
        raise ValidationError("need at least one generator permutation")
    n = len(perms[0])
    for p in perms:
        if sorted(p) != list(range(n)):
            raise ValidationError(f"{p} is not a permutation of range({n})")
    full = []
    k = 0
    for s in range(family.d):
        t = family.inv[s]
        if t < s:
            inv_of = full[t]
            out = [0] * n
            for i, x in enumerate(inv_of):
                out[x] = i
            full.append(tuple(out))
        else:
            if k >= len(perms):
                raise ValidationError("fewer permutations than generators")
            if t == s and any(perms[k][perms[k][i]] != i for i in range(n)):
                raise ValidationError(f"generator {family.names[s]} is an involution but its action is not")
            full.append(perms[k])
            k += 1
    if k != len(perms):
        raise ValidationError("more permutations than generators")
    table = np.array(full, dtype=np.int64).T.copy()
    graph = SchreierGraph(family, table, basepoint)
    if isinstance(family, _FiniteFamily):
        _check_relations(graph)
    reached = [w is not None for w in graph.tree_words]
    if not all(reached):
        raise NotTransitiveError(basepoint, reached.index(False))
    return graph


def _check_relations(graph: SchreierGraph):
    # the action must factor through the finite group: equal elements, equal maps
    fam = graph.family
    seen: dict = {}
    for g, w in fam._words.items():
        img = tuple(graph.act_word(v, w) for v in range(graph.n))
        seen[g] = img
    for g, img in seen.items():
        for s in range(fam.d):
            h = fam.mul_gen(g, s)
            expect = tuple(int(graph.table[img[v], s]) for v in range(graph.n))
            if seen[h] != expect:
                raise ValidationError("generator permutations do not define an action of the group")


def regular_action(family: GroupFamily) -> tuple[list[list[int]], list]:
    """Right-regular action of a finite family on its own elements.

    Returns the generator permutations (for :func:`schreier_graph`) and the
    element listing, whose position 0 is the identity.
    """
    if not isinstance(family, _FiniteFamily):
        raise PreconditionError("regular action needs a finite family")
    elements = family.elements()
    index = {g: i for i, g in enumerate(elements)}
    perms = []
    for s in range(family.d):
        if family.inv[s] < s:
            continue
        perms.append([index[family.mul_gen(g, s)] for g in elements])
    return perms, elements
