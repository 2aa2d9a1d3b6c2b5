"""The space of subgroups of a finite group under conjugation.

For a finite group everything is discrete: closures are identities, a
minimal subsystem is a single orbit, and the stability system of a finite
``G``-set is just the set of its point stabilizers.

Groups act on the left here: ``table[a, b] = ab`` and, for permutation
groups, ``ab`` means "apply ``b`` first" so that ``(ab) x = a(b x)``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Mapping, Sequence

import numpy as np

from ._common import CapExceededError, PreconditionError, ValidationError

__all__ = [
    "FiniteGroup",
    "Subgroup",
    "FiniteGSystem",
    "StabilityReport",
    "enumerate_subgroups",
    "conjugation_orbits",
    "stabilizer_map",
    "stability_system",
    "check_proposition_stability",
    "is_essentially_free",
    "generated_subgroup",
    "normalizer",
    "conjugate",
    "named_group",
    "DEFAULT_GROUP_CAP",
]

DEFAULT_GROUP_CAP = 256


class FiniteGroup:
    """Finite group given by a multiplication table over ``0..n-1``.

    ``labels[i]`` is a printable name of element ``i`` (a permutation tuple
    when built from permutations).
    """

    def __init__(self, table, labels: Sequence | None = None, name: str = ""):
        t = np.asarray(table, dtype=np.int64)
        n = len(t)
        if t.shape != (n, n) or n == 0:
            raise ValidationError("multiplication table must be a non-empty square")
        rng = np.arange(n)
        if any(sorted(row) != list(rng) for row in t.tolist()) or any(sorted(col) != list(rng) for col in t.T.tolist()):
            raise ValidationError("multiplication table is not a Latin square")
        ids = [e for e in range(n) if (t[e] == rng).all() and (t[:, e] == rng).all()]
        if len(ids) != 1:
            raise ValidationError("no two-sided identity")
        e = ids[0]
        # associativity: (ab)c == a(bc) for all triples
        if not all((t[t[a]] == t[a][t]).all() for a in range(n)):
            raise ValidationError("multiplication is not associative")
        inverse = np.array([int(np.flatnonzero(t[a] == e)[0]) for a in range(n)])
        if not (t[inverse, rng] == e).all():
            raise ValidationError("left and right inverses disagree")
        self.table = t
        self.identity = e
        self.inverse = inverse
        self.labels = list(labels) if labels is not None else list(range(n))
        self.name = name

    def __repr__(self):
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    @classmethod
    def from_permutations(cls, gens: Sequence[Sequence[int]], name: str = "", cap: int = DEFAULT_GROUP_CAP) -> "FiniteGroup":
        gens = [tuple(int(x) for x in g) for g in gens]
        degree = len(gens[0]) if gens else 0
        e = tuple(range(degree))

        def compose(a, b):
            return tuple(a[b[x]] for x in range(degree))

        elements = [e]
        seen = {e}
        queue = deque([e])
        while queue:
            g = queue.popleft()
            for s in gens:
                h = compose(s, g)
                if h not in seen:
                    seen.add(h)
                    elements.append(h)
                    queue.append(h)
                    if len(elements) > cap:
                        raise CapExceededError(f"group order exceeds cap {cap}")
        elements.sort()
        index = {g: i for i, g in enumerate(elements)}
        table = [[index[compose(a, b)] for b in elements] for a in elements]
        return cls(table, elements, name)

    def to_dict(self) -> dict:
        return {"name": self.name, "table": self.table.tolist(), "labels": [list(x) if isinstance(x, tuple) else x for x in self.labels]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FiniteGroup":
        if "permutations" in d:
            return cls.from_permutations(d["permutations"], d.get("name", ""))
        labels = d.get("labels")
        if labels is not None:
            labels = [tuple(x) if isinstance(x, list) else x for x in labels]
        return cls(d["table"], labels, d.get("name", ""))


def _cyclic_perm(n):
    return tuple((i + 1) % n for i in range(n))


def named_group(name: str) -> FiniteGroup:
    """Small groups by name: ``z<n>``, ``s<n>``, ``a<n>``, ``d<n>`` (order ``2n``),
    ``q8``, ``klein``, ``trivial`` and ``z<m>xz<n>``."""
    key = name.lower().strip()
    if key == "trivial":
        return FiniteGroup([[0]], [()], "trivial")
    if "x" in key and key != "klein":
        parts = [named_group(p) for p in key.split("x")]
        return _direct_product(parts, key)
    if key == "klein":
        return _direct_product([named_group("z2"), named_group("z2")], "klein")
    if key == "q8":
        # quaternion units as (sign, unit) pairs, unit in 1, i, j, k
        mult = {("1", u): (1, u) for u in "1ijk"}
        mult.update({(u, "1"): (1, u) for u in "1ijk"})
        for u in "ijk":
            mult[(u, u)] = (-1, "1")
        for a, b, c in ("ijk", "jki", "kij"):
            mult[(a, b)] = (1, c)
            mult[(b, a)] = (-1, c)
        elems = [(s, u) for s in (1, -1) for u in "1ijk"]
        idx = {g: i for i, g in enumerate(elems)}
        table = []
        for s1, u1 in elems:
            row = []
            for s2, u2 in elems:
                s, u = mult[(u1, u2)]
                row.append(idx[(s * s1 * s2, u)])
            table.append(row)
        return FiniteGroup(table, [f"{'-' if s < 0 else ''}{u}" for s, u in elems], "q8")
    kind, num = key[0], key[1:]
    if not num.isdigit():
        raise ValidationError(f"unknown group {name!r}")
    n = int(num)
    if kind == "z":
        if n == 1:
            return named_group("trivial")
        return FiniteGroup.from_permutations([_cyclic_perm(n)], key)
    if kind == "s":
        if n == 1:
            return named_group("trivial")
        gens = [(1, 0) + tuple(range(2, n))]
        if n > 2:
            gens.append(_cyclic_perm(n))
        return FiniteGroup.from_permutations(gens, key)
    if kind == "a":
        gens = [(i, (i + 1), (i + 2)) for i in range(n - 2)]
        perms = []
        for a, b, c in gens:
            p = list(range(n))
            p[a], p[b], p[c] = b, c, a
            perms.append(tuple(p))
        return FiniteGroup.from_permutations(perms or [tuple(range(n))], key)
    if kind == "d":
        refl = tuple((-i) % n for i in range(n))
        return FiniteGroup.from_permutations([_cyclic_perm(n), refl], key)
    raise ValidationError(f"unknown group {name!r}")


def _direct_product(groups: Sequence[FiniteGroup], name: str) -> FiniteGroup:
    pairs = list(itertools.product(*(range(g.order) for g in groups)))
    idx = {p: i for i, p in enumerate(pairs)}
    table = [[idx[tuple(g.mul(x, y) for g, x, y in zip(groups, a, b))] for b in pairs] for a in pairs]
    return FiniteGroup(table, pairs, name)


@dataclass(frozen=True, order=True)
class Subgroup:
    """Sorted tuple of element indices of a :class:`FiniteGroup`."""

    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.elements)

    def __len__(self):
        return len(self.elements)

    def sort_key(self):
        return (len(self.elements), self.elements)

    def is_subgroup_of(self, G: FiniteGroup) -> bool:
        s = self._set
        if G.identity not in s:
            return False
        return all(G.mul(a, b) in s for a in s for b in s) and all(int(G.inverse[a]) in s for a in s)


def generated_subgroup(G: FiniteGroup, gens) -> Subgroup:
    elems = {G.identity}
    frontier = [G.identity]
    gens = list(gens)
    while frontier:
        new = []
        for x in frontier:
            for s in gens:
                y = G.mul(x, s)
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return Subgroup(tuple(sorted(elems)))


def conjugate(G: FiniteGroup, g: int, H: Subgroup) -> Subgroup:
    """``g H g^-1``."""
    gi = int(G.inverse[g])
    return Subgroup(tuple(sorted(G.mul(G.mul(g, h), gi) for h in H.elements)))


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(tuple(g for g in range(G.order) if conjugate(G, g, H) == H))


def enumerate_subgroups(G: FiniteGroup, cap: int = DEFAULT_GROUP_CAP) -> list[Subgroup]:
    """Every subgroup exactly once, sorted by ``(order, elements)``.

    Built bottom-up: start from the cyclic subgroups and keep adjoining
    single elements until no new subgroup appears.  Every subgroup arises
    this way since it is reached from ``{e}`` by adjoining its elements.
    """
    if G.order > cap:
        raise CapExceededError(f"group order {G.order} exceeds cap {cap}")
    found = {generated_subgroup(G, [g]) for g in range(G.order)}
    frontier = set(found)
    while frontier:
        new = set()
        for H in frontier:
            for g in range(G.order):
                if g in H:
                    continue
                K = generated_subgroup(G, H.elements + (g,))
                if K not in found:
                    new.add(K)
        found |= new
        frontier = new
    return sorted(found, key=Subgroup.sort_key)


def conjugation_orbits(subs: Sequence[Subgroup], G: FiniteGroup) -> list[tuple[Subgroup, ...]]:
    """Partition ``subs`` into conjugacy classes; each class is a URS of ``G``."""
    pool = set(subs)
    orbits = []
    for H in sorted(subs, key=Subgroup.sort_key):
        if H not in pool:
            continue
        orbit = {conjugate(G, g, H) for g in range(G.order)}
        if not orbit <= pool:
            raise PreconditionError("subgroup list is not closed under conjugation")
        pool -= orbit
        orbits.append(tuple(sorted(orbit, key=Subgroup.sort_key)))
    return orbits


class FiniteGSystem:
    """A finite ``G``-set: ``table[g, x] = g x``, points labeled ``labels[x]``."""

    def __init__(self, G: FiniteGroup, table, labels: Sequence | None = None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != G.order:
            raise ValidationError("action table must have one row per group element")
        m = t.shape[1]
        if ((t < 0) | (t >= m)).any():
            raise ValidationError("action table maps outside the point set")
        if not (t[G.identity] == np.arange(m)).all():
            raise ValidationError("identity does not act trivially")
        # (gh) x == g (h x)
        if not (t[G.table] == t[:, t]).all():
            raise ValidationError("action table violates (gh)x = g(hx)")
        self.G = G
        self.table = t
        self.labels = list(labels) if labels is not None else list(range(m))

    def __len__(self):
        return self.table.shape[1]

    def __repr__(self):
        return f"FiniteGSystem({self.G!r}, {len(self)} points)"

    def act(self, g: int, x: int) -> int:
        return int(self.table[g, x])

    def orbits(self) -> list[list[int]]:
        seen = set()
        out = []
        for x in range(len(self)):
            if x in seen:
                continue
            orb = sorted(set(int(y) for y in self.table[:, x]))
            seen.update(orb)
            out.append(orb)
        return out

    @property
    def is_minimal(self) -> bool:
        return len(self.orbits()) == 1

    @classmethod
    def regular(cls, G: FiniteGroup) -> "FiniteGSystem":
        return cls(G, G.table.copy(), list(G.labels))

    @classmethod
    def trivial(cls, G: FiniteGroup, points: int = 1) -> "FiniteGSystem":
        return cls(G, np.tile(np.arange(points), (G.order, 1)))

    @classmethod
    def natural(cls, G: FiniteGroup) -> "FiniteGSystem":
        """Permutation group acting on ``range(degree)``; labels are the permutations."""
        perms = G.labels
        if not all(isinstance(p, tuple) and sorted(p) == list(range(len(p))) for p in perms):
            raise PreconditionError("natural action needs a permutation group")
        return cls(G, np.array(perms, dtype=np.int64))

    @classmethod
    def cosets(cls, G: FiniteGroup, H: Subgroup) -> "FiniteGSystem":
        """Left multiplication on left cosets ``gH``."""
        reps, index = [], {}
        for g in range(G.order):
            c = frozenset(G.mul(g, h) for h in H.elements)
            if c not in index:
                index[c] = len(reps)
                reps.append(c)
        table = [[index[frozenset(G.mul(g, x) for x in c)] for c in reps] for g in range(G.order)]
        return cls(G, table, [tuple(sorted(c)) for c in reps])

    @classmethod
    def conjugation(cls, G: FiniteGroup, subs: Sequence[Subgroup]) -> "FiniteGSystem":
        """``S(G)`` (or an invariant part of it) under ``g . H = g H g^-1``."""
        index = {H: i for i, H in enumerate(subs)}
        table = [[index[conjugate(G, g, H)] for H in subs] for g in range(G.order)]
        return cls(G, table, list(subs))


def stabilizer_map(system: FiniteGSystem, G: FiniteGroup | None = None) -> list[Subgroup]:
    """``x -> {g : g x = x}`` for every point, each checked to be a subgroup."""
    G = G or system.G
    out = []
    for x in range(len(system)):
        H = Subgroup(tuple(int(g) for g in np.flatnonzero(system.table[:, x] == x)))
        assert H.is_subgroup_of(G)
        out.append(H)
    return out


def stability_system(system: FiniteGSystem, G: FiniteGroup | None = None) -> list[Subgroup]:
    """The set of point stabilizers, sorted; conjugation invariance is asserted."""
    G = G or system.G
    Z = sorted(set(stabilizer_map(system, G)), key=Subgroup.sort_key)
    zs = set(Z)
    assert all(conjugate(G, g, H) in zs for H in Z for g in range(G.order))
    return Z


def is_essentially_free(system: FiniteGSystem, G: FiniteGroup | None = None) -> bool:
    G = G or system.G
    return stability_system(system, G) == [Subgroup((G.identity,))]


@dataclass(frozen=True)
class StabilityReport:
    n_points: int
    joined: tuple[tuple[int, Subgroup], ...]  # the points (x, G_x)
    projection_bijective: bool
    joined_minimal: bool
    Z: tuple[Subgroup, ...]
    Z_minimal: bool
    Z_unique_minimal: bool

    @property
    def ok(self) -> bool:
        return self.projection_bijective and self.joined_minimal and self.Z_minimal and self.Z_unique_minimal

    def __bool__(self):
        return self.ok


def check_proposition_stability(system: FiniteGSystem, G: FiniteGroup | None = None) -> StabilityReport:
    """Finite form of the stability diagram for a minimal system ``X``.

    Builds ``X~ = {(x, G_x)}`` with the diagonal action and checks that the
    projection to ``X`` is a bijection, that ``X~`` and ``Z`` are single
    orbits, and that ``Z`` is the only minimal subset of ``{G_x}``.
    """
    G = G or system.G
    if not system.is_minimal:
        raise PreconditionError("system is not minimal (more than one orbit)")
    stabs = stabilizer_map(system, G)
    joined = tuple((x, stabs[x]) for x in range(len(system)))
    jindex = {p: i for i, p in enumerate(joined)}
    # diagonal action on X x S(G); must preserve the graph of x -> G_x
    jtable = np.empty((G.order, len(joined)), dtype=np.int64)
    for g in range(G.order):
        for i, (x, H) in enumerate(joined):
            image = (system.act(g, x), conjugate(G, g, H))
            jtable[g, i] = jindex[image]
    Xt = FiniteGSystem(G, jtable, list(joined))
    projection_bijective = len({x for x, _ in joined}) == len(joined) == len(system)

    Z = stability_system(system, G)
    Zsys = FiniteGSystem.conjugation(G, Z)
    minimal_subsets = [orb for orb in Zsys.orbits()]
    return StabilityReport(
        n_points=len(joined),
        joined=joined,
        projection_bijective=projection_bijective,
        joined_minimal=Xt.is_minimal,
        Z=tuple(Z),
        Z_minimal=Zsys.is_minimal,
        Z_unique_minimal=len(minimal_subsets) == 1,
    )
