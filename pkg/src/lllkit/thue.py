"""Non-repetitive (Thue) colorings of bounded-degree graphs.

A path ``(x_1, ..., x_2n)`` is repetitive under a coloring ``c`` when
``c(x_i) == c(x_{n+i})`` for every ``i``; the ``n = 1`` case makes every
non-repetitive coloring proper.  Paths are undirected: a path and its
reversal are one event, listed with the smaller endpoint first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from ._common import CapExceededError, SolverFailure, Verdict
from .graphs import ColoredGraph, Graph
from .lll import (
    DEFAULT_MAX_ROUNDS,
    BadEvent,
    ConstraintSystem,
    LLLCertificate,
    SolveResult,
    check_certificate,
    resample_solve,
)

__all__ = [
    "series_partial_sum",
    "min_alphabet_bound",
    "build_certificate",
    "enumerate_simple_paths",
    "ThueInstance",
    "thue_system",
    "nonrepetitive_color",
    "verify_nonrepetitive",
    "is_repetitive",
    "DEFAULT_PATH_CAP",
    "DEFAULT_MAX_HALF_LENGTH",
]

DEFAULT_PATH_CAP = 10**7
DEFAULT_MAX_HALF_LENGTH = 12
# the r at which nonrepetitive_color still evaluates the certificate numerically
_CERT_CHECK_LIMIT = 200


def series_partial_sum(terms: int | float = math.inf) -> float:
    """``sum_{j=1}^{terms} j / 4**j``; the full series is ``4/9``."""
    if terms == math.inf:
        return 4 / 9
    return math.fsum(j / 4**j for j in range(1, int(terms) + 1))


def min_alphabet_bound(d: int, terms: int | float = math.inf) -> int:
    """Smallest alphabet size covered by the counting argument for max degree ``d``:
    ``ceil((2d)**2 * exp(8 * sum_{j<=terms} j / 4**j))``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.ceil((2 * d) ** 2 * math.exp(8 * series_partial_sum(terms)))


def build_certificate(d: int, C: int, r: int) -> LLLCertificate:
    """``p_i = C**-i``, ``a_i = (2d)**-2i``, ``Delta_ij = 4 i j d**(2j)`` for ``i, j = 1..r``."""
    if d < 1 or C < 2 or r < 1:
        raise ValueError("need d >= 1, C >= 2, r >= 1")
    p = tuple(Fraction(1, C**i) for i in range(1, r + 1))
    a = tuple(Fraction(1, (2 * d) ** (2 * i)) for i in range(1, r + 1))
    delta = tuple(tuple(4 * i * j * d ** (2 * j) for j in range(1, r + 1)) for i in range(1, r + 1))
    return LLLCertificate(p, a, delta)


def enumerate_simple_paths(graph: Graph, max_vertices: int, cap: int = DEFAULT_PATH_CAP) -> Iterator[tuple[int, ...]]:
    """Yield every simple path with 2, 4, ..., ``max_vertices`` vertices exactly once."""
    count = 0
    adj = graph.adj
    for start in range(graph.n):
        path = [start]
        on = {start}
        stack = [iter(adj[start])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on.discard(path.pop())
                continue
            if nxt in on:
                continue
            path.append(nxt)
            on.add(nxt)
            if len(path) % 2 == 0 and start < nxt:
                count += 1
                if count > cap:
                    raise CapExceededError(f"more than {cap} simple paths")
                yield tuple(path)
            if len(path) < max_vertices:
                stack.append(iter(adj[nxt]))
            else:
                on.discard(path.pop())


def _paths_by_half(graph: Graph, L: int) -> dict[int, np.ndarray]:
    cached = graph._paths.get(L)
    if cached is None:
        buckets: dict[int, list] = {n: [] for n in range(1, L + 1)}
        for p in enumerate_simple_paths(graph, 2 * L):
            buckets[len(p) // 2].append(p)
        cached = {n: np.array(sorted(ps), dtype=np.int64).reshape(len(ps), 2 * n) for n, ps in buckets.items()}
        graph._paths[L] = cached
    return cached


@dataclass(frozen=True, eq=False)
class ThueInstance:
    graph: Graph
    alphabet_size: int
    max_half_length: int | None = None

    @property
    def d(self) -> int:
        return self.graph.max_degree

    @property
    def L(self) -> int:
        if self.max_half_length is not None:
            return self.max_half_length
        return max(1, min(self.graph.n // 2, DEFAULT_MAX_HALF_LENGTH))


def thue_system(instance: ThueInstance) -> ConstraintSystem:
    """One ``path_repetition`` event per path, class = half the vertex count."""
    paths = _paths_by_half(instance.graph, instance.L)
    events = []
    for n in sorted(paths):
        for p in paths[n]:
            events.append(BadEvent(len(events), n, tuple(int(v) for v in p), "path_repetition"))
    return ConstraintSystem((instance.alphabet_size,) * instance.graph.n, tuple(events))


def is_certified(d: int, C: int, n_vertices: int) -> bool:
    """Does the local lemma guarantee a non-repetitive ``C``-coloring?"""
    if d == 0:
        return C >= 1
    if C < min_alphabet_bound(d):
        return False
    r = max(1, min(n_vertices, _CERT_CHECK_LIMIT))
    return check_certificate(build_certificate(d, C, r)).ok


def nonrepetitive_color(instance: ThueInstance, seed: int, max_rounds: int = DEFAULT_MAX_ROUNDS) -> ColoredGraph:
    """Color ``instance.graph`` with no repetitive path of at most ``2L`` vertices.

    Alphabets below the proven bound are allowed; the result then carries
    ``certified=False``.  Raises :class:`SolverFailure` when resampling gives up.
    """
    g, C = instance.graph, instance.alphabet_size
    certified = is_certified(instance.d, C, g.n)
    meta = {"L": instance.L, "d": instance.d, "seed": seed}
    if C == 1:
        # a one-letter alphabet admits a single coloring; no sampling needed
        colored = ColoredGraph(g, (1,) * g.n, 1, certified, meta)
        if verify_nonrepetitive(colored, instance.L):
            return colored
        bad = sum(len(ps) for ps in _paths_by_half(g, instance.L).values())
        raise SolverFailure(SolveResult(False, np.zeros(g.n, dtype=np.int64), 0, bad, seed))
    result = resample_solve(thue_system(instance), seed, max_rounds)
    if not result.ok:
        raise SolverFailure(result)
    colored = ColoredGraph(g, tuple(int(v) + 1 for v in result.assignment), C, certified,
                           {**meta, "rounds": result.rounds})
    assert verify_nonrepetitive(colored, instance.L).ok
    return colored


def is_repetitive(colors, path) -> bool:
    n = len(path) // 2
    return all(colors[path[i]] == colors[path[n + i]] for i in range(n))


def verify_nonrepetitive(colored: ColoredGraph, L: int | None = None) -> Verdict:
    """Pass iff no simple path with at most ``2L`` vertices is repetitive.

    ``L`` defaults to ``n // 2`` (every path).  On failure the witness is the
    shortest, then lexicographically first, repetitive path.
    """
    g = colored.graph
    if L is None:
        L = max(1, g.n // 2)
    colors = np.asarray(colored.colors, dtype=np.int64)
    for n, paths in sorted(_paths_by_half(g, L).items()):
        if not len(paths):
            continue
        c = colors[paths]
        hit = np.flatnonzero((c[:, :n] == c[:, n:]).all(axis=1))
        if len(hit):
            return Verdict(False, tuple(int(v) for v in paths[hit[0]]))
    return Verdict(True)
