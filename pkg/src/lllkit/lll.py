"""Lovász Local Lemma: certificates, exact event probabilities, dependency
counting and Moser–Tardos style resampling over uniform product spaces.

Variables are indexed ``0..n-1``; variable ``v`` takes values in
``range(domains[v])`` uniformly and independently.  Bad events are described
declaratively (``kind`` + ``params``) so that systems can be serialized.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import sparse

from ._common import CapExceededError, ValidationError

__all__ = [
    "BadEvent",
    "ConstraintSystem",
    "LLLCertificate",
    "CertificateReport",
    "SolveResult",
    "check_certificate",
    "event_probability",
    "dependency_degrees",
    "resample_solve",
    "MARGINAL_SLACK",
    "DEFAULT_ENUMERATION_CAP",
    "DEFAULT_MAX_ROUNDS",
]

MARGINAL_SLACK = 1e-12
DEFAULT_ENUMERATION_CAP = 2**24
DEFAULT_MAX_ROUNDS = 10**6

# kinds whose predicate is "first half of the support equals the second half"
HALVES_KINDS = ("path_repetition", "block_equality")
KINDS = HALVES_KINDS + ("custom_table", "predicate")


@dataclass(frozen=True, eq=False)
class BadEvent:
    """A bad event on a finite support.

    ``path_repetition`` / ``block_equality``: the support has even length and
    the event occurs iff ``x[support[i]] == x[support[m + i]]`` for all
    ``i < m = len(support) // 2``.

    ``custom_table``: ``params = {"shape": [...], "table": [...]}`` where
    ``table`` lists 0/1 for every support assignment in
    ``itertools.product(*map(range, shape))`` order.

    ``predicate``: ``params = {"fn": callable(local_values) -> bool}``; not
    serializable.
    """

    id: int
    class_id: int
    support: tuple[int, ...]
    kind: str = "custom_table"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(v) for v in self.support))
        if not self.support:
            raise ValidationError(f"event {self.id}: empty support")
        if self.kind not in KINDS:
            raise ValidationError(f"event {self.id}: unknown kind {self.kind!r}")
        if self.class_id < 1:
            raise ValidationError(f"event {self.id}: class ids start at 1")
        if self.kind in HALVES_KINDS and len(self.support) % 2:
            raise ValidationError(f"event {self.id}: {self.kind} needs an even support")
        if self.kind == "custom_table":
            shape = tuple(self.params["shape"])
            table = self.params["table"]
            if len(shape) != len(self.support):
                raise ValidationError(f"event {self.id}: table shape does not match support")
            if len(table) != math.prod(shape):
                raise ValidationError(f"event {self.id}: table has wrong length")

    def holds(self, local: Sequence[int]) -> bool:
        """Evaluate the predicate on values listed in support order."""
        if self.kind in HALVES_KINDS:
            m = len(local) // 2
            return all(local[i] == local[m + i] for i in range(m))
        if self.kind == "custom_table":
            idx = 0
            for v, size in zip(local, self.params["shape"]):
                idx = idx * size + int(v)
            return bool(self.params["table"][idx])
        return bool(self.params["fn"](tuple(local)))

    def occurs(self, assignment: Sequence[int]) -> bool:
        return self.holds([assignment[v] for v in self.support])

    def to_dict(self) -> dict:
        if self.kind == "predicate":
            raise ValidationError("predicate events cannot be serialized")
        params = {k: list(v) if isinstance(v, (tuple, list)) else v for k, v in self.params.items()}
        return {"id": self.id, "class": self.class_id, "support": list(self.support),
                "kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, d: Mapping) -> "BadEvent":
        return cls(int(d["id"]), int(d["class"]), tuple(d["support"]), d.get("kind", "custom_table"),
                   dict(d.get("params", {})))


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Uniform product space over ``domains`` with a list of bad events."""

    domains: tuple[int, ...]
    events: tuple[BadEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(int(d) for d in self.domains))
        object.__setattr__(self, "events", tuple(self.events))
        for v, size in enumerate(self.domains):
            if size < 2:
                raise ValidationError(f"variable {v}: domain size must be >= 2, got {size}")
        n = len(self.domains)
        ids = set()
        for ev in self.events:
            if ev.id in ids:
                raise ValidationError(f"duplicate event id {ev.id}")
            ids.add(ev.id)
            if min(ev.support) < 0 or max(ev.support) >= n:
                raise ValidationError(f"event {ev.id}: support outside the variable set")
            if ev.kind == "custom_table":
                shape = tuple(self.domains[v] for v in ev.support)
                if tuple(ev.params["shape"]) != shape:
                    raise ValidationError(f"event {ev.id}: table shape disagrees with domains")

    @property
    def n_variables(self) -> int:
        return len(self.domains)

    @property
    def r(self) -> int:
        """Number of event classes (classes are ``1..r``)."""
        return max((ev.class_id for ev in self.events), default=0)

    def violated(self, assignment: Sequence[int]) -> list[BadEvent]:
        return [ev for ev in self.events if ev.occurs(assignment)]

    def to_dict(self) -> dict:
        return {
            "variables": [{"id": v, "domain_size": d} for v, d in enumerate(self.domains)],
            "events": [ev.to_dict() for ev in self.events],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConstraintSystem":
        variables = sorted(d["variables"], key=lambda x: x["id"])
        if [x["id"] for x in variables] != list(range(len(variables))):
            raise ValidationError("variable ids must be 0..n-1")
        return cls(tuple(x["domain_size"] for x in variables),
                   tuple(BadEvent.from_dict(e) for e in d["events"]))


# ---------------------------------------------------------------------------
# certificates


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class LLLCertificate:
    """Per-class data ``(p_i, a_i, Delta_ij)`` of the local lemma hypothesis.

    ``p`` and ``a`` are stored as exact rationals so that very small values
    (``561**-200`` say) survive without underflow.
    """

    p: tuple[Fraction, ...]
    a: tuple[Fraction, ...]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        p = tuple(_as_fraction(x) for x in self.p)
        a = tuple(_as_fraction(x) for x in self.a)
        delta = tuple(tuple(int(x) for x in row) for row in self.delta)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "delta", delta)
        r = len(p)
        if len(a) != r or len(delta) != r or any(len(row) != r for row in delta):
            raise ValidationError("certificate dimensions disagree")
        for i in range(r):
            if not 0 < p[i] <= 1:
                raise ValidationError(f"class {i + 1}: p must lie in (0, 1], got {p[i]}")
            if not 0 <= a[i] < 1:
                raise ValidationError(f"class {i + 1}: a must lie in [0, 1), got {a[i]}")
            if any(x < 0 for x in delta[i]):
                raise ValidationError(f"class {i + 1}: negative Delta entry")

    @property
    def r(self) -> int:
        return len(self.p)

    def to_dict(self) -> dict:
        return {"r": self.r, "p": [str(x) for x in self.p], "a": [str(x) for x in self.a],
                "delta": [list(row) for row in self.delta]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LLLCertificate":
        cert = cls(tuple(d["p"]), tuple(d["a"]), tuple(tuple(row) for row in d["delta"]))
        if "r" in d and int(d["r"]) != cert.r:
            raise ValidationError(f"declared r={d['r']} but vectors have length {cert.r}")
        return cert


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    slack: tuple[float, ...]
    marginal: tuple[int, ...]  # 1-based classes with |slack| < MARGINAL_SLACK

    def __bool__(self):
        return self.ok


def _log(q: Fraction) -> float:
    if q == 0:
        return -math.inf
    return math.log(q.numerator) - math.log(q.denominator)


def _delta_log1m(delta: int, a: Fraction) -> float:
    """``delta * log(1 - a)`` without overflow or underflow."""
    if delta == 0 or a == 0:
        return 0.0
    try:
        da = float(delta * a)
    except OverflowError:
        return -math.inf
    af = float(a)
    if af == 0.0:
        return -da
    return da * (math.log1p(-af) / af)


def check_certificate(cert: LLLCertificate) -> CertificateReport:
    """Check ``p_i <= a_i * prod_j (1 - a_j)**Delta_ij`` for every class, in log space."""
    slack = []
    for i in range(cert.r):
        rhs = _log(cert.a[i]) + math.fsum(_delta_log1m(cert.delta[i][j], cert.a[j]) for j in range(cert.r))
        slack.append(rhs - _log(cert.p[i]))
    ok = all(s >= 0 for s in slack)
    marginal = tuple(i + 1 for i, s in enumerate(slack) if abs(s) < MARGINAL_SLACK)
    return CertificateReport(ok, tuple(slack), marginal)


# ---------------------------------------------------------------------------
# probabilities and dependencies


def _halves_count(event: BadEvent, domains: Sequence[int]) -> tuple[int, int]:
    parent = {v: v for v in event.support}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    m = len(event.support) // 2
    for i in range(m):
        ra, rb = find(event.support[i]), find(event.support[m + i])
        if ra != rb:
            parent[ra] = rb
    comps: dict[int, int] = {}
    for v in parent:
        root = find(v)
        comps[root] = min(comps.get(root, domains[v]), domains[v])
    good = math.prod(comps.values())
    total = math.prod(domains[v] for v in parent)
    return good, total


def event_probability(event: BadEvent, system: ConstraintSystem, cap: int = DEFAULT_ENUMERATION_CAP,
                      method: str = "auto") -> Fraction:
    """Exact probability of ``event`` under the uniform product measure.

    Equality-type events (``path_repetition``, ``block_equality``) are counted
    by their equality classes and need no enumeration.  Every other event, or
    any event with ``method="enumerate"``, is counted by brute force over the
    support, refusing supports with more than ``cap`` assignments.
    """
    if method not in ("auto", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and event.kind in HALVES_KINDS:
        good, total = _halves_count(event, system.domains)
        return Fraction(good, total)

    variables = sorted(set(event.support))
    total = math.prod(system.domains[v] for v in variables)
    if total > cap:
        raise CapExceededError(f"event {event.id}: {total} support assignments exceed cap {cap}")
    pos = [variables.index(v) for v in event.support]
    good = 0
    for vals in itertools.product(*(range(system.domains[v]) for v in variables)):
        if event.holds([vals[k] for k in pos]):
            good += 1
    return Fraction(good, total)


def _incidence(system: ConstraintSystem) -> sparse.csr_matrix:
    rows, cols = [], []
    for e, ev in enumerate(system.events):
        for v in set(ev.support):
            rows.append(e)
            cols.append(v)
    data = np.ones(len(rows), dtype=np.int64)
    return sparse.csr_matrix((data, (rows, cols)), shape=(len(system.events), system.n_variables))


def dependency_degrees(system: ConstraintSystem) -> np.ndarray:
    """Entry ``(i-1, j-1)``: the largest number of class-``j`` events, other
    than the event itself, whose support meets the support of a class-``i``
    event."""
    r = system.r
    out = np.zeros((r, r), dtype=np.int64)
    if not system.events:
        return out
    inc = _incidence(system)
    adj = (inc @ inc.T).tocsr()
    adj.data[:] = 1
    adj.setdiag(0)
    adj.eliminate_zeros()
    classes = np.array([ev.class_id - 1 for ev in system.events])
    onehot = sparse.csr_matrix((np.ones(len(classes), dtype=np.int64), (np.arange(len(classes)), classes)),
                               shape=(len(classes), r))
    counts = (adj @ onehot).toarray()
    for i in range(r):
        mask = classes == i
        if mask.any():
            out[i] = counts[mask].max(axis=0)
    return out


# ---------------------------------------------------------------------------
# constructive solver


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of :func:`resample_solve`.

    On success ``assignment`` violates no event.  On failure it holds the
    last assignment and ``violated`` counts the events it still violates.
    """

    ok: bool
    assignment: np.ndarray
    rounds: int
    violated: int
    seed: int

    def __bool__(self):
        return self.ok


def _compile(ev: BadEvent) -> Callable[[np.ndarray], bool]:
    if ev.kind in HALVES_KINDS:
        m = len(ev.support) // 2
        left = np.array(ev.support[:m])
        right = np.array(ev.support[m:])
        return lambda x: bool(np.array_equal(x[left], x[right]))
    return ev.occurs


def resample_solve(system: ConstraintSystem, seed: int, max_rounds: int = DEFAULT_MAX_ROUNDS) -> SolveResult:
    """Resample violated events until none remains or ``max_rounds`` is used up.

    The violated event with the smallest id is resampled first; all
    randomness comes from ``numpy.random.default_rng(seed)``.
    """
    rng = np.random.default_rng(seed)
    domains = np.array(system.domains, dtype=np.int64)
    x = rng.integers(0, domains) if len(domains) else np.zeros(0, dtype=np.int64)

    order = sorted(range(len(system.events)), key=lambda e: system.events[e].id)
    events = [system.events[e] for e in order]
    tests = [_compile(ev) for ev in events]
    supports = [np.array(sorted(set(ev.support))) for ev in events]
    touching: list[list[int]] = [[] for _ in range(system.n_variables)]
    for e, ev in enumerate(events):
        for v in set(ev.support):
            touching[v].append(e)

    bad = np.array([t(x) for t in tests], dtype=bool)
    heap = [e for e in range(len(events)) if bad[e]]
    queued = bad.copy()
    rounds = 0
    while heap and rounds < max_rounds:
        e = heapq.heappop(heap)
        queued[e] = False
        if not bad[e]:
            continue
        vs = supports[e]
        x[vs] = rng.integers(0, domains[vs])
        rounds += 1
        for f in {f for v in vs for f in touching[v]}:
            bad[f] = tests[f](x)
            if bad[f] and not queued[f]:
                queued[f] = True
                heapq.heappush(heap, f)

    violated = sum(1 for ev in events if ev.occurs(x))
    return SolveResult(violated == 0, x, rounds, violated, seed)
