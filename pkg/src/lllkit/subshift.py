"""Free subshifts of the binary shift over a finitely generated group.

Blocks ``T_1, ..., T_N`` with ``|T_n| = C n`` and ``s_n T_n`` disjoint from
``T_n`` define the bad events ``omega|gT_n == omega|g s_n T_n`` (cells
matched by ``t -> s_n t``).  A binary configuration avoiding all of them on
a ball is produced by resampling and checked against Pestov's two-coloring
condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ._common import PreconditionError, SolverFailure, ValidationError, Verdict
from .groups import Configuration, GroupFamily, GroupPatch, ball, family_from_spec
from .lll import (
    DEFAULT_MAX_ROUNDS,
    BadEvent,
    ConstraintSystem,
    LLLCertificate,
    check_certificate,
    resample_solve,
)

__all__ = [
    "BlockFamily",
    "SubshiftConstraint",
    "PestovReport",
    "validity_gap",
    "min_block_constant",
    "choose_blocks",
    "host_blocks",
    "build_constraints",
    "subshift_system",
    "build_subshift_certificate",
    "solve_patch",
    "verify_free_patch",
    "verify_pestov",
    "pestov_set",
]


def validity_gap(x: float) -> float:
    """``1 - x - 2**(-2x)``; nonnegative exactly on ``[0, 1/2]``."""
    return 1 - x - 4.0**-x


def min_block_constant(limit: int = 1024) -> int:
    """Least ``C >= 2`` with ``16 C x / (1 - x) <= 1`` for ``x = 2**(-C/2) <= 1/2``."""
    for C in range(2, limit + 1):
        x = 2.0 ** (-C / 2)
        if x <= 0.5 and 16 * C * x / (1 - x) <= 1:
            return C
    raise ValueError(f"no constant up to {limit}")


@dataclass(frozen=True, eq=False)
class BlockFamily:
    family: GroupFamily
    C: int
    blocks: tuple[tuple, ...]
    separators: tuple

    def __post_init__(self):
        fam = self.family
        if len(self.blocks) != len(self.separators):
            raise ValidationError("one separator per block")
        for n, (T, s) in enumerate(zip(self.blocks, self.separators), start=1):
            if len(set(T)) != len(T) or len(T) != self.C * n:
                raise ValidationError(f"block {n} must have {self.C * n} distinct elements")
            if {fam.multiply(s, t) for t in T} & set(T):
                raise ValidationError(f"block {n} meets its own translate by s_{n}")

    @property
    def N(self) -> int:
        return len(self.blocks)

    def truncate(self, n: int) -> "BlockFamily":
        return BlockFamily(self.family, self.C, self.blocks[:n], self.separators[:n])

    def to_dict(self) -> dict:
        fam = self.family
        return {"C": self.C, "blocks": [[fam.to_json(t) for t in T] for T in self.blocks],
                "separators": [fam.to_json(s) for s in self.separators]}

    @classmethod
    def from_dict(cls, family: GroupFamily, d: Mapping) -> "BlockFamily":
        return cls(family, int(d["C"]), tuple(tuple(family.from_json(t) for t in T) for T in d["blocks"]),
                   tuple(family.from_json(s) for s in d["separators"]))


def choose_blocks(patch: GroupPatch, C: int, N: int) -> BlockFamily:
    """Greedy blocks inside ``patch``; separators are the first ``N``
    non-identity patch elements."""
    fam = patch.family
    e = fam.identity()
    seps = [g for g in patch.elements if g != e][:N]
    if len(seps) < N:
        raise PreconditionError(f"patch has only {len(seps)} non-identity elements, need {N}")
    blocks = []
    for n, s in enumerate(seps, start=1):
        T: list = []
        members: set = set()
        shifted: set = set()
        for t in patch.elements:
            if len(T) == C * n:
                break
            st = fam.multiply(s, t)
            if t in shifted or st in members or st == t:
                continue
            T.append(t)
            members.add(t)
            shifted.add(st)
        if len(T) < C * n:
            raise PreconditionError(f"patch exhausted: block {n} reached {len(T)} of {C * n} elements")
        blocks.append(tuple(T))
    return BlockFamily(fam, C, tuple(blocks), tuple(seps))


def host_blocks(family: GroupFamily, C: int, N: int, max_radius: int = 64) -> tuple[BlockFamily, int]:
    """Blocks from the smallest ball that can host them; returns ``(blocks, radius)``."""
    for r in range(1, max_radius + 1):
        patch = ball(family, r)
        try:
            return choose_blocks(patch, C, N), r
        except PreconditionError:
            if len(ball(family, r + 1)) == len(patch):
                raise
    raise PreconditionError(f"no ball of radius <= {max_radius} hosts the blocks")


@dataclass(frozen=True)
class SubshiftConstraint:
    k: int
    g: object
    left: tuple
    right: tuple


def _elements(window) -> list:
    return list(window.elements) if isinstance(window, GroupPatch) else list(window)


def build_constraints(blocks: BlockFamily, window) -> list[SubshiftConstraint]:
    """All ``(k, g)`` whose windows ``g T_k`` and ``g s_k T_k`` lie in ``window``
    (a patch or any collection of elements), sorted by ``k`` then ``g``."""
    fam = blocks.family
    elems = _elements(window)
    inside = set(elems)
    out = []
    for k, (T, s) in enumerate(zip(blocks.blocks, blocks.separators), start=1):
        t0i = fam.inverse(T[0])
        candidates = sorted({fam.multiply(p, t0i) for p in elems}, key=fam.key)
        sT = [fam.multiply(s, t) for t in T]
        for g in candidates:
            left = tuple(fam.multiply(g, t) for t in T)
            if not all(x in inside for x in left):
                continue
            right = tuple(fam.multiply(g, x) for x in sT)
            if all(x in inside for x in right):
                out.append(SubshiftConstraint(k, g, left, right))
    return out


def subshift_system(constraints: Sequence[SubshiftConstraint], patch: GroupPatch) -> ConstraintSystem:
    """Binary variables on the patch, one ``block_equality`` event per constraint."""
    index = patch.index
    events = [BadEvent(i, c.k, tuple(index[x] for x in c.left + c.right), "block_equality")
              for i, c in enumerate(constraints)]
    return ConstraintSystem((2,) * len(patch), tuple(events))


def build_subshift_certificate(C: int, n: int) -> LLLCertificate:
    """``p_k = 2**-Ck``, ``a_k = 2**(-Ck/2)``, ``Delta_kl = 4 C**2 l k``.

    ``a_k`` is irrational for odd ``C k`` and is then stored as a rational
    within relative error 1e-30, far below the double-precision check.
    """
    if C < 2 or n < 1:
        raise ValueError("need C >= 2, n >= 1")
    p = tuple(Fraction(1, 2 ** (C * k)) for k in range(1, n + 1))
    a = tuple(_pow2_half(C * k) for k in range(1, n + 1))
    delta = tuple(tuple(4 * C * C * l * k for l in range(1, n + 1)) for k in range(1, n + 1))
    return LLLCertificate(p, a, delta)


def _pow2_half(m: int) -> Fraction:
    """Rational upper approximation of ``2**(-m/2)`` with relative error < 1e-30."""
    if m % 2 == 0:
        return Fraction(1, 2 ** (m // 2))
    # 2**(-m/2) = 2**(-(m+1)/2) * sqrt(2); bound sqrt(2) from above
    scale = 10**40
    root = math.isqrt(2 * scale * scale) + 1
    return Fraction(root, scale * 2 ** ((m + 1) // 2))


def solve_patch(patch: GroupPatch, blocks: BlockFamily, seed: int, max_rounds: int = DEFAULT_MAX_ROUNDS,
                require_certificate: bool = True) -> Configuration:
    """Binary configuration on ``patch`` avoiding every in-patch block equality."""
    if require_certificate and not check_certificate(build_subshift_certificate(blocks.C, blocks.N)).ok:
        raise PreconditionError(f"the local lemma certificate fails for C={blocks.C}, N={blocks.N}")
    system = subshift_system(build_constraints(blocks, patch), patch)
    result = resample_solve(system, seed, max_rounds)
    if not result.ok:
        raise SolverFailure(result)
    omega = Configuration.from_array(patch, result.assignment, 2)
    assert verify_free_patch(omega, blocks).ok
    return omega


def verify_free_patch(omega: Configuration, blocks: BlockFamily) -> Verdict:
    """Pass iff every in-window constraint has some ``t`` in ``T_k`` with
    ``omega(g t) != omega(g s_k t)``; the witness is the first violated ``(k, g)``."""
    vals = omega.values
    for c in build_constraints(blocks, vals.keys()):
        if all(vals[x] == vals[y] for x, y in zip(c.left, c.right)):
            return Verdict(False, (c.k, c.g))
    return Verdict(True)


@dataclass(frozen=True)
class PestovReport:
    ok: bool
    failing: object = None  # first h without a distinguishing a
    tested: tuple = ()
    untested: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


def pestov_set(blocks: BlockFamily, k: int) -> tuple:
    """``A = T_k | s_k T_k`` for the separator ``g = s_k``."""
    fam = blocks.family
    T, s = blocks.blocks[k - 1], blocks.separators[k - 1]
    return tuple(T) + tuple(fam.multiply(s, t) for t in T)


def verify_pestov(omega: Configuration, g, A: Iterable, h_ball) -> PestovReport:
    """For each ``h`` of ``h_ball`` look for ``a`` in ``A & g^-1 A`` with
    ``omega(h a) != omega(h g a)``.

    ``h`` whose translates leave omega's window are listed as untested and
    never counted as passing.
    """
    fam = omega.family
    if g == fam.identity():
        raise PreconditionError("g must not be the identity")
    A = list(dict.fromkeys(A))
    Aset = set(A)
    common = [a for a in A if fam.multiply(g, a) in Aset]
    if not common:
        return PestovReport(False, reason="A and g^-1 A are disjoint")
    ga = [fam.multiply(g, a) for a in common]
    vals = omega.values
    tested, untested = [], []
    for h in _elements(h_ball):
        left = [fam.multiply(h, a) for a in common]
        right = [fam.multiply(h, x) for x in ga]
        if not all(x in vals for x in left + right):
            untested.append(h)
            continue
        tested.append(h)
        if all(vals[x] == vals[y] for x, y in zip(left, right)):
            return PestovReport(False, h, tuple(tested), tuple(untested), "no distinguishing a")
    return PestovReport(True, None, tuple(tested), tuple(untested))
