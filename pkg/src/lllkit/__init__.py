"""Local-lemma toolkit: certificates and resampling, non-repetitive colorings,
colored Schreier graphs, free subshifts and finite subgroup spaces.

Modules
-------
lll        certificates, exact event probabilities, dependency counts, resampling
groups     group families, word-metric balls, shifts, Schreier graphs
graphs     simple graphs and colorings
thue       non-repetitive colorings of bounded-degree graphs
schreier   colored Schreier points, normalizer automorphisms, repetitive witnesses
subshift   block families, block-equality constraints, free patches, Pestov check
subgroups  subgroup lattices, conjugation orbits, stabilizers, stability systems
cli        the ``lllkit`` command
"""

__version__ = "0.1.0"

from ._common import (
    CapExceededError,
    LLLKitError,
    NormalizerError,
    NotTransitiveError,
    PreconditionError,
    SolverFailure,
    ValidationError,
    Verdict,
)
from .graphs import ColoredGraph, Graph
from .lll import (
    BadEvent,
    ConstraintSystem,
    LLLCertificate,
    check_certificate,
    dependency_degrees,
    event_probability,
    resample_solve,
)
