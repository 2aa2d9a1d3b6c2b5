"""
Uniformly recurrent subgroups of S3
===================================

For a finite group every conjugacy class of subgroups is a URS.  The
stabilizers of a minimal action form one such class, and every class is
realized by some action.
"""

from lllkit.schreier import finite_index_realization
from lllkit.subgroups import (
    FiniteGSystem,
    check_proposition_stability,
    conjugation_orbits,
    enumerate_subgroups,
    named_group,
    stability_system,
)

S3 = named_group("s3")
subs = enumerate_subgroups(S3)
orbits = conjugation_orbits(subs, S3)
print(f"{len(subs)} subgroups in {len(orbits)} conjugacy classes")
for orb in orbits:
    print("  order", orb[0].order, ":", [[S3.labels[i] for i in H.elements] for H in orb])

# the natural action on three points: stabilizers are the three transposition subgroups
X = FiniteGSystem.natural(S3)
print("stability system of the natural action:", [H.elements for H in stability_system(X)])
print("stability diagram holds:", check_proposition_stability(X).ok)

# every class comes back from its realization
for orb in orbits:
    Y = finite_index_realization(orb, orb[0], S3)
    print(f"realize order-{orb[0].order} class on {len(Y)} points:", set(stability_system(Y)) == set(orb))
