"""
Checking local lemma certificates
=================================

A certificate lists, for each event class, a probability bound ``p``, a
weight ``a`` and a dependency matrix ``Delta``.  The checker works in log
space with exact rationals, so ``561**-200`` is no trouble.
"""

from lllkit import check_certificate
from lllkit.subshift import build_subshift_certificate, min_block_constant
from lllkit.thue import build_certificate, min_alphabet_bound

# alphabet needed on a graph of maximum degree d
for d in range(1, 7):
    print(f"d={d}: C >= {min_alphabet_bound(d)}")

# the path-coloring certificate for d = 2 passes with 200 classes
rep = check_certificate(build_certificate(2, min_alphabet_bound(2), 200))
print("thue, C=561:", rep.ok, "smallest slack", min(rep.slack))

# ...and a tiny alphabet does not
print("thue, C=16, one class:", check_certificate(build_certificate(2, 16, 1)).ok)

# the free-subshift certificate with the smallest admissible block constant
C = min_block_constant()
print(f"subshift, C={C}, n=200:", check_certificate(build_subshift_certificate(C, 200)).ok)
print("subshift, C=2, n=10:", check_certificate(build_subshift_certificate(2, 10)).ok)
