"""
Symmetry forces repetition
==========================

If an element normalizing the root stabilizer moves a colored Schreier
graph onto itself without fixed points, the coloring has a repetitive path.
Here the graph is a 4-cycle, the Schreier graph of Z acting on Z/4.
"""

from lllkit.groups import FreeAbelian, ball, schreier_graph
from lllkit.schreier import (
    ColoredSchreierPoint,
    automorphism_from_normalizer,
    repetitive_witness,
    stabilizer_on_patch,
)

Z = FreeAbelian(1)
graph = schreier_graph(Z, [[1, 2, 3, 0]])
point = ColoredSchreierPoint(graph, (1, 2, 1, 2))

# translation by 2 rotates the cycle by half a turn
theta = automorphism_from_normalizer(point, (2,))
print("theta:", theta.perm, "preserves colors:", theta.preserves(point.colors))

w = repetitive_witness(point, theta)
print("path", w.path, "colors", [point.colors[v] for v in w.path], "word", "".join(w.word))

# elements of [-4, 4] fixing the colored point: exactly the even ones
print("stabilizer on the ball:", stabilizer_on_patch(point, ball(Z, 4)))
