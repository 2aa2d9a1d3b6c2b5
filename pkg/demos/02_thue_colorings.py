"""
Non-repetitive colorings
========================

A coloring is repetitive when some simple path reads ``w w`` for a word
``w``.  We color a 50-cycle by resampling and then check it.
"""

import itertools

from lllkit import ColoredGraph, Graph
from lllkit.thue import ThueInstance, nonrepetitive_color, verify_nonrepetitive

cycle = Graph.cycle(50)
colored = nonrepetitive_color(ThueInstance(cycle, 561, max_half_length=12), seed=0)
print("certified:", colored.certified, "resampling rounds:", colored.meta["rounds"])
print("verified:", verify_nonrepetitive(colored, 12).ok)

# two colors never suffice on four vertices in a row
p4 = Graph.path(4)
print("binary P4 colorings that survive:",
      sum(verify_nonrepetitive(ColoredGraph(p4, c, 2)).ok for c in itertools.product((1, 2), repeat=4)))

# three colors are enough on a path (Thue's square-free words)
p10 = Graph.path(10)
word = (1, 2, 3, 1, 3, 2, 1, 2, 3, 2)
print("ternary P10:", verify_nonrepetitive(ColoredGraph(p10, word, 3)).ok)

# a repetitive coloring comes back with its offending path
bad = verify_nonrepetitive(ColoredGraph(p10, (1, 2, 3, 1, 2, 3, 1, 2, 3, 1), 3))
print("witness path:", bad.witness)
