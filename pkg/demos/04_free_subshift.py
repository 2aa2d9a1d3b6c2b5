"""
A free binary pattern on a patch
================================

Blocks ``T_n`` of size ``C n`` and separators ``s_n`` give the bad events
``omega(g T_n) == omega(g s_n T_n)``.  Avoiding all of them on a ball
produces a finite piece of a free subshift.
"""

from lllkit.groups import FreeAbelian, FreeGroup, ball
from lllkit.subshift import (
    build_constraints,
    host_blocks,
    min_block_constant,
    pestov_set,
    solve_patch,
    verify_free_patch,
    verify_pestov,
)

C = min_block_constant()

# on the integers: the window [-30, 30]
Z = FreeAbelian(1)
blocks, host = host_blocks(Z, C, 1)
patch = ball(Z, 30)
omega = solve_patch(patch, blocks, seed=0)
print(f"Z: blocks hosted on radius {host}, {len(build_constraints(blocks, patch))} constraints")
print("".join(str(v) for v in omega.to_array(patch)))
print("free on the patch:", verify_free_patch(omega, blocks).ok)

# Pestov's condition with g = s_1 and A = T_1 | s_1 T_1; translates leaving
# the window cannot be tested and are reported as such
rep = verify_pestov(omega, blocks.separators[0], pestov_set(blocks, 1), patch)
print(f"Pestov: ok={rep.ok}, tested {len(rep.tested)}, untested {len(rep.untested)}")

# on the free group of rank 2 the radius-3 ball holds no full constraint
# window, so every Pestov test there is vacuous; radius 5 holds eight
F = FreeGroup(2)
blocks, host = host_blocks(F, C, 1)
for r in (3, 5):
    patch = ball(F, r)
    omega = solve_patch(patch, blocks, seed=0)
    rep = verify_pestov(omega, blocks.separators[0], pestov_set(blocks, 1), ball(F, 2))
    print(f"F2 r={r}: {len(patch)} cells, {len(build_constraints(blocks, patch))} constraints, "
          f"Pestov tested {len(rep.tested)}")
