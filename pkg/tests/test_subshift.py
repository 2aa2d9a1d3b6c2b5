import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lllkit import PreconditionError, ValidationError
from lllkit.groups import Configuration, FreeAbelian, FreeGroup, ball
from lllkit.lll import check_certificate, dependency_degrees
from lllkit.subshift import (
    BlockFamily,
    build_constraints,
    build_subshift_certificate,
    host_blocks,
    min_block_constant,
    pestov_set,
    solve_patch,
    subshift_system,
    validity_gap,
    verify_free_patch,
    verify_pestov,
)

Z = FreeAbelian(1)
F = FreeGroup(2)


def z_free_oracle(values, lo, hi, blocks):
    """Integer-arithmetic check for configurations on the interval [lo, hi]."""
    for T, (s,) in zip(blocks.blocks, blocks.separators):
        ts = [t for (t,) in T]
        for g in range(lo - 2 * hi, 2 * hi - lo + 1):
            cells = [g + t for t in ts] + [g + s + t for t in ts]
            if all(lo <= c <= hi for c in cells):
                if all(values[g + t] == values[g + s + t] for t in ts):
                    return False
    return True


def test_validity_gap():
    assert validity_gap(0) == 0 and validity_gap(0.5) == pytest.approx(0)
    assert validity_gap(0.25) > 0 and validity_gap(0.75) < 0


def test_min_block_constant():
    C = min_block_constant()
    assert C == 17
    x = 2 ** (-C / 2)
    assert 16 * C * x / (1 - x) <= 1
    assert 16 * 16 * 2**-8 / (1 - 2**-8) > 1


@pytest.mark.parametrize("C, n, ok", [(17, 200, True), (16, 200, True), (2, 10, False), (3, 5, False)])
def test_subshift_certificate(C, n, ok):
    assert check_certificate(build_subshift_certificate(C, n)).ok is ok


def test_certificate_a_is_upper_approximation():
    cert = build_subshift_certificate(17, 3)
    for k, a in enumerate(cert.a, start=1):
        exact = 2 ** (-17 * k / 2)
        assert a >= 0 and abs(float(a) / exact - 1) < 1e-14


def test_blocks_on_integers():
    b, r = host_blocks(Z, 2, 1)
    assert b.blocks == (((0,), (2,)),) and b.separators == ((1,),) and r == 2
    b, r = host_blocks(Z, 17, 2)
    assert r == 34
    for T, s in zip(b.blocks, b.separators):
        assert not {(s[0] + t[0],) for t in T} & set(T)


@pytest.mark.parametrize("C, N", [(1, 1), (3, 2), (17, 1)])
def test_blocks_on_free_group(C, N):
    b, r = host_blocks(F, C, N)
    assert [len(T) for T in b.blocks] == [C * n for n in range(1, N + 1)]
    assert all(len(T) == len(set(T)) for T in b.blocks)
    # r is the smallest hosting radius
    if r > 1:
        with pytest.raises(PreconditionError):
            host_blocks(F, C, N, max_radius=r - 1)


def test_block_validation():
    with pytest.raises(ValidationError):
        BlockFamily(Z, 2, (((0,), (1,)),), ((1,),))
    with pytest.raises(ValidationError):
        BlockFamily(Z, 2, (((0,),),), ((1,),))


def test_block_round_trip():
    b, _ = host_blocks(F, 3, 2)
    again = BlockFamily.from_dict(F, json.loads(json.dumps(b.to_dict())))
    assert again.blocks == b.blocks and again.separators == b.separators


def test_constraint_count_on_interval():
    b, _ = host_blocks(Z, 2, 1)
    cons = build_constraints(b, ball(Z, 8))
    # g + {0, 1, 2, 3} inside [-8, 8]
    assert [c.g for c in cons] == sorted([(g,) for g in range(-8, 6)], key=Z.key)
    assert len(cons) == 14
    b17, _ = host_blocks(Z, 17, 1)
    assert len(build_constraints(b17, ball(Z, 30))) == 28


def test_micro_case():
    b, _ = host_blocks(Z, 2, 1)
    window = [(0,), (1,), (2,), (3,)]
    bad = Configuration(Z, dict(zip(window, (0, 0, 1, 1))), 2)
    good = Configuration(Z, dict(zip(window, (0, 0, 1, 0))), 2)
    assert verify_free_patch(bad, b).witness == (1, (0,))
    assert verify_free_patch(good, b).ok


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=13, max_size=13))
def test_verifier_matches_integer_oracle(bits):
    b, _ = host_blocks(Z, 2, 2)
    patch = ball(Z, 6)
    omega = Configuration(Z, {(x,): v for x, v in zip(range(-6, 7), bits)}, 2)
    values = dict(zip(range(-6, 7), bits))
    assert verify_free_patch(omega, b).ok == z_free_oracle(values, -6, 6, b)
    assert len(patch) == 13


def test_dependency_bound_on_patches():
    for fam, radius in ((Z, 30), (F, 5)):
        b, _ = host_blocks(fam, 17, 2)
        patch = ball(fam, radius)
        system = subshift_system(build_constraints(b, patch), patch)
        if not system.events:
            continue
        deg = dependency_degrees(system)
        for k in range(deg.shape[0]):
            for l in range(deg.shape[1]):
                assert deg[k, l] <= 4 * 17**2 * (k + 1) * (l + 1)


@pytest.mark.parametrize("seed", range(3))
def test_solve_integer_interval(seed):
    b, _ = host_blocks(Z, 17, 2)
    patch = ball(Z, 30)
    omega = solve_patch(patch, b, seed)
    assert verify_free_patch(omega, b).ok
    values = {x: omega[(x,)] for x in range(-30, 31)}
    assert z_free_oracle(values, -30, 30, b)


@pytest.mark.parametrize("N", [1, 2])
def test_solve_free_group(N):
    b, _ = host_blocks(F, 17, N)
    for radius in (3, 5):
        omega = solve_patch(ball(F, radius), b, 1)
        assert verify_free_patch(omega, b).ok


def test_solve_is_deterministic():
    b, _ = host_blocks(Z, 17, 1)
    a = solve_patch(ball(Z, 30), b, 4)
    c = solve_patch(ball(Z, 30), b, 4)
    assert a == c


def test_solve_refuses_uncertified_constant():
    b, _ = host_blocks(Z, 2, 2)
    with pytest.raises(PreconditionError):
        solve_patch(ball(Z, 10), b, 0)
    omega = solve_patch(ball(Z, 10), b, 0, require_certificate=False)
    assert verify_free_patch(omega, b).ok


def test_pestov_on_integers():
    b, _ = host_blocks(Z, 17, 1)
    patch = ball(Z, 30)
    omega = solve_patch(patch, b, 0)
    rep = verify_pestov(omega, b.separators[0], pestov_set(b, 1), patch)
    assert rep.ok and len(rep.tested) == 28 and len(rep.untested) == 33
    constant = Configuration.from_array(patch, [0] * len(patch), 2)
    bad = verify_pestov(constant, b.separators[0], pestov_set(b, 1), patch)
    assert not bad.ok and bad.failing == (0,)


def test_pestov_on_free_group_is_not_vacuous():
    b, _ = host_blocks(F, 17, 1)
    omega = solve_patch(ball(F, 5), b, 0)
    rep = verify_pestov(omega, b.separators[0], pestov_set(b, 1), ball(F, 2))
    assert rep.ok and len(rep.tested) == 8 and len(rep.untested) == 9


def test_pestov_preconditions():
    b, _ = host_blocks(Z, 2, 1)
    omega = Configuration.from_array(ball(Z, 5), [0, 1] * 5 + [0], 2)
    with pytest.raises(PreconditionError):
        verify_pestov(omega, (0,), [(0,)], [(0,)])
    rep = verify_pestov(omega, (5,), [(0,), (1,)], [(0,)])
    assert not rep.ok and "disjoint" in rep.reason


def test_free_configurations_pass_pestov():
    # every configuration on [0, 7] passing the block check also passes Pestov for s_1
    b, _ = host_blocks(Z, 2, 1)
    window = [(x,) for x in range(8)]
    for bits in itertools.product((0, 1), repeat=8):
        omega = Configuration(Z, dict(zip(window, bits)), 2)
        free = verify_free_patch(omega, b).ok
        rep = verify_pestov(omega, b.separators[0], pestov_set(b, 1), window)
        # A meets its translate in more cells than T_1, so only one direction holds
        assert rep.ok or not free
