import itertools
import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lllkit import CapExceededError, ValidationError
from lllkit.lll import (
    BadEvent,
    ConstraintSystem,
    LLLCertificate,
    check_certificate,
    dependency_degrees,
    event_probability,
    resample_solve,
)
from lllkit.thue import build_certificate


def mp_slack(cert, dps=80):
    """Independent oracle: evaluate the inequality directly with mpmath."""
    with mpmath.workdps(dps):
        out = []
        for i in range(cert.r):
            rhs = mpmath.mpf(cert.a[i].numerator) / cert.a[i].denominator
            for j in range(cert.r):
                aj = mpmath.mpf(cert.a[j].numerator) / cert.a[j].denominator
                rhs *= (1 - aj) ** cert.delta[i][j]
            p = mpmath.mpf(cert.p[i].numerator) / cert.p[i].denominator
            out.append(rhs >= p)
        return out


def test_empty_certificate_passes():
    rep = check_certificate(LLLCertificate((), (), ()))
    assert rep.ok and rep.slack == ()


def test_single_class_fails():
    rep = check_certificate(LLLCertificate((1,), (Fraction(1, 2),), ((0,),)))
    assert not rep.ok
    assert rep.slack[0] == pytest.approx(np.log(0.5))


@pytest.mark.parametrize("p, a", [(0, 0.5), (0.5, 1), (1.5, 0.1), (0.5, -0.1)])
def test_certificate_rejects_invalid(p, a):
    with pytest.raises(ValidationError):
        LLLCertificate((p,), (a,), ((0,),))


def test_certificate_rejects_bad_shape():
    with pytest.raises(ValidationError):
        LLLCertificate((0.5, 0.5), (0.1,), ((0,),))


def test_thue_certificate_r50_matches_oracle():
    cert = build_certificate(2, 561, 50)
    rep = check_certificate(cert)
    assert rep.ok
    assert all(mp_slack(cert))


def test_marginal_slack_is_flagged():
    # p = a (1 - a)**0 exactly: slack 0
    rep = check_certificate(LLLCertificate((Fraction(1, 4),), (Fraction(1, 4),), ((0,),)))
    assert rep.ok and rep.marginal == (1,)


def test_certificate_round_trip():
    cert = build_certificate(2, 561, 3)
    again = LLLCertificate.from_dict(json.loads(json.dumps(cert.to_dict())))
    assert again == cert


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda r: st.tuples(
            st.lists(st.fractions(Fraction(1, 10**6), 1), min_size=r, max_size=r),
            st.lists(st.fractions(0, Fraction(9, 10)), min_size=r, max_size=r),
            st.lists(st.lists(st.integers(0, 30), min_size=r, max_size=r), min_size=r, max_size=r),
            st.lists(st.fractions(Fraction(1, 100), 1), min_size=r, max_size=r),
        )
    )
)
def test_monotone_in_p_and_agrees_with_oracle(data):
    p, a, delta, shrink = data
    cert = LLLCertificate(tuple(p), tuple(a), tuple(map(tuple, delta)))
    rep = check_certificate(cert)
    oracle = mp_slack(cert)
    for ok, s in zip(oracle, rep.slack):
        if abs(s) > 1e-9:
            assert ok == (s >= 0)
    if rep.ok:
        smaller = LLLCertificate(tuple(x * f for x, f in zip(p, shrink)), cert.a, cert.delta)
        assert check_certificate(smaller).ok


# --- probabilities ----------------------------------------------------------


def test_probability_of_false_event_is_zero():
    ev = BadEvent(0, 1, (0, 1), "custom_table", {"shape": [2, 2], "table": [0, 0, 0, 0]})
    sys_ = ConstraintSystem((2, 2), (ev,))
    assert event_probability(ev, sys_) == 0


def test_custom_table_probability():
    # "all three bits are zero"
    table = [1] + [0] * 7
    ev = BadEvent(0, 1, (0, 1, 2), "custom_table", {"shape": [2, 2, 2], "table": table})
    assert event_probability(ev, ConstraintSystem((2, 2, 2), (ev,))) == Fraction(1, 8)


@pytest.mark.parametrize("i, C", [(1, 2), (2, 3), (3, 2), (2, 5)])
def test_repetition_probability_structural_equals_enumeration(i, C):
    ev = BadEvent(0, i, tuple(range(2 * i)), "path_repetition")
    sys_ = ConstraintSystem((C,) * (2 * i), (ev,))
    exact = event_probability(ev, sys_)
    assert exact == Fraction(1, C**i)
    assert event_probability(ev, sys_, method="enumerate") == exact


def test_repeated_support_variables_are_counted_exactly():
    # x0 == x1 and x1 == x2 over domains (3, 2, 4): agreement set has size 2
    ev = BadEvent(0, 1, (0, 1, 1, 2), "block_equality")
    sys_ = ConstraintSystem((3, 2, 4), (ev,))
    assert event_probability(ev, sys_) == event_probability(ev, sys_, method="enumerate") == Fraction(2, 24)


def test_enumeration_cap():
    ev = BadEvent(0, 1, tuple(range(10)), "block_equality")
    sys_ = ConstraintSystem((2,) * 10, (ev,))
    with pytest.raises(CapExceededError):
        event_probability(ev, sys_, cap=2**9, method="enumerate")
    assert event_probability(ev, sys_, cap=2**9) == Fraction(1, 32)


# --- dependencies -----------------------------------------------------------


def test_disjoint_supports_have_zero_dependency():
    evs = (BadEvent(0, 1, (0, 1), "block_equality"), BadEvent(1, 2, (2, 3), "block_equality"))
    assert (dependency_degrees(ConstraintSystem((2,) * 4, evs)) == 0).all()


def test_dependency_degrees_brute_force():
    rng = np.random.default_rng(5)
    evs = []
    for e in range(30):
        support = tuple(int(v) for v in rng.choice(12, size=4, replace=False))
        evs.append(BadEvent(e, int(rng.integers(1, 4)), support, "block_equality"))
    sys_ = ConstraintSystem((2,) * 12, tuple(evs))
    expected = np.zeros((3, 3), dtype=int)
    for A in evs:
        row = [0, 0, 0]
        for B in evs:
            if B is not A and set(A.support) & set(B.support):
                row[B.class_id - 1] += 1
        expected[A.class_id - 1] = np.maximum(expected[A.class_id - 1], row)
    assert (dependency_degrees(sys_) == expected).all()


# --- solver ------------------------------------------------------------------


def test_solver_without_events_returns_initial_draw():
    sys_ = ConstraintSystem((3, 3, 3))
    res = resample_solve(sys_, seed=11)
    assert res.ok and res.rounds == 0
    assert (res.assignment == np.random.default_rng(11).integers(0, [3, 3, 3])).all()


@pytest.mark.parametrize("seed", range(10))
def test_solver_avoids_all_zero(seed):
    ev = BadEvent(0, 1, (0, 1, 2), "custom_table", {"shape": [2, 2, 2], "table": [1] + [0] * 7})
    res = resample_solve(ConstraintSystem((2, 2, 2), (ev,)), seed)
    assert res.ok and res.assignment.any()


def test_solver_reports_failure_without_raising():
    # unsatisfiable: x0 == x1 is bad and x0 != x1 is bad
    eq = BadEvent(0, 1, (0, 1), "block_equality")
    ne = BadEvent(1, 1, (0, 1), "custom_table", {"shape": [2, 2], "table": [0, 1, 1, 0]})
    res = resample_solve(ConstraintSystem((2, 2), (eq, ne)), seed=0, max_rounds=50)
    assert not res.ok and res.violated == 1 and res.rounds == 50


def test_solver_is_deterministic():
    rng = np.random.default_rng(0)
    evs = tuple(BadEvent(e, 1, tuple(int(v) for v in rng.choice(40, 6, replace=False)), "block_equality")
                for e in range(60))
    sys_ = ConstraintSystem((2,) * 40, evs)
    a, b = resample_solve(sys_, 42), resample_solve(sys_, 42)
    assert a.ok and (a.assignment == b.assignment).all() and a.rounds == b.rounds


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(3, 12), st.integers(1, 12))
def test_solver_soundness(seed, n, m):
    rng = np.random.default_rng(seed)
    evs = []
    for e in range(m):
        k = int(rng.integers(1, 4))
        support = tuple(int(v) for v in rng.choice(n, size=min(k, n), replace=False))
        shape = [3] * len(support)
        table = [int(x) for x in (rng.random(3 ** len(support)) < 0.2)]
        evs.append(BadEvent(e, 1, support, "custom_table", {"shape": shape, "table": table}))
    sys_ = ConstraintSystem((3,) * n, tuple(evs))
    res = resample_solve(sys_, seed, max_rounds=2000)
    if res.ok:
        assert not sys_.violated(res.assignment)
    else:
        assert res.violated == len(sys_.violated(res.assignment)) > 0


def test_system_json_round_trip():
    evs = (
        BadEvent(0, 1, (0, 1), "path_repetition"),
        BadEvent(1, 2, (1, 2, 3, 0), "block_equality"),
        BadEvent(2, 1, (2,), "custom_table", {"shape": [3], "table": [0, 1, 0]}),
    )
    sys_ = ConstraintSystem((2, 2, 3, 2), evs)
    text = json.dumps(sys_.to_dict())
    again = ConstraintSystem.from_dict(json.loads(text))
    assert again.to_dict() == sys_.to_dict()
    assert set(json.loads(text)) == {"variables", "events"}
    for x in itertools.product(range(2), range(2), range(3), range(2)):
        assert [e.occurs(x) for e in again.events] == [e.occurs(x) for e in sys_.events]


def test_system_validation():
    with pytest.raises(ValidationError):
        ConstraintSystem((1, 2))
    with pytest.raises(ValidationError):
        ConstraintSystem((2, 2), (BadEvent(0, 1, (0, 5), "block_equality"),))
    with pytest.raises(ValidationError):
        BadEvent(0, 1, (), "block_equality")
