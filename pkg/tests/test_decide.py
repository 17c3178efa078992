from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sphere_predicate, table_oracle
from smalebarden.abelian import INF, H2Data, gk_check, normalize, tstar_check
from smalebarden.decide import (
    Status,
    Verdict,
    decide_negative_sasakian,
    decide_sasakian,
    decide_semiregular_sphere,
    kcontact_sphere_necessary,
    positive_table_member,
)
from smalebarden.seifert import invariants_of

YES, NO, UNKNOWN = Status.PROVABLY_YES, Status.PROVABLY_NO, Status.UNKNOWN

torsion_items = st.lists(st.tuples(st.integers(2, 40), st.integers(1, 8)), max_size=3)


def check_sound(v: Verdict, h: H2Data) -> None:
    if v.yes:
        inv = invariants_of(v.certificate)
        assert inv.h2 == h and inv.kahler and inv.simply_connected


# -- verdict type ------------------------------------------------------------------


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(YES)
    with pytest.raises(ValueError):
        Verdict(NO)
    with pytest.raises(ValueError):
        Verdict(UNKNOWN)
    assert str(YES) == "ProvablyYes"


# -- decide_sasakian ---------------------------------------------------------------------


def test_decide_examples():
    v = decide_sasakian(normalize([(2, 1)], 0, 1))
    assert v.status is NO and v.obstruction == "GK-1"
    h = normalize([(3, 2), (5, 4)], 2, 0)
    v = decide_sasakian(h)
    assert v.status is YES
    check_sound(v, h)
    v = decide_sasakian(normalize([(5, 4)], 0, 0))
    assert v.status is UNKNOWN and v.obstruction == "T"


def test_decide_near_miss_spheres():
    # gcd(9, 3) = 3 and gcd(2, 4) = 2 both break the sphere construction
    for raw in ([(9, 2), (2, 6)], [(7, 2), (2, 6)], [(9, 2), (7, 2)]):
        h = normalize(raw, 0, 0)
        v = decide_sasakian(h)
        tc = tstar_check(h)
        assert not tc and v.status is UNKNOWN and v.obstruction == tc.clause
    h = normalize([(7, 2), (11, 6)], 0, 0)
    assert tstar_check(h) and decide_sasakian(h).status is YES


def test_decide_torsion_free():
    for k in range(0, 6):
        v = decide_sasakian(H2Data(k, (), 0))
        assert v.status is YES and "regular" in v.reason
        check_sound(v, H2Data(k, (), 0))
    for k in range(1, 6):
        assert decide_sasakian(H2Data(k, (), INF)).status is YES
    # k = 0 and i = inf is not the homology of any Smale-Barden manifold
    v = decide_sasakian(H2Data(0, (), INF))
    assert v.status is NO and v.obstruction == "NotRealizable"


def test_decide_gk2():
    v = decide_sasakian(normalize([(2, 2), (4, 2)], 0, 0))
    assert v.status is NO and v.obstruction == "GK-2"


def test_decide_odd_count_is_pairing_failure():
    v = decide_sasakian(normalize([(3, 3)], 1, 0))
    assert v.status is NO and v.obstruction == "PairingFailure"


def test_decide_kollar_at_rank_zero_only():
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
    raw = [(p, 4) for p in primes]
    v = decide_sasakian(normalize(raw, 0, 0))
    assert v.status is NO and v.obstruction == "Kollar-10"
    assert decide_sasakian(normalize(raw, 1, 0)).status is YES


def test_decide_noncoprime_rank_one_is_unknown():
    v = decide_sasakian(normalize([(2, 2), (4, 2)], 2, INF))
    assert v.status is UNKNOWN and v.obstruction == "coprime"


def test_trace_lists_checks_in_order():
    v = decide_sasakian(normalize([(3, 2), (5, 4)], 1, 0))
    assert [s.check for s in v.trace][:2] == ["G-K", "Barden name"]
    assert v.trace[-1].check == "verify"


@settings(max_examples=150, deadline=None)
@given(torsion_items, st.integers(0, 3), st.sampled_from([0, INF, 1, 2]))
def test_decide_sound_and_gated(raw, k, i):
    h = normalize(raw, k, i)
    v = decide_sasakian(h)
    check_sound(v, h)
    if not gk_check(h):
        assert v.status is NO
    assert decide_sasakian(h) == v  # deterministic, including the trace


@settings(max_examples=150, deadline=None)
@given(torsion_items, st.sampled_from([0, INF]))
def test_decide_rank_zero_yes_matches_oracle(raw, i):
    h = normalize(raw, 0, i)
    v = decide_sasakian(h)
    if sphere_predicate(raw, i == 0):
        assert v.status is YES
    elif v.status is YES:
        pytest.fail("yes outside the constructible family")


# -- semi-regular spheres -------------------------------------------------------------------


def test_sphere_examples():
    assert decide_semiregular_sphere(normalize([(5, 6)], 0, 0)).status is YES
    v = decide_semiregular_sphere(normalize([(3, 2)], 0, 0))
    assert v.status is NO and v.obstruction == "T*_3"
    v = decide_semiregular_sphere(normalize([(5, 6)], 0, INF))
    assert v.status is NO and v.obstruction == "spin"
    with pytest.raises(ValueError):
        decide_semiregular_sphere(normalize([(5, 6)], 1, 0))


@settings(max_examples=300, deadline=None)
@given(torsion_items, st.sampled_from([0, INF]))
def test_sphere_dichotomy_matches_oracle(raw, i):
    h = normalize(raw, 0, i)
    v = decide_semiregular_sphere(h)
    assert v.status is not UNKNOWN
    assert v.yes == sphere_predicate(raw, i == 0)
    check_sound(v, h)


# -- positive table and negative structures ----------------------------------------


def test_positive_table_examples():
    assert positive_table_member(normalize([(3, 6)]))
    assert not positive_table_member(normalize([(7, 2), (11, 4)]))
    assert positive_table_member(normalize([(7, 2), (11, 2)]))  # = Z_77^2
    assert positive_table_member(normalize([(2, 8)]))
    assert positive_table_member(normalize([(6, 2)]))
    assert positive_table_member(normalize([(2, 2), (3, 2)]))  # = Z_6^2
    assert not positive_table_member(normalize([(5, 6)]))
    assert positive_table_member(normalize([]))


@given(torsion_items)
def test_positive_table_matches_oracle(raw):
    assert positive_table_member(normalize(raw)) == table_oracle(raw)


def test_negative_examples():
    h = normalize([(7, 6), (11, 2)], 0, 0)
    v = decide_negative_sasakian(h)
    assert v.status is YES and v.note == "negative"
    check_sound(v, h)
    v = decide_negative_sasakian(normalize([(3, 6)], 0, 0))
    assert v.status is UNKNOWN and v.note == "Unknown-for-negative"
    for m in (2, 3, 10, 49):
        v = decide_negative_sasakian(normalize([(m, 2)], 0, 0))
        assert v.status is UNKNOWN and v.note == "Unknown-for-negative"
    with pytest.raises(ValueError):
        decide_negative_sasakian(normalize([(7, 6)], 2, 0))


def test_negative_without_construction_is_unknown():
    v = decide_negative_sasakian(normalize([(5, 4), (7, 4)], 0, 0))
    assert v.status is UNKNOWN and v.note == ""


@settings(max_examples=200, deadline=None)
@given(torsion_items, st.sampled_from([0, INF]))
def test_positive_negative_trichotomy(raw, i):
    h = normalize(raw, 0, i)
    if decide_semiregular_sphere(h).yes:
        neg = decide_negative_sasakian(h)
        assert positive_table_member(h) or neg.yes
        assert neg.yes or neg.note == "Unknown-for-negative"


# -- K-contact necessary condition ------------------------------------------------------


def test_kcontact_examples():
    r = kcontact_sphere_necessary(normalize([(3, 2)], 0, 0))
    assert not r and r.clause == "KC"
    r = kcontact_sphere_necessary(normalize([(5, 6)], 0, 0))
    assert r and "A" in r.witness
    r = kcontact_sphere_necessary(normalize([(7, 2)], 0, 0))
    assert r and "A" in r.witness


def test_kcontact_branch_b_only():
    # d = 4 for g = 3: gcd(2, 4) = 2 but gcd(2, 7) = 1
    r = kcontact_sphere_necessary(normalize([(2, 6)], 0, 0))
    assert r and r.witness == ("B",)


def test_kcontact_other_clauses():
    assert kcontact_sphere_necessary(normalize([(5, 6)], 0, INF)).clause == "spin"
    assert kcontact_sphere_necessary(normalize([(2, 2), (4, 2)], 0, 0)).clause == "coprime"
    assert kcontact_sphere_necessary(normalize([(3, 3)], 0, 0)).clause == "PairingFailure"
    assert kcontact_sphere_necessary(normalize([(5, 4)], 0, 0)).clause == "T"


@settings(max_examples=200)
@given(torsion_items)
def test_kcontact_weaker_than_semiregular(raw):
    h = normalize(raw, 0, 0)
    if decide_semiregular_sphere(h).yes:
        assert kcontact_sphere_necessary(h)
