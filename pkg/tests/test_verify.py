from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from splitauth.algebra import AbelianGroup
from splitauth.constructions import catalog, develop_amd, latin_square_td
from splitauth.designs import Gdd, SplittingGdd, SplittingSystem
from splitauth.verify import (
    block_orbits,
    check_equitably_ordered,
    check_gdd,
    check_group_generated,
    check_splitting_bibd,
    check_splitting_gdd,
    cross_pair_counts,
    equitable_necessary_condition,
    is_automorphism,
    orbit_lemma_holds,
    position_counts,
    translation_action,
)

from helpers import random_group_generated


def test_sbibd9_is_a_lambda_one_design():
    rep = check_splitting_bibd(catalog("sbibd9"))
    assert rep.is_bibd and rep.lam == 1 and rep.c == 2
    assert rep.repeated_blocks == [] and rep.witness is None


def test_nine_point_array_is_not_a_design():
    rep = check_splitting_bibd(catalog("array9"))
    assert not rep.is_bibd
    assert rep.witness == (0, 1) and rep.witness_count == 0
    counts = cross_pair_counts(9, catalog("array9").blocks)
    tally = sorted(counts[p][q] for p in range(9) for q in range(p + 1, 9))
    assert tally.count(0) == 9 and tally.count(1) == 18 and tally.count(2) == 9


def test_bibd_needs_uniform_parts():
    # every pair split twice, but part sizes are 1 and 2
    sys = SplittingSystem(3, [[[0], [1, 2]], [[1], [0, 2]], [[2], [0, 1]]])
    rep = check_splitting_bibd(sys)
    assert not rep.is_bibd and rep.c is None and rep.lam == 2


def test_bibd_reports_repeated_blocks():
    sys = SplittingSystem(2, [[[0], [1]], [[1], [0]], [[0], [1]]])
    rep = check_splitting_bibd(sys)
    assert rep.is_bibd and rep.lam == 3
    assert rep.repeated_blocks == [[0, 2]]


def test_check_gdd_accepts_latin_square_td():
    rep = check_gdd(latin_square_td(5))
    assert rep.is_gdd and rep.type == "5^3" and rep.type_counts == {5: 3}


def test_check_gdd_witnesses():
    groups = [[0, 1], [2, 3], [4, 5]]
    same_group = Gdd(6, groups, [(0, 1, 2)], 3)
    rep = check_gdd(same_group)
    assert not rep.is_gdd and rep.witness == (0, 0, 1)
    double = Gdd(6, groups, [(0, 2, 4), (0, 2, 5)], 3)
    assert check_gdd(double).witness == (0, 2)
    missing = Gdd(6, groups, [(0, 2, 4)], 3)
    rep = check_gdd(missing)
    assert not rep.is_gdd and rep.witness == (0, 3)


def test_check_splitting_gdd():
    good = SplittingGdd(4, 2, [[[0], [2]], [[3], [0]], [[1], [2]], [[1], [3]]], [[0, 1], [2, 3]])
    assert check_splitting_gdd(good).is_gdd
    bad = SplittingGdd(4, 2, [[[0], [1]]], [[0, 1], [2, 3]])
    assert check_splitting_gdd(bad).witness == (0, 1)


def test_automorphisms_of_sbibd9():
    sys = catalog("sbibd9")
    assert is_automorphism(sys, [(x + 1) % 9 for x in range(9)])
    assert not is_automorphism(sys, [(2 * x) % 9 for x in range(9)])
    swap = list(range(9))
    swap[0], swap[1] = 1, 0
    assert not is_automorphism(sys, swap)
    with pytest.raises(ValueError):
        is_automorphism(sys, [0] * 9)


def test_group_generated_translation():
    rep = check_group_generated(catalog("sbibd9"), AbelianGroup.cyclic(9))
    assert rep.ok and rep.semiregular and rep.lemma_holds
    assert rep.orbits == [list(range(9))]


def test_group_generated_rejects_conjugated_action():
    G = AbelianGroup.cyclic(9)
    tau = list(range(9))
    tau[0], tau[1] = 1, 0
    action = {g: [tau[perm[tau[x]]] for x in range(9)] for g, perm in translation_action(G).items()}
    rep = check_group_generated(catalog("sbibd9"), G, action)
    assert not rep.ok and "block" in rep.witness


def test_group_generated_wrong_order():
    with pytest.raises(ValueError):
        check_group_generated(catalog("sbibd9"), AbelianGroup.cyclic(10))


def test_group_generated_not_a_homomorphism():
    G = AbelianGroup.cyclic(3)
    sys = SplittingSystem(3, [[[0], [1]], [[1], [2]], [[2], [0]]])
    action = {0: [0, 1, 2], 1: [1, 2, 0], 2: [1, 2, 0]}
    rep = check_group_generated(sys, G, action)
    assert not rep.ok and rep.reason == "action is not a homomorphism"


def test_repeated_translates_are_not_semiregular():
    # {0,1},{2,4} developed twice: every orbit is doubled
    sys = develop_amd(catalog("amd_z9"))
    doubled = sys.with_blocks(list(sys.blocks) * 2)
    rep = check_group_generated(doubled, AbelianGroup.cyclic(9))
    assert rep.ok and not rep.semiregular and rep.lemma_holds is None


def test_block_orbits_split_by_base_block():
    sys, _ = random_group_generated(random.Random(3))
    perms = list(translation_action(AbelianGroup.cyclic(sys.v)).values())
    orbits = block_orbits(sys.blocks, perms)
    assert sorted(len(o) for o in orbits) == [sys.v] * (sys.b // sys.v)


def test_equitable_checks():
    rep = check_equitably_ordered(catalog("sbibd9"))
    assert rep.ok and all(row == [2, 2] for row in rep.table)
    skew = SplittingSystem(3, [[[0], [1]], [[0], [2]], [[1], [2]]])
    rep = check_equitably_ordered(skew)
    assert not rep.ok and rep.witness == 0
    assert position_counts(skew)[0] == [2, 0]


def test_equitable_necessary_condition():
    assert equitable_necessary_condition(9, 2, 2)
    assert equitable_necessary_condition(25, 3, 2)
    assert equitable_necessary_condition(73, 3, 2)
    assert not equitable_necessary_condition(13, 2, 2)
    with pytest.raises(ValueError):
        equitable_necessary_condition(9, 1, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_developments_are_group_generated(seed):
    sys, _ = random_group_generated(random.Random(seed), v_max=20)
    rep = check_group_generated(sys, AbelianGroup.cyclic(sys.v))
    assert rep.ok and rep.semiregular and rep.lemma_holds
    assert all(orbit_lemma_holds(sys, o) for o in rep.orbits)
