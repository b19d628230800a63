import itertools
import random

import pytest

from vhreserve.core import OPEN, CategoryQuota, ContractError
from vhreserve.matching import hr_utilization
from vhreserve.rules import (
    OverlapError,
    akg_has,
    apply_rule,
    greedy_hr_set,
    meritorious_horizontal,
    meritorious_reserved,
    minimum_guarantee,
    resolve_order,
    sci_akg,
    sci_akg_original,
    two_step_meritorious_horizontal,
    two_step_minimum_guarantee,
)
from vhreserve.oracle import random_instance

from conftest import instance, person


def sets(alloc):
    return {v: set(s) for v, s in alloc.as_sets().items()}


def ids(selection):
    return set(selection.ids())


# -- single-category rules -------------------------------------------------

@pytest.mark.parametrize(
    "fixture, order, expected",
    [
        ("ex1", ("t1", "t2"), {"i1", "i2"}),
        ("ex1", ("t2", "t1"), {"i1", "i3"}),
        ("ex2", ("t1", "t2"), {"i1", "i2", "i4"}),
        ("ex2", ("t2", "t1"), {"i1", "i2", "i3"}),
    ],
)
def test_minimum_guarantee_depends_on_trait_order(request, fixture, order, expected):
    inst = request.getfixturevalue(fixture)
    assert ids(minimum_guarantee(OPEN, inst.pool, inst.quotas, order)) == expected


def test_minimum_guarantee_needs_an_order_under_overlap(ex1):
    with pytest.raises(ContractError, match="order"):
        minimum_guarantee(OPEN, ex1.pool, ex1.quotas)


@pytest.mark.parametrize("order", [("t1",), ("t1", "t1", "t2"), ("t1", "t2", "t9")])
def test_malformed_orders_are_rejected(ex1, order):
    with pytest.raises(ContractError):
        resolve_order(OPEN, ex1.quotas, order, ex1.pool)


def test_per_category_orders_with_wildcard(ex1):
    assert resolve_order(OPEN, ex1.quotas, {"*": ["t2", "t1"]}, ex1.pool) == ["t2", "t1"]
    assert resolve_order(OPEN, ex1.quotas, {"open": ["t1", "t2"], "*": ["t2", "t1"]}, ex1.pool) == ["t1", "t2"]


@pytest.mark.parametrize("fixture, expected", [("ex1", {"i1", "i3"}), ("ex2", {"i1", "i2", "i3"})])
def test_meritorious_horizontal_goldens(request, fixture, expected):
    inst = request.getfixturevalue(fixture)
    sel = meritorious_horizontal(OPEN, inst.pool, inst.quotas)
    assert ids(sel) == expected
    assert len(sel.witness) == hr_utilization(OPEN, inst.pool, inst.quotas)


def _rng_instances(seed, count, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


@pytest.mark.parametrize("inst", _rng_instances(21, 40, max_individuals=8, max_traits=3, overlapping=False))
def test_meritorious_equals_minimum_guarantee_without_overlap(inst):
    for v in inst.quotas.vertical_categories:
        pool = list(inst.eligible(v))
        for r in range(len(pool) + 1):
            for sub in itertools.combinations(pool, r):
                assert ids(meritorious_horizontal(v, sub, inst.quotas)) == ids(minimum_guarantee(v, sub, inst.quotas))


@pytest.mark.parametrize("inst", _rng_instances(22, 40, max_individuals=8, max_categories=0, max_traits=3,
                                                 overlapping=True))
def test_greedy_step_is_rank_maximal(inst):
    step1 = greedy_hr_set(OPEN, inst.pool, inst.quotas)
    assert len(step1) == hr_utilization(OPEN, step1, inst.quotas) == hr_utilization(OPEN, inst.pool, inst.quotas)


@pytest.mark.parametrize("inst", _rng_instances(23, 12, max_individuals=10, max_categories=0, max_traits=3,
                                                 overlapping=True, min_individuals=8))
def test_greedy_step_satisfies_substitutes(inst):
    pool = list(inst.pool)
    for r in range(len(pool) + 1):
        for sub in itertools.combinations(pool, r):
            chosen = {i.id for i in greedy_hr_set(OPEN, sub, inst.quotas)}
            for out in sub:
                if out.id in chosen:
                    continue
                smaller = [i for i in sub if i is not out]
                assert chosen <= {i.id for i in greedy_hr_set(OPEN, smaller, inst.quotas)}


def test_meritorious_reserved():
    inst = instance([person("a", 3, "SC"), person("b", 2, "SC"), person("c", 1)], 3,
                    [CategoryQuota("SC", 1)])
    assert meritorious_reserved(inst) == {"a", "b"}
    zero = instance([person("a", 3, "SC"), person("b", 2)], 1, [CategoryQuota("SC", 1)])
    assert meritorious_reserved(zero) == set()


def test_meritorious_reserved_is_empty_on_example1(example1):
    assert meritorious_reserved(example1) == set()


# -- two-step rules on the canonical instance -------------------------------

def test_sci_akg_on_example1(example1):
    alloc = sci_akg(example1)
    assert sets(alloc) == {OPEN: {"m1g", "w1g"}, "SC": {"m1c"}}
    assert alloc.aggregate() == {"m1g", "w1g", "m1c"}


def test_sci_akg_rewards_w1c_for_hiding_her_category(example1):
    hidden = example1.replace(person("w1c", 86.5, None, {"WOMEN"}))
    assert sets(sci_akg(hidden)) == {OPEN: {"m1g", "w1c"}, "SC": {"m1c"}}


@pytest.mark.parametrize("rule", [two_step_minimum_guarantee, two_step_meritorious_horizontal])
def test_two_step_rules_on_example1(example1, rule):
    alloc = rule(example1)
    assert sets(alloc) == {OPEN: {"m1g", "w1c"}, "SC": {"m1c"}}
    assert alloc.selections[OPEN].witness.traits() == {"w1c": "WOMEN"}


def test_sci_akg_original_matches_on_example1(example1):
    assert sets(sci_akg_original(example1)) == sets(sci_akg(example1))


def test_sci_akg_original_small_pool_goes_to_open():
    inst = instance([person("a", 2, "SC"), person("b", 1)], 3, [CategoryQuota("SC", 1)])
    assert sets(sci_akg_original(inst)) == {OPEN: {"a", "b"}, "SC": set()}


def test_sci_akg_without_reserve_members_is_open_minimum_guarantee(ex2):
    assert sets(sci_akg(ex2, ("t1", "t2"))) == {OPEN: ids(minimum_guarantee(OPEN, ex2.pool, ex2.quotas, ("t1", "t2")))}


def test_2smg_refuses_overlapping_instances(ex1):
    with pytest.raises(OverlapError, match="use 2smh"):
        two_step_minimum_guarantee(ex1)


def test_no_traits_is_over_and_above():
    people = [person("g1", 9), person("c1", 8, "SC"), person("g2", 7), person("c2", 6, "SC"), person("c3", 5, "SC")]
    inst = instance(people, 3, [CategoryQuota("SC", 1)])
    assert sets(two_step_minimum_guarantee(inst)) == {OPEN: {"g1", "c1"}, "SC": {"c2"}}


def test_2smh_on_ex1_as_open_category():
    inst = instance([person("i1", 3, traits={"t1", "t2"}), person("i2", 2), person("i3", 1, traits={"t1"})], 2,
                    [CategoryQuota("SC", 0)], open_hr={"t1": 1, "t2": 1})
    assert sets(two_step_meritorious_horizontal(inst)) == {OPEN: {"i1", "i3"}, "SC": set()}


@pytest.mark.parametrize("inst", _rng_instances(24, 60, max_individuals=8, max_traits=3, overlapping=False))
def test_2smh_reduces_to_2smg_without_overlap(inst):
    assert sets(two_step_meritorious_horizontal(inst)) == sets(two_step_minimum_guarantee(inst))


@pytest.mark.parametrize("inst", _rng_instances(25, 60, max_individuals=8, max_traits=3, overlapping=False))
def test_original_and_restated_sci_akg_agree(inst):
    assert sets(sci_akg_original(inst)) == sets(sci_akg(inst))


# -- AKG-HAS ---------------------------------------------------------------

def _akg_instance():
    people = [person("a", 9), person("b", 8), person("c", 7), person("w", 6, traits={"W"}), person("x", 5, traits={"W"})]
    return instance(people, 3, open_hr={"W": 1})


def test_akg_has_replaces_lowest_unprotected_member():
    inst = _akg_instance()
    get = inst.get
    sel = akg_has(OPEN, [get("a"), get("b"), get("c")], [get("w"), get("x")], inst.quotas)
    assert ids(sel) == {"a", "b", "w"}


def test_akg_has_keeps_a_compliant_list():
    inst = _akg_instance()
    get = inst.get
    tentative = [get("a"), get("b"), get("w")]
    assert ids(akg_has(OPEN, tentative, [], inst.quotas)) == {"a", "b", "w"}


def test_akg_has_equals_minimum_guarantee_without_overlap():
    inst = _akg_instance()
    J, K = inst.pool[:3], inst.pool[3:]
    assert ids(akg_has(OPEN, J, K, inst.quotas)) == ids(minimum_guarantee(OPEN, inst.pool, inst.quotas))


@pytest.mark.parametrize(
    "J, K, fragment",
    [
        (("a", "b"), ("w",), "seats"),
        (("a", "b", "w"), ("c",), "outrank"),
        (("a", "b", "c"), ("c",), "overlap"),
    ],
)
def test_akg_has_preconditions(J, K, fragment):
    inst = _akg_instance()
    with pytest.raises(ContractError, match=fragment):
        akg_has(OPEN, [inst.get(i) for i in J], [inst.get(i) for i in K], inst.quotas)


# -- token dispatch --------------------------------------------------------

def test_apply_rule_single_category(ex2):
    alloc = apply_rule("meritorious", ex2)
    assert sets(alloc) == {OPEN: {"i1", "i2", "i3"}}
    with pytest.raises(ContractError, match="unknown rule"):
        apply_rule("dutch-auction", ex2)
    with pytest.raises(ContractError, match="unknown category"):
        apply_rule("meritorious", ex2, category="ST")


@pytest.mark.parametrize("rule", ["sci-akg", "sci-akg-original", "2smh"])
def test_rules_are_deterministic(gujarat, rule):
    assert apply_rule(rule, gujarat).to_dict(gujarat.pool) == apply_rule(rule, gujarat).to_dict(gujarat.pool)
