import random

import pytest

from vhreserve.core import OPEN, CategoryQuota, ContractError
from vhreserve.matching import build_hr_graph
from vhreserve.oracle import (
    AXIOMS,
    IndependenceOracle,
    RandomGraph,
    brute_force_matching,
    check_greedy_properties,
    check_matroid_axioms,
    enumerate_axiomatic_allocations,
    gale_dominates,
    greedy_choice,
    maximally_accommodating_selections,
    random_instance,
)
from vhreserve.rules import meritorious_horizontal, two_step_meritorious_horizontal, two_step_minimum_guarantee

from conftest import instance, person


def survivors(inst, axioms=AXIOMS):
    return [{v: set(s) for v, s in a.as_sets().items()} for a in enumerate_axiomatic_allocations(inst, axioms)]


def test_brute_force_matching_examples(ex1):
    g = build_hr_graph(OPEN, [ex1.get("i1"), ex1.get("i3")], ex1.quotas)
    assert brute_force_matching(g) == 2
    complete = RandomGraph(("a", "b", "c"), (("t", 0), ("t", 1)), {u: (0, 1) for u in "abc"})
    assert brute_force_matching(complete) == 2
    assert brute_force_matching(RandomGraph(("a", "b"), (("t", 0),), {"a": (), "b": ()})) == 0


def test_brute_force_matching_refuses_large_graphs():
    left = tuple(f"u{k}" for k in range(13))
    with pytest.raises(ContractError):
        brute_force_matching(RandomGraph(left, (), {u: () for u in left}))


def test_unique_survivor_on_example1(example1):
    found = survivors(example1)
    assert found == [{v: set(s) for v, s in two_step_minimum_guarantee(example1).as_sets().items()}]


def test_unique_survivor_without_traits_is_merit_order():
    inst = instance([person("a", 3), person("b", 2), person("c", 1)], 2)
    assert survivors(inst) == [{OPEN: {"a", "b"}}]


def test_unique_survivor_is_2smh_on_overlapping_pools():
    rng = random.Random(17)
    for _ in range(60):
        inst = random_instance(rng, 7, max_traits=2, overlapping=True, min_individuals=7)
        expected = {v: set(s) for v, s in two_step_meritorious_horizontal(inst).as_sets().items()}
        assert survivors(inst) == [expected]


def test_enumeration_bound():
    inst = instance([person(f"p{k}", k + 1) for k in range(11)], 2)
    with pytest.raises(ContractError):
        enumerate_axiomatic_allocations(inst)


# Smallest pools on which dropping one axiom lets an extra allocation through.
# Found by randomized search over pools of up to five individuals.
INDEPENDENCE_WITNESSES = {
    "NW": (instance([person("a", 2), person("b", 1)], 1), {OPEN: set()}),
    "NJE": (instance([person("a", 2), person("b", 1)], 1), {OPEN: {"b"}}),
    "MHR": (instance([person("a", 27), person("b", 3, traits={"t1"})], 1, open_hr={"t1": 1}), {OPEN: {"a"}}),
    "VRC": (
        instance([person("c", 32, "c1", {"t1"}), person("g1", 17), person("g2", 3)], 2,
                 [CategoryQuota("c1", 1, {"t1": 1})]),
        {OPEN: {"g1"}, "c1": {"c"}},
    ),
}


@pytest.mark.parametrize("axiom", AXIOMS)
def test_each_axiom_is_needed(axiom):
    inst, extra = INDEPENDENCE_WITNESSES[axiom]
    full = survivors(inst)
    relaxed = survivors(inst, [a for a in AXIOMS if a != axiom])
    assert len(full) == 1
    assert len(relaxed) > 1 and extra in relaxed and extra not in full


def test_gale_dominance_examples(ex1):
    merits = {i.id: i.merit for i in ex1.pool}
    assert gale_dominates({"i1", "i3"}, {"i1", "i3"}, merits)
    assert gale_dominates({"i1", "i2"}, {"i1", "i3"}, merits)
    assert not gale_dominates({"i1"}, {"i2", "i3"}, merits)
    assert not gale_dominates({"i1", "i3"}, {"i1", "i2"}, merits)


def test_meritorious_gale_dominates_accommodating_selections(ex2):
    merits = {i.id: i.merit for i in ex2.pool}
    best = meritorious_horizontal(OPEN, ex2.pool, ex2.quotas).ids()
    others = maximally_accommodating_selections(OPEN, ex2.pool, ex2.quotas)
    assert best in others
    assert all(gale_dominates(best, o, merits) for o in others)


def test_greedy_choice_examples(ex1):
    weights = {i.id: i.merit for i in ex1.pool}
    transversal = IndependenceOracle.transversal(ex1.pool, ex1.quotas.hr(OPEN))
    assert greedy_choice(transversal, weights, ["i1", "i2", "i3"]) == {"i1", "i3"}
    ground = ("a", "b")
    w = {"a": 2.0, "b": 1.0}
    assert greedy_choice(IndependenceOracle.free(ground), w, ground) == {"a", "b"}
    assert greedy_choice(IndependenceOracle.rank_zero(ground), w, ground) == frozenset()
    with pytest.raises(ContractError):
        greedy_choice(IndependenceOracle.free(ground), {"a": 1.0, "b": 1.0}, ground)


@pytest.mark.parametrize("fixture", ["ex1", "ex2"])
def test_matroid_and_greedy_checks_pass_on_examples(request, fixture):
    inst = request.getfixturevalue(fixture)
    oracle = IndependenceOracle.transversal(inst.pool, inst.quotas.hr(OPEN))
    assert all(w is None for w in check_matroid_axioms(oracle).values())
    weights = {i.id: i.merit for i in inst.pool}
    assert all(w is None for w in check_greedy_properties(oracle, weights).values())


def test_matroid_check_rejects_non_matroid():
    even = IndependenceOracle(("a", "b", "c"), lambda s: len(s) % 2 == 0)
    assert check_matroid_axioms(even)["M2"] is not None


def test_matroid_check_on_empty_ground():
    report = check_matroid_axioms(IndependenceOracle.free(()))
    assert all(w is None for w in report.values())
