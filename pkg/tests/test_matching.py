import itertools
import random

import pytest

from vhreserve.core import OPEN, ContractError
from vhreserve.matching import (
    AugmentingMatcher,
    build_hr_graph,
    closed_form_utilization,
    hr_utilization,
    increases_hr_utilization,
    max_trait_matching,
)
from vhreserve.oracle import brute_force_matching, random_graph, random_instance, utilization

from conftest import instance, person


def pick(inst, *ids):
    return [inst.get(i) for i in ids]


def test_ex1_graph_adjacency(ex1):
    g = build_hr_graph(OPEN, ex1.pool, ex1.quotas)
    assert g.right == (("t1", 0), ("t2", 0))
    assert g.neighbors("i1") == (0, 1)
    assert g.neighbors("i2") == ()
    assert g.neighbors("i3") == (0,)


def test_graph_without_quotas_has_no_slots(example1):
    g = build_hr_graph("SC", example1.eligible("SC"), example1.quotas)
    assert g.right == () and all(g.neighbors(i) == () for i in g.left)


def test_slot_multiplicity():
    inst = instance([person("a", 1, traits={"t"})], 2, open_hr={"t": 2})
    g = build_hr_graph(OPEN, inst.pool, inst.quotas)
    assert g.neighbors("a") == (0, 1)


def test_ineligible_individual_is_a_contract_error(example1):
    with pytest.raises(ContractError):
        build_hr_graph("SC", example1.pool, example1.quotas)


def test_ex1_matchings(ex1):
    mu = max_trait_matching(build_hr_graph(OPEN, pick(ex1, "i1", "i3"), ex1.quotas))
    assert mu.traits() == {"i1": "t2", "i3": "t1"}
    assert len(max_trait_matching(build_hr_graph(OPEN, pick(ex1, "i1", "i2"), ex1.quotas))) == 1
    assert len(max_trait_matching(build_hr_graph(OPEN, [], ex1.quotas))) == 0


def test_witness_uses_lowest_slot_index_first():
    inst = instance([person("a", 2, traits={"t"}), person("b", 1, traits={"t"})], 2, open_hr={"t": 2})
    mu = max_trait_matching(build_hr_graph(OPEN, inst.pool, inst.quotas))
    assert mu.assignment == {"a": ("t", 0), "b": ("t", 1)}


def test_utilization_examples(example1, ex2):
    assert hr_utilization(OPEN, pick(example1, "m1g", "w1g"), example1.quotas) == 1
    assert hr_utilization(OPEN, pick(ex2, "i1", "i2", "i3"), ex2.quotas) == 2
    assert hr_utilization(OPEN, [], ex2.quotas) == 0


def test_increases_utilization_examples(ex1):
    i1, i2, i3 = pick(ex1, "i1", "i2", "i3")
    assert increases_hr_utilization(OPEN, [i1], i3, ex1.quotas)
    assert not increases_hr_utilization(OPEN, [i1], i2, ex1.quotas)
    assert increases_hr_utilization(OPEN, [], i3, ex1.quotas)
    with pytest.raises(ContractError):
        increases_hr_utilization(OPEN, [i1], i1, ex1.quotas)


def test_kernel_matches_brute_force_on_random_graphs():
    rng = random.Random(11)
    for _ in range(300):
        g = random_graph(rng, 8, 8)
        m = AugmentingMatcher(g.right)
        for u in g.left:
            m.add(u, g.edges[u])
        assert len(m) == brute_force_matching(g)


def _pools(seed, count, n, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, n, max_categories=0, max_traits=3, min_individuals=n, **kw) for _ in range(count)]


@pytest.mark.parametrize("inst", _pools(5, 15, 6, overlapping=True))
def test_rank_axioms_exhaustively(inst):
    pool, q = list(inst.pool), inst.quotas
    subsets = [frozenset(c) for r in range(len(pool) + 1) for c in itertools.combinations(pool, r)]
    rank = {s: hr_utilization(OPEN, s, q) for s in subsets}
    for s in subsets:
        assert rank[s] == utilization(s, q.hr(OPEN))
        for i in pool:
            if i not in s:
                assert rank[s] <= rank[s | {i}] <= rank[s] + 1
                assert increases_hr_utilization(OPEN, s, i, q) == (rank[s | {i}] > rank[s])
    for x in subsets:
        for y in subsets:
            assert rank[x | y] + rank[x & y] <= rank[x] + rank[y]


@pytest.mark.parametrize("inst", _pools(9, 5, 12, overlapping=False))
def test_closed_form_on_non_overlapping_pools(inst):
    pool, q = list(inst.pool), inst.quotas
    hr = q.hr(OPEN)
    for mask in range(1 << len(pool)):
        sub = [pool[k] for k in range(len(pool)) if mask >> k & 1]
        assert hr_utilization(OPEN, sub, q) == closed_form_utilization(sub, hr)


def test_closed_form_refuses_overlapping(ex1):
    with pytest.raises(ContractError):
        closed_form_utilization(ex1.pool, ex1.quotas.hr(OPEN))


def test_random_graph_witnesses_are_valid_matchings():
    rng = random.Random(12)
    for _ in range(300):
        g = random_graph(rng, 8, 8)
        mu = AugmentingMatcher(g.right)
        for u in g.left:
            mu.add(u, g.edges[u])
        slots = list(mu.matching().assignment.values())
        assert len(set(slots)) == len(slots)
        assert all(g.right.index(s) in g.edges[u] for u, s in mu.matching().assignment.items())
