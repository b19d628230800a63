"""Randomized oracle suites comparing the fast implementations with brute force.

Each suite returns a plain report dict; ``failures`` lists discrepancies (the
first few in full), which always indicate a bug.
"""

from __future__ import annotations

import random
from typing import Callable

from .core import Instance
from .matching import HRGraph, max_trait_matching
from .oracle import (
    IndependenceOracle,
    brute_force_matching,
    check_greedy_properties,
    check_matroid_axioms,
    enumerate_axiomatic_allocations,
    gale_dominates,
    maximally_accommodating_selections,
    random_graph,
    random_instance,
)
from .rules import meritorious_horizontal, sci_akg, sci_akg_original, two_step_meritorious_horizontal

CHECKS = ("matching", "uniqueness", "matroid", "greedy", "gale", "akg-equivalence")
KEEP_EXAMPLES = 5


def _instance_doc(instance: Instance) -> dict:
    return {
        "pool": [
            {"id": i.id, "merit": i.merit, "category": i.category, "traits": sorted(i.traits)}
            for i in instance.pool
        ],
        "quotas": instance.quotas.to_dict(),
    }


def _matching_trial(rng: random.Random, max_individuals: int) -> dict | None:
    g = random_graph(rng, max_individuals, max_individuals)
    graph = HRGraph("open", g.left, g.right, g.edges)
    mu = max_trait_matching(graph)
    slots = list(mu.assignment.values())
    valid = len(set(slots)) == len(slots) and all(
        g.right.index(slot) in g.edges[u] for u, slot in mu.assignment.items()
    )
    expected = brute_force_matching(g)
    if not valid or len(mu) != expected:
        return {"left": list(g.left), "right": len(g.right), "edges": {u: list(e) for u, e in g.edges.items()},
                "found": len(mu), "expected": expected, "valid": valid}
    return None


def _uniqueness_trial(instance: Instance) -> dict | None:
    survivors = enumerate_axiomatic_allocations(instance)
    expected = two_step_meritorious_horizontal(instance).as_sets()
    got = [a.as_sets() for a in survivors]
    if got != [expected]:
        return {"instance": _instance_doc(instance),
                "survivors": [{v: sorted(s) for v, s in a.items()} for a in got],
                "2smh": {v: sorted(s) for v, s in expected.items()}}
    return None


def _akg_trial(instance: Instance) -> dict | None:
    a, b = sci_akg(instance).as_sets(), sci_akg_original(instance).as_sets()
    if a != b:
        return {"instance": _instance_doc(instance),
                "sci-akg": {v: sorted(s) for v, s in a.items()},
                "sci-akg-original": {v: sorted(s) for v, s in b.items()}}
    return None


def _category_oracles(instance: Instance, limit: int):
    for v in instance.quotas.vertical_categories:
        eligible = instance.eligible(v)[:limit]
        yield v, eligible, IndependenceOracle.transversal(eligible, instance.quotas.hr(v))


def _matroid_trial(instance: Instance) -> dict | None:
    for v, _, oracle in _category_oracles(instance, 6):
        report = check_matroid_axioms(oracle)
        bad = {k: w for k, w in report.items() if w is not None}
        if bad:
            return {"instance": _instance_doc(instance), "category": v, "violations": bad}
    return None


def _greedy_trial(instance: Instance) -> dict | None:
    for v, eligible, oracle in _category_oracles(instance, 8):
        weights = {i.id: i.merit for i in eligible}
        report = check_greedy_properties(oracle, weights)
        bad = {k: w for k, w in report.items() if w is not None}
        if bad:
            return {"instance": _instance_doc(instance), "category": v, "violations": bad}
    return None


def _gale_trial(instance: Instance) -> dict | None:
    pool = list(instance.pool)
    merits = {i.id: i.merit for i in pool}
    for v in instance.quotas.vertical_categories:
        eligible = [i for i in pool if i.eligible_for(v)]
        for mask in range(1 << len(eligible)):
            sub = [eligible[k] for k in range(len(eligible)) if mask >> k & 1]
            best = meritorious_horizontal(v, sub, instance.quotas).ids()
            for other in maximally_accommodating_selections(v, sub, instance.quotas):
                if not gale_dominates(best, other, merits):
                    return {"instance": _instance_doc(instance), "category": v,
                            "subset": [i.id for i in sub], "meritorious": sorted(best), "other": sorted(other)}
    return None


def run_check(
    check: str,
    trials: int = 100,
    seed: int = 0,
    max_individuals: int = 7,
    instance: Instance | None = None,
) -> dict:
    """Run one suite. With ``instance`` given, instance-based suites check only it."""
    rng = random.Random(seed)
    make: Callable[[], Instance]
    trial: Callable[[Instance], dict | None]
    if check == "matching":
        runs = [lambda: _matching_trial(rng, min(max_individuals, 10)) for _ in range(trials)]
    else:
        if check == "uniqueness":
            trial = _uniqueness_trial
            make = lambda: random_instance(rng, min(max_individuals, 10), min_individuals=min(3, max_individuals))
        elif check == "akg-equivalence":
            trial = _akg_trial
            make = lambda: random_instance(rng, max_individuals, max_traits=3, overlapping=False)
        elif check == "matroid":
            trial = _matroid_trial
            make = lambda: random_instance(rng, min(max_individuals, 6), max_categories=0, max_traits=3,
                                           overlapping=True, min_individuals=1)
        elif check == "greedy":
            trial = _greedy_trial
            make = lambda: random_instance(rng, min(max_individuals, 8), max_categories=0, max_traits=3,
                                           overlapping=True, min_individuals=1)
        elif check == "gale":
            trial = _gale_trial
            make = lambda: random_instance(rng, max_individuals, max_categories=0, max_traits=3)
        else:
            raise ValueError(f"unknown check {check!r}; expected one of {', '.join(CHECKS)}")
        if instance is not None:
            runs = [lambda: trial(instance)]
        else:
            runs = [lambda: trial(make()) for _ in range(trials)]

    failures = []
    count = 0
    for run in runs:
        result = run()
        if result is not None:
            count += 1
            if len(failures) < KEEP_EXAMPLES:
                failures.append(result)
    return {
        "check": check,
        "seed": seed,
        "trials": len(runs),
        "max_individuals": max_individuals,
        "failure_count": count,
        "failures": failures,
        "status": "pass" if count == 0 else "fail",
    }
