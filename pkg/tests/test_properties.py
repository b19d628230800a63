"""Property tests driven by hypothesis; skipped when it is not installed."""

import random

import pytest

hypothesis = pytest.importorskip("hypothesis")
from hypothesis import given, settings, strategies as st  # noqa: E402

from vhreserve.axioms import REALIZED_CHECKS  # noqa: E402
from vhreserve.core import load_instance, serialize_applicants, serialize_quotas  # noqa: E402
from vhreserve.oracle import random_instance  # noqa: E402
from vhreserve.rules import apply_rule  # noqa: E402

instances = st.builds(
    lambda seed, n, overlapping: random_instance(random.Random(seed), n, max_traits=3, overlapping=overlapping),
    st.integers(0, 2**32), st.integers(0, 9), st.booleans(),
)


@settings(max_examples=150, deadline=None)
@given(instances)
def test_2smh_output_passes_every_realized_axiom(inst):
    alloc = apply_rule("2smh", inst)
    for check in REALIZED_CHECKS.values():
        assert check(alloc, inst.pool, inst.quotas) == []


@settings(max_examples=150, deadline=None)
@given(instances)
def test_rule_outputs_are_feasible(inst):
    for rule in ("sci-akg", "sci-akg-original", "2smh"):
        orders = list(inst.quotas.traits)
        alloc = apply_rule(rule, inst, orders)
        alloc.check(inst.pool, inst.quotas)
        assert all(len(sel.chosen) <= inst.quotas.capacity(v) for v, sel in alloc.selections.items())


@settings(max_examples=100, deadline=None)
@given(instances)
def test_serialization_round_trip(inst):
    assert load_instance(serialize_applicants(inst.pool), serialize_quotas(inst.quotas)) == inst
