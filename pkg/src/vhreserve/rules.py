"""Choice rules for concurrent vertical and horizontal reservations.

Single-category rules map a set of eligible individuals to a ``Selection``;
multi-category rules map an ``Instance`` to an ``Allocation``. Every rule is a
pure function of its inputs.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    OPEN,
    Allocation,
    ContractError,
    Individual,
    Instance,
    QuotaScheme,
    ReservationError,
    Selection,
    by_merit,
)
from .matching import AugmentingMatcher, _adjacency, _slots, build_hr_graph, max_trait_matching

# A trait order is either one sequence applied to every category, or a map
# from category name to its own sequence.
Orders = Mapping[str, Sequence[str]] | Sequence[str] | None


class OverlapError(ReservationError):
    """A rule that is only defined for non-overlapping traits got overlapping input."""


def resolve_order(v: str, quotas: QuotaScheme, orders: Orders, individuals: Iterable[Individual]) -> list[str]:
    """Processing sequence of the positive-quota traits of category ``v``.

    With no order given, the declared trait order is used, but only when no
    individual holds two traits (otherwise the outcome would depend on an
    arbitrary choice).
    """
    hr = quotas.hr(v)
    if orders is None:
        if any(len(i.traits) > 1 for i in individuals):
            raise ContractError(
                f"category {v}: overlapping traits require an explicit trait order"
            )
        return list(hr)
    seq = orders.get(v) if isinstance(orders, Mapping) else orders
    if seq is None:
        if isinstance(orders, Mapping) and "*" in orders:
            seq = orders["*"]
        else:
            return resolve_order(v, quotas, None, individuals)
    seq = list(seq)
    if len(set(seq)) != len(seq):
        raise ContractError(f"category {v}: trait order has duplicates: {seq}")
    unknown = [t for t in seq if t not in quotas.traits]
    if unknown:
        raise ContractError(f"category {v}: unknown traits in order: {unknown}")
    missing = [t for t in hr if t not in seq]
    if missing:
        raise ContractError(f"category {v}: trait order omits traits with positive quota: {missing}")
    return [t for t in seq if t in hr]


def _witness(v: str, chosen: Sequence[Individual], quotas: QuotaScheme) -> Selection:
    chosen = tuple(by_merit(chosen))
    return Selection(chosen, max_trait_matching(build_hr_graph(v, chosen, quotas)))


def minimum_guarantee(
    v: str, individuals: Iterable[Individual], quotas: QuotaScheme, order: Orders = None
) -> Selection:
    """Reserve the top holders of each trait in turn, then fill by merit.

    Under overlapping traits a person picked for one trait is not available to
    later traits, which is what makes the outcome order dependent.
    """
    pool = by_merit(individuals)
    capacity = quotas.capacity(v)
    hr = quotas.hr(v)
    chosen: list[Individual] = []
    taken: set[str] = set()
    for t in resolve_order(v, quotas, order, pool):
        holders = [i for i in pool if t in i.traits and i.id not in taken]
        for i in holders[: hr[t]]:
            chosen.append(i)
            taken.add(i.id)
    for i in pool:
        if len(chosen) >= capacity:
            break
        if i.id not in taken:
            chosen.append(i)
            taken.add(i.id)
    return _witness(v, chosen, quotas)


def _assert_distinct(individuals: Sequence[Individual]) -> None:
    merits = [i.merit for i in individuals]
    if len(set(merits)) != len(merits):
        raise ContractError("merit scores must be distinct")


def greedy_hr_set(v: str, individuals: Iterable[Individual], quotas: QuotaScheme) -> list[Individual]:
    """Merit-greedy set of individuals who each increase HR utilization."""
    pool = by_merit(individuals)
    _assert_distinct(pool)
    right = _slots(quotas.hr(v))
    matcher = AugmentingMatcher(right)
    chosen: list[Individual] = []
    bad = [i.id for i in pool if not i.eligible_for(v)]
    if bad:
        raise ContractError(f"not eligible for category {v}: {bad}")
    for i in pool:
        if len(matcher) == len(right):
            break
        if matcher.add(i.id, _adjacency(i.traits, right)):
            chosen.append(i)
    return chosen


def meritorious_horizontal(v: str, individuals: Iterable[Individual], quotas: QuotaScheme) -> Selection:
    """Greedy over the transversal matroid of the HR graph, then fill by merit.

    Scanning once in merit order is equivalent to repeatedly choosing the best
    individual who increases HR utilization: a candidate who cannot augment
    the current matching never becomes able to later.
    """
    pool = by_merit(individuals)
    capacity = quotas.capacity(v)
    step1 = greedy_hr_set(v, pool, quotas)
    chosen = list(step1)
    ids = {i.id for i in step1}
    for i in pool:
        if len(chosen) >= capacity:
            break
        if i.id not in ids:
            chosen.append(i)
    return _witness(v, chosen, quotas)


def meritorious_reserved(instance: Instance) -> frozenset[str]:
    """Reserve-eligible individuals ranked among the top ``q^o`` of the pool."""
    top = instance.pool[: instance.quotas.open_capacity]
    return frozenset(i.id for i in top if i.category is not None)


def _two_step(instance: Instance, name: str, open_pool, single) -> Allocation:
    quotas = instance.quotas
    open_sel = single(OPEN, open_pool)
    taken = open_sel.ids()
    selections = {OPEN: open_sel}
    for c in quotas.reserve_categories:
        rest = [i for i in instance.members(c) if i.id not in taken]
        selections[c] = single(c, rest)
    alloc = Allocation(name, selections)
    alloc.check(instance.pool, quotas)
    return alloc


def sci_akg(instance: Instance, orders: Orders = None) -> Allocation:
    """Open positions go through minimum guarantee over general-category
    individuals and meritorious reserved candidates only."""
    merit_res = meritorious_reserved(instance)
    open_pool = [i for i in instance.pool if i.category is None or i.id in merit_res]
    return _two_step(
        instance, "sci-akg", open_pool,
        lambda v, I: minimum_guarantee(v, I, instance.quotas, orders),
    )


def two_step_minimum_guarantee(instance: Instance) -> Allocation:
    if instance.overlapping:
        raise OverlapError("2SMG undefined under overlapping traits; use 2smh")
    return _two_step(
        instance, "2smg", instance.pool,
        lambda v, I: minimum_guarantee(v, I, instance.quotas),
    )


def two_step_meritorious_horizontal(instance: Instance) -> Allocation:
    return _two_step(
        instance, "2smh", instance.pool,
        lambda v, I: meritorious_horizontal(v, I, instance.quotas),
    )


def akg_has(
    v: str,
    tentative: Iterable[Individual],
    adjustable: Iterable[Individual],
    quotas: QuotaScheme,
    order: Orders = None,
) -> Selection:
    """Horizontal adjustment of a tentative merit list, one trait at a time.

    ``tentative`` must fill category ``v`` exactly and outrank everyone in
    ``adjustable``. For each trait, a shortfall among the not-yet-finalized
    tentative members is made up from the best adjustable holders; the
    remaining seats go to the best unfinalized tentative members.
    """
    J = by_merit(tentative)
    K = by_merit(adjustable)
    capacity = quotas.capacity(v)
    if len(J) != capacity:
        raise ContractError(f"akg_has: tentative list has {len(J)} members, category {v} has {capacity} seats")
    if {i.id for i in J} & {i.id for i in K}:
        raise ContractError("akg_has: tentative and adjustable sets overlap")
    if J and K and min(i.merit for i in J) <= max(i.merit for i in K):
        raise ContractError("akg_has: every tentative member must outrank every adjustable one")
    bad = [i.id for i in J + K if not i.eligible_for(v)]
    if bad:
        raise ContractError(f"akg_has: not eligible for {v}: {bad}")

    hr = quotas.hr(v)
    final: list[Individual] = []
    done: set[str] = set()
    for t in resolve_order(v, quotas, order, J + K):
        in_j = [i for i in J if t in i.traits and i.id not in done]
        if len(in_j) >= hr[t]:
            step = in_j[: hr[t]]
        else:
            in_k = [i for i in K if t in i.traits and i.id not in done]
            step = in_j + in_k[: hr[t] - len(in_j)]
        final.extend(step)
        done.update(i.id for i in step)
    leftover = [i for i in J if i.id not in done]
    final.extend(leftover[: capacity - len(final)])
    return _witness(v, final, quotas)


def sci_akg_original(instance: Instance, orders: Orders = None) -> Allocation:
    """Tentative over-and-above assignment followed by horizontal adjustments."""
    quotas = instance.quotas
    pool = list(instance.pool)
    q_open = quotas.open_capacity
    if len(pool) <= q_open:
        selections = {OPEN: _witness(OPEN, pool, quotas)}
        selections.update({c: Selection(()) for c in quotas.reserve_categories})
        alloc = Allocation("sci-akg-original", selections)
        alloc.check(pool, quotas)
        return alloc

    J_open = pool[:q_open]
    J_ids = {i.id for i in J_open}
    K_open = [i for i in pool if i.category is None and i.id not in J_ids]
    open_sel = akg_has(OPEN, J_open, K_open, quotas, orders)
    taken = open_sel.ids()
    selections = {OPEN: open_sel}
    for c in quotas.reserve_categories:
        rest = [i for i in instance.members(c) if i.id not in taken]
        q_c = quotas.capacity(c)
        if len(rest) <= q_c:
            selections[c] = _witness(c, rest, quotas)
        else:
            selections[c] = akg_has(c, rest[:q_c], rest[q_c:], quotas, orders)
    alloc = Allocation("sci-akg-original", selections)
    alloc.check(pool, quotas)
    return alloc


SINGLE_CATEGORY_RULES = ("min-guarantee", "meritorious")
MULTI_CATEGORY_RULES = ("sci-akg", "sci-akg-original", "2smg", "2smh")
RULE_TOKENS = MULTI_CATEGORY_RULES + SINGLE_CATEGORY_RULES


def apply_rule(token: str, instance: Instance, orders: Orders = None, category: str = OPEN) -> Allocation:
    """Run a rule by its CLI token.

    The single-category tokens run on ``category`` over every eligible member
    of the pool and leave the other categories out of the allocation.
    """
    if token == "sci-akg":
        return sci_akg(instance, orders)
    if token == "sci-akg-original":
        return sci_akg_original(instance, orders)
    if token == "2smg":
        return two_step_minimum_guarantee(instance)
    if token == "2smh":
        return two_step_meritorious_horizontal(instance)
    if token in SINGLE_CATEGORY_RULES:
        if category not in instance.quotas.vertical_categories:
            raise ContractError(f"unknown category {category!r}")
        eligible = instance.eligible(category)
        if token == "min-guarantee":
            sel = minimum_guarantee(category, eligible, instance.quotas, orders)
        else:
            sel = meritorious_horizontal(category, eligible, instance.quotas)
        alloc = Allocation(token, {category: sel})
        alloc.check(instance.pool, instance.quotas)
        return alloc
    raise ContractError(f"unknown rule {token!r}; expected one of {', '.join(RULE_TOKENS)}")


RuleFn = Callable[[Instance], Allocation]


def rule_function(token: str, orders: Orders = None, category: str = OPEN) -> RuleFn:
    return lambda instance: apply_rule(token, instance, orders, category)
