"""Auditors for the allocation axioms.

Each ``check_*`` function inspects one realized allocation and returns every
violation it finds. ``full_audit`` quantifies them over a single pool or over
every subset of it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import OPEN, Allocation, ContractError, Individual, Instance, QuotaScheme, ReservationError, by_merit
from .matching import hr_utilization, increases_hr_utilization
from .rules import Orders, apply_rule

AXIOM_NAMES = ("NJE", "NW", "MHR", "VRC", "IC")
ALL_SUBSETS_BOUND = 14
MAX_REPORTED = 100


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    subset: tuple[str, ...]
    witness: dict

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "subset": list(self.subset), **self.witness}


def _consistent(alloc: Allocation, individuals: Sequence[Individual], quotas: QuotaScheme) -> None:
    try:
        alloc.check(individuals, quotas)
    except ReservationError as exc:
        raise ContractError(f"allocation inconsistent with the pool: {exc}") from None


def _unassigned(alloc: Allocation, individuals: Sequence[Individual], v: str) -> list[Individual]:
    chosen = alloc.aggregate()
    return [j for j in individuals if j.id not in chosen and j.eligible_for(v)]


def _subset_ids(individuals: Sequence[Individual]) -> tuple[str, ...]:
    return tuple(i.id for i in by_merit(individuals))


def check_no_justified_envy(alloc: Allocation, individuals: Iterable[Individual], quotas: QuotaScheme) -> list[AxiomViolation]:
    individuals = by_merit(individuals)
    _consistent(alloc, individuals, quotas)
    out = []
    for v, sel in alloc.selections.items():
        chosen = list(sel.chosen)
        base = hr_utilization(v, chosen, quotas)
        for j in _unassigned(alloc, individuals, v):
            for i in chosen:
                if j.merit <= i.merit:
                    continue
                swapped = [k for k in chosen if k.id != i.id] + [j]
                if hr_utilization(v, swapped, quotas) >= base:
                    out.append(AxiomViolation("NJE", _subset_ids(individuals), {"category": v, "i": i.id, "j": j.id}))
    return out


def check_non_wasteful(alloc: Allocation, individuals: Iterable[Individual], quotas: QuotaScheme) -> list[AxiomViolation]:
    individuals = by_merit(individuals)
    _consistent(alloc, individuals, quotas)
    out = []
    for v, sel in alloc.selections.items():
        if len(sel.chosen) < quotas.capacity(v):
            for j in _unassigned(alloc, individuals, v):
                out.append(AxiomViolation("NW", _subset_ids(individuals), {"category": v, "j": j.id}))
    return out


def check_maximal_hr(alloc: Allocation, individuals: Iterable[Individual], quotas: QuotaScheme) -> list[AxiomViolation]:
    individuals = by_merit(individuals)
    _consistent(alloc, individuals, quotas)
    out = []
    for v, sel in alloc.selections.items():
        for j in _unassigned(alloc, individuals, v):
            if increases_hr_utilization(v, sel.chosen, j, quotas):
                out.append(AxiomViolation("MHR", _subset_ids(individuals), {"category": v, "j": j.id}))
    return out


def check_vr_compliance(alloc: Allocation, individuals: Iterable[Individual], quotas: QuotaScheme) -> list[AxiomViolation]:
    """Reserve seats are only used once open seats are full with better or
    HR-justified holders and the reserve holder could not raise open HR use."""
    individuals = by_merit(individuals)
    _consistent(alloc, individuals, quotas)
    if OPEN not in alloc.selections:
        return []
    subset = _subset_ids(individuals)
    open_chosen = list(alloc.chosen(OPEN))
    base = hr_utilization(OPEN, open_chosen, quotas)
    out = []
    for c, sel in alloc.selections.items():
        if c == OPEN:
            continue
        for i in sel.chosen:
            if len(open_chosen) != quotas.open_capacity:
                out.append(AxiomViolation("VRC", subset, {"category": c, "i": i.id, "condition": 1}))
            for j in open_chosen:
                if j.merit < i.merit:
                    swapped = [k for k in open_chosen if k.id != j.id] + [i]
                    if not base > hr_utilization(OPEN, swapped, quotas):
                        out.append(AxiomViolation("VRC", subset, {"category": c, "i": i.id, "condition": 2, "j": j.id}))
            if increases_hr_utilization(OPEN, open_chosen, i, quotas):
                out.append(AxiomViolation("VRC", subset, {"category": c, "i": i.id, "condition": 3}))
    return out


def withholdings(individual: Individual) -> list[Individual]:
    """Every re-declaration that drops at least one privilege and adds none."""
    cats = [individual.category, None] if individual.category is not None else [None]
    traits = sorted(individual.traits)
    out = []
    for cat in cats:
        for r in range(len(traits), -1, -1):
            for kept in itertools.combinations(traits, r):
                if cat == individual.category and len(kept) == len(traits):
                    continue
                out.append(Individual(individual.id, individual.merit, cat, frozenset(kept)))
    return out


def _withheld(variant: Individual, original: Individual) -> dict:
    w = {}
    if original.category is not None and variant.category is None:
        w["category"] = original.category
    dropped = sorted(original.traits - variant.traits)
    if dropped:
        w["traits"] = dropped
    return w


def check_incentive_compatibility(
    rule: str, instance: Instance, orders: Orders = None, category: str = OPEN, baseline: Allocation | None = None
) -> list[AxiomViolation]:
    """Find individuals selected after withholding privileges but rejected when declaring all of them."""
    if baseline is None:
        baseline = apply_rule(rule, instance, orders, category)
    selected = baseline.aggregate()
    subset = instance.ids()
    out = []
    for i in instance.pool:
        if i.id in selected:
            continue
        for variant in withholdings(i):
            try:
                alloc = apply_rule(rule, instance.replace(variant), orders, category)
            except ReservationError as exc:
                raise type(exc)(f"{rule} failed when {i.id} withholds {_withheld(variant, i)}: {exc}") from exc
            if i.id in alloc.aggregate():
                out.append(AxiomViolation("IC", tuple(subset), {"i": i.id, "withheld": _withheld(variant, i)}))
    return out


REALIZED_CHECKS = {
    "NJE": check_no_justified_envy,
    "NW": check_non_wasteful,
    "MHR": check_maximal_hr,
    "VRC": check_vr_compliance,
}


@dataclass
class AxiomStatus:
    violations: list[AxiomViolation] = field(default_factory=list)
    count: int = 0
    checked: int = 0

    @property
    def status(self) -> str:
        return "fail" if self.count else "pass"


@dataclass
class AuditReport:
    rule: str
    scope: str
    axioms: dict[str, AxiomStatus]

    @property
    def passed(self) -> bool:
        return all(s.status == "pass" for s in self.axioms.values())

    def failed(self) -> list[str]:
        return [a for a, s in self.axioms.items() if s.status == "fail"]

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "scope": self.scope,
            "axioms": {
                name: {
                    "status": s.status,
                    "violations": [v.to_dict() for v in s.violations],
                    "violation_count": s.count,
                    "checked": s.checked,
                }
                for name, s in self.axioms.items()
            },
        }


def applicable_axioms(rule: str, instance: Instance) -> tuple[str, ...]:
    """VRC only concerns rules that allocate open and reserve seats together."""
    if rule in ("min-guarantee", "meritorious") or not instance.quotas.reserve_categories:
        return ("NJE", "NW", "MHR", "IC")
    return AXIOM_NAMES


def full_audit(
    rule: str,
    instance: Instance,
    scope: str = "single",
    orders: Orders = None,
    category: str = OPEN,
    bound: int = ALL_SUBSETS_BOUND,
    max_reported: int = MAX_REPORTED,
    axioms: Iterable[str] | None = None,
) -> AuditReport:
    if scope == "single":
        subsets = [instance.pool]
    elif scope == "all-subsets":
        if len(instance.pool) > bound:
            raise ContractError(
                f"all-subsets scope is limited to {bound} individuals (pool has {len(instance.pool)}); "
                "use --scope single or raise --max-individuals"
            )
        pool = list(instance.pool)
        subsets = [
            [pool[k] for k in range(len(pool)) if mask >> k & 1] for mask in range(1 << len(pool))
        ]
    else:
        raise ContractError(f"unknown scope {scope!r}")

    names = tuple(axioms) if axioms is not None else applicable_axioms(rule, instance)
    statuses = {a: AxiomStatus() for a in names}

    def record(a: str, found: list[AxiomViolation]) -> None:
        st = statuses[a]
        st.checked += 1
        st.count += len(found)
        room = max_reported - len(st.violations)
        st.violations.extend(found[:max(room, 0)])

    for members in subsets:
        sub = instance.subset(members)
        alloc = apply_rule(rule, sub, orders, category)
        for a in names:
            if a == "IC":
                record(a, check_incentive_compatibility(rule, sub, orders, category, baseline=alloc))
            else:
                record(a, REALIZED_CHECKS[a](alloc, sub.pool, sub.quotas))
    return AuditReport(rule, scope, statuses)
