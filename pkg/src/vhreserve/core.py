"""Domain types, validation and file ingestion for applicant pools and quota schemes."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

OPEN = "open"


class ReservationError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ReservationError):
    """An input document could not be read."""


class ValidationError(ReservationError):
    """Input data violates a model invariant."""


class ContractError(ReservationError):
    """A function was called outside its documented preconditions."""


class InvariantError(ReservationError):
    """An internal result broke an invariant that should always hold."""


@dataclass(frozen=True)
class Individual:
    id: str
    merit: float
    category: str | None = None
    traits: frozenset[str] = frozenset()

    def __post_init__(self):
        if not isinstance(self.traits, frozenset):
            object.__setattr__(self, "traits", frozenset(self.traits))

    def eligible_for(self, v: str) -> bool:
        return v == OPEN or self.category == v

    @property
    def privileges(self) -> int:
        """Number of declared reserve-eligible privileges (category plus traits)."""
        return len(self.traits) + (self.category is not None)


def by_merit(individuals: Iterable[Individual]) -> list[Individual]:
    """Sort individuals by descending merit."""
    return sorted(individuals, key=lambda i: -i.merit)


@dataclass(frozen=True)
class CategoryQuota:
    name: str
    capacity: int
    hr: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class QuotaScheme:
    """Vertical capacities and per-category horizontal minimums.

    ``traits`` fixes the declared trait order, which is also the canonical
    order of HR slots in every category.
    """

    total: int
    categories: tuple[CategoryQuota, ...]
    open_hr: Mapping[str, int]
    traits: tuple[str, ...]

    def __post_init__(self):
        if self.total < 1:
            raise ValidationError(f"total must be a positive integer, got {self.total}")
        names = [c.name for c in self.categories]
        if OPEN in names:
            raise ValidationError(f"{OPEN!r} is reserved and cannot be a category name")
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate category names: {names}")
        if len(set(self.traits)) != len(self.traits):
            raise ValidationError(f"duplicate trait names: {list(self.traits)}")
        for c in self.categories:
            if c.capacity < 0:
                raise ValidationError(f"category {c.name}: negative capacity {c.capacity}")
        reserved = sum(c.capacity for c in self.categories)
        if reserved > self.total:
            raise ValidationError(
                f"sum of category capacities ({reserved}) exceeds total positions ({self.total})"
            )
        universe = set(self.traits)
        for v in self.vertical_categories:
            raw = self.open_hr if v == OPEN else self._category(v).hr
            unknown = sorted(set(raw) - universe)
            if unknown:
                raise ValidationError(f"category {v}: unknown traits in hr quotas: {unknown}")
            if any(q < 0 for q in raw.values()):
                raise ValidationError(f"category {v}: negative hr quota")
            hr = self.hr(v)
            if sum(hr.values()) > self.capacity(v):
                raise ValidationError(
                    f"category {v}: hr quotas ({sum(hr.values())}) exceed capacity ({self.capacity(v)})"
                )

    @property
    def open_capacity(self) -> int:
        return self.total - sum(c.capacity for c in self.categories)

    @property
    def reserve_categories(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories)

    @property
    def vertical_categories(self) -> tuple[str, ...]:
        return (OPEN,) + self.reserve_categories

    def _category(self, v: str) -> CategoryQuota:
        for c in self.categories:
            if c.name == v:
                return c
        raise ValidationError(f"unknown category {v!r}")

    def capacity(self, v: str) -> int:
        if v == OPEN:
            return self.open_capacity
        return self._category(v).capacity

    def hr(self, v: str) -> dict[str, int]:
        """Positive HR quotas of category ``v``, in declared trait order."""
        raw = self.open_hr if v == OPEN else self._category(v).hr
        return {t: raw[t] for t in self.traits if raw.get(t, 0) > 0}

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "categories": [
                {"name": c.name, "capacity": c.capacity, "hr": dict(c.hr)} for c in self.categories
            ],
            "open": {"hr": dict(self.open_hr)},
            "traits": list(self.traits),
        }


@dataclass(frozen=True)
class Instance:
    """A validated applicant pool together with its quota scheme.

    The pool is stored in descending merit order.
    """

    pool: tuple[Individual, ...]
    quotas: QuotaScheme

    @property
    def overlap_class(self) -> str:
        if all(len(i.traits) <= 1 for i in self.pool):
            return "non-overlapping"
        return "overlapping"

    @property
    def overlapping(self) -> bool:
        return self.overlap_class == "overlapping"

    def ids(self) -> list[str]:
        return [i.id for i in self.pool]

    def get(self, ident: str) -> Individual:
        for i in self.pool:
            if i.id == ident:
                return i
        raise KeyError(ident)

    def eligible(self, v: str) -> tuple[Individual, ...]:
        return tuple(i for i in self.pool if i.eligible_for(v))

    def members(self, c: str) -> tuple[Individual, ...]:
        return tuple(i for i in self.pool if i.category == c)

    def general(self) -> tuple[Individual, ...]:
        return tuple(i for i in self.pool if i.category is None)

    def subset(self, individuals: Iterable[Individual]) -> "Instance":
        """Restrict to a subset of the pool; no re-validation is needed."""
        return Instance(tuple(by_merit(individuals)), self.quotas)

    def replace(self, individual: Individual) -> "Instance":
        """Swap in a re-declared version of an individual with the same id."""
        pool = [individual if i.id == individual.id else i for i in self.pool]
        return Instance(tuple(pool), self.quotas)


@dataclass(frozen=True)
class TraitMatching:
    """Injective assignment of individual ids to HR slots ``(trait, index)``."""

    assignment: Mapping[str, tuple[str, int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.assignment)

    def traits(self) -> dict[str, str]:
        return {i: slot[0] for i, slot in self.assignment.items()}


@dataclass(frozen=True)
class Selection:
    """Outcome of a single-category choice rule, in descending merit order."""

    chosen: tuple[Individual, ...]
    witness: TraitMatching = TraitMatching()

    def ids(self) -> frozenset[str]:
        return frozenset(i.id for i in self.chosen)


@dataclass(frozen=True)
class Allocation:
    """Per-category selections produced by a choice rule.

    ``selections`` only holds the categories the rule governs; single-category
    rules fill one entry.
    """

    rule: str
    selections: Mapping[str, Selection]

    def chosen(self, v: str) -> tuple[Individual, ...]:
        sel = self.selections.get(v)
        return sel.chosen if sel else ()

    def aggregate(self) -> frozenset[str]:
        return frozenset(i.id for sel in self.selections.values() for i in sel.chosen)

    def as_sets(self) -> dict[str, frozenset[str]]:
        return {v: sel.ids() for v, sel in self.selections.items()}

    def check(self, pool: Iterable[Individual], quotas: QuotaScheme) -> None:
        """Raise InvariantError unless the allocation is a valid outcome for ``pool``."""
        pool_ids = {i.id: i for i in pool}
        seen: set[str] = set()
        for v, sel in self.selections.items():
            if len(sel.chosen) > quotas.capacity(v):
                raise InvariantError(f"{self.rule}: category {v} over capacity")
            for i in sel.chosen:
                if i.id not in pool_ids:
                    raise InvariantError(f"{self.rule}: {i.id} selected but not in pool")
                if not pool_ids[i.id].eligible_for(v):
                    raise InvariantError(f"{self.rule}: {i.id} not eligible for {v}")
                if i.id in seen:
                    raise InvariantError(f"{self.rule}: {i.id} selected in two categories")
                seen.add(i.id)
            chosen_ids = sel.ids()
            if not set(sel.witness.assignment) <= chosen_ids:
                raise InvariantError(f"{self.rule}: witness of {v} matches unselected individuals")

    def to_dict(self, pool: Sequence[Individual]) -> dict:
        chosen = self.aggregate()
        return {
            "rule": self.rule,
            "categories": {
                v: {
                    "selected": [i.id for i in sel.chosen],
                    "trait_matching": dict(sorted(sel.witness.traits().items())),
                }
                for v, sel in self.selections.items()
            },
            "unassigned": [i.id for i in by_merit(pool) if i.id not in chosen],
        }


def _check_distinct_merits(pool: Sequence[Individual]) -> None:
    seen: dict[float, str] = {}
    for i in pool:
        if i.merit in seen:
            raise ValidationError(f"duplicate merit {i.merit} for {seen[i.merit]} and {i.id}")
        seen[i.merit] = i.id


def break_ties_by_id(pool: Iterable[Individual]) -> list[Individual]:
    """Make merits distinct by nudging tied scores down in lexicographic id order.

    Within a tie group the lexicographically smallest id keeps its score; each
    following id is moved one float ulp below the previous one.
    """
    pool = list(pool)
    groups: dict[float, list[Individual]] = {}
    for i in pool:
        groups.setdefault(i.merit, []).append(i)
    taken = set(groups)
    replaced: dict[str, Individual] = {}
    for merit, group in groups.items():
        if len(group) < 2:
            continue
        logger.warning("tie-break id-lex: %d applicants share merit %s", len(group), merit)
        current = merit
        for i in sorted(group, key=lambda x: x.id)[1:]:
            current = math.nextafter(current, -math.inf)
            if current in taken or current < 0:
                raise ValidationError(f"cannot break tie at merit {merit} without a collision")
            taken.add(current)
            replaced[i.id] = Individual(i.id, current, i.category, i.traits)
    return [replaced.get(i.id, i) for i in pool]


APPLICANT_HEADER = ["id", "merit", "category", "traits"]


def parse_applicants(text: str, tie_break: str | None = None) -> list[Individual]:
    """Read the applicant CSV format (``id,merit,category,traits``)."""
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    rows = list(reader)
    if not rows or [h.strip() for h in rows[0]] != APPLICANT_HEADER:
        raise ParseError("line 1: expected header 'id,merit,category,traits'")
    pool: list[Individual] = []
    ids: dict[str, int] = {}
    merits: dict[float, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields, got {len(row)}")
        ident, merit_s, category, traits_s = (cell.strip() for cell in row)
        if not ident:
            raise ParseError(f"line {lineno}: empty id")
        try:
            merit = float(merit_s)
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric merit {merit_s!r}") from None
        if not math.isfinite(merit) or merit < 0:
            raise ParseError(f"line {lineno}: merit must be a nonnegative number")
        if ident in ids:
            raise ParseError(f"line {lineno}: duplicate id {ident!r} (first at line {ids[ident]})")
        if merit in merits and tie_break is None:
            raise ParseError(f"duplicate merit at line {lineno} (same as line {merits[merit]})")
        ids[ident] = lineno
        merits.setdefault(merit, lineno)
        traits = frozenset(t for t in traits_s.split("|") if t) if traits_s else frozenset()
        pool.append(Individual(ident, merit, category or None, traits))
    if tie_break == "id-lex":
        pool = break_ties_by_id(pool)
    elif tie_break is not None:
        raise ParseError(f"unknown tie-break mode {tie_break!r}")
    return pool


def serialize_applicants(pool: Iterable[Individual]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(APPLICANT_HEADER)
    for i in pool:
        writer.writerow([i.id, repr(i.merit), i.category or "", "|".join(sorted(i.traits))])
    return out.getvalue()


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def quotas_from_dict(doc: Mapping) -> QuotaScheme:
    if not isinstance(doc, Mapping):
        raise ValidationError("quota config must be a JSON object")
    if "total" not in doc:
        raise ValidationError("quota config: missing 'total'")
    total = _int(doc["total"], "total")
    categories = []
    for k, c in enumerate(doc.get("categories", [])):
        if not isinstance(c, Mapping) or "name" not in c:
            raise ValidationError(f"categories[{k}]: expected an object with a 'name'")
        hr = {str(t): _int(q, f"categories[{k}].hr.{t}") for t, q in c.get("hr", {}).items()}
        categories.append(CategoryQuota(str(c["name"]), _int(c.get("capacity", 0), f"categories[{k}].capacity"), hr))
    open_hr = {str(t): _int(q, f"open.hr.{t}") for t, q in doc.get("open", {}).get("hr", {}).items()}
    if "traits" in doc:
        traits = tuple(str(t) for t in doc["traits"])
    else:
        # no declared universe: collect in order of first appearance
        seen: dict[str, None] = {}
        for t in open_hr:
            seen.setdefault(t, None)
        for c in categories:
            for t in c.hr:
                seen.setdefault(t, None)
        traits = tuple(seen)
    return QuotaScheme(total, tuple(categories), open_hr, traits)


def parse_quotas(text: str) -> QuotaScheme:
    """Read and validate the quota JSON format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return quotas_from_dict(doc)


def serialize_quotas(quotas: QuotaScheme) -> str:
    return json.dumps(quotas.to_dict(), indent=2) + "\n"


def validate_instance(pool: Iterable[Individual], quotas: QuotaScheme) -> Instance:
    pool = list(pool)
    problems = []
    ids = [i.id for i in pool]
    if any(not ident for ident in ids):
        problems.append("empty id")
    dup = sorted({x for x in ids if ids.count(x) > 1})
    if dup:
        problems.append(f"duplicate ids: {dup}")
    declared = set(quotas.reserve_categories)
    universe = set(quotas.traits)
    for i in pool:
        if i.merit < 0:
            problems.append(f"{i.id}: negative merit")
        if i.category is not None and i.category not in declared:
            problems.append(f"{i.id}: undeclared category {i.category!r}")
        extra = sorted(i.traits - universe)
        if extra:
            problems.append(f"{i.id}: undeclared traits {extra}")
    if problems:
        raise ValidationError("; ".join(problems))
    _check_distinct_merits(pool)
    return Instance(tuple(by_merit(pool)), quotas)


def load_instance(applicants: str, quotas: str, tie_break: str | None = None) -> Instance:
    """Parse and validate the text of an applicant CSV and a quota JSON document."""
    return validate_instance(parse_applicants(applicants, tie_break), parse_quotas(quotas))
