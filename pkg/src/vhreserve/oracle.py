"""Brute-force reference computations for small instances.

Nothing here calls into ``matching`` or ``rules``: HR utilization is computed by
exhaustive search over trait assignments, independence through Hall's
condition, and the axioms straight from their definitions. These are the
yardsticks the fast code paths are tested against.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Collection, Iterable, Iterator, Mapping, Sequence

from .core import (
    OPEN,
    Allocation,
    CategoryQuota,
    ContractError,
    Individual,
    Instance,
    QuotaScheme,
    Selection,
    by_merit,
)

MAX_MATCHING_SIDE = 12
MAX_ENUMERATION = 10
MAX_MATROID_GROUND = 6
MAX_GREEDY_GROUND = 8

AXIOMS = ("NW", "NJE", "MHR", "VRC")


def brute_force_matching(graph) -> int:
    """Maximum matching size by exhaustive search over injective partial maps.

    ``graph`` needs ``left``, ``right`` and ``edges`` (left id -> right indices).
    Partial maps are explored left vertex by left vertex; the set of used right
    vertices is memoised, which keeps the search exhaustive but finite.
    """
    left, right = list(graph.left), list(graph.right)
    if len(left) > MAX_MATCHING_SIDE or len(right) > MAX_MATCHING_SIDE:
        raise ContractError(
            f"brute force limited to {MAX_MATCHING_SIDE}x{MAX_MATCHING_SIDE} graphs"
        )
    adj = [tuple(graph.edges.get(u, ())) for u in left]
    memo: dict[tuple[int, int], int] = {}

    def best(k: int, used: int) -> int:
        if k == len(left):
            return 0
        key = (k, used)
        if key not in memo:
            value = best(k + 1, used)
            for r in adj[k]:
                if not used >> r & 1:
                    value = max(value, 1 + best(k + 1, used | 1 << r))
            memo[key] = value
        return memo[key]

    return best(0, 0)


def utilization(individuals: Iterable[Individual], hr: Mapping[str, int]) -> int:
    """Max number of HR slots fillable, each person counting for at most one trait.

    Tracks every reachable vector of remaining per-trait capacity after each
    person either takes one of her traits or stays unmatched.
    """
    traits = [t for t, q in hr.items() if q > 0]
    start = tuple(hr[t] for t in traits)
    states = {start}
    for i in individuals:
        usable = [k for k, t in enumerate(traits) if t in i.traits]
        if not usable:
            continue
        nxt = set(states)
        for s in states:
            for k in usable:
                if s[k]:
                    nxt.add(s[:k] + (s[k] - 1,) + s[k + 1:])
        states = nxt
    return sum(start) - min(sum(s) for s in states)


def gale_dominates(x: Collection[str], y: Collection[str], merits: Mapping[str, float]) -> bool:
    """Positionwise merit dominance after sorting both sets by descending merit."""
    if len(x) < len(y):
        return False
    xs = sorted(x, key=lambda i: -merits[i])
    ys = sorted(y, key=lambda i: -merits[i])
    return all(a == b or merits[a] > merits[b] for a, b in zip(xs, ys))


def _subsets(items: Sequence) -> Iterator[frozenset]:
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass
class IndependenceOracle:
    ground: tuple[str, ...]
    predicate: Callable[[frozenset[str]], bool]
    _cache: dict = field(default_factory=dict, repr=False)

    def independent(self, x: Iterable[str]) -> bool:
        x = frozenset(x)
        if x not in self._cache:
            self._cache[x] = bool(self.predicate(x))
        return self._cache[x]

    def rank(self, x: Iterable[str]) -> int:
        x = sorted(x)
        for r in range(len(x), -1, -1):
            if any(self.independent(c) for c in itertools.combinations(x, r)):
                return r
        return 0

    @classmethod
    def transversal(cls, individuals: Iterable[Individual], hr: Mapping[str, int]) -> "IndependenceOracle":
        """Sets matchable into distinct HR slots, tested by Hall's condition.

        A set is independent iff for every group ``A`` of traits, the members
        whose usable traits all lie in ``A`` fit into ``A``'s slots.
        """
        individuals = list(individuals)
        usable = {i.id: frozenset(t for t in i.traits if hr.get(t, 0) > 0) for i in individuals}
        traits = [t for t, q in hr.items() if q > 0]
        groups = [frozenset(g) for g in _subsets(traits)]
        room = {g: sum(hr[t] for t in g) for g in groups}

        def hall(x: frozenset[str]) -> bool:
            return all(sum(usable[i] <= g for i in x) <= room[g] for g in groups)

        return cls(tuple(i.id for i in individuals), hall)

    @classmethod
    def free(cls, ground: Iterable[str]) -> "IndependenceOracle":
        return cls(tuple(ground), lambda x: True)

    @classmethod
    def rank_zero(cls, ground: Iterable[str]) -> "IndependenceOracle":
        return cls(tuple(ground), lambda x: not x)


def greedy_choice(oracle: IndependenceOracle, weights: Mapping[str, float], subset: Iterable[str]) -> frozenset[str]:
    """Repeatedly add the heaviest element that keeps the chosen set independent."""
    subset = list(subset)
    ws = [weights[e] for e in subset]
    if len(set(ws)) != len(ws):
        raise ContractError("greedy_choice needs distinct weights")
    chosen: frozenset[str] = frozenset()
    while True:
        options = [e for e in subset if e not in chosen and oracle.independent(chosen | {e})]
        if not options:
            return chosen
        chosen = chosen | {max(options, key=lambda e: weights[e])}


def check_matroid_axioms(oracle: IndependenceOracle) -> dict:
    """Exhaustively test M1-M3, B1, B2' and R1-R3; each entry is None or a counterexample."""
    ground = list(oracle.ground)
    if len(ground) > MAX_MATROID_GROUND:
        raise ContractError(f"matroid checks limited to {MAX_MATROID_GROUND} elements")
    subsets = list(_subsets(ground))
    indep = [x for x in subsets if oracle.independent(x)]
    indep_set = set(indep)
    report: dict[str, object] = {}

    report["M1"] = None if frozenset() in indep_set else "empty set is dependent"

    report["M2"] = None
    for m in indep:
        bad = next((m - {e} for e in m if m - {e} not in indep_set), None)
        if bad is not None:
            report["M2"] = {"independent": sorted(m), "dependent_subset": sorted(bad)}
            break

    report["M3"] = None
    for a, b in itertools.product(indep, indep):
        if len(a) < len(b) and not any(a | {e} in indep_set for e in b - a):
            report["M3"] = {"smaller": sorted(a), "larger": sorted(b)}
            break

    maximal = [m for m in indep if not any(m | {e} in indep_set for e in ground if e not in m)]
    report["B1"] = None if maximal else "no bases"
    report["B2'"] = None
    for b1, b2 in itertools.product(maximal, maximal):
        bases = set(maximal)
        for e1 in _subsets(sorted(b1 - b2)):
            if not any(
                (b1 - e1) | e2 in bases and (b2 - e2) | e1 in bases
                for e2 in _subsets(sorted(b2 - b1))
            ):
                report["B2'"] = {"B1": sorted(b1), "B2": sorted(b2), "E1": sorted(e1)}
                break
        if report["B2'"] is not None:
            break

    rank = {x: oracle.rank(x) for x in subsets}
    report["R1"] = next(({"X": sorted(x)} for x in subsets if not 0 <= rank[x] <= len(x)), None)
    report["R2"] = next(
        ({"X": sorted(x), "Y": sorted(y)} for x, y in itertools.product(subsets, subsets)
         if x <= y and rank[x] > rank[y]),
        None,
    )
    report["R3"] = next(
        ({"X": sorted(x), "Y": sorted(y)} for x, y in itertools.product(subsets, subsets)
         if rank[x | y] + rank[x & y] > rank[x] + rank[y]),
        None,
    )
    return report


def check_greedy_properties(oracle: IndependenceOracle, weights: Mapping[str, float]) -> dict:
    """Check, for every subset of the ground set, that the greedy choice
    Gale-dominates every independent subset (A.1), satisfies substitutes (A.2),
    and is independent, rank maximal and free of justified envy (A.3).

    Returns the first counterexample per property, or None.
    """
    ground = list(oracle.ground)
    if len(ground) > MAX_GREEDY_GROUND:
        raise ContractError(f"greedy checks limited to {MAX_GREEDY_GROUND} elements")
    report: dict[str, object] = {"gale": None, "substitutes": None, "independent": None,
                                 "rank_maximal": None, "no_justified_envy": None}
    greedy = {e: greedy_choice(oracle, weights, e) for e in _subsets(ground)}
    for sub, g in greedy.items():
        if report["gale"] is None:
            for y in _subsets(sorted(sub)):
                if oracle.independent(y) and not gale_dominates(g, y, weights):
                    report["gale"] = {"subset": sorted(sub), "greedy": sorted(g), "other": sorted(y)}
                    break
        if report["substitutes"] is None:
            for e in g:
                lost = next((e2 for e2 in sub if e2 != e and e not in greedy[sub - {e2}]), None)
                if lost is not None:
                    report["substitutes"] = {"subset": sorted(sub), "kept": e, "removed": lost}
                    break
        if report["independent"] is None and not oracle.independent(g):
            report["independent"] = {"subset": sorted(sub)}
        if report["rank_maximal"] is None and oracle.rank(g) != oracle.rank(sub):
            report["rank_maximal"] = {"subset": sorted(sub)}
        if report["no_justified_envy"] is None:
            for e in g:
                for e2 in sub - g:
                    if weights[e2] > weights[e] and oracle.rank((g - {e}) | {e2}) >= oracle.rank(g):
                        report["no_justified_envy"] = {"subset": sorted(sub), "chosen": e, "envious": e2}
    return report


class _Tables:
    """Bitmask view of a small instance: bit k is the k-th highest merit individual."""

    def __init__(self, instance: Instance):
        self.pool = list(instance.pool)
        self.quotas = instance.quotas
        self.n = len(self.pool)
        self.cats = self.quotas.vertical_categories
        self.cap = {v: self.quotas.capacity(v) for v in self.cats}
        self.hr = {v: self.quotas.hr(v) for v in self.cats}
        self.elig = {
            v: sum(1 << k for k, i in enumerate(self.pool) if i.eligible_for(v)) for v in self.cats
        }
        self._rank: dict[tuple[str, int], int] = {}

    def rank(self, v: str, mask: int) -> int:
        key = (v, mask)
        if key not in self._rank:
            self._rank[key] = utilization(
                (self.pool[k] for k in range(self.n) if mask >> k & 1), self.hr[v]
            )
        return self._rank[key]

    def mask(self, ids: Iterable[str]) -> int:
        ids = set(ids)
        return sum(1 << k for k, i in enumerate(self.pool) if i.id in ids)


def _bits(mask: int) -> Iterator[int]:
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def _violations(tab: _Tables, chosen: Mapping[str, int], axiom: str) -> Iterator[tuple]:
    """Yield every violation of one axiom for per-category choice masks."""
    everyone = (1 << tab.n) - 1
    assigned = 0
    for m in chosen.values():
        assigned |= m
    idle = everyone & ~assigned
    pool = tab.pool
    if axiom == "NW":
        for v, m in chosen.items():
            if bin(m).count("1") < tab.cap[v]:
                for j in _bits(idle & tab.elig[v]):
                    yield ("NW", v, pool[j].id)
    elif axiom == "MHR":
        for v, m in chosen.items():
            base = tab.rank(v, m)
            for j in _bits(idle & tab.elig[v]):
                if tab.rank(v, m | 1 << j) > base:
                    yield ("MHR", v, pool[j].id)
    elif axiom == "NJE":
        for v, m in chosen.items():
            base = tab.rank(v, m)
            for i in _bits(m):
                for j in _bits(idle & tab.elig[v] & ((1 << i) - 1)):
                    if tab.rank(v, (m & ~(1 << i)) | 1 << j) >= base:
                        yield ("NJE", v, pool[i].id, pool[j].id)
    elif axiom == "VRC":
        if OPEN not in chosen:
            return
        o = chosen[OPEN]
        base = tab.rank(OPEN, o)
        for c, m in chosen.items():
            if c == OPEN:
                continue
            for i in _bits(m):
                if bin(o).count("1") != tab.cap[OPEN]:
                    yield ("VRC", c, pool[i].id, 1, None)
                for j in _bits(o & ~((1 << (i + 1)) - 1)):
                    if not base > tab.rank(OPEN, (o & ~(1 << j)) | 1 << i):
                        yield ("VRC", c, pool[i].id, 2, pool[j].id)
                if tab.rank(OPEN, o | 1 << i) != base:
                    yield ("VRC", c, pool[i].id, 3, None)
    else:
        raise ContractError(f"unknown axiom {axiom!r}")


def allocation_violations(alloc: Allocation, instance: Instance, axioms: Iterable[str] = AXIOMS) -> set[tuple]:
    """All violations of the realized allocation, recomputed from the definitions."""
    tab = _Tables(instance)
    chosen = {v: tab.mask(sel.ids()) for v, sel in alloc.selections.items()}
    return {w for a in axioms for w in _violations(tab, chosen, a)}


def _satisfies(tab: _Tables, chosen: Mapping[str, int], axioms: Iterable[str]) -> bool:
    return all(next(_violations(tab, chosen, a), None) is None for a in axioms)


def enumerate_axiomatic_allocations(
    instance: Instance, axioms: Iterable[str] = AXIOMS, bound: int = MAX_ENUMERATION
) -> list[Allocation]:
    """Every feasible allocation satisfying the given axioms.

    Feasible means capacity- and eligibility-respecting with disjoint
    categories; each individual is left out or placed in one eligible category.
    """
    if len(instance.pool) > bound:
        raise ContractError(f"enumeration limited to {bound} individuals")
    axioms = tuple(axioms)
    tab = _Tables(instance)
    cats = [v for v in tab.cats if tab.cap[v] > 0]
    options = [[None] + [v for v in cats if tab.elig[v] >> k & 1] for k in range(tab.n)]
    survivors = []
    counts = dict.fromkeys(cats, 0)
    chosen = dict.fromkeys(tab.cats, 0)

    def walk(k: int) -> None:
        if k == tab.n:
            if _satisfies(tab, chosen, axioms):
                survivors.append(dict(chosen))
            return
        for v in options[k]:
            if v is None:
                walk(k + 1)
            elif counts[v] < tab.cap[v]:
                counts[v] += 1
                chosen[v] |= 1 << k
                walk(k + 1)
                chosen[v] &= ~(1 << k)
                counts[v] -= 1

    walk(0)
    return [
        Allocation(
            "oracle",
            {v: Selection(tuple(tab.pool[k] for k in _bits(m))) for v, m in masks.items()},
        )
        for masks in survivors
    ]


def maximally_accommodating_selections(
    v: str, individuals: Iterable[Individual], quotas: QuotaScheme
) -> list[frozenset[str]]:
    """Subsets within capacity that no unchosen individual could raise ``n^v`` for."""
    pool = by_merit(individuals)
    hr = quotas.hr(v)
    out = []
    for sub in _subsets(pool):
        if len(sub) > quotas.capacity(v):
            continue
        base = utilization(sub, hr)
        if all(utilization(sub | {j}, hr) == base for j in pool if j not in sub):
            out.append(frozenset(i.id for i in sub))
    return out


def random_quotas(
    rng: random.Random, n_categories: int, n_traits: int, max_total: int = 5, max_hr: int = 2
) -> QuotaScheme:
    """Random scheme that usually leaves at least one open seat."""
    traits = tuple(f"t{k + 1}" for k in range(n_traits))
    total = rng.randint(1, max(1, max_total))
    caps = []
    left = total
    for _ in range(n_categories):
        cap = rng.randint(0, min(max(left - 1, 0), 3))
        caps.append(cap)
        left -= cap

    def hr_for(cap: int) -> dict[str, int]:
        hr = {}
        room = cap
        for t in rng.sample(traits, len(traits)):
            q = rng.randint(0, min(room, max_hr))
            if q:
                hr[t] = q
                room -= q
        return {t: hr[t] for t in traits if t in hr}

    cats = tuple(CategoryQuota(f"c{k + 1}", cap, hr_for(cap)) for k, cap in enumerate(caps))
    return QuotaScheme(total, cats, hr_for(left), traits)


def random_individuals(
    rng: random.Random, n: int, quotas: QuotaScheme, overlapping: bool, trait_p: float = 0.5
) -> list[Individual]:
    cats = [None] + list(quotas.reserve_categories)
    merits = rng.sample(range(1, 10 * n + 10), n)
    out = []
    for k, m in enumerate(merits):
        if overlapping:
            traits = frozenset(t for t in quotas.traits if rng.random() < trait_p)
        else:
            traits = frozenset([rng.choice(quotas.traits)]) if quotas.traits and rng.random() < trait_p else frozenset()
        out.append(Individual(f"a{k + 1}", float(m), rng.choice(cats), traits))
    if overlapping and len(quotas.traits) > 1 and out and all(len(i.traits) < 2 for i in out):
        k = rng.randrange(len(out))
        out[k] = Individual(out[k].id, out[k].merit, out[k].category, frozenset(quotas.traits))
    return out


def random_instance(
    rng: random.Random,
    max_individuals: int = 7,
    max_categories: int = 2,
    max_traits: int = 2,
    overlapping: bool | None = None,
    min_individuals: int = 0,
) -> Instance:
    """Random small instance; ``overlapping=None`` picks the overlap class at random."""
    if overlapping is None:
        overlapping = rng.random() < 0.5
    n = rng.randint(min_individuals, max_individuals)
    # overlap needs two traits; otherwise the class collapses to the non-overlapping one
    n_traits = rng.randint(2 if overlapping and max_traits > 1 else 1, max_traits)
    # keep seats scarcer than applicants most of the time
    quotas = random_quotas(rng, rng.randint(0, max_categories), n_traits, max_total=max(1, n - 1))
    pool = random_individuals(rng, n, quotas, overlapping)
    return Instance(tuple(by_merit(pool)), quotas)


@dataclass(frozen=True)
class RandomGraph:
    left: tuple[str, ...]
    right: tuple[tuple[str, int], ...]
    edges: Mapping[str, tuple[int, ...]]


def random_graph(rng: random.Random, max_left: int = 10, max_right: int = 10) -> RandomGraph:
    n_left, n_right = rng.randint(0, max_left), rng.randint(0, max_right)
    p = rng.random()
    left = tuple(f"u{k}" for k in range(n_left))
    right = tuple(("s", k) for k in range(n_right))
    edges = {u: tuple(r for r in range(n_right) if rng.random() < p) for u in left}
    return RandomGraph(left, right, edges)
