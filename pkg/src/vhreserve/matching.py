"""HR graphs and maximum-cardinality trait-matchings.

Each category ``v`` gets a bipartite graph between eligible individuals and
its HR-protected slots; an individual is adjacent to every slot of each trait
she holds. The maximum matching size is the HR-maximality value ``n^v``.

Matchings are grown one left vertex at a time by augmenting-path search
(Kuhn's algorithm), scanning vertices and neighbours in their listed order so
that witnesses are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import ContractError, Individual, QuotaScheme, TraitMatching, by_merit

Slot = tuple[str, int]


@dataclass(frozen=True)
class HRGraph:
    category: str
    left: tuple[str, ...]
    right: tuple[Slot, ...]
    edges: Mapping[str, tuple[int, ...]]

    def neighbors(self, ident: str) -> tuple[int, ...]:
        return self.edges.get(ident, ())


def _slots(hr: Mapping[str, int]) -> tuple[Slot, ...]:
    return tuple((t, k) for t, q in hr.items() for k in range(q))


def _adjacency(traits: Iterable[str], slots: tuple[Slot, ...]) -> tuple[int, ...]:
    traits = set(traits)
    return tuple(s for s, (t, _) in enumerate(slots) if t in traits)


def build_hr_graph(v: str, individuals: Iterable[Individual], quotas: QuotaScheme) -> HRGraph:
    individuals = by_merit(individuals)
    bad = [i.id for i in individuals if not i.eligible_for(v)]
    if bad:
        raise ContractError(f"not eligible for category {v}: {bad}")
    right = _slots(quotas.hr(v))
    edges = {i.id: _adjacency(i.traits, right) for i in individuals}
    return HRGraph(v, tuple(i.id for i in individuals), right, edges)


class AugmentingMatcher:
    """Incrementally maintained maximum matching into a fixed slot list.

    ``add`` inserts a new left vertex and reports whether an augmenting path
    from it exists; if not, the matching is left untouched, so the matched
    set stays maximum for everything added so far.
    """

    def __init__(self, right: tuple[Slot, ...]):
        self.right = right
        self.owner: list[str | None] = [None] * len(right)
        self.match: dict[str, int] = {}
        self.adj: dict[str, tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.match)

    def _augment(self, u: str, visited: list[bool]) -> bool:
        for s in self.adj[u]:
            if visited[s]:
                continue
            visited[s] = True
            other = self.owner[s]
            if other is None or self._augment(other, visited):
                self.owner[s] = u
                self.match[u] = s
                return True
        return False

    def can_add(self, ident: str, neighbors: tuple[int, ...]) -> bool:
        """Test for an augmenting path from a not-yet-added vertex without committing."""
        if not neighbors or len(self.match) == len(self.right):
            return False
        owner, match = list(self.owner), dict(self.match)
        self.adj[ident] = neighbors
        found = self._augment(ident, [False] * len(self.right))
        self.owner, self.match = owner, match
        del self.adj[ident]
        return found

    def add(self, ident: str, neighbors: tuple[int, ...]) -> bool:
        self.adj[ident] = neighbors
        if not neighbors or len(self.match) == len(self.right):
            return False
        return self._augment(ident, [False] * len(self.right))

    def _interchangeable(self) -> set[str]:
        """Traits whose slots every vertex sees either all or none of."""
        groups: dict[str, set[int]] = {}
        for k, (t, _) in enumerate(self.right):
            groups.setdefault(t, set()).add(k)
        ok = set(groups)
        for nbrs in self.adj.values():
            seen = set(nbrs)
            for t in list(ok):
                hit = groups[t] & seen
                if hit and hit != groups[t]:
                    ok.discard(t)
        return ok

    def matching(self) -> TraitMatching:
        # interchangeable slots are handed out by insertion (merit) order so
        # the witness does not depend on the augmenting-path history
        canonical = self._interchangeable()
        used: dict[str, int] = {}
        out = {}
        for u in self.adj:
            if u not in self.match:
                continue
            t, k = self.right[self.match[u]]
            if t in canonical:
                k = used.get(t, 0)
                used[t] = k + 1
            out[u] = (t, k)
        return TraitMatching(out)


def max_trait_matching(graph: HRGraph) -> TraitMatching:
    matcher = AugmentingMatcher(graph.right)
    for u in graph.left:
        matcher.add(u, graph.neighbors(u))
    return matcher.matching()


def _matcher_for(v: str, individuals: Iterable[Individual], quotas: QuotaScheme) -> tuple[AugmentingMatcher, HRGraph]:
    graph = build_hr_graph(v, individuals, quotas)
    matcher = AugmentingMatcher(graph.right)
    for u in graph.left:
        matcher.add(u, graph.neighbors(u))
    return matcher, graph


def hr_utilization(v: str, individuals: Iterable[Individual], quotas: QuotaScheme) -> int:
    """Maximum number of category-``v`` HR slots the given individuals can fill."""
    return len(max_trait_matching(build_hr_graph(v, individuals, quotas)))


def increases_hr_utilization(
    v: str, base: Iterable[Individual], candidate: Individual, quotas: QuotaScheme
) -> bool:
    """True iff adding ``candidate`` to ``base`` raises ``n^v`` by one."""
    base = list(base)
    if any(i.id == candidate.id for i in base):
        raise ContractError(f"{candidate.id} is already in the base set")
    if not candidate.eligible_for(v):
        raise ContractError(f"{candidate.id} not eligible for category {v}")
    matcher, graph = _matcher_for(v, base, quotas)
    return matcher.can_add(candidate.id, _adjacency(candidate.traits, graph.right))


def closed_form_utilization(individuals: Iterable[Individual], hr: Mapping[str, int]) -> int:
    """``sum_t min(#holders of t, q_t)``; equals ``n^v`` when nobody holds two traits."""
    individuals = list(individuals)
    if any(len(i.traits) > 1 for i in individuals):
        raise ContractError("closed form only holds when nobody has more than one trait")
    return sum(min(sum(t in i.traits for i in individuals), q) for t, q in hr.items())
