"""Indexed store of entities, simulations and variant links.

The store materializes the simulacrum->meaning edges eagerly on insert
(the composition of "is simulacrum of" with "has reality counterpart"),
so reads never pay for inference.  Mutation follows a single-writer,
multi-reader contract: all query methods are read-only.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

from .model import (
    CycleError,
    Entity,
    Iri,
    Literal,
    RcPair,
    RcRelation,
    Simulation,
    SimulationKind,
    VariantLink,
)

Triple = tuple[Iri, Iri, Union[Iri, Literal]]


class KindConflictError(ValueError):
    """The same simulation id was inserted with two different kinds."""

    def __init__(self, sim_id: Iri, existing: SimulationKind, incoming: SimulationKind):
        super().__init__(
            f"simulation {sim_id} already stored as {existing.value}, refusing to merge {incoming.value}"
        )
        self.sim_id = sim_id
        self.existing = existing
        self.incoming = incoming


class UnknownEntityError(KeyError):
    def __init__(self, iri: Iri):
        super().__init__(str(iri))
        self.iri = iri


@dataclass(frozen=True, slots=True)
class SourceStats:
    """One row of corpus statistics (per source, or the totals row)."""

    label: str
    n_simulacra: int
    n_rcs: int
    n_contexts: int
    n_simulations: int
    n_triples: int


@dataclass(frozen=True, slots=True)
class CorpusStats:
    rows: tuple[SourceStats, ...]
    total: SourceStats


def _min_label(a: str, b: str) -> str:
    # Label choice must not depend on insertion order.
    return a if a <= b else b


class Graph:
    """Entities, simulations and variants, with derived meaning edges."""

    def __init__(self) -> None:
        self.entities: dict[Iri, Entity] = {}
        self.simulations: dict[Iri, Simulation] = {}
        self.variant_edges: set[tuple[Iri, Iri]] = set()
        self.derived_meanings: set[tuple[Iri, Iri]] = set()
        # Anomalies recorded while loading foreign data; surfaced by the validator.
        self.kind_conflicts: dict[Iri, tuple[SimulationKind, SimulationKind]] = {}
        # Triples with predicates outside the schema, preserved for re-export.
        self.extra_triples: set[Triple] = set()

        self._variant_children: dict[Iri, set[Iri]] = defaultdict(set)
        self._sims_by_simulacrum: dict[Iri, set[Iri]] = defaultdict(set)
        self._sims_by_rc: dict[Iri, set[Iri]] = defaultdict(set)
        self._sims_by_context: dict[Iri, set[Iri]] = defaultdict(set)
        self._sims_by_source: dict[Iri, set[Iri]] = defaultdict(set)
        self._meanings_of: dict[Iri, set[Iri]] = defaultdict(set)

    # -- entities ---------------------------------------------------------

    def upsert_entity(self, e: Entity) -> Entity:
        """Merge an entity into the store by IRI: roles and external links
        union, label resolved order-independently."""
        current = self.entities.get(e.id)
        if current is None:
            self.entities[e.id] = e
            return e
        merged = Entity(
            id=current.id,
            label=_min_label(current.label, e.label),
            roles=current.roles | e.roles,
            external_links=current.external_links | e.external_links,
        )
        self.entities[e.id] = merged
        return merged

    def entity(self, ref: Union[Entity, Iri, str]) -> Entity:
        iri = ref.id if isinstance(ref, Entity) else Iri(ref)
        try:
            return self.entities[iri]
        except KeyError:
            raise UnknownEntityError(iri) from None

    # -- simulations ------------------------------------------------------

    def insert_simulation(self, s: Simulation) -> Simulation:
        """Insert or merge a simulation; returns the stored value.

        A simulation with the same id and kind absorbs the incoming
        contexts, reality counterparts and sources.  The same id with a
        different kind raises :class:`KindConflictError`.
        """
        existing = self.simulations.get(s.id)
        if existing is not None and existing.kind is not s.kind:
            raise KindConflictError(s.id, existing.kind, s.kind)
        self._store(s, existing)
        return self.simulations[s.id]

    def _insert_lenient(self, s: Simulation) -> None:
        """Import path: a kind conflict is recorded, not raised; the first
        stored kind wins."""
        existing = self.simulations.get(s.id)
        if existing is not None and existing.kind is not s.kind:
            self.kind_conflicts.setdefault(s.id, tuple(sorted((existing.kind, s.kind), key=lambda k: k.value)))
            s = replace(s, kind=existing.kind)
        self._store(s, existing)

    def _store(self, s: Simulation, existing: Optional[Simulation]) -> None:
        for e in s.member_entities():
            self.upsert_entity(e)
        if existing is None:
            stored = _canonical(s)
        else:
            stored = _canonical(
                replace(
                    existing,
                    simulacra=existing.simulacra + s.simulacra,
                    reality_counterparts=existing.reality_counterparts + s.reality_counterparts,
                    contexts=existing.contexts + s.contexts,
                    sources=existing.sources + s.sources,
                )
            )
        self.simulations[s.id] = stored
        for e in stored.simulacra:
            self._sims_by_simulacrum[e.id].add(stored.id)
        for _, rc in stored.reality_counterparts:
            self._sims_by_rc[rc.id].add(stored.id)
        for c in stored.contexts:
            self._sims_by_context[c.id].add(stored.id)
        for src in stored.sources:
            self._sims_by_source[src.id].add(stored.id)
        for a in stored.simulacra:
            for _, rc in stored.reality_counterparts:
                self.derived_meanings.add((a.id, rc.id))
                self._meanings_of[a.id].add(rc.id)

    # -- variants ---------------------------------------------------------

    def add_variant(self, base: Entity, variant: Entity) -> VariantLink:
        """Record base -> variant; refuses any link that closes a cycle."""
        link = VariantLink(base, variant)  # rejects self-loops
        if self._reaches(variant.id, base.id):
            raise CycleError(f"variant link {base.id} -> {variant.id} closes a cycle")
        self.upsert_entity(base)
        self.upsert_entity(variant)
        self._add_variant_edge(base.id, variant.id)
        return link

    def _add_variant_edge(self, base: Iri, variant: Iri) -> None:
        self.variant_edges.add((base, variant))
        self._variant_children[base].add(variant)

    def _reaches(self, start: Iri, goal: Iri) -> bool:
        if start == goal:
            return True
        stack, seen = [start], {start}
        while stack:
            node = stack.pop()
            for child in self._variant_children.get(node, ()):
                if child == goal:
                    return True
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return False

    def variant_closure(self, ref: Union[Entity, Iri, str]) -> set[Entity]:
        """All transitive variants of an entity (the entity itself excluded)."""
        root = self.entity(ref).id
        found: set[Iri] = set()
        stack = [root]
        while stack:
            node = stack.pop()
            for child in self._variant_children.get(node, ()):
                if child not in found and child != root:
                    found.add(child)
                    stack.append(child)
        return {self.entities[i] for i in found}

    # -- queries used across modules ---------------------------------------

    def simulations_with_simulacrum(self, iri: Iri) -> set[Iri]:
        return self._sims_by_simulacrum.get(iri, set())

    def simulations_with_rc(self, iri: Iri) -> set[Iri]:
        return self._sims_by_rc.get(iri, set())

    def simulations_with_context(self, iri: Iri) -> set[Iri]:
        return self._sims_by_context.get(iri, set())

    def simulations_with_source(self, iri: Iri) -> set[Iri]:
        return self._sims_by_source.get(iri, set())

    def meanings_of(self, iri: Iri) -> set[Iri]:
        return self._meanings_of.get(iri, set())

    # -- statistics ---------------------------------------------------------

    def stats(self) -> CorpusStats:
        """Distinct element counts per source plus a deduplicated totals row.

        ``n_triples`` is defined operationally: the number of statements the
        Turtle exporter emits for that source's subgraph (for the totals row,
        for the whole graph).
        """
        rows = []
        source_ids = sorted(
            self._sims_by_source,
            key=lambda i: (self.entities[i].label, i),
        )
        for src in source_ids:
            sim_ids = sorted(self._sims_by_source[src])
            rows.append(self._stats_row(self.entities[src].label, [self.simulations[i] for i in sim_ids]))
        total = self._stats_row("Total", list(self.simulations.values()), whole_graph=True)
        return CorpusStats(rows=tuple(rows), total=total)

    def _stats_row(self, label: str, sims: list[Simulation], whole_graph: bool = False) -> SourceStats:
        simulacra: set[Iri] = set()
        rcs: set[Iri] = set()
        contexts: set[Iri] = set()
        members: set[Iri] = set()
        n_triples = 0
        for s in sims:
            simulacra.update(e.id for e in s.simulacra)
            rcs.update(e.id for _, e in s.reality_counterparts)
            contexts.update(e.id for e in s.contexts)
            members.update(e.id for e in s.member_entities())
            n_triples += (
                1  # rdf:type
                + len(s.simulacra)
                + len(s.reality_counterparts)
                + len(s.contexts)
                + len(s.sources)
            )
        if whole_graph:
            entity_ids: Iterable[Iri] = self.entities
            n_triples += sum(1 for b, v in self.variant_edges)
            n_triples += len(self.extra_triples)
        else:
            entity_ids = sorted(members)
            n_triples += sum(1 for b, v in self.variant_edges if b in members and v in members)
        for eid in entity_ids:
            e = self.entities[eid]
            n_triples += 1 + len(e.roles) + len(e.external_links)
        return SourceStats(
            label=label,
            n_simulacra=len(simulacra),
            n_rcs=len(rcs),
            n_contexts=len(contexts),
            n_simulations=len(sims),
            n_triples=n_triples,
        )

    # -- equality -----------------------------------------------------------

    def _projection(self):
        sims = {
            s.id: (
                s.kind,
                frozenset(e.id for e in s.simulacra),
                frozenset((rel, e.id) for rel, e in s.reality_counterparts),
                frozenset(e.id for e in s.contexts),
                frozenset(e.id for e in s.sources),
            )
            for s in self.simulations.values()
        }
        return (
            self.entities,
            sims,
            frozenset(self.variant_edges),
            frozenset(self.extra_triples),
            self.kind_conflicts,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._projection() == other._projection()

    def __repr__(self) -> str:
        return (
            f"Graph(entities={len(self.entities)}, simulations={len(self.simulations)}, "
            f"variants={len(self.variant_edges)})"
        )


def _canonical(s: Simulation) -> Simulation:
    """Normalize member order so merged graphs compare equal regardless of
    the order simulations arrived in."""
    rc_rank = {rel: i for i, rel in enumerate(RcRelation)}
    return replace(
        s,
        simulacra=_dedupe_sorted(s.simulacra),
        reality_counterparts=tuple(
            sorted(_dedupe_rc(s.reality_counterparts), key=lambda p: (rc_rank[p[0]], p[1].id))
        ),
        contexts=_dedupe_sorted(s.contexts),
        sources=_dedupe_sorted(s.sources),
    )


def _dedupe_sorted(entities: tuple[Entity, ...]) -> tuple[Entity, ...]:
    by_id: dict[Iri, Entity] = {}
    for e in entities:
        by_id.setdefault(e.id, e)
    return tuple(by_id[i] for i in sorted(by_id))


def _dedupe_rc(pairs: tuple[RcPair, ...]) -> list[RcPair]:
    seen: set[tuple[RcRelation, Iri]] = set()
    out: list[RcPair] = []
    for rel, e in pairs:
        if (rel, e.id) not in seen:
            seen.add((rel, e.id))
            out.append((rel, e))
    return out
