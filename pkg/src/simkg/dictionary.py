"""Parser and converter for plain-text symbol dictionaries.

Format, one entry per lemma block::

    hook
      attraction; deceitfulness
      [Christian] Christ's power to draw souls
      related to: crescent moon
      ~ hook and eye:
        connection

A lemma starts at column 0.  Indented lines are clauses: an optional
bracketed context list, an optional relation phrase ending in ``:``, then
one or more meaning terms separated by ``;``.  A clause starting with
``~ <label>:`` opens a variant block whose more-indented clauses belong to
the variant.  Parsing recovers at the next lemma after an error and
collects every error instead of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .model import (
    CardinalityError,
    EmptyLabelError,
    Entity,
    RcRelation,
    Role,
    Simulation,
    SimulationKind,
    VariantLink,
    build_simulation,
    general_context,
    make_entity,
)

# Relation phrases recognized in clauses; a phrase selects the simulation
# kind and how the meaning term hangs off it.  Callers may pass their own
# table to convert_entry to extend or override these.
PHRASE_TABLE: dict[str, tuple[SimulationKind, RcRelation]] = {
    "related to": (SimulationKind.RELATEDNESS, RcRelation.HAS),
    "attribute of": (SimulationKind.ATTRIBUTE, RcRelation.HAS),
    "associated with": (SimulationKind.ASSOCIATION, RcRelation.HAS),
    "corresponds to": (SimulationKind.CORRESPONDENCE, RcRelation.HAS),
    "manifestation of": (SimulationKind.MANIFESTATION, RcRelation.HAS),
    "allusion to": (SimulationKind.ALLUSION, RcRelation.HAS),
    "emblem of": (SimulationKind.EMBLEMATIC, RcRelation.HAS),
    "protection from": (SimulationKind.PROTECTION, RcRelation.PREVENTED),
    "protection against": (SimulationKind.PROTECTION, RcRelation.PREVENTED),
    "cure for": (SimulationKind.HEALING, RcRelation.HEALED),
    "heals": (SimulationKind.HEALING, RcRelation.HEALED),
    "charm for": (SimulationKind.GENERIC, RcRelation.ELICITED),
    "restores": (SimulationKind.GENERIC, RcRelation.RESTORED),
    "eases": (SimulationKind.GENERIC, RcRelation.EASED),
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


@dataclass(frozen=True, slots=True)
class Clause:
    context_labels: tuple[str, ...]
    relation_phrase: Optional[str]
    meaning_terms: tuple[str, ...]
    line: int


@dataclass(frozen=True, slots=True)
class DictEntry:
    lemma: str
    clauses: tuple[Clause, ...]
    variant_blocks: tuple[tuple[str, tuple[Clause, ...]], ...]
    line: int


@dataclass(slots=True)
class ParsedDictionary:
    entries: list[DictEntry] = field(default_factory=list)
    errors: list[ParseError] = field(default_factory=list)


def parse_dictionary(text: str) -> ParsedDictionary:
    """Parse a whole document; entries and collected errors."""
    result = ParsedDictionary()
    lemma: Optional[str] = None
    lemma_line = 0
    clauses: list[Clause] = []
    variants: list[tuple[str, tuple[Clause, ...]]] = []
    variant_label: Optional[str] = None
    variant_indent = 0
    variant_clauses: list[Clause] = []
    skipping = False  # recovering from a bad block: ignore until the next lemma

    def close_variant() -> None:
        nonlocal variant_label, variant_clauses
        if variant_label is not None:
            variants.append((variant_label, tuple(variant_clauses)))
            variant_label = None
            variant_clauses = []

    def close_entry() -> None:
        nonlocal lemma, clauses, variants
        close_variant()
        if lemma is not None:
            result.entries.append(
                DictEntry(lemma=lemma, clauses=tuple(clauses), variant_blocks=tuple(variants), line=lemma_line)
            )
            lemma = None
            clauses = []
            variants = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        indent = len(raw) - len(raw.lstrip())
        stripped = raw.strip()
        if indent == 0:
            close_entry()
            lemma = stripped
            lemma_line = lineno
            skipping = False
            continue
        if skipping:
            continue
        if lemma is None:
            result.errors.append(ParseError("indented clause before any lemma", lineno))
            continue
        try:
            if stripped.startswith("~"):
                close_variant()
                header = stripped[1:].strip()
                if not header.endswith(":") or not header[:-1].strip():
                    raise ParseError("variant block must look like '~ <label>:'", lineno)
                variant_label = header[:-1].strip()
                variant_indent = indent
                continue
            clause = _parse_clause(stripped, lineno)
            if variant_label is not None and indent > variant_indent:
                variant_clauses.append(clause)
            else:
                close_variant()
                clauses.append(clause)
        except ParseError as err:
            result.errors.append(err)

    close_entry()
    return result


def _parse_clause(text: str, lineno: int) -> Clause:
    contexts: list[str] = []
    rest = text
    while rest.startswith("["):
        end = rest.find("]")
        if end < 0:
            raise ParseError("unclosed context bracket", lineno)
        contexts.extend(label.strip() for label in rest[1:end].split(",") if label.strip())
        rest = rest[end + 1:].strip()
    phrase: Optional[str] = None
    if ":" in rest:
        head, _, tail = rest.partition(":")
        if not head.strip():
            raise ParseError("empty relation phrase before ':'", lineno)
        phrase = head.strip()
        rest = tail
    terms = tuple(t.strip() for t in rest.split(";") if t.strip())
    if not terms:
        raise ParseError("clause has no meaning terms", lineno)
    return Clause(context_labels=tuple(contexts), relation_phrase=phrase, meaning_terms=terms, line=lineno)


@dataclass(slots=True)
class DictConversion:
    simulations: list[Simulation] = field(default_factory=list)
    variants: list[VariantLink] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def convert_entry(
    entry: DictEntry,
    source: Entity,
    phrase_table: Optional[Mapping[str, tuple[SimulationKind, RcRelation]]] = None,
) -> DictConversion:
    """Turn a parsed entry into simulations and variant links.

    One simulation per meaning term per clause; a clause without contexts
    falls back to the general-or-unknown context; an unrecognized relation
    phrase demotes the clause to a generic simulation and is reported in
    the warnings.
    """
    table = PHRASE_TABLE if phrase_table is None else phrase_table
    out = DictConversion()
    lemma_entity = make_entity(entry.lemma, Role.SIMULACRUM)
    _convert_clauses(lemma_entity, entry.clauses, source, table, out)
    for variant_label, variant_clauses in entry.variant_blocks:
        try:
            variant_entity = make_entity(variant_label, Role.SIMULACRUM)
        except EmptyLabelError:
            out.warnings.append(f"line {entry.line}: unusable variant label {variant_label!r}, block skipped")
            continue
        out.variants.append(VariantLink(base=lemma_entity, variant=variant_entity))
        _convert_clauses(variant_entity, variant_clauses, source, table, out)
    return out


def _convert_clauses(
    simulacrum: Entity,
    clauses: Iterable[Clause],
    source: Entity,
    table: Mapping[str, tuple[SimulationKind, RcRelation]],
    out: DictConversion,
) -> None:
    for clause in clauses:
        kind, relation = SimulationKind.GENERIC, RcRelation.HAS
        if clause.relation_phrase is not None:
            entry = table.get(clause.relation_phrase.lower())
            if entry is None:
                out.warnings.append(
                    f"line {clause.line}: unknown relation phrase {clause.relation_phrase!r}, treating as generic"
                )
            else:
                kind, relation = entry
        if clause.context_labels:
            contexts = [make_entity(label, Role.CONTEXT) for label in clause.context_labels]
        else:
            contexts = [general_context()]
        for term in clause.meaning_terms:
            try:
                rc = make_entity(term, Role.REALITY_COUNTERPART)
                out.simulations.append(build_simulation(kind, simulacrum, [(relation, rc)], contexts, [source]))
            except (EmptyLabelError, CardinalityError) as err:
                out.warnings.append(f"line {clause.line}: skipped meaning term {term!r} ({err})")


def convert_document(
    text: str,
    source: Entity,
    phrase_table: Optional[Mapping[str, tuple[SimulationKind, RcRelation]]] = None,
) -> tuple[ParsedDictionary, DictConversion]:
    """Parse and convert in one step; parse errors surface as warnings."""
    parsed = parse_dictionary(text)
    merged = DictConversion()
    merged.warnings.extend(f"line {e.line}: {e.reason}" for e in parsed.errors)
    for entry in parsed.entries:
        one = convert_entry(entry, source, phrase_table)
        merged.simulations.extend(one.simulations)
        merged.variants.extend(one.variants)
        merged.warnings.extend(one.warnings)
    return parsed, merged
