import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from simkg import (
    Graph,
    Iri,
    RcRelation,
    Role,
    SimulationKind,
    check_axioms,
    convert_document,
    convert_entry,
    export_turtle,
    make_entity,
    parse_dictionary,
)
from simkg.dictionary import PHRASE_TABLE
from simkg.model import KB

HOOK = (FIXTURES / "hook.dict").read_text(encoding="utf-8")
BIRDS = (FIXTURES / "birds.dict").read_text(encoding="utf-8")


@pytest.fixture
def source():
    return make_entity("olderr", Role.SOURCE)


class TestParse:
    def test_hook_entry_shape(self):
        parsed = parse_dictionary("hook\n  attraction; deceitfulness\n  [Christian] Christ's power to draw souls\n  related to: crescent moon\n")
        assert parsed.errors == []
        assert len(parsed.entries) == 1
        entry = parsed.entries[0]
        assert entry.lemma == "hook"
        assert len(entry.clauses) == 3
        assert entry.clauses[0].meaning_terms == ("attraction", "deceitfulness")
        assert entry.clauses[1].context_labels == ("Christian",)
        assert entry.clauses[2].relation_phrase == "related to"
        assert entry.clauses[2].meaning_terms == ("crescent moon",)

    def test_empty_document(self):
        parsed = parse_dictionary("")
        assert parsed.entries == [] and parsed.errors == []

    def test_variant_block(self):
        parsed = parse_dictionary("bird\n  freedom\n  ~ night bird:\n    death\n")
        entry = parsed.entries[0]
        assert entry.variant_blocks == (("night bird", entry.variant_blocks[0][1]),)
        label, clauses = entry.variant_blocks[0]
        assert label == "night bird"
        assert clauses[0].meaning_terms == ("death",)

    def test_clause_after_variant_at_same_indent_belongs_to_entry(self):
        parsed = parse_dictionary("bird\n  ~ night bird:\n    death\n  freedom\n")
        entry = parsed.entries[0]
        assert [c.meaning_terms for c in entry.clauses] == [("freedom",)]
        assert entry.variant_blocks[0][1][0].meaning_terms == ("death",)

    def test_line_numbers_recorded(self):
        parsed = parse_dictionary("\nhook\n  attraction\n")
        assert parsed.entries[0].line == 2
        assert parsed.entries[0].clauses[0].line == 3

    @pytest.mark.parametrize(
        "doc, reason_part, line",
        [
            ("  orphan clause\nhook\n  fine\n", "before any lemma", 1),
            ("hook\n  [Christian meaning\n", "unclosed context bracket", 2),
            ("hook\n  related to:\n", "no meaning terms", 2),
            ("hook\n  ~ :\n", "variant block", 2),
            ("hook\n  : oops\n", "empty relation phrase", 2),
        ],
    )
    def test_errors_collected_with_line_numbers(self, doc, reason_part, line):
        parsed = parse_dictionary(doc)
        assert len(parsed.errors) == 1
        assert reason_part in parsed.errors[0].reason
        assert parsed.errors[0].line == line

    def test_recovery_continues_at_next_lemma(self):
        doc = "  stray\nhook\n  attraction\nrose\n  love\n"
        parsed = parse_dictionary(doc)
        assert [e.lemma for e in parsed.entries] == ["hook", "rose"]
        assert len(parsed.errors) == 1

    @given(st.text(max_size=300))
    @settings(max_examples=60)
    def test_parser_never_raises(self, doc):
        parse_dictionary(doc)


class TestConvert:
    def test_hook_conversion(self, source):
        parsed = parse_dictionary(HOOK)
        out = convert_entry(parsed.entries[0], source)
        assert out.warnings == []
        by_id = {s.id.local_name: s for s in out.simulations}
        assert set(by_id) == {
            "hook-attraction",
            "hook-deceitfulness",
            "hook-christsPowerToDrawSouls",
            "hook-crescentMoon",
            "hook-seaGods",
            "hookAndEye-connection",
        }
        assert by_id["hook-christsPowerToDrawSouls"].contexts[0].id.local_name == "christian"
        assert by_id["hook-crescentMoon"].kind is SimulationKind.RELATEDNESS
        assert by_id["hook-seaGods"].kind is SimulationKind.ATTRIBUTE
        assert by_id["hook-attraction"].contexts[0].id.local_name == "generalOrUnknown"
        assert len(out.variants) == 1
        assert out.variants[0].base.label == "hook"
        assert out.variants[0].variant.label == "hook and eye"

    def test_phrase_table_protection(self, source):
        parsed = parse_dictionary("agate\n  protection from: evil spirits\n")
        out = convert_entry(parsed.entries[0], source)
        sim = out.simulations[0]
        assert sim.kind is SimulationKind.PROTECTION
        assert sim.reality_counterparts == ((RcRelation.PREVENTED, sim.reality_counterparts[0][1]),)
        assert sim.reality_counterparts[0][1].id.local_name == "evilSpirits"

    def test_phrase_table_healing_and_charm(self, source):
        parsed = parse_dictionary("agate\n  cure for: fevers\n  charm for: healthy blood\n")
        out = convert_entry(parsed.entries[0], source)
        kinds = {s.id.local_name: (s.kind, s.reality_counterparts[0][0]) for s in out.simulations}
        assert kinds["agate-fevers"] == (SimulationKind.HEALING, RcRelation.HEALED)
        assert kinds["agate-healthyBlood"] == (SimulationKind.GENERIC, RcRelation.ELICITED)

    def test_olive_example(self, source):
        src = make_entity("dictionary of symbols 1", Role.SOURCE)
        parsed = parse_dictionary("olive\n  fertility\n")
        out = convert_entry(parsed.entries[0], src)
        sim = out.simulations[0]
        assert sim.id == Iri(KB + "olive-fertility")
        assert sim.sources[0].id.local_name == "dictionaryOfSymbols1"

    def test_unknown_phrase_demoted_with_warning(self, source):
        parsed = parse_dictionary("hook\n  reminiscent of: barbs\n")
        out = convert_entry(parsed.entries[0], source)
        assert len(out.warnings) == 1
        assert "unknown relation phrase" in out.warnings[0]
        assert out.simulations[0].kind is SimulationKind.GENERIC
        assert out.simulations[0].reality_counterparts[0][0] is RcRelation.HAS

    def test_custom_phrase_table(self, source):
        table = dict(PHRASE_TABLE)
        table["reminiscent of"] = (SimulationKind.ALLUSION, RcRelation.HAS)
        parsed = parse_dictionary("hook\n  reminiscent of: barbs\n")
        out = convert_entry(parsed.entries[0], source, phrase_table=table)
        assert out.warnings == []
        assert out.simulations[0].kind is SimulationKind.ALLUSION

    def test_every_simulation_passes_axioms(self, source):
        g = Graph()
        _, conv = convert_document(BIRDS, source)
        for sim in conv.simulations:
            g.insert_simulation(sim)
        for link in conv.variants:
            g.add_variant(link.base, link.variant)
        assert check_axioms(g) == []

    def test_simulation_count_by_brute_force(self, source):
        parsed = parse_dictionary(BIRDS)
        _, conv = convert_document(BIRDS, source)
        # independent recount: meaning terms per clause, variant blocks included
        expected = sum(
            len(clause.meaning_terms)
            for entry in parsed.entries
            for clause in entry.clauses + tuple(c for _, cs in entry.variant_blocks for c in cs)
        )
        assert len(conv.simulations) == expected

    def test_conversion_is_deterministic(self, source):
        def converted_bytes():
            g = Graph()
            _, conv = convert_document(BIRDS, source)
            for sim in conv.simulations:
                g.insert_simulation(sim)
            for link in conv.variants:
                g.add_variant(link.base, link.variant)
            return export_turtle(g)

        assert converted_bytes() == converted_bytes()
