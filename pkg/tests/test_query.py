import random

import pytest

from graphgen import random_graph
from simkg import (
    CqId,
    Graph,
    Iri,
    MissingBindingError,
    RcRelation,
    Role,
    SimulationKind,
    UnknownEntityError,
    build_simulation,
    make_entity,
    run_cq,
    symbolic_meanings,
)
from simkg.model import KB


def kb(local):
    return Iri(KB + local)


class TestCqSemantics:
    def test_q1_1_rcs_of_simulacrum(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q1_1, {"simulacrum": kb("olive")})
        assert [r["rc"] for r in rows] == [kb("fertility"), kb("immortality")]

    def test_q1_2_simulations_in_context(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q1_2, {"context": kb("hindu")})
        assert [r["simulation"] for r in rows] == [kb("owl-death")]

    def test_q1_3_participation_either_side(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q1_3, {"entity": kb("death")})
        assert [r["simulation"] for r in rows] == [kb("nightBird-death"), kb("owl-death")]

    def test_q1_4_simulacra_sharing_rc(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q1_4, {"rc": kb("death")})
        assert [(r["simulacrum"].local_name, r["context"].local_name) for r in rows] == [
            ("nightBird", "generalOrUnknown"),
            ("owl", "hindu"),
            ("owl", "japanese"),
            ("owl", "mayan"),
        ]

    def test_q1_5_negative(self, toy_graph):
        assert run_cq(toy_graph, CqId.Q1_5) == []

    def test_q2_2_same_simulacrum_different_sources(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q2_2)
        assert [tuple(v.local_name for v in r.values()) for r in rows] == [
            ("olive-fertility", "fertility", "dictionaryOfSymbols1"),
            ("olive-immortality", "immortality", "dictionaryOfSymbols2"),
        ]

    def test_q2_1_bound_variant_of_q2_2(self, toy_graph):
        assert run_cq(toy_graph, CqId.Q2_1, {"simulacrum": kb("olive")}) == run_cq(toy_graph, CqId.Q2_2)
        assert run_cq(toy_graph, CqId.Q2_1, {"simulacrum": kb("agate")}) == []

    def test_q2_3_sources_of_simulation(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q2_3, {"simulation": kb("olive-fertility")})
        assert [r["source"] for r in rows] == [kb("dictionaryOfSymbols1")]

    def test_q2_4_negative(self, toy_graph):
        assert run_cq(toy_graph, CqId.Q2_4) == []

    def test_q3_1_variants(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q3_1, {"entity": kb("bird")})
        assert [r["variant"] for r in rows] == [kb("nightBird")]

    def test_q3_2_includes_variant_meanings(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q3_2, {"simulacrum": kb("bird")})
        assert [r["rc"] for r in rows] == [kb("death")]

    def test_q3_3_protection(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q3_3)
        assert [(r["simulation"].local_name, r["rc"].local_name) for r in rows] == [
            ("agate-evilSpirits", "evilSpirits")
        ]

    def test_q3_4_additional_rcs_with_relation_names(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q3_4, {"rc": kb("charm")})
        assert [tuple(v.local_name for v in r.values()) for r in rows] == [
            ("agate-charm-healthyBlood", "charm", "hasRealityCounterpart"),
            ("agate-charm-healthyBlood", "healthyBlood", "elicitedRealityCounterpart"),
        ]

    def test_q3_4_single_rc_simulation_excluded(self, toy_graph):
        assert run_cq(toy_graph, CqId.Q3_4, {"rc": kb("fertility")}) == []

    def test_q3_5_healing_tuples(self, toy_graph):
        rows = run_cq(toy_graph, CqId.Q3_5)
        assert [tuple(v.local_name for v in r.values()) for r in rows] == [
            ("amethyst-drunkenness", "amethyst", "greek", "drunkenness")
        ]


class TestBindingsAndErrors:
    def test_missing_binding(self, toy_graph):
        with pytest.raises(MissingBindingError):
            run_cq(toy_graph, CqId.Q1_1)

    def test_unknown_entity(self, toy_graph):
        with pytest.raises(UnknownEntityError):
            run_cq(toy_graph, CqId.Q1_1, {"simulacrum": kb("ghost")})

    def test_row_api(self, toy_graph):
        row = run_cq(toy_graph, CqId.Q2_2)[0]
        assert row.variables == ("simulation", "rc", "source")
        assert row["rc"] == kb("fertility")
        with pytest.raises(KeyError):
            row["nope"]


class TestSymbolicMeanings:
    def test_white_rose_purity(self):
        g = Graph()
        g.insert_simulation(
            build_simulation(
                SimulationKind.GENERIC,
                make_entity("white rose"),
                [(RcRelation.HAS, make_entity("purity"))],
                [make_entity("general")],
                [make_entity("olderr", Role.SOURCE)],
            )
        )
        meanings = symbolic_meanings(g, kb("whiteRose"))
        assert {e.label for e in meanings} == {"purity"}

    def test_entity_in_no_simulation(self, toy_graph):
        assert symbolic_meanings(toy_graph, kb("bird")) == set()

    def test_repeat_flag_two_hop_chain(self):
        g = Graph()
        src = make_entity("olderr", Role.SOURCE)
        ctx = make_entity("general")
        g.insert_simulation(
            build_simulation(SimulationKind.GENERIC, make_entity("a"), [(RcRelation.HAS, make_entity("b"))], [ctx], [src])
        )
        g.insert_simulation(
            build_simulation(SimulationKind.GENERIC, make_entity("b"), [(RcRelation.HAS, make_entity("c"))], [ctx], [src])
        )
        off = symbolic_meanings(g, kb("a"))
        on = symbolic_meanings(g, kb("a"), repeat=True)
        assert {e.label for e in off} == {"b"}
        assert {e.label for e in on} == {"b", "c"}

    def test_unknown_entity(self, toy_graph):
        with pytest.raises(UnknownEntityError):
            symbolic_meanings(toy_graph, kb("ghost"))


class TestQueryProperties:
    def test_q1_1_equals_symbolic_meanings(self):
        for seed in range(25):
            g = random_graph(random.Random(seed), max_sims=12)
            for iri in list(g._sims_by_simulacrum):
                rows = run_cq(g, CqId.Q1_1, {"simulacrum": iri})
                assert {r["rc"] for r in rows} == {e.id for e in symbolic_meanings(g, iri)}

    def test_q3_2_superset_of_q1_1(self):
        for seed in range(25):
            g = random_graph(random.Random(seed), max_sims=12)
            for iri in list(g._sims_by_simulacrum):
                q11 = {r["rc"] for r in run_cq(g, CqId.Q1_1, {"simulacrum": iri})}
                q32 = {r["rc"] for r in run_cq(g, CqId.Q3_2, {"simulacrum": iri})}
                assert q11 <= q32

    def test_results_stable_under_insertion_order(self):
        from graphgen import build_graph, random_parts

        rng = random.Random(7)
        sims, variants = random_parts(rng, max_sims=10)
        g1 = build_graph(sims, variants)
        shuffled = sims[:]
        rng.shuffle(shuffled)
        g2 = build_graph(shuffled, variants)
        for cq in (CqId.Q1_5, CqId.Q2_2, CqId.Q2_4, CqId.Q3_3, CqId.Q3_5):
            assert run_cq(g1, cq) == run_cq(g2, cq)
