import math
import random

import pytest

from semrep import SemRep, isomorphic
from semrep.errors import CapExceeded, IndexOutOfRange, OutsideDomain
from semrep.model import Restriction
from semrep.underspec import (best_reading, best_selection, bind, distinguishing_values,
                              enumerate_readings, prune, reading_count)

from docgen import random_doc
from oracles import brute_readings, ground_key


def dial_values(reading):
    return [r.value for r in reading.node("e0").restrictions if r.category == "dialAct"]


def two_by_two() -> SemRep:
    doc = SemRep("d")
    doc.add_event("e0")
    doc.add_alt_group("e0", [(("dialAct", "Order"), 0.8), (("dialAct", "Inform"), 0.3)])
    doc.add_alt_group("e0", [(("tense", "present"), 0.5), (("tense", "past"), 0.5)])
    return doc


def golden_with_variable(golden) -> SemRep:
    golden.add_participant("w")
    golden.add_variable("v1", ["y", "z"])
    golden.add_relation("v1", "e1", [("role", "theme")], id="rv")
    return golden


class TestCount:
    def test_golden(self, golden):
        assert reading_count(golden) == 2

    def test_ground(self):
        doc = SemRep("d")
        doc.add_event("e")
        assert reading_count(doc) == 1

    def test_groups_and_variable(self):
        doc = SemRep("d")
        for ident in ("e", "y", "z"):
            doc.add_node("event" if ident == "e" else "participant", ident)
        doc.add_alt_group("e", [(("a", "1"), 0.5), (("a", "2"), 0.5)])
        doc.add_alt_group("e", [(("b", "1"), 0.2), (("b", "2"), 0.3), (("b", "3"), 0.5)])
        doc.add_variable("v", ["y", "z"])
        doc.add_relation("v", "e", [("role", "agent")])
        assert len(brute_readings(doc)) == 12
        assert reading_count(doc) == 12


class TestEnumerate:
    def test_golden(self, golden):
        rs = enumerate_readings(golden)
        assert rs.exhaustive and len(rs) == 2
        assert [(dial_values(r), r.score) for r in rs] == [(["Order"], 0.8), (["Inform"], 0.3)]
        assert all(r.is_ground() for r in rs)

    def test_ground_document(self):
        doc = SemRep("d")
        doc.add_event("e")
        rs = enumerate_readings(doc)
        assert len(rs) == 1 and rs.readings[0].score == 1.0

    def test_product_scores(self):
        rs = enumerate_readings(two_by_two())
        expected = [0.8 * 0.5, 0.8 * 0.5, 0.3 * 0.5, 0.3 * 0.5]
        assert rs.scores() == pytest.approx([0.40, 0.40, 0.15, 0.15], abs=1e-12)
        assert rs.scores() == expected

    def test_cap_truncates(self):
        rs = enumerate_readings(two_by_two(), cap=3)
        assert len(rs) == 3 and not rs.exhaustive

    def test_distinguishing_values(self, golden):
        rs = enumerate_readings(golden)
        assert [distinguishing_values(golden, s) for s in rs.selections] == \
            [["Order"], ["Inform"]]

    def test_deterministic(self):
        rng = random.Random(12)
        for _ in range(50):
            doc = random_doc(rng)
            a, b = enumerate_readings(doc), enumerate_readings(doc)
            assert a.readings == b.readings

    def test_matches_oracle(self):
        rng = random.Random(99)
        for _ in range(150):
            doc = random_doc(rng)
            expected = brute_readings(doc)
            rs = enumerate_readings(doc)
            assert reading_count(doc) == len(expected) == len(rs)
            for (score, key), reading in zip(expected, rs):
                assert ground_key(reading) == key
                assert math.isclose(reading.score, score, rel_tol=0, abs_tol=1e-12)


class TestBest:
    def test_golden(self, golden):
        reading, score = best_reading(golden)
        assert dial_values(reading) == ["Order"] and score == 0.8

    def test_tie_goes_to_first(self):
        doc = SemRep("d")
        doc.add_event("e0")
        doc.add_alt_group("e0", [(("dialAct", "Order"), 0.5), (("dialAct", "Inform"), 0.5)])
        reading, _ = best_reading(doc)
        assert dial_values(reading) == ["Order"]

    def test_two_by_two(self):
        reading, score = best_reading(two_by_two())
        assert score == pytest.approx(0.40, abs=1e-12)
        assert "Order" in dial_values(reading)
        assert Restriction("tense", "present") in reading.node("e0").restrictions

    def test_all_zero(self):
        doc = SemRep("d")
        doc.add_event("e0")
        doc.add_alt_group("e0", [(("a", "x"), 0.0), (("a", "y"), 0.0)])
        doc.add_alt_group("e0", [(("b", "x"), 0.0), (("b", "y"), 0.7)])
        assert best_selection(doc).alternatives == (0, 0)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            best_reading(two_by_two(), cap=3)

    def test_is_maximal_and_first(self):
        rng = random.Random(31)
        for _ in range(200):
            doc = random_doc(rng, certs=[0.0, 0.25, 0.5, 1.0] if rng.random() < 0.5 else None)
            rs = enumerate_readings(doc)
            _, score = best_reading(doc)
            top = max(rs.scores())
            assert score == top
            assert best_selection(doc) == rs.selections[rs.scores().index(top)]


class TestPrune:
    def test_count_drops(self, golden):
        assert reading_count(prune(golden, "a1", 0)) == 1

    def test_single_reading(self, golden):
        (reading,) = enumerate_readings(prune(golden, "a1", 0))
        assert dial_values(reading) == ["Order"]

    def test_out_of_range(self, golden):
        with pytest.raises(IndexOutOfRange):
            prune(golden, "a1", 5)

    def test_input_untouched(self, golden):
        before = golden.copy()
        prune(golden, "a1", 1)
        assert golden == before


class TestBind:
    def test_endpoint_and_count(self, golden):
        doc = golden_with_variable(golden)
        assert reading_count(doc) == 4
        bound = bind(doc, "v1", "z")
        assert bound.relation("rv").source == "z"
        assert reading_count(bound) == 2

    def test_outside_domain(self, golden):
        with pytest.raises(OutsideDomain):
            bind(golden_with_variable(golden), "v1", "x")

    def test_subset_of_original(self, golden):
        doc = golden_with_variable(golden)
        original = enumerate_readings(doc)
        expected = [r for r, s in zip(original, original.selections) if s.bindings == ("z",)]
        after = enumerate_readings(bind(doc, "v1", "z")).readings
        assert len(after) == len(expected)
        for r, e in zip(after, expected):
            assert isomorphic(r, e) and r.score == e.score
