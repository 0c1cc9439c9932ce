"""Helpers for the merge algebra properties."""

from __future__ import annotations

import random

from semrep import isomorphic
from semrep.fusion import ConflictReport, merge
from semrep.model import MetaBlock, SemRep

from docgen import fusion_doc, random_correspondence
from oracles import brute_conflicts


def normalized(doc: SemRep) -> SemRep:
    """Drop meta and order alternatives, which only affect enumeration order."""
    out = doc.copy()
    out.meta = MetaBlock()
    for n in out.nodes:
        n.meta = MetaBlock()
    for g in out.alt_groups:
        g.alternatives.sort(key=lambda a: (a.bundle_key(), a.cert))
    return out


def same_up_to_iso(x: SemRep, y: SemRep) -> bool:
    return isomorphic(normalized(x), normalized(y))


def reported(report: ConflictReport) -> set[tuple[str, str]]:
    return {(c.owner, c.rule) for c in report}


def check_pair(rng: random.Random, registry) -> dict:
    """One generated pair: conflict agreement plus identity/commutativity."""
    a = fusion_doc(rng, "a")
    b = fusion_doc(rng, "b")
    pairs = random_correspondence(rng, a, b)
    inverse = [(r, l) for l, r in pairs]
    expected = brute_conflicts(a, b, pairs, registry.single_valued())
    result = merge(a, b, pairs, registry)
    out = {"conflict": isinstance(result, ConflictReport), "false": 0, "missed": 0,
           "commutes": None}
    got = reported(result) if out["conflict"] else set()
    out["false"] = len(got - expected)
    out["missed"] = len(expected - got)
    if not out["conflict"]:
        swapped = merge(b, a, inverse, registry)
        out["commutes"] = (not isinstance(swapped, ConflictReport)
                           and same_up_to_iso(result, swapped))
    return out


def check_triple(rng: random.Random, registry) -> bool | None:
    """Associativity on a generated triple; None when both sides conflict."""
    a, b, c = (fusion_doc(rng, p, max_nodes=6, conflict_bias=0.2) for p in "abc")
    ab = random_correspondence(rng, a, b)
    bc = random_correspondence(rng, b, c)
    partner = {r: l for l, r in ab}
    left_inner = merge(a, b, ab, registry)
    left = left_inner if isinstance(left_inner, ConflictReport) else merge(
        left_inner, c, [(partner.get(x, x), y) for x, y in bc], registry)
    right_inner = merge(b, c, bc, registry)
    right = right_inner if isinstance(right_inner, ConflictReport) else merge(
        a, right_inner, ab, registry)
    l_fail, r_fail = isinstance(left, ConflictReport), isinstance(right, ConflictReport)
    if l_fail and r_fail:
        return None
    if l_fail != r_fail:
        return False
    return same_up_to_iso(left, right)
