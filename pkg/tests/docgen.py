"""Seeded random document generators shared by the property tests."""

from __future__ import annotations

import random

from semrep.model import (DOMAIN_MODEL, EVENT, LOWER_LEVEL, PARTICIPANT,
                          ExternalLink, MetaBlock, Ref, SemRep)

CATEGORIES = ["evtCat", "dialAct", "tense", "voice", "lex", "synCat", "num",
              "pers", "role", "colour", "x_y", "note"]
TEXTS = ["Order", "Inform", "present", "past", "agent", "goal", "I", "Nancy",
         "Stuttgart", "a&b", "<tag>", "café", " padded ", "", "3", "2.5",
         "quote\"s", "it's", "tab\there", "line\nbreak", "]]>"]
BLOBS = [
    '<x:note xmlns:x="urn:other">hi</x:note>',
    '<g:point xmlns:g="urn:gesture" at="12"><g:target ref="doc"></g:target></g:point>',
]
CERTS_DYADIC = [0.0, 0.25, 0.5, 0.75, 1.0]


def _value(rng: random.Random, node_ids: list[str]):
    if node_ids and rng.random() < 0.1:
        return Ref(rng.choice(node_ids))
    return rng.choice(TEXTS)


def _meta(rng: random.Random) -> MetaBlock:
    m = MetaBlock()
    if rng.random() < 0.5:
        m.timestamp = rng.randrange(0, 10**12)
    if rng.random() < 0.3:
        m.spatial = rng.choice(["room 1", "kitchen"])
    if rng.random() < 0.3:
        m.producer = rng.choice(["asr", "gesture-recognizer"])
    if rng.random() < 0.3:
        m.confidence = rng.choice([0.0, 0.5, 0.93, 1.0])
    if rng.random() < 0.3:
        m.speaker = "Peter"
        m.addressees = tuple(rng.sample(["System", "Anna", "Bo"], rng.randint(0, 2)))
    return m


def random_doc(rng: random.Random, max_nodes: int = 12, max_groups: int = 3,
               max_vars: int = 2, *, prefix: str = "", rich: bool = True,
               certs=None, min_nodes: int = 0) -> SemRep:
    """An integrity-passing document.

    ``rich`` adds links, meta blocks, extents, reference values and foreign
    blobs; ``certs`` restricts alternative certs to a pool.
    """
    doc = SemRep(prefix + "doc" + str(rng.randrange(100)))
    n_nodes = rng.randint(min_nodes, max_nodes)
    ids = []
    for i in range(n_nodes):
        kind = rng.choice([EVENT, PARTICIPANT])
        ident = f"{prefix}{'e' if kind == EVENT else 'p'}{i}"
        extent = None
        if rich and kind == EVENT and rng.random() < 0.3:
            start = rng.randrange(0, 1000)
            extent = (start, start + rng.randrange(0, 500))
        doc.add_node(kind, ident, temporal_extent=extent)
        ids.append(ident)
    for ident in ids:
        for _ in range(rng.randint(0, 3)):
            value = _value(rng, ids) if rich else rng.choice(TEXTS[:9])
            doc.add_restriction(ident, rng.choice(CATEGORIES), value)
        if rich and rng.random() < 0.15:
            if rng.random() < 0.5:
                doc.add_link(ident, ExternalLink(DOMAIN_MODEL,
                                                 "http://example.org/onto", "City"))
            else:
                doc.add_link(ident, ExternalLink(LOWER_LEVEL,
                                                 "file:///data/speech.wav", "t=1.2,1.9"))
        if rich and rng.random() < 0.15:
            doc.node(ident).meta = _meta(rng)
        if rich and rng.random() < 0.1:
            doc.node(ident).extensions.append(rng.choice(BLOBS))

    n_vars = rng.randint(0, max_vars) if ids else 0
    for k in range(n_vars):
        domain = rng.sample(ids, rng.randint(1, min(3, len(ids))))
        doc.add_variable(f"{prefix}v{k}", domain)
    endpoints = ids + [v.id for v in doc.variables]

    if ids:
        for k in range(rng.randint(0, min(len(ids) + 2, 8))):
            src, tgt = rng.choice(endpoints), rng.choice(endpoints)
            restr = [("role", rng.choice(["agent", "goal", "source", "theme"]))] \
                if rng.random() < 0.8 else []
            if rich and rng.random() < 0.1:
                restr.append(("note", _value(rng, ids)))
            doc.add_relation(src, tgt, restr, id=f"{prefix}r{k}")
        for k in range(rng.randint(0, max_groups)):
            owner = rng.choice(ids)
            alts = []
            for _ in range(rng.randint(1, 3)):
                bundle = [(rng.choice(CATEGORIES), rng.choice(TEXTS[:9]))
                          for _ in range(rng.randint(1, 2))]
                cert = rng.choice(certs) if certs else rng.random()
                alts.append((bundle, cert))
            doc.add_alt_group(owner, alts, id=f"{prefix}a{k}")

    if rich and rng.random() < 0.2:
        doc.meta = _meta(rng)
    if rich and rng.random() < 0.1:
        doc.extensions.append(rng.choice(BLOBS))
    return doc


# -- fusion fixtures --------------------------------------------------------

FUSION_VALUES = {
    "tense": ["present", "past"],
    "voice": ["active", "passive"],
    "num": ["sing", "plur"],
    "lex": ["I", "Nancy"],
    "colour": ["red", "blue"],
}
FUSION_ALT_CATS = ["dialAct", "evtCat"]
FUSION_ALT_VALUES = {"dialAct": ["Order", "Inform", "Question"],
                     "evtCat": ["utterance", "gesture", "action"]}


def fusion_doc(rng: random.Random, prefix: str, max_nodes: int = 8,
               conflict_bias: float = 0.5) -> SemRep:
    """Small document for merge algebra tests.

    Ids carry ``prefix`` so documents never collide; groups are single
    category so category sets survive intersection; certs are dyadic so
    products are exact in any association order.
    """
    doc = SemRep(prefix + "doc")
    n = rng.randint(1, max_nodes)
    for i in range(n):
        kind = EVENT if i % 2 == 0 else PARTICIPANT
        extent = None
        if kind == EVENT and rng.random() < 0.6 * conflict_bias:
            extent = rng.choice([(0, 10), (5, 20)])
        doc.add_node(kind, f"{prefix}n{i}", temporal_extent=extent)
        for cat in rng.sample(sorted(FUSION_VALUES), rng.randint(0, 2)):
            doc.add_restriction(f"{prefix}n{i}", cat, rng.choice(FUSION_VALUES[cat]))
    ids = doc.node_ids()
    if rng.random() < 0.3:
        doc.add_variable(f"{prefix}v0", rng.sample(ids, rng.randint(1, min(2, n))))
    endpoints = ids + [v.id for v in doc.variables]
    for k in range(rng.randint(0, n)):
        doc.add_relation(rng.choice(endpoints), rng.choice(endpoints),
                         [("role", rng.choice(["agent", "goal", "theme"]))],
                         id=f"{prefix}r{k}")
    for k in range(rng.randint(0, 2)):
        # favour the first node so corresponded groups actually meet
        owner = ids[0] if rng.random() < 0.6 else rng.choice(ids)
        cat = rng.choice(FUSION_ALT_CATS)
        size = 1 if rng.random() < conflict_bias else rng.randint(1, 3)
        values = rng.sample(FUSION_ALT_VALUES[cat], size)
        doc.add_alt_group(owner, [((cat, v), rng.choice(CERTS_DYADIC[1:]))
                                  for v in values], id=f"{prefix}a{k}")
    return doc


def random_correspondence(rng: random.Random, a: SemRep, b: SemRep,
                          max_pairs: int = 3) -> list[tuple[str, str]]:
    """Kind-respecting injective pairs between ``a`` and ``b`` nodes."""
    pairs = []
    used_b = set()
    order = a.nodes[:1] + rng.sample(a.nodes[1:], len(a.nodes) - 1)
    for na in order:
        if len(pairs) >= max_pairs or rng.random() < 0.4:
            continue
        options = [nb.id for nb in b.nodes if nb.kind == na.kind and nb.id not in used_b]
        if options:
            choice = options[0] if rng.random() < 0.5 else rng.choice(options)
            used_b.add(choice)
            pairs.append((na.id, choice))
    return pairs
