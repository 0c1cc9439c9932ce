"""Formal denotation of ground representations.

A reading denotes a finite set of ground assertions: the information it
adds to an information state. Contextual data (meta blocks, extension
blobs, links) never contributes.
"""

from __future__ import annotations

from typing import NamedTuple, Union

from .errors import InvalidCount, NotGround
from .model import EVENT, PARTICIPANT, SemRep, Value


class Kind(NamedTuple):
    node: str
    kind: str


class Restr(NamedTuple):
    node: str
    category: str
    value: Value


class Rel(NamedTuple):
    source: str
    target: str
    category: str
    value: Value


class Temporal(NamedTuple):
    node: str
    start: int
    end: int


Assertion = Union[Kind, Restr, Rel, Temporal]
AssertionSet = frozenset

# placeholder emitted for relations carrying no restriction at all
UNTYPED_RELATION = ("rel", "unspecified")


def denote(g: SemRep, registry=None) -> frozenset:
    """Return the assertion set of a ground representation.

    When ``registry`` is given, categories it declares contextual are left
    out as well.
    """
    if not g.is_ground():
        raise NotGround(f"{len(g.alt_groups)} alt-groups and "
                        f"{len(g.variables)} variables remain in {g.id}")

    def keep(category: str) -> bool:
        if registry is None:
            return True
        spec = registry.get(category)
        return spec is None or not spec.contextual

    out: set = set()
    for n in g.nodes:
        out.add(Kind(n.id, n.kind))
        for r in n.restrictions:
            if keep(r.category):
                out.add(Restr(n.id, r.category, r.value))
        if n.kind == EVENT and n.temporal_extent is not None:
            out.add(Temporal(n.id, *n.temporal_extent))
    for rel in g.relations:
        kept = [r for r in rel.restrictions if keep(r.category)]
        if not kept:
            out.add(Rel(rel.source, rel.target, *UNTYPED_RELATION))
        for r in kept:
            out.add(Rel(rel.source, rel.target, r.category, r.value))
    return frozenset(out)


CARDINALITY = "cardinality"
COLLECTIVITY = "collectivity"
MEMBER_TYPE = "memberType"


def encode_collective_quantifier(doc: SemRep, event: str, members_count: int,
                                 member_category: str) -> str:
    """Encode a collective numeral quantifier ("three men moved the piano").

    Adds a group participant carrying its size, its collective reading and
    its member type, tied to ``event`` as agent. Returns the participant id.
    """
    if doc.node(event).kind != EVENT:
        raise ValueError(f"{event} is not an event")
    if isinstance(members_count, bool) or not isinstance(members_count, int) \
            or members_count < 1:
        raise InvalidCount(members_count)
    group = doc.add_node(PARTICIPANT, restrictions=[
        (CARDINALITY, members_count),
        (COLLECTIVITY, "collective"),
        (MEMBER_TYPE, member_category),
    ])
    doc.add_relation(group, event, [("role", "agent")])
    return group
