"""Semantic graph data model.

A :class:`SemRep` holds events and participants (:class:`Node`), directed
dependencies between them (:class:`Relation`), ambiguity carriers
(:class:`AltGroup`) and restricted label variables (:class:`LabelVariable`).
Builders mutate the document in place under a single-writer contract; every
transformation elsewhere in the package returns a fresh document.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import (CertOutOfRange, DuplicateId, EmptyAlternatives,
                     EmptyDomain, IntegrityError, InvalidToken, SelfReference,
                     UnknownId)

EVENT = "event"
PARTICIPANT = "participant"
NODE_KINDS = (EVENT, PARTICIPANT)

DOMAIN_MODEL = "domain_model"
LOWER_LEVEL = "lower_level"
LINK_KINDS = (DOMAIN_MODEL, LOWER_LEVEL)

ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
URI_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")


def is_identifier(s) -> bool:
    return isinstance(s, str) and ID_RE.match(s) is not None


def is_category(s) -> bool:
    return isinstance(s, str) and s != "" and not any(c.isspace() for c in s)


def has_scheme(uri: str) -> bool:
    return URI_RE.match(uri) is not None


@dataclass(frozen=True, order=True)
class Ref:
    """A restriction value pointing at another element by identifier."""
    target: str

    def __str__(self) -> str:
        return "@" + self.target


Value = Union[str, Ref]


def normalize_value(value) -> Value:
    """Coerce builder input to a stored value (numbers become canonical text)."""
    if isinstance(value, Ref):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean restriction values are not supported")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        return repr(value)
    if isinstance(value, str):
        return value
    raise TypeError(f"unsupported restriction value {value!r}")


def value_key(value: Value) -> tuple:
    if isinstance(value, Ref):
        return (1, value.target)
    return (0, value)


@dataclass(frozen=True)
class Restriction:
    category: str
    value: Value

    def sort_key(self) -> tuple:
        return (self.category,) + value_key(self.value)

    def __str__(self) -> str:
        return f"{self.category}={self.value}"


@dataclass(frozen=True)
class ExternalLink:
    kind: str
    target: str
    fragment: str | None = None

    @property
    def href(self) -> str:
        if self.fragment is None:
            return self.target
        return f"{self.target}#{self.fragment}"


@dataclass
class MetaBlock:
    """Contextual (administrative) data; never part of a denotation."""
    timestamp: int | None = None
    spatial: str | None = None
    producer: str | None = None
    confidence: float | None = None
    speaker: str | None = None
    addressees: tuple[str, ...] = ()

    FIELDS = ("timestamp", "spatial", "producer", "confidence", "speaker",
              "addressees")

    def is_empty(self) -> bool:
        return not self.present()

    def present(self) -> dict:
        out = {}
        for f in self.FIELDS:
            v = getattr(self, f)
            if v is None or v == ():
                continue
            out[f] = v
        return out


@dataclass
class Node:
    id: str
    kind: str
    restrictions: list[Restriction] = field(default_factory=list)
    temporal_extent: tuple[int, int] | None = None
    links: list[ExternalLink] = field(default_factory=list)
    meta: MetaBlock = field(default_factory=MetaBlock)
    extensions: list[str] = field(default_factory=list)


@dataclass
class Relation:
    id: str
    source: str
    target: str
    restrictions: list[Restriction] = field(default_factory=list)
    extensions: list[str] = field(default_factory=list)

    def first_role(self) -> str:
        for r in self.restrictions:
            if r.category == "role":
                return str(r.value)
        return ""


@dataclass
class Alternative:
    restrictions: list[Restriction]
    cert: float

    def bundle_key(self) -> tuple:
        return tuple(sorted(r.sort_key() for r in self.restrictions))


@dataclass
class AltGroup:
    id: str
    owner: str
    alternatives: list[Alternative] = field(default_factory=list)

    def categories(self) -> frozenset[str]:
        return frozenset(r.category for a in self.alternatives
                         for r in a.restrictions)


@dataclass
class LabelVariable:
    id: str
    domain: list[str]


class Violation(NamedTuple):
    id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.id}: {self.rule}: {self.message}"


def _as_restrictions(items) -> list[Restriction]:
    out = []
    for item in items:
        if isinstance(item, Restriction):
            out.append(item)
        else:
            cat, val = item
            out.append(Restriction(cat, normalize_value(val)))
    return out


@dataclass
class SemRep:
    id: str
    nodes: list[Node] = field(default_factory=list)
    relations: list[Relation] = field(default_factory=list)
    alt_groups: list[AltGroup] = field(default_factory=list)
    variables: list[LabelVariable] = field(default_factory=list)
    meta: MetaBlock = field(default_factory=MetaBlock)
    extensions: list[str] = field(default_factory=list)

    # -- lookup ---------------------------------------------------------

    def all_ids(self) -> Iterator[str]:
        for coll in (self.nodes, self.relations, self.alt_groups,
                     self.variables):
            for item in coll:
                yield item.id

    def element(self, ident: str):
        for coll in (self.nodes, self.relations, self.alt_groups,
                     self.variables):
            for item in coll:
                if item.id == ident:
                    return item
        raise UnknownId(ident)

    def node(self, ident: str) -> Node:
        for n in self.nodes:
            if n.id == ident:
                return n
        raise UnknownId(ident)

    def relation(self, ident: str) -> Relation:
        for r in self.relations:
            if r.id == ident:
                return r
        raise UnknownId(ident)

    def group(self, ident: str) -> AltGroup:
        for g in self.alt_groups:
            if g.id == ident:
                return g
        raise UnknownId(ident)

    def variable(self, ident: str) -> LabelVariable:
        for v in self.variables:
            if v.id == ident:
                return v
        raise UnknownId(ident)

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def is_ground(self) -> bool:
        return not self.alt_groups and not self.variables

    def copy(self):
        return copy.deepcopy(self)

    def _fresh(self, prefix: str) -> str:
        used = set(self.all_ids())
        i = 1
        while f"{prefix}{i}" in used:
            i += 1
        return f"{prefix}{i}"

    def _claim(self, ident: str | None, prefix: str) -> str:
        if ident is None:
            return self._fresh(prefix)
        if not is_identifier(ident):
            raise InvalidToken(f"not an identifier: {ident!r}")
        if ident in set(self.all_ids()):
            raise DuplicateId(ident)
        return ident

    # -- builders -------------------------------------------------------

    def add_node(self, kind: str, id: str | None = None, *,
                 restrictions=(), temporal_extent=None) -> str:
        if kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {kind!r}")
        ident = self._claim(id, "n")
        self.nodes.append(Node(ident, kind, _as_restrictions(restrictions),
                               temporal_extent=temporal_extent))
        return ident

    def add_event(self, id: str | None = None, **kw) -> str:
        return self.add_node(EVENT, id, **kw)

    def add_participant(self, id: str | None = None, **kw) -> str:
        return self.add_node(PARTICIPANT, id, **kw)

    def add_restriction(self, owner: str, category: str, value) -> SemRep:
        if not is_category(category):
            raise InvalidToken(f"not a category name: {category!r}")
        target = self.element(owner)
        if not isinstance(target, (Node, Relation)):
            raise UnknownId(f"{owner} is not a node or relation")
        target.restrictions.append(Restriction(category,
                                               normalize_value(value)))
        return self

    def add_relation(self, source: str, target: str, restrictions=(),
                     id: str | None = None) -> str:
        if id is not None and id in (source, target):
            raise SelfReference(id)
        endpoints = set(self.node_ids()) | {v.id for v in self.variables}
        for end in (source, target):
            if end not in endpoints:
                raise UnknownId(end)
        ident = self._claim(id, "r")
        self.relations.append(Relation(ident, source, target,
                                       _as_restrictions(restrictions)))
        return ident

    def add_alt_group(self, owner: str, alternatives,
                      id: str | None = None) -> str:
        """Attach mutually exclusive restriction bundles to ``owner``.

        ``alternatives`` is a sequence of ``(bundle, cert)`` where a bundle
        is either one ``(category, value)`` pair or a list of them.
        """
        self.node(owner)
        alts = []
        for bundle, cert in alternatives:
            if isinstance(bundle, Restriction):
                bundle = [bundle]
            elif (isinstance(bundle, tuple) and len(bundle) == 2
                  and isinstance(bundle[0], str)):
                bundle = [bundle]
            cert = float(cert)
            if not 0.0 <= cert <= 1.0:
                raise CertOutOfRange(cert)
            alts.append(Alternative(_as_restrictions(bundle), cert))
        if not alts:
            raise EmptyAlternatives(owner)
        ident = self._claim(id, "a")
        self.alt_groups.append(AltGroup(ident, owner, alts))
        return ident

    def add_variable(self, id: str, domain: Iterable[str]) -> SemRep:
        domain = list(domain)
        if not domain:
            raise EmptyDomain(id)
        nodes = set(self.node_ids())
        for d in domain:
            if d not in nodes:
                raise UnknownId(d)
        if len(set(domain)) != len(domain):
            raise DuplicateId(f"duplicate member in domain of {id}")
        ident = self._claim(id, "v")
        self.variables.append(LabelVariable(ident, domain))
        return self

    def add_link(self, owner: str, link: ExternalLink) -> SemRep:
        self.node(owner).links.append(link)
        return self

    def stats(self) -> dict[str, int]:
        return {
            "events": sum(n.kind == EVENT for n in self.nodes),
            "participants": sum(n.kind == PARTICIPANT for n in self.nodes),
            "nodes": len(self.nodes),
            "relations": len(self.relations),
            "groups": len(self.alt_groups),
            "alternatives": sum(len(g.alternatives) for g in self.alt_groups),
            "variables": len(self.variables),
        }


@dataclass
class GroundRep(SemRep):
    """A fully resolved reading: no alt-groups, no variables."""
    score: float = 1.0


# -- integrity -----------------------------------------------------------

def _check_restrictions(owner: str, restrictions, out: list) -> None:
    for r in restrictions:
        if not is_category(r.category):
            out.append(Violation(owner, "bad-category",
                                 f"invalid category {r.category!r}"))
        if not isinstance(r.value, (str, Ref)):
            out.append(Violation(owner, "bad-value",
                                 f"unsupported value {r.value!r}"))


def _check_meta(owner: str, meta: MetaBlock, out: list) -> None:
    c = meta.confidence
    if c is not None and not (isinstance(c, (int, float)) and 0 <= c <= 1):
        out.append(Violation(owner, "confidence-range",
                             f"confidence {c!r} outside [0, 1]"))


def check_integrity(doc: SemRep) -> list[Violation]:
    """Return every structural invariant violation in ``doc``."""
    out: list[Violation] = []
    seen: set[str] = set()
    if not is_identifier(doc.id):
        out.append(Violation(str(doc.id), "bad-id", "invalid document id"))
    for ident in doc.all_ids():
        if not is_identifier(ident):
            out.append(Violation(str(ident), "bad-id", "invalid identifier"))
        if ident in seen:
            out.append(Violation(ident, "duplicate-id",
                                 "identifier used more than once"))
        seen.add(ident)

    node_ids = set(doc.node_ids())
    var_ids = {v.id for v in doc.variables}
    rel_ids = {r.id for r in doc.relations}

    for n in doc.nodes:
        if n.kind not in NODE_KINDS:
            out.append(Violation(n.id, "bad-kind", f"unknown kind {n.kind!r}"))
        _check_restrictions(n.id, n.restrictions, out)
        if n.temporal_extent is not None:
            start, end = n.temporal_extent
            if n.kind != EVENT:
                out.append(Violation(n.id, "extent-kind",
                                     "temporal extent on a non-event"))
            if start > end:
                out.append(Violation(n.id, "extent-order",
                                     f"extent start {start} > end {end}"))
        for link in n.links:
            if link.kind not in LINK_KINDS:
                out.append(Violation(n.id, "bad-link",
                                     f"unknown link kind {link.kind!r}"))
            if not has_scheme(link.target):
                out.append(Violation(n.id, "bad-link",
                                     f"link target {link.target!r} has no scheme"))
        _check_meta(n.id, n.meta, out)

    for r in doc.relations:
        for end in (r.source, r.target):
            if end == r.id or (end in rel_ids and end not in node_ids):
                out.append(Violation(r.id, "self-reference" if end == r.id
                                     else "bad-endpoint",
                                     f"endpoint {end} is a relation"))
            elif end not in node_ids and end not in var_ids:
                out.append(Violation(r.id, "dangling-reference",
                                     f"endpoint {end} does not resolve"))
        _check_restrictions(r.id, r.restrictions, out)

    for g in doc.alt_groups:
        if g.owner not in node_ids:
            out.append(Violation(g.id, "dangling-reference",
                                 f"owner {g.owner} does not resolve to a node"))
        if not g.alternatives:
            out.append(Violation(g.id, "empty-alternatives",
                                 "group has no alternatives"))
        for a in g.alternatives:
            if not (isinstance(a.cert, (int, float)) and 0 <= a.cert <= 1):
                out.append(Violation(g.id, "cert-range",
                                     f"cert {a.cert!r} outside [0, 1]"))
            _check_restrictions(g.id, a.restrictions, out)

    for v in doc.variables:
        if not v.domain:
            out.append(Violation(v.id, "empty-domain", "variable domain is empty"))
        if len(set(v.domain)) != len(v.domain):
            out.append(Violation(v.id, "duplicate-domain",
                                 "variable domain repeats a node"))
        for d in v.domain:
            if d not in node_ids:
                out.append(Violation(v.id, "dangling-reference",
                                     f"domain member {d} does not resolve to a node"))

    _check_meta(doc.id, doc.meta, out)
    return out


def require_integrity(doc: SemRep) -> None:
    violations = check_integrity(doc)
    if violations:
        raise IntegrityError(violations)


def rename_ids(doc: SemRep, mapping: dict[str, str], doc_id: str | None = None):
    """Return a copy of ``doc`` with identifiers renamed through ``mapping``.

    Every reference (endpoints, owners, domains, reference values) follows
    the renaming; identifiers missing from ``mapping`` are kept.
    """
    def m(x: str) -> str:
        return mapping.get(x, x)

    def restr(rs):
        return [Restriction(r.category, Ref(m(r.value.target)))
                if isinstance(r.value, Ref) else r for r in rs]

    out = doc.copy()
    if doc_id is not None:
        out.id = doc_id
    for n in out.nodes:
        n.id = m(n.id)
        n.restrictions = restr(n.restrictions)
    for r in out.relations:
        r.id, r.source, r.target = m(r.id), m(r.source), m(r.target)
        r.restrictions = restr(r.restrictions)
    for g in out.alt_groups:
        g.id, g.owner = m(g.id), m(g.owner)
        for a in g.alternatives:
            a.restrictions = restr(a.restrictions)
    for v in out.variables:
        v.id = m(v.id)
        v.domain = [m(d) for d in v.domain]
    return out
