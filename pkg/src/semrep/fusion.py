"""Fusion of partial, modality-specific representations.

Merging is atomic: it returns either the fused document or a
:class:`ConflictReport`, never a half-merged result.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .errors import KindMismatch, ParseError, UnknownId
from .model import (AltGroup, Alternative, MetaBlock, Ref, Restriction,
                    SemRep, rename_ids, require_integrity)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Correspondence:
    """Cross-document co-reference: (left node id, right node id) pairs."""
    pairs: tuple = ()

    def __post_init__(self):
        pairs = tuple((str(l), str(r)) for l, r in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lefts = [l for l, _ in pairs]
        rights = [r for _, r in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("correspondence must be injective on both sides")

    def inverse(self) -> Correspondence:
        return Correspondence(tuple((r, l) for l, r in self.pairs))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_args(cls, items) -> Correspondence:
        pairs = []
        for item in items:
            left, eq, right = item.partition("=")
            if not eq or not left or not right:
                raise ValueError(f"correspondence {item!r} is not left=right")
            pairs.append((left, right))
        return cls(tuple(pairs))

    @classmethod
    def parse(cls, text: str) -> Correspondence:
        """One whitespace-separated pair per line; ``#`` starts a comment."""
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'leftId rightId'", lineno, 1)
            pairs.append((parts[0], parts[1]))
        return cls(tuple(pairs))


@dataclass(frozen=True)
class Conflict:
    owner: str
    category: str
    left: tuple
    right: tuple
    rule: str

    def __str__(self) -> str:
        fmt = lambda vs: ",".join(str(v) for v in vs)  # noqa: E731
        return (f"conflict: {self.owner} {self.category} "
                f"{fmt(self.left)} vs {fmt(self.right)} [{self.rule}]")


class ConflictReport(list):
    """Non-empty exactly when a merge failed."""

    def lines(self) -> list[str]:
        return [str(c) for c in self]


SINGLE_VALUED = "single-valued"
TEMPORAL = "temporal-extent"
EMPTY_INTERSECTION = "empty-intersection"


def _single_valued(registry) -> frozenset[str]:
    return registry.single_valued() if registry is not None else frozenset()


def node_conflicts(doc: SemRep, a: str, b: str, registry=None) -> list[Conflict]:
    """Conflicts that unifying ``b`` into ``a`` would create."""
    na, nb = doc.node(a), doc.node(b)
    out = []
    for cat in sorted(_single_valued(registry)):
        va = {r.value for r in na.restrictions if r.category == cat}
        vb = {r.value for r in nb.restrictions if r.category == cat}
        if va and vb and len(va | vb) > 1:
            key = lambda v: (isinstance(v, Ref), str(v))  # noqa: E731
            out.append(Conflict(a, cat, tuple(sorted(va, key=key)),
                                tuple(sorted(vb, key=key)), SINGLE_VALUED))
    ta, tb = na.temporal_extent, nb.temporal_extent
    if ta is not None and tb is not None and ta != tb:
        out.append(Conflict(a, "temporal_extent", (ta,), (tb,), TEMPORAL))
    return out


def _dedupe(items):
    out = []
    for x in items:
        if x not in out:
            out.append(x)
    return out


def merge_meta(left: MetaBlock, right: MetaBlock, where: str) -> MetaBlock:
    """Field-wise union; the left block wins and differences are logged."""
    out = MetaBlock()
    for f in MetaBlock.FIELDS:
        lv, rv = getattr(left, f), getattr(right, f)
        l_set = lv is not None and lv != ()
        r_set = rv is not None and rv != ()
        if l_set and r_set and lv != rv:
            log.warning("meta %s on %s differs (%r vs %r); keeping %r",
                        f, where, lv, rv, lv)
        setattr(out, f, lv if l_set else rv)
    return out


def _collapse(doc: SemRep, a: str, b: str) -> None:
    """Fold node ``b`` into node ``a`` in place (no conflict checks)."""
    na, nb = doc.node(a), doc.node(b)
    na.restrictions = _dedupe(na.restrictions + nb.restrictions)
    if na.temporal_extent is None:
        na.temporal_extent = nb.temporal_extent
    na.links = _dedupe(na.links + nb.links)
    na.extensions = _dedupe(na.extensions + nb.extensions)
    na.meta = merge_meta(na.meta, nb.meta, a)
    doc.nodes = [n for n in doc.nodes if n.id != b]

    def restr(rs):
        return [Restriction(r.category, Ref(a))
                if isinstance(r.value, Ref) and r.value.target == b else r
                for r in rs]

    for n in doc.nodes:
        n.restrictions = restr(n.restrictions)
    for r in doc.relations:
        if r.source == b:
            r.source = a
        if r.target == b:
            r.target = a
        r.restrictions = restr(r.restrictions)
    for g in doc.alt_groups:
        if g.owner == b:
            g.owner = a
        for alt in g.alternatives:
            alt.restrictions = restr(alt.restrictions)
    for v in doc.variables:
        v.domain = _dedupe([a if d == b else d for d in v.domain])

    seen = set()
    kept = []
    for r in doc.relations:
        key = (r.source, r.target,
               tuple(sorted(x.sort_key() for x in r.restrictions)),
               tuple(r.extensions))
        if key in seen and a in (r.source, r.target):
            continue
        seen.add(key)
        kept.append(r)
    doc.relations = kept


def unify_nodes(doc: SemRep, a: str, b: str, registry=None):
    """Collapse node ``b`` into ``a`` (structure sharing).

    Returns the new document, or a :class:`ConflictReport` when a
    single-valued category (per ``registry``) or the temporal extents
    disagree.
    """
    require_integrity(doc)
    if a == b:
        raise ValueError("cannot unify a node with itself")
    na, nb = doc.node(a), doc.node(b)
    if na.kind != nb.kind:
        raise KindMismatch(f"{a} is a {na.kind}, {b} is a {nb.kind}")
    conflicts = node_conflicts(doc, a, b, registry)
    if conflicts:
        return ConflictReport(conflicts)
    out = doc.copy()
    _collapse(out, a, b)
    return out


def _intersect(g: AltGroup, h: AltGroup) -> list[Alternative]:
    kept = []
    for x in g.alternatives:
        key = x.bundle_key()
        for y in h.alternatives:
            if y.bundle_key() == key:
                kept.append(Alternative(list(x.restrictions), x.cert * y.cert))
                break
    return kept


def _rename_for(a: SemRep, b: SemRep, step: int) -> dict[str, str]:
    a_ids = set(a.all_ids())
    taken = a_ids | set(b.all_ids())
    rename = {}
    for ident in b.all_ids():
        if ident not in a_ids:
            continue
        new, j = f"{ident}_m{step}", 2
        while new in taken:
            new, j = f"{ident}_m{step}_{j}", j + 1
        taken.add(new)
        rename[ident] = new
    return rename


def merge(a: SemRep, b: SemRep, c: Correspondence = Correspondence(),
          reg=None, step: int = 1):
    """Fuse ``b`` into ``a`` given node correspondences ``c``.

    ``b``'s identifiers that collide with ``a``'s get a ``_m<step>`` suffix.
    Corresponding nodes are unified, then alt-groups over the same category
    set on a corresponding node are intersected (certs multiply).
    """
    require_integrity(a)
    require_integrity(b)
    if not isinstance(c, Correspondence):
        c = Correspondence(tuple(c))
    a_nodes, b_nodes = set(a.node_ids()), set(b.node_ids())
    for left, right in c:
        if left not in a_nodes:
            raise UnknownId(left)
        if right not in b_nodes:
            raise UnknownId(right)

    rename = _rename_for(a, b, step)
    b2 = rename_ids(b, rename)
    out = a.copy()
    out.nodes += b2.nodes
    out.relations += b2.relations
    out.alt_groups += b2.alt_groups
    out.variables += b2.variables
    out.extensions = _dedupe(out.extensions + b2.extensions)
    out.meta = merge_meta(a.meta, b.meta, "document")
    pairs = [(left, rename.get(right, right)) for left, right in c]

    conflicts = ConflictReport()
    reconcile = []
    for left, right in pairs:
        nl, nr = out.node(left), out.node(right)
        if nl.kind != nr.kind:
            raise KindMismatch(f"{left} is a {nl.kind}, {right} is a {nr.kind}")
        conflicts.extend(node_conflicts(out, left, right, reg))
        # i-th group over a category set meets the i-th on the other side
        buckets_l: dict[frozenset, list[AltGroup]] = {}
        buckets_r: dict[frozenset, list[AltGroup]] = {}
        for g in a.alt_groups:
            if g.owner == left:
                buckets_l.setdefault(g.categories(), []).append(out.group(g.id))
        for g in b2.alt_groups:
            if g.owner == right:
                buckets_r.setdefault(g.categories(), []).append(out.group(g.id))
        for cats, gs in buckets_l.items():
            for g, h in zip(gs, buckets_r.get(cats, [])):
                kept = _intersect(g, h)
                if not kept:
                    conflicts.append(Conflict(
                        left, ",".join(sorted(cats)) or "-",
                        tuple(" ".join(map(str, x.restrictions)) for x in g.alternatives),
                        tuple(" ".join(map(str, x.restrictions)) for x in h.alternatives),
                        EMPTY_INTERSECTION))
                reconcile.append((g, h, kept))
    if conflicts:
        return conflicts

    for g, h, kept in reconcile:
        g.alternatives = kept
    dropped = {h.id for _, h, _ in reconcile}
    out.alt_groups = [g for g in out.alt_groups if g.id not in dropped]
    for left, right in pairs:
        _collapse(out, left, right)
    require_integrity(out)
    return out


@dataclass
class FusionSession:
    current: SemRep = field(default_factory=lambda: SemRep("session"))
    history: list = field(default_factory=list)

    @property
    def step(self) -> int:
        return len(self.history) + 1


def assimilate(session: FusionSession, doc: SemRep,
               c: Correspondence = Correspondence(), reg=None,
               now: int | None = None):
    """Merge ``doc`` into the session; the session itself is never mutated."""
    result = merge(session.current, doc, c, reg, step=session.step)
    if isinstance(result, ConflictReport):
        return result
    stamp = doc.meta.timestamp
    if stamp is None:
        stamp = now if now is not None else int(time.time() * 1000)
    return FusionSession(result, session.history + [(doc.id, stamp)])
