"""Canonical form and isomorphism (identity up to identifier renaming)."""

from __future__ import annotations

from collections import Counter

from .errors import SizeLimit
from .model import Ref, SemRep, require_integrity

DEFAULT_NODE_CAP = 50


def _sort_restrictions(rs):
    rs.sort(key=lambda r: r.sort_key())


def canonicalize(doc: SemRep) -> SemRep:
    """Return the deterministic interchange form of ``doc``.

    Restrictions are sorted by (category, value) everywhere, relations by
    (source, target, first role value), alt-groups follow their owner's
    document position. Node order, alternative order and variable domain
    order are meaningful and kept.
    """
    require_integrity(doc)
    out = doc.copy()
    for n in out.nodes:
        _sort_restrictions(n.restrictions)
    for r in out.relations:
        _sort_restrictions(r.restrictions)
    for g in out.alt_groups:
        for a in g.alternatives:
            _sort_restrictions(a.restrictions)
    out.relations.sort(key=lambda r: (
        r.source, r.target, r.first_role(),
        tuple(x.sort_key() for x in r.restrictions), r.id))
    position = {n.id: i for i, n in enumerate(out.nodes)}
    out.alt_groups.sort(key=lambda g: position[g.owner])
    return out


def canonical_equal(a: SemRep, b: SemRep) -> bool:
    return canonicalize(a) == canonicalize(b)


# -- isomorphism -----------------------------------------------------------

class _View:
    """Identifier-free description of a document used by the matcher."""

    def __init__(self, doc: SemRep):
        self.doc = doc
        self.vertices = [n.id for n in doc.nodes] + [v.id for v in doc.variables]
        vset = set(self.vertices)
        self.vset = vset

        groups: dict[str, list] = {}
        for g in doc.alt_groups:
            groups.setdefault(g.owner, []).append(tuple(
                (self._bundle(a.restrictions), a.cert) for a in g.alternatives))

        self.label: dict[str, tuple] = {}
        for n in doc.nodes:
            self.label[n.id] = (
                "node", n.kind, self._bundle(n.restrictions), n.temporal_extent,
                tuple(n.links), tuple(sorted(n.meta.present().items())),
                tuple(n.extensions), tuple(sorted(groups.get(n.id, ()))))
        for v in doc.variables:
            self.label[v.id] = ("var", len(v.domain))

        self.edges: dict[tuple[str, str], Counter] = {}
        for r in doc.relations:
            self._edge(r.source, r.target, ("rel", self._bundle(r.restrictions),
                                             tuple(r.extensions)))
        for v in doc.variables:
            for i, d in enumerate(v.domain):
                self._edge(v.id, d, ("dom", i))
        for n in doc.nodes:
            for r in n.restrictions:
                if isinstance(r.value, Ref) and r.value.target in vset:
                    self._edge(n.id, r.value.target, ("ref", r.category))
        for g in doc.alt_groups:
            for i, a in enumerate(g.alternatives):
                for r in a.restrictions:
                    if isinstance(r.value, Ref) and r.value.target in vset:
                        self._edge(g.owner, r.value.target, ("alt-ref", i, r.category))

        self.out_adj: dict[str, list] = {u: [] for u in self.vertices}
        self.in_adj: dict[str, list] = {u: [] for u in self.vertices}
        for (s, t), labels in self.edges.items():
            for lab, k in labels.items():
                self.out_adj[s].append((lab, t, k))
                self.in_adj[t].append((lab, s, k))

    def _mask(self, value):
        if isinstance(value, Ref) and value.target in self.vset:
            return (1, "@")
        return (1, value.target) if isinstance(value, Ref) else (0, value)

    def _bundle(self, rs) -> tuple:
        return tuple(sorted((r.category,) + self._mask(r.value) for r in rs))

    def _edge(self, s, t, lab):
        self.edges.setdefault((s, t), Counter())[lab] += 1


def _refine(va: _View, vb: _View) -> tuple[dict, dict]:
    """Joint colour refinement over both documents."""
    table: dict = {}

    def compress(raw: dict) -> dict:
        return {u: table.setdefault(sig, len(table)) for u, sig in raw.items()}

    ca = compress({u: va.label[u] for u in va.vertices})
    cb = compress({u: vb.label[u] for u in vb.vertices})
    n_classes = len(set(ca.values()) | set(cb.values()))
    for _ in range(len(va.vertices) + 1):
        def step(view, col):
            return {u: (col[u],
                        tuple(sorted((lab, col[t], k) for lab, t, k in view.out_adj[u])),
                        tuple(sorted((lab, col[s], k) for lab, s, k in view.in_adj[u])))
                    for u in view.vertices}
        table = {}
        ca, cb = compress(step(va, ca)), compress(step(vb, cb))
        n = len(set(ca.values()) | set(cb.values()))
        if n == n_classes:
            break
        n_classes = n
    return ca, cb


def _content(doc: SemRep, f) -> tuple:
    """Everything in ``doc`` with vertex ids passed through ``f``."""
    def bundle(rs):
        return tuple(sorted((r.category,) + ((1, f(r.value.target))
                            if isinstance(r.value, Ref) else (0, r.value))
                            for r in rs))

    nodes = {f(n.id): (n.kind, bundle(n.restrictions), n.temporal_extent,
                       tuple(n.links), n.meta, tuple(n.extensions))
             for n in doc.nodes}
    variables = {f(v.id): tuple(f(d) for d in v.domain) for v in doc.variables}
    relations = Counter((f(r.source), f(r.target), bundle(r.restrictions),
                         tuple(r.extensions)) for r in doc.relations)
    groups = Counter((f(g.owner), tuple((bundle(x.restrictions), x.cert)
                                        for x in g.alternatives))
                     for g in doc.alt_groups)
    return nodes, variables, relations, groups


def _exact_match(a: SemRep, b: SemRep, phi: dict[str, str]) -> bool:
    return _content(a, lambda x: phi.get(x, x)) == _content(b, lambda x: x)


def find_isomorphism(a: SemRep, b: SemRep,
                     node_cap: int = DEFAULT_NODE_CAP) -> dict[str, str] | None:
    """Return a node/variable bijection witnessing ``a`` ≅ ``b``, or None.

    Relation and alt-group identifiers are matched implicitly (as
    multisets). Document identifiers are not compared.
    """
    for doc in (a, b):
        if len(doc.nodes) > node_cap:
            raise SizeLimit(f"document {doc.id} has {len(doc.nodes)} nodes "
                            f"(cap {node_cap})")
        require_integrity(doc)
    if (len(a.nodes), len(a.relations), len(a.alt_groups), len(a.variables)) != \
            (len(b.nodes), len(b.relations), len(b.alt_groups), len(b.variables)):
        return None
    if a.meta != b.meta or a.extensions != b.extensions:
        return None

    va, vb = _View(a), _View(b)
    ca, cb = _refine(va, vb)
    if Counter(ca.values()) != Counter(cb.values()):
        return None

    by_colour: dict[int, list[str]] = {}
    for u in vb.vertices:
        by_colour.setdefault(cb[u], []).append(u)
    order = sorted(va.vertices, key=lambda u: (len(by_colour[ca[u]]), ca[u]))
    empty: Counter = Counter()
    phi: dict[str, str] = {}
    used: set[str] = set()

    def consistent(u, w) -> bool:
        if va.edges.get((u, u), empty) != vb.edges.get((w, w), empty):
            return False
        for u2, w2 in phi.items():
            if va.edges.get((u, u2), empty) != vb.edges.get((w, w2), empty):
                return False
            if va.edges.get((u2, u), empty) != vb.edges.get((w2, w), empty):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return _exact_match(a, b, phi)
        u = order[i]
        for w in by_colour[ca[u]]:
            if w in used or not consistent(u, w):
                continue
            phi[u] = w
            used.add(w)
            if search(i + 1):
                return True
            del phi[u]
            used.discard(w)
        return False

    return dict(phi) if search(0) else None


def isomorphic(a: SemRep, b: SemRep, node_cap: int = DEFAULT_NODE_CAP) -> bool:
    return find_isomorphism(a, b, node_cap) is not None
