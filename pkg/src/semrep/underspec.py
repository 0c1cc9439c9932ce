"""Readings of underspecified representations.

A reading picks one alternative per alt-group and one node per label
variable. Its score is the product of the chosen certs; enumeration order
is lexicographic over groups then variables, in document order.
"""

from __future__ import annotations

import copy
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import CapExceeded, IndexOutOfRange, OutsideDomain
from .model import GroundRep, Ref, Restriction, SemRep, require_integrity

DEFAULT_CAP = 10000


class Selection(NamedTuple):
    """Chosen alternative index per group and bound node per variable."""
    alternatives: tuple[int, ...]
    bindings: tuple[str, ...]


@dataclass
class ReadingSet:
    readings: list[GroundRep]
    source: str
    exhaustive: bool
    selections: list[Selection] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.readings)

    def __iter__(self):
        return iter(self.readings)

    def scores(self) -> list[float]:
        return [r.score for r in self.readings]


def _admissible(doc: SemRep, binding: dict[str, str], node_ids: set[str]) -> bool:
    for r in doc.relations:
        for end in (r.source, r.target):
            if binding.get(end, end) not in node_ids:
                return False
    return True


def _binding_count(doc: SemRep) -> int:
    # with integrity, domains hold only node ids, so every binding resolves
    return math.prod(len(v.domain) for v in doc.variables)


def reading_count(doc: SemRep) -> int:
    require_integrity(doc)
    return math.prod(len(g.alternatives) for g in doc.alt_groups) * _binding_count(doc)


def realize(doc: SemRep, selection: Selection) -> GroundRep:
    """Build the ground reading of ``doc`` for one selection."""
    binding = {v.id: n for v, n in zip(doc.variables, selection.bindings)}

    def sub(x: str) -> str:
        return binding.get(x, x)

    def restr(rs):
        return [Restriction(r.category, Ref(sub(r.value.target)))
                if isinstance(r.value, Ref) and r.value.target in binding else r
                for r in rs]

    nodes = copy.deepcopy(doc.nodes)
    by_id = {n.id: n for n in nodes}
    certs = []
    for g, i in zip(doc.alt_groups, selection.alternatives):
        alt = g.alternatives[i]
        by_id[g.owner].restrictions.extend(alt.restrictions)
        certs.append(alt.cert)
    for n in nodes:
        n.restrictions = restr(n.restrictions)
    relations = copy.deepcopy(doc.relations)
    for r in relations:
        r.source, r.target = sub(r.source), sub(r.target)
        r.restrictions = restr(r.restrictions)
    return GroundRep(doc.id, nodes, relations, [], [], copy.deepcopy(doc.meta),
                     list(doc.extensions), score=math.prod(certs))


def selections(doc: SemRep):
    """Yield every admissible :class:`Selection` in enumeration order."""
    node_ids = set(doc.node_ids())
    axes = [range(len(g.alternatives)) for g in doc.alt_groups]
    axes += [v.domain for v in doc.variables]
    n_groups = len(doc.alt_groups)
    for combo in itertools.product(*axes):
        binding = {v.id: n for v, n in zip(doc.variables, combo[n_groups:])}
        if _admissible(doc, binding, node_ids):
            yield Selection(tuple(combo[:n_groups]), tuple(combo[n_groups:]))


def enumerate_readings(doc: SemRep, cap: int = DEFAULT_CAP) -> ReadingSet:
    if cap < 1:
        raise ValueError("cap must be at least 1")
    require_integrity(doc)
    chosen = list(itertools.islice(selections(doc), cap + 1))
    exhaustive = len(chosen) <= cap
    chosen = chosen[:cap]
    return ReadingSet([realize(doc, s) for s in chosen], doc.id, exhaustive,
                      chosen)


def best_selection(doc: SemRep, cap: int = DEFAULT_CAP) -> Selection:
    require_integrity(doc)
    total = reading_count(doc)
    if total > cap:
        raise CapExceeded(f"{total} readings exceed cap {cap}")
    # the product is monotone in each factor, so per-group argmax is global
    # argmax; first maximal alternative wins ties
    picks = []
    for g in doc.alt_groups:
        certs = [a.cert for a in g.alternatives]
        picks.append(certs.index(max(certs)))
    if any(g.alternatives[i].cert == 0 for g, i in zip(doc.alt_groups, picks)):
        # every reading scores 0: the first enumerated one wins
        return next(selections(doc))
    bindings = tuple(v.domain[0] for v in doc.variables)
    return Selection(tuple(picks), bindings)


def best_reading(doc: SemRep, cap: int = DEFAULT_CAP) -> tuple[GroundRep, float]:
    g = realize(doc, best_selection(doc, cap))
    return g, g.score


def prune(doc: SemRep, group: str, keep: int) -> SemRep:
    """Reduce ``group`` to its ``keep``-th alternative (the group stays)."""
    require_integrity(doc)
    out = doc.copy()
    g = out.group(group)
    if not 0 <= keep < len(g.alternatives):
        raise IndexOutOfRange(f"{group} has {len(g.alternatives)} alternatives, "
                              f"index {keep} requested")
    g.alternatives = [g.alternatives[keep]]
    return out


def bind(doc: SemRep, variable: str, node: str) -> SemRep:
    """Instantiate ``variable`` with ``node`` and drop its declaration."""
    require_integrity(doc)
    var = doc.variable(variable)
    doc.node(node)
    if node not in var.domain:
        raise OutsideDomain(f"{node} not in domain of {variable}: {var.domain}")
    out = doc.copy()
    out.variables = [v for v in out.variables if v.id != variable]

    def restr(rs):
        return [Restriction(r.category, Ref(node))
                if isinstance(r.value, Ref) and r.value.target == variable else r
                for r in rs]

    for r in out.relations:
        if r.source == variable:
            r.source = node
        if r.target == variable:
            r.target = node
        r.restrictions = restr(r.restrictions)
    for n in out.nodes:
        n.restrictions = restr(n.restrictions)
    for g in out.alt_groups:
        for a in g.alternatives:
            a.restrictions = restr(a.restrictions)
    return out


def distinguishing_values(doc: SemRep, selection: Selection) -> list[str]:
    """Values that set this reading apart: chosen bundle values, then bindings."""
    out = []
    for g, i in zip(doc.alt_groups, selection.alternatives):
        out.extend(str(r.value) for r in g.alternatives[i].restrictions)
    for v, n in zip(doc.variables, selection.bindings):
        out.append(f"{v.id}={n}")
    return out
