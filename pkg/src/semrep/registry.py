"""Data category registry and registry-based validation.

A document is *well-formed* when it passes the structural integrity
check, and *valid* when additionally every restriction conforms to the
registry: known category, applicable to its owner, within its arity and
value space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from . import data
from .errors import AmbiguousMapping, DuplicateCategory, ParseError
from .model import (EVENT, PARTICIPANT, Ref, Restriction, SemRep,
                    check_integrity, is_category, require_integrity)
from .xmlio import ParseDiagnostics, read_tree

RELATION = "relation"
ALTERNATIVE = "alternative"
APPLICABILITY = (EVENT, PARTICIPANT, RELATION, ALTERNATIVE)

SINGLE = "single"
MULTIPLE = "multiple"

CLOSED = "closed"
TEXT = "text"
NUMBER = "number"
REFERENCE = "reference"
VALUE_SPACES = (CLOSED, TEXT, NUMBER, REFERENCE)

DEFAULT_APPLICABILITY = frozenset({EVENT, PARTICIPANT, RELATION})


@dataclass(frozen=True)
class CategorySpec:
    """Abstract definition of one data category.

    ``applies_to`` may contain ``"alternative"``, meaning the category may
    be left ambiguous inside an alt-group of an applicable owner.
    """
    name: str
    applies_to: frozenset = DEFAULT_APPLICABILITY
    arity: str = SINGLE
    value_space: str = TEXT
    values: tuple = ()
    definition: str = ""
    contextual: bool = False

    def __post_init__(self):
        object.__setattr__(self, "applies_to", frozenset(self.applies_to))
        object.__setattr__(self, "values", tuple(self.values))
        if not is_category(self.name):
            raise ValueError(f"invalid category name {self.name!r}")
        if not self.applies_to or not self.applies_to <= set(APPLICABILITY):
            raise ValueError(f"{self.name}: bad applicability {sorted(self.applies_to)}")
        if self.arity not in (SINGLE, MULTIPLE):
            raise ValueError(f"{self.name}: bad arity {self.arity!r}")
        if self.value_space not in VALUE_SPACES:
            raise ValueError(f"{self.name}: bad value space {self.value_space!r}")
        if self.value_space == CLOSED:
            if not self.values:
                raise ValueError(f"{self.name}: closed value list is empty")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"{self.name}: closed value list has duplicates")
        elif self.values:
            raise ValueError(f"{self.name}: values given for a {self.value_space} category")


@dataclass(frozen=True)
class Registry:
    id: str
    categories: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        seen = set()
        for spec in self.categories:
            if spec.name in seen:
                raise DuplicateCategory(spec.name)
            seen.add(spec.name)

    @property
    def by_name(self) -> dict[str, CategorySpec]:
        return {c.name: c for c in self.categories}

    def get(self, name: str) -> CategorySpec | None:
        for c in self.categories:
            if c.name == name:
                return c
        return None

    def __contains__(self, name) -> bool:
        return self.get(name) is not None

    def __len__(self) -> int:
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories)

    def names(self) -> list[str]:
        return [c.name for c in self.categories]

    def extend(self, specs, id: str | None = None) -> Registry:
        return Registry(id or self.id, self.categories + tuple(specs))

    def single_valued(self) -> frozenset[str]:
        return frozenset(c.name for c in self.categories if c.arity == SINGLE)


# -- file format -----------------------------------------------------------

def _fail(msg, el=None):
    raise ParseError(msg, el.line if el else None, el.col if el else None)


def load_registry(text) -> Registry:
    """Parse registry markup (``<registry id=..><category .../></registry>``)."""
    if not (text.strip() if isinstance(text, (str, bytes)) else text):
        return Registry("empty")
    diags = ParseDiagnostics()
    root = read_tree(text, diags)
    if root is None:
        first = diags.fatals()[0]
        raise ParseError(first.message, first.line, first.column, diags)
    if root.tag != "registry":
        _fail("root element must be <registry>", root)
    rid = root.attrib.get("id")
    if not rid:
        _fail("<registry> requires an 'id' attribute", root)
    specs = []
    names: set[str] = set()
    for el in root.children:
        if el.tag != "category":
            _fail(f"unexpected element <{el.tag}>", el)
        a = el.attrib
        name = a.get("name")
        if not name:
            _fail("<category> requires a 'name' attribute", el)
        if name in names:
            raise DuplicateCategory(f"{name} (line {el.line})")
        names.add(name)
        if "appliesTo" in a:
            applies = {s.strip() for s in a["appliesTo"].split(",") if s.strip()}
        else:
            applies = DEFAULT_APPLICABILITY
        contextual = a.get("contextual", "false")
        if contextual not in ("true", "false"):
            _fail(f"contextual must be true or false, not {contextual!r}", el)
        values, definition = [], ""
        for c in el.children:
            if c.tag == "value":
                values.append(c.text)
            elif c.tag == "definition":
                definition = " ".join(c.text.split())
            else:
                _fail(f"unexpected element <{c.tag}> in <category>", c)
        try:
            specs.append(CategorySpec(
                name, applies, a.get("arity", SINGLE),
                a.get("type", TEXT), tuple(values), definition,
                contextual == "true"))
        except ValueError as e:
            _fail(str(e), el)
    return Registry(rid, tuple(specs))


def load_registry_file(path) -> Registry:
    return load_registry(Path(path).read_bytes())


def dump_registry(reg: Registry) -> str:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f"<registry id={quoteattr(reg.id)}>"]
    for c in reg.categories:
        applies = ",".join(x for x in APPLICABILITY if x in c.applies_to)
        head = (f"  <category name={quoteattr(c.name)} appliesTo={quoteattr(applies)} "
                f"arity={quoteattr(c.arity)} type={quoteattr(c.value_space)}"
                + (' contextual="true"' if c.contextual else ""))
        if not (c.definition or c.values):
            lines.append(head + "/>")
            continue
        lines.append(head + ">")
        if c.definition:
            lines.append(f"    <definition>{escape(c.definition)}</definition>")
        for v in c.values:
            lines.append(f"    <value>{escape(v)}</value>")
        lines.append("  </category>")
    lines.append("</registry>")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def bundled_registry(name: str = "default") -> Registry:
    return load_registry_file(data.path(f"{name}.reg"))


def default_registry() -> Registry:
    return bundled_registry("default")


# -- validation ------------------------------------------------------------

WELL_FORMED_ONLY = "well_formed_only"
VALID = "valid"
ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    location: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.location}: {self.rule}: {self.message}"


@dataclass
class ValidationReport:
    level: str
    findings: list[Finding] = field(default_factory=list)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == WARNING]

    @property
    def valid(self) -> bool:
        return self.level == VALID

    def summary(self) -> str:
        status = "valid" if self.valid else "invalid"
        return f"{status}: {len(self.errors)} errors, {len(self.warnings)} warnings"


def _check_value(spec: CategorySpec, r: Restriction, doc_ids: set[str]):
    v = r.value
    if spec.value_space == CLOSED:
        if isinstance(v, Ref) or v not in spec.values:
            return "closed-value", f"{r} outside {{{', '.join(spec.values)}}}"
    elif spec.value_space == NUMBER:
        try:
            ok = not isinstance(v, Ref) and math.isfinite(float(v))
        except ValueError:
            ok = False
        if not ok:
            return "number-value", f"{r} is not a number"
    elif spec.value_space == REFERENCE:
        if not isinstance(v, Ref):
            return "reference-value", f"{r} is not a reference"
        if v.target not in doc_ids:
            return "reference-value", f"{r} does not resolve"
    elif isinstance(v, Ref):
        return "text-value", f"{r} is a reference, expected text"
    return None


def validate(doc: SemRep, reg: Registry, strict: bool = False) -> ValidationReport:
    """Check ``doc`` against ``reg``.

    Unknown categories are warnings unless ``strict``. Alternatives of one
    group never conflict with each other on arity; each alternative bundle
    is checked together with its owner's ground restrictions.
    """
    violations = check_integrity(doc)
    if violations:
        return ValidationReport(WELL_FORMED_ONLY, [
            Finding(ERROR, v.id, v.rule, v.message) for v in violations])

    findings: list[Finding] = []
    doc_ids = set(doc.all_ids())

    def check(location, owner_kind, restrictions, in_alternative=False):
        for r in restrictions:
            spec = reg.get(r.category)
            if spec is None:
                findings.append(Finding(ERROR if strict else WARNING, location,
                                        "unknown-category",
                                        f"category {r.category!r} not in registry {reg.id}"))
                continue
            if owner_kind not in spec.applies_to or (
                    in_alternative and ALTERNATIVE not in spec.applies_to):
                where = f"alternative of a {owner_kind}" if in_alternative else owner_kind
                findings.append(Finding(ERROR, location, "not-applicable",
                                        f"{r.category} does not apply to {where}"))
            bad = _check_value(spec, r, doc_ids)
            if bad:
                findings.append(Finding(ERROR, location, *bad))

    def arity(location, restrictions, ground=()):
        counts: dict[str, int] = {}
        for r in restrictions:
            counts[r.category] = counts.get(r.category, 0) + 1
        for r in ground:
            if r.category in counts:
                counts[r.category] += 1
        for cat, k in counts.items():
            spec = reg.get(cat)
            if spec is not None and spec.arity == SINGLE and k > 1:
                findings.append(Finding(ERROR, location, "arity",
                                        f"single-valued {cat} occurs {k} times"))

    for n in doc.nodes:
        check(n.id, n.kind, n.restrictions)
        arity(n.id, n.restrictions)
    for rel in doc.relations:
        check(rel.id, RELATION, rel.restrictions)
        arity(rel.id, rel.restrictions)
    owners = {n.id: n for n in doc.nodes}
    for g in doc.alt_groups:
        owner = owners[g.owner]
        for alt in g.alternatives:
            check(g.id, owner.kind, alt.restrictions, in_alternative=True)
            arity(g.id, alt.restrictions, owner.restrictions)

    level = VALID if not any(f.severity == ERROR for f in findings) else WELL_FORMED_ONLY
    return ValidationReport(level, findings)


# -- category mapping ------------------------------------------------------

@dataclass(frozen=True)
class CategoryPair:
    from_name: str
    to_name: str
    value_map: tuple = ()

    def map_value(self, value):
        if isinstance(value, str):
            for src, dst in self.value_map:
                if src == value:
                    return dst
        return value


@dataclass(frozen=True)
class CategoryMapping:
    pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for p in self.pairs:
            if p.from_name in seen:
                raise AmbiguousMapping(p.from_name)
            seen.add(p.from_name)

    @classmethod
    def parse(cls, text: str) -> CategoryMapping:
        """One pair per line: ``from to [fromValue=toValue ...]``; ``#`` comments."""
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParseError("mapping line needs 'from to'", lineno, 1)
            vm = []
            for item in parts[2:]:
                src, eq, dst = item.partition("=")
                if not eq:
                    raise ParseError(f"bad value mapping {item!r}", lineno, 1)
                vm.append((src, dst))
            pairs.append(CategoryPair(parts[0], parts[1], tuple(vm)))
        return cls(tuple(pairs))

    def lookup(self, name: str) -> CategoryPair | None:
        for p in self.pairs:
            if p.from_name == name:
                return p
        return None


def map_categories(doc: SemRep, m: CategoryMapping) -> SemRep:
    """Rename categories (and map values) per ``m``; structure is untouched."""
    if not isinstance(m, CategoryMapping):
        m = CategoryMapping(tuple(m))
    require_integrity(doc)

    def mapped(rs):
        out = []
        for r in rs:
            p = m.lookup(r.category)
            out.append(r if p is None
                       else Restriction(p.to_name, p.map_value(r.value)))
        return out

    result = doc.copy()
    for n in result.nodes:
        n.restrictions = mapped(n.restrictions)
    for r in result.relations:
        r.restrictions = mapped(r.restrictions)
    for g in result.alt_groups:
        for a in g.alternatives:
            a.restrictions = mapped(a.restrictions)
    return result


# -- registry comparison ---------------------------------------------------

DIFF_FIELDS = ("definition", "applies_to", "arity", "value_space", "contextual")


@dataclass
class RegistryDiff:
    only_in_a: list[str] = field(default_factory=list)
    only_in_b: list[str] = field(default_factory=list)
    changed: dict[str, list[tuple]] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.only_in_a or self.only_in_b or self.changed)

    def lines(self) -> list[str]:
        out = [f"only-in-a: {n}" for n in self.only_in_a]
        out += [f"only-in-b: {n}" for n in self.only_in_b]
        for name, diffs in self.changed.items():
            out.append(f"changed: {name}: " + ", ".join(f for f, _, _ in diffs))
        return out


def _field(spec: CategorySpec, name: str):
    if name == "value_space":
        return (spec.value_space, spec.values)
    if name == "applies_to":
        return tuple(sorted(spec.applies_to))
    return getattr(spec, name)


def registry_diff(a: Registry, b: Registry) -> RegistryDiff:
    da, db = a.by_name, b.by_name
    diff = RegistryDiff(
        only_in_a=[n for n in da if n not in db],
        only_in_b=[n for n in db if n not in da])
    for name, sa in da.items():
        sb = db.get(name)
        if sb is None:
            continue
        changes = [(f, _field(sa, f), _field(sb, f)) for f in DIFF_FIELDS
                   if _field(sa, f) != _field(sb, f)]
        if changes:
            diff.changed[name] = changes
    return diff
