"""XML reading and writing of semantic representations.

Element and attribute names come from a :class:`FormatProfile`; the
vocabulary is deliberately configurable. Parsing is two-pass: expat builds
a small positioned tree, then the tree is interpreted under the profile.
Any fatal diagnostic means no document is returned.
"""

from __future__ import annotations

import json
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from urllib.parse import urljoin
from xml.parsers import expat

from .canonical import canonicalize
from .errors import InvalidURI, ParseError, ProfileError, UnknownLinkKind
from .model import (DOMAIN_MODEL, EVENT, LOWER_LEVEL, PARTICIPANT, AltGroup,
                    Alternative, ExternalLink, LabelVariable, MetaBlock, Node,
                    Ref, Relation, Restriction, SemRep, check_integrity,
                    has_scheme)

DEFAULT_NAMESPACE = "urn:semrep:1"
XML_NS = "http://www.w3.org/XML/1998/namespace"
LANG = "lang"

_XML_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")

LINK_KIND_NAMES = {"domainModel": DOMAIN_MODEL, "lowerLevel": LOWER_LEVEL}
LINK_KIND_ATTRS = {v: k for k, v in LINK_KIND_NAMES.items()}


@dataclass(frozen=True)
class FormatProfile:
    namespace_uri: str = DEFAULT_NAMESPACE
    document: str = "semRep"
    event: str = "event"
    participant: str = "participant"
    relation: str = "relation"
    alt_group: str = "alt"
    alternative: str = "choice"
    link: str = "link"
    meta: str = "meta"
    variable: str = "var"
    attr_id: str = "id"
    attr_source: str = "source"
    attr_target: str = "target"
    attr_cert: str = "cert"
    attr_kind: str = "kind"
    attr_href: str = "href"
    attr_owner: str = "owner"
    attr_start: str = "start"
    attr_end: str = "end"
    attr_domain: str = "domain"

    ELEMENT_ROLES = ("document", "event", "participant", "relation",
                     "alt_group", "alternative", "link", "meta", "variable")

    def __post_init__(self):
        for f in fields(self):
            if f.name == "namespace_uri":
                continue
            name = getattr(self, f.name)
            if not isinstance(name, str) or not _XML_NAME.match(name):
                raise ProfileError(f"{f.name}: {name!r} is not a valid XML name")
        names = [getattr(self, r) for r in self.ELEMENT_ROLES]
        if len(set(names)) != len(names):
            raise ProfileError("two structural roles share an element name")
        if self.namespace_uri and not has_scheme(self.namespace_uri):
            raise ProfileError(f"namespace {self.namespace_uri!r} is not a URI")

    @property
    def structural(self) -> frozenset[str]:
        return frozenset(getattr(self, r) for r in self.ELEMENT_ROLES)

    @classmethod
    def from_json(cls, text: str) -> FormatProfile:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"profile: {e.msg}", e.lineno, e.colno) from e
        if not isinstance(data, dict):
            raise ProfileError("profile must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ProfileError(f"unknown profile keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


DEFAULT_PROFILE = FormatProfile()


# -- diagnostics -----------------------------------------------------------

FATAL = "fatal"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int | None
    column: int | None
    message: str

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}" if self.line is not None else "-"
        return f"{where}: {self.severity}: {self.message}"


class ParseDiagnostics(list):
    """Ordered list of :class:`Diagnostic`."""

    @property
    def fatal(self) -> bool:
        return any(d.severity == FATAL for d in self)

    def fatals(self) -> list[Diagnostic]:
        return [d for d in self if d.severity == FATAL]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self if d.severity == WARNING]

    def add(self, severity, where, message):
        line, col = (where.line, where.col) if where is not None else (None, None)
        self.append(Diagnostic(severity, line, col, message))


# -- positioned tree -------------------------------------------------------

class _El:
    __slots__ = ("ns", "tag", "prefix", "attrib", "attr_prefix", "children",
                 "text", "tail", "line", "col")

    def __init__(self, ns, tag, attrib, line, col, prefix="", attr_prefix=None):
        self.ns, self.tag, self.attrib = ns, tag, attrib
        self.prefix = prefix
        self.attr_prefix = attr_prefix or {}
        self.children: list[_El] = []
        self.text = ""
        self.tail = ""
        self.line, self.col = line, col

    def content(self) -> str:
        return self.text + "".join(c.tail for c in self.children)


def _split(name: str) -> tuple[str, str]:
    return _split3(name)[:2]


def _split3(name: str) -> tuple[str, str, str]:
    """expat name (``uri local [prefix]`` or ``local``) as (uri, local, prefix)."""
    parts = name.split(" ")
    if len(parts) == 1:
        return "", name, ""
    return parts[0], parts[1], parts[2] if len(parts) > 2 else ""


def _clark(ns: str, local: str) -> str:
    return f"{{{ns}}}{local}" if ns else local


_TAG_RE = re.compile(
    r"<!--.*?-->|<!\[CDATA\[.*?\]\]>|<\?.*?\?>|<!DOCTYPE[^>]*>"
    r"|<(/?)([A-Za-z_][\w.\-:]*)(?:\s[^<>]*?)?(/?)>",
    re.S)


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def scan_tags(text: str) -> list[Diagnostic]:
    """Report unbalanced or malformed tags in markup expat rejected.

    expat stops at the first error; this lenient pass keeps going so every
    broken tag can be named.
    """
    out = []
    stack: list[tuple[str, int, int]] = []
    for m in _TAG_RE.finditer(text):
        closing, name, selfclose = m.groups()
        if name is None:
            continue
        line, col = _line_col(text, m.start())
        if text.startswith(">", m.end()):
            sl, sc = _line_col(text, m.end())
            out.append(Diagnostic(FATAL, sl, sc,
                                  f"stray '>' after tag <{name}>"))
        if selfclose:
            continue
        if not closing:
            stack.append((name, line, col))
            continue
        if stack and stack[-1][0] == name:
            stack.pop()
            continue
        if stack:
            top, tl, tc = stack[-1]
            out.append(Diagnostic(
                FATAL, line, col,
                f"end tag </{name}> does not match <{top}> opened at {tl}:{tc}"))
            if any(s[0] == name for s in stack):
                while stack[-1][0] != name:
                    stack.pop()
            stack.pop()
        else:
            out.append(Diagnostic(FATAL, line, col,
                                  f"end tag </{name}> without start tag"))
    for name, line, col in stack:
        out.append(Diagnostic(FATAL, line, col, f"element <{name}> is never closed"))
    return out


def read_tree(text, diags: ParseDiagnostics) -> _El | None:
    """Build a positioned element tree; returns None on malformed markup."""
    if isinstance(text, str):
        parser = expat.ParserCreate("UTF-8", " ")
        data = text.encode("utf-8")
    else:
        parser = expat.ParserCreate(None, " ")
        data = text
    parser.namespace_prefixes = True
    root: list[_El] = []
    stack: list[_El] = []

    def start(name, attrs):
        ns, local, prefix = _split3(name)
        attrib, attr_prefix = {}, {}
        for key, value in attrs.items():
            a_ns, a_local, a_prefix = _split3(key)
            key = f"{a_ns} {a_local}" if a_ns else a_local
            attrib[key] = value
            if a_prefix:
                attr_prefix[key] = a_prefix
        el = _El(ns, local, attrib, parser.CurrentLineNumber,
                 parser.CurrentColumnNumber + 1, prefix, attr_prefix)
        if stack:
            stack[-1].children.append(el)
        else:
            root.append(el)
        stack.append(el)

    def end(name):
        stack.pop()

    def chars(data):
        if not stack:
            return
        cur = stack[-1]
        if cur.children:
            cur.children[-1].tail += data
        else:
            cur.text += data

    def doctype(name, sysid, pubid, has_internal):
        diags.append(Diagnostic(WARNING, parser.CurrentLineNumber,
                                parser.CurrentColumnNumber + 1,
                                "document type declaration ignored"))

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.StartDoctypeDeclHandler = doctype
    parser.SetParamEntityParsing(expat.XML_PARAM_ENTITY_PARSING_NEVER)
    try:
        parser.Parse(data, True)
    except expat.ExpatError as e:
        diags.append(Diagnostic(FATAL, e.lineno, e.offset + 1,
                                f"malformed markup: {expat.ErrorString(e.code)}"))
        try:
            source = text if isinstance(text, str) else text.decode("utf-8", "replace")
        except Exception:  # pragma: no cover - decoding with replace cannot fail
            source = ""
        for d in scan_tags(source):
            if d.line != e.lineno or "does not match" not in d.message:
                diags.append(d)
        return None
    return root[0]


def _blob_markup(el: _El, scope: dict[str, str | None]) -> str:
    """Re-emit ``el`` with its source prefixes, declaring whatever is not in scope."""
    scope = dict(scope)
    decls = []

    def need(prefix, ns):
        if scope.get(prefix, None) != ns:
            scope[prefix] = ns
            decls.append(f' xmlns:{prefix}="{_attr(ns)}"' if prefix
                         else f' xmlns="{_attr(ns)}"')

    need(el.prefix, el.ns)
    attrs = []
    for key, value in el.attrib.items():
        ns, local = _split(key)
        prefix = el.attr_prefix.get(key, "")
        if prefix and prefix != "xml":
            need(prefix, ns)
        attrs.append(f' {prefix + ":" if prefix else ""}{local}="{_attr(value)}"')
    name = f"{el.prefix}:{el.tag}" if el.prefix else el.tag
    inner = _text(el.text) + "".join(
        _blob_markup(c, scope) + _text(c.tail) for c in el.children)
    return f"<{name}{''.join(decls)}{''.join(attrs)}>{inner}</{name}>"


def _blob(el: _El) -> str:
    """Self-contained canonical text of a foreign-namespace subtree.

    Source prefixes are kept; the blob never relies on the host document's
    namespace declarations.
    """
    text = ET.canonicalize(_blob_markup(el, {"xml": XML_NS}))
    # c14n drops a redundant xmlns="" on the apex; inside a host document
    # with a default namespace it is not redundant
    head = re.match(r"<[^>]*>", text).group(0)
    if "xmlns=" not in head and re.search(r"<[A-Za-z_][\w.\-]*[\s/>]", text):
        name = re.match(r"<[^\s/>]+", text)
        text = text[:name.end()] + ' xmlns=""' + text[name.end():]
    return text


# -- links -----------------------------------------------------------------

def parse_link(href: str, kind: str, base: str | None = None) -> ExternalLink:
    """Split ``href`` at the first ``#``; the fragment is kept opaque.

    ``kind`` is the markup value (``domainModel`` or ``lowerLevel``).
    Relative references need a ``base`` URI to resolve against.
    """
    if kind not in LINK_KIND_NAMES:
        raise UnknownLinkKind(kind)
    uri, sep, fragment = href.partition("#")
    if not has_scheme(uri):
        if base is None or not has_scheme(base):
            raise InvalidURI(href)
        uri = urljoin(base, uri)
    return ExternalLink(LINK_KIND_NAMES[kind], uri, fragment if sep else None)


# -- parse -----------------------------------------------------------------

class _Reader:
    def __init__(self, profile: FormatProfile, diags: ParseDiagnostics,
                 base: str | None):
        self.p = profile
        self.diags = diags
        self.base = base
        self.positions: dict[str, _El] = {}
        self.unnamed_relations: list[tuple[Relation, _El]] = []
        self.unnamed_groups: list[tuple[AltGroup, _El]] = []

    def fatal(self, el, msg):
        self.diags.add(FATAL, el, msg)

    def warn(self, el, msg):
        self.diags.add(WARNING, el, msg)

    def ours(self, el: _El) -> bool:
        return el.ns in ("", self.p.namespace_uri)

    def check_attrs(self, el: _El, allowed: set[str]):
        for key in el.attrib:
            if key not in allowed:
                self.warn(el, f"unknown attribute {_clark(*_split(key))!r} "
                              f"on <{el.tag}> ignored")

    def no_text(self, el: _El):
        if el.content().strip():
            self.fatal(el, f"unexpected text inside <{el.tag}>")

    def remember(self, ident, el):
        if ident is not None:
            self.positions.setdefault(ident, el)

    # document

    def document(self, root: _El) -> SemRep | None:
        p = self.p
        if not self.ours(root) or root.tag != p.document:
            self.fatal(root, f"root element must be <{p.document}>")
            return None
        ident = root.attrib.get(p.attr_id)
        if ident is None:
            self.fatal(root, f"<{p.document}> requires an {p.attr_id!r} attribute")
            ident = "_"
        if f"{XML_NS} lang" in root.attrib:
            self.warn(root, "xml:lang on the document element is ignored")
        self.check_attrs(root, {p.attr_id, f"{XML_NS} lang"})
        self.no_text(root)
        doc = SemRep(ident)
        seen_meta = False
        for el in root.children:
            if not self.ours(el):
                doc.extensions.append(_blob(el))
            elif el.tag in (p.event, p.participant):
                self.node(el, doc)
            elif el.tag == p.relation:
                self.relation(el, doc)
            elif el.tag == p.variable:
                self.variable(el, doc)
            elif el.tag == p.alt_group:
                owner = el.attrib.get(p.attr_owner)
                if owner is None:
                    self.fatal(el, f"<{p.alt_group}> outside a node needs {p.attr_owner!r}")
                else:
                    self.group(el, doc, owner, top_level=True)
            elif el.tag == p.meta:
                if seen_meta:
                    self.fatal(el, f"more than one <{p.meta}> block")
                seen_meta = True
                doc.meta = self.meta(el)
            else:
                self.fatal(el, f"unexpected element <{el.tag}> in <{p.document}>")
        self.name_unnamed(doc)
        return doc

    def name_unnamed(self, doc: SemRep):
        for r, el in self.unnamed_relations:
            r.id = doc._fresh("r")
            self.positions.setdefault(r.id, el)
        for g, el in self.unnamed_groups:
            g.id = doc._fresh("a")
            self.positions.setdefault(g.id, el)

    def node(self, el: _El, doc: SemRep):
        p = self.p
        kind = EVENT if el.tag == p.event else PARTICIPANT
        ident = el.attrib.get(p.attr_id)
        if ident is None:
            self.fatal(el, f"<{el.tag}> requires an {p.attr_id!r} attribute")
            return
        self.remember(ident, el)
        node = Node(ident, kind)
        lang = el.attrib.get(f"{XML_NS} lang")
        if lang is not None:
            node.restrictions.append(Restriction(LANG, lang))
        start, end = el.attrib.get(p.attr_start), el.attrib.get(p.attr_end)
        if (start is None) != (end is None):
            self.fatal(el, f"{p.attr_start!r} and {p.attr_end!r} must appear together")
        elif start is not None:
            try:
                node.temporal_extent = (int(start), int(end))
            except ValueError:
                self.fatal(el, "temporal extent must be integer milliseconds")
        self.check_attrs(el, {p.attr_id, p.attr_start, p.attr_end,
                              f"{XML_NS} lang"})
        self.no_text(el)
        seen_meta = False
        for c in el.children:
            if not self.ours(c):
                node.extensions.append(_blob(c))
            elif c.tag == p.link:
                self.link(c, node)
            elif c.tag == p.meta:
                if seen_meta:
                    self.fatal(c, f"more than one <{p.meta}> block")
                seen_meta = True
                node.meta = self.meta(c)
            elif c.tag == p.alt_group:
                self.group(c, doc, ident, extensions=node.extensions)
            elif c.tag in p.structural:
                self.fatal(c, f"<{c.tag}> not allowed inside <{el.tag}>")
            else:
                r = self.restriction(c)
                if r is not None:
                    node.restrictions.append(r)
        doc.nodes.append(node)

    def restriction(self, el: _El, allow_cert=False) -> Restriction | None:
        p = self.p
        if el.children:
            self.fatal(el, f"restriction <{el.tag}> must not contain elements")
            return None
        allowed = {p.attr_target} | ({p.attr_cert} if allow_cert else set())
        self.check_attrs(el, allowed)
        target = el.attrib.get(p.attr_target)
        if target is not None:
            if el.text:
                self.fatal(el, f"restriction <{el.tag}> has both text and "
                               f"a {p.attr_target!r} reference")
                return None
            return Restriction(el.tag, Ref(target))
        return Restriction(el.tag, el.text)

    def relation(self, el: _El, doc: SemRep):
        p = self.p
        ident = el.attrib.get(p.attr_id)
        src, tgt = el.attrib.get(p.attr_source), el.attrib.get(p.attr_target)
        if src is None or tgt is None:
            self.fatal(el, f"<{el.tag}> requires {p.attr_source!r} and "
                           f"{p.attr_target!r}")
            return
        self.check_attrs(el, {p.attr_id, p.attr_source, p.attr_target})
        self.no_text(el)
        rel = Relation(ident or "", src, tgt)
        for c in el.children:
            if not self.ours(c):
                rel.extensions.append(_blob(c))
            elif c.tag in p.structural:
                self.fatal(c, f"<{c.tag}> not allowed inside <{el.tag}>")
            else:
                r = self.restriction(c)
                if r is not None:
                    rel.restrictions.append(r)
        if ident is None:
            self.unnamed_relations.append((rel, el))
        self.remember(ident, el)
        doc.relations.append(rel)

    def cert(self, el: _El) -> float | None:
        raw = el.attrib.get(self.p.attr_cert)
        if raw is None:
            self.fatal(el, f"alternative needs a {self.p.attr_cert!r} attribute")
            return None
        try:
            value = float(raw)
        except ValueError:
            self.fatal(el, f"cert {raw!r} is not a number")
            return None
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            self.fatal(el, f"cert {raw} outside [0, 1]")
            return None
        return value

    def group(self, el: _El, doc: SemRep, owner: str, top_level=False,
              extensions=None):
        p = self.p
        ident = el.attrib.get(p.attr_id)
        allowed = {p.attr_id} | ({p.attr_owner} if top_level else set())
        self.check_attrs(el, allowed)
        self.no_text(el)
        group = AltGroup(ident or "", owner)
        for c in el.children:
            if not self.ours(c):
                if extensions is not None:
                    extensions.append(_blob(c))
                else:
                    doc.extensions.append(_blob(c))
            elif c.tag == p.alternative:
                self.check_attrs(c, {p.attr_cert})
                self.no_text(c)
                cert = self.cert(c)
                bundle = []
                for r_el in c.children:
                    if not self.ours(r_el) or r_el.tag in p.structural:
                        self.fatal(r_el, f"<{r_el.tag}> not allowed inside "
                                         f"<{p.alternative}>")
                        continue
                    r = self.restriction(r_el)
                    if r is not None:
                        bundle.append(r)
                if cert is not None:
                    group.alternatives.append(Alternative(bundle, cert))
            elif c.tag in p.structural:
                self.fatal(c, f"<{c.tag}> not allowed inside <{p.alt_group}>")
            else:
                # shorthand: a bare restriction carrying its own cert
                cert = self.cert(c)
                r = self.restriction(c, allow_cert=True)
                if cert is not None and r is not None:
                    group.alternatives.append(Alternative([r], cert))
        if not group.alternatives:
            self.fatal(el, f"<{p.alt_group}> has no alternatives")
        if ident is None:
            self.unnamed_groups.append((group, el))
        self.remember(ident, el)
        doc.alt_groups.append(group)

    def variable(self, el: _El, doc: SemRep):
        p = self.p
        ident = el.attrib.get(p.attr_id)
        if ident is None:
            self.fatal(el, f"<{el.tag}> requires an {p.attr_id!r} attribute")
            return
        self.check_attrs(el, {p.attr_id, p.attr_domain})
        self.no_text(el)
        if el.children:
            self.fatal(el, f"<{el.tag}> must be empty")
        self.remember(ident, el)
        domain = el.attrib.get(p.attr_domain, "").split()
        doc.variables.append(LabelVariable(ident, domain))

    def link(self, el: _El, node: Node):
        p = self.p
        self.check_attrs(el, {p.attr_kind, p.attr_href})
        href, kind = el.attrib.get(p.attr_href), el.attrib.get(p.attr_kind)
        if href is None or kind is None:
            self.fatal(el, f"<{p.link}> requires {p.attr_kind!r} and {p.attr_href!r}")
            return
        try:
            node.links.append(parse_link(href, kind, self.base))
        except InvalidURI:
            self.fatal(el, f"link target {href!r} is not a URI")
        except UnknownLinkKind:
            self.fatal(el, f"unknown link kind {kind!r}")

    def meta(self, el: _El) -> MetaBlock:
        meta = MetaBlock()
        self.check_attrs(el, set())
        self.no_text(el)
        for c in el.children:
            a = c.attrib
            if c.tag == "environment":
                self.check_attrs(c, {"timestamp", "spatial"})
                if "timestamp" in a:
                    try:
                        meta.timestamp = int(a["timestamp"])
                    except ValueError:
                        self.fatal(c, "timestamp must be integer milliseconds")
                meta.spatial = a.get("spatial")
            elif c.tag == "processing":
                self.check_attrs(c, {"producer", "confidence"})
                meta.producer = a.get("producer")
                if "confidence" in a:
                    try:
                        meta.confidence = float(a["confidence"])
                    except ValueError:
                        self.fatal(c, "confidence must be a number")
                    else:
                        if not 0.0 <= meta.confidence <= 1.0:
                            self.fatal(c, "confidence outside [0, 1]")
            elif c.tag == "interactional":
                self.check_attrs(c, {"speaker", "addressees"})
                meta.speaker = a.get("speaker")
                meta.addressees = tuple(a.get("addressees", "").split())
            else:
                self.warn(c, f"unknown meta element <{c.tag}> ignored")
        return meta


def parse(text, profile: FormatProfile = DEFAULT_PROFILE,
          base_uri: str | None = None) -> tuple[SemRep | None, ParseDiagnostics]:
    """Parse markup into a document; ``(None, diags)`` when anything is fatal."""
    diags = ParseDiagnostics()
    root = read_tree(text, diags)
    if root is None:
        return None, diags
    reader = _Reader(profile, diags, base_uri)
    doc = reader.document(root)
    if doc is None or diags.fatal:
        return None, diags
    for v in check_integrity(doc):
        el = reader.positions.get(v.id, root)
        diags.add(FATAL, el, f"{v.id}: {v.message} [{v.rule}]")
    if diags.fatal:
        return None, diags
    return doc, diags


def loads(text, profile: FormatProfile = DEFAULT_PROFILE,
          base_uri: str | None = None) -> SemRep:
    """Like :func:`parse` but raise :class:`ParseError` on fatal problems."""
    doc, diags = parse(text, profile, base_uri)
    if doc is None:
        first = diags.fatals()[0]
        raise ParseError(first.message, first.line, first.column, diags)
    return doc


def load(path, profile: FormatProfile = DEFAULT_PROFILE) -> SemRep:
    path = Path(path)
    return loads(path.read_bytes(), profile, path.resolve().as_uri())


# -- serialize -------------------------------------------------------------

_ILLEGAL = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f￾￿]")


def _check_chars(s: str) -> str:
    if _ILLEGAL.search(s):
        raise ValueError(f"text not representable in XML: {s!r}")
    return s


def _attr(s: str) -> str:
    _check_chars(s)
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("\t", "&#9;").replace("\n", "&#10;")
            .replace("\r", "&#13;"))


def _text(s: str) -> str:
    _check_chars(s)
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("\r", "&#13;"))


def _num(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


class _Writer:
    def __init__(self, profile: FormatProfile):
        self.p = profile
        self.lines: list[str] = []

    def emit(self, depth: int, s: str):
        self.lines.append("  " * depth + s)

    def tag(self, name: str, attrs) -> str:
        return name + "".join(f' {k}="{_attr(v)}"' for k, v in attrs)

    def restriction(self, depth, r: Restriction):
        if not _XML_NAME.match(r.category) or r.category in self.p.structural:
            raise ValueError(f"category {r.category!r} cannot be written as an "
                             f"element name under this profile")
        if isinstance(r.value, Ref):
            self.emit(depth, f'<{self.tag(r.category, [(self.p.attr_target, r.value.target)])}/>')
        elif r.value == "":
            self.emit(depth, f"<{r.category}/>")
        else:
            self.emit(depth, f"<{r.category}>{_text(r.value)}</{r.category}>")

    def meta(self, depth, meta: MetaBlock):
        if meta.is_empty():
            return
        self.emit(depth, f"<{self.p.meta}>")
        env = [(k, _num(getattr(meta, k))) for k in ("timestamp", "spatial")
               if getattr(meta, k) is not None]
        proc = [(k, _num(getattr(meta, k))) for k in ("producer", "confidence")
                if getattr(meta, k) is not None]
        inter = []
        if meta.speaker is not None:
            inter.append(("speaker", meta.speaker))
        if meta.addressees:
            inter.append(("addressees", " ".join(meta.addressees)))
        for name, attrs in (("environment", env), ("processing", proc),
                            ("interactional", inter)):
            if attrs:
                self.emit(depth + 1, f"<{self.tag(name, attrs)}/>")
        self.emit(depth, f"</{self.p.meta}>")

    def node(self, depth, n: Node, groups):
        p = self.p
        name = p.event if n.kind == EVENT else p.participant
        attrs = [(p.attr_id, n.id)]
        if n.temporal_extent is not None:
            attrs += [(p.attr_start, str(n.temporal_extent[0])),
                      (p.attr_end, str(n.temporal_extent[1]))]
        if not (n.restrictions or n.links or not n.meta.is_empty()
                or groups or n.extensions):
            self.emit(depth, f"<{self.tag(name, attrs)}/>")
            return
        self.emit(depth, f"<{self.tag(name, attrs)}>")
        for r in n.restrictions:
            self.restriction(depth + 1, r)
        for link in n.links:
            self.emit(depth + 1, "<" + self.tag(p.link, [
                (p.attr_kind, LINK_KIND_ATTRS[link.kind]),
                (p.attr_href, link.href)]) + "/>")
        self.meta(depth + 1, n.meta)
        for g in groups:
            self.emit(depth + 1, f"<{self.tag(p.alt_group, [(p.attr_id, g.id)])}>")
            for a in g.alternatives:
                head = self.tag(p.alternative, [(p.attr_cert, repr(float(a.cert)))])
                if not a.restrictions:
                    self.emit(depth + 2, f"<{head}/>")
                    continue
                self.emit(depth + 2, f"<{head}>")
                for r in a.restrictions:
                    self.restriction(depth + 3, r)
                self.emit(depth + 2, f"</{p.alternative}>")
            self.emit(depth + 1, f"</{p.alt_group}>")
        for blob in n.extensions:
            self.emit(depth + 1, blob)
        self.emit(depth, f"</{name}>")


def serialize(doc: SemRep, profile: FormatProfile = DEFAULT_PROFILE) -> str:
    """Canonical UTF-8 markup for ``doc`` (with XML declaration)."""
    doc = canonicalize(doc)
    p = profile
    w = _Writer(p)
    w.lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    root_attrs = []
    if p.namespace_uri:
        root_attrs.append(("xmlns", p.namespace_uri))
    root_attrs.append((p.attr_id, doc.id))
    head = w.tag(p.document, root_attrs)
    if not (doc.nodes or doc.relations or doc.variables or doc.extensions
            or not doc.meta.is_empty()):
        w.lines.append(f"<{head}/>")
        return "\n".join(w.lines) + "\n"
    w.lines.append(f"<{head}>")
    w.meta(1, doc.meta)
    groups: dict[str, list[AltGroup]] = {}
    for g in doc.alt_groups:
        groups.setdefault(g.owner, []).append(g)
    for n in doc.nodes:
        w.node(1, n, groups.get(n.id, []))
    for v in doc.variables:
        w.emit(1, "<" + w.tag(p.variable, [(p.attr_id, v.id),
                                           (p.attr_domain, " ".join(v.domain))]) + "/>")
    for r in doc.relations:
        head = w.tag(p.relation, [(p.attr_id, r.id), (p.attr_source, r.source),
                                  (p.attr_target, r.target)])
        if not (r.restrictions or r.extensions):
            w.emit(1, f"<{head}/>")
            continue
        w.emit(1, f"<{head}>")
        for x in r.restrictions:
            w.restriction(2, x)
        for blob in r.extensions:
            w.emit(2, blob)
        w.emit(1, f"</{p.relation}>")
    for blob in doc.extensions:
        w.emit(1, blob)
    w.lines.append(f"</{p.document}>")
    return "\n".join(w.lines) + "\n"


def serialize_bytes(doc: SemRep, profile: FormatProfile = DEFAULT_PROFILE) -> bytes:
    return serialize(doc, profile).encode("utf-8")
