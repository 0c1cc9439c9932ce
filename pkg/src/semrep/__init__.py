"""Multimodal semantic representation toolkit.

Typed semantic graphs of events, participants, restrictions and relations;
underspecification through certainty-weighted alternatives and label
variables; registry-driven validation; an XML interchange format; and
fusion of partial modality-specific representations.
"""

from .canonical import canonical_equal, canonicalize, find_isomorphism, isomorphic
from .errors import *  # noqa: F401,F403
from .fusion import (Conflict, ConflictReport, Correspondence, FusionSession,
                     assimilate, merge, unify_nodes)
from .model import (EVENT, PARTICIPANT, AltGroup, Alternative, ExternalLink,
                    GroundRep, LabelVariable, MetaBlock, Node, Ref, Relation,
                    Restriction, SemRep, Violation, check_integrity, rename_ids)
from .registry import (CategoryMapping, CategoryPair, CategorySpec, Registry,
                       ValidationReport, default_registry, load_registry,
                       map_categories, registry_diff, validate)
from .semantics import Kind, Rel, Restr, Temporal, denote, encode_collective_quantifier
from .underspec import (ReadingSet, best_reading, bind, enumerate_readings,
                        prune, reading_count)
from .xmlio import (DEFAULT_PROFILE, FormatProfile, ParseDiagnostics, load,
                    loads, parse, parse_link, serialize)

__version__ = "0.1.0"
