"""Rule-based subject-predicate-object extraction over dependency graphs.

For each predicate head (the root first, then every other verb that governs a
subject or object edge, in token order) the cascade fills three slots:

* subject: first outgoing edge whose relation contains ``subj``
* predicate: the head form, prefixed ``be`` for a passive subject and then
  ``not`` for a negation edge (so both give ``not be <verb>``)
* object: first ``obj`` edge, else first ``obl`` edge

Subject and object heads are then widened by ``compound`` edges, joined with
their conjuncts (``and``/``or`` inserted between them), and any slot still
holding a bare token index is resolved to that token's form. Heads with
neither a subject nor an object produce nothing.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .corpus import DepEdge, Sentence, Token

log = logging.getLogger(__name__)

RULES = ("predicate", "subject", "passive", "negation", "object", "oblique",
         "compound", "conjunction", "resolve_index")
_CONNECTORS = ("and", "or")


@dataclass(frozen=True)
class SrlTriple:
    subject: Optional[str]
    predicate: str
    object: Optional[str] = None
    subject_indices: tuple[int, ...] = ()
    predicate_index: Optional[int] = None
    object_indices: tuple[int, ...] = ()
    trace: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.predicate:
            raise ValueError("triple predicate is empty")

    @property
    def degenerate(self) -> bool:
        return self.subject is None and self.object is None

    def as_tuple(self):
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class SrlRuleConfig:
    subject_relation_substring: str = "subj"
    object_relation: str = "obj"
    oblique_relation: str = "obl"
    passive_relation: str = "subj:pass"
    negation_relation: str = "neg"
    compound_relation: str = "compound"
    conjunction_relations: frozenset[str] = frozenset({"conj:and", "conj:or", "cc"})
    # rule names from RULES to switch off; used for ablation and mutation checks
    disabled: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "conjunction_relations", frozenset(self.conjunction_relations))
        object.__setattr__(self, "disabled", frozenset(self.disabled))
        for name in ("subject_relation_substring", "object_relation", "oblique_relation",
                     "passive_relation", "negation_relation", "compound_relation"):
            if not getattr(self, name):
                raise ValueError(f"{name} is empty")
        if not self.conjunction_relations:
            raise ValueError("conjunction_relations is empty")
        unknown = self.disabled - set(RULES[1:])
        if unknown:
            raise ValueError(f"unknown or non-optional rules: {sorted(unknown)}")

    def on(self, rule: str) -> bool:
        return rule not in self.disabled


def _labelled(relation: str, label: str) -> bool:
    # "obl" matches "obl:to", "obl:in", ...
    return relation == label or relation.startswith(label + ":")


def _is_verbal(tok: Token) -> bool:
    return tok.upos in ("VERB", "AUX") or tok.xpos.startswith("VB") or tok.xpos == "MD"


class _Graph:
    def __init__(self, sentence: Sentence, edges: Iterable[DepEdge]):
        self.sentence = sentence
        self.out: dict[int, list[DepEdge]] = defaultdict(list)
        self.into: dict[int, list[DepEdge]] = defaultdict(list)
        self.root: Optional[int] = None
        for e in edges:  # already ordered by target
            if e.relation == "root" and e.source == 0:
                if self.root is None:
                    self.root = e.target
                continue
            self.out[e.source].append(e)
            self.into[e.target].append(e)


class _Slot:
    """A subject or object under construction: a head index, later widened."""

    def __init__(self, head: int):
        self.head = head
        self.indices = {head}
        self.text: Optional[str] = None  # set once compound/conjunction merged forms


def _compound_members(g: _Graph, head: int, cfg: SrlRuleConfig) -> set[int]:
    members = {head}
    for e in g.out.get(head, ()):
        if cfg.compound_relation in e.relation:
            members.add(e.target)
    for e in g.into.get(head, ()):
        if cfg.compound_relation in e.relation and e.source > 0:
            members.add(e.source)
    return members


def _connector(g: _Graph, rel: str, conjunct: int, cfg: SrlRuleConfig) -> str:
    _, _, suffix = rel.partition(":")
    if suffix in _CONNECTORS:
        return suffix
    for e in g.out.get(conjunct, ()):
        if e.relation in cfg.conjunction_relations and not e.relation.startswith("conj"):
            word = g.sentence.form(e.target).lower()
            if word in _CONNECTORS:
                return word
    return "and"


def _widen(g: _Graph, slot: _Slot, cfg: SrlRuleConfig, trace: list[str]) -> None:
    def group(head: int) -> list[int]:
        if cfg.on("compound"):
            members = _compound_members(g, head, cfg)
            if len(members) > 1 and "compound" not in trace:
                trace.append("compound")
            return sorted(members)
        return [head]

    parts = [group(slot.head)]
    connectors = []
    if cfg.on("conjunction"):
        for e in g.out.get(slot.head, ()):
            if e.relation in cfg.conjunction_relations and e.relation.startswith("conj"):
                connectors.append(_connector(g, e.relation, e.target, cfg))
                parts.append(group(e.target))
        if connectors and "conjunction" not in trace:
            trace.append("conjunction")
    if len(parts) == 1 and len(parts[0]) == 1:
        return
    words = [" ".join(g.sentence.form(i) for i in parts[0])]
    for conn, part in zip(connectors, parts[1:]):
        words.append(conn)
        words.append(" ".join(g.sentence.form(i) for i in part))
    slot.text = " ".join(words)
    slot.indices = {i for part in parts for i in part}


def _render(g: _Graph, slot: Optional[_Slot], cfg: SrlRuleConfig, trace: list[str]):
    if slot is None:
        return None, ()
    if slot.text is not None:
        return slot.text, tuple(sorted(slot.indices))
    # a bare index left over: resolve to the token form
    if cfg.on("resolve_index"):
        if "resolve_index" not in trace:
            trace.append("resolve_index")
        return g.sentence.form(slot.head), (slot.head,)
    return str(slot.head), (slot.head,)


def _triple_for(g: _Graph, head: int, cfg: SrlRuleConfig, is_root: bool) -> Optional[SrlTriple]:
    out = g.out.get(head, ())
    trace = ["predicate"]
    predicate = g.sentence.form(head)

    subject = None
    if cfg.on("subject"):
        for e in out:
            if cfg.subject_relation_substring in e.relation:
                subject = _Slot(e.target)
                trace.append("subject")
                break
    if cfg.on("passive") and any(cfg.passive_relation in e.relation for e in out):
        predicate = "be " + predicate
        trace.append("passive")
    if cfg.on("negation") and any(_labelled(e.relation, cfg.negation_relation) for e in out):
        predicate = "not " + predicate
        trace.append("negation")

    obj = None
    if cfg.on("object"):
        for e in out:
            if _labelled(e.relation, cfg.object_relation):
                obj = _Slot(e.target)
                trace.append("object")
                break
    if obj is None and cfg.on("oblique"):
        for e in out:
            if _labelled(e.relation, cfg.oblique_relation):
                obj = _Slot(e.target)
                trace.append("oblique")
                break

    if subject is None and obj is None:
        return None
    tok = g.sentence.token(head)
    if is_root and subject is None and (tok.upos or tok.xpos) and not _is_verbal(tok):
        # copular or verbless root: only kept with a subject
        return None

    for slot in (subject, obj):
        if slot is not None:
            _widen(g, slot, cfg, trace)
    subj_text, subj_idx = _render(g, subject, cfg, trace)
    obj_text, obj_idx = _render(g, obj, cfg, trace)
    return SrlTriple(subj_text, predicate, obj_text, subj_idx, head, obj_idx, tuple(trace))


def predicate_heads(g: _Graph, cfg: SrlRuleConfig) -> list[int]:
    if g.root is None:
        return []
    heads = [g.root]
    for tok in g.sentence.tokens:
        if tok.index == g.root or not _is_verbal(tok):
            continue
        for e in g.out.get(tok.index, ()):
            if cfg.subject_relation_substring in e.relation or _labelled(e.relation, cfg.object_relation):
                heads.append(tok.index)
                break
    return heads


DEFAULT_CONFIG = SrlRuleConfig()


def extract_triples(sentence: Sentence, cfg: SrlRuleConfig = DEFAULT_CONFIG) -> list[SrlTriple]:
    edges = sentence.enhanced_edges
    if not edges:
        if sentence.basic_edges:
            log.warning("sentence has no enhanced dependencies; using basic ones")
        edges = sentence.basic_edges
    g = _Graph(sentence, edges)
    triples = []
    for head in predicate_heads(g, cfg):
        t = _triple_for(g, head, cfg, head == g.root)
        if t is not None:
            triples.append(t)
    return triples


# ---------------------------------------------------------------------------
# JSON Lines triple files

@dataclass(frozen=True)
class TripleRecord:
    doc_id: str
    sentence_index: int
    triple: SrlTriple

    def to_json(self) -> dict:
        t = self.triple
        return {"doc_id": self.doc_id, "sentence_index": self.sentence_index,
                "subject": t.subject, "predicate": t.predicate, "object": t.object,
                "trace": list(t.trace)}

    @classmethod
    def from_json(cls, obj: dict) -> TripleRecord:
        try:
            triple = SrlTriple(obj.get("subject"), obj["predicate"], obj.get("object"),
                               trace=tuple(obj.get("trace") or ()))
            return cls(str(obj["doc_id"]), int(obj["sentence_index"]), triple)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad triple record {obj!r}: {exc}") from None


def dump_triples(records: Iterable[TripleRecord]) -> str:
    return "".join(json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True) + "\n"
                   for r in records)


def read_triples(path) -> list[TripleRecord]:
    return list(_iter_jsonl(path, TripleRecord.from_json))


def _iter_jsonl(path, convert) -> Iterator:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            try:
                yield convert(obj)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
