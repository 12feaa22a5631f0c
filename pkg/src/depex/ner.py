"""Heuristic NER: collect nouns by POS, rank them by frequency, attach hypernyms."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .corpus import Document, Sentence

PROPER_NOUNS = frozenset({"NNP"})
ALL_NOUNS = frozenset({"NN", "NNS", "NNP", "NNPS"})
POS_PRESETS = {"proper": PROPER_NOUNS, "all": ALL_NOUNS}


@dataclass(frozen=True)
class NounCandidate:
    form: str
    lemma: str
    sentence_index: int
    token_index: int

    @property
    def key(self) -> str:
        """Frequency key: lowercased lemma, falling back to the form when no lemma was parsed."""
        return (self.lemma or self.form).lower()


@dataclass(frozen=True)
class RankedNoun:
    lemma: str
    count: int
    hypernym: Optional[str] = None


class Taxonomy:
    """Lemma -> hypernym label table."""

    def __init__(self, entries: dict[str, str] | None = None):
        self.entries: dict[str, str] = {}
        for lemma, label in (entries or {}).items():
            if not lemma or not label:
                raise ValueError(f"empty taxonomy entry {lemma!r} -> {label!r}")
            self.entries[lemma.lower()] = label

    def __len__(self):
        return len(self.entries)

    def __contains__(self, lemma):
        return lemma.lower() in self.entries

    @classmethod
    def load(cls, path) -> Taxonomy:
        """Read a ``lemma<TAB>hypernym`` file; ``#`` lines and blank lines are ignored."""
        entries = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                    raise ValueError(f"{path}:{lineno}: expected 'lemma<TAB>hypernym'")
                entries[parts[0].strip().lower()] = parts[1].strip()
        return cls(entries)


def extract_nouns(sentence: Sentence, pos_filter: Iterable[str] = PROPER_NOUNS,
                  sentence_index: int = 0) -> list[NounCandidate]:
    pos_filter = frozenset(pos_filter)
    if not pos_filter:
        raise ValueError("pos_filter is empty")
    return [NounCandidate(t.form, t.lemma, sentence_index, t.index)
            for t in sentence.tokens if t.xpos in pos_filter]


def document_nouns(doc: Document, pos_filter: Iterable[str] = PROPER_NOUNS) -> list[NounCandidate]:
    pos_filter = frozenset(pos_filter)
    out = []
    for i, sent in enumerate(doc.sentences):
        out.extend(extract_nouns(sent, pos_filter, i))
    return out


def map_hypernym(lemma: str, tax: Taxonomy) -> Optional[str]:
    if not lemma:
        return None
    return tax.entries.get(lemma.lower())


def rank_nouns(doc: Document, pos_filter: Iterable[str] = PROPER_NOUNS, k: int = 100,
               taxonomy: Taxonomy | None = None) -> list[RankedNoun]:
    """Top-``k`` noun lemmas by count; ties go to the lexicographically smaller lemma."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = Counter(c.key for c in document_nouns(doc, pos_filter))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [RankedNoun(lemma, n, map_hypernym(lemma, taxonomy) if taxonomy else None)
            for lemma, n in ranked]


def entity_positions(doc: Document, pos_filter: Iterable[str] = PROPER_NOUNS,
                     k: int | None = None) -> dict[int, str]:
    """Document-level token positions (0-based) tagged as entities.

    With ``k`` set, only occurrences of the top-``k`` lemmas count.
    """
    nouns = document_nouns(doc, pos_filter)
    if k is not None:
        keep = {r.lemma for r in rank_nouns(doc, pos_filter, k)}
        nouns = [c for c in nouns if c.key in keep]
    offsets = []
    total = 0
    for sent in doc.sentences:
        offsets.append(total)
        total += len(sent.tokens)
    return {offsets[c.sentence_index] + c.token_index - 1: c.form for c in nouns}
