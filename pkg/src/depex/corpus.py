"""Sentences, dependency edges, CoNLL-U I/O and document statistics."""

from __future__ import annotations

import html
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

GENRES = ("generic", "domain")
LENGTH_CLASSES = ("short", "long")

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)


class ConlluError(ValueError):
    """Malformed CoNLL-U input. ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.message = message

    def __reduce__(self):  # survive the trip back from a worker process
        return type(self), (self.lineno, self.message)


class ConlluWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str = ""
    upos: str = ""
    xpos: str = ""

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if not self.form:
            raise ValueError(f"token {self.index} has an empty form")


@dataclass(frozen=True)
class DepEdge:
    source: int
    target: int
    relation: str

    def __post_init__(self):
        if self.source < 0 or self.target < 1:
            raise ValueError(f"bad edge endpoints {self.source}->{self.target}")
        if not self.relation:
            raise ValueError("edge relation is empty")


def _by_target(edges: Iterable[DepEdge]) -> tuple[DepEdge, ...]:
    # stable: the original order of a token's enhanced heads is kept
    return tuple(sorted(edges, key=lambda e: e.target))


@dataclass(frozen=True)
class Sentence:
    """A parsed sentence.

    Edges are stored grouped by target token (the order CoNLL-U writes them),
    so two sentences with the same edge sets compare equal regardless of the
    order the edges were supplied in.
    """

    tokens: tuple[Token, ...]
    basic_edges: tuple[DepEdge, ...] = ()
    enhanced_edges: tuple[DepEdge, ...] = ()
    text: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "basic_edges", _by_target(self.basic_edges))
        object.__setattr__(self, "enhanced_edges", _by_target(self.enhanced_edges))
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens, 1):
            if tok.index != i:
                raise ValueError(f"token indices must be consecutive from 1; position {i} has {tok.index}")
        for edge in self.basic_edges + self.enhanced_edges:
            if edge.target > n or edge.source > n:
                raise ValueError(f"edge {edge} refers to a token outside 1..{n}")
        if sum(e.relation == "root" for e in self.basic_edges) > 1:
            raise ValueError("more than one basic root edge")
        seen = set()
        for edge in self.basic_edges:
            if edge.target in seen:
                raise ValueError(f"token {edge.target} has more than one basic head")
            seen.add(edge.target)

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def form(self, index: int) -> str:
        return self.tokens[index - 1].form


@dataclass(frozen=True)
class Document:
    id: str
    genre: str
    length_class: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id is empty")
        if self.genre not in GENRES:
            raise ValueError(f"genre must be one of {GENRES}, got {self.genre!r}")
        if self.length_class not in LENGTH_CLASSES:
            raise ValueError(f"length_class must be one of {LENGTH_CLASSES}, got {self.length_class!r}")
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def tokens(self) -> list[Token]:
        """All tokens in document order; list position is the document-level token position."""
        return [tok for sent in self.sentences for tok in sent.tokens]


@dataclass(frozen=True)
class DocumentStats:
    total_sentences: int = 0
    total_tokens: int = 0

    def __add__(self, other: DocumentStats) -> DocumentStats:
        return DocumentStats(self.total_sentences + other.total_sentences,
                             self.total_tokens + other.total_tokens)


def compute_stats(doc: Document) -> DocumentStats:
    return DocumentStats(len(doc.sentences), sum(len(s.tokens) for s in doc.sentences))


# ---------------------------------------------------------------------------
# preprocessing

@dataclass(frozen=True)
class PreprocessConfig:
    strip_html_tags: bool = True
    strip_special_chars: bool = True
    collapse_whitespace: bool = True
    lowercase: bool = False


_TAG_RE = re.compile(r"<[^<>]*>")
_SPECIAL_RE = re.compile(r"[^\w\s]")


def _strip_html(text: str) -> str:
    # tags can be revealed by entity unescaping or by removing an inner tag
    while True:
        cleaned = html.unescape(_TAG_RE.sub("", text))
        if cleaned == text:
            return cleaned
        text = cleaned


def preprocess_text(raw: str, config: PreprocessConfig = PreprocessConfig()) -> str:
    """Apply the enabled cleaning steps in fixed order: html, special chars, whitespace, case."""
    text = raw
    if config.strip_html_tags:
        text = _strip_html(text)
    if config.strip_special_chars:
        text = _SPECIAL_RE.sub("", text)
    if config.collapse_whitespace:
        text = " ".join(text.split())
    if config.lowercase:
        text = text.lower()
    return text


# ---------------------------------------------------------------------------
# CoNLL-U

def _int_field(value: str, lineno: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConlluError(lineno, f"non-integer {column} {value!r}") from None


def _opt(value: str) -> str:
    return "" if value == "_" else value


def parse_conllu(text: str) -> list[Sentence]:
    """Parse CoNLL-U text into sentences.

    HEAD/DEPREL give ``basic_edges``, DEPS gives ``enhanced_edges``.
    Multiword ranges (``3-4``) and empty nodes (``3.1``) are skipped; a
    :class:`ConlluWarning` reports how many were dropped.
    """
    sentences: list[Sentence] = []
    skipped = 0
    tokens: list[Token] = []
    basic: list[DepEdge] = []
    enhanced: list[DepEdge] = []
    sent_text = ""
    start_line = 0

    def flush():
        nonlocal tokens, basic, enhanced, sent_text
        if tokens:
            try:
                sentences.append(Sentence(tuple(tokens), tuple(basic), tuple(enhanced), sent_text))
            except ValueError as exc:
                raise ConlluError(start_line, str(exc)) from None
        elif sent_text:
            raise ConlluError(start_line, "sentence block has no token lines")
        tokens, basic, enhanced, sent_text = [], [], [], ""

    for lineno, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if not tokens and not sent_text:
            start_line = lineno
        if line.startswith("#"):
            if line.startswith("# text = "):
                sent_text = line[len("# text = "):]
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluError(lineno, f"expected 10 tab-separated columns, got {len(cols)}")
        if "-" in cols[ID] or "." in cols[ID]:
            skipped += 1
            continue
        index = _int_field(cols[ID], lineno, "ID")
        if index != len(tokens) + 1:
            raise ConlluError(lineno, f"token ID {index} out of sequence")
        if not cols[FORM]:
            raise ConlluError(lineno, "empty FORM")
        tokens.append(Token(index, cols[FORM], _opt(cols[LEMMA]), _opt(cols[UPOS]), _opt(cols[XPOS])))
        if cols[HEAD] != "_":
            head = _int_field(cols[HEAD], lineno, "HEAD")
            if cols[DEPREL] in ("", "_"):
                raise ConlluError(lineno, "HEAD given without DEPREL")
            if head < 0:
                raise ConlluError(lineno, f"negative HEAD {head}")
            basic.append(DepEdge(head, index, cols[DEPREL]))
        if cols[DEPS] != "_":
            for pair in cols[DEPS].split("|"):
                head_s, sep, rel = pair.partition(":")
                if not sep or not rel:
                    raise ConlluError(lineno, f"bad DEPS entry {pair!r}")
                if "." in head_s:
                    skipped += 1
                    continue
                head = _int_field(head_s, lineno, "DEPS head")
                if head < 0:
                    raise ConlluError(lineno, f"negative DEPS head {head}")
                enhanced.append(DepEdge(head, index, rel))
    flush()
    if skipped:
        warnings.warn(f"skipped {skipped} multiword-token range or empty-node entries",
                      ConlluWarning, stacklevel=2)
    return sentences


def _field(value: str) -> str:
    return value if value else "_"


def serialize_conllu(sentences: Sequence[Sentence]) -> str:
    out: list[str] = []
    for sent in sentences:
        heads = {e.target: e for e in sent.basic_edges}
        deps: dict[int, list[str]] = {}
        for e in sent.enhanced_edges:
            deps.setdefault(e.target, []).append(f"{e.source}:{e.relation}")
        if sent.text:
            out.append(f"# text = {sent.text}")
        for tok in sent.tokens:
            edge = heads.get(tok.index)
            out.append("\t".join([
                str(tok.index), tok.form, _field(tok.lemma), _field(tok.upos), _field(tok.xpos), "_",
                str(edge.source) if edge else "_",
                edge.relation if edge else "_",
                "|".join(deps[tok.index]) if tok.index in deps else "_",
                "_",
            ]))
        out.append("")
    return "".join(line + "\n" for line in out)


def read_conllu(path) -> list[Sentence]:
    with open(path, encoding="utf-8") as f:
        return parse_conllu(f.read())


def write_conllu(path, sentences: Sequence[Sentence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize_conllu(sentences))
