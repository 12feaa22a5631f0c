"""Sequence-labelling dataset preparation.

Gazetteer annotation (BILUO), BILUO -> BIO conversion, BIO span decoding,
SRL frame broadcasting and decoding, and inverse-frequency class weights.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .srl import SrlTriple

SCHEME_PREFIXES = {"BILUO": frozenset("BILU"), "BIO": frozenset("BI")}
FRAME_LABELS = frozenset({"B-ARG0", "I-ARG0", "B-ARG1", "I-ARG1", "B-ARG2", "I-ARG2", "B-V", "O"})


class TagError(ValueError):
    def __init__(self, position: int, tag: str, reason: str):
        super().__init__(f"position {position}: {reason} ({tag!r})")
        self.position = position
        self.tag = tag


def split_tag(tag: str) -> tuple[str, str]:
    """``"B-PER"`` -> ``("B", "PER")``; ``"O"`` -> ``("O", "")``."""
    if tag == "O":
        return "O", ""
    prefix, sep, label = tag.partition("-")
    if not sep:
        return tag, ""
    return prefix, label


def check_tags(tags: Sequence[str], scheme: str) -> None:
    prefixes = SCHEME_PREFIXES[scheme]
    for i, tag in enumerate(tags):
        if tag == "O":
            continue
        prefix, label = split_tag(tag)
        if prefix not in prefixes or not label:
            raise TagError(i, tag, f"not a valid {scheme} tag")


@dataclass(frozen=True)
class LabeledSequence:
    tokens: tuple[str, ...]
    tags: tuple[str, ...]
    scheme: str = "BIO"

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if self.scheme not in SCHEME_PREFIXES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if len(self.tokens) != len(self.tags):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.tags)} tags")
        check_tags(self.tags, self.scheme)


@dataclass(frozen=True)
class GazetteerEntry:
    phrase: tuple[str, ...]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "phrase", tuple(self.phrase))
        if not self.phrase or not all(self.phrase):
            raise ValueError("gazetteer phrase is empty")
        if not self.label:
            raise ValueError("gazetteer label is empty")


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int  # inclusive
    label: str


# ---------------------------------------------------------------------------
# gazetteer

class Gazetteer:
    """Phrase table for leftmost-longest, case-insensitive matching.

    When a phrase is listed twice the first label wins.
    """

    def __init__(self, entries: Iterable[GazetteerEntry] = ()):
        self.table: dict[tuple[str, ...], str] = {}
        for e in entries:
            self.table.setdefault(tuple(w.lower() for w in e.phrase), e.label)
        self.longest = max((len(p) for p in self.table), default=0)

    def __len__(self):
        return len(self.table)

    @classmethod
    def load(cls, path) -> Gazetteer:
        entries = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'phrase<TAB>label'")
                try:
                    entries.append(GazetteerEntry(tuple(parts[0].lower().split()), parts[1].strip()))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        return cls(entries)


def gazetteer_tag(tokens: Sequence[str], gazetteer: Gazetteer | Iterable[GazetteerEntry]) -> LabeledSequence:
    if not isinstance(gazetteer, Gazetteer):
        gazetteer = Gazetteer(gazetteer)
    lowered = [t.lower() for t in tokens]
    tags = ["O"] * len(tokens)
    i = 0
    while i < len(tokens):
        for n in range(min(gazetteer.longest, len(tokens) - i), 0, -1):
            label = gazetteer.table.get(tuple(lowered[i:i + n]))
            if label is None:
                continue
            if n == 1:
                tags[i] = f"U-{label}"
            else:
                tags[i] = f"B-{label}"
                for j in range(i + 1, i + n - 1):
                    tags[j] = f"I-{label}"
                tags[i + n - 1] = f"L-{label}"
            i += n
            break
        else:
            i += 1
    return LabeledSequence(tuple(tokens), tuple(tags), "BILUO")


# ---------------------------------------------------------------------------
# scheme conversion and decoding

def biluo_to_bio(seq: LabeledSequence) -> LabeledSequence:
    if seq.scheme != "BILUO":
        raise ValueError(f"expected a BILUO sequence, got {seq.scheme}")
    out = []
    for i, tag in enumerate(seq.tags):
        prefix, label = split_tag(tag)
        if prefix == "L":
            out.append(f"I-{label}")
        elif prefix == "U":
            out.append(f"B-{label}")
        elif prefix in ("B", "I", "O"):
            out.append(tag)
        else:
            raise TagError(i, tag, "not a valid BILUO tag")
    return LabeledSequence(seq.tokens, tuple(out), "BIO")


def decode_spans(seq: LabeledSequence, strict: bool = False) -> list[EntitySpan]:
    """Spans from a BIO sequence.

    An ``I-X`` that does not continue an ``X`` span opens a new span
    (lenient), or raises :class:`TagError` when ``strict``.
    """
    if seq.scheme != "BIO":
        raise ValueError(f"expected a BIO sequence, got {seq.scheme}")
    return decode_bio_tags(seq.tags, strict)


def decode_bio_tags(tags: Sequence[str], strict: bool = False) -> list[EntitySpan]:
    spans = []
    start, label = None, None
    for i, tag in enumerate(tags):
        prefix, lab = split_tag(tag)
        if prefix == "I" and label == lab:
            continue
        if start is not None:
            spans.append(EntitySpan(start, i - 1, label))
            start, label = None, None
        if prefix == "B":
            start, label = i, lab
        elif prefix == "I":
            if strict:
                raise TagError(i, tag, "I tag without a preceding B or I of the same label")
            start, label = i, lab
    if start is not None:
        spans.append(EntitySpan(start, len(tags) - 1, label))
    return spans


# ---------------------------------------------------------------------------
# SRL frames

@dataclass(frozen=True)
class FrameSample:
    tokens: tuple[str, ...]
    verb: str
    frames: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) != len(self.tokens):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.frames)} frame tags")
        if self.frames.count("B-V") > 1:
            raise ValueError("frame sample has more than one B-V")

    def to_json(self) -> dict:
        return {"tokens": list(self.tokens), "verb": self.verb, "frames": list(self.frames)}

    @classmethod
    def from_json(cls, obj: dict) -> FrameSample:
        return cls(tuple(obj["tokens"]), obj["verb"], tuple(obj["frames"]))


def _annotation_parts(annotation) -> tuple[str, Sequence[str]]:
    if isinstance(annotation, Mapping):
        return annotation["verb"], annotation["frames"]
    verb, frames = annotation
    return verb, frames


def broadcast_frames(tokens: Sequence[str], frame_annotations: Iterable) -> list[FrameSample]:
    """One sample per annotated predicate, each with its own copy of ``tokens``.

    Annotations are ``{"verb": ..., "frames": [...]}`` mappings or
    ``(verb, frames)`` pairs. Tags outside the subject/predicate/object label
    set become ``O``.
    """
    tokens = tuple(tokens)
    samples = []
    for n, annotation in enumerate(frame_annotations):
        verb, frames = _annotation_parts(annotation)
        if len(frames) != len(tokens):
            raise ValueError(f"annotation {n} ({verb!r}) has {len(frames)} tags for {len(tokens)} tokens")
        kept = tuple(t if t in FRAME_LABELS else "O" for t in frames)
        samples.append(FrameSample(tuple(tokens), verb, kept))
    return samples


def frames_to_triple(sample: FrameSample) -> SrlTriple:
    try:
        v = sample.frames.index("B-V")
    except ValueError:
        raise ValueError(f"frame sample for {sample.verb!r} has no B-V tag") from None
    spans = {}
    for span in decode_bio_tags(sample.frames):
        spans.setdefault(span.label, span)

    def text(label):
        span = spans.get(label)
        if span is None:
            return None, ()
        idx = tuple(range(span.start + 1, span.end + 2))
        return " ".join(sample.tokens[span.start:span.end + 1]), idx

    trace = ["frame_verb"]
    subject, subj_idx = text("ARG0")
    if subject is not None:
        trace.append("frame_arg0")
    obj, obj_idx = text("ARG1")
    if obj is not None:
        trace.append("frame_arg1")
    else:
        obj, obj_idx = text("ARG2")
        if obj is not None:
            trace.append("frame_arg2")
    return SrlTriple(subject, sample.tokens[v], obj, subj_idx, v + 1, obj_idx, tuple(trace))


# ---------------------------------------------------------------------------
# class weights

def class_weights(counts: Mapping[str, int]) -> dict[str, float]:
    """Inverse-frequency weights ``N / (K * n_c)``; rarer labels weigh more."""
    if not counts:
        raise ValueError("no label counts")
    for label, n in counts.items():
        if n < 1:
            raise ValueError(f"label {label!r} has count {n}; all counts must be >= 1")
    total = sum(counts.values())
    k = len(counts)
    return {label: total / (k * n) for label, n in counts.items()}


def tag_counts(sequences: Iterable[Sequence[str]], skip_outside: bool = False) -> dict[str, int]:
    counts: dict[str, int] = {}
    for tags in sequences:
        for tag in tags:
            if skip_outside and tag == "O":
                continue
            counts[tag] = counts.get(tag, 0) + 1
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------------------
# files

def atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_labeled(path, scheme: str) -> list[LabeledSequence]:
    """Read ``token<TAB>tag`` lines, blank line between sentences."""
    out = []
    tokens, tags = [], []
    start = 1
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    for lineno, line in enumerate(lines + [""], 1):
        line = line.rstrip("\r")
        if not line.strip():
            if tokens:
                try:
                    out.append(LabeledSequence(tuple(tokens), tuple(tags), scheme))
                except TagError as exc:
                    raise ValueError(f"{path}:{start + exc.position}: {exc}") from None
            tokens, tags = [], []
            start = lineno + 1
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'token<TAB>tag'")
        tokens.append(parts[0])
        tags.append(parts[1])
    return out


def format_labeled(sequences: Iterable[LabeledSequence]) -> str:
    blocks = []
    for seq in sequences:
        blocks.append("".join(f"{tok}\t{tag}\n" for tok, tag in zip(seq.tokens, seq.tags)))
    return "\n".join(blocks)


def read_frames(path) -> list[FrameSample]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                out.append(FrameSample.from_json(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def format_frames(samples: Iterable[FrameSample]) -> str:
    return "".join(json.dumps(s.to_json(), ensure_ascii=False) + "\n" for s in samples)


def format_weights(weights: Mapping[str, float]) -> str:
    return json.dumps(dict(sorted(weights.items())), indent=2) + "\n"
