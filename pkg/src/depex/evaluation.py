"""NER and SRL scoring.

NER predictions are compared with a benchmark by document-level token
position. In ``symbolic`` mode only nouns were extracted, so there are no true
negatives and accuracy is reported as not applicable. In ``data_driven`` mode
every token that is neither predicted nor benchmarked is a true negative.

SRL triples are compared with benchmark keywords: a slot matches when the
extracted string contains the keyword, case-insensitively. Confusion counts
follow the predicate-first rule: a false-positive predicate turns its subject
and object into true negatives, and a missing predicate next to a
false-positive argument is a true negative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .srl import SrlTriple, TripleRecord

MODES = ("symbolic", "data_driven")
SLOTS = ("subject", "predicate", "object")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    tn_applicable: bool = True

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")
        if not self.tn_applicable and self.tn:
            raise ValueError("tn must be 0 when true negatives are not applicable")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        both = self.tn_applicable and other.tn_applicable
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn if both else 0,
                               self.fp + other.fp, self.fn + other.fn, both)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn if self.tn_applicable else None,
                "fp": self.fp, "fn": self.fn}


@dataclass(frozen=True)
class NerReport:
    accuracy: Optional[float]
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def ner_confusion(predicted: Iterable[int], benchmark: Iterable[int], total_tokens: int,
                  mode: str = "data_driven") -> ConfusionCounts:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    predicted, benchmark = set(predicted), set(benchmark)
    for name, positions in (("predicted", predicted), ("benchmark", benchmark)):
        bad = [p for p in positions if not 0 <= p < total_tokens]
        if bad:
            raise ValueError(f"{name} position {min(bad)} outside 0..{total_tokens - 1}")
    tp = len(predicted & benchmark)
    fp = len(predicted - benchmark)
    fn = len(benchmark - predicted)
    if mode == "symbolic":
        return ConfusionCounts(tp, 0, fp, fn, tn_applicable=False)
    return ConfusionCounts(tp, total_tokens - tp - fp - fn, fp, fn, tn_applicable=True)


def ner_metrics(c: ConfusionCounts) -> NerReport:
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    accuracy = _ratio(c.tp + c.tn, c.total) if c.tn_applicable else None
    return NerReport(accuracy, precision, recall, f1_score(precision, recall))


# ---------------------------------------------------------------------------
# SRL

@dataclass(frozen=True)
class SrlBenchTriple:
    subject_keyword: Optional[str]
    predicate_keyword: str
    object_keyword: Optional[str] = None
    doc_id: str = ""
    sentence_index: int = 0

    def __post_init__(self):
        if not (self.predicate_keyword or "").strip():
            raise ValueError("benchmark predicate keyword is empty")

    def keyword(self, slot: str) -> Optional[str]:
        kw = getattr(self, f"{slot}_keyword")
        return kw if kw and kw.strip() else None

    @classmethod
    def from_json(cls, obj: dict) -> SrlBenchTriple:
        try:
            return cls(obj.get("subject_keyword"), obj["predicate_keyword"], obj.get("object_keyword"),
                       str(obj["doc_id"]), int(obj["sentence_index"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad benchmark record {obj!r}: {exc}") from None


def _norm(s: str) -> str:
    return " ".join(s.split()).lower()


def keyword_match(extracted: Optional[str], keyword: str) -> bool:
    """Substring match; ``a/b`` keywords accept either alternative."""
    if not extracted or not extracted.strip():
        return False
    text = _norm(extracted)
    return any(_norm(alt) and _norm(alt) in text for alt in keyword.split("/"))


@dataclass(frozen=True)
class SlotMatch:
    """Per-slot outcome; ``None`` means the benchmark has no keyword for the slot."""

    subject: Optional[bool]
    predicate: bool
    object: Optional[bool]

    def __getitem__(self, slot: str):
        return getattr(self, slot)


def srl_match(extracted: SrlTriple, bench: SrlBenchTriple) -> SlotMatch:
    def slot(name):
        kw = bench.keyword(name)
        if kw is None:
            return None
        return keyword_match(getattr(extracted, name), kw)
    return SlotMatch(slot("subject"), keyword_match(extracted.predicate, bench.predicate_keyword),
                     slot("object"))


@dataclass(frozen=True)
class SrlSample:
    """An extracted triple paired with its benchmark triple; either side may be missing."""

    extracted: Optional[SrlTriple]
    bench: Optional[SrlBenchTriple]

    def __post_init__(self):
        if self.extracted is None and self.bench is None:
            raise ValueError("sample needs an extracted or a benchmark triple")

    def match(self) -> Optional[SlotMatch]:
        if self.extracted is None or self.bench is None:
            return None
        return srl_match(self.extracted, self.bench)

    def outcomes(self) -> dict[str, Optional[str]]:
        """Confusion cell ("tp"/"tn"/"fp"/"fn") per slot, or ``None`` when nothing is counted."""
        m = self.match()
        raw = {}
        for slot in SLOTS:
            has = self.extracted is not None and bool(getattr(self.extracted, slot))
            kw = self.bench.keyword(slot) if self.bench is not None else None
            if has:
                raw[slot] = "tp" if (m is not None and m[slot]) else "fp"
            elif kw is not None:
                raw[slot] = "fn"
            else:
                raw[slot] = None
        if raw["predicate"] == "fp":
            for slot in ("subject", "object"):
                if raw[slot] is not None:
                    raw[slot] = "tn"
        elif raw["predicate"] in ("fn", None) and "fp" in (raw["subject"], raw["object"]):
            raw["predicate"] = "tn"
        return raw


def srl_confusion(samples: Iterable[SrlSample]) -> dict[str, ConfusionCounts]:
    cells = {slot: {"tp": 0, "tn": 0, "fp": 0, "fn": 0} for slot in SLOTS}
    for sample in samples:
        for slot, cell in sample.outcomes().items():
            if cell is not None:
                cells[slot][cell] += 1
    return {slot: ConfusionCounts(**c) for slot, c in cells.items()}


@dataclass(frozen=True)
class SlotScores:
    counts: ConfusionCounts
    accuracy: float
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, c: ConfusionCounts) -> SlotScores:
        r = ner_metrics(c)
        return cls(c, r.accuracy or 0.0, r.precision, r.recall, r.f1)

    def as_dict(self) -> dict:
        return {**self.counts.as_dict(), "accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class SrlReport:
    rigid_accuracy: float
    predicate_accuracy: float
    argument_accuracy: float
    bench_triples: int
    slots: dict[str, SlotScores] = field(default_factory=dict)
    argument: Optional[SlotScores] = None  # subject + object pooled
    overall: Optional[SlotScores] = None   # all three slots pooled

    def as_dict(self) -> dict:
        return {
            "bench_triples": self.bench_triples,
            "rigid_accuracy": self.rigid_accuracy,
            "predicate_accuracy": self.predicate_accuracy,
            "argument_accuracy": self.argument_accuracy,
            "slots": {k: v.as_dict() for k, v in self.slots.items()},
            "argument": self.argument.as_dict() if self.argument else None,
            "overall": self.overall.as_dict() if self.overall else None,
        }


def srl_scores(samples: Sequence[SrlSample]) -> SrlReport:
    benched = [s for s in samples if s.bench is not None]
    if not benched:
        raise ValueError("SRL scoring needs at least one benchmark triple")
    rigid = pred_ok = arg_ok = arg_total = 0
    for s in benched:
        m = s.match()
        args = [slot for slot in ("subject", "object") if s.bench.keyword(slot) is not None]
        arg_total += len(args)
        if m is None:
            continue
        pred_ok += m.predicate
        arg_ok += sum(bool(m[slot]) for slot in args)
        if m.predicate and all(m[slot] for slot in args):
            rigid += 1
    counts = srl_confusion(samples)
    n = len(benched)
    return SrlReport(
        rigid_accuracy=rigid / n,
        predicate_accuracy=pred_ok / n,
        argument_accuracy=_ratio(arg_ok, arg_total),
        bench_triples=n,
        slots={slot: SlotScores.from_counts(c) for slot, c in counts.items()},
        argument=SlotScores.from_counts(counts["subject"] + counts["object"]),
        overall=SlotScores.from_counts(counts["subject"] + counts["predicate"] + counts["object"]),
    )


def pair_samples(extracted: Sequence[SrlTriple], bench: Sequence[SrlBenchTriple]) -> list[SrlSample]:
    """Pair one sentence's extractions with its benchmark triples.

    Each benchmark triple, in order, takes the unused extraction with the best
    (predicate match, number of matching slots), earliest on ties. Extractions
    left over become benchmark-less samples.
    """
    unused = list(range(len(extracted)))
    samples = []
    for b in bench:
        best, best_key = None, None
        for i in unused:
            m = srl_match(extracted[i], b)
            key = (m.predicate, sum(bool(m[s]) for s in SLOTS))
            if best_key is None or key > best_key:
                best, best_key = i, key
        if best is None:
            samples.append(SrlSample(None, b))
        else:
            unused.remove(best)
            samples.append(SrlSample(extracted[best], b))
    samples.extend(SrlSample(extracted[i], None) for i in unused)
    return samples


def build_srl_samples(records: Iterable[TripleRecord], bench: Iterable[SrlBenchTriple],
                      doc_id: Optional[str] = None) -> list[SrlSample]:
    """Pair extractions and benchmark triples sentence by sentence.

    Only sentences that appear in the benchmark are scored, since the
    benchmark is a sample of sentences.
    """
    by_sent: dict[tuple[str, int], list[SrlBenchTriple]] = {}
    for b in bench:
        if doc_id is None or b.doc_id == doc_id:
            by_sent.setdefault((b.doc_id, b.sentence_index), []).append(b)
    extracted: dict[tuple[str, int], list[SrlTriple]] = {}
    for r in records:
        key = (r.doc_id, r.sentence_index)
        if key in by_sent:
            extracted.setdefault(key, []).append(r.triple)
    samples = []
    for key in sorted(by_sent):
        samples.extend(pair_samples(extracted.get(key, []), by_sent[key]))
    return samples


# ---------------------------------------------------------------------------
# files

def read_ner_positions(path) -> dict[str, dict[int, str]]:
    """``doc_id<TAB>token_position<TAB>token`` -> {doc_id: {position: token}}."""
    out: dict[str, dict[int, str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'doc_id<TAB>token_position<TAB>token'")
            try:
                pos = int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer token position {parts[1]!r}") from None
            out.setdefault(parts[0], {})[pos] = parts[2]
    return out


def format_ner_positions(positions: Mapping[str, Mapping[int, str]]) -> str:
    return "".join(f"{doc}\t{pos}\t{tok}\n"
                   for doc in sorted(positions) for pos, tok in sorted(positions[doc].items()))


def read_srl_bench(path) -> list[SrlBenchTriple]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                out.append(SrlBenchTriple.from_json(json.loads(line)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out
