"""Per-document jobs and process-pool fan-out used by the command line."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, TypeVar, Union

from .corpus import Document, PreprocessConfig, preprocess_text, read_conllu
from .evaluation import ConfusionCounts, build_srl_samples, ner_confusion, ner_metrics, srl_scores
from .parser_client import DEFAULT_ENDPOINT, ParseClient, ParseRequest
from .ner import PROPER_NOUNS, Taxonomy, entity_positions, rank_nouns
from .srl import DEFAULT_CONFIG, SrlRuleConfig, TripleRecord, extract_triples

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """``map`` over a process pool when ``jobs > 1``; results keep input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DocumentSource:
    """Where a document comes from. Cheap to send to a worker process.

    Shipping parsed documents between processes costs more than the cascade
    itself, so workers load their own documents from these.
    """

    path: str
    genre: str
    length_class: str
    mode: str = "conllu"  # or "text", parsed through the server at ``endpoint``
    endpoint: str = DEFAULT_ENDPOINT
    offline: bool = False
    preprocess: bool = False

    @property
    def doc_id(self) -> str:
        return Path(self.path).stem

    def load(self, client: Optional[ParseClient] = None) -> Document:
        if self.mode == "conllu":
            sentences = read_conllu(self.path)
        elif self.mode == "text":
            text = Path(self.path).read_text(encoding="utf-8")
            if self.preprocess:
                text = preprocess_text(text, PreprocessConfig())
            client = client or ParseClient(offline=self.offline)
            sentences = client.parse(ParseRequest(text, endpoint=self.endpoint)).sentences
        else:
            raise ValueError(f"unknown input mode {self.mode!r}")
        return Document(self.doc_id, self.genre, self.length_class, tuple(sentences))


def doc_triples(doc: Document, cfg: SrlRuleConfig = DEFAULT_CONFIG) -> list[TripleRecord]:
    return [TripleRecord(doc.id, i, t)
            for i, sent in enumerate(doc.sentences) for t in extract_triples(sent, cfg)]


@dataclass(frozen=True)
class CascadeResult:
    doc_id: str
    sentences: int
    entities: dict[int, str]
    ranked: list
    triples: list[TripleRecord]


@dataclass(frozen=True)
class CascadeJob:
    doc: Union[Document, DocumentSource]
    pos_filter: frozenset = PROPER_NOUNS
    top_k: Optional[int] = None
    taxonomy: Optional[Taxonomy] = None
    srl_config: SrlRuleConfig = DEFAULT_CONFIG
    rank_k: int = 100


def run_cascade_job(job: CascadeJob) -> CascadeResult:
    doc = job.doc.load() if isinstance(job.doc, DocumentSource) else job.doc
    return CascadeResult(
        doc.id,
        len(doc.sentences),
        entity_positions(doc, job.pos_filter, job.top_k),
        rank_nouns(doc, job.pos_filter, job.rank_k, job.taxonomy),
        doc_triples(doc, job.srl_config),
    )


def run_cascade(jobs_list: Sequence[CascadeJob], jobs: int = 1) -> list[CascadeResult]:
    """Heuristic NER + SRL over every document."""
    return parallel_map(run_cascade_job, list(jobs_list), jobs)


# ---------------------------------------------------------------------------
# evaluation jobs

@dataclass(frozen=True)
class NerEvalJob:
    doc_id: str
    predicted: frozenset
    benchmark: frozenset
    total_tokens: int
    mode: str
    max_positions: Optional[int] = None


def run_ner_eval(job: NerEvalJob) -> tuple[str, ConfusionCounts, dict]:
    total = job.total_tokens
    predicted, benchmark = job.predicted, job.benchmark
    if job.max_positions is not None:
        total = min(total, job.max_positions)
        predicted = frozenset(p for p in predicted if p < total)
        benchmark = frozenset(p for p in benchmark if p < total)
    counts = ner_confusion(predicted, benchmark, total, job.mode)
    return job.doc_id, counts, ner_metrics(counts).as_dict()


@dataclass(frozen=True)
class SrlEvalJob:
    doc_id: str
    records: tuple
    bench: tuple


def run_srl_eval(job: SrlEvalJob) -> tuple[str, dict]:
    samples = build_srl_samples(job.records, job.bench, job.doc_id)
    return job.doc_id, srl_scores(samples).as_dict()


def group_by_doc(items: Iterable, key=lambda x: x.doc_id) -> dict[str, list]:
    out: dict[str, list] = {}
    for x in items:
        out.setdefault(key(x), []).append(x)
    return out

