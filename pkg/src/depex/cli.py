"""Batch command line: ``depex <command> [options]``.

Exit status is 0 on success, 1 for input or validation errors and 2 when the
parse server cannot be used.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import Document, PreprocessConfig, compute_stats, preprocess_text
from .dataset import (Gazetteer, LabeledSequence, atomic_write, biluo_to_bio, broadcast_frames,
                      class_weights, decode_spans, format_frames, format_labeled, format_weights,
                      frames_to_triple, FrameSample, gazetteer_tag, read_labeled, tag_counts)
from .evaluation import MODES, read_ner_positions, read_srl_bench, format_ner_positions
from .ner import POS_PRESETS, Taxonomy
from .parser_client import DEFAULT_ENDPOINT, ParseClient, ParseClientError
from .pipeline import (CascadeJob, DocumentSource, NerEvalJob, SrlEvalJob, group_by_doc, parallel_map,
                       run_cascade, run_ner_eval, run_srl_eval)
from .report import EXTENSIONS, FORMATS, load_json_report, render, timestamp
from .srl import RULES, SrlRuleConfig, TripleRecord, dump_triples, read_triples

log = logging.getLogger("depex")

CONLLU_SUFFIXES = {".conllu", ".conll"}

NER_EVAL_COLUMNS = ["doc_id", "genre", "length_class", "method", "mode", "total_tokens",
                    "tp", "tn", "fp", "fn", "accuracy", "recall", "precision", "f1"]
SRL_EVAL_COLUMNS = ["doc_id", "genre", "length_class", "method", "bench_triples",
                    "rigid_accuracy", "predicate_accuracy", "argument_accuracy",
                    "accuracy", "recall", "precision", "f1",
                    "argument_recall", "predicate_recall", "argument_precision",
                    "predicate_precision", "argument_f1", "predicate_f1"]
REPORT_COLUMNS = {
    "eval-ner": ["doc_id", "genre", "length_class", "method", "accuracy", "recall", "precision", "f1"],
    "eval-srl": ["doc_id", "genre", "length_class", "method", "rigid_accuracy",
                 "argument_accuracy", "predicate_accuracy", "argument_recall", "predicate_recall",
                 "argument_precision", "predicate_precision", "argument_f1", "predicate_f1"],
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# shared option handling

def _existing(paths) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        if not p.is_file():
            raise UsageError(f"input file not found: {p}")
        out.append(p)
    return out


def _input_mode(path: Path, declared: str) -> str:
    if declared != "auto":
        return declared
    return "conllu" if path.suffix.lower() in CONLLU_SUFFIXES else "text"


def document_sources(args) -> list[DocumentSource]:
    paths = _existing(args.input)
    modes = {_input_mode(p, args.input_format) for p in paths}
    if len(modes) != 1:
        raise UsageError("mixed input modes; pass only CoNLL-U files or only raw text files")
    ids = [p.stem for p in paths]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise UsageError(f"duplicate document ids (file stems): {', '.join(dupes)}")
    (mode,) = modes
    sources = [DocumentSource(str(p), args.genre, args.length, mode, args.endpoint, args.offline,
                              args.preprocess) for p in paths]
    return sorted(sources, key=lambda s: s.doc_id)


def load_documents(args) -> list[Document]:
    sources = document_sources(args)
    client = ParseClient(offline=args.offline) if sources[0].mode == "text" else None
    return [s.load(client) for s in sources]


def _pos_filter(value: str) -> frozenset:
    if value in POS_PRESETS:
        return POS_PRESETS[value]
    tags = frozenset(t.strip() for t in value.split(",") if t.strip())
    if not tags:
        raise UsageError("--pos-filter is empty")
    return tags


def _srl_config(args) -> SrlRuleConfig:
    fields = {f.name for f in dataclasses.fields(SrlRuleConfig)}
    overrides = {}
    for item in args.rule or ():
        key, sep, value = item.partition("=")
        if not sep or key not in fields or key == "disabled":
            raise UsageError(f"bad --rule {item!r}; keys: {sorted(fields - {'disabled'})}")
        if key == "conjunction_relations":
            overrides[key] = frozenset(v for v in value.split(",") if v)
        else:
            overrides[key] = value
    overrides["disabled"] = frozenset(args.disable_rule or ())
    try:
        return SrlRuleConfig(**overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_dir(args) -> Path:
    out = Path(args.out)
    if out.exists() and not out.is_dir():
        raise UsageError(f"--out {out} is not a directory")
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise UsageError(f"--out {out} is not writable")
    return out


def _emit(args, out: Path, name: str, kind: str, columns, rows) -> None:
    text = render(kind, columns, rows, args.format, None if args.no_timestamp else timestamp())
    atomic_write(out / f"{name}.{EXTENSIONS[args.format]}", text)
    sys.stdout.write(text)


def _add_output(p, report=True):
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes, one document each")
    if report:
        p.add_argument("--format", choices=FORMATS, default="json", help="report format")
        p.add_argument("--no-timestamp", action="store_true", help="omit the generated_at header")


def _add_docs(p, required=True):
    p.add_argument("--input", nargs="+", required=required, metavar="PATH",
                   help="CoNLL-U files, or raw text files parsed via --endpoint")
    p.add_argument("--input-format", choices=("auto", "conllu", "text"), default="auto")
    p.add_argument("--genre", choices=("generic", "domain"), required=required)
    p.add_argument("--length", choices=("short", "long"), required=required)
    p.add_argument("--endpoint", default=DEFAULT_ENDPOINT, help="CoreNLP-compatible server URL")
    p.add_argument("--offline", action="store_true", help="use only cached parses ($DEPEX_CACHE_DIR)")
    p.add_argument("--preprocess", action="store_true", help="clean raw text before parsing")


# ---------------------------------------------------------------------------
# commands

def cmd_stats(args) -> int:
    docs = load_documents(args)
    out = _out_dir(args)
    rows = []
    for d in docs:
        s = compute_stats(d)
        rows.append({"doc_id": d.id, "genre": d.genre, "length_class": d.length_class,
                     "total_sentences": s.total_sentences, "total_tokens": s.total_tokens})
    _emit(args, out, "stats", "stats",
          ["doc_id", "genre", "length_class", "total_sentences", "total_tokens"], rows)
    return 0


def _cascade(args):
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    taxonomy = Taxonomy.load(args.taxonomy) if args.taxonomy else None
    docs = document_sources(args)
    if docs[0].mode == "text":
        # talk to the parse server from one process; workers get parsed documents
        docs = load_documents(args)
    jobs = [CascadeJob(d, _pos_filter(args.pos_filter), args.top_k, taxonomy, _srl_config(args),
                       args.top_k or 100) for d in docs]
    return run_cascade(jobs, args.jobs)


def cmd_ner(args) -> int:
    results = _cascade(args)
    out = _out_dir(args)
    atomic_write(out / "ner_predictions.tsv",
                 format_ner_positions({r.doc_id: r.entities for r in results}))
    rows = [{"doc_id": r.doc_id, "rank": i, "lemma": n.lemma, "count": n.count, "hypernym": n.hypernym}
            for r in results for i, n in enumerate(r.ranked, 1)]
    _emit(args, out, "ner_ranked", "ner", ["doc_id", "rank", "lemma", "count", "hypernym"], rows)
    return 0


def cmd_srl(args) -> int:
    results = _cascade(args)
    out = _out_dir(args)
    atomic_write(out / "triples.jsonl", dump_triples(t for r in results for t in r.triples))
    rows = [{"doc_id": r.doc_id, "sentences": r.sentences, "triples": len(r.triples)}
            for r in results]
    _emit(args, out, "srl_summary", "srl", ["doc_id", "sentences", "triples"], rows)
    return 0


def cmd_annotate(args) -> int:
    paths = _existing(args.input)
    gazetteer = Gazetteer.load(args.gazetteer)
    annotated = []
    for path in paths:
        seqs = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if args.preprocess:
                line = preprocess_text(line, PreprocessConfig())
            tokens = line.split()
            if tokens:
                seqs.append(gazetteer_tag(tokens, gazetteer))
        annotated.append((path.stem, seqs))
    out = _out_dir(args)
    bio_tags = []
    for stem, seqs in annotated:
        atomic_write(out / f"{stem}.biluo.tsv", format_labeled(seqs))
        bio = [biluo_to_bio(s) for s in seqs]
        atomic_write(out / f"{stem}.bio.tsv", format_labeled(bio))
        bio_tags.extend(s.tags for s in bio)
    counts = tag_counts(bio_tags)
    if counts:
        atomic_write(out / "weights.json", format_weights(class_weights(counts)))
    print(f"annotated {sum(len(s) for _, s in annotated)} sentences from {len(paths)} file(s)")
    return 0


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if line.strip():
            try:
                rows.append(json.loads(line))
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: invalid JSON ({exc})") from None
    return rows


def cmd_convert(args) -> int:
    paths = _existing(args.input)
    out_files: list[tuple[str, str]] = []
    if args.biluo_to_bio:
        for path in paths:
            seqs = [biluo_to_bio(s) for s in read_labeled(path, "BILUO")]
            for s in seqs:
                decode_spans(s, strict=args.strict_bio)
            out_files.append((f"{path.stem}.bio.tsv", format_labeled(seqs)))
    else:
        records = []
        for path in paths:
            for n, obj in enumerate(_read_jsonl(path)):
                try:
                    sample = FrameSample.from_json(obj)
                except (KeyError, TypeError) as exc:
                    raise UsageError(f"{path}: record {n}: missing field {exc}") from None
                if args.strict_bio:
                    decode_spans(LabeledSequence(sample.tokens, sample.frames, "BIO"), strict=True)
                triple = frames_to_triple(sample)
                records.append(TripleRecord(str(obj.get("doc_id", path.stem)),
                                            int(obj.get("sentence_index", n)), triple))
        out_files.append(("triples.jsonl", dump_triples(records)))
    out = _out_dir(args)
    for name, text in out_files:
        atomic_write(out / name, text)
        print(f"wrote {out / name}")
    return 0


def cmd_broadcast(args) -> int:
    paths = _existing(args.input)
    samples = []
    for path in paths:
        for n, obj in enumerate(_read_jsonl(path)):
            try:
                tokens, frames = obj["tokens"], obj["srl_frames"]
            except (KeyError, TypeError):
                raise UsageError(f"{path}: record {n} needs 'tokens' and 'srl_frames'") from None
            try:
                samples.extend(broadcast_frames(tokens, frames))
            except (KeyError, ValueError) as exc:
                raise UsageError(f"{path}: record {n}: {exc}") from None
    out = _out_dir(args)
    atomic_write(out / "frames.jsonl", format_frames(samples))
    counts = tag_counts(s.frames for s in samples)
    if counts:
        atomic_write(out / "weights.json", format_weights(class_weights(counts)))
    print(f"broadcast {len(samples)} samples")
    return 0


def _corpus_totals(args) -> dict[str, int] | None:
    if not args.input:
        return None
    for name in ("genre", "length"):
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required")
    return {d.id: compute_stats(d).total_tokens for d in load_documents(args)}


def _check_labels(args):
    if args.genre is None or args.length is None:
        raise UsageError("--genre and --length are required")


def cmd_eval_ner(args) -> int:
    _check_labels(args)
    bench = read_ner_positions(_existing([args.benchmark])[0])
    pred = read_ner_positions(_existing([args.predictions])[0])
    totals = _corpus_totals(args)
    if args.mode == "data_driven" and totals is None:
        raise UsageError("data_driven mode needs --input (the corpus) to count true negatives")
    if args.max_positions is not None and args.max_positions < 1:
        raise UsageError("--max-positions must be >= 1")
    jobs = []
    for doc_id in sorted(bench):
        predicted = frozenset(pred.get(doc_id, {}))
        benchmark = frozenset(bench[doc_id])
        if totals is not None:
            if doc_id not in totals:
                raise UsageError(f"benchmark document {doc_id!r} is not among the --input files")
            total = totals[doc_id]
        else:
            total = max(predicted | benchmark) + 1
        jobs.append(NerEvalJob(doc_id, predicted, benchmark, total, args.mode, args.max_positions))
    results = parallel_map(run_ner_eval, jobs, args.jobs)
    for doc_id, counts, _ in results:
        log.debug("%s: %s", doc_id, counts)
    out = _out_dir(args)
    rows = [{"doc_id": doc_id, "genre": args.genre, "length_class": args.length, "method": args.method,
             "mode": args.mode, "total_tokens": c.total if c.tn_applicable else None,
             **c.as_dict(), **metrics}
            for doc_id, c, metrics in results]
    _emit(args, out, "eval_ner", "eval-ner", NER_EVAL_COLUMNS, rows)
    return 0


def cmd_eval_srl(args) -> int:
    _check_labels(args)
    bench = read_srl_bench(_existing([args.benchmark])[0])
    if not bench:
        raise UsageError("SRL benchmark is empty")
    records = read_triples(_existing([args.predictions])[0])
    by_doc = group_by_doc(records)
    jobs = [SrlEvalJob(doc_id, tuple(by_doc.get(doc_id, ())), tuple(items))
            for doc_id, items in sorted(group_by_doc(bench).items())]
    results = parallel_map(run_srl_eval, jobs, args.jobs)
    out = _out_dir(args)
    rows = []
    for doc_id, rep in results:
        row = {"doc_id": doc_id, "genre": args.genre, "length_class": args.length,
               "method": args.method, "bench_triples": rep["bench_triples"],
               "rigid_accuracy": rep["rigid_accuracy"],
               "predicate_accuracy": rep["predicate_accuracy"],
               "argument_accuracy": rep["argument_accuracy"]}
        for key in ("accuracy", "recall", "precision", "f1"):
            row[key] = rep["overall"][key]
            if key != "accuracy":
                row[f"argument_{key}"] = rep["argument"][key]
                row[f"predicate_{key}"] = rep["slots"]["predicate"][key]
        rows.append(row)
    _emit(args, out, "eval_srl", "eval-srl", SRL_EVAL_COLUMNS, rows)
    return 0


def cmd_report(args) -> int:
    reports = [load_json_report(p) for p in _existing(args.input)]
    kinds = {r["kind"] for r in reports}
    if len(kinds) != 1 or next(iter(kinds)) not in REPORT_COLUMNS:
        raise UsageError(f"report inputs must all be eval-ner or all eval-srl reports, got {sorted(kinds)}")
    (kind,) = kinds
    rows = sorted((row for r in reports for row in r["rows"]),
                  key=lambda row: (str(row.get("doc_id")), str(row.get("method"))))
    out = _out_dir(args)
    _emit(args, out, "report", kind, REPORT_COLUMNS[kind], rows)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="depex", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="sentence and token counts per document")
    _add_docs(p)
    _add_output(p)
    p.set_defaults(func=cmd_stats)

    for name, func, help_ in (("ner", cmd_ner, "heuristic NER: rank nouns, map hypernyms"),
                              ("srl", cmd_srl, "heuristic SRL: subject-predicate-object triples")):
        p = sub.add_parser(name, help=help_)
        _add_docs(p)
        _add_output(p)
        p.add_argument("--pos-filter", default="proper",
                       help="'proper' (NNP), 'all' (NN,NNS,NNP,NNPS) or a comma list of tags")
        p.add_argument("--top-k", type=int, default=None,
                       help="keep only occurrences of the k most frequent noun lemmas")
        p.add_argument("--taxonomy", help="lemma<TAB>hypernym file")
        p.add_argument("--rule", action="append", metavar="KEY=VALUE", help="override an SRL rule setting")
        p.add_argument("--disable-rule", action="append", choices=RULES[1:], help="switch an SRL rule off")
        p.set_defaults(func=func)

    p = sub.add_parser("annotate", help="gazetteer annotation to BILUO and BIO TSV")
    p.add_argument("--input", nargs="+", required=True, help="text files, one sentence per line")
    p.add_argument("--gazetteer", required=True, help="phrase<TAB>label file")
    p.add_argument("--preprocess", action="store_true")
    _add_output(p, report=False)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("convert", help="BILUO -> BIO, or SRL frames -> triples")
    p.add_argument("--input", nargs="+", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--biluo-to-bio", action="store_true")
    mode.add_argument("--frames-to-triples", action="store_true")
    p.add_argument("--strict-bio", action="store_true", help="reject I tags that continue no span")
    _add_output(p, report=False)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("broadcast", help="one training sample per annotated SRL frame")
    p.add_argument("--input", nargs="+", required=True,
                   help="JSON Lines with 'tokens' and 'srl_frames' [{verb, frames}]")
    _add_output(p, report=False)
    p.set_defaults(func=cmd_broadcast)

    p = sub.add_parser("eval-ner", help="score NER predictions against a benchmark")
    _add_docs(p, required=False)
    p.add_argument("--benchmark", required=True, help="doc_id<TAB>position<TAB>token")
    p.add_argument("--predictions", required=True, help="doc_id<TAB>position<TAB>token")
    p.add_argument("--mode", choices=MODES, default="symbolic")
    p.add_argument("--method", default="heuristic", help="method name for the report rows")
    p.add_argument("--max-positions", type=int, help="score only token positions below this cap")
    _add_output(p)
    p.set_defaults(func=cmd_eval_ner)

    p = sub.add_parser("eval-srl", help="score SRL triples against benchmark keywords")
    p.add_argument("--benchmark", required=True, help="JSON Lines benchmark triples")
    p.add_argument("--predictions", required=True, help="JSON Lines triples")
    p.add_argument("--genre", choices=("generic", "domain"), required=True)
    p.add_argument("--length", choices=("short", "long"), required=True)
    p.add_argument("--method", default="heuristic")
    _add_output(p)
    p.set_defaults(func=cmd_eval_srl)

    p = sub.add_parser("report", help="merge eval reports into one table")
    p.add_argument("--input", nargs="+", required=True, help="JSON reports from eval-ner or eval-srl")
    _add_output(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseClientError as exc:
        print(f"depex: parse server error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"depex: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
