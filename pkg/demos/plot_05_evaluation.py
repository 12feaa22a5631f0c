"""
Scoring NER and SRL output
==========================

NER predictions are scored by token position. Symbolic systems only look at
nouns, so they have no true negatives and no accuracy. SRL triples are
scored by keyword containment, slot by slot.
"""

from pathlib import Path

from depex import Document, extract_triples, ner_confusion, ner_metrics, srl_scores
from depex.corpus import compute_stats, read_conllu
from depex.evaluation import build_srl_samples, read_ner_positions, read_srl_bench
from depex.ner import entity_positions
from depex.srl import TripleRecord

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
docs = [Document(name, "domain", "short", read_conllu(DATA / f"{name}.conllu"))
        for name in ("mini", "brain")]
ner_bench = read_ner_positions(DATA / "ner_bench.tsv")

###############################################################################
# The same predictions scored both ways.

for doc in docs:
    predicted = set(entity_positions(doc))
    total = compute_stats(doc).total_tokens
    for mode in ("symbolic", "data_driven"):
        counts = ner_confusion(predicted, set(ner_bench[doc.id]), total, mode)
        print(doc.id, mode, counts.as_dict(), ner_metrics(counts).as_dict())

###############################################################################
# SRL: extract, pair with the benchmark sentence by sentence, score.
# Rigid accuracy wants all three slots right; the split scores are looser.

records = [TripleRecord(doc.id, i, t)
           for doc in docs for i, s in enumerate(doc.sentences) for t in extract_triples(s)]
bench = read_srl_bench(DATA / "srl_bench.jsonl")
for doc in docs:
    report = srl_scores(build_srl_samples(records, bench, doc.id))
    print(doc.id, f"rigid {report.rigid_accuracy:.3f}",
          f"predicate {report.predicate_accuracy:.3f}", f"argument {report.argument_accuracy:.3f}")
