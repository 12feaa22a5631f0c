"""
Ranking nouns as entities
=========================

The NER heuristic treats nouns as entity candidates, ranks them by lemma
frequency and, when a taxonomy is available, attaches a hypernym to each.
"""

from pathlib import Path

from depex import Document, Taxonomy, rank_nouns
from depex.corpus import read_conllu
from depex.ner import ALL_NOUNS, PROPER_NOUNS, entity_positions, extract_nouns

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
doc = Document("mini", "generic", "short", read_conllu(DATA / "mini.conllu"))

###############################################################################
# By default only proper nouns (NNP) count.

for cand in extract_nouns(doc.sentences[2]):
    print(cand.token_index, cand.form, cand.key)

###############################################################################
# Ranking is by count, ties broken alphabetically.

taxonomy = Taxonomy.load(DATA / "taxonomy.tsv")
for noun in rank_nouns(doc, PROPER_NOUNS, k=5, taxonomy=taxonomy):
    print(f"{noun.lemma:<8} {noun.count}  {noun.hypernym}")

###############################################################################
# Widening the filter to every noun tag picks up common nouns too.

print([n.lemma for n in rank_nouns(doc, ALL_NOUNS, k=10)])

###############################################################################
# For scoring, predictions are document-level token positions (0-based).
# ``k`` keeps only the occurrences of the k most frequent lemmas.

print(entity_positions(doc))
print(entity_positions(doc, k=1))
