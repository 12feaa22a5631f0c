"""
Reading a parsed corpus
=======================

Documents arrive as CoNLL-U: one token per line, the basic head in columns 7
and 8 and the enhanced graph in column 9. Here we load two small files, look
at the edges, count tokens and write the sentences back out.
"""

from pathlib import Path

from depex import Document, compute_stats, parse_conllu, preprocess_text, serialize_conllu
from depex.corpus import PreprocessConfig, read_conllu

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

###############################################################################
# Load the files. Each sentence keeps its tokens, both edge sets and the
# ``# text`` comment.

mini = Document("mini", "generic", "short", read_conllu(DATA / "mini.conllu"))
brain = Document("brain", "domain", "short", read_conllu(DATA / "brain.conllu"))

first = mini.sentences[0]
print(first.text)
for edge in first.enhanced_edges:
    source = "ROOT" if edge.source == 0 else first.form(edge.source)
    print(f"  {source:>8} -{edge.relation}-> {first.form(edge.target)}")

###############################################################################
# Sentence and token counts are additive over documents.

for doc in (mini, brain):
    print(doc.id, compute_stats(doc))
print("both", compute_stats(mini) + compute_stats(brain))

###############################################################################
# Writing and re-reading gives back the same sentences, field for field.

text = serialize_conllu(brain.sentences)
print(text.splitlines()[1])
assert parse_conllu(text) == list(brain.sentences)

###############################################################################
# Raw text can be cleaned before it goes to the parser. Lowercasing is off by
# default because the NER heuristic relies on proper-noun capitalisation.

raw = "<p>MRI   scans showed <b>lesions</b> in the basal ganglia!</p>"
print(preprocess_text(raw))
print(preprocess_text(raw, PreprocessConfig(lowercase=True)))
