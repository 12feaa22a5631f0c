"""
Building sequence-labelling data
================================

Two training-set chores: tagging raw sentences from a gazetteer (BILUO, then
BIO for the model), and splitting SRL annotations into one sample per
predicate frame. Class weights balance the rare labels.
"""

from pathlib import Path

from depex import (Gazetteer, biluo_to_bio, broadcast_frames, class_weights, decode_spans,
                   frames_to_triple, gazetteer_tag)
from depex.dataset import tag_counts

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

###############################################################################
# Longest match wins, so "magnetic resonance imaging" beats any shorter entry.

gazetteer = Gazetteer.load(DATA / "gazetteer.tsv")
seq = gazetteer_tag("Magnetic resonance imaging of the basal ganglia in MS".split(), gazetteer)
for token, tag in zip(seq.tokens, seq.tags):
    print(f"{token:<10} {tag}")

###############################################################################
# BIO drops the L and U tags: L becomes I, U becomes B. The spans survive.

bio = biluo_to_bio(seq)
print(bio.tags)
print(decode_spans(bio))

###############################################################################
# One sentence with two annotated predicates gives two samples. Labels outside
# the seven kept roles (here B-ARGM-MNR) become O.

tokens = "We respectfully invite you to watch a special edition of Across China .".split()
invite = ["B-ARG0", "B-ARGM-MNR", "B-V", "B-ARG1", "B-ARG2"] + ["I-ARG2"] * 7 + ["O"]
watch = ["O", "O", "O", "B-ARG0", "O", "B-V", "B-ARG1"] + ["I-ARG1"] * 5 + ["O"]
samples = broadcast_frames(tokens, [("invite", invite), ("watch", watch)])
for sample in samples:
    print(sample.verb, sample.frames)
    print("  ->", frames_to_triple(sample).as_tuple())

###############################################################################
# Weights are N / (K * count): rare labels get larger weights.

weights = class_weights(tag_counts(s.frames for s in samples))
for label, w in sorted(weights.items(), key=lambda kv: kv[1]):
    print(f"{label:<7} {w:.3f}")
