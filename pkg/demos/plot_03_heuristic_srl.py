"""
Subject, predicate, object
==========================

The SRL heuristic walks the enhanced dependency graph from each predicate
head and fills three slots. A small cascade of rules handles passives,
negation, the oblique fallback, compounds and coordination. Every triple
records which rules fired.
"""

from depex import SrlRuleConfig, extract_triples
from depex.corpus import DepEdge, Sentence, Token


def build(tagged, edges):
    tokens = []
    for i, item in enumerate(tagged.split(), 1):
        form, xpos = item.rsplit("/", 1)
        tokens.append(Token(i, form, form.lower(), "VERB" if xpos.startswith("VB") else "", xpos))
    deps = tuple(DepEdge(*e) for e in edges)
    basic = tuple({e.target: e for e in reversed(deps)}.values())
    return Sentence(tuple(tokens), basic, deps)


###############################################################################
# A passive, negated clause. The predicate becomes "not be damaged".

s = build("The/DT hippocampus/NN was/VBD not/RB damaged/VBN",
          [(0, 5, "root"), (2, 1, "det"), (5, 2, "nsubj:pass"), (5, 3, "aux:pass"), (5, 4, "neg")])
(t,) = extract_triples(s)
print(t.as_tuple(), t.trace)

###############################################################################
# Coordinated subjects are joined back together, and compounds are merged.

s = build("Harry/NNP and/CC Ron/NNP chased/VBD the/DT garden/NN gnome/NN",
          [(0, 4, "root"), (4, 1, "nsubj"), (3, 2, "cc"), (1, 3, "conj:and"), (4, 3, "nsubj"),
           (7, 5, "det"), (7, 6, "compound"), (4, 7, "obj")])
(t,) = extract_triples(s)
print(t.as_tuple(), t.trace)

###############################################################################
# Without a direct object the first oblique argument fills the object slot.

s = build("Harry/NNP went/VBD to/IN London/NNP",
          [(0, 2, "root"), (2, 1, "nsubj"), (4, 3, "case"), (2, 4, "obl:to")])
print(extract_triples(s)[0].as_tuple())

###############################################################################
# Rules can be switched off one at a time, which is how we check that each
# rule does only its own job.

print(extract_triples(s, SrlRuleConfig(disabled={"oblique"}))[0].as_tuple())
print(extract_triples(s, SrlRuleConfig(disabled={"resolve_index"}))[0].as_tuple())
