"""Heuristic NER/SRL over dependency parses, dataset preparation and scoring."""

from .corpus import (ConlluError, DepEdge, Document, DocumentStats, PreprocessConfig, Sentence,
                     Token, compute_stats, parse_conllu, preprocess_text, serialize_conllu)
from .dataset import (EntitySpan, FrameSample, Gazetteer, GazetteerEntry, LabeledSequence,
                      biluo_to_bio, broadcast_frames, class_weights, decode_spans,
                      frames_to_triple, gazetteer_tag)
from .evaluation import (ConfusionCounts, NerReport, SrlBenchTriple, SrlReport, SrlSample,
                         ner_confusion, ner_metrics, srl_confusion, srl_match, srl_scores)
from .ner import NounCandidate, RankedNoun, Taxonomy, extract_nouns, map_hypernym, rank_nouns
from .parser_client import ParseClient, ParseRequest, ParseResponse, parse_remote
from .srl import SrlRuleConfig, SrlTriple, extract_triples

__version__ = "0.1.0"
