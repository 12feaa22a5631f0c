import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from depex.dataset import (FRAME_LABELS, EntitySpan, FrameSample, Gazetteer, GazetteerEntry,
                           LabeledSequence, TagError, biluo_to_bio, broadcast_frames, check_tags,
                           class_weights, decode_spans, format_frames, format_labeled,
                           format_weights, frames_to_triple, gazetteer_tag, read_frames,
                           read_labeled, tag_counts)
from helpers import brute_biluo_spans, random_biluo

# the conll2012 example sentence and its two frames, copied from the source dataset listing
INVITE_TOKENS = "We respectfully invite you to watch a special edition of Across China .".split()
INVITE = ["B-ARG0", "B-ARGM-MNR", "B-V", "B-ARG1", "B-ARG2", "I-ARG2", "I-ARG2", "I-ARG2",
          "I-ARG2", "I-ARG2", "I-ARG2", "I-ARG2", "O"]
WATCH = ["O", "O", "O", "B-ARG0", "O", "B-V", "B-ARG1", "I-ARG1", "I-ARG1", "I-ARG1", "I-ARG1",
         "I-ARG1", "O"]


def biluo(tags):
    return LabeledSequence(tuple(f"t{i}" for i in range(len(tags))), tuple(tags), "BILUO")


def bio(tags):
    return LabeledSequence(tuple(f"t{i}" for i in range(len(tags))), tuple(tags), "BIO")


class TestGazetteer:
    def test_multi_token(self):
        g = [GazetteerEntry(("basal", "ganglia"), "BrainAnatomy")]
        assert gazetteer_tag(["the", "basal", "ganglia"], g).tags == ("O", "B-BrainAnatomy", "L-BrainAnatomy")

    def test_single_token_case_insensitive(self):
        g = [GazetteerEntry(("mri",), "MedicalTerm")]
        assert gazetteer_tag(["MRI"], g).tags == ("U-MedicalTerm",)

    def test_empty_gazetteer(self):
        assert gazetteer_tag(["a", "b"], []).tags == ("O", "O")

    def test_leftmost_longest(self):
        g = [GazetteerEntry(("multiple",), "A"), GazetteerEntry(("multiple", "sclerosis"), "B"),
             GazetteerEntry(("sclerosis", "lesion", "load"), "C")]
        tags = gazetteer_tag("multiple sclerosis lesion load".split(), g).tags
        assert tags == ("B-B", "L-B", "O", "O")
        three = [GazetteerEntry(("a", "b", "c"), "X")]
        assert gazetteer_tag("a b c".split(), three).tags == ("B-X", "I-X", "L-X")

    def test_first_label_wins_for_duplicates(self):
        g = Gazetteer([GazetteerEntry(("ms",), "NeuroDisorder"), GazetteerEntry(("MS",), "Other")])
        assert gazetteer_tag(["ms"], g).tags == ("U-NeuroDisorder",)

    def test_load(self, fixtures):
        g = Gazetteer.load(fixtures / "gazetteer.tsv")
        assert g.table[("basal", "ganglia")] == "BrainAnatomy"
        assert g.longest == 3

    @settings(max_examples=200)
    @given(tokens=st.lists(st.sampled_from(["a", "b", "c", "A"]), max_size=12),
           phrases=st.lists(st.tuples(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=3),
                                      st.sampled_from(["X", "Y"])), max_size=5))
    def test_outputs_valid_biluo(self, tokens, phrases):
        seq = gazetteer_tag(tokens, [GazetteerEntry(tuple(p), l) for p, l in phrases])
        check_tags(seq.tags, "BILUO")
        # well-formed: decoding the BIO conversion yields exactly the BILUO spans
        spans = {(s.start, s.end, s.label) for s in decode_spans(biluo_to_bio(seq), strict=True)}
        assert spans == brute_biluo_spans(seq.tags)


class TestConversion:
    def test_last_becomes_inside(self):
        assert biluo_to_bio(biluo(["B-X", "I-X", "L-X"])).tags == ("B-X", "I-X", "I-X")

    def test_unit_becomes_begin(self):
        assert biluo_to_bio(biluo(["U-X"])).tags == ("B-X",)

    def test_outside(self):
        out = biluo_to_bio(biluo(["O", "O"]))
        assert out.tags == ("O", "O") and out.scheme == "BIO"

    def test_invalid_tag_names_position(self):
        with pytest.raises(TagError) as err:
            biluo(["O", "E-X"])
        assert err.value.position == 1
        with pytest.raises(ValueError):
            biluo_to_bio(bio(["B-X"]))

    def test_sequence_validation(self):
        with pytest.raises(ValueError):
            LabeledSequence(("a",), ("O", "O"), "BIO")
        with pytest.raises(TagError):
            bio(["L-X"])
        with pytest.raises(TagError):
            bio(["B-"])

    @settings(max_examples=300)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_span_preservation(self, seed):
        tags = random_biluo(random.Random(seed))
        spans = {(s.start, s.end, s.label) for s in decode_spans(biluo_to_bio(biluo(tags)))}
        assert spans == brute_biluo_spans(tags)


class TestDecode:
    def test_basic(self):
        assert decode_spans(bio(["B-X", "I-X", "O", "B-Y"])) == [EntitySpan(0, 1, "X"), EntitySpan(3, 3, "Y")]

    def test_all_outside(self):
        assert decode_spans(bio(["O", "O"])) == []

    def test_orphan_inside(self):
        assert decode_spans(bio(["I-X"])) == [EntitySpan(0, 0, "X")]
        with pytest.raises(TagError):
            decode_spans(bio(["I-X"]), strict=True)

    def test_label_change_inside(self):
        assert decode_spans(bio(["B-X", "I-Y"])) == [EntitySpan(0, 0, "X"), EntitySpan(1, 1, "Y")]
        with pytest.raises(TagError) as err:
            decode_spans(bio(["B-X", "I-Y"]), strict=True)
        assert err.value.position == 1

    def test_adjacent_begins(self):
        assert decode_spans(bio(["B-X", "B-X"])) == [EntitySpan(0, 0, "X"), EntitySpan(1, 1, "X")]


class TestFrames:
    def test_invite_watch_sentence(self):
        samples = broadcast_frames(INVITE_TOKENS, [{"verb": "invite", "frames": INVITE},
                                                  {"verb": "watch", "frames": WATCH}])
        assert len(INVITE_TOKENS) == 13
        assert [len(s.frames) for s in samples] == [13, 13]
        assert [len(s.tokens) for s in samples] == [13, 13]
        assert samples[0].frames[1] == "O"  # B-ARGM-MNR is outside the label set
        assert samples[0].frames[:4] == ("B-ARG0", "O", "B-V", "B-ARG1")
        assert samples[1].frames == tuple(WATCH)

    def test_zero_annotations(self):
        assert broadcast_frames(INVITE_TOKENS, []) == []

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="annotation 0"):
            broadcast_frames(["a", "b"], [("v", ["B-V"])])

    def test_watch_triple(self):
        (_, watch) = broadcast_frames(INVITE_TOKENS, [("invite", INVITE), ("watch", WATCH)])
        t = frames_to_triple(watch)
        assert t.as_tuple() == ("you", "watch", "a special edition of Across China")
        assert t.predicate_index == 6 and t.subject_indices == (4,)

    def test_invite_triple(self):
        (invite,) = broadcast_frames(INVITE_TOKENS, [("invite", INVITE)])
        assert frames_to_triple(invite).as_tuple() == ("We", "invite", "you")

    def test_verb_only_is_degenerate(self):
        t = frames_to_triple(FrameSample(("ran",), "ran", ("B-V",)))
        assert t.as_tuple() == (None, "ran", None) and t.degenerate

    def test_arg2_substitutes(self):
        s = FrameSample(("he", "gave", "to", "her"), "gave", ("B-ARG0", "B-V", "B-ARG2", "I-ARG2"))
        t = frames_to_triple(s)
        assert t.as_tuple() == ("he", "gave", "to her")
        assert "frame_arg2" in t.trace

    def test_no_verb(self):
        with pytest.raises(ValueError, match="B-V"):
            frames_to_triple(FrameSample(("a",), "a", ("O",)))

    def test_sample_invariants(self):
        with pytest.raises(ValueError):
            FrameSample(("a", "b"), "a", ("B-V",))
        with pytest.raises(ValueError):
            FrameSample(("a", "b"), "a", ("B-V", "B-V"))

    @given(seed=st.integers(0, 2**32 - 1))
    def test_random_broadcast(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 20)
        tokens = [f"w{i}" for i in range(n)]
        labels = sorted(FRAME_LABELS - {"B-V"}) + ["B-ARGM-TMP", "I-ARGM-LOC", "B-ARG3"]
        annotations = []
        for _ in range(rng.randint(0, 5)):
            frames = [rng.choice(labels) for _ in range(n)]
            frames[rng.randrange(n)] = "B-V"
            annotations.append({"verb": "v", "frames": frames})
        samples = broadcast_frames(tokens, annotations)
        assert len(samples) == len(annotations)
        assert all(len(s.tokens) == n and len(s.frames) == n for s in samples)
        assert all(set(s.frames) <= FRAME_LABELS for s in samples)


class TestWeights:
    def test_uniform(self):
        assert class_weights({"A": 1, "B": 1}) == {"A": 1.0, "B": 1.0}

    def test_formula(self):
        # N=4, K=2: 4/(2*3), 4/(2*1)
        w = class_weights({"A": 3, "B": 1})
        assert w["A"] == pytest.approx(0.6667, abs=5e-5)
        assert w["B"] == pytest.approx(2.0)

    def test_srl_table_ordering(self):
        # label counts of the conll2012 SRL training split
        counts = {"B-V": 10708, "B-ARG0": 4488, "I-ARG0": 4059, "B-ARG1": 7515,
                  "I-ARG1": 27895, "B-ARG2": 2837, "I-ARG2": 11273}
        w = class_weights(counts)
        assert w["B-ARG2"] > w["B-V"]

    def test_zero_count(self):
        with pytest.raises(ValueError, match="count 0"):
            class_weights({"A": 0, "B": 2})

    @given(st.dictionaries(st.text(min_size=1, max_size=3), st.integers(1, 10**6), min_size=1))
    def test_antitone(self, counts):
        w = class_weights(counts)
        assert all(v > 0 for v in w.values())
        for a in counts:
            for b in counts:
                if counts[a] < counts[b]:
                    assert w[a] > w[b]

    def test_tag_counts(self):
        assert tag_counts([["O", "B-X"], ["B-X"]]) == {"B-X": 2, "O": 1}
        assert tag_counts([["O", "B-X"]], skip_outside=True) == {"B-X": 1}


class TestFiles:
    def test_labeled_round_trip(self, tmp_path):
        seqs = [biluo(["B-X", "L-X"]), biluo(["U-Y", "O", "O"])]
        p = tmp_path / "d.tsv"
        p.write_text(format_labeled(seqs))
        assert read_labeled(p, "BILUO") == seqs

    def test_labeled_error_line(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("a\tO\n\nb\tO\nc\tQ-X\n")
        with pytest.raises(ValueError, match="d.tsv:4"):
            read_labeled(p, "BIO")

    def test_frames_round_trip(self, tmp_path):
        samples = broadcast_frames(INVITE_TOKENS, [("invite", INVITE), ("watch", WATCH)])
        p = tmp_path / "f.jsonl"
        p.write_text(format_frames(samples))
        assert read_frames(p) == samples
        assert set(json.loads(p.read_text().splitlines()[0])) == {"tokens", "verb", "frames"}

    def test_weights_json(self):
        assert json.loads(format_weights({"B": 2.0, "A": 0.5})) == {"A": 0.5, "B": 2.0}
