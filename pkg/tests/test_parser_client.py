import hashlib
import json

import pytest

from depex.corpus import DepEdge
from depex.parser_client import (ParseClient, ParseRequest, ProtocolError, ServerError,
                                 TransportError, parse_remote, sentences_from_json)
from depex.srl import TripleRecord, dump_triples, extract_triples
from helpers import FIXTURES, FakeParseServer, free_port_url

TEXT = "The cat chased the dog ."
GOLDEN = (FIXTURES / "corenlp_the_cat.json").read_bytes()
EXPECTED_EDGES = {DepEdge(0, 3, "root"), DepEdge(2, 1, "det"), DepEdge(3, 2, "nsubj"),
                  DepEdge(5, 4, "det"), DepEdge(3, 5, "obj"), DepEdge(3, 6, "punct")}


def triples_dump(response):
    return dump_triples([TripleRecord("cat", i, t) for i, s in enumerate(response.sentences)
                         for t in extract_triples(s)])


def test_golden_mapping():
    (s,) = sentences_from_json(json.loads(GOLDEN), TEXT)
    assert len(s.tokens) == 6
    assert [t.xpos for t in s.tokens] == ["DT", "NN", "VBD", "DT", "NN", "."]
    assert [t.upos for t in s.tokens] == ["DET", "NOUN", "VERB", "DET", "NOUN", "PUNCT"]
    assert [t.lemma for t in s.tokens][2] == "chase"
    assert len(s.enhanced_edges) == len(set(s.enhanced_edges)) == 6
    assert set(s.enhanced_edges) == EXPECTED_EDGES
    assert s.text == TEXT


def test_missing_enhanced_key():
    doc = json.loads(GOLDEN)
    del doc["sentences"][0]["enhancedPlusPlusDependencies"]
    with pytest.raises(ProtocolError, match="enhancedPlusPlusDependencies"):
        sentences_from_json(doc)
    with pytest.raises(ProtocolError):
        sentences_from_json({"nope": []})


def test_request_format(tmp_path):
    req = ParseRequest(TEXT, timeout=5)
    before = ParseRequest(TEXT, timeout=5)
    with FakeParseServer(GOLDEN) as srv:
        resp = ParseClient(cache_dir=tmp_path).parse(ParseRequest(TEXT, endpoint=srv.url, timeout=5))
    assert req == before
    ((path, query, body),) = srv.requests
    assert path == "/"
    props = json.loads(query["properties"][0])
    assert props["annotators"] == "tokenize,ssplit,pos,lemma,depparse"
    assert props["outputFormat"] == "json"
    assert body == TEXT.encode("utf-8")
    assert len(resp.sentences) == 1


def test_empty_text_sends_nothing():
    with FakeParseServer(GOLDEN) as srv:
        with pytest.raises(ValueError):
            parse_remote(ParseRequest("", endpoint=srv.url))
    assert srv.requests == []


def test_unreachable_endpoint(tmp_path):
    with pytest.raises(TransportError):
        ParseClient(cache_dir=tmp_path).parse(ParseRequest(TEXT, endpoint=free_port_url(), timeout=2))
    assert list(tmp_path.iterdir()) == []


def test_server_error(tmp_path):
    with FakeParseServer(b"boom", status=500) as srv:
        with pytest.raises(ServerError) as err:
            ParseClient(cache_dir=tmp_path).parse(ParseRequest(TEXT, endpoint=srv.url, timeout=5))
    assert err.value.status == 500
    assert list(tmp_path.iterdir()) == []


def test_non_json_body():
    with FakeParseServer(b"<html>") as srv:
        with pytest.raises(ProtocolError):
            ParseClient().parse(ParseRequest(TEXT, endpoint=srv.url, timeout=5))


def test_cache_and_offline_replay(tmp_path):
    req = ParseRequest(TEXT, timeout=5)
    key = hashlib.sha256(json.dumps([TEXT, list(req.annotators)]).encode()).hexdigest()
    assert req.cache_key() == key
    with FakeParseServer(GOLDEN) as srv:
        live = ParseClient(cache_dir=tmp_path).parse(ParseRequest(TEXT, endpoint=srv.url, timeout=5))
        again = ParseClient(cache_dir=tmp_path).parse(ParseRequest(TEXT, endpoint=srv.url, timeout=5))
    assert len(srv.requests) == 1  # second call served from cache
    assert (tmp_path / f"{key}.json").exists()
    offline = ParseClient(cache_dir=tmp_path, offline=True).parse(
        ParseRequest(TEXT, endpoint=free_port_url()))
    assert triples_dump(live) == triples_dump(again) == triples_dump(offline)
    assert triples_dump(offline).encode() == triples_dump(live).encode()


def test_offline_miss(tmp_path):
    with pytest.raises(TransportError, match="offline"):
        ParseClient(cache_dir=tmp_path, offline=True).parse(ParseRequest("uncached text"))


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DEPEX_CACHE_DIR", str(tmp_path))
    assert ParseClient().cache_dir == tmp_path


def test_request_validation():
    with pytest.raises(ValueError):
        ParseRequest("x", timeout=0)
