"""HTTP client for a CoreNLP-compatible parse server.

The server receives raw text as the POST body and a ``properties`` query
parameter holding a JSON object; it answers with the CoreNLP JSON document.
Responses are cached on disk as ``<cache>/<sha256>.json`` so corpus runs can
be replayed offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

import requests

from .corpus import DepEdge, Sentence, Token

log = logging.getLogger(__name__)

DEFAULT_ANNOTATORS = ("tokenize", "ssplit", "pos", "lemma", "depparse")
DEFAULT_ENDPOINT = "http://localhost:9000"
CACHE_ENV = "DEPEX_CACHE_DIR"

ENHANCED_KEY = "enhancedPlusPlusDependencies"
BASIC_KEY = "basicDependencies"

# Penn Treebank -> universal POS, for the coarse tag the server doesn't send
_PTB_TO_UPOS = {
    "CC": "CCONJ", "CD": "NUM", "DT": "DET", "EX": "PRON", "FW": "X", "IN": "ADP",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ", "LS": "X", "MD": "AUX", "NN": "NOUN",
    "NNS": "NOUN", "NNP": "PROPN", "NNPS": "PROPN", "PDT": "DET", "POS": "PART",
    "PRP": "PRON", "PRP$": "PRON", "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "RP": "ADP",
    "SYM": "SYM", "TO": "PART", "UH": "INTJ", "VB": "VERB", "VBD": "VERB", "VBG": "VERB",
    "VBN": "VERB", "VBP": "VERB", "VBZ": "VERB", "WDT": "DET", "WP": "PRON", "WP$": "PRON",
    "WRB": "ADV", ".": "PUNCT", ",": "PUNCT", ":": "PUNCT", "``": "PUNCT", "''": "PUNCT",
    "-LRB-": "PUNCT", "-RRB-": "PUNCT", "HYPH": "PUNCT", "NFP": "PUNCT", "#": "SYM", "$": "SYM",
}


class ParseClientError(Exception):
    pass


class TransportError(ParseClientError):
    """The server could not be reached."""


class ServerError(ParseClientError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"parse server answered HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body

    def __reduce__(self):
        return type(self), (self.status, self.body)


class ProtocolError(ParseClientError):
    """The response is not the JSON shape we expect."""


@dataclass(frozen=True)
class ParseRequest:
    text: str
    annotators: tuple[str, ...] = DEFAULT_ANNOTATORS
    endpoint: str = DEFAULT_ENDPOINT
    timeout: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "annotators", tuple(self.annotators))
        if not self.text:
            raise ValueError("parse request text is empty")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def properties(self) -> dict:
        return {"annotators": ",".join(self.annotators), "outputFormat": "json"}

    def cache_key(self) -> str:
        payload = json.dumps([self.text, list(self.annotators)], ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ParseResponse:
    sentences: tuple[Sentence, ...]


def _edges(deps: list, key: str) -> list[DepEdge]:
    edges = []
    for d in deps:
        try:
            rel = d["dep"]
            edges.append(DepEdge(int(d["governor"]), int(d["dependent"]),
                                 "root" if rel == "ROOT" else rel))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"bad entry in {key}: {d!r} ({exc})") from None
    return edges


def sentences_from_json(doc: dict, text: str | None = None) -> list[Sentence]:
    """Map a CoreNLP JSON document to sentences."""
    if not isinstance(doc, dict) or "sentences" not in doc:
        raise ProtocolError("response has no 'sentences' key")
    out = []
    for i, s in enumerate(doc["sentences"]):
        if "tokens" not in s:
            raise ProtocolError(f"sentence {i} has no 'tokens' key")
        if ENHANCED_KEY not in s:
            raise ProtocolError(f"sentence {i} has no '{ENHANCED_KEY}' key")
        try:
            tokens = [Token(int(t["index"]), t["word"], t.get("lemma", ""),
                            _PTB_TO_UPOS.get(t.get("pos", ""), "X" if t.get("pos") else ""),
                            t.get("pos", ""))
                      for t in s["tokens"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"bad token in sentence {i}: {exc}") from None
        surface = ""
        if text is not None and s["tokens"]:
            first, last = s["tokens"][0], s["tokens"][-1]
            if "characterOffsetBegin" in first and "characterOffsetEnd" in last:
                surface = text[first["characterOffsetBegin"]:last["characterOffsetEnd"]]
        if not surface:
            surface = " ".join(t.form for t in tokens)
        basic = _edges(s.get(BASIC_KEY, []), BASIC_KEY)
        enhanced = _edges(s[ENHANCED_KEY], ENHANCED_KEY)
        try:
            out.append(Sentence(tuple(tokens), tuple(basic), tuple(enhanced), surface))
        except ValueError as exc:
            raise ProtocolError(f"sentence {i}: {exc}") from None
    return out


class ParseClient:
    """Shareable client; at most ``max_in_flight`` requests run at once."""

    def __init__(self, cache_dir: str | os.PathLike | None = None, max_in_flight: int = 4,
                 offline: bool = False):
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV) or None
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.offline = offline
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _key_lock(self, key: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def _cache_path(self, key: str) -> Path | None:
        return self.cache_dir / f"{key}.json" if self.cache_dir else None

    def fetch_json(self, req: ParseRequest) -> dict:
        key = req.cache_key()
        path = self._cache_path(key)
        with self._key_lock(key):
            if path is not None and path.exists():
                log.debug("parse cache hit %s", key)
                return json.loads(path.read_text(encoding="utf-8"))
            if self.offline:
                raise TransportError(f"offline and no cached response for key {key}")
            doc = self._post(req)
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    json.dump(doc, f, ensure_ascii=False, sort_keys=True)
                os.replace(tmp, path)
            return doc

    def _post(self, req: ParseRequest) -> dict:
        url = req.endpoint.rstrip("/") + "/"
        with self._slots:
            try:
                r = requests.post(url, params={"properties": json.dumps(req.properties())},
                                  data=req.text.encode("utf-8"), timeout=req.timeout)
            except requests.RequestException as exc:
                raise TransportError(f"cannot reach parse server at {url}: {exc}") from exc
        if not 200 <= r.status_code < 300:
            raise ServerError(r.status_code, r.text)
        try:
            return json.loads(r.content.decode("utf-8"), strict=False)
        except ValueError as exc:
            raise ProtocolError(f"response is not JSON: {exc}") from None

    def parse(self, req: ParseRequest) -> ParseResponse:
        return ParseResponse(tuple(sentences_from_json(self.fetch_json(req), req.text)))


def parse_remote(req: ParseRequest, client: ParseClient | None = None) -> ParseResponse:
    """Parse ``req.text`` on the server (or from the cache)."""
    return (client or ParseClient()).parse(req)
