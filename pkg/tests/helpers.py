"""Builders and random generators shared by the test modules."""

import random
import string
from pathlib import Path

from depex.corpus import DepEdge, Document, Sentence, Token

FIXTURES = Path(__file__).parent / "fixtures"

VERB_TAGS = ("VB", "VBD", "VBZ", "VBN")
NOUN_TAGS = ("NN", "NNS", "NNP", "NNPS")
OTHER_TAGS = ("DT", "JJ", "IN", "RB", "CC", ".")
RELATIONS = ("nsubj", "nsubj:pass", "csubj", "obj", "iobj", "obl", "obl:to", "neg", "compound",
             "conj:and", "conj:or", "cc", "det", "amod", "advmod", "aux", "aux:pass", "punct", "nmod")


def sent(text, edges, basic=None):
    """``sent("The/DT cat/NN chased/VBD", [(0, 3, "root"), (3, 2, "nsubj")])``.

    Edges are ``(source, target, relation)``; they become the enhanced graph.
    Unless ``basic`` is given, the basic graph keeps each token's first edge.
    """
    tokens = []
    for i, item in enumerate(text.split(), 1):
        form, _, xpos = item.rpartition("/") if "/" in item else (item, "", "")
        upos = "VERB" if xpos.startswith("VB") else ""
        tokens.append(Token(i, form, form.lower(), upos, xpos))
    enhanced = tuple(DepEdge(*e) for e in edges)
    if basic is None:
        firsts = {}
        for e in enhanced:
            firsts.setdefault(e.target, e)
        basic_edges = tuple(firsts.values())
    else:
        basic_edges = tuple(DepEdge(*e) for e in basic)
    return Sentence(tuple(tokens), basic_edges, enhanced, " ".join(t.form for t in tokens))


def random_word(rng, alphabet=string.ascii_letters + "éßø", max_len=8):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))


def random_sentence(rng: random.Random, max_tokens=12) -> Sentence:
    """A valid sentence: one basic root, one basic head per token, random enhanced edges."""
    n = rng.randint(1, max_tokens)
    tokens = []
    for i in range(1, n + 1):
        xpos = rng.choice(VERB_TAGS + NOUN_TAGS + OTHER_TAGS + ("",))
        tokens.append(Token(i, random_word(rng), rng.choice(["", random_word(rng)]),
                            rng.choice(["", "NOUN", "VERB", "X"]), xpos))
    root = rng.randint(1, n)
    basic = []
    for i in range(1, n + 1):
        if i == root:
            basic.append(DepEdge(0, i, "root"))
        elif rng.random() < 0.9:
            head = rng.choice([j for j in range(1, n + 1) if j != i])
            basic.append(DepEdge(head, i, rng.choice(RELATIONS)))
    enhanced = []
    for i in range(1, n + 1):
        for _ in range(rng.randint(0, 2)):
            enhanced.append(DepEdge(rng.randint(0, n), i, rng.choice(RELATIONS + ("root",))))
    text = " ".join(t.form for t in tokens) if rng.random() < 0.8 else ""
    return Sentence(tuple(tokens), tuple(basic), tuple(enhanced), text)


def random_document(rng: random.Random, n_sentences=None, doc_id="d") -> Document:
    n = rng.randint(0, 6) if n_sentences is None else n_sentences
    return Document(doc_id, rng.choice(["generic", "domain"]), rng.choice(["short", "long"]),
                    tuple(random_sentence(rng) for _ in range(n)))


def random_biluo(rng: random.Random, labels=("X", "Y", "Z"), max_len=15) -> list[str]:
    """A well-formed BILUO tag sequence."""
    tags = []
    n = rng.randint(0, max_len)
    while len(tags) < n:
        r = rng.random()
        label = rng.choice(labels)
        if r < 0.4:
            tags.append("O")
        elif r < 0.7:
            tags.append(f"U-{label}")
        else:
            inner = rng.randint(0, 3)
            tags.extend([f"B-{label}"] + [f"I-{label}"] * inner + [f"L-{label}"])
    return tags


def brute_biluo_spans(tags):
    """Spans read straight off a well-formed BILUO sequence, by scanning for span ends."""
    spans = set()
    for end, tag in enumerate(tags):
        if tag.startswith("U-"):
            spans.add((end, end, tag[2:]))
        elif tag.startswith("L-"):
            start = end
            while not tags[start].startswith("B-"):
                start -= 1
            spans.add((start, end, tag[2:]))
    return spans


class FakeParseServer:
    """A local HTTP server standing in for the parse server.

    Answers every POST with ``(status, body)`` and records each request as
    ``(path, query, body_bytes)``.
    """

    def __init__(self, body: bytes, status: int = 200):
        import http.server
        import threading

        self.body, self.status, self.requests = body, status, []
        outer = self

        class Handler(http.server.BaseHTTPRequestHandler):
            def do_POST(self):
                from urllib.parse import parse_qs, urlsplit
                n = int(self.headers.get("Content-Length", 0))
                parts = urlsplit(self.path)
                outer.requests.append((parts.path, parse_qs(parts.query), self.rfile.read(n)))
                self.send_response(outer.status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(outer.body)))
                self.end_headers()
                self.wfile.write(outer.body)

            def log_message(self, *args):
                pass

        self._httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self):
        return f"http://127.0.0.1:{self._httpd.server_address[1]}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._httpd.shutdown()
        self._httpd.server_close()


def free_port_url():
    """An endpoint on a port nothing listens on."""
    import socket
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return f"http://127.0.0.1:{s.getsockname()[1]}"


# Sentence templates for the synthetic throughput corpus: (tagged text, edges).
# Slots N1/N2/V are filled with random words so lemma counts vary.
_TEMPLATES = [
    ("The/DT N1/NN V/VBD the/DT N2/NN ./.",
     [(0, 3, "root"), (2, 1, "det"), (3, 2, "nsubj"), (5, 4, "det"), (3, 5, "obj"), (3, 6, "punct")]),
    ("The/DT N1/NN was/VBD not/RB V/VBN by/IN N2/NNP ./.",
     [(0, 5, "root"), (2, 1, "det"), (5, 2, "nsubj:pass"), (5, 3, "aux:pass"), (5, 4, "neg"),
      (7, 6, "case"), (5, 7, "obl:by"), (5, 8, "punct")]),
    ("N1/NNP and/CC N2/NNP V/VBD to/IN the/DT brain/NN region/NN ./.",
     [(0, 4, "root"), (4, 1, "nsubj"), (3, 2, "cc"), (1, 3, "conj:and"), (4, 3, "nsubj"),
      (8, 5, "case"), (8, 6, "det"), (8, 7, "compound"), (4, 8, "obl:to"), (4, 9, "punct")]),
    ("white/JJ matter/NN N1/NNS V/VBD in/IN N2/NNP patients/NNS with/IN severe/JJ symptoms/NNS ./.",
     [(0, 4, "root"), (3, 2, "compound"), (2, 1, "amod"), (4, 3, "nsubj"), (7, 5, "case"),
      (7, 6, "compound"), (4, 7, "obl:in"), (10, 8, "case"), (10, 9, "amod"), (7, 10, "nmod:with"),
      (4, 11, "punct")]),
]


def synthetic_document(doc_id: str, n_tokens: int, seed: int = 0) -> Document:
    """A pre-parsed document of about ``n_tokens`` tokens built from fixed templates."""
    rng = random.Random(seed)
    nouns = [random_word(rng, string.ascii_lowercase, 7) for _ in range(400)]
    verbs = [random_word(rng, string.ascii_lowercase, 6) + "ed" for _ in range(60)]
    sentences, count = [], 0
    while count < n_tokens:
        text, edges = rng.choice(_TEMPLATES)
        text = text.replace("N1", rng.choice(nouns).capitalize()).replace("N2", rng.choice(nouns))
        s = sent(text.replace("V/", rng.choice(verbs) + "/"), edges)
        sentences.append(s)
        count += len(s.tokens)
    return Document(doc_id, "domain", "long", tuple(sentences))
