"""
Parsing through a server, replaying from cache
==============================================

Raw text is parsed by a CoreNLP-compatible server. Every response is stored
under ``$DEPEX_CACHE_DIR/<sha256>.json``, so a corpus run can be repeated
offline. This demo seeds the cache with a recorded response instead of
talking to a live server.
"""

import json
import shutil
import tempfile
from pathlib import Path

from depex import ParseClient, ParseRequest, extract_triples
from depex.parser_client import TransportError, sentences_from_json

DATA = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
recorded = json.loads((DATA / "corenlp_the_cat.json").read_text())
text = "The cat chased the dog ."

###############################################################################
# The server JSON maps straight onto sentences.

(sentence,) = sentences_from_json(recorded, text)
print([(t.form, t.xpos, t.upos) for t in sentence.tokens])

###############################################################################
# Put the response where the client would have cached it, then parse offline.

cache = Path(tempfile.mkdtemp())
req = ParseRequest(text)
(cache / f"{req.cache_key()}.json").write_text(json.dumps(recorded))

client = ParseClient(cache_dir=cache, offline=True)
for s in client.parse(req).sentences:
    print([t.as_tuple() for t in extract_triples(s)])

###############################################################################
# Text that was never parsed fails fast offline.

try:
    client.parse(ParseRequest("Something new."))
except TransportError as exc:
    print("offline:", exc)
shutil.rmtree(cache)
