"""
Generating queries from notes (mock endpoint)
=============================================

The generation client speaks the OpenAI-compatible chat-completions
protocol.  Here the transport is a mock so the demo runs offline; point
base_url at any local server for the real thing.
"""

import json
import tempfile
from pathlib import Path

import httpx

from trialsearch import (
    GenerationCache,
    LLMClient,
    LLMConfig,
    PromptTemplate,
    default_stoplist,
    generate_query,
    load_topics,
)

ROOT = Path(__file__).resolve().parents[1]
topics = load_topics(ROOT / "tests" / "data" / "fixture_topics.xml")[:3]


# A canned model: pull a few long words out of the note, like a tiny LLM
# with very strong opinions.
def mock_model(request: httpx.Request) -> httpx.Response:
    prompt = json.loads(request.content)["messages"][0]["content"]
    note = prompt.split("note:\n", 1)[-1]
    keywords = [w.strip(".,") for w in note.split()
                if w.strip(".,").isalpha() and len(w) > 7]
    reply = ", ".join(dict.fromkeys(keywords[:8]))
    return httpx.Response(200, json={"choices": [{"message": {"content": reply}}]})


cfg = LLMConfig(base_url="http://localhost:9999/v1", model_name="mock-model")
client = LLMClient(cfg, transport=httpx.MockTransport(mock_model))
template = PromptTemplate(
    "List the key clinical concepts as a comma-separated line.\n"
    "Clinical note:\n{NOTE}"
)
stoplist = default_stoplist()
cache = GenerationCache(tempfile.mkdtemp(prefix="demo_gen_cache_"))

for topic in topics:
    bundle = generate_query(client, template, topic, stoplist, cache=cache)
    print(f"topic {bundle.topic_id}")
    print(f"  note:      {bundle.original_note[:70]}...")
    print(f"  raw:       {bundle.raw_generation}")
    print(f"  processed: {' '.join(bundle.processed.terms)}")
    print(f"  ({bundle.term_count} terms, template {bundle.template_id})")

# Second pass hits the cache: offline=True forbids network entirely.
again = generate_query(client, template, topics[0], stoplist,
                       cache=cache, offline=True)
print("\ncached replay identical:", again.raw_generation)
