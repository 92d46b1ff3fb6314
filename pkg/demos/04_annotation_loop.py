"""The model-in-the-loop annotation workflow, driven over HTTP exactly
as the browser client drives it: serve, fetch an item, try perturbed
questions until the live model's prediction flips, accept, export.

Run from the repo root:  python demos/04_annotation_loop.py
"""

import json
import os
import threading

import requests

from tableshake.data import parse_dataset
from tableshake.service import make_server

HERE = os.path.dirname(__file__)
DATASET = os.path.join(HERE, "data", "matches.jsonl")

server = make_server("127.0.0.1", 0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print(f"annotation service on {base}")

# the in-loop model is a keyword mock: its prediction depends on whether
# the question still contains "how many", so carrier rewrites flip it
session = requests.post(f"{base}/sessions", json={
    "dataset": DATASET, "adapter": "keyword:how many", "level": "word",
}, timeout=5).json()["session_id"]
print(f"session {session}")

item = requests.get(f"{base}/sessions/{session}/next", timeout=5).json()
while "how many" not in item["question"]:
    requests.post(f"{base}/sessions/{session}/skip",
                  json={"item_id": item["item_id"]}, timeout=5)
    item = requests.get(f"{base}/sessions/{session}/next", timeout=5).json()

print(f"\nitem {item['item_id']}: {item['question']}")
print(f"model answers {item['original_prediction']} on the original")

attempts = [
    item["question"].replace("how many", "how many total"),   # keeps the phrase
    item["question"].replace("how many", "what is the quantity of"),
]
accepted = None
for question in attempts:
    result = requests.post(f"{base}/sessions/{session}/attempt",
                           json={"item_id": item["item_id"], "question": question},
                           timeout=5).json()
    badge = "FLIPPED" if result["flipped"] else "UNCHANGED"
    print(f"  attempt: {question!r} -> {badge} {result['prediction']}")
    if result["flipped"]:
        accepted = question

requests.post(f"{base}/sessions/{session}/accept",
              json={"item_id": item["item_id"], "question": accepted}, timeout=5)
export = requests.get(f"{base}/sessions/{session}/export", timeout=5).content
pairs = parse_dataset(export, kind="pairs")
print(f"\nexported {len(pairs)} pair(s):")
print(json.dumps({"pre": pairs.examples[0].pre.question,
                  "post": pairs.examples[0].post.question}, indent=2))

server.shutdown()
