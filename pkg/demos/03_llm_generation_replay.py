"""LLM-prompted generation without a network: build the prompts, replay
canned completions through the fixture client, and watch the validators
accept or reject candidates.

Run from the repo root:  python demos/03_llm_generation_replay.py
"""

import os

from tableshake import leta, load_dataset
from tableshake.leta.parse import Paraphrase
from tableshake.leta.pools import category_by_name
from tableshake.leta.validate import validate_candidate
from tableshake.llm import FixtureClient, prompt_hash
from tableshake.rng import derive_seed

HERE = os.path.dirname(__file__)

dataset = load_dataset(os.path.join(HERE, "data", "matches.jsonl"))
pool = leta.default_pool()
example = dataset.examples[4]  # Ana Reyes points question
category = category_by_name("Reasoning-carrier")

prompt = leta.build_prompt(category, pool, example, seed=0)
print("--- rendered prompt (tail) ---")
print("\n".join(prompt.splitlines()[-4:]))

# canned completions standing in for a live model, keyed by the exact
# per-round prompts (each round reorders demonstrations, so the keys
# differ); the third round repeats the first answer to show the dedupe
responses = [
    "Paraphrase: What is the quantity of points that Ana Reyes scored?",
    "Paraphrase: What is the number of points Ana Reyes scored?",
    "Paraphrase: What is the quantity of points that Ana Reyes scored?",
]
fixtures = {}
for round_index, text in enumerate(responses):
    round_prompt = leta.build_prompt(category, pool, example,
                                     seed=derive_seed(0, "round", round_index))
    fixtures[prompt_hash(round_prompt)] = text
client = FixtureClient(fixtures)

result = leta.generate(category, example, pool, client,
                       leta.GenerationConfig(rounds=3), seed=0)
print(f"\naccepted {result.log.accepted} candidates,"
      f" {result.log.duplicates} duplicate dropped")
for pair in result.pairs:
    print("  post question:", pair.post.question)

# the validators catch the classic failure modes
print("\n--- validator rejections ---")
bad = [
    ("drops the points column", "What total did Ana Reyes register?"),
    ("invents a year", "How many points did Ana Reyes score in 1999?"),
    ("keeps the carrier phrase", "How many points did Ana Reyes net?"),
    ("returns the original", example.question),
]
for label, text in bad:
    verdict = validate_candidate(category, example, Paraphrase(text))
    print(f"  {label:26s} -> rejected: {verdict.reason}")
