"""Render the prompt golden files once; review the output, then check
it in. Run from the repo root: python tools/make_goldens.py"""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from tableshake import leta
from tableshake.adapters import build_qa_cot_prompt, default_qa_demos
from tableshake.data import QAExample, Table

GOLDENS = os.path.join(os.path.dirname(__file__), "..", "tests", "goldens")

TARGET_TABLE = Table(
    ["Year", "Score", "Venue"],
    [["1966", "4-2", "Wembley"], ["1970", "4-1", "Azteca"], ["1974", "2-1", "Olympiastadion"]],
)
TARGET_EXAMPLE = QAExample(
    id="g1", table=TARGET_TABLE,
    question="How many finals were decided by more than 2 goals?",
    answers=["2"],
)
CANDIDATE_TABLE = Table(
    ["Final", "Attendance", "Referee"],
    [["1966", "96,924", "G. Dienst"], ["1970", "107,412", "R. Glockner"]],
)


def write(name: str, text: str) -> None:
    path = os.path.join(GOLDENS, name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {name} ({len(text)} bytes)")


def main() -> None:
    os.makedirs(GOLDENS, exist_ok=True)
    pool = leta.default_pool()
    for type_name in ("header_synonym", "header_abbrev", "col_extension",
                      "col_masking"):
        write(f"prompt_{type_name}.txt",
              leta.build_prompt(type_name, pool, TARGET_EXAMPLE, seed=3))
    write("prompt_col_adding.txt",
          leta.build_prompt("col_adding", pool, TARGET_EXAMPLE, seed=3,
                            candidate_table=CANDIDATE_TABLE))
    for category in leta.ALL_CATEGORIES:
        slug = category.name.lower().replace(" ", "_").replace("-", "_")
        write(f"prompt_nlq_{slug}.txt",
              leta.build_prompt(category, pool, TARGET_EXAMPLE, seed=3))
    write("prompt_qa_cot.txt",
          build_qa_cot_prompt(default_qa_demos(), TARGET_TABLE,
                              TARGET_EXAMPLE.question))


if __name__ == "__main__":
    main()
