"""Score paired pre/post data with mock models and print the report:
pre/post accuracy, drop, and robustness accuracy per perturbation type.

Run from the repo root:  python demos/02_robustness_report.py
"""

import os

from tableshake import load_dataset
from tableshake.adapters import (mock_first_row_adapter, mock_gold_adapter,
                                 predictions_for_pairs)
from tableshake.data import PerturbationSpec
from tableshake.engine import OperatorContext, perturb_dataset
from tableshake.metrics import build_report, merge_reports, render

HERE = os.path.dirname(__file__)

dataset = load_dataset(os.path.join(HERE, "data", "matches.jsonl"))
ctx = OperatorContext()

pairs_by_type = {}
for type_name, seed in (("row_shuffle", 42), ("col_shuffle", 7)):
    spec = PerturbationSpec(level="content", type=type_name, seed=seed)
    pairs, _ = perturb_dataset(dataset, spec, ctx)
    pairs_by_type[type_name] = pairs

all_pairs = [p for pairs in pairs_by_type.values() for p in pairs]

# the gold mock answers perfectly on both sides: the identity baseline
gold = mock_gold_adapter(all_pairs)
gold_report = build_report(pairs_by_type, predictions_for_pairs(all_pairs, gold),
                           model="gold-mock")
print(render(gold_report, "markdown"))

# the first-row mock guesses from row 1, so shuffling hurts it
first_row = mock_first_row_adapter()
fr_report = build_report(pairs_by_type,
                         predictions_for_pairs(all_pairs, first_row),
                         model="first-row-mock")
print(render(fr_report, "markdown"))

print(merge_reports([gold_report, fr_report]))
print("CSV flavor:\n")
print(render(fr_report, "csv"))
