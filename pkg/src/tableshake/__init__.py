"""tableshake: adversarial perturbation and robustness evaluation for
Table QA.

The package splits into the data model (data), deterministic
perturbation operators (engine, rta, retrieval), LLM-prompted
generation (leta, llm), model adapters (adapters), paired robustness
metrics (metrics), and the model-in-the-loop annotation backend
(service). The ``tableshake`` CLI ties them together.
"""

from .data import (Dataset, PerturbationSpec, PerturbedPair, QAExample,
                   SchemaError, Table, load_dataset, parse_dataset,
                   save_dataset, serialize_dataset, validate_table)
from .engine import (OperatorContext, PerturbationOutcome, apply_perturbation,
                     compose_mix, is_position_dependent, perturb_dataset,
                     shuffle_columns, shuffle_rows)
from .metrics import (RobustnessReport, ScoredPair, accuracy, build_report,
                      exact_match, normalize_answer, render,
                      robustness_accuracy, sqa_sequence_accuracy)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "PerturbationSpec", "PerturbedPair", "QAExample", "SchemaError",
    "Table", "load_dataset", "parse_dataset", "save_dataset",
    "serialize_dataset", "validate_table",
    "OperatorContext", "PerturbationOutcome", "apply_perturbation",
    "compose_mix", "is_position_dependent", "perturb_dataset",
    "shuffle_columns", "shuffle_rows",
    "RobustnessReport", "ScoredPair", "accuracy", "build_report",
    "exact_match", "normalize_answer", "render", "robustness_accuracy",
    "sqa_sequence_accuracy",
    "__version__",
]
