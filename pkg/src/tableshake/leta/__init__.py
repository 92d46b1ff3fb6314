"""LLM-backed adversarial example generation: prompt builders with
demonstration pools, completion parsing, candidate validation, and the
multi-round generation loop."""

from .pools import (DemonstrationPool, ParaphraseCategory, PoolError,
                    WORD_CATEGORIES, SENTENCE_CATEGORIES, ALL_CATEGORIES,
                    default_pool, load_pool)
from .prompts import build_prompt, PromptError, LETA_TYPES
from .parse import (Candidate, ColumnAdd, ColumnExtension, ColumnMask,
                    HeaderRename, Paraphrase, ParseFailure, parse_generation)
from .validate import ValidationResult, validate_candidate
from .generate import (GenerationConfig, GenerationLog, GenerationResult,
                       GoldEchoClient, generate)

__all__ = [
    "DemonstrationPool", "ParaphraseCategory", "PoolError",
    "WORD_CATEGORIES", "SENTENCE_CATEGORIES", "ALL_CATEGORIES",
    "default_pool", "load_pool",
    "build_prompt", "PromptError", "LETA_TYPES",
    "Candidate", "ColumnAdd", "ColumnExtension", "ColumnMask",
    "HeaderRename", "Paraphrase", "ParseFailure", "parse_generation",
    "ValidationResult", "validate_candidate",
    "GenerationConfig", "GenerationLog", "GenerationResult",
    "GoldEchoClient", "generate",
]
