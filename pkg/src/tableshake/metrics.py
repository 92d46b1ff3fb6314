"""Exact-match scoring and paired robustness metrics.

Answer normalization is toolkit-defined and frozen here in one place:
trim, lowercase, collapse whitespace, strip surrounding quotes, drop
thousands-separator commas, and canonicalize numbers to their shortest
decimal form. Exact match compares normalized answer multisets, with a
1e-6 relative tolerance for numeric values.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .data import PERTURBATION_TYPES, PerturbedPair, QAExample

NUMERIC_REL_TOL = 1e-6

_WS = re.compile(r"\s+")
_THOUSANDS = re.compile(r"(?<=\d),(?=\d)")
_QUOTES = ("\"", "'", "“", "”", "‘", "’")


def normalize_answer(text: str) -> str:
    out = text.strip()
    while len(out) >= 2 and out[0] in _QUOTES and out[-1] in _QUOTES:
        out = out[1:-1].strip()
    out = _WS.sub(" ", out).lower()
    out = _THOUSANDS.sub("", out)
    value = _parse_number(out)
    if value is not None:
        out = _shortest_decimal(value)
    return out


def _parse_number(text: str) -> float | None:
    if not re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", text):
        return None
    try:
        return float(text)
    except ValueError:  # pragma: no cover - fullmatch already guards
        return None


def _shortest_decimal(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def exact_match(pred: Sequence[str], gold: Sequence[str]) -> bool:
    """Normalized multiset equality; answer order never matters.
    Numeric answers match within NUMERIC_REL_TOL relative tolerance."""
    if not gold:
        raise ValueError("gold answers must be non-empty")
    if len(pred) != len(gold):
        return False

    pred_text, pred_nums = _split_numeric(pred)
    gold_text, gold_nums = _split_numeric(gold)
    if Counter(pred_text) != Counter(gold_text):
        return False
    if len(pred_nums) != len(gold_nums):
        return False
    pred_nums.sort()
    gold_nums.sort()
    return all(
        math.isclose(p, g, rel_tol=NUMERIC_REL_TOL, abs_tol=1e-12)
        for p, g in zip(pred_nums, gold_nums)
    )


def predictions_equal(a: Sequence[str], b: Sequence[str]) -> bool:
    """Exact-match comparison that tolerates empty prediction lists
    (two empty predictions are the same prediction)."""
    if not a or not b:
        return not a and not b
    return exact_match(list(a), list(b))


def _split_numeric(values: Sequence[str]) -> tuple[list[str], list[float]]:
    text: list[str] = []
    nums: list[float] = []
    for value in values:
        norm = normalize_answer(value)
        parsed = _parse_number(norm)
        if parsed is None:
            text.append(norm)
        else:
            nums.append(parsed)
    return text, nums


# --- prediction sets and accuracy ------------------------------------------

PredictionSet = Mapping[tuple[str, str], Sequence[str]]


def accuracy(predictions: PredictionSet, examples: Iterable[QAExample],
             side: str = "pre") -> float:
    """100 x (#exact matches) / (#examples). Missing predictions count
    as incorrect; use coverage() to surface them."""
    examples = list(examples)
    if not examples:
        raise ValueError("no examples to score")
    correct = 0
    for example in examples:
        pred = predictions.get((example.id, side))
        if pred is not None and exact_match(list(pred), list(example.answers)):
            correct += 1
    return 100.0 * correct / len(examples)


def coverage(predictions: PredictionSet, examples: Iterable[QAExample],
             side: str) -> list[str]:
    """Ids lacking a prediction on the requested side."""
    return [e.id for e in examples if (e.id, side) not in predictions]


@dataclass(frozen=True)
class ScoredPair:
    """Per-pair correctness flags, derived solely from exact_match on
    the two sides."""

    id: str
    pre_correct: bool
    post_correct: bool
    sequence_id: str | None = None


def score_pairs(pairs: Iterable[PerturbedPair],
                predictions: PredictionSet) -> list[ScoredPair]:
    scored = []
    for pair in pairs:
        pre_pred = predictions.get((pair.id, "pre"))
        post_pred = predictions.get((pair.id, "post"))
        scored.append(ScoredPair(
            id=pair.id,
            pre_correct=pre_pred is not None
            and exact_match(list(pre_pred), list(pair.pre.answers)),
            post_correct=post_pred is not None
            and exact_match(list(post_pred), list(pair.post.answers)),
            sequence_id=pair.pre.sequence_id,
        ))
    return scored


def robustness_accuracy(scored: Iterable[ScoredPair]) -> float | None:
    """100 x |pre and post correct| / |pre correct|, or None when no
    pair was correct pre-perturbation (rendered as an em dash, never
    0 or 100)."""
    both = 0
    pre = 0
    for item in scored:
        if item.pre_correct:
            pre += 1
            if item.post_correct:
                both += 1
    if pre == 0:
        return None
    return 100.0 * both / pre


def sqa_sequence_accuracy(scored: Iterable[ScoredPair], side: str = "pre") -> float:
    """Mean over sequences of the fraction of their questions answered
    correctly, x100. Every scored item must carry a sequence_id."""
    if side not in ("pre", "post"):
        raise ValueError(f"side must be 'pre' or 'post', got {side!r}")
    totals: dict[str, int] = {}
    hits: dict[str, int] = {}
    for item in scored:
        if item.sequence_id is None:
            raise ValueError(f"scored item {item.id!r} lacks a sequence_id")
        totals[item.sequence_id] = totals.get(item.sequence_id, 0) + 1
        correct = item.pre_correct if side == "pre" else item.post_correct
        if correct:
            hits[item.sequence_id] = hits.get(item.sequence_id, 0) + 1
    if not totals:
        raise ValueError("no scored items")
    per_sequence = [hits.get(seq, 0) / total for seq, total in totals.items()]
    return 100.0 * sum(per_sequence) / len(per_sequence)


# --- reports ---------------------------------------------------------------

REPORT_SLACK = 0.15  # rounding slack when validating 1-decimal report rows


@dataclass(frozen=True)
class ReportRow:
    type: str
    n: int
    pre_acc: float
    post_acc: float
    r_acc: float | None
    missing_pre: int = 0
    missing_post: int = 0

    @property
    def drop(self) -> float:
        return self.pre_acc - self.post_acc


@dataclass(frozen=True)
class RobustnessReport:
    rows: tuple[ReportRow, ...]
    overall_pre_acc: float | None = None
    model: str | None = None


def check_row(row: ReportRow, slack: float = REPORT_SLACK) -> list[str]:
    """Consistency constraints every report row must satisfy:
    accuracies in [0, 100] and, since both-correct is a subset of
    post-correct, R-Acc <= 100 x Post/Pre (up to rounding slack)."""
    problems = []
    for label, value in (("pre_acc", row.pre_acc), ("post_acc", row.post_acc),
                         ("r_acc", row.r_acc)):
        if value is not None and not (0.0 <= value <= 100.0):
            problems.append(f"{row.type}: {label} {value} outside [0, 100]")
    if row.r_acc is not None and row.pre_acc > 0:
        bound = 100.0 * row.post_acc / row.pre_acc
        if row.r_acc > bound + slack:
            problems.append(
                f"{row.type}: r_acc {row.r_acc:.2f} exceeds 100*post/pre"
                f" = {bound:.2f} (+{slack} slack)"
            )
    return problems


def check_report(report: RobustnessReport, slack: float = REPORT_SLACK) -> list[str]:
    problems = []
    for row in report.rows:
        problems.extend(check_row(row, slack))
    return problems


def _type_order(type_name: str) -> tuple[int, str]:
    try:
        return (PERTURBATION_TYPES.index(type_name), type_name)
    except ValueError:
        return (len(PERTURBATION_TYPES), type_name)


def build_report(pairs_by_type: Mapping[str, Sequence[PerturbedPair]],
                 predictions: PredictionSet,
                 model: str | None = None,
                 allow_missing: bool = False) -> RobustnessReport:
    """One row per perturbation type: n, pre/post accuracy, drop, R-Acc.

    Both sides of every pair must be covered by the prediction set;
    gaps raise unless allow_missing, in which case they score as
    incorrect and are tallied on the row.
    """
    rows = []
    for type_name in sorted(pairs_by_type, key=_type_order):
        pairs = list(pairs_by_type[type_name])
        if not pairs:
            continue
        missing_pre = coverage(predictions, (p.pre for p in pairs), "pre")
        missing_post = coverage(predictions, (p.post for p in pairs), "post")
        if (missing_pre or missing_post) and not allow_missing:
            gaps = [f"{i}/pre" for i in missing_pre] + [f"{i}/post" for i in missing_post]
            raise ValueError(
                f"prediction coverage gap for type {type_name!r}: "
                + ", ".join(gaps[:10])
                + ("..." if len(gaps) > 10 else "")
            )
        scored = score_pairs(pairs, predictions)
        pre_acc = 100.0 * sum(s.pre_correct for s in scored) / len(scored)
        post_acc = 100.0 * sum(s.post_correct for s in scored) / len(scored)
        rows.append(ReportRow(
            type=type_name,
            n=len(scored),
            pre_acc=pre_acc,
            post_acc=post_acc,
            r_acc=robustness_accuracy(scored),
            missing_pre=len(missing_pre),
            missing_post=len(missing_post),
        ))
    all_pairs = [p for pairs in pairs_by_type.values() for p in pairs]
    overall = None
    if all_pairs:
        unique = {p.id: p.pre for p in all_pairs}
        overall = accuracy(predictions, unique.values(), "pre")
    report = RobustnessReport(rows=tuple(rows), overall_pre_acc=overall, model=model)
    problems = check_report(report)
    if problems:  # computed from counts, so this indicates a bug
        raise AssertionError("inconsistent report: " + "; ".join(problems))
    return report


def _fmt(value: float | None) -> str:
    return "—" if value is None else f"{value:.1f}"


def render(report: RobustnessReport, format: str = "markdown") -> str:
    """Deterministic text rendering; accuracies printed to one decimal."""
    if format == "markdown":
        return _render_markdown(report)
    if format == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown format {format!r}")


def _render_markdown(report: RobustnessReport) -> str:
    lines = []
    if report.model:
        lines.append(f"## Robustness report: {report.model}")
        lines.append("")
    lines.append("| type | n | pre_acc | post_acc | drop | r_acc |")
    lines.append("| --- | ---: | ---: | ---: | ---: | ---: |")
    for row in report.rows:
        lines.append(
            f"| {row.type} | {row.n} | {_fmt(row.pre_acc)} | {_fmt(row.post_acc)}"
            f" | {row.drop:.1f} | {_fmt(row.r_acc)} |"
        )
    if report.overall_pre_acc is not None:
        lines.append(f"| overall (pre) | | {_fmt(report.overall_pre_acc)} | | | |")
    return "\n".join(lines) + "\n"


def _csv_field(value: str) -> str:
    if any(c in value for c in ",\"\n"):
        return '"' + value.replace('"', '""') + '"'
    return value


def _render_csv(report: RobustnessReport) -> str:
    lines = ["type,n,pre_acc,post_acc,drop,r_acc"]
    for row in report.rows:
        fields = [row.type, str(row.n), _fmt(row.pre_acc), _fmt(row.post_acc),
                  f"{row.drop:.1f}", _fmt(row.r_acc)]
        lines.append(",".join(_csv_field(f) for f in fields))
    return "\r\n".join(lines) + "\r\n"


# --- structured report (de)serialization for merging -----------------------

def report_to_obj(report: RobustnessReport) -> dict:
    return {
        "model": report.model,
        "overall_pre_acc": report.overall_pre_acc,
        "rows": [
            {
                "type": r.type, "n": r.n, "pre_acc": r.pre_acc,
                "post_acc": r.post_acc, "r_acc": r.r_acc,
                "missing_pre": r.missing_pre, "missing_post": r.missing_post,
            }
            for r in report.rows
        ],
    }


def report_from_obj(obj: dict) -> RobustnessReport:
    rows = tuple(
        ReportRow(
            type=r["type"], n=r["n"], pre_acc=r["pre_acc"],
            post_acc=r["post_acc"], r_acc=r["r_acc"],
            missing_pre=r.get("missing_pre", 0),
            missing_post=r.get("missing_post", 0),
        )
        for r in obj["rows"]
    )
    return RobustnessReport(rows=rows, overall_pre_acc=obj.get("overall_pre_acc"),
                            model=obj.get("model"))


def merge_reports(reports: Sequence[RobustnessReport]) -> str:
    """Comparative markdown table, one column group per model, one row
    per perturbation type. All reports must cover the same types."""
    if not reports:
        raise ValueError("no reports to merge")
    type_sets = [tuple(r.type for r in rep.rows) for rep in reports]
    base = set(type_sets[0])
    for i, ts in enumerate(type_sets[1:], start=2):
        if set(ts) != base:
            missing = sorted(base - set(ts))
            extra = sorted(set(ts) - base)
            raise ValueError(
                f"report {i} type set differs: missing={missing} extra={extra}"
            )
    names = [rep.model or f"model{i}" for i, rep in enumerate(reports, start=1)]
    header = "| type |" + "".join(f" {n} pre/post | {n} r_acc |" for n in names)
    rule = "| --- |" + " ---: | ---: |" * len(names)
    lines = [header, rule]
    for type_name in sorted(base, key=_type_order):
        cells = []
        for rep in reports:
            row = next(r for r in rep.rows if r.type == type_name)
            cells.append(f" {_fmt(row.pre_acc)} / {_fmt(row.post_acc)} |"
                         f" {_fmt(row.r_acc)} |")
        lines.append(f"| {type_name} |" + "".join(cells))
    return "\n".join(lines) + "\n"
