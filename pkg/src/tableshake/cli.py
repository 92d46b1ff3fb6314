"""Command-line entry point.

Subcommands: perturb, generate, evaluate, serve, report. Every run
writes a manifest next to its output recording the resolved config,
seeds, per-type counts, and skip/rejection tallies; deterministic
commands reproduce their outputs byte-identically from the same
manifest config. Exit codes: 0 success, 2 validation error, 3
resource/transport error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources as importlib_resources
from typing import Any

from . import adapters, engine, leta, llm, metrics, rta
from .data import (Dataset, PerturbationSpec, PERTURBATION_TYPES, PerturbedPair,
                   SchemaError, Table, TYPE_LEVELS, load_dataset,
                   save_dataset, table_from_obj)
from .retrieval import index_corpus, retrieve

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        self.exit_code = exit_code
        super().__init__(message)


def _resource_text(name: str) -> str:
    return (importlib_resources.files("tableshake.resources")
            .joinpath(name).read_text(encoding="utf-8"))


def parse_params(raw: str | None) -> dict[str, Any]:
    """Parse "k=v,k2=v2"; comma-separated values without '=' extend the
    previous key, so constituents=header_synonym,nlq_word works."""
    params: dict[str, Any] = {}
    if not raw:
        return params
    key = None
    for segment in raw.split(","):
        if "=" in segment:
            key, value = segment.split("=", 1)
            key = key.strip()
            params[key] = value.strip()
        elif key is not None:
            prev = params[key]
            params[key] = (prev if isinstance(prev, list) else [prev]) + [segment.strip()]
        else:
            raise CliError(f"cannot parse params segment {segment!r}", EXIT_VALIDATION)
    return params


def load_corpus(path: str) -> list[Table]:
    """Corpus file of example records or bare table records."""
    tables = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                if "table" in obj:
                    tables.append(table_from_obj(obj["table"], line=lineno))
                else:
                    tables.append(table_from_obj(obj, line=lineno))
    except OSError as err:
        raise CliError(f"cannot read corpus: {err}", EXIT_RESOURCE) from err
    except (json.JSONDecodeError, SchemaError) as err:
        raise CliError(f"bad corpus record: {err}", EXIT_VALIDATION) from err
    if not tables:
        raise CliError("corpus is empty", EXIT_VALIDATION)
    return tables


def _write_manifest(path: str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, ensure_ascii=False, indent=2, sort_keys=True)
        handle.write("\n")


def _load_examples(path: str) -> Dataset:
    try:
        return load_dataset(path, kind="examples")
    except OSError as err:
        raise CliError(f"cannot read input: {err}", EXIT_RESOURCE) from err
    except SchemaError as err:
        raise CliError(f"bad input: {err}", EXIT_VALIDATION) from err


def _load_pairs(path: str) -> Dataset:
    try:
        return load_dataset(path, kind="pairs")
    except OSError as err:
        raise CliError(f"cannot read pairs: {err}", EXIT_RESOURCE) from err
    except SchemaError as err:
        raise CliError(f"bad pairs: {err}", EXIT_VALIDATION) from err


def _build_context(args, need_retriever: bool) -> engine.OperatorContext:
    ctx = engine.OperatorContext(
        synonyms=rta.load_lexicon(args.synonyms) if getattr(args, "synonyms", None)
        else rta.parse_lexicon(_resource_text("header_synonyms.tsv"), "builtin"),
        abbreviations=rta.load_abbreviations(args.abbreviations)
        if getattr(args, "abbreviations", None)
        else rta.parse_abbreviations(_resource_text("abbreviations.tsv"), "builtin"),
        nlq_word_lexicon=rta.parse_lexicon(_resource_text("nlq_word.tsv"), "builtin"),
        nlq_sentence_lexicon=rta.parse_lexicon(_resource_text("nlq_sentence.tsv"),
                                               "builtin"),
    )
    if need_retriever:
        if not getattr(args, "corpus", None):
            raise CliError("col_adding needs --corpus", EXIT_VALIDATION)
        ctx.retriever = index_corpus(load_corpus(args.corpus))
    return ctx


def _perturbation_spec(type_name: str, seed: int, params: dict) -> PerturbationSpec:
    if type_name not in PERTURBATION_TYPES:
        raise CliError(
            f"unknown type {type_name!r}; choose from {', '.join(PERTURBATION_TYPES)}",
            EXIT_VALIDATION,
        )
    if type_name == "mix":
        raw = params.pop("constituents", None)
        if not raw:
            raise CliError("mix needs --params constituents=<type>,<type>[,<type>]",
                           EXIT_VALIDATION)
        names = raw if isinstance(raw, list) else [raw]
        constituents = []
        for name in names:
            if name not in TYPE_LEVELS or name == "mix":
                raise CliError(f"bad mix constituent {name!r}", EXIT_VALIDATION)
            constituents.append({"level": TYPE_LEVELS[name], "type": name, "params": {}})
        params["constituents"] = constituents
    try:
        return PerturbationSpec(level=TYPE_LEVELS[type_name], type=type_name,
                                seed=seed, params=params)
    except SchemaError as err:
        raise CliError(f"bad spec: {err}", EXIT_VALIDATION) from err


def cmd_perturb(args) -> int:
    started = time.time()
    dataset = _load_examples(args.input)
    params = parse_params(args.params)
    spec = _perturbation_spec(args.type, args.seed, params)
    needs_corpus = args.type == "col_adding" or (
        args.type == "mix"
        and any(c["type"] == "col_adding" for c in spec.params["constituents"])
    )
    ctx = _build_context(args, needs_corpus)
    try:
        pairs, summary = engine.perturb_dataset(dataset, spec, ctx)
    except engine.MissingResource as err:
        raise CliError(str(err), EXIT_RESOURCE) from err
    save_dataset(Dataset(args.out, pairs), args.out)
    manifest = {
        "command": "perturb",
        "config": {"input": args.input, "type": args.type, "seed": args.seed,
                   "params": parse_params(args.params), "corpus": args.corpus,
                   "out": args.out},
        "counts": {args.type: summary.produced},
        "skips": summary.skips,
        "wall_time_s": round(time.time() - started, 3),
    }
    _write_manifest(args.out + ".manifest.json", manifest)
    print(f"{args.type}: {summary.produced} pairs"
          f" ({len(dataset) - summary.produced} skipped)")
    for reason, count in sorted(summary.skips.items()):
        print(f"  skip [{reason}]: {count}")
    return EXIT_OK


def _generation_targets(args) -> list:
    if args.category:
        try:
            return [leta.pools.category_by_name(args.category)]
        except leta.PoolError as err:
            raise CliError(str(err), EXIT_VALIDATION) from err
    if args.type in leta.LETA_TYPES:
        return [args.type]
    if args.type == "nlq_word":
        return list(leta.WORD_CATEGORIES)
    if args.type == "nlq_sentence":
        return list(leta.SENTENCE_CATEGORIES)
    raise CliError(
        f"type {args.type!r} is not generated by prompting; use"
        " 'tableshake perturb' for shuffles", EXIT_VALIDATION,
    )


def cmd_generate(args) -> int:
    started = time.time()
    dataset = _load_examples(args.input)
    if not args.type and not args.category:
        raise CliError("need --type or --category", EXIT_VALIDATION)
    targets = _generation_targets(args)

    if args.fixtures:
        client: llm.LlmClient = llm.FixtureClient.from_file(args.fixtures)
    elif args.live:
        if not os.environ.get(llm.API_KEY_VAR):
            raise CliError(f"live mode requires {llm.API_KEY_VAR}", EXIT_RESOURCE)
        client = llm.HttpClient()
        if args.record:
            client = llm.RecordingClient(client, args.record)
    else:
        raise CliError("need --fixtures <file> or --live", EXIT_VALIDATION)

    pool = leta.load_pool(args.pool) if args.pool else leta.default_pool()
    config = leta.GenerationConfig(rounds=args.rounds)

    retriever = None
    needs_candidates = any(t == "col_adding" for t in targets)
    if needs_candidates:
        if not args.corpus:
            raise CliError("col_adding needs --corpus", EXIT_VALIDATION)
        retriever = index_corpus(load_corpus(args.corpus))

    all_pairs = []
    log = leta.GenerationLog()
    for example in dataset:
        for target in targets:
            candidate_table = None
            if target == "col_adding":
                ranked = retrieve(retriever, example.table, k=1)
                if not ranked:
                    continue
                candidate_table = ranked[0][0]
            result = leta.generate(target, example, pool, client, config,
                                   seed=args.seed, candidate_table=candidate_table)
            # one pair per example+target keeps ids unique in the output
            if result.pairs:
                pair = result.pairs[0]
                suffix = target.name if hasattr(target, "name") else str(target)
                all_pairs.append(_reid_pair(pair, f"{pair.id}:{suffix}"))
            log.merge(result.log)

    save_dataset(Dataset(args.out, all_pairs), args.out)
    manifest = {
        "command": "generate",
        "config": {"input": args.input, "type": args.type, "category": args.category,
                   "rounds": args.rounds, "seed": args.seed, "out": args.out,
                   "fixtures": args.fixtures, "live": bool(args.live)},
        "accepted": log.accepted,
        "duplicates": log.duplicates,
        "rejections": log.rejections,
        "parse_errors": len(log.parse_errors),
        "transport_errors": len(log.transport_errors),
        "wall_time_s": round(time.time() - started, 3),
    }
    _write_manifest(args.out + ".manifest.json", manifest)
    print(f"accepted {log.accepted} candidates -> {len(all_pairs)} pairs"
          f" ({len(log.parse_errors)} parse errors,"
          f" {sum(log.rejections.values())} rejections)")
    return EXIT_OK


def _reid_pair(pair, new_id):
    return PerturbedPair(
        id=new_id, spec=pair.spec,
        pre=pair.pre.replace(id=new_id), post=pair.post.replace(id=new_id),
        provenance=pair.provenance,
    )


def cmd_evaluate(args) -> int:
    started = time.time()
    dataset = _load_pairs(args.pairs)
    pairs = list(dataset.examples)

    sources = [bool(args.predictions), bool(args.endpoint), bool(args.mock)]
    if sum(sources) != 1:
        raise CliError("need exactly one of --predictions/--endpoint/--mock",
                       EXIT_VALIDATION)
    if args.predictions:
        try:
            with open(args.predictions, "rb") as handle:
                predictions = adapters.load_predictions(handle.read().decode("utf-8"))
        except OSError as err:
            raise CliError(f"cannot read predictions: {err}", EXIT_RESOURCE) from err
        except adapters.AdapterError as err:
            raise CliError(str(err), EXIT_VALIDATION) from err
    else:
        ref = args.endpoint if args.endpoint else args.mock
        try:
            adapter = adapters.resolve_adapter(ref, dataset)
            predictions = adapters.predictions_for_pairs(pairs, adapter)
        except adapters.AdapterError as err:
            raise CliError(str(err), EXIT_RESOURCE) from err

    by_type: dict[str, list] = {}
    for pair in pairs:
        by_type.setdefault(pair.spec.type, []).append(pair)
    try:
        report = metrics.build_report(by_type, predictions, model=args.model,
                                      allow_missing=args.allow_missing)
    except ValueError as err:
        raise CliError(str(err), EXIT_VALIDATION) from err

    rendered = metrics.render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(rendered)
    else:
        print(rendered, end="")
    if args.out_report:
        with open(args.out_report, "w", encoding="utf-8") as handle:
            json.dump(metrics.report_to_obj(report), handle, ensure_ascii=False,
                      indent=2, sort_keys=True)
            handle.write("\n")
        _write_manifest(args.out_report + ".manifest.json", {
            "command": "evaluate",
            "config": {"pairs": args.pairs, "predictions": args.predictions,
                       "endpoint": args.endpoint, "mock": args.mock,
                       "format": args.format, "model": args.model,
                       "allow_missing": args.allow_missing},
            "rows": len(report.rows),
            "wall_time_s": round(time.time() - started, 3),
        })
    return EXIT_OK


def cmd_serve(args) -> int:
    from . import service

    try:
        server = service.make_server(args.host, args.port, store_dir=args.store_dir)
    except OSError as err:
        raise CliError(f"cannot bind {args.host}:{args.port}: {err}",
                       EXIT_RESOURCE) from err
    if args.dataset and args.adapter:
        session_id = server.service.create_session(  # type: ignore[attr-defined]
            args.dataset, args.adapter, args.level,
        )
        print(f"session {session_id}", flush=True)
    bound_port = server.server_address[1]
    print(f"annotation service on http://{args.host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_report(args) -> int:
    reports = []
    for path in args.reports:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                reports.append(metrics.report_from_obj(json.load(handle)))
        except OSError as err:
            raise CliError(f"cannot read report: {err}", EXIT_RESOURCE) from err
        except (json.JSONDecodeError, KeyError) as err:
            raise CliError(f"bad report {path}: {err!r}", EXIT_VALIDATION) from err
    try:
        merged = metrics.merge_reports(reports)
    except ValueError as err:
        raise CliError(str(err), EXIT_VALIDATION) from err
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(merged)
    else:
        print(merged, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tableshake",
        description="Adversarial perturbation and robustness evaluation for Table QA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perturb", help="apply one perturbation type to a dataset")
    p.add_argument("--input", required=True, help="example JSONL")
    p.add_argument("--type", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", default=None, help="k=v[,k=v...]")
    p.add_argument("--corpus", default=None, help="candidate tables for col_adding")
    p.add_argument("--synonyms", default=None, help="custom synonym lexicon")
    p.add_argument("--abbreviations", default=None, help="custom abbreviation map")
    p.add_argument("--out", required=True, help="pair JSONL to write")
    p.set_defaults(func=cmd_perturb)

    g = sub.add_parser("generate", help="LLM-prompted adversarial generation")
    g.add_argument("--input", required=True)
    g.add_argument("--type", default=None)
    g.add_argument("--category", default=None, help="paraphrase category name")
    g.add_argument("--rounds", type=int, default=leta.GenerationConfig().rounds)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--pool", default=None, help="demonstration pool JSON")
    g.add_argument("--corpus", default=None)
    g.add_argument("--fixtures", default=None, help="canned completion JSONL")
    g.add_argument("--live", action="store_true", help="use the live LLM endpoint")
    g.add_argument("--record", default=None, help="record live completions here")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("evaluate", help="score a pair file and report robustness")
    e.add_argument("--pairs", required=True)
    e.add_argument("--predictions", default=None, help="prediction JSONL")
    e.add_argument("--endpoint", default=None, help="model HTTP endpoint")
    e.add_argument("--mock", default=None, help="gold | first_row | keyword:<phrase>")
    e.add_argument("--model", default=None, help="model name for the report")
    e.add_argument("--format", choices=("markdown", "csv"), default="markdown")
    e.add_argument("--out", default=None, help="rendered report path")
    e.add_argument("--out-report", default=None, help="structured report JSON path")
    e.add_argument("--allow-missing", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("serve", help="run the annotation service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8008)
    s.add_argument("--dataset", default=None)
    s.add_argument("--adapter", default=None)
    s.add_argument("--level", default="word", choices=("word", "sentence"))
    s.add_argument("--store-dir", default=None)
    s.set_defaults(func=cmd_serve)

    r = sub.add_parser("report", help="merge structured reports into one table")
    r.add_argument("--reports", nargs="+", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except (rta.LexiconError, SchemaError, leta.PoolError, leta.PromptError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (llm.LlmError, adapters.AdapterError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
