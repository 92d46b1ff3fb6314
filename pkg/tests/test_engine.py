import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from tableshake.data import PerturbationSpec, SchemaError, Table
from tableshake.engine import (MIX_SEED_OFFSETS, OperatorContext,
                               PerturbationError, apply_perturbation,
                               compose_mix, is_position_dependent,
                               perturb_dataset, shuffle_columns, shuffle_rows)
from tableshake.rta import parse_lexicon
from tableshake.rng import SplitMix64, fisher_yates

from conftest import random_example, random_table


def make_ctx() -> OperatorContext:
    return OperatorContext(
        synonyms=parse_lexicon("runner-up\tsecond place\nchampion\twinner\n"),
        nlq_word_lexicon=parse_lexicon("how many\twhat is the quantity of\n"),
        nlq_sentence_lexicon=parse_lexicon("when was\tplease provide the date when\n"),
    )


class TestShuffles:
    def test_single_row_identity(self, small_table):
        one = Table(small_table.header, small_table.rows[:1])
        for seed in (0, 7, 99):
            assert shuffle_rows(one, seed) == one

    def test_row_shuffle_golden_seed7(self):
        table = Table(["C"], [["r1"], ["r2"], ["r3"]])
        # permutation of fisher_yates(3, seed=7) is [1, 2, 0]
        shuffled = shuffle_rows(table, 7)
        assert [r[0] for r in shuffled.rows] == ["r2", "r3", "r1"]

    def test_row_multiset_preserved_1000_tables(self):
        rng = random.Random(1)
        for i in range(1000):
            table = random_table(rng)
            shuffled = shuffle_rows(table, i)
            assert Counter(shuffled.rows) == Counter(table.rows)
            assert shuffled.header == table.header

    def test_single_column_identity(self):
        table = Table(["A"], [["1"], ["2"]])
        assert shuffle_columns(table, 123) == table

    def test_two_column_swap(self):
        table = Table(["A", "B"], [["1", "2"]])
        swapped = Table(["B", "A"], [["2", "1"]])
        results = {shuffle_columns(table, seed) for seed in range(8)}
        assert results <= {table, swapped}
        assert swapped in results

    def test_uniform_permutation_property(self):
        rng = random.Random(2)
        for i in range(300):
            table = random_table(rng, max_cols=5, max_rows=4)
            shuffled = shuffle_columns(table, i)
            perm = fisher_yates(table.width, SplitMix64(i))
            for j in range(table.width):
                assert shuffled.header[j] == table.header[perm[j]]
                for r in range(len(table.rows)):
                    assert shuffled.rows[r][j] == table.rows[r][perm[j]]


class TestPositionalFilter:
    @pytest.mark.parametrize("question,expected", [
        ("what is the last region listed on the table?", True),
        ("who had more points, Takaji Mori or Junji Kwano?", False),
        ("which row comes first?", True),
        ("what is in the first row?", True),
        ("which city is above 1 million in population?", True),  # recall-oriented
        ("who was champion in 2002?", False),
        ("what is the top of the standings?", True),
        ("which team is last on the list?", True),
        ("how many wins did the last-place team have?", False),
    ])
    def test_lexicon(self, question, expected):
        assert is_position_dependent(question) is expected

    def test_order_word_near_anchor(self):
        # "first" within 3 tokens of "table"
        assert is_position_dependent("what appears first in this table?")
        assert not is_position_dependent("who won the first championship game in history?")


class TestApplyPerturbation:
    def test_row_shuffle_skips_positional(self, small_example):
        example = small_example.replace(question="which team is listed first?")
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=1)
        outcome = apply_perturbation(example, spec, make_ctx())
        assert outcome.skipped
        assert outcome.skip_reason == "position-dependent question"

    def test_col_shuffle_contract(self, small_example):
        spec = PerturbationSpec(level="content", type="col_shuffle", seed=5)
        outcome = apply_perturbation(small_example, spec, make_ctx())
        assert not outcome.skipped
        pair = outcome.pair
        assert Counter(pair.post.table.header) == Counter(pair.pre.table.header)
        assert pair.post.answers == pair.pre.answers
        assert pair.provenance == "heuristic"

    def test_header_synonym_renames(self, small_example):
        spec = PerturbationSpec(level="header", type="header_synonym", seed=0,
                                params={"rate": 1.0})
        outcome = apply_perturbation(small_example, spec, make_ctx())
        assert not outcome.skipped
        assert "Second place" in outcome.pair.post.table.header
        assert outcome.pair.post.table.rows == small_example.table.rows
        assert outcome.pair.provenance == "rta"

    def test_missing_resource(self, small_example):
        spec = PerturbationSpec(level="content", type="col_adding", seed=0)
        with pytest.raises(PerturbationError, match="col_adding"):
            apply_perturbation(small_example, spec, OperatorContext())

    def test_determinism(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=9)
        ctx = make_ctx()
        first = apply_perturbation(small_example, spec, ctx)
        second = apply_perturbation(small_example, spec, ctx)
        assert first.pair == second.pair

    def test_no_op_substitution_skips(self, small_example):
        example = small_example.replace(
            table=Table(["Alpha", "Beta"], [["1", "2"]]))
        spec = PerturbationSpec(level="header", type="header_synonym", seed=0)
        outcome = apply_perturbation(example, spec, make_ctx())
        assert outcome.skipped

    def test_nlq_sentence_rewrite(self, small_example):
        example = small_example.replace(question="when was the final played?")
        spec = PerturbationSpec(level="nlq", type="nlq_sentence", seed=0)
        outcome = apply_perturbation(example, spec, make_ctx())
        assert not outcome.skipped
        assert outcome.pair.post.question.startswith("please provide the date when")
        assert outcome.pair.post.table == example.table


class TestComposeMix:
    def test_header_plus_nlq(self, small_example):
        example = small_example.replace(question="how many champions are shown?")
        specs = [
            PerturbationSpec(level="header", type="header_synonym", seed=0,
                             params={"rate": 1.0}),
            PerturbationSpec(level="nlq", type="nlq_word", seed=0),
        ]
        outcome = compose_mix(example, specs, seed=4, ctx=make_ctx())
        assert not outcome.skipped
        pair = outcome.pair
        assert pair.spec.level == "mix"
        assert pair.post.question.startswith("what is the quantity of")
        assert "Winner" in pair.post.table.header
        assert pair.post.answers == example.answers
        recorded = pair.spec.params["constituents"]
        assert [c["type"] for c in recorded] == ["header_synonym", "nlq_word"]
        assert recorded[0]["seed"] == 4 + MIX_SEED_OFFSETS["header"]

    def test_duplicate_level_rejected(self, small_example):
        specs = [
            PerturbationSpec(level="content", type="row_shuffle", seed=0),
            PerturbationSpec(level="content", type="col_shuffle", seed=0),
        ]
        with pytest.raises(PerturbationError, match="duplicate level: content"):
            compose_mix(small_example, specs, seed=1, ctx=make_ctx())

    def test_constituent_count(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=0)
        with pytest.raises(PerturbationError, match="2-3"):
            compose_mix(small_example, [spec], seed=1, ctx=make_ctx())

    def test_mix_via_apply(self, small_example):
        example = small_example.replace(question="how many champions are shown?")
        spec = PerturbationSpec(level="mix", type="mix", seed=2, params={
            "constituents": [
                {"level": "header", "type": "header_synonym", "params": {"rate": 1.0}},
                {"level": "content", "type": "row_shuffle", "params": {}},
            ],
        })
        outcome = apply_perturbation(example, spec, make_ctx())
        assert not outcome.skipped
        assert outcome.pair.spec.type == "mix"

    def test_skip_propagates(self, small_example):
        example = small_example.replace(question="which one is listed first?")
        specs = [
            PerturbationSpec(level="header", type="header_synonym", seed=0,
                             params={"rate": 1.0}),
            PerturbationSpec(level="content", type="row_shuffle", seed=0),
        ]
        outcome = compose_mix(example, specs, seed=1, ctx=make_ctx())
        assert outcome.skipped
        assert "position-dependent" in outcome.skip_reason


def _apply_direct(example, type_name, seed, ctx):
    level = {"header_synonym": "header", "row_shuffle": "content",
             "nlq_word": "nlq"}[type_name]
    params = {"rate": 1.0} if type_name == "header_synonym" else {}
    spec = PerturbationSpec(level=level, type=type_name, seed=seed, params=params)
    outcome = apply_perturbation(example, spec, ctx)
    return example if outcome.skipped else outcome.pair.post


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_commutation_header_rename_row_shuffle(case_seed):
    rng = random.Random(case_seed)
    example = random_example(rng, case_seed, max_cols=4, max_rows=5)
    # force a renameable header so the rename is not a no-op
    table = example.table
    example = example.replace(table=Table(
        ("Champion",) + table.header[1:],
        [("c" + row[0],) + row[1:] for row in table.rows],
    ))
    ctx = make_ctx()
    a = _apply_direct(_apply_direct(example, "header_synonym", 3, ctx),
                      "row_shuffle", 5, ctx)
    b = _apply_direct(_apply_direct(example, "row_shuffle", 5, ctx),
                      "header_synonym", 3, ctx)
    assert a == b


def test_perturb_dataset_summary(small_example):
    positional = small_example.replace(id="x2",
                                       question="which is listed first?")
    spec = PerturbationSpec(level="content", type="row_shuffle", seed=1)
    pairs, summary = perturb_dataset([small_example, positional], spec, make_ctx())
    assert summary.produced == 1
    assert summary.skips == {"position-dependent question": 1}
    assert [p.id for p in pairs] == ["x1"]
