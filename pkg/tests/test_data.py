import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from tableshake.data import (Dataset, PerturbationSpec, PerturbedPair,
                             QAExample, SchemaError, Table, parse_dataset,
                             serialize_dataset, validate_table)

from conftest import random_example


MINIMAL = '{"id":"x1","table":{"header":["A"],"rows":[["1"]]},"question":"q?","answers":["1"]}'


class TestValidateTable:
    def test_valid(self):
        table = Table(["Year", "Champion"], [["2001", "Alice"], ["2002", "Bob"]])
        assert validate_table(table) == []

    def test_empty_header_name(self):
        assert validate_table(Table([""], [])) == ["empty header name at 0"]

    def test_empty_header(self):
        assert validate_table(Table([], [])) == ["empty header"]

    def test_row_width_mismatch(self):
        table = Table(["A"], [["1", "2"]])
        violations = validate_table(table)
        assert len(violations) == 1
        assert "length" in violations[0]


class TestParseDataset:
    def test_minimal_record(self):
        dataset = parse_dataset(MINIMAL)
        assert len(dataset) == 1
        example = dataset.examples[0]
        assert example.id == "x1"
        assert example.table.header == ("A",)
        assert example.answers == ("1",)

    def test_row_header_mismatch_reports_path(self):
        line = MINIMAL.replace('[["1"]]', '[["1","2"]]')
        with pytest.raises(SchemaError) as err:
            parse_dataset(line)
        assert "row" in str(err.value) and "header" in str(err.value)
        assert err.value.line == 1

    def test_malformed_json_reports_line(self):
        with pytest.raises(SchemaError) as err:
            parse_dataset(MINIMAL + "\n{oops\n")
        assert err.value.line == 2

    def test_duplicate_id(self):
        with pytest.raises(SchemaError, match="duplicate id"):
            parse_dataset(MINIMAL + "\n" + MINIMAL)

    def test_missing_field(self):
        record = json.loads(MINIMAL)
        del record["question"]
        with pytest.raises(SchemaError, match="question"):
            parse_dataset(json.dumps(record))

    def test_sequence_fields_must_pair(self):
        record = json.loads(MINIMAL)
        record["sequence_id"] = "s1"
        with pytest.raises(SchemaError, match="sequence"):
            parse_dataset(json.dumps(record))

    def test_wtq_dev_sized_file(self):
        # 2,831 records, the size of the WTQ development split
        rng = random.Random(5)
        lines = []
        for i in range(2831):
            example = random_example(rng, i)
            lines.append(json.dumps({
                "id": example.id, "question": example.question,
                "answers": list(example.answers),
                "table": {"header": list(example.table.header),
                          "rows": [list(r) for r in example.table.rows]},
            }))
        dataset = parse_dataset("\n".join(lines))
        assert len(dataset) == 2831

    def test_empty_stream(self):
        assert len(parse_dataset("")) == 0


class TestSerializeDataset:
    def test_empty(self):
        assert serialize_dataset(Dataset("d", [])) == b""

    def test_round_trip_fixture(self, small_example):
        dataset = Dataset("d", [small_example])
        again = parse_dataset(serialize_dataset(dataset))
        assert again.examples == dataset.examples

    def test_serialize_twice_identical(self, small_example):
        dataset = Dataset("d", [small_example])
        assert serialize_dataset(dataset) == serialize_dataset(dataset)

    def test_pair_round_trip(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=3,
                                params={"b": 1, "a": 2})
        pair = PerturbedPair(id="x1", spec=spec, pre=small_example,
                             post=small_example, provenance="heuristic")
        dataset = Dataset("p", [pair])
        again = parse_dataset(serialize_dataset(dataset), kind="pairs")
        assert again.examples[0].spec.type == "row_shuffle"
        assert again.examples[0].pre == small_example
        # params key order is canonicalized, so bytes are stable
        assert serialize_dataset(again) == serialize_dataset(dataset)


# table strategy for the round-trip property
_cell = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    max_size=8,
)
_name = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd")),
    min_size=1, max_size=8,
)


@st.composite
def examples_strategy(draw):
    width = draw(st.integers(1, 4))
    header = [draw(_name) + str(i) for i in range(width)]
    n_rows = draw(st.integers(0, 4))
    rows = [[draw(_cell) for _ in range(width)] for _ in range(n_rows)]
    question = draw(_cell)
    answers = draw(st.lists(_cell, min_size=1, max_size=3))
    seq = draw(st.booleans())
    return QAExample(
        id=draw(_name), table=Table(header, rows), question=question,
        answers=answers,
        sequence_id="s" if seq else None,
        position_in_sequence=draw(st.integers(0, 5)) if seq else None,
    )


@settings(max_examples=150, deadline=None)
@given(st.lists(examples_strategy(), max_size=6))
def test_round_trip_property(examples):
    seen = set()
    unique = []
    for i, example in enumerate(examples):
        if example.id in seen:
            example = example.replace(id=f"{example.id}#{i}")
        seen.add(example.id)
        unique.append(example)
    dataset = Dataset("prop", unique)
    data = serialize_dataset(dataset)
    again = parse_dataset(data)
    assert tuple(again.examples) == tuple(unique)
    assert serialize_dataset(again) == data


class TestSpecInvariants:
    def test_level_type_consistency(self):
        with pytest.raises(SchemaError, match="level"):
            PerturbationSpec(level="header", type="row_shuffle", seed=0)

    def test_mix_requires_constituents(self):
        with pytest.raises(SchemaError, match="constituent"):
            PerturbationSpec(level="mix", type="mix", seed=0, params={})

    def test_mix_distinct_levels(self):
        constituents = [{"level": "content", "type": "row_shuffle"},
                        {"level": "content", "type": "col_shuffle"}]
        with pytest.raises(SchemaError, match="distinct"):
            PerturbationSpec(level="mix", type="mix", seed=0,
                             params={"constituents": constituents})

    def test_pair_id_integrity(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=0)
        other = small_example.replace(id="different")
        with pytest.raises(SchemaError, match="id"):
            PerturbedPair(id="x1", spec=spec, pre=small_example, post=other,
                          provenance="rta")

    def test_shuffle_pair_preserves_answers(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=0)
        post = small_example.replace(answers=("other",))
        with pytest.raises(SchemaError, match="answers"):
            PerturbedPair(id="x1", spec=spec, pre=small_example, post=post,
                          provenance="heuristic")

    def test_dataset_rejects_mixed_kinds(self, small_example):
        spec = PerturbationSpec(level="content", type="row_shuffle", seed=0)
        pair = PerturbedPair(id="p", spec=spec,
                             pre=small_example.replace(id="p"),
                             post=small_example.replace(id="p"),
                             provenance="rta")
        with pytest.raises(SchemaError, match="homogeneous"):
            Dataset("d", [small_example, pair])
