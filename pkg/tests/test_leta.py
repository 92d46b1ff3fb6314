import pytest

from tableshake import leta
from tableshake.data import QAExample, Table
from tableshake.leta.parse import (ColumnExtension, ColumnMask, HeaderRename,
                                   Paraphrase, ParseFailure, parse_generation)
from tableshake.leta.pools import (DemonstrationPool, ParaphraseCategory,
                                   PoolError, category_by_name, pool_from_obj)
from tableshake.leta.validate import validate_candidate
from tableshake.llm import FixtureClient, LlmError, ScriptedClient, prompt_hash

from conftest import read_golden


@pytest.fixture(scope="module")
def pool():
    return leta.default_pool()


TARGET_TABLE = Table(
    ["Year", "Score", "Venue"],
    [["1966", "4-2", "Wembley"], ["1970", "4-1", "Azteca"],
     ["1974", "2-1", "Olympiastadion"]],
)
TARGET = QAExample(id="g1", table=TARGET_TABLE,
                   question="How many finals were decided by more than 2 goals?",
                   answers=["2"])
CANDIDATE = Table(
    ["Final", "Attendance", "Referee"],
    [["1966", "96,924", "G. Dienst"], ["1970", "107,412", "R. Glockner"]],
)


class TestPools:
    def test_counts_enforced(self, pool):
        assert len(pool.header_synonym) >= 10
        assert len(pool.col_masking) >= 8
        for name, demos in pool.nlq.items():
            assert 5 <= len(demos) <= 8, name

    def test_too_small_category_rejected(self, pool):
        obj = {
            "header_synonym": [
                {"header": list(d.header), "rows": [list(r) for r in d.rows],
                 "output": list(d.output)}
                for d in pool.header_synonym
            ],
        }
        # reuse valid sections, then break one category
        import json
        from importlib import resources
        full = json.loads(resources.files("tableshake.resources")
                          .joinpath("demo_pools.json").read_text())
        full["nlq"]["General"] = full["nlq"]["General"][:4]
        with pytest.raises(PoolError, match="General"):
            pool_from_obj(full)

    def test_category_levels(self):
        assert category_by_name("Reasoning-carrier").level == "word"
        assert category_by_name("Simplification").level == "sentence"
        with pytest.raises(PoolError):
            ParaphraseCategory("word", "Simplification")


class TestPrompts:
    @pytest.mark.parametrize("type_name", [
        "header_synonym", "header_abbrev", "col_extension", "col_masking",
    ])
    def test_golden(self, pool, type_name):
        prompt = leta.build_prompt(type_name, pool, TARGET, seed=3)
        assert prompt == read_golden(f"prompt_{type_name}.txt")

    def test_col_adding_golden(self, pool):
        prompt = leta.build_prompt("col_adding", pool, TARGET, seed=3,
                                   candidate_table=CANDIDATE)
        assert prompt == read_golden("prompt_col_adding.txt")

    @pytest.mark.parametrize("category", list(leta.ALL_CATEGORIES),
                             ids=lambda c: c.name)
    def test_nlq_goldens(self, pool, category):
        slug = category.name.lower().replace(" ", "_").replace("-", "_")
        prompt = leta.build_prompt(category, pool, TARGET, seed=3)
        assert prompt == read_golden(f"prompt_nlq_{slug}.txt")

    def test_reasoning_carrier_demo_present(self, pool):
        prompt = leta.build_prompt(category_by_name("Reasoning-carrier"),
                                   pool, TARGET, seed=0)
        assert "How many cities are above 1 million in population" in prompt
        assert "What is the quantity of cities" in prompt

    def test_header_target_shows_two_rows_only(self, pool):
        prompt = leta.build_prompt("header_synonym", pool, TARGET, seed=0)
        assert "1966 | 4-2 | Wembley" in prompt
        assert "Olympiastadion" not in prompt  # third row stays out

    def test_col_adding_requires_candidate(self, pool):
        with pytest.raises(leta.PromptError, match="candidate"):
            leta.build_prompt("col_adding", pool, TARGET, seed=0)

    def test_rendering_pure(self, pool):
        a = leta.build_prompt("header_synonym", pool, TARGET, seed=5)
        b = leta.build_prompt("header_synonym", pool, TARGET, seed=5)
        assert a == b


class TestParse:
    def test_header_map(self):
        out = parse_generation("header_synonym", "New header: Year | Final Score",
                               original_header=("Year", "Score"))
        assert isinstance(out, HeaderRename)
        assert out.rename_map == {"Score": "Final Score"}

    def test_wrong_arity(self):
        out = parse_generation("header_synonym", "New header: A | B | C",
                               original_header=("Year", "Score"))
        assert isinstance(out, ParseFailure)
        assert "arity" in out.reason

    def test_empty_completion(self):
        out = parse_generation("header_synonym", "",
                               original_header=("Year",))
        assert isinstance(out, ParseFailure)
        assert "missing delimiter" in out.reason

    def test_empty_payload(self):
        out = parse_generation("col_masking", "Masked column:")
        assert isinstance(out, ParseFailure)
        assert out.reason == "empty payload"

    def test_never_raises_on_garbage(self):
        out = parse_generation("col_extension", "total nonsense ~~ 42")
        assert isinstance(out, ParseFailure)

    def test_extension_parse(self):
        out = parse_generation("col_extension",
                               "Extended column: Score -> Home | Away")
        assert out == ColumnExtension(column="Score", new_names=("Home", "Away"))

    def test_paraphrase_takes_last_anchor(self):
        raw = "Paraphrase: draft one\nsome reasoning\nParaphrase: final version"
        out = parse_generation(category_by_name("General"), raw)
        assert out == Paraphrase(text="final version")


class TestValidate:
    def test_information_missing_header_phrase(self):
        table = Table(["Name", "Stock Code"], [["Acme", "ACM"]])
        original = QAExample(id="v1", table=table,
                             question="What are the names and stock code of"
                                      " companies based in the United States?",
                             answers=["Acme"])
        out = validate_candidate(
            category_by_name("General"), original,
            Paraphrase("Name some companies based in the United States."))
        assert not out.accepted
        assert out.reason == "information missing"

    def test_hallucinated_entity(self):
        table = Table(["Singer", "Song"], [["Vela", "Hey Now"]])
        original = QAExample(id="v2", table=table,
                             question="Which singer has a song with \"Hey\" in"
                                      " its name?",
                             answers=["Vela"])
        out = validate_candidate(
            category_by_name("General"), original,
            Paraphrase("Which singer has the song \"Hey Ya!\" in the list?"))
        assert not out.accepted
        assert out.reason == "hallucination"

    def test_identity_rejected(self):
        out = validate_candidate(category_by_name("General"), TARGET,
                                 Paraphrase(TARGET.question))
        assert not out.accepted and out.reason == "unchanged"

    def test_changed_meaning_number_swap(self):
        # the swapped number must not appear in the table, otherwise the
        # retention check is satisfied by the context
        original = QAExample(
            id="v5", table=Table(["District", "Created"],
                                 [["East", "1904"], ["West", "1911"]]),
            question="How many districts were created after year 1900?",
            answers=["2"])
        out = validate_candidate(
            category_by_name("General"), original,
            Paraphrase("How many districts were created after year 1800?"))
        assert not out.accepted and out.reason == "changed meaning"

    def test_new_number_alone_is_hallucination(self):
        out = validate_candidate(
            category_by_name("General"), TARGET,
            Paraphrase("How many of the 3 finals were decided by more than"
                       " 2 goals?"))
        assert not out.accepted and out.reason == "hallucination"

    def test_prompt_mismatch_carrier_untouched(self):
        out = validate_candidate(
            category_by_name("Reasoning-carrier"), TARGET,
            Paraphrase("How many championship finals were decided by more"
                       " than 2 goals?"))
        assert not out.accepted and out.reason == "prompt mismatch"

    def test_valid_paraphrase_accepted(self):
        out = validate_candidate(
            category_by_name("Reasoning-carrier"), TARGET,
            Paraphrase("What is the quantity of finals decided by more than"
                       " 2 goals?"))
        assert out.accepted
        assert out.post.question.startswith("What is the quantity")
        assert out.post.answers == TARGET.answers

    def test_header_duplicate_rejected(self):
        candidate = HeaderRename(new_header=("Year", "Year", "Venue"),
                                 rename_map={"Score": "Year"})
        out = validate_candidate("header_synonym", TARGET, candidate)
        assert not out.accepted and "duplicate" in out.reason

    def test_mask_answer_lost(self):
        table = Table(["Team", "Points"], [["Harbor", "88"], ["Meadow", "74"]])
        original = QAExample(id="v3", table=table, question="how many points"
                             " did Harbor get?", answers=["88"])
        out = validate_candidate("col_masking", original, ColumnMask("Points"))
        assert not out.accepted and out.reason == "answer lost"

    def test_mask_valid(self):
        table = Table(["Rank", "Team", "Points"],
                      [["1", "Harbor", "88"], ["2", "Meadow", "74"]])
        original = QAExample(id="v4", table=table,
                             question="how many points did Harbor get?",
                             answers=["88"])
        out = validate_candidate("col_masking", original, ColumnMask("Rank"))
        assert out.accepted
        assert out.post.table.header == ("Team", "Points")

    def test_extension_not_splittable(self):
        out = validate_candidate("col_extension", TARGET,
                                 ColumnExtension("Venue", ("A", "B")))
        assert not out.accepted and "not splittable" in out.reason

    def test_extension_applies(self):
        out = validate_candidate("col_extension", TARGET,
                                 ColumnExtension("Score", ("Home", "Away")))
        assert out.accepted
        assert out.post.table.header == ("Year", "Home", "Away", "Venue")
        assert out.post.table.rows[0] == ("1966", "4", "2", "Wembley")


class TestGenerate:
    def test_dedup_same_response(self, pool):
        client = ScriptedClient(["Paraphrase: What is the quantity of finals"
                                 " decided by more than 2 goals?"])
        result = leta.generate(category_by_name("Reasoning-carrier"), TARGET,
                               pool, client, leta.GenerationConfig(rounds=3))
        assert len(result.pairs) == 1
        assert result.log.accepted == 1
        assert result.log.duplicates == 2
        assert result.pairs[0].provenance == "leta"
        assert result.pairs[0].spec.type == "nlq_word"

    def test_three_distinct_responses(self, pool):
        client = ScriptedClient([
            "Paraphrase: What is the quantity of finals decided by more than 2 goals?",
            "Paraphrase: What is the number of finals decided by more than 2 goals?",
            "Paraphrase: What is the count of finals decided by more than 2 goals?",
        ])
        result = leta.generate(category_by_name("Reasoning-carrier"), TARGET,
                               pool, client, leta.GenerationConfig(rounds=3))
        assert len(result.pairs) == 3

    def test_malformed_rounds_recorded(self, pool):
        client = ScriptedClient(["no anchor here"])
        result = leta.generate(category_by_name("General"), TARGET, pool,
                               client, leta.GenerationConfig(rounds=3))
        assert result.pairs == []
        assert len(result.log.parse_errors) == 3

    def test_fixture_client_round_trip(self, pool):
        # fixture keyed by the exact prompt of round 0
        from tableshake.rng import derive_seed
        r0 = leta.build_prompt("header_synonym", pool, TARGET,
                               seed=derive_seed(0, "round", 0))
        client = FixtureClient({prompt_hash(r0):
                                "New header: Season | Score | Venue"})
        result = leta.generate("header_synonym", TARGET, pool, client,
                               leta.GenerationConfig(rounds=1), seed=0)
        assert len(result.pairs) == 1
        assert result.pairs[0].post.table.header == ("Season", "Score", "Venue")

    def test_fixture_client_misses_are_transport_errors(self, pool):
        client = FixtureClient({})
        result = leta.generate("header_synonym", TARGET, pool, client,
                               leta.GenerationConfig(rounds=2), seed=0)
        assert result.pairs == []
        assert len(result.log.transport_errors) == 2

    def test_original_never_mutated(self, pool):
        before = TARGET.replace()
        client = ScriptedClient(["Masked column: Venue"])
        leta.generate("col_masking", TARGET, pool, client,
                      leta.GenerationConfig(rounds=1))
        assert TARGET == before


class TestGoldEcho:
    def test_full_pool_acceptance(self, pool):
        config = leta.GenerationConfig(rounds=1)
        checked = 0
        for type_name in ("header_synonym", "header_abbrev"):
            for i, demo in enumerate(pool.demos_for(type_name)):
                example = QAExample(f"{type_name}{i}",
                                    Table(demo.header, demo.rows),
                                    "placeholder question?", ["__none__"])
                client = leta.GoldEchoClient(pool, type_name)
                result = leta.generate(type_name, example, pool, client, config)
                assert result.pairs, (type_name, i, result.log)
                checked += 1
        for i, demo in enumerate(pool.col_extension):
            example = QAExample(f"ext{i}", demo.table, "q?", ["__none__"])
            client = leta.GoldEchoClient(pool, "col_extension")
            assert leta.generate("col_extension", example, pool, client,
                                 config).pairs, i
            checked += 1
        for i, demo in enumerate(pool.col_masking):
            example = QAExample(f"mask{i}", demo.table, "q?", ["__none__"])
            client = leta.GoldEchoClient(pool, "col_masking")
            assert leta.generate("col_masking", example, pool, client,
                                 config).pairs, i
            checked += 1
        for i, demo in enumerate(pool.col_adding):
            example = QAExample(f"add{i}", demo.table, "q?", ["__none__"])
            client = leta.GoldEchoClient(pool, "col_adding")
            assert leta.generate("col_adding", example, pool, client, config,
                                 candidate_table=demo.candidate).pairs, i
            checked += 1
        dummy = Table(["Topic"], [["context"]])
        for category in leta.ALL_CATEGORIES:
            for i, demo in enumerate(pool.nlq[category.name]):
                example = QAExample(f"{category.name}{i}", dummy,
                                    demo.question, ["__none__"])
                client = leta.GoldEchoClient(pool, category)
                assert leta.generate(category, example, pool, client,
                                     config).pairs, (category.name, i)
                checked += 1
        assert checked == 84
