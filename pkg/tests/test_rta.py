import random

import pytest

from tableshake.data import Table
from tableshake.rta import (AbbreviationRuleSet, LexiconError,
                            detect_inferable_columns, mask_column,
                            parse_abbreviations, parse_lexicon,
                            rta_column_extension, rta_header_abbreviation,
                            rta_header_synonym, rta_nlq_synonym_attack)

from conftest import random_table


class TestLexicon:
    def test_parse(self):
        lex = parse_lexicon("# comment\nrunner-up\tsecond place|silver\n")
        assert lex.get("Runner-Up") == ("second place", "silver")

    def test_self_map_rejected(self):
        with pytest.raises(LexiconError, match="itself"):
            parse_lexicon("points\tPoints\n")

    def test_missing_tab(self):
        with pytest.raises(LexiconError, match="TAB"):
            parse_lexicon("points second place\n")


class TestHeaderSynonym:
    def test_paper_rename(self):
        table = Table(["runner-up"], [["Bob"]])
        lex = parse_lexicon("runner-up\tsecond place\n")
        for seed in range(50):
            renamed, mapping = rta_header_synonym(table, lex, seed, rate=1.0)
            assert renamed.header == ("second place",)
            assert mapping == {"runner-up": "second place"}

    def test_empty_lexicon_identity(self, small_table):
        lex = parse_lexicon("")
        renamed, mapping = rta_header_synonym(small_table, lex, 3)
        assert renamed == small_table
        assert mapping == {}

    def test_rows_untouched_500_tables(self):
        rng = random.Random(3)
        lex = parse_lexicon("year\tseason\nchampion\twinner\nscore\tresult\n")
        for i in range(500):
            table = random_table(rng)
            renamed, _ = rta_header_synonym(table, lex, i)
            assert renamed.rows == table.rows

    def test_rate_half_is_seeded(self):
        table = Table(["champion"], [["a"]])
        lex = parse_lexicon("champion\twinner\n")
        outcomes = {rta_header_synonym(table, lex, seed)[0].header[0]
                    for seed in range(40)}
        assert outcomes == {"champion", "winner"}


class TestAbbreviation:
    def test_initialism(self):
        rules = AbbreviationRuleSet()
        table = Table(["Grand Prix"], [["Monza"]])
        abbreviated, mapping = rta_header_abbreviation(table, rules, 0)
        assert abbreviated.header == ("GP",)
        assert mapping == {"Grand Prix": "GP"}

    def test_vowel_drop(self):
        table = Table(["Points"], [["11"]])
        abbreviated, _ = rta_header_abbreviation(table, AbbreviationRuleSet(), 0)
        assert abbreviated.header == ("Pnts",)

    def test_short_header_unchanged(self):
        table = Table(["Age"], [["9"]])
        abbreviated, mapping = rta_header_abbreviation(table, AbbreviationRuleSet(), 0)
        assert abbreviated.header == ("Age",)
        assert mapping == {}

    def test_exact_map_wins(self):
        rules = parse_abbreviations("attendance\tAtt.\n")
        table = Table(["Attendance"], [["18,450"]])
        abbreviated, _ = rta_header_abbreviation(table, rules, 0)
        assert abbreviated.header == ("Att.",)

    def test_outputs_strictly_shorter(self):
        rng = random.Random(9)
        rules = AbbreviationRuleSet()
        for i in range(300):
            table = random_table(rng)
            abbreviated, mapping = rta_header_abbreviation(table, rules, i)
            for old, new in mapping.items():
                assert len(new) < len(old)
                assert new

    def test_exact_map_must_shorten(self):
        with pytest.raises(LexiconError, match="shorter"):
            parse_abbreviations("age\tancient\n")


class TestColumnExtension:
    def test_score_split(self):
        table = Table(["Score"], [["3–2"], ["1–1"]])
        report = rta_column_extension(table)
        assert report.changed
        assert report.table.header == ("Score (1)", "Score (2)")
        assert report.table.rows == (("3", "2"), ("1", "1"))

    def test_inconsistent_column_not_split(self):
        table = Table(["Score"], [["3–2"], ["draw"]])
        report = rta_column_extension(table)
        assert not report.changed
        assert "Score" in report.rejections

    def test_compound_name_splits_names(self):
        table = Table(["Born-Died"], [["1912-1989"]])
        report = rta_column_extension(table)
        assert report.table.header == ("Born", "Died")

    def test_inverse_property(self):
        rng = random.Random(4)
        for _ in range(200):
            n_rows = rng.randint(1, 5)
            cells = [f"{rng.randint(0, 9)}/{rng.randint(0, 9)}" for _ in range(n_rows)]
            table = Table(["Pair", "Other"],
                          [[cells[r], f"o{r}"] for r in range(n_rows)])
            report = rta_column_extension(table)
            assert report.split_columns == ("Pair",)
            rebuilt = [f"{row[0]}/{row[1]}" for row in report.table.rows]
            assert rebuilt == cells


class TestInferableColumns:
    def test_rank_of_points_descending(self):
        table = Table(["Ranking", "Team", "Total Points"],
                      [["1", "a", "88"], ["2", "b", "74"], ["3", "c", "61"]])
        found = detect_inferable_columns(table)
        assert [f.index for f in found] == [0]
        assert "Total Points" in found[0].evidence
        assert "descending" in found[0].evidence

    def test_rank_ascending(self):
        table = Table(["Place", "Time"], [["1", "9.91"], ["2", "10.02"]])
        found = detect_inferable_columns(table)
        assert found and found[0].index == 0
        assert "ascending" in found[0].evidence

    def test_unrelated_columns(self):
        table = Table(["Team", "City"],
                      [["Harbor", "Arden"], ["Meadow", "Brookfield"]])
        assert detect_inferable_columns(table) == []

    def test_duplicate_column(self):
        table = Table(["A", "B", "A again"],
                      [["x", "1", "x"], ["y", "2", "y"]])
        found = detect_inferable_columns(table)
        assert any("duplicate" in f.evidence and f.index == 2 for f in found)

    def test_needs_two_rows(self):
        with pytest.raises(ValueError, match="2 rows"):
            detect_inferable_columns(Table(["A", "B"], [["1", "2"]]))


class TestMaskColumn:
    def test_mask(self, small_table):
        masked = mask_column(small_table, 1)
        assert masked.header == ("Year", "Runner-up")
        assert masked.rows[0] == ("2001", "Bob")

    def test_out_of_range(self, small_table):
        with pytest.raises(IndexError):
            mask_column(small_table, 5)

    def test_last_column_protected(self):
        with pytest.raises(ValueError, match="last remaining"):
            mask_column(Table(["A"], [["1"]]), 0)

    def test_relative_order_kept(self):
        rng = random.Random(8)
        for i in range(100):
            table = random_table(rng, max_cols=5, max_rows=3)
            if table.width < 2:
                continue
            index = i % table.width
            masked = mask_column(table, index)
            expected = tuple(h for j, h in enumerate(table.header) if j != index)
            assert masked.header == expected


class TestNlqSynonymAttack:
    def test_paper_substitution(self):
        lex = parse_lexicon("how many\twhat is the quantity of\n")
        out = rta_nlq_synonym_attack("how many districts were created?", lex)
        assert out == "what is the quantity of districts were created?"

    def test_capitalization_preserved(self):
        lex = parse_lexicon("how many\twhat is the quantity of\n")
        out = rta_nlq_synonym_attack("How many districts?", lex)
        assert out == "What is the quantity of districts?"

    def test_no_match_is_noop(self):
        lex = parse_lexicon("how many\twhat is the quantity of\n")
        assert rta_nlq_synonym_attack("who won in 2002?", lex) is None

    def test_longest_match_first(self):
        lex = parse_lexicon("how many\twhat is the quantity of\nmany\tnumerous\n")
        out = rta_nlq_synonym_attack("how many?", lex)
        assert out == "what is the quantity of?"

    def test_stopword_entries_ignored(self):
        lex = parse_lexicon("the\tthat one\n")
        assert rta_nlq_synonym_attack("the winner?", lex) is None

    def test_model_short_circuit(self):
        lex = parse_lexicon(
            "champion\twinner\nyear\tseason\nscore\tresult\n")
        calls = []

        def flip_on_any_change(question):
            calls.append(question)
            return ["changed"] if "winner" in question or "season" in question \
                or "result" in question else ["orig"]

        out = rta_nlq_synonym_attack("champion year score?", lex,
                                     model=flip_on_any_change)
        # baseline + first candidate, which already flips
        assert len(calls) == 2
        assert out is not None and "winner" in out or "season" in out

    def test_budget_validated(self):
        lex = parse_lexicon("a b\tc d\n")
        with pytest.raises(ValueError):
            rta_nlq_synonym_attack("a b?", lex, budget=0)
