"""Regenerate the frozen test fixtures.

Run from the repo root:  python tools/make_fixtures.py
Outputs land in tests/fixtures/. The files are checked in; regeneration
must be byte-stable.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")

ANSWER_WORDS = [
    "color", "animal", "metal", "fruit", "river", "planet", "flower", "stone",
    "bird", "tree", "cloud", "spice", "fabric", "tool", "grain", "shell",
    "valley", "island", "bridge", "engine", "signal", "ribbon", "lantern",
    "marble", "canyon", "harbor", "meadow", "forest", "crystal", "comet",
    "breeze", "ember", "glacier", "lagoon", "mesa", "orchard", "prairie",
    "reef", "summit", "tundra",
]


def make_rowshuffle_fixture() -> None:
    lines = []
    for i, word in enumerate(ANSWER_WORDS):
        n_rows = 3 + (i % 4)
        header = ["Entry", word.capitalize(), "Code"]
        rows = [
            [f"e{i}-{r}", f"{word}-{r}", f"c{i}{r}"]
            for r in range(n_rows)
        ]
        record = {
            "id": f"rs{i:02d}",
            "table": {"header": header, "rows": rows},
            "question": f"what {word} is recorded for the group?",
            "answers": [f"{word}-0"],
        }
        lines.append(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
    path = os.path.join(FIXTURES, "rowshuffle_examples.jsonl")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(lines)} examples)")


QUERY_THEMES = [
    ("league season", ["Season", "Club", "Points", "Manager"],
     [["1993", "Harbor United", "71", "R. Voss"],
      ["1994", "Meadow FC", "68", "L. Chan"],
      ["1995", "Vale Town", "64", "M. Osei"]]),
    ("election", ["Constituency", "Winner", "Votes", "Margin"],
     [["Arden East", "P. Kovak", "21,040", "3,122"],
      ["Arden West", "M. Osei", "19,882", "1,009"],
      ["Brookfield", "T. Brandt", "17,455", "884"]]),
    ("discography", ["Album", "Label", "Release Year", "Peak Position"],
     [["First Light", "Bluebell", "1979", "4"],
      ["Roads", "Northside", "1981", "11"],
      ["Quiet Hours", "Bluebell", "1984", "2"]]),
    ("olympics", ["Games", "Gold", "Silver", "Bronze"],
     [["1992 Albertville", "3", "5", "2"],
      ["1994 Lillehammer", "6", "4", "5"],
      ["1998 Nagano", "4", "4", "6"]]),
    ("film festival", ["Film", "Director", "Country", "Award"],
     [["Blue Door", "R. Voss", "Norway", "Jury Prize"],
      ["Red Mile", "L. Chan", "Estonia", "Best Director"],
      ["Still Water", "A. Reyes", "Chile", "Golden Reel"]]),
    ("railway", ["Station", "Line", "Opened", "Zone"],
     [["Elm Street", "Blue", "1904", "2"],
      ["Dock Road", "Red", "1911", "3"],
      ["Mill Lane", "Blue", "1922", "2"]]),
    ("mountains", ["Peak", "Range", "Height", "First Ascent"],
     [["Mt. Orla", "North Range", "3,204 m", "1921"],
      ["Pell Peak", "West Range", "2,988 m", "1934"],
      ["Vale Horn", "North Range", "3,455 m", "1948"]]),
    ("tennis", ["Tournament", "Surface", "Champion", "Score"],
     [["Arden Open", "Clay", "S. Adeyemi", "6-4 6-2"],
      ["Harbor Cup", "Hard", "K. Mori", "7-5 6-4"],
      ["Vale Classic", "Grass", "B. Reis", "6-3 6-3"]]),
    ("aircraft", ["Model", "Role", "Introduced", "Number Built"],
     [["AW-101", "Transport", "1961", "412"],
      ["AW-204", "Trainer", "1968", "176"],
      ["AW-310", "Survey", "1975", "88"]]),
    ("chemistry", ["Element", "Symbol", "Group", "Melting Point"],
     [["Sodium", "Na", "1", "98 C"],
      ["Iron", "Fe", "8", "1,538 C"],
      ["Copper", "Cu", "11", "1,085 C"]]),
]

FILLER_THEMES = [
    ("volcano", ["Volcano", "Last Eruption", "Elevation"],
     [["Mt. Caldo", "1872", "2,340 m"], ["Pico Azul", "1951", "1,882 m"]]),
    ("library", ["Branch", "Founded", "Holdings"],
     [["Central", "1899", "410,000"], ["Dockside", "1934", "88,000"]]),
    ("cheese", ["Cheese", "Milk", "Region"],
     [["Vellan", "Cow", "Arden"], ["Brosque", "Goat", "Brookfield"]]),
    ("opera", ["Opera", "Composer", "Premiere"],
     [["The Tide", "H. Maret", "1881"], ["Night Mail", "O. Lind", "1907"]]),
    ("bridge", ["Bridge", "Span", "Completed"],
     [["Dock Crossing", "310 m", "1938"], ["Vale Viaduct", "540 m", "1961"]]),
    ("comet", ["Comet", "Period", "Discovered"],
     [["C/1901 V1", "411 y", "1901"], ["P/Orla", "6.4 y", "1954"]]),
    ("cipher", ["Cipher", "Key Size", "Year"],
     [["Vex-64", "64", "1977"], ["Marlin", "128", "1993"]]),
    ("dance", ["Dance", "Origin", "Meter"],
     [["Serela", "Chile", "3/4"], ["Tovan", "Estonia", "2/4"]]),
    ("shipwreck", ["Ship", "Sank", "Depth"],
     [["SS Arden", "1917", "84 m"], ["MV Pell", "1960", "41 m"]]),
    ("moth", ["Species", "Wingspan", "Family"],
     [["Luna Vale", "11 cm", "Saturniidae"], ["Ash Tover", "4 cm", "Erebidae"]]),
    ("keyboard", ["Layout", "Country", "Introduced"],
     [["VORAK", "Norway", "1936"], ["KEM-2", "Estonia", "1979"]]),
    ("satellite", ["Satellite", "Launched", "Orbit"],
     [["Orla-1", "1971", "LEO"], ["Vega-3", "1988", "GEO"]]),
    ("marathon", ["Race", "Record", "Holder"],
     [["Arden Marathon", "2:09:11", "S. Adeyemi"], ["Vale Run", "2:12:45", "L. Costa"]]),
    ("grape", ["Variety", "Skin", "Acidity"],
     [["Velano", "Red", "High"], ["Brosc", "White", "Medium"]]),
    ("lighthouse", ["Lighthouse", "Height", "First Lit"],
     [["Dock Point", "31 m", "1852"], ["Cape Orla", "44 m", "1890"]]),
    ("synth", ["Synthesizer", "Voices", "Released"],
     [["PV-8", "8", "1982"], ["Marlin X", "16", "1987"]]),
    ("canal", ["Canal", "Length", "Locks"],
     [["Arden Cut", "14 km", "6"], ["Vale Water", "38 km", "19"]]),
    ("meteor", ["Shower", "Peak", "Rate"],
     [["Orlids", "August", "60"], ["Vegids", "December", "120"]]),
    ("typeface", ["Typeface", "Designer", "Year"],
     [["Ardena", "R. Voss", "1959"], ["PellGrotesk", "L. Chan", "1971"]]),
    ("glacier", ["Glacier", "Length", "Trend"],
     [["Orla Ice", "12 km", "Retreating"], ["Vale Firn", "7 km", "Stable"]]),
    ("radio", ["Station", "Frequency", "Format"],
     [["Radio Arden", "98.1", "News"], ["Vale FM", "102.7", "Music"]]),
    ("castle", ["Castle", "Built", "Condition"],
     [["Orla Keep", "1301", "Ruin"], ["Pell Castle", "1460", "Restored"]]),
    ("orchid", ["Orchid", "Habitat", "Blooms"],
     [["Vale Star", "Cloud forest", "May"], ["Arden Bee", "Bog", "July"]]),
    ("submarine", ["Boat", "Class", "Commissioned"],
     [["S-41", "Delfin", "1943"], ["S-77", "Orka", "1958"]]),
    ("tea", ["Tea", "Oxidation", "Region"],
     [["Vale Green", "Low", "Highlands"], ["Dock Black", "Full", "Coast"]]),
    ("coin", ["Coin", "Metal Content", "Minted"],
     [["Arden Crown", "Silver", "1887"], ["Pell Mark", "Copper", "1923"]]),
    ("kite", ["Kite", "Sail Area", "Lines"],
     [["Vela Duo", "2.4 m2", "2"], ["Orla Quad", "3.1 m2", "4"]]),
    ("fern", ["Fern", "Fronds", "Zone"],
     [["Vale Lace", "40 cm", "4"], ["Arden Shield", "90 cm", "5"]]),
    ("tram", ["Route", "Termini", "Headway"],
     [["T1", "Dock-Elm", "8 min"], ["T4", "Mill-Cape", "12 min"]]),
    ("pepper", ["Pepper", "Heat", "Color "],
     [["Vale Fire", "50,000 SHU", "Red"], ["Arden Sweet", "0 SHU", "Yellow"]]),
    ("harp", ["Harp", "Strings", "Maker"],
     [["Orla 40", "40", "H. Maret"], ["Pell Grand", "47", "O. Lind"]]),
    ("fossil", ["Fossil", "Era", "Found"],
     [["Velodon", "Jurassic", "1911"], ["Ardenix", "Triassic", "1968"]]),
    ("windmill", ["Mill", "Type", "Working"],
     [["Dock Mill", "Smock", "Yes"], ["Vale Post", "Post", "No"]]),
    ("chili", ["Dish", "Base", "Served"],
     [["Arden Pot", "Bean", "Hot"], ["Dock Bowl", "Beef", "Hot"]]),
    ("violin", ["Violin", "Luthier", "Year Made"],
     [["The Vale", "H. Maret", "1703"], ["Orla Red", "G. Peller", "1741"]]),
    ("cave", ["Cave", "Depth", "Surveyed"],
     [["Orla Deep", "412 m", "1961"], ["Vale Hollow", "188 m", "1979"]]),
    ("tide", ["Gauge", "Mean Range", "Installed"],
     [["Dock Gauge", "4.1 m", "1902"], ["Cape Gauge", "2.8 m", "1931"]]),
]


def _near_duplicate(header, rows):
    """Same table with one header token tweaked; vocab overlap stays high."""
    new_header = list(header)
    new_header[-1] = new_header[-1] + " (est.)"
    return new_header, rows


def make_retrieval_fixture() -> None:
    corpus = []
    queries = []
    for qi, (topic, header, rows) in enumerate(QUERY_THEMES):
        queries.append({
            "id": f"q{qi:02d}",
            "topic": topic,
            "table": {"header": header, "rows": rows},
            "near_duplicate_id": f"nd{qi:02d}",
        })
        nd_header, nd_rows = _near_duplicate(header, rows)
        corpus.append({"id": f"nd{qi:02d}",
                       "table": {"header": nd_header, "rows": nd_rows}})
    # exact copies of the first three queries exercise self-exclusion
    for qi in range(3):
        _, header, rows = QUERY_THEMES[qi]
        corpus.append({"id": f"self{qi:02d}",
                       "table": {"header": header, "rows": rows}})
    for fi, (_topic, header, rows) in enumerate(FILLER_THEMES):
        corpus.append({"id": f"fill{fi:02d}",
                       "table": {"header": header, "rows": rows}})
    assert len(corpus) == 50, len(corpus)

    with open(os.path.join(FIXTURES, "retrieval_corpus.jsonl"), "w",
              encoding="utf-8", newline="\n") as fh:
        for record in corpus:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    with open(os.path.join(FIXTURES, "retrieval_queries.jsonl"), "w",
              encoding="utf-8", newline="\n") as fh:
        for record in queries:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    print(f"wrote retrieval corpus (50 tables) and {len(queries)} queries")


def main() -> None:
    os.makedirs(FIXTURES, exist_ok=True)
    make_rowshuffle_fixture()
    make_retrieval_fixture()


if __name__ == "__main__":
    main()
