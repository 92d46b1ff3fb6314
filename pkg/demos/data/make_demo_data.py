"""Regenerate the small demo dataset and candidate-table corpus."""

import json
import os

HERE = os.path.dirname(__file__)

EXAMPLES = [
    {"id": "m1",
     "table": {"header": ["Year", "Champion", "Runner-up", "Score"],
               "rows": [["2001", "Harbor United", "Meadow FC", "3-2"],
                        ["2002", "Meadow FC", "Vale Town", "1-0"],
                        ["2003", "Harbor United", "Vale Town", "2-1"]]},
     "question": "who was the champion in 2002?",
     "answers": ["Meadow FC"]},
    {"id": "m2",
     "table": {"header": ["Year", "Champion", "Runner-up", "Score"],
               "rows": [["2001", "Harbor United", "Meadow FC", "3-2"],
                        ["2002", "Meadow FC", "Vale Town", "1-0"],
                        ["2003", "Harbor United", "Vale Town", "2-1"]]},
     "question": "how many titles did Harbor United win?",
     "answers": ["2"]},
    {"id": "m3",
     "table": {"header": ["Rank", "Nation", "Gold", "Total Points"],
               "rows": [["1", "Norway", "14", "88"],
                        ["2", "Estonia", "9", "61"],
                        ["3", "Chile", "6", "44"]]},
     "question": "which nation took the most gold?",
     "answers": ["Norway"]},
    {"id": "m4",
     "table": {"header": ["Rank", "Nation", "Gold", "Total Points"],
               "rows": [["1", "Norway", "14", "88"],
                        ["2", "Estonia", "9", "61"],
                        ["3", "Chile", "6", "44"]]},
     "question": "what is the last nation listed on the table?",
     "answers": ["Chile"]},
    {"id": "m5",
     "table": {"header": ["Player", "Team", "Points"],
               "rows": [["Jo Swann", "Harbor United", "31"],
                        ["Ana Reyes", "Meadow FC", "27"],
                        ["K. Mori", "Vale Town", "19"]]},
     "question": "how many points did Ana Reyes score?",
     "answers": ["27"]},
    {"id": "m6",
     "table": {"header": ["Player", "Team", "Points"],
               "rows": [["Jo Swann", "Harbor United", "31"],
                        ["Ana Reyes", "Meadow FC", "27"],
                        ["K. Mori", "Vale Town", "19"]]},
     "question": "who scored more points, Jo Swann or K. Mori?",
     "answers": ["Jo Swann"]},
    {"id": "s1a",
     "table": {"header": ["Date", "Venue", "Attendance"],
               "rows": [["3 May", "City Arena", "18,450"],
                        ["10 May", "Riverside Park", "12,220"]]},
     "question": "which venue had the larger attendance?",
     "answers": ["City Arena"],
     "sequence_id": "s1", "position_in_sequence": 0},
    {"id": "s1b",
     "table": {"header": ["Date", "Venue", "Attendance"],
               "rows": [["3 May", "City Arena", "18,450"],
                        ["10 May", "Riverside Park", "12,220"]]},
     "question": "what was its attendance?",
     "answers": ["18,450"],
     "sequence_id": "s1", "position_in_sequence": 1},
]

CORPUS = [
    {"header": ["Season", "Attendance", "Venue"],
     "rows": [["2001", "18,450", "City Arena"], ["2002", "12,220", "Riverside Park"]]},
    {"header": ["Final", "Referee", "City"],
     "rows": [["2001", "G. Dienst", "Arden"], ["2002", "R. Glockner", "Brookfield"]]},
    {"header": ["Nation", "Silver", "Bronze"],
     "rows": [["Norway", "14", "11"], ["Estonia", "4", "7"]]},
    {"header": ["Name", "Assists", "Minutes"],
     "rows": [["Jo Swann", "7", "1,820"], ["Ana Reyes", "11", "1,644"]]},
    {"header": ["Club", "Manager", "Founded"],
     "rows": [["Harbor United", "R. Voss", "1904"], ["Meadow FC", "L. Chan", "1911"]]},
    {"header": ["Stadium", "Capacity", "Opened"],
     "rows": [["City Arena", "22,000", "1958"], ["Riverside Park", "14,500", "1923"]]},
]


def main():
    with open(os.path.join(HERE, "matches.jsonl"), "w", encoding="utf-8") as fh:
        for record in EXAMPLES:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    with open(os.path.join(HERE, "corpus.jsonl"), "w", encoding="utf-8") as fh:
        for record in CORPUS:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
    print("demo data written")


if __name__ == "__main__":
    main()
