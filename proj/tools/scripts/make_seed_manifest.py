#!/usr/bin/env python3
"""Writes data/seed_manifest.jsonl and data/seed_counts.json.

The original seed questions are not redistributed here. Each source gets
synthetic stand-in questions in its style, one record per listed row count,
so pool plumbing and per-source accounting can be exercised end to end.
Replace the file with real questions (same {"text", "source"} lines) for
actual training.
"""
import json
import pathlib
import sys

COUNTS = [
    ("CommonsenseQA", 70),
    ("TriviaQA", 71),
    ("Natural Questions", 79),
    ("OpenBookQA", 75),
    ("BoolQ", 88),
    ("SQuAD", 82),
    ("MATH", 84),
    ("Hellaswag", 90),
    ("GSM8K", 77),
    ("GPQA", 69),
    ("MBPP", 53),
    ("ARC-Challenge", 78),
    ("MMLU", 69),
    ("HumanEval", 15),
]
STATED_TOTAL = 967

TEMPLATES = {
    "CommonsenseQA": "Where would you most likely keep item number {i} of a household inventory? (A) kitchen (B) garage (C) attic (D) closet",
    "TriviaQA": "Trivia stand-in #{i}: which planet is number {p} from the sun?",
    "Natural Questions": "who was the {i}th person listed in the stand-in register of explorers",
    "OpenBookQA": "Stand-in science fact {i}: a metal rod heated to {t} degrees will most likely (A) expand (B) shrink (C) melt (D) freeze",
    "BoolQ": "Passage stand-in {i}: a cube has {e} edges. Question: is the statement true?",
    "SQuAD": "Context stand-in {i}: the bridge opened in year {y}. Question: in which year did the bridge open?",
    "MATH": "Find the remainder when {a}^{i} is divided by {m}.",
    "Hellaswag": "Stand-in scene {i}: a person laces their shoes and steps outside. What happens next? (A) they start jogging (B) they fall asleep (C) they bake bread (D) they swim",
    "GSM8K": "A shop sells pencils for {a} cents each. Sam buys {i} pencils and pays with a {b}-dollar bill. How many cents of change does Sam get?",
    "GPQA": "Stand-in graduate question {i}: a particle of mass {a} MeV decays into two photons at rest. What is the energy of each photon?",
    "MBPP": "Write a Python function that returns the sum of the first {i} multiples of {a}.",
    "ARC-Challenge": "Stand-in question {i}: which property of a mineral is tested by scratching it on a plate of hardness {a}? (A) streak (B) luster (C) hardness (D) cleavage",
    "MMLU": "Stand-in MMLU item {i}: what is {a} modulo {m}? (A) {r} (B) {r1} (C) {r2} (D) {r3}",
    "HumanEval": "def stand_in_{i}(xs: list) -> int:\n    \"\"\"Return the count of elements in xs divisible by {a}.\"\"\"",
}


def render(source, i):
    a = 3 + i % 7
    m = 5 + i % 11
    r = (a ** 2) % m
    return TEMPLATES[source].format(
        i=i, p=1 + i % 8, t=100 + i, e=12, y=1800 + i, a=a, m=m, b=1 + i // 10,
        r=r, r1=r + 1, r2=r + 2, r3=r + 3)


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seen = set()
    with open(out / "seed_manifest.jsonl", "w", encoding="utf-8") as f:
        for source, n in COUNTS:
            for i in range(1, n + 1):
                text = render(source, i)
                key = " ".join(text.split())
                assert key not in seen, text
                seen.add(key)
                f.write(json.dumps({"text": text, "source": source}, ensure_ascii=False) + "\n")
    counts = {"sources": dict(COUNTS), "stated_total": STATED_TOTAL}
    with open(out / "seed_counts.json", "w", encoding="utf-8") as f:
        json.dump(counts, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parents[2] / "data")
