#!/usr/bin/env python3
"""Regenerate the bundled test fixtures.

The corpus is synthetic and fully deterministic: 50 one-fact articles whose
answer sentence shares exactly two content words with the question
(the person token and "born") while the filler sentences share none. That
separation is what makes the lexical baseline provably exact on this corpus,
which the acceptance tests rely on.

Run from the repository root:

    python3 scripts/gen_fixtures.py
"""

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

N = 50

FILLERS = [
    "The weather report mentioned rain near the harbor.",
    "A local festival drew a small crowd that evening.",
    "Market stalls lined the old square before noon.",
]


def person(i: int) -> str:
    return f"Person{i:02d}"


def city(i: int) -> str:
    return f"Valleyburg{i:02d}"


def fact(i: int) -> str:
    # keep the city token directly after "born" so the answer span is clean
    return f"{person(i)} was born {city(i)}."


def gen_squad() -> dict:
    paragraphs = []
    for i in range(N):
        context = f"{fact(i)} {FILLERS[i % len(FILLERS)]}"
        start = context.index(city(i))
        paragraphs.append(
            {
                "context": context,
                "qas": [
                    {
                        "id": f"syn-{i:04d}",
                        "question": f"Where was {person(i)} born?",
                        "answers": [{"text": city(i), "answer_start": start}],
                    }
                ],
            }
        )
    return {
        "version": "1.1",
        "data": [{"title": "Synthetic Birthplaces", "paragraphs": paragraphs}],
    }


def gen_uwre() -> str:
    rows = []
    for i in range(N):
        rows.append(
            f"place_of_birth\tWhere was XXX born?\t{person(i)}\t{fact(i)}\t{city(i)}\n"
        )
    return "".join(rows)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    squad_path = FIXTURES / "synthetic_squad.json"
    with open(squad_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(gen_squad(), f, ensure_ascii=False, indent=1)
        f.write("\n")
    (FIXTURES / "synthetic_uwre.tsv").write_text(gen_uwre(), encoding="utf-8")
    (FIXTURES / "templates.tsv").write_text(
        "place_of_birth\tWhere was XXX born?\n", encoding="utf-8"
    )
    print(f"wrote fixtures for {N} records to {FIXTURES}")


if __name__ == "__main__":
    main()
