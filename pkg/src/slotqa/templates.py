"""Question templates: turn a KB relation query into a natural-language question.

A template pattern holds the literal placeholder ``XXX`` exactly once; the
subject entity is substituted at that position. Template files are TSV with
two columns, ``relation<TAB>pattern``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .model import DataError, ParseError, QuestionTemplate, RelationQuery

PLACEHOLDER = "XXX"


def instantiate(template: QuestionTemplate, query: RelationQuery) -> str:
    """Substitute the query's entity into the template's placeholder.

    The substitution is purely positional; the entity string is inserted
    verbatim, even when it contains the placeholder text itself.
    """
    if template.relation != query.relation:
        raise DataError(
            f"template is for relation {template.relation!r}, "
            f"query is for relation {query.relation!r}"
        )
    if template.pattern.count(PLACEHOLDER) != 1:
        raise DataError(
            f"template pattern must contain {PLACEHOLDER!r} exactly once: "
            f"{template.pattern!r}"
        )
    return template.pattern.replace(PLACEHOLDER, query.subject_entity)


def load_templates(path: str | Path) -> tuple[list[QuestionTemplate], list[str]]:
    """Read a template TSV, returning (templates, rejected row descriptions).

    Rows whose pattern does not contain the placeholder exactly once are
    rejected, not fatal. Duplicate (relation, pattern) rows are dropped,
    keeping the first. Rows that are not two tab-separated fields are a
    parse error.
    """
    templates: list[QuestionTemplate] = []
    rejections: list[str] = []
    seen: set[tuple[str, str]] = set()
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"{path}: line {lineno}: expected 2 tab-separated fields, got {len(parts)}"
                )
            relation, pattern = parts
            if not relation:
                rejections.append(f"line {lineno}: empty relation")
                continue
            if pattern.count(PLACEHOLDER) != 1:
                rejections.append(
                    f"line {lineno}: pattern must contain {PLACEHOLDER!r} exactly once: {pattern!r}"
                )
                continue
            key = (relation, pattern)
            if key in seen:
                continue
            seen.add(key)
            templates.append(QuestionTemplate(relation, pattern))
    return templates, rejections


def save_templates(templates: Iterable[QuestionTemplate], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in templates:
            f.write(f"{t.relation}\t{t.pattern}\n")


def by_relation(templates: Sequence[QuestionTemplate]) -> dict[str, list[QuestionTemplate]]:
    """Group templates by relation, preserving file order within each group."""
    grouped: dict[str, list[QuestionTemplate]] = {}
    for t in templates:
        grouped.setdefault(t.relation, []).append(t)
    return grouped


def first_template(templates: Sequence[QuestionTemplate], relation: str) -> QuestionTemplate:
    """The first template listed for a relation; raises when none exists."""
    for t in templates:
        if t.relation == relation:
            return t
    raise DataError(f"no question template for relation {relation!r}")
