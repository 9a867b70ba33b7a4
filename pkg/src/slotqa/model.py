"""Core data model for slot-filling QA datasets, plus their on-disk forms.

The canonical dataset format is JSONL: one instance object per line, UTF-8
with LF line endings, fields ``id``, ``question``, ``context``, ``answers``
(array of ``{start, text}`` objects), ``relation``, ``subject_entity``,
``origin``, ``split``. All character offsets count Unicode code points,
never bytes, so ``context[start : start + len(text)] == text`` holds in
Python string indexing directly.

Dataset-level metadata (name, provenance log, no-answer adaptation token)
has no slot in the line format; it lives in a sidecar JSON file next to the
JSONL, written and read by :func:`write_dataset` / :func:`load_dataset`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

ORIGINS = (
    "squad_positive",
    "squad_negative",
    "uwre_positive",
    "uwre_negative",
    "challenge_negative",
    "synthetic",
)
NEGATIVE_ORIGINS = frozenset({"squad_negative", "uwre_negative", "challenge_negative"})
POSITIVE_ORIGINS = frozenset({"squad_positive", "uwre_positive"})
SPLITS = ("train", "dev", "test")

_INSTANCE_FIELDS = (
    "id",
    "question",
    "context",
    "answers",
    "relation",
    "subject_entity",
    "origin",
    "split",
)


class ParseError(ValueError):
    """Structural failure while reading an external file (bad schema, bad row)."""


class DataError(ValueError):
    """Semantic failure in well-formed data (broken invariant, bad precondition)."""


@dataclass(frozen=True)
class Span:
    """A gold answer: ``text`` starts at code-point offset ``start`` of the context."""

    start: int
    text: str


@dataclass(frozen=True)
class Instance:
    """One question paired with one context.

    An empty ``answers`` tuple marks a negative instance: the context does
    not contain the answer. ``relation`` and ``subject_entity`` are only
    populated for instances that came from (or mimic) KB slot-filling data.
    """

    id: str
    question: str
    context: str
    answers: tuple[Span, ...] = ()
    relation: str | None = None
    subject_entity: str | None = None
    origin: str = "synthetic"
    split: str = "train"

    def is_negative(self) -> bool:
        return not self.answers


@dataclass(frozen=True)
class RelationQuery:
    """A KB query: which object fills ``relation`` for ``subject_entity``."""

    relation: str
    subject_entity: str


@dataclass(frozen=True)
class QuestionTemplate:
    """A parametric question for a relation; the placeholder marks the entity slot."""

    relation: str
    pattern: str


@dataclass(frozen=True)
class Prediction:
    """A system output for one instance; ``answer is None`` means no answer."""

    instance_id: str
    answer: str | None


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of instances with provenance.

    ``provenance_log`` is append-only: every transform that produces a new
    Dataset copies the old entries and adds one of its own. Each entry is
    ``{"operation": str, "parameters": dict, "seed": int | None}``.
    ``no_answer_token`` is set once a dummy-token adaptation has been applied
    so scoring can map the token back to a no-answer.
    """

    instances: tuple[Instance, ...] = ()
    name: str = ""
    provenance_log: tuple[dict, ...] = ()
    no_answer_token: str | None = None

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    def derive(
        self,
        instances: Sequence[Instance],
        operation: str,
        parameters: dict,
        seed: int | None = None,
        **overrides: Any,
    ) -> "Dataset":
        """A new Dataset with ``instances``, inheriting and extending provenance."""
        entry = {"operation": operation, "parameters": dict(parameters), "seed": seed}
        fields: dict[str, Any] = {
            "instances": tuple(instances),
            "provenance_log": self.provenance_log + (entry,),
        }
        fields.update(overrides)
        return replace(self, **fields)


@dataclass(frozen=True)
class Violation:
    """One broken dataset invariant, attributed to an instance."""

    instance_id: str
    invariant: str
    message: str


@dataclass
class TransformReport:
    """Summary of one dataset-producing operation; serializes to plain JSON."""

    operation: str
    input_count: int = 0
    output_count: int = 0
    skipped: int = 0
    parameters: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "operation": self.operation,
            "input_count": self.input_count,
            "output_count": self.output_count,
            "skipped": self.skipped,
            "parameters": self.parameters,
        }
        out.update(self.extra)
        out["notes"] = self.notes
        return out


def validate_dataset(dataset: Dataset) -> list[Violation]:
    """Check every dataset invariant, returning violations as data.

    Never raises on malformed content: a violation names the instance and
    the invariant it breaks. An empty result means the dataset is valid.
    """
    violations: list[Violation] = []
    seen_ids: set[str] = set()
    # adapted datasets mark negatives with a sentinel span over the token
    sentinel = (Span(0, dataset.no_answer_token),) if dataset.no_answer_token else None
    for inst in dataset.instances:
        if inst.id in seen_ids:
            violations.append(
                Violation(inst.id, "unique_ids", f"duplicate instance id {inst.id!r}")
            )
        seen_ids.add(inst.id)
        if inst.origin not in ORIGINS:
            violations.append(
                Violation(inst.id, "origin_enum", f"unknown origin {inst.origin!r}")
            )
        if inst.split not in SPLITS:
            violations.append(
                Violation(inst.id, "split_enum", f"unknown split {inst.split!r}")
            )
        for span in inst.answers:
            if not span.text:
                violations.append(
                    Violation(inst.id, "span_text_nonempty", "answer span has empty text")
                )
                continue
            if span.start < 0:
                violations.append(
                    Violation(
                        inst.id,
                        "span_start_nonnegative",
                        f"answer span start {span.start} is negative",
                    )
                )
                continue
            found = inst.context[span.start : span.start + len(span.text)]
            if found != span.text:
                violations.append(
                    Violation(
                        inst.id,
                        "span_matches_context",
                        f"span at offset {span.start} reads {found!r}, not {span.text!r}",
                    )
                )
        if inst.origin in NEGATIVE_ORIGINS and inst.answers and inst.answers != sentinel:
            violations.append(
                Violation(
                    inst.id,
                    "negative_origin_empty_answers",
                    f"origin {inst.origin!r} requires an empty answers list",
                )
            )
        if inst.origin in POSITIVE_ORIGINS and not inst.answers:
            violations.append(
                Violation(
                    inst.id,
                    "positive_origin_nonempty_answers",
                    f"origin {inst.origin!r} requires at least one answer span",
                )
            )
    return violations


# --- canonical JSONL form ---


def instance_to_dict(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "question": inst.question,
        "context": inst.context,
        "answers": [{"start": s.start, "text": s.text} for s in inst.answers],
        "relation": inst.relation,
        "subject_entity": inst.subject_entity,
        "origin": inst.origin,
        "split": inst.split,
    }


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), ensure_ascii=False)


def _require_str(obj: dict, key: str, where: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise ParseError(f"{where}: field {key!r} must be a string")
    return value


def instance_from_dict(obj: Any, where: str = "instance") -> Instance:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a JSON object")
    missing = [k for k in _INSTANCE_FIELDS if k not in obj]
    unknown = [k for k in obj if k not in _INSTANCE_FIELDS]
    if missing or unknown:
        raise ParseError(
            f"{where}: bad instance fields"
            + (f", missing {missing}" if missing else "")
            + (f", unknown {unknown}" if unknown else "")
        )
    answers_raw = obj["answers"]
    if not isinstance(answers_raw, list):
        raise ParseError(f"{where}: field 'answers' must be an array")
    answers = []
    for i, a in enumerate(answers_raw):
        if not isinstance(a, dict) or set(a) != {"start", "text"}:
            raise ParseError(f"{where}: answers[{i}] must be an object with start and text")
        start, text = a["start"], a["text"]
        if isinstance(start, bool) or not isinstance(start, int):
            raise ParseError(f"{where}: answers[{i}].start must be an integer")
        if not isinstance(text, str):
            raise ParseError(f"{where}: answers[{i}].text must be a string")
        answers.append(Span(start, text))
    for key in ("relation", "subject_entity"):
        if obj[key] is not None and not isinstance(obj[key], str):
            raise ParseError(f"{where}: field {key!r} must be a string or null")
    return Instance(
        id=_require_str(obj, "id", where),
        question=_require_str(obj, "question", where),
        context=_require_str(obj, "context", where),
        answers=tuple(answers),
        relation=obj["relation"],
        subject_entity=obj["subject_entity"],
        origin=_require_str(obj, "origin", where),
        split=_require_str(obj, "split", where),
    )


def write_instances(instances: Iterable[Instance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for inst in instances:
            f.write(dumps_instance(inst))
            f.write("\n")


def read_instances(path: str | Path) -> tuple[Instance, ...]:
    instances = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                raise ParseError(f"{path}: line {lineno}: empty line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}: line {lineno}: invalid JSON: {e}") from e
            instances.append(instance_from_dict(obj, where=f"{path}: line {lineno}"))
    return tuple(instances)


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".prov.json")


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write instances as JSONL plus the metadata sidecar."""
    write_instances(dataset.instances, path)
    meta = {
        "name": dataset.name,
        "no_answer_token": dataset.no_answer_token,
        "provenance_log": list(dataset.provenance_log),
    }
    with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, ensure_ascii=False, indent=2)
        f.write("\n")


def load_dataset(path: str | Path) -> Dataset:
    """Read a JSONL dataset, picking up the metadata sidecar when present."""
    instances = read_instances(path)
    side = sidecar_path(path)
    name = Path(path).stem
    token = None
    log: tuple[dict, ...] = ()
    if side.exists():
        with open(side, "r", encoding="utf-8") as f:
            try:
                meta = json.load(f)
            except json.JSONDecodeError as e:
                raise ParseError(f"{side}: invalid JSON: {e}") from e
        if not isinstance(meta, dict):
            raise ParseError(f"{side}: expected a JSON object")
        name = meta.get("name", name)
        token = meta.get("no_answer_token")
        log = tuple(meta.get("provenance_log", ()))
    return Dataset(instances=instances, name=name, provenance_log=log, no_answer_token=token)


# --- prediction files: one {"id": ..., "answer": ...} object per line ---


def write_predictions(predictions: Iterable[Prediction], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pred in predictions:
            f.write(json.dumps({"id": pred.instance_id, "answer": pred.answer}, ensure_ascii=False))
            f.write("\n")


def read_predictions(path: str | Path) -> tuple[Prediction, ...]:
    preds = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                raise ParseError(f"{path}: line {lineno}: empty line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}: line {lineno}: invalid JSON: {e}") from e
            if not isinstance(obj, dict) or set(obj) != {"id", "answer"}:
                raise ParseError(f"{path}: line {lineno}: expected an object with id and answer")
            if not isinstance(obj["id"], str):
                raise ParseError(f"{path}: line {lineno}: field 'id' must be a string")
            if obj["answer"] is not None and not isinstance(obj["answer"], str):
                raise ParseError(f"{path}: line {lineno}: field 'answer' must be a string or null")
            preds.append(Prediction(obj["id"], obj["answer"]))
    return tuple(preds)
