"""Slot-filling scoring: precision over answered, recall over positives.

A correct no-answer on a negative instance contributes to neither
precision nor recall; answering a negative costs precision. Correctness of
an answered positive is normalized exact match against any gold span text.
Datasets adapted with a dummy no-answer token are scored transparently:
the token maps back to a no-answer on both the prediction side and the
gold side.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import Dataset, DataError, Instance, Prediction


def normalize_answer(s: str) -> str:
    """Lower text and remove punctuation, articles and extra whitespace."""

    def remove_articles(text):
        return re.sub(r"\b(a|an|the)\b", " ", text)

    def white_space_fix(text):
        return " ".join(text.split())

    def remove_punc(text):
        exclude = set(string.punctuation)
        return "".join(ch for ch in text if ch not in exclude)

    def lower(text):
        return text.lower()

    return white_space_fix(remove_articles(remove_punc(lower(s))))


_COUNT_KEYS = ("positives", "negatives", "answered", "correct", "no_answer_predictions", "missing")


@dataclass
class EvalReport:
    """Metric values plus the raw tallies they came from.

    Slot-filling scoring fills precision/recall/f1 and leaves accuracy
    None; challenge scoring fills accuracy only. ``to_dict`` drops the
    unused fields.
    """

    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    accuracy: float | None = None
    counts: dict = field(default_factory=dict)
    per_relation: dict | None = None

    def to_dict(self) -> dict:
        out: dict = {}
        for key in ("precision", "recall", "f1", "accuracy"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        out["counts"] = self.counts
        if self.per_relation is not None:
            out["per_relation"] = {
                rel: rep.to_dict() for rel, rep in self.per_relation.items()
            }
        return out

    def to_tsv(self) -> str:
        """One tab-separated line: precision, recall, f1, accuracy, then counts."""
        cells = []
        for key in ("precision", "recall", "f1", "accuracy"):
            value = getattr(self, key)
            cells.append("" if value is None else repr(value))
        cells.extend(str(self.counts.get(key, 0)) for key in _COUNT_KEYS)
        return "\t".join(cells)


def _prediction_map(
    dataset: Dataset, predictions: Iterable[Prediction]
) -> dict[str, Prediction]:
    known = {inst.id for inst in dataset}
    by_id: dict[str, Prediction] = {}
    duplicates = []
    unknown = []
    for pred in predictions:
        if pred.instance_id in by_id:
            duplicates.append(pred.instance_id)
        by_id[pred.instance_id] = pred
        if pred.instance_id not in known:
            unknown.append(pred.instance_id)
    if duplicates:
        raise DataError(f"duplicate predictions for instance ids: {sorted(set(duplicates))[:10]}")
    if unknown:
        raise DataError(f"predictions for unknown instance ids: {sorted(unknown)[:10]}")
    return by_id


def _effective_gold_texts(inst: Instance, token: str | None) -> tuple[str, ...]:
    if (
        token is not None
        and len(inst.answers) == 1
        and inst.answers[0].start == 0
        and inst.answers[0].text == token
    ):
        return ()
    return tuple(span.text for span in inst.answers)


def _effective_answer(answer: str | None, token: str | None) -> str | None:
    if answer is None:
        return None
    if token is not None and normalize_answer(answer) == normalize_answer(token):
        return None
    return answer


def _token_overlap_credit(prediction: str, golds: Sequence[str]) -> float:
    """Max token-level F1 of the prediction against any gold, after normalization."""
    pred_tokens = normalize_answer(prediction).split()
    best = 0.0
    for gold in golds:
        gold_tokens = normalize_answer(gold).split()
        if not pred_tokens or not gold_tokens:
            if pred_tokens == gold_tokens:
                best = max(best, 1.0)
            continue
        common: dict[str, int] = {}
        for t in pred_tokens:
            common[t] = common.get(t, 0) + 1
        overlap = 0
        for t in gold_tokens:
            if common.get(t, 0) > 0:
                common[t] -= 1
                overlap += 1
        if overlap == 0:
            continue
        p = overlap / len(pred_tokens)
        r = overlap / len(gold_tokens)
        best = max(best, 2 * p * r / (p + r))
    return best


def _score_group(
    instances: Sequence[Instance],
    by_id: Mapping[str, Prediction],
    token: str | None,
    match: str,
    zero_division: float,
) -> EvalReport:
    positives = negatives = answered = no_answer = missing = 0
    correct = 0.0
    for inst in instances:
        golds = _effective_gold_texts(inst, token)
        if golds:
            positives += 1
        else:
            negatives += 1
        pred = by_id.get(inst.id)
        if pred is None:
            missing += 1
            answer = None
        else:
            answer = _effective_answer(pred.answer, token)
        if answer is None:
            no_answer += 1
            continue
        answered += 1
        if not golds:
            continue
        if match == "exact":
            normalized = normalize_answer(answer)
            if any(normalize_answer(g) == normalized for g in golds):
                correct += 1
        else:
            correct += _token_overlap_credit(answer, golds)
    precision = correct / answered if answered else zero_division
    recall = correct / positives if positives else zero_division
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    counts = {
        "positives": positives,
        "negatives": negatives,
        "answered": answered,
        "correct": int(correct) if match == "exact" else correct,
        "no_answer_predictions": no_answer,
        "missing": missing,
    }
    return EvalReport(precision=precision, recall=recall, f1=f1, counts=counts)


def score_slot_filling(
    dataset: Dataset,
    predictions: Iterable[Prediction],
    match: str = "exact",
    zero_division: float = 0.0,
) -> EvalReport:
    """Score predictions against a dataset under slot-filling conventions.

    precision = correct / answered, recall = correct / positives, and
    f1 = 2PR / (P + R); an empty denominator yields ``zero_division`` for
    precision and recall and 0.0 for f1. A missing prediction counts as a
    no-answer (tallied under ``missing``). ``match`` is ``"exact"`` for
    normalized exact match (canonical) or ``"overlap"`` for token-overlap
    partial credit. When any instance carries a relation, the report also
    breaks the same scores down per relation.
    """
    if match not in ("exact", "overlap"):
        raise DataError(f"unknown match mode {match!r}, expected 'exact' or 'overlap'")
    by_id = _prediction_map(dataset, predictions)
    token = dataset.no_answer_token
    report = _score_group(dataset.instances, by_id, token, match, zero_division)
    relations = [inst.relation for inst in dataset if inst.relation is not None]
    if relations:
        groups: dict[str, list[Instance]] = {}
        for inst in dataset:
            if inst.relation is not None:
                groups.setdefault(inst.relation, []).append(inst)
        report.per_relation = {
            rel: _score_group(members, by_id, token, match, zero_division)
            for rel, members in groups.items()
        }
    return report


def score_challenge_accuracy(
    dataset: Dataset, predictions: Iterable[Prediction]
) -> EvalReport:
    """Fraction of instances predicted as no-answer, on an all-negative dataset.

    Every instance must be negative (after mapping any dummy-token gold
    back to empty); a positive instance is an error, because accuracy over
    no-answers is only meaningful on a purely unanswerable set. Missing
    predictions count as no-answers.
    """
    if len(dataset) == 0:
        raise DataError("cannot score an empty dataset")
    by_id = _prediction_map(dataset, predictions)
    token = dataset.no_answer_token
    for inst in dataset:
        if _effective_gold_texts(inst, token):
            raise DataError(
                f"challenge accuracy needs an all-negative dataset; {inst.id!r} has answers"
            )
    answered = no_answer = missing = 0
    for inst in dataset:
        pred = by_id.get(inst.id)
        if pred is None:
            missing += 1
            answer = None
        else:
            answer = _effective_answer(pred.answer, token)
        if answer is None:
            no_answer += 1
        else:
            answered += 1
    counts = {
        "positives": 0,
        "negatives": len(dataset),
        "answered": answered,
        "correct": 0,
        "no_answer_predictions": no_answer,
        "missing": missing,
    }
    return EvalReport(accuracy=no_answer / len(dataset), counts=counts)
