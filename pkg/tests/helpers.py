"""Shared builders and independent oracles used across the test modules.

The oracles re-derive expected values with deliberately dumb code (per-char
scans, full enumeration) so the library is checked against something other
than itself.
"""

from __future__ import annotations

import re

from slotqa import Dataset, Instance, Span
from slotqa.baseline import STOP_WORDS
from slotqa.metrics import normalize_answer
from slotqa.transforms import segment_sentences


def make_instance(
    id="i0",
    question="Where was Obama born?",
    context="President Obama was born in Honolulu, Hawaii.",
    answers=((28, "Honolulu, Hawaii"),),
    origin=None,
    split="train",
    relation=None,
    subject_entity=None,
):
    spans = tuple(Span(start, text) for start, text in answers)
    if origin is None:
        origin = "squad_positive" if spans else "squad_negative"
    return Instance(
        id=id,
        question=question,
        context=context,
        answers=spans,
        relation=relation,
        subject_entity=subject_entity,
        origin=origin,
        split=split,
    )


def make_dataset(*instances, **kwargs):
    return Dataset(instances=tuple(instances), **kwargs)


def tally_score(dataset, predictions):
    """Brute-force slot-filling tally, independent of the metrics module.

    Classifies every (instance, prediction) pair and derives precision and
    recall from the raw buckets.
    """
    by_id = {p.instance_id: p for p in predictions}
    token = dataset.no_answer_token
    true_positive = wrong_on_positive = answered_negative = 0
    ignored_no_answer = missed_positive = 0
    n_positives = 0
    for inst in dataset:
        golds = list(inst.answers)
        if token is not None and golds == [Span(0, token)]:
            golds = []
        pred = by_id.get(inst.id)
        answer = pred.answer if pred is not None else None
        if answer is not None and token is not None:
            if normalize_answer(answer) == normalize_answer(token):
                answer = None
        if golds:
            n_positives += 1
        if answer is None:
            if golds:
                missed_positive += 1
            else:
                ignored_no_answer += 1
            continue
        if not golds:
            answered_negative += 1
            continue
        if any(normalize_answer(answer) == normalize_answer(g.text) for g in golds):
            true_positive += 1
        else:
            wrong_on_positive += 1
    answered = true_positive + wrong_on_positive + answered_negative
    precision = true_positive / answered if answered else 0.0
    recall = true_positive / n_positives if n_positives else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


_WORD = re.compile(r"[^\W_]+", re.UNICODE)


def oracle_best_span(instance, config, idf_table):
    """Exhaustive enumeration of the baseline scoring rule.

    Returns (score, char_start, char_end) of the best candidate under the
    documented rule, or None when no candidate exists.
    """
    tokens = [(m.group(0).lower(), m.start(), m.end()) for m in _WORD.finditer(instance.context)]
    q_tokens = [m.group(0).lower() for m in _WORD.finditer(instance.question)]
    q_all = set(q_tokens)
    if instance.subject_entity:
        q_all |= {m.group(0).lower() for m in _WORD.finditer(instance.subject_entity)}
    q_content = q_all - STOP_WORDS
    if not q_content:
        return None
    best = None
    for boundary in segment_sentences(instance.context):
        sentence = [t for t in tokens if t[1] >= boundary.start and t[2] <= boundary.end]
        types = {w for w, _, _ in sentence}
        matched = q_content & types
        if not matched:
            continue
        sentence_score = sum(idf_table.idf(w) for w in sorted(matched))
        n = len(sentence)
        for i in range(n):
            for j in range(i, min(i + config.max_span_tokens, n)):
                window = sentence[i : j + 1]
                if any(w in q_all for w, _, _ in window):
                    continue
                credit = sum(
                    idf_table.idf(w)
                    for w in sorted({w for w, _, _ in window} - STOP_WORDS)
                )
                adjacency = 0.0
                if i > 0 and sentence[i - 1][0] in q_content:
                    adjacency += 0.25 * idf_table.idf(sentence[i - 1][0])
                if j + 1 < n and sentence[j + 1][0] in q_content:
                    adjacency += 0.25 * idf_table.idf(sentence[j + 1][0])
                score = sentence_score + credit + adjacency
                start, end = window[0][1], window[-1][2]
                if (
                    best is None
                    or score > best[0]
                    or (score == best[0] and (start, end - start) < (best[1], best[2] - best[1]))
                ):
                    best = (score, start, end)
    return best


def char_level_survivors(context, spans):
    """Sentences that share no character position with any span, by per-char scan."""
    covered = set()
    for span in spans:
        covered.update(range(span.start, span.start + len(span.text)))
    survivors = []
    for b in segment_sentences(context):
        if not any(pos in covered for pos in range(b.start, b.end)):
            survivors.append(context[b.start : b.end])
    return survivors
