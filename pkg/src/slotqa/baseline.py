"""A training-free lexical span extractor with a no-answer threshold.

The scoring rule is frozen so predictions are reproducible and can be
checked by exhaustive enumeration:

* Tokens are maximal runs of word characters (underscore excluded),
  lowercased, with their code-point offsets kept.
* Q_all is the set of question tokens plus the subject entity's tokens;
  Q_content is Q_all minus a fixed stop list (wh-words and function words).
* Only sentences sharing at least one Q_content token yield candidates.
* A candidate span is a contiguous token run inside one sentence, at most
  ``max_span_tokens`` long, containing no Q_all token. Question words and
  the substituted entity therefore never earn credit inside a span.
* score(span) = sum of idf over the Q_content tokens present in the
  span's sentence, plus the idf of each distinct non-stop token inside the
  span, plus 0.25 * idf for each immediate neighbour token (within the
  sentence) that is a Q_content token. The neighbour term prefers spans
  adjacent to question-term matches.
* The best-scoring span is the answer when its score reaches
  ``no_answer_threshold``; otherwise the prediction is no-answer. Ties go
  to the earlier start, then the shorter span.

idf(w) = ln((1 + N) / (1 + df(w))) + 1 over the instance contexts of a
dataset, so unseen words get the maximum rarity value and an empty corpus
scores every word 1.0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import Dataset, DataError, Instance, Prediction
from .transforms import segment_sentences

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

STOP_WORDS = frozenset(
    """
    who whom whose what which when where why how
    a an the this that these those there here it its
    is are was were be been being am do does did done
    has have had having can could will would shall should may might must
    of in on at by for with to from as into over under about between
    and or but not no nor so if than then that
    he she they them his her their
    """.split()
)


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Lowercased word tokens with their (start, end) code-point offsets."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class BaselineConfig:
    max_span_tokens: int = 8
    no_answer_threshold: float = 1.0
    idf_source: str = "self_corpus"

    def validate(self) -> None:
        if self.max_span_tokens < 1:
            raise DataError(f"max_span_tokens must be at least 1, got {self.max_span_tokens}")
        if self.no_answer_threshold < 0:
            raise DataError(f"no_answer_threshold must be non-negative, got {self.no_answer_threshold}")
        if self.idf_source not in ("self_corpus", "uniform"):
            raise DataError(f"unknown idf_source {self.idf_source!r}")

    def to_dict(self) -> dict:
        return {
            "max_span_tokens": self.max_span_tokens,
            "no_answer_threshold": self.no_answer_threshold,
            "idf_source": self.idf_source,
        }


@dataclass(frozen=True)
class IdfTable:
    """Document frequencies over a corpus; uniform tables score every word 1.0."""

    n_docs: int = 0
    doc_freq: Mapping[str, int] = None  # type: ignore[assignment]
    uniform: bool = False

    def idf(self, token: str) -> float:
        if self.uniform:
            return 1.0
        df = self.doc_freq.get(token, 0) if self.doc_freq else 0
        return math.log((1 + self.n_docs) / (1 + df)) + 1.0


def uniform_idf() -> IdfTable:
    return IdfTable(n_docs=0, doc_freq={}, uniform=True)


def build_idf(dataset: Dataset) -> IdfTable:
    """Document frequencies where each instance's context is one document."""
    doc_freq: dict[str, int] = {}
    for inst in dataset:
        for token in set(t for t, _, _ in tokenize(inst.context)):
            doc_freq[token] = doc_freq.get(token, 0) + 1
    return IdfTable(n_docs=len(dataset.instances), doc_freq=doc_freq)


def predict(instance: Instance, config: BaselineConfig, idf_table: IdfTable) -> Prediction:
    """Apply the frozen scoring rule to one instance."""
    config.validate()
    q_tokens = [t for t, _, _ in tokenize(instance.question)]
    q_all = set(q_tokens)
    if instance.subject_entity:
        q_all.update(t for t, _, _ in tokenize(instance.subject_entity))
    q_content = q_all - STOP_WORDS
    if not q_content:
        return Prediction(instance.id, None)

    context_tokens = tokenize(instance.context)
    best: tuple[float, int, int] | None = None  # (score, char_start, char_end)
    for boundary in segment_sentences(instance.context):
        sentence_tokens = [
            t for t in context_tokens if boundary.start <= t[1] and t[2] <= boundary.end
        ]
        sentence_types = {t for t, _, _ in sentence_tokens}
        overlap = q_content & sentence_types
        if not overlap:
            continue
        sentence_score = sum(idf_table.idf(w) for w in sorted(overlap))
        # Maximal runs of tokens outside q_all; spans never contain question terms.
        runs: list[list[int]] = []
        current: list[int] = []
        for pos, (token, _, _) in enumerate(sentence_tokens):
            if token in q_all:
                if current:
                    runs.append(current)
                    current = []
            else:
                current.append(pos)
        if current:
            runs.append(current)
        for run in runs:
            for a in range(len(run)):
                credit = 0.0
                seen: set[str] = set()
                for b in range(a, min(a + config.max_span_tokens, len(run))):
                    token = sentence_tokens[run[b]][0]
                    if token not in seen and token not in STOP_WORDS:
                        credit += idf_table.idf(token)
                        seen.add(token)
                    adjacency = 0.0
                    before = run[a] - 1
                    after = run[b] + 1
                    if before >= 0 and sentence_tokens[before][0] in q_content:
                        adjacency += 0.25 * idf_table.idf(sentence_tokens[before][0])
                    if after < len(sentence_tokens) and sentence_tokens[after][0] in q_content:
                        adjacency += 0.25 * idf_table.idf(sentence_tokens[after][0])
                    score = sentence_score + credit + adjacency
                    char_start = sentence_tokens[run[a]][1]
                    char_end = sentence_tokens[run[b]][2]
                    if (
                        best is None
                        or score > best[0]
                        or (score == best[0] and char_start < best[1])
                        or (score == best[0] and char_start == best[1] and char_end < best[2])
                    ):
                        best = (score, char_start, char_end)
    if best is None or best[0] < config.no_answer_threshold:
        return Prediction(instance.id, None)
    return Prediction(instance.id, instance.context[best[1] : best[2]])


def predict_dataset(
    dataset: Dataset, config: BaselineConfig, idf_table: IdfTable | None = None
) -> list[Prediction]:
    """Predict every instance; the idf table is shared and read-only."""
    config.validate()
    if idf_table is None:
        idf_table = uniform_idf() if config.idf_source == "uniform" else build_idf(dataset)
    return [predict(inst, config, idf_table) for inst in dataset]
