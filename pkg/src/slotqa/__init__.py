"""slotqa: turn extractive QA data into KB slot-filling data and score it.

The toolkit converts between SQuAD-style QA and slot-filling formats,
builds negative and adversarial instances, mixes datasets under seeded
nested sampling, adapts datasets with a no-answer dummy token, and scores
predictions under slot-filling conventions. Everything is deterministic
under explicit seeds.
"""

from .baseline import BaselineConfig, IdfTable, build_idf, predict, predict_dataset, uniform_idf
from .challenge import build_challenge_set, build_uwre_plus, derive_seed
from .ingest import ingest_squad, ingest_uwre
from .metrics import (
    EvalReport,
    normalize_answer,
    score_challenge_accuracy,
    score_slot_filling,
)
from .mixer import MixSpec, mix, mix_files, sample_without_replacement
from .model import (
    Dataset,
    DataError,
    Instance,
    ParseError,
    Prediction,
    QuestionTemplate,
    RelationQuery,
    Span,
    TransformReport,
    Violation,
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    load_dataset,
    read_instances,
    read_predictions,
    validate_dataset,
    write_dataset,
    write_instances,
    write_predictions,
)
from .templates import PLACEHOLDER, instantiate, load_templates, save_templates
from .transforms import (
    DEFAULT_NO_ANSWER_TOKEN,
    SentenceBoundary,
    insert_no_answer_token,
    negativize_squad,
    segment_sentences,
    strip_no_answer_token,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "DataError",
    "Dataset",
    "DEFAULT_NO_ANSWER_TOKEN",
    "EvalReport",
    "IdfTable",
    "Instance",
    "MixSpec",
    "ParseError",
    "PLACEHOLDER",
    "Prediction",
    "QuestionTemplate",
    "RelationQuery",
    "SentenceBoundary",
    "Span",
    "TransformReport",
    "Violation",
    "build_challenge_set",
    "build_idf",
    "build_uwre_plus",
    "derive_seed",
    "dumps_instance",
    "ingest_squad",
    "ingest_uwre",
    "insert_no_answer_token",
    "instance_from_dict",
    "instance_to_dict",
    "instantiate",
    "load_dataset",
    "load_templates",
    "mix",
    "mix_files",
    "negativize_squad",
    "normalize_answer",
    "predict",
    "predict_dataset",
    "read_instances",
    "read_predictions",
    "sample_without_replacement",
    "save_templates",
    "score_challenge_accuracy",
    "score_slot_filling",
    "segment_sentences",
    "strip_no_answer_token",
    "uniform_idf",
    "validate_dataset",
    "write_dataset",
    "write_instances",
    "write_predictions",
]
