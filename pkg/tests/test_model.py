import json

import pytest
from hypothesis import given, strategies as st

from slotqa import (
    DataError,
    Dataset,
    Instance,
    ParseError,
    Span,
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    load_dataset,
    read_instances,
    validate_dataset,
    write_dataset,
    write_instances,
)
from slotqa.model import sidecar_path

from helpers import make_dataset, make_instance


def test_negative_means_empty_answers():
    pos = make_instance()
    neg = make_instance(id="i1", answers=())
    assert not pos.is_negative()
    assert neg.is_negative()


def test_validate_clean_dataset():
    ds = make_dataset(make_instance(), make_instance(id="i1", answers=(), origin="squad_negative"))
    assert validate_dataset(ds) == []


def test_validate_span_text_mismatch():
    bad = make_instance(context="abc def", answers=((0, "def"),))
    violations = validate_dataset(make_dataset(bad))
    assert len(violations) == 1
    v = violations[0]
    assert v.instance_id == "i0"
    assert v.invariant == "span_matches_context"
    assert "def" in v.message


def test_validate_duplicate_ids():
    ds = make_dataset(make_instance(id="dup"), make_instance(id="dup"))
    invariants = [v.invariant for v in validate_dataset(ds)]
    assert "unique_ids" in invariants


def test_validate_polarity_both_directions():
    neg_with_answer = make_instance(id="a", origin="squad_negative")
    pos_without = make_instance(id="b", answers=(), origin="uwre_positive")
    invariants = {v.invariant for v in validate_dataset(make_dataset(neg_with_answer, pos_without))}
    assert "negative_origin_empty_answers" in invariants
    assert "positive_origin_nonempty_answers" in invariants


def test_validate_bad_enum_values():
    ds = make_dataset(
        make_instance(id="a", origin="mystery"),
        make_instance(id="b", split="validation"),
    )
    invariants = {v.invariant for v in validate_dataset(ds)}
    assert "origin_enum" in invariants
    assert "split_enum" in invariants


def test_validate_is_total_on_garbage_spans():
    # start far beyond the context must report, not raise
    ds = make_dataset(
        make_instance(id="a", context="ab", answers=((500, "zz"),)),
        make_instance(id="b", context="ab", answers=((-3, "a"),)),
        make_instance(id="c", context="ab", answers=((0, ""),), origin="squad_positive"),
    )
    invariants = {v.invariant for v in validate_dataset(ds)}
    assert "span_matches_context" in invariants
    assert "span_start_nonnegative" in invariants
    assert "span_text_nonempty" in invariants


def test_instance_dict_field_order_and_shape():
    d = instance_to_dict(make_instance(relation="place_of_birth", subject_entity="Obama"))
    assert list(d) == [
        "id",
        "question",
        "context",
        "answers",
        "relation",
        "subject_entity",
        "origin",
        "split",
    ]
    assert d["answers"] == [{"start": 28, "text": "Honolulu, Hawaii"}]


def test_instance_from_dict_rejects_unknown_and_missing_keys():
    good = instance_to_dict(make_instance())
    extra = dict(good, bogus=1)
    with pytest.raises(ParseError):
        instance_from_dict(extra)
    short = dict(good)
    del short["split"]
    with pytest.raises(ParseError):
        instance_from_dict(short)


def test_instance_from_dict_rejects_bool_start():
    d = instance_to_dict(make_instance(context="xab", answers=((1, "a"),)))
    d["answers"] = [{"start": True, "text": "a"}]
    with pytest.raises(ParseError):
        instance_from_dict(d)


def test_jsonl_roundtrip(tmp_path):
    ds = make_dataset(
        make_instance(relation="r", subject_entity="Obama"),
        make_instance(id="i1", answers=(), origin="challenge_negative", split="test"),
    )
    path = tmp_path / "x.jsonl"
    write_instances(ds.instances, path)
    back = read_instances(path)
    assert tuple(back) == ds.instances
    # LF endings, trailing newline, no BOM
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")
    assert not raw.startswith(b"\xef\xbb\xbf")


def test_jsonl_offsets_are_code_points(tmp_path):
    context = "a\U0001d11eb music"
    inst = make_instance(context=context, answers=((1, "\U0001d11e"),))
    assert validate_dataset(make_dataset(inst)) == []
    path = tmp_path / "u.jsonl"
    write_instances([inst], path)
    assert read_instances(path)[0].answers[0].start == 1


def test_read_instances_rejects_blank_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(dumps_instance(make_instance()) + "\n\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_instances(path)


def test_read_instances_rejects_non_object_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('["not", "an", "object"]\n', encoding="utf-8")
    with pytest.raises(ParseError):
        read_instances(path)


def test_dataset_sidecar_roundtrip(tmp_path):
    ds = Dataset(
        instances=(make_instance(),),
        name="demo",
        provenance_log=(
            {"operation": "ingest-squad", "parameters": {"split": "train"}, "seed": None},
        ),
        no_answer_token="NoAnswerFound",
    )
    path = tmp_path / "demo.jsonl"
    write_dataset(ds, path)
    assert sidecar_path(path).exists()
    back = load_dataset(path)
    assert back == ds


def test_load_dataset_without_sidecar_defaults(tmp_path):
    path = tmp_path / "plain.jsonl"
    write_instances([make_instance()], path)
    ds = load_dataset(path)
    assert ds.name == "plain"
    assert ds.provenance_log == ()
    assert ds.no_answer_token is None


def test_derive_appends_provenance():
    ds = make_dataset(make_instance(), name="base")
    out = ds.derive(ds.instances, "negativize", {"keep_positives": False})
    assert out.provenance_log[-1] == {
        "operation": "negativize",
        "parameters": {"keep_positives": False},
        "seed": None,
    }
    assert out.name == "base"


@st.composite
def valid_datasets(draw):
    n = draw(st.integers(min_value=0, max_value=6))
    instances = []
    for i in range(n):
        context = draw(st.text(min_size=1, max_size=30))
        answers = ()
        if draw(st.booleans()):
            start = draw(st.integers(min_value=0, max_value=len(context) - 1))
            end = draw(st.integers(min_value=start + 1, max_value=len(context)))
            answers = (Span(start, context[start:end]),)
        instances.append(
            Instance(
                id=f"i{i}",
                question=draw(st.text(max_size=20)),
                context=context,
                answers=answers,
                relation=draw(st.none() | st.text(min_size=1, max_size=8)),
                subject_entity=draw(st.none() | st.text(min_size=1, max_size=8)),
                origin="squad_positive" if answers else "squad_negative",
                split=draw(st.sampled_from(["train", "dev", "test"])),
            )
        )
    return Dataset(instances=tuple(instances), name=draw(st.text(max_size=10)))


@given(valid_datasets())
def test_serialization_roundtrip_property(ds):
    for inst in ds.instances:
        assert instance_from_dict(json.loads(dumps_instance(inst))) == inst
    assert validate_dataset(ds) == []
