import json
import random

import pytest

from slotqa import (
    DataError,
    MixSpec,
    ParseError,
    insert_no_answer_token,
    load_dataset,
    mix,
    mix_files,
    sample_without_replacement,
    write_dataset,
)
from slotqa.mixer import DEFAULT_SIZES
from slotqa.model import dumps_instance

from helpers import make_dataset, make_instance


def numbered(n, prefix="x"):
    return make_dataset(
        *[
            make_instance(id=f"{prefix}{i}", answers=(), origin="synthetic")
            for i in range(n)
        ],
        name=prefix,
    )


def spec_for(sizes, seed):
    return MixSpec(base="b", augment="a", seed=seed, sizes=tuple(sizes))


def test_sample_zero():
    out = sample_without_replacement(numbered(4), 0, seed=7)
    assert len(out) == 0


def test_sample_whole_dataset_keeps_order():
    ds = numbered(5)
    out = sample_without_replacement(ds, 5, seed=7)
    assert out.instances == ds.instances


def test_sample_oversized_request_truncates():
    ds = numbered(3)
    out = sample_without_replacement(ds, 10, seed=7)
    assert out.instances == ds.instances
    entry = out.provenance_log[-1]
    assert entry["parameters"]["truncated_to_population"] is True
    assert entry["parameters"]["taken"] == 3
    assert entry["seed"] == 7


def test_sample_rejects_negative_size():
    with pytest.raises(DataError):
        sample_without_replacement(numbered(3), -1, seed=0)


def test_sample_golden_selection_seed7():
    # pinned: random.Random(7).shuffle([0, 1, 2, 3]) -> [3, 1, 0, 2],
    # so the 2-prefix {3, 1} sorts to positions [1, 3]
    order = [0, 1, 2, 3]
    random.Random(7).shuffle(order)
    assert order == [3, 1, 0, 2]
    out = sample_without_replacement(numbered(4), 2, seed=7)
    assert [i.id for i in out.instances] == ["x1", "x3"]


def test_sample_selection_preserves_input_order():
    ds = numbered(50)
    out = sample_without_replacement(ds, 20, seed=11)
    ids = [int(i.id[1:]) for i in out.instances]
    assert ids == sorted(ids)
    assert len(set(ids)) == 20


def test_samples_nest_across_sizes():
    ds = numbered(100)
    for seed in (0, 1, 2, 40):
        previous: set = set()
        for k in (5, 20, 60, 100):
            chosen = {i.id for i in sample_without_replacement(ds, k, seed=seed)}
            assert previous <= chosen
            previous = chosen


def test_mix_names_and_sizes():
    base = numbered(20, "b")
    augment = numbered(40, "a")
    outputs = mix(spec_for((5, 10), seed=3), base, augment)
    assert [d.name for d in outputs] == ["b+a@5", "b+a@10"]
    assert [len(d) for d in outputs] == [25, 30]
    for d in outputs:
        assert [i.id for i in d.instances[:20]] == [f"b{i}" for i in range(20)]
        assert d.provenance_log[-1]["operation"] == "mix"
        assert d.provenance_log[-1]["seed"] == 3


def test_mix_default_sizes():
    assert DEFAULT_SIZES == (10**3, 10**4, 10**5, 10**6)


def test_mix_truncates_against_small_augment():
    outputs = mix(spec_for((10,), seed=0), numbered(4, "b"), numbered(6, "a"))
    assert len(outputs[0]) == 4 + 6
    assert outputs[0].provenance_log[-1]["parameters"]["truncated_to_population"] is True


def test_mix_nesting_across_outputs():
    base = numbered(3, "b")
    augment = numbered(200, "a")
    small, large = mix(spec_for((20, 100), seed=9), base, augment)
    assert {i.id for i in small} <= {i.id for i in large}


def test_mix_agrees_with_sample():
    base = numbered(3, "b")
    augment = numbered(30, "a")
    (out,) = mix(spec_for((12,), seed=21), base, augment)
    sampled = sample_without_replacement(augment, 12, seed=21)
    assert out.instances[3:] == sampled.instances


def test_mix_id_collision_is_fatal():
    base = numbered(5, "x")
    augment = numbered(5, "x")
    with pytest.raises(DataError) as exc:
        mix(spec_for((2,), seed=0), base, augment)
    assert "x0" in str(exc.value)


def test_mix_rejects_adaptation_mismatch():
    base, _ = insert_no_answer_token(numbered(3, "b"))
    augment = numbered(5, "a")
    with pytest.raises(DataError):
        mix(spec_for((2,), seed=0), base, augment)


def test_mix_same_token_propagates():
    base, _ = insert_no_answer_token(numbered(3, "b"))
    augment, _ = insert_no_answer_token(numbered(5, "a"))
    outputs = mix(spec_for((2,), seed=0), base, augment)
    assert outputs[0].no_answer_token == base.no_answer_token


def test_mixspec_validation():
    with pytest.raises(DataError):
        spec_for((0,), seed=1).validate()
    with pytest.raises(DataError):
        spec_for((10, 10), seed=1).validate()
    with pytest.raises(DataError):
        spec_for((10, 5), seed=1).validate()
    with pytest.raises(DataError):
        spec_for((), seed=1).validate()
    with pytest.raises(DataError):
        MixSpec(base="", augment="a", seed=1).validate()
    spec_for((5, 10), seed=1).validate()


def test_mixspec_from_json_file(tmp_path):
    path = tmp_path / "mix.json"
    path.write_text(
        json.dumps({"base": "b", "augment": "a", "sizes": [3, 7], "seed": 4}),
        encoding="utf-8",
    )
    spec = MixSpec.from_json_file(path)
    assert spec == MixSpec(base="b", augment="a", seed=4, sizes=(3, 7))

    path.write_text(json.dumps({"base": "b", "augment": "a", "seed": 4}), encoding="utf-8")
    assert MixSpec.from_json_file(path).sizes == DEFAULT_SIZES

    for bad in (
        {"base": "b", "augment": "a", "seed": 4, "bogus": 1},
        {"base": "b", "augment": "a", "sizes": [3]},
        {"base": "b", "augment": "a", "seed": True, "sizes": [3]},
        {"base": "b", "augment": "a", "seed": 4, "sizes": [3, "x"]},
    ):
        path.write_text(json.dumps(bad), encoding="utf-8")
        with pytest.raises(ParseError):
            MixSpec.from_json_file(path)

    path.write_text("not json", encoding="utf-8")
    with pytest.raises(ParseError):
        MixSpec.from_json_file(path)


def test_mix_files_matches_in_memory(tmp_path):
    base = numbered(7, "b")
    augment = numbered(23, "a")
    base_path = tmp_path / "base.jsonl"
    augment_path = tmp_path / "augment.jsonl"
    write_dataset(base, base_path)
    write_dataset(augment, augment_path)

    spec = spec_for((4, 11), seed=2)
    written = mix_files(spec, base_path, augment_path, tmp_path / "out")
    expected = mix(spec, base, augment)
    assert [name for name, _, _ in written] == ["b+a@4", "b+a@11"]
    for (name, path, report), ds in zip(written, expected):
        want = "".join(dumps_instance(i) + "\n" for i in ds.instances)
        assert path.read_text(encoding="utf-8") == want
        assert name == ds.name
        assert report.output_count == len(ds)
        loaded = load_dataset(path)
        assert loaded.name == ds.name
        assert loaded.instances == ds.instances


def test_mix_files_is_deterministic(tmp_path):
    base = numbered(5, "b")
    augment = numbered(50, "a")
    write_dataset(base, tmp_path / "base.jsonl")
    write_dataset(augment, tmp_path / "augment.jsonl")
    spec = spec_for((9,), seed=6)
    first = mix_files(spec, tmp_path / "base.jsonl", tmp_path / "augment.jsonl", tmp_path / "o1")
    second = mix_files(spec, tmp_path / "base.jsonl", tmp_path / "augment.jsonl", tmp_path / "o2")
    assert first[0][1].read_bytes() == second[0][1].read_bytes()


def test_mix_files_rejects_sidecar_mismatch(tmp_path):
    base, _ = insert_no_answer_token(numbered(3, "b"))
    augment = numbered(5, "a")
    write_dataset(base, tmp_path / "base.jsonl")
    write_dataset(augment, tmp_path / "augment.jsonl")
    with pytest.raises(DataError):
        mix_files(spec_for((2,), seed=0), tmp_path / "base.jsonl", tmp_path / "augment.jsonl", tmp_path / "o")


def test_mix_files_propagates_token_sidecar(tmp_path):
    base, _ = insert_no_answer_token(numbered(3, "b"))
    augment, _ = insert_no_answer_token(numbered(9, "a"))
    write_dataset(base, tmp_path / "base.jsonl")
    write_dataset(augment, tmp_path / "augment.jsonl")
    written = mix_files(spec_for((4,), seed=0), tmp_path / "base.jsonl", tmp_path / "augment.jsonl", tmp_path / "o")
    loaded = load_dataset(written[0][1])
    assert loaded.no_answer_token == base.no_answer_token
