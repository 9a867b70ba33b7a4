"""Seeded mixing of a base dataset with samples of an augmenting dataset.

Sampling is prefix-of-permutation: one permutation of the augment indices
is drawn from the seed, a sample of size n keeps the first n permuted
indices, and the kept instances are emitted in their original relative
order. Samples under the same seed are therefore nested: the sample at a
smaller size is a subset of the sample at any larger size.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .model import Dataset, DataError, ParseError, TransformReport, sidecar_path

DEFAULT_SIZES = (10**3, 10**4, 10**5, 10**6)


@dataclass(frozen=True)
class MixSpec:
    """Configuration of one mixing run; ``base`` and ``augment`` are names."""

    base: str
    augment: str
    seed: int
    sizes: tuple[int, ...] = DEFAULT_SIZES

    def validate(self) -> None:
        if not self.base or not self.augment:
            raise DataError("mix spec needs non-empty base and augment names")
        if not self.sizes:
            raise DataError("mix spec needs at least one size")
        if any(s <= 0 for s in self.sizes):
            raise DataError(f"mix sizes must be positive: {list(self.sizes)}")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise DataError(f"mix sizes must be strictly increasing: {list(self.sizes)}")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "MixSpec":
        with open(path, "r", encoding="utf-8") as f:
            try:
                obj = json.load(f)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}: invalid JSON: {e}") from e
        if not isinstance(obj, dict):
            raise ParseError(f"{path}: expected a JSON object")
        for key in ("base", "augment", "seed"):
            if key not in obj:
                raise ParseError(f"{path}: missing key {key!r}")
        if isinstance(obj["seed"], bool) or not isinstance(obj["seed"], int):
            raise ParseError(f"{path}: 'seed' must be an integer")
        sizes = obj.get("sizes", list(DEFAULT_SIZES))
        if not isinstance(sizes, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in sizes
        ):
            raise ParseError(f"{path}: 'sizes' must be an array of integers")
        unknown = set(obj) - {"base", "augment", "seed", "sizes"}
        if unknown:
            raise ParseError(f"{path}: unknown keys {sorted(unknown)}")
        spec = cls(
            base=str(obj["base"]),
            augment=str(obj["augment"]),
            seed=obj["seed"],
            sizes=tuple(sizes),
        )
        spec.validate()
        return spec


def _selection(population: int, n: int, seed: int) -> list[int]:
    """Ascending indices of the seeded sample; prefixes nest across n."""
    permutation = list(range(population))
    random.Random(seed).shuffle(permutation)
    return sorted(permutation[: min(n, population)])


def sample_without_replacement(dataset: Dataset, n: int, seed: int) -> Dataset:
    """A seeded uniform sample of n instances, in original relative order.

    Requests beyond the population return the whole dataset, recorded as a
    truncation in the provenance entry.
    """
    if n < 0:
        raise DataError(f"sample size must be non-negative, got {n}")
    population = len(dataset.instances)
    indices = _selection(population, n, seed)
    parameters: dict[str, Any] = {"n": n, "taken": len(indices)}
    if n > population:
        parameters["truncated_to_population"] = True
    return dataset.derive(
        [dataset.instances[i] for i in indices],
        "sample",
        parameters,
        seed=seed,
    )


def mix(spec: MixSpec, base: Dataset, augment: Dataset) -> list[Dataset]:
    """Concatenate the base with nested seeded samples of the augment.

    Emits one dataset per requested size k, named ``{base}+{augment}@{k}``
    and holding ``len(base) + min(k, len(augment))`` instances: all of the
    base followed by the sample, each side in original order.
    """
    spec.validate()
    base_ids = {inst.id for inst in base}
    colliding = sorted(base_ids & {inst.id for inst in augment})
    if colliding:
        raise DataError(
            f"{len(colliding)} instance ids occur in both base and augment: {colliding[:10]}"
        )
    if base.no_answer_token != augment.no_answer_token:
        raise DataError(
            "cannot mix datasets with different no-answer adaptations: "
            f"{base.no_answer_token!r} vs {augment.no_answer_token!r}"
        )
    population = len(augment.instances)
    outputs = []
    for k in spec.sizes:
        indices = _selection(population, k, spec.seed)
        instances = base.instances + tuple(augment.instances[i] for i in indices)
        parameters: dict[str, Any] = {
            "base": spec.base,
            "augment": spec.augment,
            "size": k,
            "taken": len(indices),
        }
        if k > population:
            parameters["truncated_to_population"] = True
        entry = {"operation": "mix", "parameters": parameters, "seed": spec.seed}
        outputs.append(
            Dataset(
                instances=instances,
                name=f"{spec.base}+{spec.augment}@{k}",
                provenance_log=base.provenance_log + (entry,),
                no_answer_token=base.no_answer_token,
            )
        )
    return outputs


def _scan_ids(path: str | Path) -> list[str]:
    """Instance ids of a JSONL file, one pass, without building instances."""
    ids = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                raise ParseError(f"{path}: line {lineno}: empty line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}: line {lineno}: invalid JSON: {e}") from e
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise ParseError(f"{path}: line {lineno}: missing string field 'id'")
            ids.append(obj["id"])
    return ids


def mix_files(
    spec: MixSpec,
    base_path: str | Path,
    augment_path: str | Path,
    out_dir: str | Path,
) -> list[tuple[str, Path, TransformReport]]:
    """Streaming variant of :func:`mix` for large files.

    Lines are copied verbatim, so inputs must already be canonical JSONL.
    Selection is identical to the in-memory mix under the same seed. Memory
    stays bounded by the id index and the permutation, never by instance
    objects.
    """
    spec.validate()
    base_path, augment_path = Path(base_path), Path(augment_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base_ids = set(_scan_ids(base_path))
    augment_ids = _scan_ids(augment_path)
    colliding = sorted(base_ids & set(augment_ids))
    if colliding:
        raise DataError(
            f"{len(colliding)} instance ids occur in both base and augment: {colliding[:10]}"
        )
    population = len(augment_ids)
    del augment_ids

    permutation = list(range(population))
    random.Random(spec.seed).shuffle(permutation)

    def _sidecar_meta(path: Path) -> dict:
        side = sidecar_path(path)
        if not side.exists():
            return {}
        with open(side, "r", encoding="utf-8") as f:
            return json.load(f)

    base_meta = _sidecar_meta(base_path)
    base_log = tuple(base_meta.get("provenance_log", ()))
    base_token = base_meta.get("no_answer_token")
    augment_token = _sidecar_meta(augment_path).get("no_answer_token")
    if base_token != augment_token:
        raise DataError(
            "cannot mix datasets with different no-answer adaptations: "
            f"{base_token!r} vs {augment_token!r}"
        )

    results = []
    for k in spec.sizes:
        taken = min(k, population)
        selected = bytearray(population)
        for index in permutation[:taken]:
            selected[index] = 1
        name = f"{spec.base}+{spec.augment}@{k}"
        out_path = out_dir / f"{name}.jsonl"
        with open(out_path, "w", encoding="utf-8", newline="\n") as out:
            with open(base_path, "r", encoding="utf-8") as f:
                for line in f:
                    out.write(line if line.endswith("\n") else line + "\n")
            with open(augment_path, "r", encoding="utf-8") as f:
                for i, line in enumerate(f):
                    if selected[i]:
                        out.write(line if line.endswith("\n") else line + "\n")
        parameters: dict[str, Any] = {
            "base": spec.base,
            "augment": spec.augment,
            "size": k,
            "taken": taken,
            "base_path": str(base_path),
            "augment_path": str(augment_path),
            "out": str(out_path),
        }
        if k > population:
            parameters["truncated_to_population"] = True
        entry = {"operation": "mix", "parameters": parameters, "seed": spec.seed}
        meta = {
            "name": name,
            "no_answer_token": base_token,
            "provenance_log": list(base_log) + [entry],
        }
        with open(sidecar_path(out_path), "w", encoding="utf-8", newline="\n") as f:
            json.dump(meta, f, ensure_ascii=False, indent=2)
            f.write("\n")
        report = TransformReport(
            operation="mix",
            input_count=len(base_ids) + population,
            output_count=len(base_ids) + taken,
            parameters=parameters,
        )
        results.append((name, out_path, report))
    return results
