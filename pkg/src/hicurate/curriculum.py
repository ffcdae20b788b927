"""Deterministic two-stage easy-to-hard training schedule.

Stage 1 iterates the accepted subset (default 3 epochs), stage 2 the
rejected subset (default 5). Each epoch is an independent Fisher-Yates
shuffle from a sub-seed derived by SHA-256 over (seed, stage, epoch), so
schedules are reproducible from the seed alone.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ScheduleError


@dataclass
class Stage:
    subset: str  # "accept" | "reject"
    epochs: list[list[str]]


@dataclass
class CurriculumSchedule:
    seed: int
    stages: list[Stage]
    warnings: list[str] = field(default_factory=list)
    manifest_hashes: dict = field(default_factory=dict)

    @property
    def total_epochs(self) -> int:
        return sum(len(st.epochs) for st in self.stages)

    def to_json(self) -> str:
        obj = {
            "seed": self.seed,
            "stages": [{"subset": st.subset, "epochs": st.epochs}
                       for st in self.stages],
            "warnings": self.warnings,
            "manifest_hashes": self.manifest_hashes,
        }
        return json.dumps(obj, indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "CurriculumSchedule":
        obj = json.loads(text)
        return cls(seed=obj["seed"],
                   stages=[Stage(s["subset"], s["epochs"]) for s in obj["stages"]],
                   warnings=obj.get("warnings", []),
                   manifest_hashes=obj.get("manifest_hashes", {}))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def _epoch_rng(seed: int, stage: int, epoch: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}/{stage}/{epoch}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _shuffled(ids: list[str], rng: random.Random) -> list[str]:
    order = list(ids)
    rng.shuffle(order)  # Fisher-Yates
    return order


def build_schedule(accept_ids: list[str], reject_ids: list[str], seed: int,
                   epochs_stage1: int = 3, epochs_stage2: int = 5,
                   manifest_hashes: dict | None = None) -> CurriculumSchedule:
    """Emit the full schedule: stage-1 permutations of the accepted ids
    followed by stage-2 permutations of the rejected ids.

    An empty reject set yields a zero-epoch stage 2 plus a warning.
    """
    if not accept_ids:
        raise ScheduleError("accept set is empty")
    overlap = set(accept_ids) & set(reject_ids)
    if overlap:
        raise ScheduleError(f"accept/reject ids overlap: {sorted(overlap)}")
    if epochs_stage1 < 1 or epochs_stage2 < 0:
        raise ScheduleError("invalid epoch counts")

    warnings = []
    stage1 = Stage("accept", [
        _shuffled(accept_ids, _epoch_rng(seed, 1, e)) for e in range(epochs_stage1)])
    if reject_ids:
        stage2 = Stage("reject", [
            _shuffled(reject_ids, _epoch_rng(seed, 2, e)) for e in range(epochs_stage2)])
    else:
        stage2 = Stage("reject", [])
        warnings.append("reject set empty: stage 2 has zero epochs")
    return CurriculumSchedule(seed=seed, stages=[stage1, stage2],
                              warnings=warnings,
                              manifest_hashes=manifest_hashes or {})


def epoch_order(schedule: CurriculumSchedule, global_epoch_index: int) -> list[str]:
    """Stored permutation for one global epoch index across both stages."""
    if global_epoch_index < 0:
        raise ScheduleError(f"epoch index {global_epoch_index} out of range")
    offset = global_epoch_index
    for stage in schedule.stages:
        if offset < len(stage.epochs):
            return stage.epochs[offset]
        offset -= len(stage.epochs)
    raise ScheduleError(
        f"epoch index {global_epoch_index} out of range "
        f"(total {schedule.total_epochs})")
