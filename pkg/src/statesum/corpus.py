"""Corpus ingestion, few-shot split sampling, and label/prediction file I/O.

The loader reads the raw multi-domain Wizard-of-Oz archives (versions 2.0 and
2.1): a ``data.json`` with per-turn belief annotations plus the published
dev/test id lists. Only the five supported domains are kept; slot names are
normalized to ``"<domain>-<slot>"`` and values to the converter's conventions.
"""

from __future__ import annotations

import json
import logging
import math
import os
import random
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .destate import reserved_collisions
from .errors import CorpusError, ProtocolError
from .ontology import DONTCARE, DialogueState, Ontology, TemplateConfig
from .summarize import synthesize_labels

log = logging.getLogger(__name__)

SUPPORTED_VERSIONS = ("2.0", "2.1")
SUPPORTED_DOMAINS = ("attraction", "hotel", "restaurant", "taxi", "train")
RATIOS = (0.01, 0.05, 0.10, 1.00)
MODES = ("cross_domain", "cross_task", "multi_domain")

_MODE_ALIASES = {"cd": "cross_domain", "ct": "cross_task", "md": "multi_domain"}

_NONE_VALUES = {"", "none", "not mentioned", "not-mentioned"}
_DONTCARE_VALUES = {
    "dontcare", "dont care", "don't care", "do n't care", "do not care",
    "doesnt care", "doesn't care",
}
_SLOT_ALIASES = {"leave at": "leaveat", "arrive by": "arriveby", "price range": "pricerange"}


@dataclass
class Turn:
    """One user turn with the cumulative belief state after it."""

    index: int
    user_utterance: str
    system_utterance: str
    state: DialogueState
    history_text: str


@dataclass
class Dialogue:
    dialogue_id: str
    turns: list[Turn]
    domains: frozenset[str]


@dataclass
class Corpus:
    version: str
    splits: dict[str, list[Dialogue]]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def train(self) -> list[Dialogue]:
        return self.splits.get("train", [])

    def dialogue_map(self) -> dict[str, Dialogue]:
        return {d.dialogue_id: d for split in self.splits.values() for d in split}

    def turn_map(self) -> dict[tuple[str, int], Turn]:
        return {
            (d.dialogue_id, t.index): t
            for split in self.splits.values()
            for d in split
            for t in d.turns
        }


@dataclass
class FewShotSplit:
    """A deterministic few-shot sampling of training dialogues."""

    mode: str
    target_domain: str | None
    ratio: float
    seed: int
    pretrain_ids: list[str]
    finetune_ids: list[str]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "target_domain": self.target_domain,
            "ratio": self.ratio,
            "seed": self.seed,
            "n_pretrain": len(self.pretrain_ids),
            "n_finetune": len(self.finetune_ids),
            "pretrain_ids": self.pretrain_ids,
            "finetune_ids": self.finetune_ids,
        }


@dataclass
class PredictionRecord:
    """One model output, joined to a corpus turn by (dialogue_id, turn_index)."""

    dialogue_id: str
    turn_index: int
    predicted_summary: str
    predicted_state: DialogueState | None = None


def write_atomic(path: str | Path, text: str) -> None:
    """Write a small text file via temp + rename so readers never see a partial."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, "utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


# -- raw archive loading -----------------------------------------------------


def normalize_raw_value(raw, slot_name: str = "") -> str | None:
    """Map a raw annotation value to a stored value, or None for absence."""
    if isinstance(raw, list):
        raw = raw[0] if raw else ""
    if not isinstance(raw, str):
        return None
    value = " ".join(raw.replace(",", "").replace(".", "").lower().split())
    if value in _NONE_VALUES:
        return None
    if value in _DONTCARE_VALUES:
        return DONTCARE
    if slot_name in ("hotel-parking", "hotel-internet") and value == "free":
        return "yes"
    return value or None


def _state_from_metadata(metadata: dict) -> DialogueState:
    state: DialogueState = {}
    for domain in SUPPORTED_DOMAINS:
        annotation = metadata.get(domain)
        if not isinstance(annotation, dict):
            continue
        for raw_key, raw_value in (annotation.get("semi") or {}).items():
            key = str(raw_key).lower()
            key = _SLOT_ALIASES.get(key, key)
            slot_name = f"{domain}-{key}"
            value = normalize_raw_value(raw_value, slot_name)
            if value is not None:
                state[slot_name] = value
        for raw_key, raw_value in (annotation.get("book") or {}).items():
            if raw_key == "booked":
                continue
            key = str(raw_key).lower()
            slot_name = f"{domain}-book {key}"
            value = normalize_raw_value(raw_value, slot_name)
            if value is not None:
                state[slot_name] = value
    return state


def _goal_domains(goal: dict) -> frozenset[str]:
    return frozenset(d for d in SUPPORTED_DOMAINS if goal.get(d))


def _build_dialogue(dialogue_id: str, raw: dict) -> Dialogue:
    goal = raw.get("goal")
    logturns = raw.get("log")
    if not isinstance(goal, dict) or not isinstance(logturns, list) or not logturns:
        raise CorpusError("missing goal or log")
    if len(logturns) % 2 != 0:
        raise CorpusError(f"odd number of log entries ({len(logturns)})")

    turns = []
    history_lines: list[str] = []
    for index in range(len(logturns) // 2):
        user = logturns[2 * index]
        system_reply = logturns[2 * index + 1]
        if "text" not in user or "text" not in system_reply:
            raise CorpusError(f"turn {index}: log entry without text")
        previous_system = logturns[2 * index - 1]["text"] if index > 0 else ""
        history_lines.append(f"system: {previous_system}")
        history_lines.append(f"user: {user['text']}")
        turns.append(
            Turn(
                index=index,
                user_utterance=user["text"],
                system_utterance=previous_system,
                state=_state_from_metadata(system_reply.get("metadata") or {}),
                history_text="\n".join(history_lines),
            )
        )
    return Dialogue(
        dialogue_id=dialogue_id, turns=turns, domains=_goal_domains(goal)
    )


def _read_archive(path: Path) -> tuple[dict, list[str], list[str]]:
    """Return (raw data, dev ids, test ids) from a directory or zip archive."""

    def parse_list(text: str) -> list[str]:
        return [line.strip() for line in text.splitlines() if line.strip()]

    if path.is_dir():
        candidates = {p.name: p for p in sorted(path.rglob("*")) if p.is_file()}
        required = _locate(candidates.keys())
        data = json.loads(candidates[required["data"]].read_text("utf-8"))
        dev = parse_list(candidates[required["val"]].read_text("utf-8"))
        test = parse_list(candidates[required["test"]].read_text("utf-8"))
        return data, dev, test
    if zipfile.is_zipfile(path):
        with zipfile.ZipFile(path) as archive:
            members = {os.path.basename(n): n for n in archive.namelist() if os.path.basename(n)}
            required = _locate(members.keys())
            data = json.loads(archive.read(members[required["data"]]).decode("utf-8"))
            dev = parse_list(archive.read(members[required["val"]]).decode("utf-8"))
            test = parse_list(archive.read(members[required["test"]]).decode("utf-8"))
            return data, dev, test
    raise CorpusError(f"{path}: not a corpus directory or zip archive")


def _locate(names) -> dict[str, str]:
    found = {}
    for name in names:
        lower = name.lower()
        if lower == "data.json":
            found["data"] = name
        elif lower.startswith("vallistfile"):
            found["val"] = name
        elif lower.startswith("testlistfile"):
            found["test"] = name
    missing = [k for k in ("data", "val", "test") if k not in found]
    if missing:
        raise CorpusError(f"archive is missing file(s): {', '.join(missing)}")
    return found


def load_multiwoz(path: str | Path, version: str = "2.1") -> Corpus:
    """Load a raw archive into per-split dialogues with normalized states.

    Dialogues annotated only with unsupported domains are dropped; malformed
    records are skipped and counted in the corpus diagnostics.
    """
    if version not in SUPPORTED_VERSIONS:
        raise CorpusError(f"unsupported version {version!r}; expected one of {SUPPORTED_VERSIONS}")
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"{path}: no such file or directory")
    data, dev_ids, test_ids = _read_archive(path)

    diagnostics: list[str] = []
    splits: dict[str, list[Dialogue]] = {"train": [], "dev": [], "test": []}
    dev_set, test_set = set(dev_ids), set(test_ids)
    dropped = 0
    for dialogue_id, raw in data.items():
        try:
            dialogue = _build_dialogue(dialogue_id, raw)
        except CorpusError as exc:
            diagnostics.append(f"{dialogue_id}: skipped ({exc})")
            continue
        if not dialogue.domains:
            dropped += 1
            continue
        if dialogue_id in test_set:
            splits["test"].append(dialogue)
        elif dialogue_id in dev_set:
            splits["dev"].append(dialogue)
        else:
            splits["train"].append(dialogue)
    if dropped:
        diagnostics.append(f"dropped {dropped} dialogues with no supported domain")
    log.info(
        "loaded %s: train=%d dev=%d test=%d (%d diagnostics)",
        path, len(splits["train"]), len(splits["dev"]), len(splits["test"]),
        len(diagnostics),
    )
    return Corpus(version=version, splits=splits, diagnostics=diagnostics)


def domain_counts(dialogues: list[Dialogue]) -> dict[str, tuple[int, int]]:
    """Per domain: (single-domain dialogues, dialogues containing the domain)."""
    counts = {}
    for domain in SUPPORTED_DOMAINS:
        total = sum(1 for d in dialogues if domain in d.domains)
        single = sum(1 for d in dialogues if d.domains == frozenset([domain]))
        counts[domain] = (single, total)
    return counts


# -- few-shot sampling ---------------------------------------------------------


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sample_fewshot(
    corpus: Corpus,
    mode: str,
    target_domain: str | None = None,
    ratio: float = 0.01,
    seed: int = 0,
    single_domain_only: bool = False,
) -> FewShotSplit:
    """Sample fine-tuning dialogues by a deterministic seeded shuffle.

    Eligible dialogues are those containing the target domain (cross-domain
    and cross-task modes) or the whole training set (multi-domain mode);
    cross-domain additionally keeps every non-target dialogue for pretraining.
    ``single_domain_only`` restricts the target pool to dialogues annotated
    with the target domain alone.
    """
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ProtocolError(f"unknown mode {mode!r}")
    if not any(math.isclose(ratio, r) for r in RATIOS):
        raise ProtocolError(f"ratio {ratio} is not one of {RATIOS}")
    if mode == "multi_domain":
        if target_domain is not None:
            raise ProtocolError("multi_domain mode takes no target domain")
        if single_domain_only:
            raise ProtocolError("single_domain_only needs a target domain")
    else:
        if target_domain not in SUPPORTED_DOMAINS:
            raise ProtocolError(f"target domain required, one of {SUPPORTED_DOMAINS}")

    train = corpus.train
    if mode == "multi_domain":
        eligible = list(train)
        pretrain_ids: list[str] = []
    else:
        wanted = frozenset([target_domain])
        eligible = [
            d for d in train
            if (d.domains == wanted if single_domain_only else target_domain in d.domains)
        ]
        pretrain_ids = (
            [d.dialogue_id for d in train if target_domain not in d.domains]
            if mode == "cross_domain"
            else []
        )
    if not eligible:
        raise ProtocolError(f"no eligible dialogues for {mode}/{target_domain}")

    size = _round_half_up(ratio * len(eligible))
    ids = [d.dialogue_id for d in eligible]
    random.Random(seed).shuffle(ids)
    return FewShotSplit(
        mode=mode,
        target_domain=target_domain,
        ratio=ratio,
        seed=seed,
        pretrain_ids=pretrain_ids,
        finetune_ids=ids[:size],
    )


# -- training-label export -----------------------------------------------------


def export_training_file(
    split: FewShotSplit,
    corpus: Corpus,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
    out: str | Path = "train.jsonl",
    diagnostics: list[str] | None = None,
) -> int:
    """Write one JSONL record per turn of the split's dialogues.

    Turns whose state embeds a reserved template phrase cannot survive the
    round trip; they are skipped and reported rather than written corrupted.
    Returns the number of records written; on failure no partial file is left.
    """
    diags = diagnostics if diagnostics is not None else []
    by_id = corpus.dialogue_map()
    roles = {did: "pretrain" for did in split.pretrain_ids}
    roles.update({did: "finetune" for did in split.finetune_ids})
    missing = sorted(did for did in roles if did not in by_id)
    if missing:
        raise CorpusError(f"split references unknown dialogues: {', '.join(missing[:5])}")

    out = Path(out)
    tmp = out.with_name(out.name + ".tmp")
    written = 0
    try:
        with open(tmp, "w", encoding="utf-8") as handle:
            for dialogue_id in sorted(roles):
                dialogue = by_id[dialogue_id]
                labels = dict(synthesize_labels(dialogue, ontology, cfg, split.seed))
                for turn in dialogue.turns:
                    collisions = reserved_collisions(turn.state, ontology)
                    if collisions:
                        diags.append(
                            f"{dialogue_id}/{turn.index}: skipped, {'; '.join(collisions)}"
                        )
                        continue
                    record = {
                        "dialogue_id": dialogue_id,
                        "turn_index": turn.index,
                        "split_role": roles[dialogue_id],
                        "history": turn.history_text,
                        "gold_summary": labels[turn.index],
                        "gold_state": dict(turn.state),
                    }
                    handle.write(json.dumps(record, ensure_ascii=False) + "\n")
                    written += 1
        os.replace(tmp, out)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    if diags:
        log.info("export skipped %d turns with reserved-phrase collisions", len(diags))
    return written


# -- prediction files ------------------------------------------------------------


def load_predictions(
    path: str | Path,
    diagnostics: list[str] | None = None,
) -> list[PredictionRecord]:
    """Read {dialogue_id, turn_index, predicted_summary} JSONL records.

    Duplicate (dialogue_id, turn_index) keys keep the last record and emit a
    diagnostic; a missing field raises with its line number.
    """
    diags = diagnostics if diagnostics is not None else []
    records: dict[tuple[str, int], PredictionRecord] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON ({exc})") from exc
            for key in ("dialogue_id", "turn_index", "predicted_summary"):
                if key not in payload:
                    raise CorpusError(f"line {line_no}: missing {key!r}")
            record = PredictionRecord(
                dialogue_id=str(payload["dialogue_id"]),
                turn_index=int(payload["turn_index"]),
                predicted_summary=str(payload["predicted_summary"]),
            )
            key = (record.dialogue_id, record.turn_index)
            if key in records:
                diags.append(f"line {line_no}: duplicate record for {key}, last wins")
            records[key] = record
    return list(records.values())
