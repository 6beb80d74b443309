"""Scoring: joint goal accuracy, slot accuracies, BLEU-4, ROUGE-n, error taxonomy.

All scores are fractions in [0, 1]. Joint goal accuracy counts a turn correct
only when the predicted state set-equals the gold state; the per-domain
variant restricts both states to one domain's slots before comparing.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corpus import Corpus, PredictionRecord, load_predictions, write_atomic
from .destate import StateExtractor
from .errors import EvaluationError
from .ontology import DialogueState, Ontology, TemplateConfig
from .summarize import state_to_summary

ERROR_KINDS = ("hallucination", "missing_slot", "wrong_slot")

_BLEU_EPS = 1e-9


@dataclass(frozen=True)
class ErrorRecord:
    """One classified mismatch between a predicted and a gold state.

    ``wrong_slot`` names the gold slot whose value landed under a different
    predicted slot of the same value kind in the same domain; the other two
    kinds carry only the side of the pair that exists.
    """

    kind: str
    slot_name: str
    predicted_value: str | None = None
    gold_value: str | None = None
    predicted_slot: str | None = None


@dataclass
class Report:
    """Aggregated scores for one prediction run."""

    n_turns: int
    n_parses: int
    all_domain_jga: float
    per_domain_jga: dict[str, float]
    slot_true_acc: float
    slot_none_acc: float
    bleu4: float
    rouge_n_f1: dict[int, float]
    error_counts: dict[str, int]
    gold_summary_domain_order: str = "canonical"
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_turns": self.n_turns,
            "n_parses": self.n_parses,
            "all_domain_jga": self.all_domain_jga,
            "per_domain_jga": dict(self.per_domain_jga),
            "slot_true_acc": self.slot_true_acc,
            "slot_none_acc": self.slot_none_acc,
            "bleu4": self.bleu4,
            "rouge_n_f1": {str(n): v for n, v in self.rouge_n_f1.items()},
            "error_counts": dict(self.error_counts),
            "gold_summary_domain_order": self.gold_summary_domain_order,
            "n_diagnostics": len(self.diagnostics),
        }

    def save(self, path: str | Path) -> None:
        write_atomic(path, json.dumps(self.to_dict(), indent=2) + "\n")


# -- state-level metrics -------------------------------------------------------


def _restrict(state: DialogueState, domain: str) -> DialogueState:
    prefix = domain + "-"
    return {k: v for k, v in state.items() if k.startswith(prefix)}


def joint_goal_accuracy(
    pairs: list[tuple[DialogueState, DialogueState]],
    domain_filter: str | None = None,
) -> float:
    """Fraction of (predicted, gold) pairs that match exactly as sets."""
    if not pairs:
        raise ValueError("joint goal accuracy is undefined for zero turns")
    correct = 0
    for predicted, gold in pairs:
        if domain_filter is not None:
            predicted = _restrict(predicted, domain_filter)
            gold = _restrict(gold, domain_filter)
        correct += predicted == gold
    return correct / len(pairs)


def slot_accuracy(
    pairs: list[tuple[DialogueState, DialogueState]],
    ontology: Ontology,
) -> tuple[float, float]:
    """(active-slot accuracy, absent-slot accuracy) over the full slot universe."""
    if not pairs:
        raise ValueError("slot accuracy is undefined for zero turns")
    slots = [spec.slot_name for spec in ontology.all_slots()]
    true_hit = true_total = none_hit = none_total = 0
    for predicted, gold in pairs:
        for slot in slots:
            if slot in gold:
                true_total += 1
                true_hit += predicted.get(slot) == gold[slot]
            else:
                none_total += 1
                none_hit += slot not in predicted
    true_acc = true_hit / true_total if true_total else 1.0
    none_acc = none_hit / none_total if none_total else 1.0
    return true_acc, none_acc


# -- n-gram overlap metrics ------------------------------------------------------


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    if n == 1:
        return Counter(tokens)
    return Counter(zip(*(tokens[i:] for i in range(n))))


def _clipped_overlap(cand_counts: Counter, ref_counts: Counter) -> int:
    if cand_counts == ref_counts:
        return sum(cand_counts.values())
    return sum(min(c, ref_counts[g]) for g, c in cand_counts.items())


class _BleuTally:
    """Running corpus-level BLEU statistics over (candidate, reference) pairs."""

    def __init__(self):
        self.clipped = [0, 0, 0, 0]
        self.totals = [0, 0, 0, 0]
        self.cand_len = 0
        self.ref_len = 0

    def add(self, cand_grams: dict[int, Counter], ref_grams: dict[int, Counter],
            cand_len: int, ref_len: int) -> None:
        self.cand_len += cand_len
        self.ref_len += ref_len
        for n in range(1, 5):
            self.totals[n - 1] += max(cand_len - n + 1, 0)
            self.clipped[n - 1] += _clipped_overlap(cand_grams[n], ref_grams[n])

    def score(self) -> float:
        if self.cand_len == 0:
            return 0.0
        log_precision = 0.0
        for clipped, total in zip(self.clipped, self.totals):
            numerator = clipped if clipped > 0 else _BLEU_EPS
            log_precision += 0.25 * math.log(numerator / (total if total > 0 else 1))
        brevity = 1.0 if self.cand_len > self.ref_len else math.exp(
            1.0 - self.ref_len / self.cand_len
        )
        return brevity * math.exp(log_precision)


def bleu4(candidates: list[str], references: list[str]) -> float:
    """Corpus-level BLEU with 4-gram precisions, uniform weights, and brevity
    penalty; zero n-gram counts are smoothed with an epsilon numerator."""
    if len(candidates) != len(references):
        raise ValueError("candidates and references must have equal length")
    if not candidates:
        raise ValueError("BLEU is undefined for an empty corpus")
    tally = _BleuTally()
    for candidate, reference in zip(candidates, references):
        cand_tokens = candidate.split()
        ref_tokens = reference.split()
        tally.add(
            {n: _ngram_counts(cand_tokens, n) for n in range(1, 5)},
            {n: _ngram_counts(ref_tokens, n) for n in range(1, 5)},
            len(cand_tokens),
            len(ref_tokens),
        )
    return tally.score()


def _rouge_from_counts(cand_counts: Counter, ref_counts: Counter) -> float:
    cand_total = sum(cand_counts.values())
    ref_total = sum(ref_counts.values())
    if cand_total == 0 or ref_total == 0:
        return 1.0 if cand_counts == ref_counts else 0.0
    matched = _clipped_overlap(cand_counts, ref_counts)
    if matched == 0:
        return 0.0
    precision = matched / cand_total
    recall = matched / ref_total
    return 2 * precision * recall / (precision + recall)


def rouge_n_f1(candidate: str, reference: str, n: int) -> float:
    """F1 of clipped n-gram overlap; whitespace tokens after lowercasing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _rouge_from_counts(
        _ngram_counts(candidate.lower().split(), n),
        _ngram_counts(reference.lower().split(), n),
    )


# -- error taxonomy -------------------------------------------------------------


def _slot_order(ontology: Ontology, slot_name: str) -> tuple[int, int]:
    try:
        spec = ontology.slot(slot_name)
    except KeyError:
        return (len(ontology.domains), 0)
    return (list(ontology.domains).index(spec.domain), spec.canonical_position)


def classify_errors(
    predicted: DialogueState,
    gold: DialogueState,
    ontology: Ontology,
) -> list[ErrorRecord]:
    """Partition the differing slots of a (predicted, gold) pair.

    Slots present only in the prediction are hallucinations; slots present
    only in the gold are missing, except that a missing gold value found under
    a same-kind, same-domain predicted slot collapses into one wrong_slot
    record. A slot present on both sides with different values counts as a
    hallucinated value. Every differing slot lands in exactly one record.
    """
    order = lambda name: _slot_order(ontology, name)
    pred_only = sorted((s for s in predicted if s not in gold), key=order)
    gold_only = sorted((s for s in gold if s not in predicted), key=order)
    value_conflicts = sorted(
        (s for s in predicted if s in gold and predicted[s] != gold[s]), key=order
    )

    def kind_of(slot_name: str) -> tuple[str, str]:
        spec = ontology.slot(slot_name)
        return (spec.domain, spec.value_kind)

    records = []
    consumed: set[str] = set()
    for gold_slot in gold_only:
        match = next(
            (
                pred_slot
                for pred_slot in pred_only
                if pred_slot not in consumed
                and ontology.has_slot(pred_slot)
                and ontology.has_slot(gold_slot)
                and kind_of(pred_slot) == kind_of(gold_slot)
                and predicted[pred_slot] == gold[gold_slot]
            ),
            None,
        )
        if match is not None:
            consumed.add(match)
            records.append(
                ErrorRecord(
                    kind="wrong_slot",
                    slot_name=gold_slot,
                    predicted_value=predicted[match],
                    gold_value=gold[gold_slot],
                    predicted_slot=match,
                )
            )
        else:
            records.append(
                ErrorRecord(kind="missing_slot", slot_name=gold_slot, gold_value=gold[gold_slot])
            )
    for pred_slot in pred_only:
        if pred_slot not in consumed:
            records.append(
                ErrorRecord(
                    kind="hallucination",
                    slot_name=pred_slot,
                    predicted_value=predicted[pred_slot],
                )
            )
    for slot_name in value_conflicts:
        records.append(
            ErrorRecord(
                kind="hallucination",
                slot_name=slot_name,
                predicted_value=predicted[slot_name],
            )
        )
    return records


# -- whole-run evaluation ---------------------------------------------------------


def evaluate_run(
    predictions_path: str | Path,
    corpus: Corpus,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
    out: str | Path | None = None,
    diagnostics_out: str | Path | None = None,
) -> Report:
    """Parse and score a prediction file against the corpus gold states.

    Each predicted summary is parsed exactly once. Gold summaries (for the
    text-overlap metrics) are synthesized with canonical domain order, which
    the report records.
    """
    diagnostics: list[str] = []
    records: list[PredictionRecord] = load_predictions(predictions_path, diagnostics)
    turns = corpus.turn_map()
    unmatched = sorted(
        f"{r.dialogue_id}/{r.turn_index}"
        for r in records
        if (r.dialogue_id, r.turn_index) not in turns
    )
    if unmatched:
        raise EvaluationError(
            f"{len(unmatched)} predictions do not join to corpus turns: "
            + ", ".join(unmatched[:10])
        )

    extractor = StateExtractor(ontology)
    gold_cfg = replace(cfg, domain_order="canonical")
    pairs = []
    bleu_tally = _BleuTally()
    rouge_sums = {1: 0.0, 2: 0.0, 4: 0.0}
    jga_hits = 0
    domain_hits = {domain: 0 for domain in ontology.domains}
    error_counts = Counter({kind: 0 for kind in ERROR_KINDS})
    per_turn_diagnostics = []

    def by_domain(state: DialogueState) -> dict[str, dict]:
        grouped: dict[str, dict] = {domain: {} for domain in domain_hits}
        for slot, value in state.items():
            grouped.setdefault(slot.split("-", 1)[0], {})[slot] = value
        return grouped

    records.sort(key=lambda r: (r.dialogue_id, r.turn_index))
    for record in records:
        turn = turns[(record.dialogue_id, record.turn_index)]
        parsed = extractor.parse(record.predicted_summary, cfg)
        record.predicted_state = parsed.state
        gold_summary = state_to_summary(turn.state, ontology, gold_cfg)

        pairs.append((parsed.state, turn.state))
        if parsed.state == turn.state:
            jga_hits += 1
            for domain in domain_hits:
                domain_hits[domain] += 1
        else:
            predicted_grouped = by_domain(parsed.state)
            gold_grouped = by_domain(turn.state)
            for domain in domain_hits:
                domain_hits[domain] += predicted_grouped[domain] == gold_grouped[domain]

        cand_tokens = record.predicted_summary.split()
        cand_grams = {n: _ngram_counts(cand_tokens, n) for n in range(1, 5)}
        if record.predicted_summary == gold_summary:
            ref_tokens, ref_grams = cand_tokens, cand_grams
        else:
            ref_tokens = gold_summary.split()
            ref_grams = {n: _ngram_counts(ref_tokens, n) for n in range(1, 5)}
        bleu_tally.add(cand_grams, ref_grams, len(cand_tokens), len(ref_tokens))
        cand_lower = record.predicted_summary.lower().split()
        cand_lower_grams = {n: _ngram_counts(cand_lower, n) for n in rouge_sums}
        if record.predicted_summary == gold_summary:
            ref_lower_grams = cand_lower_grams
        else:
            ref_lower = gold_summary.lower().split()
            ref_lower_grams = {n: _ngram_counts(ref_lower, n) for n in rouge_sums}
        for n in rouge_sums:
            rouge_sums[n] += _rouge_from_counts(cand_lower_grams[n], ref_lower_grams[n])

        for error in classify_errors(parsed.state, turn.state, ontology):
            error_counts[error.kind] += 1
        if parsed.diagnostics:
            per_turn_diagnostics.append(
                {
                    "dialogue_id": record.dialogue_id,
                    "turn_index": record.turn_index,
                    "diagnostics": parsed.diagnostics,
                }
            )
            diagnostics.extend(
                f"{record.dialogue_id}/{record.turn_index}: {d}" for d in parsed.diagnostics
            )

    if not pairs:
        raise EvaluationError("prediction file contains no records")

    true_acc, none_acc = slot_accuracy(pairs, ontology)
    report = Report(
        n_turns=len(pairs),
        n_parses=extractor.parses,
        all_domain_jga=jga_hits / len(pairs),
        per_domain_jga={d: hits / len(pairs) for d, hits in domain_hits.items()},
        slot_true_acc=true_acc,
        slot_none_acc=none_acc,
        bleu4=bleu_tally.score(),
        rouge_n_f1={n: rouge_sums[n] / len(pairs) for n in rouge_sums},
        error_counts=dict(error_counts),
        gold_summary_domain_order="canonical",
        diagnostics=diagnostics,
    )
    if out is not None:
        report.save(out)
    if diagnostics_out is not None:
        write_atomic(
            diagnostics_out,
            "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in per_turn_diagnostics),
        )
    return report
