"""State-to-summary rendering: turns slot-value maps into template summaries.

The renderer is a pure function of the state, the schema, and the template
configuration; all randomness (shuffled domain order) comes in through an
explicit seeded generator.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass

from .errors import StateValidationError
from .ontology import (
    DONTCARE,
    DialogueState,
    DomainSpec,
    Ontology,
    SlotSpec,
    TemplateConfig,
    article_for,
    validate_state,
)


@dataclass(frozen=True)
class ParaphrasePlan:
    """Subject phrases used to open sentences and join domains.

    The first sentence always opens with ``subject_variants[0]``; with
    paraphrasing on, later sentences alternate between the other two.
    """

    subject_variants: tuple[str, ...] = (
        "The user is looking for",
        "he is searching for",
        "he looks for",
    )
    plain_subject: str = "the user is looking for"
    conjunction: str = "Also,"
    dontcare_marker: str = "does not care about"
    pronoun: str = "he"
    plain_pronoun: str = "the user"

    def subject(self, position: int, paraphrasing: bool) -> str:
        if position == 0:
            return self.subject_variants[0]
        if not paraphrasing:
            return self.plain_subject
        return self.subject_variants[1 + (position - 1) % 2]

    def dontcare_pronoun(self, paraphrasing: bool) -> str:
        return self.pronoun if paraphrasing else self.plain_pronoun


DEFAULT_PLAN = ParaphrasePlan()


def render_slot_phrase(spec: SlotSpec, value: str) -> str:
    """Render one slot-value pair into its sentence phrase.

    Handles a/an articles, singular/plural unit words, and yes/no phrasing.
    Dontcare is a sentence-level suffix, not a phrase, so it is rejected here.
    """
    if value is None or value == DONTCARE:
        raise ValueError(f"{spec.slot_name}: dontcare/none has no slot phrase")
    if spec.is_boolean:
        if value == "yes":
            return spec.phrase_yes
        if value == "no":
            return spec.phrase_no
        raise ValueError(f"{spec.slot_name}: boolean slot takes yes/no, got {value!r}")
    fields = {"v": value}
    if "{a}" in spec.phrase_template:
        fields["a"] = article_for(value)
    if "{unit}" in spec.phrase_template:
        fields["unit"] = spec.unit_singular if value == "1" else spec.unit_plural
    return spec.phrase_template.format(**fields)


def _ordered_main_specs(domain: DomainSpec, partial: DialogueState) -> list[SlotSpec]:
    specs = [
        domain.slot(name)
        for name in partial
        if not domain.slot(name).clause and partial[name] != DONTCARE
    ]
    specs.sort(key=lambda s: s.canonical_position)
    # A fronted phrase ("which is an entertainment") jumps ahead of the rest
    # of the sentence when its value takes "an".
    fronted = [
        s for s in specs
        if s.front_when_an and article_for(partial[s.slot_name]) == "an"
    ]
    rest = [s for s in specs if s not in fronted]
    return fronted + rest


def render_domain_sentence(
    domain: DomainSpec,
    partial: DialogueState,
    cfg: TemplateConfig = TemplateConfig(),
    position: int = 0,
    plan: ParaphrasePlan = DEFAULT_PLAN,
) -> str:
    """Render one domain's slice of the state into a full sentence."""
    if not partial:
        raise ValueError("cannot render an empty domain state")
    for name in partial:
        try:
            domain.slot(name)
        except KeyError:
            raise ValueError(f"slot {name!r} does not belong to domain {domain.domain_name!r}")

    main = [
        render_slot_phrase(spec, partial[spec.slot_name])
        for spec in _ordered_main_specs(domain, partial)
    ]
    clause_specs = sorted(
        (
            domain.slot(name)
            for name in partial
            if domain.slot(name).clause and partial[name] != DONTCARE
        ),
        key=lambda s: s.canonical_position,
    )
    clauses = [render_slot_phrase(spec, partial[spec.slot_name]) for spec in clause_specs]
    dontcare_nouns = [
        spec.dontcare_noun
        for spec in sorted(
            (domain.slot(n) for n in partial if partial[n] == DONTCARE),
            key=lambda s: s.canonical_position,
        )
    ]

    body = domain.noun_phrase
    if main:
        body += " " + " ".join(main)
    if clauses:
        body += ", which " + " and ".join(clauses)

    subject = plan.subject(position, cfg.paraphrasing)
    if not dontcare_nouns:
        return f"{subject} {body}."

    pronoun = plan.dontcare_pronoun(cfg.paraphrasing)
    tail = f"{plan.dontcare_marker} " + " and ".join(dontcare_nouns)
    if cfg.dontcare_concat:
        return f"{subject} {body}, and {pronoun} {tail}."
    first = pronoun[0].upper() + pronoun[1:]
    return f"{subject} {body}. {first} {tail}."


def split_state_by_domain(state: DialogueState, ontology: Ontology) -> dict[str, DialogueState]:
    """Group a state into per-domain slices, in first-appearance order."""
    groups: dict[str, DialogueState] = {}
    for slot_name, value in state.items():
        groups.setdefault(ontology.domain_of(slot_name), {})[slot_name] = value
    return groups


def _domain_sequence(groups: dict[str, DialogueState], cfg, rng) -> list[str]:
    names = list(groups)
    if cfg.domain_order == "shuffled":
        (rng or random.Random(0)).shuffle(names)
    return names


def _unnatural_summary(groups: dict[str, DialogueState], order: list[str]) -> str:
    parts = []
    for domain_name in order:
        for slot_name, value in groups[domain_name].items():
            bare = slot_name.split("-", 1)[1]
            parts.append(f"{value} as {bare} of {domain_name}")
    return "The user wants " + ", ".join(parts) + "."


def state_to_summary(
    state: DialogueState,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
    rng: random.Random | None = None,
    plan: ParaphrasePlan = DEFAULT_PLAN,
) -> str:
    """Render a full state into a summary; the empty state renders as ""."""
    violations = validate_state(ontology, state)
    if violations:
        raise StateValidationError(violations)
    if not state:
        return ""

    groups = split_state_by_domain(state, ontology)
    order = _domain_sequence(groups, cfg, rng)
    if not cfg.naturalness:
        return _unnatural_summary(groups, order)

    sentences = [
        render_domain_sentence(ontology.domains[name], groups[name], cfg, position, plan)
        for position, name in enumerate(order)
    ]
    summary = sentences[0]
    for sentence in sentences[1:]:
        summary += f" {plan.conjunction} {sentence}"
    return summary


def _turn_rng(seed: int, dialogue_id: str, turn_index: int) -> random.Random:
    # Stable across processes, unlike hash().
    key = zlib.crc32(f"{seed}:{dialogue_id}:{turn_index}".encode("utf-8"))
    return random.Random(key)


def synthesize_labels(
    dialogue,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
    seed: int = 0,
) -> list[tuple[int, str]]:
    """Gold summary per turn of a dialogue, deterministic for a given seed."""
    labels = []
    for turn in dialogue.turns:
        rng = None
        if cfg.domain_order == "shuffled":
            rng = _turn_rng(seed, dialogue.dialogue_id, turn.index)
        labels.append((turn.index, state_to_summary(turn.state, ontology, cfg, rng)))
    return labels
