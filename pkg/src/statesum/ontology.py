"""Schema for the five travel-booking domains: slots, phrase templates, state values.

A dialogue state is a plain ``dict`` mapping slot names ("hotel-area") to string
values. The special value :data:`DONTCARE` marks a slot the user accepts any
value for; an unmentioned slot is simply absent from the dict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import yaml

from .errors import GenerationError, SchemaError

DONTCARE = "dontcare"

DOMAIN_NAMES = ("attraction", "hotel", "restaurant", "taxi", "train")

VALUE_KINDS = (
    "free_text",
    "time_hhmm",
    "count",
    "day_of_week",
    "boolean_yes_no",
    "categorical",
)

#: A dialogue state: slot name -> literal value or DONTCARE.
DialogueState = dict[str, str]

_DEFAULT_SCHEMA = "multiwoz_en.yaml"


def article_for(value: str) -> str:
    """Indefinite article for a value: "an" before a vowel, else "a"."""
    return "an" if value[:1].lower() in "aeiou" else "a"


@dataclass(frozen=True)
class TemplateConfig:
    """Converter variant flags.

    ``naturalness=False`` selects the flat "{value} as {slot} of {domain}"
    format, which has no paraphrasing or dontcare-concat options; both flags
    are forced off in that case.
    """

    naturalness: bool = True
    paraphrasing: bool = True
    dontcare_concat: bool = True
    domain_order: str = "canonical"  # "canonical" or "shuffled"

    def __post_init__(self):
        if self.domain_order not in ("canonical", "shuffled"):
            raise ValueError(f"unknown domain_order {self.domain_order!r}")
        if not self.naturalness:
            object.__setattr__(self, "paraphrasing", False)
            object.__setattr__(self, "dontcare_concat", False)


@dataclass(frozen=True)
class SlotSpec:
    """One slot: its sentence phrase, extraction rule, and dontcare noun."""

    slot_name: str
    domain: str
    phrase_template: str
    dontcare_noun: str
    value_kind: str
    canonical_position: int
    clause: bool = False
    front_when_an: bool = False
    unit_singular: str = ""
    unit_plural: str = ""
    phrase_yes: str = ""
    phrase_no: str = ""
    match_prefix: str = ""
    match_article: bool = False
    match_counted: str = ""
    match_boolean: tuple[str, str] = ()
    categories: tuple[str, ...] = ()

    @property
    def bare_name(self) -> str:
        """Slot name without the domain prefix, e.g. "book people"."""
        return self.slot_name.split("-", 1)[1]

    @property
    def is_boolean(self) -> bool:
        return self.value_kind == "boolean_yes_no"


@dataclass(frozen=True)
class DomainSpec:
    """One domain: its sentence noun phrase, detection phrase, and slots."""

    domain_name: str
    noun_phrase: str
    domain_phrase: str
    slots: tuple[SlotSpec, ...]

    @property
    def sentence_prefix(self) -> str:
        """Full first-sentence prefix, e.g. "The user is looking for a taxi"."""
        return f"The user is looking for {self.noun_phrase}"

    def slot(self, slot_name: str) -> SlotSpec:
        for spec in self.slots:
            if spec.slot_name == slot_name:
                return spec
        raise KeyError(slot_name)


@dataclass(eq=False)
class Ontology:
    """Immutable bundle of domain specs plus default generator vocabularies."""

    domains: dict[str, DomainSpec]
    value_pools: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        self._slots = {
            spec.slot_name: spec
            for domain in self.domains.values()
            for spec in domain.slots
        }

    @property
    def slot_count(self) -> int:
        return len(self._slots)

    def slot(self, slot_name: str) -> SlotSpec:
        return self._slots[slot_name]

    def has_slot(self, slot_name: str) -> bool:
        return slot_name in self._slots

    def domain_of(self, slot_name: str) -> str:
        return self._slots[slot_name].domain

    def all_slots(self) -> tuple[SlotSpec, ...]:
        return tuple(self._slots.values())


def _parse_slot(domain_name: str, slot_name: str, raw: dict) -> SlotSpec:
    if not isinstance(raw, dict):
        raise SchemaError(f"slot {slot_name!r}: expected a mapping")
    if not slot_name.startswith(domain_name + "-") or len(slot_name) <= len(domain_name) + 1:
        raise SchemaError(
            f"slot {slot_name!r}: name must have the form '{domain_name}-<slot>'"
        )
    kind = raw.get("kind", "free_text")
    if kind not in VALUE_KINDS:
        raise SchemaError(f"slot {slot_name!r}: unknown kind {kind!r}")
    if "position" not in raw:
        raise SchemaError(f"slot {slot_name!r}: missing position")

    match = raw.get("match") or {}
    if not isinstance(match, dict):
        raise SchemaError(f"slot {slot_name!r}: match must be a mapping")
    boolean = match.get("boolean") or ()
    if boolean and len(boolean) != 2:
        raise SchemaError(f"slot {slot_name!r}: boolean match needs two probes")

    template = raw.get("template", "")
    unit = raw.get("unit") or ("", "")
    if kind == "boolean_yes_no":
        if not raw.get("phrase_yes") or not raw.get("phrase_no"):
            raise SchemaError(f"slot {slot_name!r}: boolean slot needs phrase_yes/phrase_no")
        if not boolean:
            raise SchemaError(f"slot {slot_name!r}: boolean slot needs boolean match probes")
    else:
        if template.count("{v}") != 1:
            raise SchemaError(f"slot {slot_name!r}: template must contain exactly one {{v}} hole")
        if not match.get("prefix") and not match.get("counted"):
            raise SchemaError(f"slot {slot_name!r}: missing match rule")
    if kind == "count" and "{unit}" in template and (not unit[0] or not unit[1]):
        raise SchemaError(f"slot {slot_name!r}: count slot needs unit [singular, plural]")

    return SlotSpec(
        slot_name=slot_name,
        domain=domain_name,
        phrase_template=template,
        dontcare_noun=str(raw.get("dontcare_noun", "")),
        value_kind=kind,
        canonical_position=int(raw["position"]),
        clause=bool(raw.get("clause", False)),
        front_when_an=bool(raw.get("front_when_an", False)),
        unit_singular=str(unit[0]),
        unit_plural=str(unit[1]),
        phrase_yes=str(raw.get("phrase_yes", "")),
        phrase_no=str(raw.get("phrase_no", "")),
        match_prefix=str(match.get("prefix", "")),
        match_article=bool(match.get("article", False)),
        match_counted=str(match.get("counted", "")),
        match_boolean=tuple(boolean),
        categories=tuple(raw.get("categories", ())),
    )


def _parse_domain(domain_name: str, raw: dict) -> DomainSpec:
    if domain_name not in DOMAIN_NAMES:
        raise SchemaError(f"unknown domain {domain_name!r}")
    if not isinstance(raw, dict) or not raw.get("slots"):
        raise SchemaError(f"domain {domain_name!r}: missing slots")
    if not raw.get("noun_phrase") or not raw.get("detect_phrase"):
        raise SchemaError(f"domain {domain_name!r}: missing noun_phrase or detect_phrase")

    slots = []
    for slot_name, slot_raw in raw["slots"].items():
        slots.append(_parse_slot(domain_name, str(slot_name), slot_raw))
    slots.sort(key=lambda s: s.canonical_position)

    positions = [s.canonical_position for s in slots]
    if len(set(positions)) != len(positions):
        raise SchemaError(f"domain {domain_name!r}: duplicate canonical positions")
    nouns = [s.dontcare_noun for s in slots]
    if "" in nouns or len(set(nouns)) != len(nouns):
        raise SchemaError(f"domain {domain_name!r}: dontcare nouns must be unique and nonempty")

    return DomainSpec(
        domain_name=domain_name,
        noun_phrase=str(raw["noun_phrase"]),
        domain_phrase=str(raw["detect_phrase"]),
        slots=tuple(slots),
    )


def _build_ontology(doc: dict) -> Ontology:
    if not isinstance(doc, dict):
        raise SchemaError("schema root must be a mapping")
    raw_domains = doc.get("domains")
    if not raw_domains:
        raise SchemaError("schema has no domains")

    domains: dict[str, DomainSpec] = {}
    seen_slots: set[str] = set()
    for domain_name, raw in raw_domains.items():
        spec = _parse_domain(str(domain_name), raw)
        for slot in spec.slots:
            if slot.slot_name in seen_slots:
                raise SchemaError(f"duplicate slot {slot.slot_name!r}")
            seen_slots.add(slot.slot_name)
        domains[spec.domain_name] = spec

    pools = {str(k): [str(v) for v in vs] for k, vs in (doc.get("value_pools") or {}).items()}
    for slot_name in pools:
        if not any(slot_name in {s.slot_name for s in d.slots} for d in domains.values()):
            raise SchemaError(f"value pool for unknown slot {slot_name!r}")
    return Ontology(domains=domains, value_pools=pools)


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that rejects duplicate mapping keys instead of merging them."""


def _construct_unique_mapping(loader, node, deep=False):
    mapping = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in mapping:
            raise SchemaError(f"duplicate key {key!r} in schema")
        mapping[key] = loader.construct_object(value_node, deep=deep)
    return mapping


_StrictLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_unique_mapping
)


def load_ontology(path: str | Path | None = None) -> Ontology:
    """Load and validate a schema file; ``None`` loads the built-in default."""
    if path is None:
        text = resources.files("statesum.data").joinpath(_DEFAULT_SCHEMA).read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = yaml.load(text, _StrictLoader)
    except yaml.YAMLError as exc:
        raise SchemaError(f"schema is not valid YAML: {exc}") from exc
    return _build_ontology(doc)


@lru_cache(maxsize=1)
def default_ontology() -> Ontology:
    """The built-in 5-domain, 30-slot schema (shared instance)."""
    return load_ontology(None)


def validate_state(ontology: Ontology, state) -> list[str]:
    """Check a state against the schema; returns violations (empty = ok)."""
    if not isinstance(state, dict):
        return ["state must be a mapping of slot name to value"]
    violations = []
    for slot_name, value in state.items():
        if not isinstance(slot_name, str) or not ontology.has_slot(slot_name):
            violations.append(f"unknown slot {slot_name!r}")
            continue
        if value is None:
            violations.append(f"{slot_name}: none values must be expressed by absence")
            continue
        if not isinstance(value, str):
            violations.append(f"{slot_name}: value must be a string")
            continue
        if value == DONTCARE:
            continue
        if not value.strip():
            violations.append(f"{slot_name}: empty value")
            continue
        if "," in value or "." in value:
            violations.append(f"{slot_name}: value {value!r} contains ',' or '.'")
        if value != " ".join(value.split()):
            violations.append(f"{slot_name}: value {value!r} is not single-space normalized")
        spec = ontology.slot(slot_name)
        if spec.is_boolean and value not in ("yes", "no"):
            violations.append(f"{slot_name}: boolean slot takes yes/no/{DONTCARE}, got {value!r}")
        if spec.value_kind == "categorical" and spec.categories and value not in spec.categories:
            violations.append(f"{slot_name}: {value!r} not in categories")
    return violations


def random_state(
    ontology: Ontology,
    seed: int,
    max_domains: int = 5,
    value_pool: dict[str, list[str]] | None = None,
    dontcare_prob: float = 0.1,
) -> DialogueState:
    """Deterministically generate a valid state for fuzzing round trips.

    Each selected slot gets DONTCARE with probability ``dontcare_prob``,
    otherwise a value drawn from ``value_pool`` (default: the schema pools).
    """
    if not 1 <= max_domains <= len(ontology.domains):
        raise GenerationError(f"max_domains must be in 1..{len(ontology.domains)}")
    pools = value_pool if value_pool is not None else ontology.value_pools
    rng = random.Random(seed)

    names = list(ontology.domains)
    chosen = rng.sample(names, rng.randint(1, max_domains))
    state: DialogueState = {}
    for domain_name in chosen:
        domain = ontology.domains[domain_name]
        picked = [s for s in domain.slots if rng.random() < 0.5]
        if not picked:
            picked = [domain.slots[rng.randrange(len(domain.slots))]]
        for spec in sorted(picked, key=lambda s: s.canonical_position):
            if rng.random() < dontcare_prob:
                state[spec.slot_name] = DONTCARE
                continue
            if spec.is_boolean and spec.slot_name not in pools:
                state[spec.slot_name] = rng.choice(["yes", "no"])
                continue
            pool = pools.get(spec.slot_name)
            if not pool:
                raise GenerationError(f"no values available for slot {spec.slot_name!r}")
            state[spec.slot_name] = rng.choice(pool)
    return state
