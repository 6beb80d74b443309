"""Summary-to-state extraction: pattern matching that inverts the renderer.

Parsing never raises on malformed text; it returns a best-effort state plus a
list of diagnostics. Pattern tables are compiled once per ontology, and each
summary costs a single pass plus one probe per slot of the matched domains.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass, field

from .ontology import DONTCARE, DialogueState, DomainSpec, Ontology, TemplateConfig
from .summarize import DEFAULT_PLAN, ParaphrasePlan

# Phrases that end a value inside a sentence. The trailing comma or period a
# cut can leave behind is stripped by _clean_value.
VALUE_TERMINATORS = (
    " The ",
    " Also, ",
    " which ",
    " called ",
    " ranked ",
    " during ",
    " located in the ",
    " for ",
    " on ",
    " and ",
    " with a",
    " people",
    " person",
    " price",
    " star",
    " day",
    " to ",
    " at ",
)

UNNATURAL_PREFIX = "The user wants "


@dataclass
class ParseResult:
    """Best-effort extracted state plus whatever looked wrong on the way."""

    state: DialogueState = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)


def _clean_value(text: str) -> str:
    return " ".join(text.replace(",", "").replace(".", "").split())


def _boundary_phrases(plan: ParaphrasePlan) -> tuple[str, ...]:
    phrases = set(plan.subject_variants)
    phrases.add(plan.plain_subject)
    # Model output may capitalize a continuation subject.
    phrases.update(p[0].upper() + p[1:] for p in tuple(phrases))
    return tuple(sorted(phrases, key=len, reverse=True))


class StateExtractor:
    """Compiled pattern set for one ontology, with parse/probe counters."""

    def __init__(self, ontology: Ontology, plan: ParaphrasePlan = DEFAULT_PLAN):
        self.ontology = ontology
        self.plan = plan
        self.parses = 0
        self.pattern_applications = 0

        self._splitter = re.compile(
            "|".join(re.escape(p) for p in _boundary_phrases(plan))
        )
        self._terminators = re.compile(
            "|".join(re.escape(t) for t in VALUE_TERMINATORS)
        )
        self._counted = {
            spec.slot_name: re.compile(rf" for (\d+) {re.escape(spec.match_counted)}")
            for domain in ontology.domains.values()
            for spec in domain.slots
            if spec.match_counted
        }
        self._nouns = {
            domain.domain_name: {spec.dontcare_noun: spec.slot_name for spec in domain.slots}
            for domain in ontology.domains.values()
        }
        self._reserved = self._build_reserved()

    def _build_reserved(self) -> tuple[str, ...]:
        reserved = set(VALUE_TERMINATORS)
        reserved.update(_boundary_phrases(self.plan))
        reserved.add(self.plan.dontcare_marker)
        for domain in self.ontology.domains.values():
            for spec in domain.slots:
                if spec.match_prefix:
                    reserved.add(spec.match_prefix)
                reserved.update(spec.match_boolean)
        return tuple(reserved)

    # -- splitting ---------------------------------------------------------

    def split_by_domain(self, summary: str) -> tuple[dict[str, str], list[str]]:
        """Assign each sentence fragment to the domain whose phrase it contains.

        Unassigned fragments are dropped and reported; a fragment claimed by
        more than one domain is parsed by each and reported.
        """
        fragments = [f for f in self._splitter.split(summary) if f.strip()]
        assigned: dict[str, str] = {}
        diagnostics: list[str] = []
        claims: dict[int, list[str]] = {}
        for domain in self.ontology.domains.values():
            for i, fragment in enumerate(fragments):
                if domain.domain_phrase in fragment:
                    assigned[domain.domain_name] = fragment
                    claims.setdefault(i, []).append(domain.domain_name)
                    break
        for i, fragment in enumerate(fragments):
            owners = claims.get(i, [])
            if not owners:
                if any(d.domain_phrase in fragment for d in self.ontology.domains.values()):
                    diagnostics.append(f"repeated domain fragment ignored: {fragment.strip()!r}")
                else:
                    diagnostics.append(f"no domain phrase matched: {fragment.strip()!r}")
            elif len(owners) > 1:
                diagnostics.append(
                    f"fragment claimed by multiple domains ({', '.join(owners)}): "
                    f"{fragment.strip()!r}"
                )
        return assigned, diagnostics

    # -- single-domain parsing ---------------------------------------------

    def _cut_value(self, tail: str) -> str:
        m = self._terminators.search(tail)
        return _clean_value(tail[: m.start()] if m else tail)

    def parse_domain_sentence(
        self,
        fragment: str,
        domain: DomainSpec,
        one_sentence: bool = True,
        diagnostics: list[str] | None = None,
    ) -> DialogueState:
        """Extract this domain's slots from its sentence fragment."""
        diags = diagnostics if diagnostics is not None else []
        # With dontcare in a separate sentence, slot phrases live in the first
        # sentence only; the dontcare scan always sees the whole fragment.
        main = fragment if one_sentence else fragment.split(".", 1)[0]
        state: DialogueState = {}

        for spec in domain.slots:
            if spec.match_boolean:
                self.pattern_applications += 2
                negative, positive = spec.match_boolean
                if negative in main:
                    state[spec.slot_name] = "no"
                elif positive in main:
                    state[spec.slot_name] = "yes"
                continue
            self.pattern_applications += 1
            if spec.match_counted:
                m = self._counted[spec.slot_name].search(main)
                if m:
                    state[spec.slot_name] = m.group(1)
                continue
            idx = main.find(spec.match_prefix)
            if idx < 0:
                continue
            tail = main[idx + len(spec.match_prefix):]
            if spec.match_article:
                tail = tail[2:] if tail.startswith("n") else tail[1:]
            value = self._cut_value(tail)
            if not value:
                diags.append(
                    f"{domain.domain_name}: empty value after {spec.match_prefix!r}"
                )
                continue
            state[spec.slot_name] = value

        marker = self.plan.dontcare_marker
        idx = fragment.find(marker)
        if idx >= 0:
            self.pattern_applications += 1
            tail = fragment[idx + len(marker):].split(".", 1)[0]
            for noun in tail.split(" and "):
                noun = _clean_value(noun)
                if not noun:
                    continue
                slot_name = self._nouns[domain.domain_name].get(noun)
                if slot_name is None:
                    diags.append(
                        f"{domain.domain_name}: unrecognized dontcare noun {noun!r}"
                    )
                    continue
                state[slot_name] = DONTCARE
        return state

    # -- whole-summary parsing ---------------------------------------------

    def _parse_unnatural(self, summary: str) -> ParseResult:
        result = ParseResult()
        text = summary.strip()
        if text.startswith(UNNATURAL_PREFIX):
            text = text[len(UNNATURAL_PREFIX):]
        elif text:
            result.diagnostics.append("missing flat-format prefix")
        text = text.rstrip(".")
        for part in filter(None, (p.strip() for p in text.split(", "))):
            left, sep, domain_name = part.rpartition(" of ")
            value, sep2, bare = left.rpartition(" as ")
            if not sep or not sep2 or not value:
                result.diagnostics.append(f"unparseable entry {part!r}")
                continue
            slot_name = f"{domain_name}-{bare}"
            if not self.ontology.has_slot(slot_name):
                result.diagnostics.append(f"unknown slot {slot_name!r}")
                continue
            result.state[slot_name] = _clean_value(value)
        return result

    def parse(self, summary: str, cfg: TemplateConfig = TemplateConfig()) -> ParseResult:
        """One-pass extraction of the full state from a summary."""
        self.parses += 1
        if not cfg.naturalness:
            return self._parse_unnatural(summary)
        assigned, diagnostics = self.split_by_domain(summary)
        result = ParseResult(diagnostics=diagnostics)
        for domain_name, fragment in assigned.items():
            partial = self.parse_domain_sentence(
                fragment,
                self.ontology.domains[domain_name],
                one_sentence=cfg.dontcare_concat,
                diagnostics=result.diagnostics,
            )
            result.state.update(partial)  # domains are disjoint
        return result

    # -- synthesis-time guard ------------------------------------------------

    def reserved_collisions(self, state: DialogueState) -> list[str]:
        """Values that would corrupt extraction if rendered into a summary.

        A literal collides when it embeds a template delimiter, a slot
        pattern, another domain's detection phrase, or (for counted slots) is
        not a plain integer.
        """
        issues = []
        for slot_name, value in state.items():
            if value == DONTCARE or not self.ontology.has_slot(slot_name):
                continue
            spec = self.ontology.slot(slot_name)
            if spec.match_counted and not value.isdigit():
                issues.append(f"{slot_name}: counted value {value!r} is not an integer")
                continue
            hay = f" {value} "
            for phrase in self._reserved:
                if phrase in hay:
                    issues.append(f"{slot_name}: value {value!r} contains {phrase.strip()!r}")
                    break
            else:
                for domain in self.ontology.domains.values():
                    if domain.domain_name != spec.domain and domain.domain_phrase in value:
                        issues.append(
                            f"{slot_name}: value {value!r} contains the "
                            f"{domain.domain_name!r} domain phrase"
                        )
                        break
        return issues


_EXTRACTORS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def extractor_for(ontology: Ontology) -> StateExtractor:
    """Shared extractor for an ontology (patterns compiled once)."""
    extractor = _EXTRACTORS.get(ontology)
    if extractor is None:
        extractor = StateExtractor(ontology)
        _EXTRACTORS[ontology] = extractor
    return extractor


def split_by_domain(summary: str, ontology: Ontology) -> tuple[dict[str, str], list[str]]:
    return extractor_for(ontology).split_by_domain(summary)


def parse_domain_sentence(
    fragment: str,
    domain: DomainSpec,
    ontology: Ontology,
    one_sentence: bool = True,
    diagnostics: list[str] | None = None,
) -> DialogueState:
    return extractor_for(ontology).parse_domain_sentence(
        fragment, domain, one_sentence, diagnostics
    )


def parse_summary(
    summary: str,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
) -> ParseResult:
    return extractor_for(ontology).parse(summary, cfg)


def summary_to_state(
    summary: str,
    ontology: Ontology,
    cfg: TemplateConfig = TemplateConfig(),
) -> DialogueState:
    """Extracted state only; use parse_summary for diagnostics as well."""
    return parse_summary(summary, ontology, cfg).state


def reserved_collisions(state: DialogueState, ontology: Ontology) -> list[str]:
    return extractor_for(ontology).reserved_collisions(state)
