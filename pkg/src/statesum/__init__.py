"""Bidirectional conversion between dialogue states and template summaries,
plus the few-shot DST experiment harness built around it."""

__version__ = "0.1.0"

from .errors import (
    CorpusError,
    EvaluationError,
    GenerationError,
    ProtocolError,
    SchemaError,
    StatesumError,
    StateValidationError,
)
from .ontology import (
    DONTCARE,
    DialogueState,
    DomainSpec,
    Ontology,
    SlotSpec,
    TemplateConfig,
    default_ontology,
    load_ontology,
    random_state,
    validate_state,
)
from .summarize import (
    ParaphrasePlan,
    render_domain_sentence,
    render_slot_phrase,
    state_to_summary,
    synthesize_labels,
)
from .destate import (
    ParseResult,
    StateExtractor,
    parse_summary,
    reserved_collisions,
    split_by_domain,
    summary_to_state,
)
from .corpus import (
    Corpus,
    Dialogue,
    FewShotSplit,
    PredictionRecord,
    Turn,
    domain_counts,
    export_training_file,
    load_multiwoz,
    load_predictions,
    sample_fewshot,
)
from .metrics import (
    ErrorRecord,
    Report,
    bleu4,
    classify_errors,
    evaluate_run,
    joint_goal_accuracy,
    rouge_n_f1,
    slot_accuracy,
)

__all__ = [
    "DONTCARE",
    "CorpusError",
    "Corpus",
    "Dialogue",
    "DialogueState",
    "DomainSpec",
    "ErrorRecord",
    "EvaluationError",
    "FewShotSplit",
    "GenerationError",
    "Ontology",
    "ParaphrasePlan",
    "ParseResult",
    "PredictionRecord",
    "ProtocolError",
    "Report",
    "SchemaError",
    "SlotSpec",
    "StateExtractor",
    "StateValidationError",
    "StatesumError",
    "TemplateConfig",
    "Turn",
    "bleu4",
    "classify_errors",
    "default_ontology",
    "domain_counts",
    "evaluate_run",
    "export_training_file",
    "joint_goal_accuracy",
    "load_multiwoz",
    "load_ontology",
    "load_predictions",
    "parse_summary",
    "random_state",
    "render_domain_sentence",
    "render_slot_phrase",
    "reserved_collisions",
    "rouge_n_f1",
    "sample_fewshot",
    "slot_accuracy",
    "split_by_domain",
    "state_to_summary",
    "summary_to_state",
    "synthesize_labels",
    "validate_state",
]
