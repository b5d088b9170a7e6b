"""nereval: entity-level, token-level and offset-exact NER evaluation side by side."""

from .errors import (
    AlignmentError,
    ConfigurationError,
    FormatError,
    InvalidInputError,
    NestedEntitiesError,
    ToolkitError,
)
from .formats import Sentence, StandoffEntity, emit_report, parse_brat_ann, parse_conll, write_conll
from .methodology import (
    MethodologyId,
    aggregate_runs,
    compare_methodologies,
    eval_entity_strict,
    eval_entity_without_O,
    eval_offset_exact,
    eval_token_with_O,
)
from .tagging import EntitySpan, decode_entities, encode_entities, flatten_nested, validate_tags

__version__ = "0.1.0"
