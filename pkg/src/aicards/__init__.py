"""aicards: create, validate, convert, and serve AI Usage Cards."""

from .card import (
    Card,
    Correspondence,
    EthicsAnswers,
    ModelUsage,
    ProjectDetails,
    UsageEntry,
    add_model,
    finalize,
    new_card,
    set_approval,
    set_category_models,
    set_entry,
    set_ethics,
    set_project,
)
from .codecs import (
    ExportBundle,
    build_bundle,
    canonicalize,
    decode_csv,
    decode_json,
    decode_xml,
    encode_bibtex,
    encode_csv,
    encode_json,
    encode_latex,
    encode_xml,
)
from .questionnaire import (
    Answer,
    AnswerScript,
    Session,
    Step,
    StepKind,
    current_step,
    finalize_session,
    go_back,
    load_script,
    replay,
    serialize_script,
    start,
    submit_answer,
)
from .taxonomy import (
    AnswerKind,
    Classification,
    Taxonomy,
    builtin_v1,
    get_taxonomy,
    load_taxonomy,
    lookup_subcategory,
    register_taxonomy,
    serialize_taxonomy,
)
from .validator import (
    Dimension,
    DimensionResult,
    Finding,
    Severity,
    ValidationReport,
    assess,
    check_accountability,
    check_integrity,
    check_transparency,
    report_to_dict,
)

__version__ = "0.1.0"
