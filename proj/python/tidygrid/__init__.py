"""Desk-scale household-tidying lab.

A partially observable grid simulator, a four-verb plan language, a softmax
plan policy trained by imitation and reinforced self-training, and the
evaluation protocols that compare the trained variants against an untrained
baseline and an oracle demonstrator.
"""

from ._tidygrid import (
    Aggregate,
    AggregateReport,
    Dataset,
    EpisodeMetrics,
    EpisodeOptions,
    EpisodeResult,
    InteractionRecord,
    IoError,
    ParsedPlan,
    PlanParseError,
    PolicyParams,
    PreferenceDataset,
    ProtocolConfig,
    ProtocolResult,
    ReportRow,
    Scene,
    TaskSpec,
    ValidationError,
    __version__,
    aggregate,
    builtin_object_types,
    builtin_scenes,
    collect_demos,
    fit_il,
    fnv1a64,
    generate_prefs,
    generate_task,
    generate_task_set,
    is_correct_placement,
    make_baseline_params,
    mix_seed,
    parse_plan,
    run_cross_domain,
    run_episode,
    run_protocol,
    sign_test_p,
)

__all__ = [
    "Aggregate",
    "AggregateReport",
    "Dataset",
    "EpisodeMetrics",
    "EpisodeOptions",
    "EpisodeResult",
    "InteractionRecord",
    "IoError",
    "ParsedPlan",
    "PlanParseError",
    "PolicyParams",
    "PreferenceDataset",
    "ProtocolConfig",
    "ProtocolResult",
    "ReportRow",
    "Scene",
    "TaskSpec",
    "ValidationError",
    "__version__",
    "aggregate",
    "builtin_object_types",
    "builtin_scenes",
    "collect_demos",
    "fit_il",
    "fnv1a64",
    "generate_prefs",
    "generate_task",
    "generate_task_set",
    "is_correct_placement",
    "make_baseline_params",
    "mix_seed",
    "parse_plan",
    "run_cross_domain",
    "run_episode",
    "run_protocol",
    "sign_test_p",
]
