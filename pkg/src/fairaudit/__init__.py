"""Intersectional group-fairness auditing for recorded model outputs."""

__version__ = "0.1.0"

from .classification import (  # noqa: E402
    UNDEFINED,
    MetricResult,
    RateKind,
    conditional_statistical_parity_ratio,
    demographic_parity_ratio,
    disparate_impact,
    equal_opportunity_ratio,
    equalized_odds_ratio,
    group_benefit_ratio_intersectional,
    group_benefit_ratio_per_subgroup,
    min_max_ratio,
    multiclass_equalized_odds_ratio,
    rate_parity_ratio,
    subgroup_rate,
)
from .data_model import (  # noqa: E402
    AttributeSchema,
    ColumnRoles,
    Dataset,
    Record,
    Violation,
    load_dataset,
    serialize_dataset,
    validate_for_metric,
)
from .distribution import (  # noqa: E402
    DistributionEstimate,
    estimate_distribution,
    kl_divergence,
    make_shared_edges,
    total_variation,
    worst_case_kl,
)
from .errors import (  # noqa: E402
    ConfigError,
    FairauditError,
    FieldRequirementError,
    ParseError,
    SchemaError,
    UsageError,
)
from .ranking import (  # noqa: E402
    AttentionModel,
    RankedItem,
    RankedList,
    attention_ratio,
    attention_value,
    load_ranked_list,
    mean_attention,
    skew_at_k,
    skew_ratio_at_k,
)
from .report import AuditConfig, AuditReport, emit_report, run_audit  # noqa: E402
from .subgroups import (  # noqa: E402
    Subgroup,
    SubgroupPartition,
    build_partition,
    population_fractions,
    subgroup_label,
)
