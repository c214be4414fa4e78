"""Discrete measures, plans, gluing and monotonicity certificates."""

from .discrete import (
    DiscreteMeasure,
    TransferencePlan,
    TripleCoupling,
    identity_plan,
    immersion_measure,
    merge_atoms,
    plan_cost,
    plan_from_map,
    push_forward,
    push_forward_with_labels,
    support_lemma_check,
    validate_plan,
)
from .gluing import compose, glue
from .io import read_measure_csv, read_plan_csv, write_measure_csv, write_plan_csv
from .monotonicity import MonotonicityCertificate, is_cyclically_monotone

__all__ = [
    "DiscreteMeasure",
    "MonotonicityCertificate",
    "TransferencePlan",
    "TripleCoupling",
    "compose",
    "glue",
    "identity_plan",
    "immersion_measure",
    "is_cyclically_monotone",
    "merge_atoms",
    "plan_cost",
    "plan_from_map",
    "push_forward",
    "push_forward_with_labels",
    "read_measure_csv",
    "read_plan_csv",
    "support_lemma_check",
    "validate_plan",
    "write_measure_csv",
    "write_plan_csv",
]
