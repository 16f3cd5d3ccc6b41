"""Databases, abductive meta-theories and repairs."""

from repairdb.composer.compose import (
    ABDUCIBLES,
    COMPOSER_SOURCE,
    AbductiveTheory,
    compose,
    compose_with_sources,
    compose_with_timestamps,
    trust_denials,
)
from repairdb.composer.database import DatabaseInstance, RepairedDatabase, UnifiedDatabase, merge_facts
from repairdb.composer.repair import Repair, apply_repair, ground_repair, solution_to_repair

__all__ = [
    "ABDUCIBLES",
    "COMPOSER_SOURCE",
    "AbductiveTheory",
    "DatabaseInstance",
    "Repair",
    "RepairedDatabase",
    "UnifiedDatabase",
    "apply_repair",
    "compose",
    "compose_with_sources",
    "compose_with_timestamps",
    "ground_repair",
    "merge_facts",
    "solution_to_repair",
    "trust_denials",
]
