"""Continuants with bounded partial quotients: exact arithmetic, doubling constructions,
an exhaustive census, and the lower-bound chains built on them."""
from .core import (
    PartialQuotients, cf_expand, cf_value, continuant, continuant_det, is_canonical,
    neighbor_determinant, normalize_leading_one, prefix_continuants, reverse,
)
from .census import CensusQuery, CountResult, count_by_scan, count_f, enumerate_sequences, zaremba_witness
from .constructions import WitnessSet, endpoint_variants, generate_family, hensley_double, lemma2_children
from .bounds import BoundReport, GTable, g_table, iteration_depth
from . import errors

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "CensusQuery", "CountResult", "GTable", "PartialQuotients", "WitnessSet",
    "cf_expand", "cf_value", "continuant", "continuant_det", "count_by_scan", "count_f",
    "endpoint_variants", "enumerate_sequences", "errors", "g_table", "generate_family",
    "hensley_double", "is_canonical", "iteration_depth", "lemma2_children", "neighbor_determinant",
    "normalize_leading_one", "prefix_continuants", "reverse", "zaremba_witness",
]
