"""Succinct bit vectors with worst-case constant-time rank and select."""

from .bitcore import BitVector, PackedArray, bits_for_range, build_bitvector, popcount_word, rank_word_prefix, select_in_word
from .errors import ConfigError, FormatError, InvariantError, QueryError
from .oracle import NaiveIndex, naive_block_counts, naive_rank, naive_select
from .rankselect import PRESETS, RankSelect, RsConfig, SpaceReport
from .sample2 import SampleTree2, build_sample2, optimal_a2
from .sample3 import SampleTree3, a_fast, a_min, build_sample3, optimal_a, optimal_b, size_bound_bits
from .summary import SummaryTree, build_summary

__all__ = [
    "BitVector",
    "PackedArray",
    "bits_for_range",
    "build_bitvector",
    "popcount_word",
    "rank_word_prefix",
    "select_in_word",
    "ConfigError",
    "FormatError",
    "InvariantError",
    "QueryError",
    "NaiveIndex",
    "naive_block_counts",
    "naive_rank",
    "naive_select",
    "PRESETS",
    "RankSelect",
    "RsConfig",
    "SpaceReport",
    "SampleTree2",
    "build_sample2",
    "optimal_a2",
    "SampleTree3",
    "a_fast",
    "a_min",
    "build_sample3",
    "optimal_a",
    "optimal_b",
    "size_bound_bits",
    "SummaryTree",
    "build_summary",
]
