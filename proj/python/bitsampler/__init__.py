"""Entropy-efficient exact and near-exact discrete sampling.

Every operation draws randomness one bit at a time from an explicit
BitTape, so the consumed bit count is always observable and every
distribution statement can be checked by exact rational enumeration.
"""

from ._core import (
    AdditiveTable,
    AliasTable,
    BitTape,
    ChiSquareResult,
    Epsilon,
    ExactDistribution,
    FormatError,
    MultIndex,
    StreamSampler,
    WeightedStreamSampler,
    alias_sample,
    basic_reservoir_sample,
    bernoulli,
    build_add,
    build_alias,
    build_mult,
    chi_square,
    deserialize_index,
    enumerate_offline_distribution,
    enumerate_stream_distribution,
    enumerate_weighted_distribution,
    exact_index_distribution,
    max_add_deviation,
    max_mult_deviation,
    offline_bits,
    offline_uniform,
    payload_bits,
    sample_add,
    sample_mult,
    serialize,
    tv_distance,
    uniform_int,
    vitter_reservoir_sample,
)

__all__ = [
    "AdditiveTable",
    "AliasTable",
    "BitTape",
    "ChiSquareResult",
    "Epsilon",
    "ExactDistribution",
    "FormatError",
    "MultIndex",
    "StreamSampler",
    "WeightedStreamSampler",
    "alias_sample",
    "basic_reservoir_sample",
    "bernoulli",
    "build_add",
    "build_alias",
    "build_mult",
    "chi_square",
    "deserialize_index",
    "enumerate_offline_distribution",
    "enumerate_stream_distribution",
    "enumerate_weighted_distribution",
    "exact_index_distribution",
    "max_add_deviation",
    "max_mult_deviation",
    "offline_bits",
    "offline_uniform",
    "payload_bits",
    "sample_add",
    "sample_mult",
    "serialize",
    "tv_distance",
    "uniform_int",
    "vitter_reservoir_sample",
]
