"""Network coding to index coding reduction over small finite fields."""

from __future__ import annotations

from .galois import FieldSpec, Matrix, make_field, matrix_rank
from .index import Client, IndexInstance, RateReport, compute_mu, validate_index_instance
from .indexcode import (
    DecoderCertificate,
    LinearIndexCode,
    TableIndexCode,
    brute_force_decodability,
    rate_report,
    validate_index_code,
)
from .netcode import LinearNetworkCode, TableNetworkCode, validate_network_code
from .network import NetworkInstance, validate_network
from .reduction import ReductionMap, lift_linear_code, lift_table_code, lower_index_code, reduce_instance
from .solver import (
    MatroidSpec,
    SearchConfig,
    SearchResult,
    generate_random_solvable_network,
    min_linear_index_length,
    search_linear_index_code,
    search_matroid_representation,
    search_network_code,
    search_scalar_network_code,
)

__all__ = [
    "Client",
    "DecoderCertificate",
    "FieldSpec",
    "IndexInstance",
    "LinearIndexCode",
    "LinearNetworkCode",
    "Matrix",
    "MatroidSpec",
    "NetworkInstance",
    "RateReport",
    "ReductionMap",
    "SearchConfig",
    "SearchResult",
    "TableIndexCode",
    "TableNetworkCode",
    "brute_force_decodability",
    "compute_mu",
    "generate_random_solvable_network",
    "lift_linear_code",
    "lift_table_code",
    "lower_index_code",
    "make_field",
    "matrix_rank",
    "min_linear_index_length",
    "rate_report",
    "reduce_instance",
    "search_linear_index_code",
    "search_matroid_representation",
    "search_network_code",
    "search_scalar_network_code",
    "validate_index_code",
    "validate_index_instance",
    "validate_network",
    "validate_network_code",
]
