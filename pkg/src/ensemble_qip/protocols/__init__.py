"""Protocol layer: ensemble CPF/CNOT, cluster chains, build-time scaling, remote CNOT."""
from .cluster import (
    build_cluster_chain,
    chain_closed_form,
    chain_edges,
    fuse_chains,
    graph_state,
    measure_graph_qubit,
    remove_qubit,
    shrink_qubit,
    stabilizer_expectations,
)
from .gates import ProtocolOutcome, ensemble_cnot, ensemble_cpf, ensemble_cpf_branches
from .remote import CORRECTION_TABLE, nonlocal_cnot, nonlocal_cnot_branches, repeater_snr
from .scaling import ClusterSpec, analytic_build_time, scaling_exponent, simulate_build_time

__all__ = [
    "CORRECTION_TABLE",
    "ClusterSpec",
    "ProtocolOutcome",
    "analytic_build_time",
    "build_cluster_chain",
    "chain_closed_form",
    "chain_edges",
    "ensemble_cnot",
    "ensemble_cpf",
    "ensemble_cpf_branches",
    "fuse_chains",
    "graph_state",
    "measure_graph_qubit",
    "nonlocal_cnot",
    "nonlocal_cnot_branches",
    "remove_qubit",
    "repeater_snr",
    "scaling_exponent",
    "shrink_qubit",
    "simulate_build_time",
    "stabilizer_expectations",
]
