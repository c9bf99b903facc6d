"""Cluster chains and graph-state surgery (fuse, remove, shrink).

Graphs are sets of undirected edges ``(a, b)`` with ``a < b`` over sites
``0..n-1``. The graph state is ``prod_{(a,b)} CZ_ab |+>^n``; its amplitudes are
``2^{-n/2} (-1)^{sum_(a,b) x_a x_b}``.

Pauli measurements follow the standard graph rules (Hein, Eisert, Briegel):
after measuring site ``a`` the remaining register equals a local Clifford
``U`` applied to a new graph state; this module applies ``U^dag`` so the
returned state *is* the new graph state.
"""
from __future__ import annotations

import math
from typing import Iterable, Optional

import numpy as np

from .. import qsim
from ..errors import DimensionError
from .gates import ProtocolOutcome, ensemble_cpf

MAX_CHAIN = 16
_S2 = 1 / math.sqrt(2)
# sqrt(+-iY) = (I +- iY)/sqrt2 and sqrt(+-iZ) = (I +- iZ)/sqrt2
SQRT_IY = {+1: qsim.Gate(np.array([[1, 1], [-1, 1]]) * _S2, (2,), "sqrt(iY)"),
           -1: qsim.Gate(np.array([[1, -1], [1, 1]]) * _S2, (2,), "sqrt(-iY)")}
SQRT_IZ = {+1: qsim.Gate(np.diag([1 + 1j, 1 - 1j]) * _S2, (2,), "sqrt(iZ)"),
           -1: qsim.Gate(np.diag([1 - 1j, 1 + 1j]) * _S2, (2,), "sqrt(-iZ)")}


def _edge(a, b):
    return (a, b) if a < b else (b, a)


def chain_edges(n: int) -> frozenset:
    return frozenset((i, i + 1) for i in range(n - 1))


def neighbors(edges, v) -> set:
    return {b if a == v else a for a, b in edges if v in (a, b)}


def local_complement(edges, v) -> frozenset:
    """Toggle every edge among the neighbours of ``v``."""
    es = set(edges)
    nb = sorted(neighbors(edges, v))
    for i, a in enumerate(nb):
        for b in nb[i + 1 :]:
            es ^= {_edge(a, b)}
    return frozenset(es)


def delete_vertex(edges, v) -> frozenset:
    """Drop ``v`` and relabel higher sites down by one."""
    shift = lambda x: x - 1 if x > v else x
    return frozenset(_edge(shift(a), shift(b)) for a, b in edges if v not in (a, b))


def graph_state(n: int, edges: Iterable) -> qsim.StateVector:
    """Closed-form graph state (no gates applied)."""
    x = (np.arange(2**n)[:, None] >> (n - 1 - np.arange(n))) & 1
    parity = np.zeros(2**n, dtype=int)
    for a, b in edges:
        parity += x[:, a] * x[:, b]
    return qsim.StateVector((2,) * n, (-1.0) ** parity / 2 ** (n / 2))


def chain_closed_form(n: int) -> qsim.StateVector:
    """``2^{-n/2} prod_i (|0>_i + |1>_i Z_{i+1})`` expanded amplitude by amplitude."""
    amps = np.empty(2**n)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        sign = 1
        for i in range(n - 1):
            if bits[i] and bits[i + 1]:
                sign = -sign
        amps[idx] = sign
    return qsim.StateVector((2,) * n, amps / 2 ** (n / 2))


def stabilizer_expectations(state: qsim.StateVector, edges) -> list:
    """``<X_v prod_{w in N(v)} Z_w>`` for every site ``v``."""
    out = []
    for v in range(state.n_sites):
        ops = {v: "X"}
        ops.update({w: "Z" for w in neighbors(edges, v)})
        out.append(qsim.expectation(state, ops))
    return out


def plus_register(n: int) -> qsim.StateVector:
    s = qsim.qubits("0" * n)
    for i in range(n):
        s = qsim.apply_gate(s, qsim.H, [i])
    return s


def build_cluster_chain(n: int, rng: Optional[np.random.Generator] = None, seed: int = 0) -> qsim.StateVector:
    """Linear cluster on ``n`` ensembles from photon-mediated CPF gates.

    Neighbouring pairs are linked first, then adjacent blocks are merged by a
    CPF between the facing end qubits, level by level.
    """
    if not 2 <= n <= MAX_CHAIN:
        raise DimensionError(f"chain length must be in [2, {MAX_CHAIN}], got {n}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    s = plus_register(n)
    blocks = [(i, i) for i in range(n)]
    while len(blocks) > 1:
        merged = []
        for k in range(0, len(blocks) - 1, 2):
            left, right = blocks[k], blocks[k + 1]
            s = ensemble_cpf(s, left[1], right[0], rng=rng).state
            merged.append((left[0], right[1]))
        if len(blocks) % 2:
            merged.append(blocks[-1])
        blocks = merged
    return s


def fuse_chains(a: qsim.StateVector, b: qsim.StateVector, qa: int, qb: int, rng=None, outcome=None) -> ProtocolOutcome:
    """Join two chains with a CPF between end qubit ``qa`` of ``a`` and ``qb`` of ``b``.

    Sites of ``b`` follow those of ``a`` in the result. ``edges`` on the outcome
    is the fused graph assuming both inputs are chains.
    """
    na, nb = a.n_sites, b.n_sites
    if qa not in (0, na - 1) or qb not in (0, nb - 1):
        raise ValueError("fusion is only defined between end qubits")
    if na + nb > MAX_CHAIN:
        raise DimensionError(f"fused register of {na + nb} sites exceeds cap {MAX_CHAIN}")
    if rng is None and outcome is None:
        rng = np.random.default_rng(0)
    joint = qsim.tensor_product(a, b)
    res = ensemble_cpf(joint, qa, na + qb, rng=rng, outcome=outcome)
    edges = set(chain_edges(na)) | {(x + na, y + na) for x, y in chain_edges(nb)} | {_edge(qa, na + qb)}
    return ProtocolOutcome(res.state, res.detections, res.corrections, 1, res.success, res.probability, frozenset(edges))


def _undo(state, gates: dict):
    for site, gate in gates.items():
        state = qsim.apply_gate(state, gate.dagger(), [site])
    return state


def measure_graph_qubit(
    state: qsim.StateVector,
    edges,
    site: int,
    basis: str,
    rng=None,
    outcome: Optional[int] = None,
    b0: Optional[int] = None,
) -> ProtocolOutcome:
    """Pauli-measure ``site`` of a graph state and restore graph form on the rest.

    ``basis`` is 'x', 'y' or 'z'. For 'x' the special neighbour ``b0`` defaults to
    the smallest neighbour. Returns the new graph state (sites relabelled) with
    its edge set; ``corrections`` lists the undone local Cliffords.
    """
    edges = frozenset(_edge(*e) for e in edges)
    n = state.n_sites
    if not 0 <= site < n:
        raise ValueError(f"invalid site {site} for a {n}-site register")
    if rng is None and outcome is None:
        rng = np.random.default_rng(0)
    rec = qsim.measure(state, site, basis, rng=rng, outcome=outcome)
    sign = +1 if rec.outcome == 0 else -1
    nbr = neighbors(edges, site)
    rest = rec.reduced()
    relabel = lambda v: v - 1 if v > site else v
    corr = {}
    if basis == "z":
        new = delete_vertex(edges, site)
        if sign < 0:
            corr = {relabel(b): qsim.Z for b in nbr}
    elif basis == "y":
        new = delete_vertex(local_complement(edges, site), site)
        corr = {relabel(b): SQRT_IZ[-sign] for b in nbr}
    elif basis == "x":
        if not nbr:
            new = delete_vertex(edges, site)
        else:
            b0 = min(nbr) if b0 is None else b0
            if b0 not in nbr:
                raise ValueError(f"b0={b0} is not a neighbour of site {site}")
            g1 = local_complement(edges, b0)
            g2 = delete_vertex(local_complement(g1, site), site)
            new = local_complement(g2, relabel(b0))
            nb0 = neighbors(edges, b0)
            zs = (nbr - nb0 - {b0}) if sign > 0 else (nb0 - nbr - {site})
            corr = {relabel(b): qsim.Z for b in zs}
            corr = {relabel(b0): SQRT_IY[sign], **corr}
    else:
        raise ValueError("basis must be 'x', 'y' or 'z'")
    # corrections act on distinct sites, so order is irrelevant
    rest = _undo(rest, corr)
    labels = tuple((g.name, s) for s, g in sorted(corr.items()))
    return ProtocolOutcome(rest, (rec.label,), labels, 1, True, rec.probability, new)


def remove_qubit(cluster: qsim.StateVector, i: int, rng=None, outcome=None, edges=None) -> ProtocolOutcome:
    """Remove site ``i`` by an X measurement (chain graph unless ``edges`` given)."""
    edges = chain_edges(cluster.n_sites) if edges is None else edges
    return measure_graph_qubit(cluster, edges, i, "x", rng=rng, outcome=outcome)


def shrink_qubit(cluster: qsim.StateVector, i: int, rng=None, outcome=None, edges=None) -> ProtocolOutcome:
    """Remove site ``i`` by a Y measurement, joining its neighbours."""
    edges = chain_edges(cluster.n_sites) if edges is None else edges
    return measure_graph_qubit(cluster, edges, i, "y", rng=rng, outcome=outcome)
