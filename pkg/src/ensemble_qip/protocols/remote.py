"""Nonlocal CNOT through a shared ensemble pair, and the repeater SNR estimate.

Register order is ``(S1, S2, E1, E2)``. The ensembles start in
``(|01> + |10>)/sqrt2``; local CNOTs ``C_{S1 E1}`` and ``C_{E2 S2}`` are applied,
E1 is measured in {0, 1} and E2 in {+, -}, and a Pauli correction on the
single atoms completes ``C_{S1 S2}``.
"""
from __future__ import annotations

import numpy as np

from .. import qsim
from .gates import ProtocolOutcome

S1, S2, E1, E2 = 0, 1, 2, 3
ANCILLA = qsim.StateVector((2, 2), np.array([0, 1, 1, 0]) / np.sqrt(2))
# (E1 result, E2 result) -> Paulis undoing the branch operator
CORRECTION_TABLE = {
    ("0", "+"): {S2: "X"},
    ("0", "-"): {S1: "Z", S2: "X"},
    ("1", "+"): {},
    ("1", "-"): {S1: "Z"},
}
# global sign of each branch operator in the expansion of the entangled state
BRANCH_SIGNS = {("0", "+"): 1, ("0", "-"): -1, ("1", "+"): 1, ("1", "-"): 1}


def _entangled(psi: qsim.StateVector) -> qsim.StateVector:
    if psi.dims != (2, 2):
        raise qsim.DimensionError("psi must be a two-qubit state on (S1, S2)")
    s = qsim.tensor_product(psi, ANCILLA)
    s = qsim.apply_gate(s, qsim.CNOT, [S1, E1])
    return qsim.apply_gate(s, qsim.CNOT, [E2, S2])


def nonlocal_cnot(psi: qsim.StateVector, seed=None, rng=None, outcome=None) -> ProtocolOutcome:
    """Remote CNOT (control S1, target S2).

    Measurement results are drawn from ``rng`` (or a generator seeded with
    ``seed``) unless forced as ``outcome=(e1, e2)``, e.g. ``('0', '+')``.
    """
    if rng is None and outcome is None:
        rng = np.random.default_rng(seed)
    s = _entangled(psi)
    o1 = o2 = None
    if outcome is not None:
        o1, o2 = "01".index(outcome[0]), "+-".index(outcome[1])
    r1 = qsim.measure(s, E2, "x", rng=rng, outcome=o2)
    # measuring E2 first keeps E1's site index valid after reduction
    r0 = qsim.measure(r1.reduced(), E1, "z", rng=rng, outcome=o1)
    key = (r0.label, r1.label)
    corr = CORRECTION_TABLE[key]
    out = qsim.apply_paulis(r0.reduced(), corr)
    applied = tuple((pauli, site) for site, pauli in sorted(corr.items()))
    return ProtocolOutcome(out, key, applied, 1, True, r0.probability * r1.probability)


def nonlocal_cnot_branches(psi: qsim.StateVector) -> list:
    """All four measurement branches, corrected."""
    s = _entangled(psi)
    out = []
    for r1 in qsim.measure_branches(s, E2, "x"):
        if r1.state is None:
            continue
        for r0 in qsim.measure_branches(r1.reduced(), E1, "z"):
            if r0.state is None:
                continue
            key = (r0.label, r1.label)
            corr = CORRECTION_TABLE[key]
            fixed = qsim.apply_paulis(r0.reduced(), corr)
            applied = tuple((pauli, site) for site, pauli in sorted(corr.items()))
            out.append(ProtocolOutcome(fixed, key, applied, 1, True, r0.probability * r1.probability))
    return out


def branch_decomposition(psi: qsim.StateVector) -> list:
    """Terms ``(1/2) B_k C|psi> (x) |e1 e2>`` whose sum is the pre-measurement state.

    ``B_k`` is the tabulated correction times the sign in ``BRANCH_SIGNS``.
    """
    target = qsim.apply_gate(psi, qsim.CNOT, [S1, S2])
    vec = {"0": [1, 0], "1": [0, 1], "+": [1, 1], "-": [1, -1]}
    terms = []
    for (e1, e2), corr in CORRECTION_TABLE.items():
        branch = BRANCH_SIGNS[(e1, e2)] * qsim.apply_paulis(target, corr)
        anc = qsim.from_vectors(vec[e1], vec[e2])
        terms.append(0.5 * qsim.StateVector((2, 2, 2, 2), np.kron(branch.amps, anc.amps)))
    return terms


def repeater_snr(N: float, g: float, kappa: float, gamma_s: float) -> float:
    """Signal-to-noise ratio ``4 N g^2 / (kappa gamma_s)``."""
    for name, v in (("N", N), ("g", g), ("kappa", kappa), ("gamma_s", gamma_s)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    return 4 * N * g**2 / (kappa * gamma_s)
