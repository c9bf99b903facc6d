"""Photon-mediated CPF and CNOT between two ensemble qubits.

A single photon in (|h>+|v>)/sqrt2 reflects off box 1 (CPF ``exp(i pi |0h><0h|)``
with ensemble q1), passes a half-wave plate, reflects off box 2, passes a
second half-wave plate and is detected in {h, v}. Detection ``h`` leaves the
ensembles in ``U_CPF |psi>``; detection ``v`` leaves ``Z_q1 U_CPF |psi>``, so the
correction for ``v`` is Z on q1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import qsim

PHOTON_PLUS = np.array([1, 1]) / np.sqrt(2)
DETECTION_LABELS = ("h", "v")
# detection label -> corrections as (pauli, role) with role 'q1' or 'q2'
CPF_CORRECTIONS = {"h": (), "v": (("Z", "q1"),)}


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    state: Optional[qsim.StateVector]
    detections: tuple = ()
    corrections: tuple = ()
    attempts: int = 1
    success: bool = True
    probability: float = 1.0
    edges: Optional[frozenset] = field(default=None, repr=False)


def _photon_circuit(state: qsim.StateVector, q1: int, q2: int) -> qsim.StateVector:
    if q1 == q2:
        raise ValueError("q1 and q2 must differ")
    for q in (q1, q2):
        if not 0 <= q < state.n_sites or state.dims[q] != 2:
            raise qsim.DimensionError(f"site {q} is not a qubit of the register")
    photon = qsim.StateVector((2,), PHOTON_PLUS)
    s = qsim.tensor_product(state, photon)
    ph = s.n_sites - 1
    s = qsim.apply_gate(s, qsim.CPF_0H, [q1, ph])
    s = qsim.apply_gate(s, qsim.H, [ph])
    s = qsim.apply_gate(s, qsim.CPF_0H, [q2, ph])
    return qsim.apply_gate(s, qsim.H, [ph])


def _finish(rec: qsim.MeasurementRecord, q1: int, q2: int) -> ProtocolOutcome:
    label = DETECTION_LABELS[rec.outcome]
    out = rec.reduced()
    sites = {"q1": q1, "q2": q2}
    applied = tuple((pauli, sites[role]) for pauli, role in CPF_CORRECTIONS[label])
    out = qsim.apply_paulis(out, {site: pauli for pauli, site in applied})
    return ProtocolOutcome(out, (label,), applied, 1, True, rec.probability)


def ensemble_cpf(
    state: qsim.StateVector,
    q1: int,
    q2: int,
    rng: Optional[np.random.Generator] = None,
    outcome: Optional[str] = None,
    loss_prob: float = 0.0,
) -> ProtocolOutcome:
    """CPF ``exp(i pi |11><11|)`` between ensemble qubits ``q1`` and ``q2``.

    The detection is sampled from ``rng`` unless forced with ``outcome`` ('h' or 'v').
    With ``loss_prob > 0`` the photon may be lost (heralded failure, no state).
    """
    if loss_prob > 0:
        if rng is None:
            raise ValueError("photon loss sampling needs an rng")
        if rng.random() < loss_prob:
            return ProtocolOutcome(None, ("lost",), (), 1, False, loss_prob)
    s = _photon_circuit(state, q1, q2)
    forced = None if outcome is None else DETECTION_LABELS.index(outcome)
    rec = qsim.measure(s, s.n_sites - 1, "z", rng=rng, outcome=forced)
    return _finish(rec, q1, q2)


def ensemble_cpf_branches(state: qsim.StateVector, q1: int, q2: int) -> list:
    """Both detection branches of :func:`ensemble_cpf`, with probabilities."""
    s = _photon_circuit(state, q1, q2)
    return [_finish(rec, q1, q2) for rec in qsim.measure_branches(s, s.n_sites - 1, "z") if rec.state is not None]


def ensemble_cnot(state: qsim.StateVector, control: int, target: int, rng=None, outcome=None) -> ProtocolOutcome:
    """CNOT as Hadamard-CPF-Hadamard on the target ensemble."""
    s = qsim.apply_gate(state, qsim.H, [target])
    res = ensemble_cpf(s, control, target, rng=rng, outcome=outcome)
    out = qsim.apply_gate(res.state, qsim.H, [target])
    return ProtocolOutcome(out, res.detections, res.corrections, res.attempts, res.success, res.probability)
