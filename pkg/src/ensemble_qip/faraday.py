"""Weak-coupling / bad-cavity gate: state-dependent reflection phase, applied twice.

The reflection coefficient of a one-sided cavity with a single effective
emitter (the ensemble in |1>) is::

    r = ([i(wc - wp) - k/2][i(w0 - wp) + y/2] + g^2)
        / ([i(wc - wp) + k/2][i(w0 - wp) + y/2] + g^2)

and the empty-cavity value (ensemble in |0>) is its g -> 0 limit. At
``w0 = wc``, ``wp = wc - k/2``, ``g = k/2``, ``y = 0`` the two branches pick up
phases pi and pi/2; reflecting twice turns these into 2pi and pi, which is the
CPF gate ``exp(i pi |0h><0h|)`` exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import qsim
from .errors import DomainError


@dataclass(frozen=True)
class ProbeParams:
    """Frequencies and rates in any consistent angular units."""

    omega_c: float
    omega_0: float
    omega_p: float
    g: float
    kappa: float
    gamma: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if not self.g >= 0:
            raise ValueError("g must be >= 0")

    @classmethod
    def in_kappa_units(cls, g=0.5, probe_detuning=-0.5, atom_detuning=0.0, gamma=0.0):
        """Operating point with kappa = 1, omega_c = 0.

        ``probe_detuning`` is ``(wp - wc)/kappa``; ``atom_detuning`` is ``(w0 - wc)/kappa``.
        """
        return cls(0.0, atom_detuning, probe_detuning, g, 1.0, gamma)


OPERATING_POINT = ProbeParams.in_kappa_units()


@dataclass(frozen=True)
class FaradayPhases:
    phi: float
    phi0: float

    @property
    def difference(self) -> float:
        return _principal(self.phi - self.phi0)


def _principal(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def _phase(z: complex) -> float:
    return _principal(cmath.phase(z))


def reflection_coefficient(p: ProbeParams, coupled: bool) -> complex:
    a = p.omega_c - p.omega_p
    if not coupled or p.g == 0:
        return (1j * a - p.kappa / 2) / (1j * a + p.kappa / 2)
    atom = 1j * (p.omega_0 - p.omega_p) + p.gamma / 2
    num = (1j * a - p.kappa / 2) * atom + p.g**2
    den = (1j * a + p.kappa / 2) * atom + p.g**2
    if abs(den) < 1e-15 * max(1.0, p.kappa**2, p.g**2):
        raise DomainError(
            "reflection coefficient is singular: the dressed-cavity denominator vanishes "
            f"(wc-wp={a}, w0-wp={p.omega_0 - p.omega_p}, gamma={p.gamma}, g={p.g})"
        )
    return num / den


def faraday_phases(p: ProbeParams) -> FaradayPhases:
    return FaradayPhases(_phase(reflection_coefficient(p, True)), _phase(reflection_coefficient(p, False)))


def phase_sweep(p: ProbeParams, probe_frequencies, unwrap: bool = True):
    """Reflection phases over a probe-frequency grid.

    Returns ``(omega_p, phi, phi0)`` arrays; with ``unwrap`` the curves are made
    continuous by argument tracking, otherwise principal values are returned.
    """
    w = np.asarray(probe_frequencies, dtype=float)
    r1 = np.array([reflection_coefficient(replace(p, omega_p=x), True) for x in w])
    r0 = np.array([reflection_coefficient(replace(p, omega_p=x), False) for x in w])
    phi, phi0 = np.angle(r1), np.angle(r0)
    if unwrap:
        phi, phi0 = np.unwrap(phi), np.unwrap(phi0)
    return w, phi, phi0


def twice_reflection_gate(p: ProbeParams) -> qsim.Gate:
    """Diagonal gate on (ensemble, photon) after two reflections; v bypasses the cavity."""
    r0 = reflection_coefficient(p, False)
    r1 = reflection_coefficient(p, True)
    # unit-modulus phases only; amplitude loss (gamma > 0) is reported separately
    e0 = cmath.exp(2j * cmath.phase(r0))
    e1 = cmath.exp(2j * cmath.phase(r1))
    return qsim.diagonal_gate([e0, 1, e1, 1], dims=(2, 2), name="TR2")


def twice_reflection_cpf(p: ProbeParams):
    """Return ``(gate, fidelity)`` of the twice-reflection gate against ``exp(i pi |0h><0h|)``.

    Fidelity is ``|<CPF psi|G psi>|`` on the uniform superposition probe
    ``(|0>+|1>)(|h>+|v>)/2``.
    """
    gate = twice_reflection_gate(p)
    probe = qsim.from_vectors([1, 1], [1, 1])
    got = qsim.apply_gate(probe, gate, [0, 1])
    want = qsim.apply_gate(probe, qsim.CPF_0H, [0, 1])
    return gate, qsim.fidelity(want, got)
