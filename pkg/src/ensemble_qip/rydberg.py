"""Rydberg blockade: Foerster potentials, collective rotations, coupling averages.

Frequencies are angular (rad/s) and lengths are metres unless a function says
otherwise. The dipole-dipole coefficient ``C3`` has units rad/s * m^3 and is an
input; it is not computed from atomic structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants

from . import qsim
from .errors import ConvergenceError, DomainError

BOHR_RADIUS = constants.physical_constants["Bohr radius"][0]
D_PHI_DEFAULT = 1.333


@dataclass(frozen=True)
class FoersterParams:
    delta: float
    C3: float
    D_phi: float = D_PHI_DEFAULT
    n: Optional[int] = None

    def __post_init__(self):
        if not self.C3 > 0:
            raise ValueError("C3 must be > 0")
        if not self.D_phi > 0:
            raise ValueError("D_phi must be > 0")


def blockade_potential(fp: FoersterParams, R, branch: str = "+", inner: str = "+"):
    """Pair-state energy ``delta/2 +- sqrt(delta^2/4 +- D_phi C3^2 / R^6)``.

    ``branch`` picks the outer sign, ``inner`` the sign under the root. Works on
    scalars or arrays; raises DomainError where the radicand is negative.
    """
    if branch not in "+-" or inner not in "+-" or len(branch) != 1 or len(inner) != 1:
        raise ValueError("branch and inner must be '+' or '-'")
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise DomainError("separation R must be > 0")
    s_in = 1.0 if inner == "+" else -1.0
    rad = fp.delta**2 / 4 + s_in * fp.D_phi * fp.C3**2 / R**6
    if np.any(rad < 0):
        raise DomainError(
            f"branch ({branch},{inner}) is invalid here: negative radicand for R <= {float(np.max(R[rad < 0]))!r}"
        )
    s_out = 1.0 if branch == "+" else -1.0
    v = fp.delta / 2 + s_out * np.sqrt(rad)
    return float(v) if v.ndim == 0 else v


def asymptote(fp: FoersterParams, branch: str = "+") -> float:
    """``V(R -> inf)`` for the given branch (inner '+')."""
    return fp.delta / 2 + (1 if branch == "+" else -1) * abs(fp.delta) / 2


def resonant_limit(fp: FoersterParams, R):
    """Near-resonant form ``sqrt(D_phi) C3 / R^3`` (valid for R << Rc)."""
    return math.sqrt(fp.D_phi) * fp.C3 / np.asarray(R, dtype=float) ** 3


def van_der_waals_limit(fp: FoersterParams, R):
    """Far-field form ``D_phi C3^2 / (delta R^6)`` (valid for R >> Rc)."""
    if fp.delta == 0:
        return np.inf
    return fp.D_phi * fp.C3**2 / (abs(fp.delta) * np.asarray(R, dtype=float) ** 6)


def critical_radius(fp: FoersterParams) -> float:
    """Crossover length ``(2 C3 / |delta|)^(1/3)``; infinite at exact resonance."""
    if fp.delta == 0:
        return math.inf
    return (2 * fp.C3 / abs(fp.delta)) ** (1 / 3)


def blockade_shift(fp: FoersterParams, R):
    """Smaller of ``|V+|`` and ``|V-|``: the shift that actually blocks double excitation."""
    return np.minimum(np.abs(blockade_potential(fp, R, "+")), np.abs(blockade_potential(fp, R, "-")))


@dataclass(frozen=True, eq=False)
class BlockadeCurve:
    R: np.ndarray
    V_plus: np.ndarray
    V_minus: np.ndarray


def blockade_curve(fp: FoersterParams, R_values) -> BlockadeCurve:
    R = np.asarray(R_values, dtype=float)
    return BlockadeCurve(R, np.atleast_1d(blockade_potential(fp, R, "+")), np.atleast_1d(blockade_potential(fp, R, "-")))


# collective three-pulse rotation ---------------------------------------------

# Basis order of the collective space: |0> = all g, |1> = symmetric single f, |r> = symmetric single Rydberg.
_ZERO, _ONE, _RYD = 0, 1, 2

# Drive phases (flip, rotate, flip). HADAMARD_PHASES gives X at phi=pi and H at
# phi=pi/2 (qubit block = Ry(phi) Z). ROTATION_PHASES gives Rx(phi): identity at 0.
HADAMARD_PHASES = (-math.pi / 2, math.pi / 2, -math.pi / 2)
ROTATION_PHASES = (math.pi / 2, 0.0, -math.pi / 2)


def _two_level_pulse(i: int, j: int, mixing: float, phase: float) -> np.ndarray:
    """exp(-i mixing (e^{i phase}|j><i| + h.c.)) embedded in the 3-level space."""
    U = np.eye(3, dtype=complex)
    c, s = math.cos(mixing), math.sin(mixing)
    U[i, i] = U[j, j] = c
    U[j, i] = -1j * np.exp(1j * phase) * s
    U[i, j] = -1j * np.exp(-1j * phase) * s
    return U


@dataclass(frozen=True, eq=False)
class CollectiveRotation:
    phi: float
    unitary: np.ndarray
    full: np.ndarray = field(repr=False)
    leakage: float = 0.0

    def gate(self) -> qsim.Gate:
        return qsim.Gate(self.unitary, (2,), f"rot({self.phi:.4g})")


def collective_rotation(phi: float, drive_phases=HADAMARD_PHASES) -> CollectiveRotation:
    """Three-pulse single-qubit rotation under perfect blockade.

    A pulse of nominal area ``A`` (``A/2 = integral Omega dtau / 2``) produces a
    mixing angle ``A/4``: the two flip pulses (half-area pi) transfer |1> <-> |r>
    completely, and the middle pulse (half-area ``phi``) rotates {|0>, |r>} by
    Bloch angle ``phi``. Doubly excited states are excluded from the basis.
    """
    p1, p2, p3 = drive_phases
    flip_in = _two_level_pulse(_ONE, _RYD, math.pi / 2, p1)
    middle = _two_level_pulse(_ZERO, _RYD, phi / 2, p2)
    flip_out = _two_level_pulse(_ONE, _RYD, math.pi / 2, p3)
    full = flip_out @ middle @ flip_in
    block = full[:2, :2].copy()
    leakage = float(np.max(np.sum(np.abs(full[2:, :2]) ** 2, axis=0)))
    return CollectiveRotation(float(phi), block, full, leakage)


def unitary_fidelity(U, V) -> float:
    """Phase-insensitive gate overlap ``|Tr(U^dag V)| / d``."""
    U, V = np.asarray(U), np.asarray(V)
    return float(abs(np.trace(U.conj().T @ V)) / U.shape[0])


# double-excitation error model -----------------------------------------------

BASELINE_FIDELITY = 0.997
P2_ANCHOR, F_ANCHOR = 0.01, 0.992
# Phenomenological linear leakage: F = baseline (1 - c P2), c fixed by the two anchors.
DOUBLE_EXCITATION_COEFF = (1 - F_ANCHOR / BASELINE_FIDELITY) / P2_ANCHOR
P2_MAX = 0.05


def excitation_error_fidelity(P2: float, baseline_F: float = BASELINE_FIDELITY) -> float:
    """CPF fidelity with double-excitation probability ``P2`` (calibrated linear model)."""
    if not 0 <= P2 <= P2_MAX:
        raise DomainError(f"P2 must be in [0, {P2_MAX}], got {P2}")
    return baseline_F * (1 - DOUBLE_EXCITATION_COEFF * P2)


# position-dependent coupling -------------------------------------------------


@dataclass(frozen=True, eq=False)
class CloudGeometry:
    """Atomic cloud in a Gaussian standing-wave cavity mode.

    The mode is ``g(r) = g0 cos(kc z) exp(-r_perp^2 / wc^2)``. The density is
    either a Gaussian (``sigma_perp``, ``sigma_z``, centred at ``z0`` on the axis)
    normalized to ``N`` atoms, or an explicit ``points`` array of shape (M, 3),
    each point carrying weight ``N / M``.
    """

    N: float
    g0: float
    wc: float
    kc: float
    sigma_perp: float = 0.0
    sigma_z: float = 0.0
    z0: float = 0.0
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.points is not None:
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            if pts.shape[1] != 3:
                raise ValueError("points must have shape (M, 3)")
            object.__setattr__(self, "points", pts)
        if not self.N > 0 or not self.wc > 0:
            raise ValueError("N and wc must be positive")

    def coupling(self, x, y, z):
        return self.g0 * np.cos(self.kc * z) * np.exp(-(x**2 + y**2) / self.wc**2)


def _gauss_mean(fn, mu, sigma, order):
    if sigma == 0:
        return float(fn(np.array([mu]))[0])
    x, w = np.polynomial.hermite.hermgauss(order)
    return float(np.sum(w * fn(mu + math.sqrt(2) * sigma * x)) / math.sqrt(math.pi))


def _quadrature(cg: CloudGeometry, order: int):
    radial = _gauss_mean(lambda x: np.exp(-2 * x**2 / cg.wc**2), 0.0, cg.sigma_perp, order)
    axial = _gauss_mean(lambda z: np.cos(cg.kc * z) ** 2, cg.z0, cg.sigma_z, order)
    atoms = cg.N * _gauss_mean(np.ones_like, 0.0, cg.sigma_perp, order) ** 2 * _gauss_mean(np.ones_like, cg.z0, cg.sigma_z, order)
    return cg.g0**2 * radial**2 * axial, atoms


def density_integral(cg: CloudGeometry, order: int = 64) -> float:
    """Integral of the density; equals N for a correctly normalized cloud."""
    if cg.points is not None:
        return cg.N
    return _quadrature(cg, order)[1]


def average_coupling(cg: CloudGeometry, method: str = "closed", max_order: int = 2048, tol: float = 1e-12) -> float:
    """RMS coupling ``g_bar = sqrt(int rho |g|^2 / N)``.

    ``method='closed'`` uses the exact Gaussian moments, ``'quadrature'`` uses
    Gauss-Hermite quadrature with order doubling until successive estimates
    agree to ``tol`` (relative). Point clouds are averaged directly.
    """
    if cg.points is not None:
        x, y, z = cg.points.T
        return float(math.sqrt(np.mean(np.abs(cg.coupling(x, y, z)) ** 2)))
    if method == "closed":
        radial = 1.0 / (1.0 + 4 * cg.sigma_perp**2 / cg.wc**2)
        axial = 0.5 * (1 + math.cos(2 * cg.kc * cg.z0) * math.exp(-2 * cg.kc**2 * cg.sigma_z**2))
        return cg.g0 * math.sqrt(radial * axial)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    order = 16
    prev, _ = _quadrature(cg, order)
    while order < max_order:
        order *= 2
        cur, _ = _quadrature(cg, order)
        if abs(cur - prev) <= tol * max(abs(cur), cg.g0**2 * 1e-300):
            return math.sqrt(max(cur, 0.0))
        prev = cur
    raise ConvergenceError(
        f"Gauss-Hermite quadrature did not converge by order {max_order}",
        suggestion="raise max_order or use method='closed' (kc*sigma_z is large)",
    )


# geometry checks ----------------------------------------------------------------

NEGLIGIBLE_FLUCTUATION = 0.05


@dataclass(frozen=True)
class GeometryReport:
    d: float
    reduced_wavelength: float
    d_over_reduced_wavelength: float
    r_g: float
    d_over_rg: float
    collective_dephasing_ok: bool
    ground_state_overlap_ok: bool
    number_fluctuation_ratio: Optional[float]
    advisory: str


def geometry_checks(N: float, delta_r_perp: float, wavelength: float, n_g: int, delta_N: Optional[float] = None) -> GeometryReport:
    """Mean atom spacing ``d = sqrt(pi dr^2 / N)`` against ``lambda/2pi`` and ``r_g = n_g^2 a0``."""
    for name, v in (("N", N), ("delta_r_perp", delta_r_perp), ("wavelength", wavelength), ("n_g", n_g)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    d = math.sqrt(math.pi * delta_r_perp**2 / N)
    lam_bar = wavelength / (2 * math.pi)
    r_g = n_g**2 * BOHR_RADIUS
    ratio = None if delta_N is None else delta_N / N
    if ratio is None:
        advisory = "atom-number fluctuation not assessed"
    elif ratio <= NEGLIGIBLE_FLUCTUATION:
        advisory = "negligible"
    else:
        advisory = "significant"
    return GeometryReport(d, lam_bar, d / lam_bar, r_g, d / r_g, d > lam_bar, d > r_g, ratio, advisory)
