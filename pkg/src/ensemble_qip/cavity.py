"""Single-photon pulse reflection from a one-sided cavity holding the ensemble.

Dynamics are the single-excitation amplitude equations (time in units of 1/kappa
internally)::

    d alpha/dt = -(i delta_c + kappa/2) alpha - i g beta + sqrt(kappa) f_in(t)
    d beta/dt  = -(i delta_a + gamma_s/2) beta - i g alpha
    f_out      = -(sqrt(kappa) alpha - f_in)

``beta`` is absent when the ensemble is in |0> (no |f>-|e> coupling). The overall
factor -1 on ``f_out`` is a fixed global phase chosen so that an empty resonant
cavity returns ``-f_in`` while the strongly coupled cavity returns ``+f_in``.
With this convention the steady-state reflection of an empty cavity is
``(i delta - kappa/2) / (i delta + kappa/2)``, see :func:`analytic_reflection`.

Gate fidelity is the raw overlap ``|<Psi_ideal|Psi_out>|`` for the uniform
four-branch input ``(|0>+|1>)(|h>+|v>)/2``; photon loss is left in as a norm
deficit, not renormalized away.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError

TWO_PI_MHZ = 2 * math.pi * 1e6
DEFAULT_SAMPLES = 4096
DEFAULT_SPAN = 2.0
# Substep must satisfy h <= STEP_FRACTION * min(1/kappa, 1/g, 1/gamma_s, 1/|delta|).
STEP_FRACTION = 0.05
CONVERGENCE_TOL = 1e-6


@dataclass(frozen=True)
class CavityParams:
    """Physical rates in angular frequency (rad/s)."""

    g: float
    kappa: float
    gamma_s: float
    delta_c: float = 0.0
    delta_a: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "gamma_s"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")

    @classmethod
    def from_mhz(cls, g, kappa, gamma_s, delta_c=0.0, delta_a=0.0):
        """Build from values quoted as omega/2pi in MHz."""
        return cls(*(TWO_PI_MHZ * x for x in (g, kappa, gamma_s, delta_c, delta_a)))

    def scaled(self):
        """Rates in units of kappa: (g, gamma_s, delta_c, delta_a)."""
        k = self.kappa
        return self.g / k, self.gamma_s / k, self.delta_c / k, self.delta_a / k

    def with_g(self, g):
        return replace(self, g=g)


PAPER_PARAMS = CavityParams.from_mhz(34.0, 4.1, 2.6)
BEC_PARAMS = CavityParams.from_mhz(10.6, 1.3, 3.0)


@dataclass(frozen=True)
class GaussianEnvelope:
    """``scale * exp(-(t - center)^2 / width^2)``; picklable pulse shape."""

    center: float
    width: float
    scale: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.scale * np.exp(-((t - self.center) ** 2) / self.width**2) + 0j


@dataclass(frozen=True, eq=False)
class PulseProfile:
    """Uniformly sampled complex envelope ``f(t0 + k dt)``.

    ``units`` is ``"1/kappa"`` (dimensionless time) or ``"s"``. When an analytic
    ``envelope`` is attached it is used for off-grid evaluation; otherwise a cubic
    spline of the samples is used (zero outside the grid).
    """

    t0: float
    dt: float
    samples: np.ndarray
    units: str = "1/kappa"
    envelope: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.units not in ("1/kappa", "s"):
            raise ValueError(f"unknown time units {self.units!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def __call__(self, t):
        if self.envelope is not None:
            return self.envelope(t)
        t = np.asarray(t, dtype=float)
        tt = self.times
        re = CubicSpline(tt, self.samples.real)(t)
        im = CubicSpline(tt, self.samples.imag)(t)
        out = re + 1j * im
        return np.where((t < tt[0]) | (t > tt[-1]), 0.0, out)

    def to_kappa_units(self, kappa: float) -> "PulseProfile":
        if self.units == "1/kappa":
            return self
        env = None
        if self.envelope is not None:
            e = self.envelope
            env = _RescaledEnvelope(e, kappa)
        return PulseProfile(self.t0 * kappa, self.dt * kappa, self.samples / math.sqrt(kappa), "1/kappa", env)


@dataclass(frozen=True)
class _RescaledEnvelope:
    inner: Callable
    kappa: float

    def __call__(self, t):
        return self.inner(np.asarray(t) / self.kappa) / math.sqrt(self.kappa)


def gaussian_pulse(T: float, n_samples: int = DEFAULT_SAMPLES, span: float = DEFAULT_SPAN) -> PulseProfile:
    """Gaussian single-photon pulse ``f ~ exp(-(t - T/2)^2 / (T/5)^2)`` on ``[0, span*T)``.

    ``T`` is in units of 1/kappa. Samples are normalized so that
    ``sum |f|^2 dt = 1`` on the grid.
    """
    if not T > 0:
        raise ValueError("pulse duration T must be positive")
    dt = span * T / n_samples
    env = GaussianEnvelope(T / 2, T / 5)
    raw = env(dt * np.arange(n_samples))
    scale = 1.0 / math.sqrt(np.sum(np.abs(raw) ** 2) * dt)
    env = GaussianEnvelope(T / 2, T / 5, scale)
    return PulseProfile(0.0, dt, raw * scale, "1/kappa", env)


@dataclass(frozen=True, eq=False)
class ReflectionResult:
    out_pulse: PulseProfile
    overlap: complex
    loss: float
    branch: str
    substeps: int = 1
    step_change: float = 0.0

    @property
    def transmitted(self) -> float:
        return 1.0 - self.loss


@dataclass(frozen=True, eq=False)
class GateReport:
    F: float
    P_s: float
    P_e: float
    branches: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        assert abs(self.P_e - self.P_s / 4) <= 1e-9


def analytic_reflection(delta: float, kappa: float) -> complex:
    """Steady-state empty-cavity reflection ``(i delta - kappa/2)/(i delta + kappa/2)``."""
    if not kappa > 0:
        raise ValueError("kappa must be > 0")
    if math.isinf(delta):
        return 1 + 0j
    return (1j * delta - kappa / 2) / (1j * delta + kappa / 2)


def _system(p: CavityParams, coupled: bool):
    g, gs, dc, da = p.scaled()
    if coupled:
        A = np.array([[-(1j * dc + 0.5), -1j * g], [-1j * g, -(1j * da + gs / 2)]])
        b = np.array([1.0, 0.0], dtype=complex)
    else:
        A = np.array([[-(1j * dc + 0.5)]])
        b = np.array([1.0 + 0j])
    return A, b


def _max_step(p: CavityParams, coupled: bool) -> float:
    g, gs, dc, da = p.scaled()
    rates = [1.0, abs(dc)]
    if coupled:
        rates += [g, gs, abs(da)]
    return STEP_FRACTION / max(rates)


def _rk4_linear_step(A, b, h):
    """Matrices of one RK4 step for ``y' = A y + b f(t)``.

    Returns ``(P, q0, qm, q1)`` with
    ``y_next = P y + q0 f(t) + qm f(t + h/2) + q1 f(t + h)``.
    """

    def step(y, f0, fm, f1):
        k1 = A @ y + b * f0
        k2 = A @ (y + 0.5 * h * k1) + b * fm
        k3 = A @ (y + 0.5 * h * k2) + b * fm
        k4 = A @ (y + h * k3) + b * f1
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    n = len(b)
    zero = np.zeros(n, dtype=complex)
    P = np.column_stack([step(np.eye(n, dtype=complex)[j], 0, 0, 0) for j in range(n)])
    return P, step(zero, 1, 0, 0), step(zero, 0, 1, 0), step(zero, 0, 0, 1)


def _integrate(A, b, pulse: PulseProfile, m: int) -> np.ndarray:
    """Cavity amplitude alpha on the pulse grid using ``m`` RK4 substeps per sample."""
    h = pulse.dt / m
    n_steps = (pulse.samples.size - 1) * m
    t = pulse.t0 + h * np.arange(n_steps + 1)
    f = pulse(t)
    fm = pulse(t[:-1] + 0.5 * h)
    P, q0, qm, q1 = _rk4_linear_step(A, b, h)
    drive = np.outer(q0, f[:-1]) + np.outer(qm, fm) + np.outer(q1, f[1:])
    alpha = np.empty(pulse.samples.size, dtype=complex)
    alpha[0] = 0.0
    if len(b) == 1:
        p00 = complex(P[0, 0])
        a = 0j
        for k, u in enumerate(drive[0].tolist()):
            a = p00 * a + u
            if (k + 1) % m == 0:
                alpha[(k + 1) // m] = a
        return alpha
    p00, p01, p10, p11 = (complex(x) for x in P.ravel())
    ua, ub = drive[0].tolist(), drive[1].tolist()
    a = bb = 0j
    for k in range(n_steps):
        a, bb = p00 * a + p01 * bb + ua[k], p10 * a + p11 * bb + ub[k]
        if (k + 1) % m == 0:
            alpha[(k + 1) // m] = a
    return alpha


def simulate_reflection(
    p: CavityParams,
    f_in: PulseProfile,
    coupled: bool,
    substeps: Optional[int] = None,
    tol: float = CONVERGENCE_TOL,
) -> ReflectionResult:
    """Reflect a single-photon pulse off the cavity (h polarization).

    ``coupled`` selects the ensemble-in-|1> branch. The integration is run at
    ``substeps`` and ``2*substeps`` RK4 steps per grid interval; if the two output
    envelopes differ by more than ``tol`` in L2 norm a ConvergenceError is raised.
    The finer solution is returned.
    """
    units = f_in.units
    f = f_in.to_kappa_units(p.kappa)
    if abs(f.norm2() - 1.0) > 1e-9:
        raise ValueError(f"input pulse is not normalized (sum |f|^2 dt = {f.norm2():.12g})")
    A, b = _system(p, coupled)
    h_max = _max_step(p, coupled)
    m = substeps if substeps is not None else max(1, math.ceil(f.dt / h_max))
    coarse = _integrate(A, b, f, m)
    fine = _integrate(A, b, f, 2 * m)
    with np.errstate(over="ignore", invalid="ignore"):
        change = math.sqrt(np.sum(np.abs(fine - coarse) ** 2) * f.dt)
    # NaN/inf means the coarse run blew up; treat as failure too
    if not change <= tol:
        h = f.dt / m
        suggested = 0.5 * h * (tol / change) ** 0.25 if math.isfinite(change) else 0.1 * h
        raise ConvergenceError(
            f"step-halving check failed: output changed by {change:.3g} (tol {tol:g}) at step {h:.3g}/kappa",
            suggestion=f"use an integration step <= {suggested:.3g}/kappa (substeps >= {math.ceil(f.dt / suggested)})",
        )
    out = f.samples - fine
    ideal = f.samples if coupled else -f.samples
    overlap = complex(np.vdot(ideal, out) * f.dt)
    loss = float(1.0 - np.sum(np.abs(out) ** 2) * f.dt)
    out_pulse = PulseProfile(f.t0, f.dt, out, "1/kappa")
    if units == "s":
        out_pulse = PulseProfile(f_in.t0, f_in.dt, out * math.sqrt(p.kappa), "s")
    branch = "1h" if coupled else "0h"
    return ReflectionResult(out_pulse, overlap, min(max(loss, 0.0), 1.0), branch, 2 * m, change)


def cpf_gate_report(p: CavityParams, f_in: PulseProfile, **kw) -> GateReport:
    """Fidelity and loss of the atom-photon CPF gate for the uniform four-branch input.

    Ideal outputs: ``0h -> -f_in``; ``0v, 1v, 1h -> +f_in``. The v branches bypass
    the cavity and are exact.
    """
    r0 = simulate_reflection(p, f_in, coupled=False, **kw)
    r1 = simulate_reflection(p, f_in, coupled=True, **kw)
    amp = 0.25 * (r0.overlap + 1.0 + 1.0 + r1.overlap)
    F = min(1.0, abs(amp))
    P_s = r1.loss
    return GateReport(F, P_s, P_s / 4, {"0h": r0, "1h": r1})


def sweep_duration(p: CavityParams, T_values, n_samples: int = DEFAULT_SAMPLES) -> list:
    """Gate fidelity versus pulse duration; ``T`` in units of 1/kappa."""
    rows = []
    for T in T_values:
        if not T > 0:
            raise ValueError("pulse durations must be positive")
        rows.append((float(T), cpf_gate_report(p, gaussian_pulse(T, n_samples)).F))
    return rows


def sweep_coupling(p: CavityParams, g_over_kappa, T: float = 120.0, n_samples: int = DEFAULT_SAMPLES) -> list:
    """Photon loss of the coupled branch versus g (given in units of kappa)."""
    pulse = gaussian_pulse(T, n_samples)
    rows = []
    for x in g_over_kappa:
        r = simulate_reflection(p.with_g(x * p.kappa), pulse, coupled=True)
        rows.append((float(x), r.loss))
    return rows


def critical_coupling(p: CavityParams) -> float:
    """Coupling (rad/s) at which the resonant coupled branch is impedance matched (total loss)."""
    return 0.5 * math.sqrt(p.kappa * p.gamma_s)
