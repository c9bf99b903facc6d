"""Scenario registry: key declarations and runners for each subcommand.

A runner takes ``(cfg, workers)`` and returns a :class:`ScenarioResult`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import cavity, faraday, qsim, rydberg
from ..protocols import cluster, remote, scaling
from .config import UNITS, Key, ScenarioConfig, SweepSpec, non_negative, one_of, positive, probability

MHZ = UNITS["frequency"]["MHz_2pi"]
UM = UNITS["length"]["um"]
C3_UNIT = UNITS["c3"]["MHz_2pi_um3"]


@dataclass
class ScenarioResult:
    columns: list
    rows: list
    report: list = field(default_factory=list)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    keys: dict
    runner: Callable
    sweep_kind: Optional[str] = None
    sweep_default: Optional[SweepSpec] = None
    sweep_help: str = ""


def _keys(*ks):
    return {k.name: k for k in ks}


def pool_map(fn, items, workers: int) -> list:
    """Map in input order; a pool is only spun up when it can help."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))


def _cavity(cfg) -> cavity.CavityParams:
    p = cfg.params
    return cavity.CavityParams(p.get("g", 0.0), p["kappa"], p["gamma_s"], p.get("delta_c", 0.0), p.get("delta_a", 0.0))


CAVITY_KEYS = (
    Key("g", "frequency", 34 * MHZ, "ensemble-cavity coupling g", non_negative),
    Key("kappa", "frequency", 4.1 * MHZ, "cavity field decay rate", positive),
    Key("gamma_s", "frequency", 2.6 * MHZ, "atomic spontaneous emission rate", non_negative),
)
DETUNING_KEYS = (
    Key("delta_c", "frequency", 0.0, "cavity detuning from the photon carrier"),
    Key("delta_a", "frequency", 0.0, "atomic detuning from the photon carrier"),
)
SAMPLES_KEY = Key("n_samples", "int", cavity.DEFAULT_SAMPLES, "pulse samples on the [0, 2T) grid", positive)


# pulse-sim -----------------------------------------------------------------


def run_pulse_sim(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    p = _cavity(cfg)
    pulse = cavity.gaussian_pulse(cfg["T_over_kappa"], cfg["n_samples"])
    r0 = cavity.simulate_reflection(p, pulse, coupled=False)
    r1 = cavity.simulate_reflection(p, pulse, coupled=True)
    t = pulse.times
    rows = [
        (t[k], pulse.samples[k].real, r0.out_pulse.samples[k].real, r0.out_pulse.samples[k].imag,
         r1.out_pulse.samples[k].real, r1.out_pulse.samples[k].imag)
        for k in range(len(t))
    ]
    report = [
        f"overlap_0h={abs(r0.overlap):.6f} loss_0h={r0.loss:.6f}",
        f"overlap_1h={abs(r1.overlap):.6f} loss_1h={r1.loss:.6f}",
    ]
    cols = ["t_over_kappa", "f_in", "f_out_0h_re", "f_out_0h_im", "f_out_1h_re", "f_out_1h_im"]
    return ScenarioResult(cols, rows, report)


# fidelity-sweep ---------------------------------------------------------------


def _fidelity_point(args):
    p, T, n = args
    return cavity.cpf_gate_report(p, cavity.gaussian_pulse(T, n)).F


def run_fidelity_sweep(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    p = _cavity(cfg)
    Ts = cfg.sweep.values()
    if any(T <= 0 for T in Ts):
        raise ValueError("sweep_start must be positive: pulse durations must be > 0")
    Fs = pool_map(_fidelity_point, [(p, T, cfg["n_samples"]) for T in Ts], workers)
    rows = list(zip(Ts, Fs))
    report = [f"T_over_kappa={Ts[-1]:.6g} fidelity={Fs[-1]:.6f}"] if rows else []
    return ScenarioResult(["T_over_kappa", "fidelity"], rows, report)


# loss-sweep ------------------------------------------------------------------


def _loss_point(args):
    p, T, n = args
    pulse = cavity.gaussian_pulse(T, n)
    return cavity.simulate_reflection(p, pulse, coupled=True).loss


def run_loss_sweep(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    p = _cavity(cfg)
    xs = cfg.sweep.values()
    if any(x < 0 for x in xs):
        raise ValueError("g_over_kappa sweep values must be >= 0")
    jobs = [(p.with_g(x * p.kappa), cfg["T_over_kappa"], cfg["n_samples"]) for x in xs]
    losses = pool_map(_loss_point, jobs, workers)
    rows = [(x, L, L / 4) for x, L in zip(xs, losses)]
    gc = cavity.critical_coupling(p) / p.kappa
    report = [f"critical_g_over_kappa={gc:.6f}"]
    return ScenarioResult(["g_over_kappa", "P_s", "P_e"], rows, report)


# faraday-phase ------------------------------------------------------------------


def run_faraday_phase(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    pp = faraday.ProbeParams.in_kappa_units(
        g=cfg["g_over_kappa"], probe_detuning=cfg["detuning"],
        atom_detuning=cfg["atom_detuning"], gamma=cfg["gamma_over_kappa"],
    )
    ph = faraday.faraday_phases(pp)
    _, F = faraday.twice_reflection_cpf(pp)
    report = [f"phi={ph.phi:.5f} phi0={ph.phi0:.5f}", f"cpf_fidelity={F:.6f}"]
    rows = []
    ws = cfg.sweep.values()
    if ws:
        # probe frequencies in units of kappa relative to the cavity
        _, phi, phi0 = faraday.phase_sweep(pp, [pp.omega_c + d for d in ws])
        rows = [(d, a, b) for d, a, b in zip(ws, phi, phi0)]
    return ScenarioResult(["detuning", "phi", "phi0"], rows, report)


# blockade-curve ------------------------------------------------------------------


def _foerster(cfg) -> rydberg.FoersterParams:
    n = cfg["n"] or None
    return rydberg.FoersterParams(cfg["delta"], cfg["C3"], cfg["D_phi"], n)


def run_blockade_curve(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    fp = _foerster(cfg)
    R = np.array(cfg.sweep.values())
    rows = []
    if R.size:
        if np.any(R <= 0):
            raise ValueError("sweep radii must be > 0")
        curve = rydberg.blockade_curve(fp, R)
        rows = [(r / UM, vp / MHZ, vm / MHZ) for r, vp, vm in zip(R, curve.V_plus, curve.V_minus)]
    Rc = rydberg.critical_radius(fp)
    probe = cfg["probe_R"]
    vp = rydberg.blockade_potential(fp, probe, "+")
    vm = rydberg.blockade_potential(fp, probe, "-")
    report = [
        f"Rc_um={Rc / UM:.6g}",
        f"R_um={probe / UM:.6g} V_plus_MHz={vp / MHZ:.6g} V_minus_MHz={vm / MHZ:.6g} shift_MHz={rydberg.blockade_shift(fp, probe) / MHZ:.6g}",
    ]
    return ScenarioResult(["R_um", "V_plus_MHz", "V_minus_MHz"], rows, report)


# rotation-check ------------------------------------------------------------------

_DRIVES = {"hadamard": rydberg.HADAMARD_PHASES, "rotation": rydberg.ROTATION_PHASES}


def run_rotation_check(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    phases = _DRIVES[cfg["drive"]]
    rows = []
    for phi in cfg.sweep.values():
        rot = rydberg.collective_rotation(phi, phases)
        rows.append((phi, rydberg.unitary_fidelity(rot.unitary, qsim.X.matrix),
                     rydberg.unitary_fidelity(rot.unitary, qsim.H.matrix), rot.leakage))
    fx = rydberg.unitary_fidelity(rydberg.collective_rotation(math.pi, phases).unitary, qsim.X.matrix)
    fh = rydberg.unitary_fidelity(rydberg.collective_rotation(math.pi / 2, phases).unitary, qsim.H.matrix)
    report = [f"drive={cfg['drive']} F_X(pi)={fx:.12f} F_H(pi/2)={fh:.12f}"]
    return ScenarioResult(["phi", "fidelity_X", "fidelity_H", "leakage"], rows, report)


# cluster-build ------------------------------------------------------------------


def run_cluster_build(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    n = cfg["n"]
    state = cluster.build_cluster_chain(n, seed=cfg.seed)
    F = qsim.fidelity(state, cluster.chain_closed_form(n))
    stab = cluster.stabilizer_expectations(state, cluster.chain_edges(n))
    rows = [(v, s) for v, s in enumerate(stab)]
    report = [f"n={n} fidelity={F:.12f} min_stabilizer={min(stab):.12f}"]
    return ScenarioResult(["site", "stabilizer"], rows, report)


# cluster-scaling ------------------------------------------------------------------


def _scaling_point(args):
    n, p, t0, trials, seed, accounting = args
    r = scaling.simulate_build_time(scaling.ClusterSpec(n, p, t0), trials, seed, accounting)
    return r.mean, r.std, r.analytic


def run_cluster_scaling(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    ns = cfg["n_values"]
    if len(ns) < 1:
        raise ValueError("n_values must list at least one size")
    # distinct streams per size derived from the master seed
    seeds = np.random.SeedSequence(cfg.seed).generate_state(len(ns))
    jobs = [(n, cfg["p"], cfg["t0"], cfg["trials"], int(s), cfg["accounting"]) for n, s in zip(ns, seeds)]
    res = pool_map(_scaling_point, jobs, workers)
    rows = [(n, m, s, a) for n, (m, s, a) in zip(ns, res)]
    report = []
    if len(ns) >= 2:
        slope = scaling.scaling_exponent(ns, [m for m, _, _ in res])
        report.append(f"slope={slope:.6f} log2(1/p)={math.log2(1 / cfg['p']):.6f}")
    return ScenarioResult(["n", "mean_time", "std_time", "analytic"], rows, report)


# nonlocal-cnot ------------------------------------------------------------------


def run_nonlocal_cnot(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    cols = ["input", "E1", "E2", "correction", "probability", "fidelity"]
    if cfg["exhaustive"]:
        inputs = ["00", "01", "10", "11"]
    else:
        inputs = [cfg["input"]]
    rows, exact, total = [], 0, 0
    for bits in inputs:
        psi = qsim.qubits(bits)
        want = qsim.apply_gate(psi, qsim.CNOT, [0, 1])
        if cfg["exhaustive"]:
            outcomes = [(e1, e2) for e1 in "01" for e2 in "+-"]
            results = [remote.nonlocal_cnot(psi, outcome=o) for o in outcomes]
        else:
            results = [remote.nonlocal_cnot(psi, seed=cfg.seed)]
        for r in results:
            F = qsim.fidelity(want, r.state.normalized())
            total += 1
            exact += abs(1 - F) <= 1e-12
            corr = " ".join(f"{p}{s}" for p, s in r.corrections) or "I"
            rows.append((bits, r.detections[0], r.detections[1], corr, r.probability, F))
    return ScenarioResult(cols, rows, [f"{exact}/{total} branches exact"])


# repeater-snr ------------------------------------------------------------------


def run_repeater_snr(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    R = remote.repeater_snr(cfg["N"], cfg["g"], cfg["kappa"], cfg["gamma_s"])
    return ScenarioResult(["N", "snr"], [(cfg["N"], R)], [f"snr={R:.6g}"])


# geometry-check ------------------------------------------------------------------


def run_geometry_check(cfg: ScenarioConfig, workers: int) -> ScenarioResult:
    dN = cfg["delta_N"]
    rep = rydberg.geometry_checks(cfg["N"], cfg["delta_r_perp"], cfg["wavelength"], cfg["n_g"], dN if dN >= 0 else None)
    cols = ["d_um", "reduced_wavelength_um", "d_over_reduced_wavelength", "r_g_um", "d_over_rg",
            "collective_dephasing_ok", "ground_state_overlap_ok", "fluctuation_ratio", "advisory"]
    row = (rep.d / UM, rep.reduced_wavelength / UM, rep.d_over_reduced_wavelength, rep.r_g / UM, rep.d_over_rg,
           rep.collective_dephasing_ok, rep.ground_state_overlap_ok,
           "" if rep.number_fluctuation_ratio is None else rep.number_fluctuation_ratio, rep.advisory)
    report = [
        f"d_um={rep.d / UM:.6g} d_over_reduced_wavelength={rep.d_over_reduced_wavelength:.6g} d_over_rg={rep.d_over_rg:.6g}",
        f"fluctuation={rep.advisory}",
    ]
    return ScenarioResult(cols, [row], report)


SCENARIOS = {
    s.name: s
    for s in (
        Scenario("pulse-sim", "Reflect one Gaussian pulse off the empty and coupled cavity.",
                 _keys(*CAVITY_KEYS, *DETUNING_KEYS, SAMPLES_KEY,
                       Key("T_over_kappa", "float", 120.0, "pulse duration in units of 1/kappa", positive)),
                 run_pulse_sim),
        Scenario("fidelity-sweep", "CPF gate fidelity versus pulse duration.",
                 _keys(*CAVITY_KEYS, *DETUNING_KEYS, SAMPLES_KEY), run_fidelity_sweep,
                 "float", SweepSpec(10.0, 120.0, 12), "pulse duration T in units of 1/kappa"),
        Scenario("loss-sweep", "Photon loss of the coupled branch versus g/kappa.",
                 _keys(*CAVITY_KEYS[1:], *DETUNING_KEYS, SAMPLES_KEY,
                       Key("T_over_kappa", "float", 120.0, "pulse duration in units of 1/kappa", positive)),
                 run_loss_sweep, "float", SweepSpec(1.0, 10.0, 10), "g in units of kappa"),
        Scenario("faraday-phase", "Reflection phases in the weak-coupling Faraday regime.",
                 _keys(Key("g_over_kappa", "float", 0.5, "coupling in units of kappa", non_negative),
                       Key("detuning", "float", -0.5, "probe detuning (omega_p - omega_c)/kappa"),
                       Key("atom_detuning", "float", 0.0, "atomic detuning (omega_0 - omega_c)/kappa"),
                       Key("gamma_over_kappa", "float", 0.0, "atomic linewidth in units of kappa", non_negative)),
                 run_faraday_phase, "float", SweepSpec(-2.0, 2.0, 0), "probe detuning in units of kappa"),
        Scenario("blockade-curve", "Foerster-resonance blockade potentials versus separation.",
                 _keys(Key("delta", "frequency", 20 * MHZ, "Foerster defect (fitted default)"),
                       Key("C3", "c3", 13000 * C3_UNIT, "resonant dipole coefficient (fitted default)", positive),
                       Key("D_phi", "float", rydberg.D_PHI_DEFAULT, "angular factor", positive),
                       Key("n", "int", 0, "principal quantum number (0 = unspecified)", non_negative),
                       Key("probe_R", "length", 5 * UM, "separation for the report line", positive)),
                 run_blockade_curve, "length", SweepSpec(1 * UM, 20 * UM, 40, "log"), "separation R"),
        Scenario("rotation-check", "Three-pulse collective rotation against X and H.",
                 _keys(Key("drive", "str", "hadamard", "drive phase set: hadamard or rotation", one_of(*_DRIVES))),
                 run_rotation_check, "float", SweepSpec(0.0, math.pi, 5), "nominal pulse area phi (rad)"),
        Scenario("cluster-build", "Assemble a linear cluster chain from photon-mediated CPF gates.",
                 _keys(Key("n", "int", 4, "chain length (2..16)", positive)), run_cluster_build),
        Scenario("cluster-scaling", "Monte Carlo build time of n-chains with probabilistic fusion.",
                 _keys(Key("p", "float", 0.5, "fusion success probability", probability),
                       Key("t0", "float", 1.0, "time per fusion attempt", positive),
                       Key("n_values", "ints", (4, 8, 16), "chain lengths"),
                       Key("trials", "int", 100000, "Monte Carlo trials per size", positive),
                       Key("accounting", "str", "parallel", "parallel or serial", one_of("parallel", "serial"))),
                 run_cluster_scaling),
        Scenario("nonlocal-cnot", "Remote CNOT via a shared ensemble pair.",
                 _keys(Key("exhaustive", "bool", False, "verify all 4 inputs x 4 outcomes"),
                       Key("input", "str", "10", "computational input bits (S1 S2)", one_of("00", "01", "10", "11"))),
                 run_nonlocal_cnot),
        Scenario("repeater-snr", "Signal-to-noise ratio 4 N g^2/(kappa gamma_s).",
                 _keys(Key("N", "float", 1000.0, "atom number", positive), *CAVITY_KEYS),
                 run_repeater_snr),
        Scenario("geometry-check", "Atom spacing against wavelength and Rydberg ground radius.",
                 _keys(Key("N", "float", 1000.0, "atom number", positive),
                       Key("delta_r_perp", "length", 5 * UM, "transverse cloud size", positive),
                       Key("wavelength", "length", 0.78 * UM, "optical wavelength", positive),
                       Key("n_g", "int", 5, "ground-state principal quantum number", positive),
                       Key("delta_N", "float", -1.0, "atom-number fluctuation (negative = not assessed)")),
                 run_geometry_check),
    )
}
