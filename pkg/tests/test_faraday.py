import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ensemble_qip import faraday, qsim
from ensemble_qip.faraday import ProbeParams


def steady_state_oracle(p: ProbeParams, coupled: bool) -> complex:
    """Solve the driven cavity-atom steady state and return ``1 - sqrt(kappa) a / a_in``."""
    dc = 1j * (p.omega_c - p.omega_p) + p.kappa / 2
    da = 1j * (p.omega_0 - p.omega_p) + p.gamma / 2
    g = p.g if coupled else 0.0
    M = np.array([[dc, 1j * g], [1j * g, da]])
    a, _ = np.linalg.solve(M, [math.sqrt(p.kappa), 0.0])
    return 1 - math.sqrt(p.kappa) * a


class TestReflectionCoefficient:
    def test_operating_point_values(self):
        p = faraday.OPERATING_POINT
        assert faraday.reflection_coefficient(p, True) == pytest.approx(-1.0)
        assert faraday.reflection_coefficient(p, False) == pytest.approx(1j)

    @settings(max_examples=60, deadline=None)
    @given(
        g=st.floats(0.01, 5),
        dp=st.floats(-3, 3),
        d0=st.floats(-3, 3),
        gamma=st.floats(0.01, 2),
        coupled=st.booleans(),
    )
    def test_matches_linear_solve(self, g, dp, d0, gamma, coupled):
        p = ProbeParams.in_kappa_units(g, dp, d0, gamma)
        assert faraday.reflection_coefficient(p, coupled) == pytest.approx(steady_state_oracle(p, coupled), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(g=st.floats(0, 5), dp=st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3), d0=st.floats(-3, 3))
    def test_lossless_is_unit_modulus(self, g, dp, d0):
        p = ProbeParams.in_kappa_units(g, dp, d0 if abs(d0 - dp) > 1e-3 else d0 + 0.1)
        assert abs(faraday.reflection_coefficient(p, True)) == pytest.approx(1.0)

    def test_zero_coupling_equals_empty_cavity(self):
        p = ProbeParams.in_kappa_units(g=0.0, probe_detuning=0.3)
        assert faraday.reflection_coefficient(p, True) == faraday.reflection_coefficient(p, False)

    def test_atom_resonant_with_probe_stays_finite(self):
        # the dressed denominator reduces to g^2 here, so the reflection is exactly +1
        p = ProbeParams.in_kappa_units(g=0.5, probe_detuning=0.0, atom_detuning=0.0)
        assert faraday.reflection_coefficient(p, True) == pytest.approx(1.0)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            ProbeParams(0, 0, 0, 1, kappa=0)
        with pytest.raises(ValueError):
            ProbeParams(0, 0, 0, 1, kappa=1, gamma=-1)


class TestPhases:
    def test_operating_point(self):
        ph = faraday.faraday_phases(faraday.OPERATING_POINT)
        assert ph.phi == pytest.approx(math.pi, abs=1e-12)
        assert ph.phi0 == pytest.approx(math.pi / 2, abs=1e-12)
        assert ph.difference == pytest.approx(math.pi / 2)

    def test_principal_range(self):
        assert faraday._principal(-math.pi) == math.pi
        assert faraday._principal(3 * math.pi / 2) == pytest.approx(-math.pi / 2)

    def test_sweep_unwrapped_is_continuous(self):
        _, phi, phi0 = faraday.phase_sweep(faraday.OPERATING_POINT, np.linspace(-3, 3, 601))
        assert np.max(np.abs(np.diff(phi0))) < 0.1
        assert np.max(np.abs(np.diff(phi))) < 0.5

    def test_sweep_wrapped_in_principal_range(self):
        _, phi, phi0 = faraday.phase_sweep(faraday.OPERATING_POINT, np.linspace(-3, 3, 61), unwrap=False)
        assert np.all(np.abs(phi) <= math.pi) and np.all(np.abs(phi0) <= math.pi)

    def test_empty_cavity_phase_winds_by_two_pi(self):
        _, _, phi0 = faraday.phase_sweep(faraday.OPERATING_POINT, np.linspace(-200, 200, 4001))
        assert abs(phi0[-1] - phi0[0]) == pytest.approx(2 * math.pi, abs=0.02)


class TestTwiceReflection:
    def test_operating_point_is_cpf(self):
        gate, F = faraday.twice_reflection_cpf(faraday.OPERATING_POINT)
        assert F == pytest.approx(1.0, abs=1e-12)
        assert qsim.Gate(gate.matrix, (2, 2)).arity == 2
        # equal to CPF_0H up to a global phase
        ratio = np.diag(gate.matrix) / np.diag(qsim.CPF_0H.matrix)
        np.testing.assert_allclose(ratio, ratio[0])

    def test_no_atom_coupling_is_not_a_gate(self):
        _, F = faraday.twice_reflection_cpf(ProbeParams.in_kappa_units(g=0.0))
        assert F == pytest.approx(0.5)

    @settings(max_examples=40, deadline=None)
    @given(g=st.floats(0.05, 3), dp=st.floats(-2, 2).filter(lambda x: abs(x) > 1e-2))
    def test_gate_is_diagonal_unitary(self, g, dp):
        gate = faraday.twice_reflection_gate(ProbeParams.in_kappa_units(g, dp))
        m = gate.matrix
        np.testing.assert_allclose(m, np.diag(np.diag(m)))
        np.testing.assert_allclose(np.abs(np.diag(m)), 1.0)
