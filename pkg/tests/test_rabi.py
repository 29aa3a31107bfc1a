import math

import numpy as np
import pytest

from qrabi.errors import ValidationError
from qrabi.model import BandLabel, ModelParams
from qrabi.rabi import (
    INTERBAND,
    INTRABAND,
    RabiResult,
    TransitionSpec,
    detuning,
    rabi_asymptotic,
    rabi_frequency,
    rwa_pair_evolution,
    transition_table,
)

from oracles import displacement_expm

P = ModelParams(omega=1.0, delta=0.6, g=0.55)


def spec_of(n, s, m, sp):
    return TransitionSpec(BandLabel(n, s), BandLabel(m, sp))


class TestTransitionSpec:
    def test_kind_and_diff(self):
        s = spec_of(2, 1, 5, -1)
        assert s.kind == INTERBAND
        assert s.diff == 3
        assert s.allowed()
        s = spec_of(4, -1, 2, -1)
        assert s.kind == INTRABAND
        assert s.diff == -2
        assert s.allowed()

    def test_parity_forbidden(self):
        assert not spec_of(2, 1, 4, -1).allowed()  # interband, even diff
        assert not spec_of(2, 1, 3, 1).allowed()  # intraband, odd diff


class TestDetuning:
    def test_identical_labels(self):
        assert detuning(spec_of(3, 1, 3, 1), P) == 0.0

    def test_delta_zero_leaves_photon_mismatch(self):
        p = ModelParams(omega=1.0, delta=0.0, g=0.7)
        # bands collapse, the residual is the free-energy mismatch (n - m) w
        assert detuning(spec_of(2, 1, 1, -1), p) == pytest.approx(1.0)
        assert detuning(spec_of(1, 1, 4, 1), p) == pytest.approx(-3.0)

    def test_closed_form_plugin(self):
        p = ModelParams(omega=1.0, delta=1.0, g=1.0)
        from qrabi.dressed import band_energy

        s = spec_of(2, 1, 1, -1)
        want = (
            band_energy(BandLabel(2, 1), p)
            - band_energy(BandLabel(1, -1), p)
            + 1.0  # diff = -1
        )
        assert detuning(s, p) == pytest.approx(want, rel=1e-14)

    def test_antisymmetric_under_reversal(self):
        s = spec_of(3, 1, 6, -1)
        assert detuning(s, P) == pytest.approx(-detuning(s.reversed(), P))


class TestRabiFrequency:
    def test_forbidden_is_exact_zero(self):
        for n in range(0, 31):
            for m in range(0, 31):
                if (m - n) % 2 == 0:
                    assert rabi_frequency(spec_of(n, 1, m, -1), P).frequency == 0.0
                else:
                    assert rabi_frequency(spec_of(n, 1, m, 1), P).frequency == 0.0

    def test_intraband_zero_coupling_gives_delta(self):
        p = ModelParams(omega=1.0, delta=0.6, g=0.0)
        assert rabi_frequency(spec_of(7, 1, 7, 1), p).frequency == pytest.approx(0.6)

    def test_interband_lowest_hand_value(self):
        # n = 0, diff = 1: R = delta theta e^{-theta^2/2}; frozen at theta = 2
        p = ModelParams(omega=1.0, delta=1.0, g=1.0)
        r = rabi_frequency(spec_of(0, 1, 1, -1), p)
        assert r.frequency == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)
        assert r.frequency == pytest.approx(0.2706705664732254, rel=1e-12)

    def test_reversal_symmetry(self):
        for s in (spec_of(3, 1, 6, -1), spec_of(8, -1, 4, -1), spec_of(0, 1, 5, -1)):
            assert rabi_frequency(s, P).frequency == pytest.approx(
                rabi_frequency(s.reversed(), P).frequency, rel=1e-14
            )

    @pytest.mark.parametrize("theta", [0.4, 1.0, 2.0])
    def test_sinh_cosh_oracle(self, theta):
        # R = delta |<n| sinh[theta (a-adag)] |m>|, R' the cosh analogue
        k = 12
        p = ModelParams(omega=1.0, delta=0.6, g=theta / 2.0)
        n_max = k + 30 + int(10 * theta * theta)
        dp = displacement_expm(n_max, theta)
        dm = displacement_expm(n_max, -theta)
        sinh_mat = 0.5 * (dm - dp)  # exp(theta(a-adag)) = D(-theta)
        cosh_mat = 0.5 * (dm + dp)
        for n in range(0, k + 1, 3):
            for m in range(0, k + 1, 2):
                inter = rabi_frequency(spec_of(n, 1, m, -1), p).frequency
                intra = rabi_frequency(spec_of(n, 1, m, 1), p).frequency
                assert inter == pytest.approx(
                    p.delta * abs(sinh_mat[n, m]), abs=1e-9
                )
                assert intra == pytest.approx(
                    p.delta * abs(cosh_mat[n, m]), abs=1e-9
                )

    def test_result_metadata(self):
        r = rabi_frequency(spec_of(9, 1, 4, -1), P)
        assert r.bessel_order == 5
        assert r.bessel_argument == pytest.approx(4.0 * 2.0 * P.g / P.omega)
        assert isinstance(r, RabiResult)


class TestRabiAsymptotic:
    def test_zero_coupling(self):
        p = ModelParams(omega=1.0, delta=0.6, g=0.0)
        assert rabi_asymptotic(spec_of(5, 1, 6, -1), p) == 0.0
        assert rabi_asymptotic(spec_of(5, 1, 5, 1), p) == pytest.approx(0.6)

    def test_forbidden_returns_zero_by_convention(self):
        assert rabi_asymptotic(spec_of(5, 1, 7, -1), P) == 0.0

    def test_converges_to_exact_at_fixed_argument(self):
        # hold 4 sqrt(n) g/w = 1 while n grows; exact -> delta |J_1(1)|
        devs = []
        for n in (25, 400):
            p = ModelParams(omega=1.0, delta=1.0, g=1.0 / (4.0 * math.sqrt(n)))
            r = rabi_frequency(spec_of(n, 1, n + 1, -1), p)
            assert r.bessel_argument == pytest.approx(1.0)
            devs.append(abs(r.frequency - r.asymptotic) / r.asymptotic)
        assert devs[1] < devs[0]
        assert devs[1] < 1e-2


class TestRwaPairEvolution:
    SPEC = spec_of(2, 1, 3, -1)

    def test_t_zero_identity(self):
        a, b = rwa_pair_evolution(self.SPEC, 0.3 + 0.1j, 0.2j, 0.0, P)
        assert a == 0.3 + 0.1j
        assert b == 0.2j

    def test_half_period_full_transfer(self):
        r = rabi_frequency(self.SPEC, P).frequency
        a, b = rwa_pair_evolution(self.SPEC, 0.6, 0.0, math.pi / r, P)
        assert abs(a) < 1e-12
        assert b == pytest.approx(-0.6j, abs=1e-12)

    def test_probability_conserved_exactly(self):
        a0, b0 = 0.52 + 0.11j, -0.3 + 0.4j
        p0 = abs(a0) ** 2 + abs(b0) ** 2
        for t in np.linspace(0.0, 200.0, 37):
            a, b = rwa_pair_evolution(self.SPEC, a0, b0, float(t), P)
            assert abs(a) ** 2 + abs(b) ** 2 == pytest.approx(p0, abs=1e-14)

    def test_forbidden_rejected(self):
        with pytest.raises(ValidationError):
            rwa_pair_evolution(spec_of(2, 1, 4, -1), 0.1, 0.0, 1.0, P)

    def test_large_m_truncated_form(self):
        # pair populated from |0>|g>: (m, +1) odd m with (m+1, -1);
        # when the cross ratio sqrt(m!/(m+1)!)(g/w) is small the exact pair
        # solution collapses to the single-cosine / single-sine envelope
        m = 9
        p = ModelParams(omega=1.0, delta=0.6, g=0.002)
        gw = p.g / p.omega
        ratio = gw / math.sqrt(m + 1.0)
        assert ratio < 1e-3
        pref = math.exp(-0.5 * gw * gw)
        a_m0 = pref * gw**m / math.sqrt(math.factorial(m))
        a_n0 = -pref * gw ** (m + 1) / math.sqrt(math.factorial(m + 1))
        spec = spec_of(m, 1, m + 1, -1)
        r = rabi_frequency(spec, p).frequency
        for frac in (0.1, 0.25, 0.6):
            t = 2.0 * math.pi * frac / r
            a, b = rwa_pair_evolution(spec, a_m0, a_n0, t, p)
            trunc_a = a_m0 * math.cos(0.5 * r * t)
            trunc_b = -1j * a_m0 * math.sin(0.5 * r * t)
            assert abs(a - trunc_a) <= 2.0 * ratio * abs(a_m0)
            assert abs(b - trunc_b) <= 2.0 * ratio * abs(a_m0)


class TestTransitionTable:
    def test_max_diff_zero_gives_intraband_only(self):
        rows = transition_table(P, range(4), 0)
        assert len(rows) == 4
        for row in rows:
            assert row.spec.kind == INTRABAND
            assert row.spec.diff == 0

    def test_entry_count(self):
        rows = transition_table(P, range(10, 17), 2)
        assert len(rows) == 3 * 7  # diff 0, 1, 2 per n

    def test_zero_coupling_column(self):
        p = ModelParams(omega=1.0, delta=0.6, g=0.0)
        for row in transition_table(p, range(5), 3):
            if row.spec.kind == INTERBAND:
                assert row.frequency == 0.0
            elif row.spec.diff == 0:
                assert row.frequency == pytest.approx(0.6)

    def test_sorted_by_n_then_diff(self):
        rows = transition_table(P, [3, 1, 2], 1)
        keys = [(r.spec.from_label.n, r.spec.diff) for r in rows]
        assert keys == sorted(keys)

    def test_empty_range_rejected(self):
        with pytest.raises(ValidationError):
            transition_table(P, [], 2)
