import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impsoh.ecm import (
    EcmParams,
    Regime,
    ecm_impedance,
    reduced_impedance,
    soh_from_capacity,
    sweep,
    warburg_impedance,
)

TABLE_946 = EcmParams(
    r0_ohm=14.7e-3, r1_ohm=1.9e-3, r2_ohm=2.1e-3,
    aw_ohm_sqrt_rad_s=2.5e-3, c1_f=1.2, c2_f=0.24,
)
TABLE_768 = EcmParams(
    r0_ohm=17.9e-3, r1_ohm=11.5e-3, r2_ohm=3.7e-3,
    aw_ohm_sqrt_rad_s=4.1e-3, c1_f=5.2, c2_f=0.34,
)

log_params = st.builds(
    EcmParams,
    r0_ohm=st.floats(1e-4, 1.0),
    r1_ohm=st.floats(1e-4, 1.0),
    r2_ohm=st.floats(1e-4, 1.0),
    aw_ohm_sqrt_rad_s=st.floats(1e-4, 1.0),
    c1_f=st.floats(1e-2, 100.0),
    c2_f=st.floats(1e-2, 100.0),
)


class TestWarburg:
    def test_unit_values(self):
        z = warburg_impedance(1.0, 2.0)
        assert z == pytest.approx(complex(0.5, -0.5))
        z = warburg_impedance(1.0, 0.5)
        assert z == pytest.approx(complex(1.0, -1.0))

    def test_table_row_value(self):
        # independent evaluation: 2.5e-3 / sqrt(j*0.1)
        expected = 2.5e-3 / cmath.sqrt(0.1j)
        z = warburg_impedance(2.5e-3, 0.1)
        assert z.real == pytest.approx(expected.real, rel=1e-12)
        assert z.imag == pytest.approx(expected.imag, rel=1e-12)
        assert z.real == pytest.approx(5.59016994e-3, rel=1e-6)

    @given(aw=st.floats(1e-6, 1e3), omega=st.floats(1e-6, 1e9))
    def test_real_equals_minus_imag(self, aw, omega):
        z = warburg_impedance(aw, omega)
        assert z.real == -z.imag

    @given(aw=st.floats(1e-6, 1e3), omega=st.floats(1e-6, 1e9))
    def test_magnitude(self, aw, omega):
        assert abs(warburg_impedance(aw, omega)) == pytest.approx(aw / math.sqrt(omega))

    @pytest.mark.parametrize("aw,omega", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_rejects_non_positive(self, aw, omega):
        with pytest.raises(ValueError):
            warburg_impedance(aw, omega)


class TestEcmImpedance:
    def test_high_frequency_limit_is_r0(self):
        z = ecm_impedance(TABLE_946, 1e9)
        assert z.real == pytest.approx(14.7e-3, rel=1e-3)
        assert abs(z.imag) < 1e-5

    def test_high_frequency_limit_generic(self):
        z = ecm_impedance(TABLE_768, 1e12)
        assert z.real == pytest.approx(TABLE_768.r0_ohm, rel=1e-6)
        assert abs(z.imag) < 1e-8

    def test_low_frequency_matches_reduction(self):
        omega = 0.05
        full = ecm_impedance(TABLE_768, omega)
        red = reduced_impedance(TABLE_768, omega, Regime.LOW)
        assert full.real == pytest.approx(red.real, rel=0.05)
        assert full.imag == pytest.approx(red.imag, rel=0.05)

    @given(p=log_params, omega=st.floats(1e-4, 1e8))
    @settings(max_examples=200)
    def test_passive_network(self, p, omega):
        z = ecm_impedance(p, omega)
        assert z.real >= p.r0_ohm - 1e-12
        assert z.imag <= 1e-12

    @given(p=log_params, omega=st.floats(1e-3, 1e6))
    def test_continuity(self, p, omega):
        z0 = ecm_impedance(p, omega)
        z1 = ecm_impedance(p, omega * 1.001)
        assert abs(z1 - z0) / abs(z0) < 1e-3

    def test_rejects_bad_omega(self):
        with pytest.raises(ValueError):
            ecm_impedance(TABLE_946, 0.0)


class TestReducedImpedance:
    def test_high_is_r0(self):
        assert reduced_impedance(TABLE_946, 123.0, Regime.HIGH) == complex(14.7e-3, 0.0)

    def test_low_series_sum(self):
        p = EcmParams(r0_ohm=1.0, r1_ohm=2.0, r2_ohm=3.0,
                      aw_ohm_sqrt_rad_s=1.0, c1_f=1.0, c2_f=1.0)
        z = reduced_impedance(p, 2.0, Regime.LOW)
        assert z == pytest.approx(complex(6.5, -0.5))

    def test_mid2_parallel_rc(self):
        p = EcmParams(r0_ohm=1.0, r1_ohm=1.0, r2_ohm=2.0,
                      aw_ohm_sqrt_rad_s=1.0, c1_f=1.0, c2_f=0.5)
        z = reduced_impedance(p, 1.0, Regime.MID2)
        assert z == pytest.approx(complex(2.0, -1.0))

    @pytest.mark.parametrize("regime,omega_ratio", [
        (Regime.HIGH, 1e6),
        (Regime.LOW, 1e-6),
    ])
    def test_asymptotic_agreement(self, regime, omega_ratio):
        # 4+ decades beyond the mid-band time constants
        for p in (TABLE_946, TABLE_768):
            omega = omega_ratio / (p.r1_ohm * p.c1_f)
            full = ecm_impedance(p, omega)
            red = reduced_impedance(p, omega, regime)
            assert abs(full - red) / abs(full) < 0.05

    def test_mid_regime_agreement(self):
        # MID1/MID2 asymptotes with the widely separated time constants of
        # an artificial cell: tau1 = 1e3 s, tau2 = 1e-3 s.
        p = EcmParams(r0_ohm=1.0, r1_ohm=1.0, r2_ohm=1.0,
                      aw_ohm_sqrt_rad_s=1e-4, c1_f=1e3, c2_f=1e-3)
        for regime, omega in ((Regime.MID1, 1e-3), (Regime.MID2, 1e3)):
            full = ecm_impedance(p, omega)
            red = reduced_impedance(p, omega, regime)
            assert abs(full - red) / abs(full) < 0.05


class TestSohFromCapacity:
    def test_values(self):
        assert soh_from_capacity(4.0, 4.0) == 1.0
        assert soh_from_capacity(3.2, 4.0) == pytest.approx(0.8)
        assert soh_from_capacity(4.1, 4.0) == pytest.approx(1.025)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            soh_from_capacity(0.0, 4.0)
        with pytest.raises(ValueError):
            soh_from_capacity(4.0, -1.0)


class TestSweep:
    def test_single_element(self):
        [s] = sweep(TABLE_946, [1.0])
        assert s.omega_rad_s == 1.0
        assert s.z == ecm_impedance(TABLE_946, 1.0)

    def test_empty(self):
        assert sweep(TABLE_946, []) == []

    def test_order_preserved_and_asymptotes(self):
        import numpy as np

        omegas = np.logspace(-2, 4, 60)
        samples = sweep(TABLE_946, omegas)
        assert len(samples) == 60
        assert [s.omega_rad_s for s in samples] == list(omegas)
        res = [s.z.real for s in samples]
        # real part decreases with frequency at both extremes
        assert res[0] > res[1] > res[2]
        assert res[-3] > res[-2] > res[-1]

    def test_error_names_offending_index(self):
        with pytest.raises(ValueError, match=r"omega\[1\]"):
            sweep(TABLE_946, [1.0, -2.0])


class TestParamValidation:
    def test_rejects_non_positive_field(self):
        with pytest.raises(ValueError, match="c1_f"):
            EcmParams(r0_ohm=1.0, r1_ohm=1.0, r2_ohm=1.0,
                      aw_ohm_sqrt_rad_s=1.0, c1_f=0.0, c2_f=1.0)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            EcmParams(r0_ohm=math.nan, r1_ohm=1.0, r2_ohm=1.0,
                      aw_ohm_sqrt_rad_s=1.0, c1_f=1.0, c2_f=1.0)

    def test_feature_round_trip(self):
        assert EcmParams.from_features(TABLE_946.as_features()) == TABLE_946
