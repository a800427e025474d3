"""
Tests for the complexity and throughput models
"""
from fractions import Fraction

import pytest

from f3dc.errors import GeometryError
from f3dc.models.perf import HardwareConfig, OpConvention
from f3dc.services.perf_model import (
    density_comparison,
    fpa_estimate,
    mu,
    speedup_vs_zim,
    table1,
    throughput_model,
)
from tests.helpers import layer


class TestMu:
    def test_printed_values(self):
        assert mu(4, 2, 3) == Fraction(512, 216)
        assert round(float(mu(3, 2, 3)), 2) == 1.59
        assert round(float(mu(9, 2, 3)), 2) == 10.17

    def test_stride_one_order_one(self):
        for k in range(1, 6):
            assert mu(k, 1, 1) == k ** 3

    def test_invalid(self):
        with pytest.raises(GeometryError):
            mu(0, 2, 3)


class TestTable1:
    def test_rows(self):
        rows = table1()
        assert [row.k for row in rows] == [3, 4, 5, 9]
        assert [row.zim for row in rows] == [27, 64, 125, 729]
        assert [float(row.winograd_based) for row in rows] == [3.375, 8.0, 15.625, 91.125]
        printed = [1.59, 2.37, 3.375, 10.17]
        for row, value in zip(rows, printed):
            assert abs(round(float(row.f3dc), 3) - value) <= 0.005

    def test_ordering(self):
        for row in table1():
            assert row.f3dc <= row.winograd_based <= row.zim

    def test_27x_reduction(self):
        assert mu(4, 2, 3) * 27 == 64
        assert speedup_vs_zim(4, 2, 3) == 27
        assert round(float(speedup_vs_zim(5, 2, 3)), 2) == 37.04
        assert speedup_vs_zim(2, 2, 1) == 8


class TestThroughput:
    def test_default_profile(self):
        report = throughput_model(HardwareConfig(), 4, 2, 3)
        assert report.peak_mult_rate == pytest.approx(3.072e11)
        assert report.equiv_valid_gops == pytest.approx(2073.6, abs=0.1)
        assert report.equiv_zim_gops == pytest.approx(2073.6 * 8, abs=1)
        assert report.utilization_for(1700) == pytest.approx(0.8198, abs=0.0005)
        assert report.density_for(1700) == pytest.approx(0.830, abs=0.001)

    def test_utilization_recovers_target(self):
        report = throughput_model(HardwareConfig(), 4, 2, 3)
        for convention in OpConvention:
            for target in (100.0, 1700.0, 5000.0):
                assert report.utilization_for(target, convention) * report.peak_gops(convention) == pytest.approx(target)
        assert report.utilization_for(1000) < report.utilization_for(1700)

    def test_linear_in_hardware(self):
        base = throughput_model(HardwareConfig(), 4, 2, 3)
        scaled = throughput_model(HardwareConfig(dsp_total=1024, clock_hz=300e6), 4, 2, 3)
        assert scaled.equiv_valid_gops == pytest.approx(base.equiv_valid_gops)

    def test_array_shape_must_match_fpu_count(self):
        with pytest.raises(ValueError):
            HardwareConfig(fpu_count=3)

    def test_from_settings_overrides(self):
        hw = HardwareConfig.from_settings(dsp_total=1536, clock_hz=None)
        assert hw.dsp_total == 1536
        assert hw.clock_hz == 150e6


class TestFpaEstimate:
    def test_rounds_and_latency(self, ts):
        estimate = fpa_estimate(layer(c_in=4, c_out=4, i=6), ts, HardwareConfig())
        assert estimate.rounds == 8 * 2 * 2
        assert estimate.cycles == estimate.rounds
        assert estimate.latency_s == pytest.approx(32 / 150e6)
        assert estimate.multiplier_utilization == pytest.approx(1.0)
        # crop-free layer at full utilization runs at the modelled peak
        peak = throughput_model(HardwareConfig(), 4, 2, 3)
        assert estimate.valid_gops == pytest.approx(peak.equiv_valid_gops)

    def test_odd_channels_leave_idle_fpus(self, ts):
        estimate = fpa_estimate(layer(c_in=1, c_out=1, i=3), ts, HardwareConfig())
        assert estimate.rounds == 1
        assert estimate.multiplier_utilization == pytest.approx(0.25)


def test_density_comparison():
    rows = {row.design: row for row in density_comparison(1700, 2048)}
    assert round(rows["fft_3d_cnn"].density, 2) == 0.56
    assert round(rows["winograd_transposed_conv"].density, 2) == 0.19
    assert round(rows["iom_3d_deconv"].density, 2) == 0.20
    assert round(rows["f3dc"].density, 2) == 0.83
    assert rows["iom_3d_deconv"].f3dc_gain == pytest.approx(4.25, abs=0.01)
