import math

import numpy as np
import pytest

from ulik.channel import ChannelParams, PowerControl
from ulik.errors import ZeroVarianceError
from ulik.gaussian_approx import (
    GaussianApprox,
    RegionMoments,
    SurrogateAccuracyWarning,
    interferer_gaussian,
    lognormal_exp_gaussian,
    region_moments,
    tau,
)
from ulik.geometry import Disk, Point
from ulik.streams import substream

VICTIM = Point(0.0, 0.0)
OWN = Point(0.03, 0.0)


def moments_for(region, params, pc, n=200_000, seed=0):
    return region_moments(region, OWN, VICTIM, params, pc, n, substream(seed, 0))


class TestLognormalExpGaussian:
    def test_surrogate_offsets(self):
        g = lognormal_exp_gaussian(GaussianApprox(0.0, 164.0))
        assert g.mean == pytest.approx(-2.5)
        assert g.variance == pytest.approx(195.0249)

    def test_smaller_shadowing(self):
        g = lognormal_exp_gaussian(GaussianApprox(0.0, 100.0))
        assert (g.mean, g.variance) == (pytest.approx(-2.5), pytest.approx(131.0249))

    def test_validity_warning_at_36(self):
        with pytest.warns(SurrogateAccuracyWarning):
            g = lognormal_exp_gaussian(GaussianApprox(5.0, 36.0))
        assert (g.mean, g.variance) == (pytest.approx(2.5), pytest.approx(67.0249))


class TestRegionMoments:
    def test_tiny_region_degenerate(self, params, pc):
        m = moments_for(Disk(Point(0.02, 0.005), 1e-9), params, pc, n=10_000)
        assert m.var_l == pytest.approx(0.0, abs=1e-9)
        assert m.abs3_l == pytest.approx(0.0, abs=1e-12)

    def test_eta_1_kills_reference_loss_term(self, pc):
        # with eta=1 the (eta-1)*A term vanishes, so A cannot matter
        region = Disk(OWN, 0.02)
        pc1 = PowerControl(-76.0, 1.0)
        a = region_moments(region, OWN, VICTIM, ChannelParams(103.8, 20.9, 100.0), pc1,
                           50_000, substream(3, 0))
        b = region_moments(region, OWN, VICTIM, ChannelParams(50.0, 20.9, 100.0), pc1,
                           50_000, substream(3, 0))
        assert a.mu_l == pytest.approx(b.mu_l, abs=1e-12)
        assert a.var_l == pytest.approx(b.var_l, abs=1e-12)

    def test_lyapunov_inequality(self, params, pc):
        for seed, radius in [(0, 0.01), (1, 0.02), (2, 0.04)]:
            m = moments_for(Disk(OWN, radius), params, pc, seed=seed)
            assert m.abs3_l >= m.var_l**1.5

    def test_std_error_scaling(self, params, pc):
        region = Disk(OWN, 0.02)
        ratios = []
        for seed in range(8):
            a = region_moments(region, OWN, VICTIM, params, pc, 50_000, substream(seed, 0))
            b = region_moments(region, OWN, VICTIM, params, pc, 100_000, substream(seed, 1))
            ratios.append(b.std_errors[0] / a.std_errors[0])
        assert np.mean(ratios) == pytest.approx(1 / math.sqrt(2), rel=0.2)


class TestTau:
    def test_constant_region_zero(self):
        m = RegionMoments(mu_l=-20.0, var_l=0.0, abs3_l=0.0, std_errors=(0, 0, 0),
                          sample_count=1000)
        cert = tau(m, GaussianApprox(-2.5, 195.0))
        assert cert.tau == 0.0
        assert cert.passes

    def test_gaussian_case_closed_form(self):
        # L Gaussian with variance equal to g's: tau = 0.56*2*sqrt(2/pi)/2^1.5
        for var in (4.0, 25.0, 195.0):
            abs3 = 2.0 * math.sqrt(2.0 / math.pi) * var**1.5
            m = RegionMoments(0.0, var, abs3, (0, 0, 0), 1)
            cert = tau(m, GaussianApprox(0.0, var))
            assert cert.tau == pytest.approx(0.3160, abs=5e-4)

    def test_shift_invariance_under_a_offset(self, params, pc):
        region = Disk(OWN, 0.02)
        g = GaussianApprox(-2.5, 195.0249)
        t = []
        for a_db in (103.8, 120.0):
            p = ChannelParams(a_db, params.alpha, params.sigma_shad_sq)
            m = region_moments(region, OWN, VICTIM, p, pc, 100_000, substream(5, 0))
            t.append(tau(m, g).tau)
        assert t[0] == pytest.approx(t[1], rel=1e-9)

    def test_decreasing_in_g_variance(self, params, pc):
        m = moments_for(Disk(OWN, 0.02), params, pc, n=50_000)
        taus = [tau(m, GaussianApprox(-2.5, v)).tau for v in (100.0, 164.0, 300.0)]
        assert taus[0] > taus[1] > taus[2]

    def test_threshold_flag(self):
        m = RegionMoments(0.0, 4.0, 2.0 * math.sqrt(2 / math.pi) * 8.0, (0, 0, 0), 1)
        cert = tau(m, GaussianApprox(0.0, 4.0), threshold=0.5)
        assert cert.passes == (cert.tau <= 0.5)
        assert not tau(m, GaussianApprox(0.0, 4.0), threshold=0.01).passes

    def test_zero_variance_error(self):
        m = RegionMoments(0.0, 0.0, 0.0, (0, 0, 0), 1)
        with pytest.raises(ZeroVarianceError):
            tau(m, GaussianApprox(0.0, 0.0))


class TestInterfererGaussian:
    def test_direct_sum(self):
        m = RegionMoments(0.0, 0.0, 0.0, (0, 0, 0), 1)
        q = interferer_gaussian(-76.0, m, GaussianApprox(-2.5, 195.02))
        assert (q.mean, q.variance) == (pytest.approx(-78.5), pytest.approx(195.02))

    def test_additive_identity(self):
        m = RegionMoments(0.0, 0.0, 0.0, (0, 0, 0), 1)
        q = interferer_gaussian(0.0, m, GaussianApprox(0.0, 0.0))
        assert (q.mean, q.variance) == (0.0, 0.0)

    def test_components_add(self):
        m = RegionMoments(-12.5, 8.0, 40.0, (0, 0, 0), 1)
        q = interferer_gaussian(-76.0, m, GaussianApprox(-2.5, 195.0249))
        assert q.mean == pytest.approx(-91.0)
        assert q.variance == pytest.approx(203.0249)
