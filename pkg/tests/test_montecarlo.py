import math

import numpy as np
import pytest

from hetsec.analytic import Combiner, SystemConfig, sop
from hetsec.channel import FadingDraw, RngStream, sample_fading
from hetsec.errors import DomainError
from hetsec.montecarlo import (
    CellEstimates,
    SopEstimate,
    capacities,
    capacities_ic,
    capacities_il,
    capacities_oss,
    estimate_cells,
    estimate_sop,
    estimate_sop_exact_ic_macro,
    ic_cancellation_residual,
    ic_power_state,
)

UNIT = dict(Mm=[2.0], Ms=[0.5], Ss=[3.0], Sm=[0.25], Me=[1.0], Se=[0.5])


def within(est, ref, k=4.0):
    return abs(est.p_hat - ref) <= k * max(est.stderr, 1.0 / est.n)


class TestCapacities:
    def test_oss(self, geometry_gains):
        cfg = SystemConfig(gamma_M=10.0, beta=0.5, alpha_split=0.25)
        caps = capacities_oss(UNIT, cfg, geometry_gains)
        assert caps.c_main_macro[0] == pytest.approx(0.25 * math.log2(21.0))
        assert caps.c_eve_macro[0] == pytest.approx(0.25 * math.log2(11.0))
        assert caps.c_main_small[0] == pytest.approx(0.75 * math.log2(16.0))
        assert caps.c_eve_small[0] == pytest.approx(0.75 * math.log2(3.5))

    def test_il(self, geometry_gains):
        cfg = SystemConfig(gamma_M=10.0, beta=0.5)
        caps = capacities_il(UNIT, cfg, geometry_gains)
        assert caps.c_main_macro[0] == pytest.approx(math.log2(1 + 20.0 / 2.25))
        assert caps.c_main_small[0] == pytest.approx(math.log2(1 + 15.0 / 6.0))
        assert caps.c_eve_macro[0] == pytest.approx(math.log2(1 + 10.0 / 3.5))
        assert caps.c_eve_small[0] == pytest.approx(math.log2(1 + 2.5 / 11.0))

    def test_ic(self, fig2_gains):
        # fig2 gains: all unit except sigma2_Sm = 0.2
        cfg = SystemConfig(gamma_M=10.0, beta=0.5)
        state = ic_power_state(UNIT, cfg, fig2_gains)
        assert state.gamma_bar_m == pytest.approx(0.2 * 5.0)
        assert state.gamma_m[0] == pytest.approx(0.25 * 5.0)
        caps = capacities_ic(UNIT, cfg, fig2_gains)
        info, gm, sig = 9.0, 1.25, 5.0 * 2.0
        assert caps.c_main_macro[0] == pytest.approx(math.log2(1 + 2.0 * info))
        assert caps.c_eve_macro[0] == pytest.approx(
            math.log2(1 + info / (gm + 0.5 * sig + 1.0)))
        assert caps.c_main_small[0] == pytest.approx(
            math.log2(1 + 3.0 * sig / (0.5 * (info + gm) + 1.0)))
        assert caps.c_eve_small[0] == pytest.approx(
            math.log2(1 + 0.5 * sig / ((info + gm) + 1.0)))

    def test_secrecy_clipped_at_zero(self, geometry_gains):
        caps = capacities("OSS", dict(UNIT, Me=[100.0]), SystemConfig(10.0), geometry_gains)
        assert caps.secrecy_macro()[0] == 0.0
        assert caps.secrecy_small()[0] > 0.0


@pytest.fixture(scope="module")
def draw(geometry_gains):
    return sample_fading(geometry_gains, RngStream(21), n=10 ** 4)


class TestCancellation:
    def test_residual_vanishes(self, draw, geometry_gains):
        cfg = SystemConfig.from_db(100)
        res = ic_cancellation_residual(draw, cfg, geometry_gains)
        scale = math.sqrt(cfg.gamma_S) * np.abs(draw.Sm) * np.abs(draw.Mm) / math.sqrt(geometry_gains.Mm)
        assert np.all(res <= 1e-12 * scale)

    def test_no_interference_link(self, geometry_gains):
        d = FadingDraw.from_powers(phases={"Mm": 1.0, "Sm": 2.0},
                                   **dict(UNIT, Sm=[0.0]))
        assert ic_cancellation_residual(d, SystemConfig(1e6), geometry_gains)[0] == 0.0

    def test_phase_error_leaves_residual(self, draw, geometry_gains):
        cfg = SystemConfig.from_db(100)
        res = ic_cancellation_residual(draw, cfg, geometry_gains, phase_error=0.01)
        assert np.all(res[np.abs(draw.Sm) > 0] > 0)

    def test_instantaneous_power_mean(self, geometry_gains):
        cfg = SystemConfig.from_db(100)
        draw = sample_fading(geometry_gains, RngStream(22), n=10 ** 6)
        state = ic_power_state(draw, cfg, geometry_gains)
        stderr = state.p_m.std() / math.sqrt(state.p_m.size)
        assert abs(state.p_m.mean() - state.p_bar_m) <= 4 * stderr


class TestEstimators:
    def test_single_draw(self, geometry_gains):
        est = estimate_sop("OSS", "macro", SystemConfig.from_db(80), geometry_gains, 1, RngStream(0))
        assert est.n == 1 and est.stderr == 0.0 and est.p_hat in (0.0, 1.0)

    def test_stderr(self):
        est = SopEstimate.from_count(25, 100)
        assert est.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))

    @pytest.mark.parametrize("kw", [dict(n=0), dict(rng=np.random.default_rng(0)),
                                    dict(chunk_size=0)])
    def test_domain(self, kw, geometry_gains):
        args = dict(n=100, rng=RngStream(0), chunk_size=64)
        args.update(kw)
        with pytest.raises(DomainError):
            estimate_sop("OSS", "macro", SystemConfig(1e8), geometry_gains, **args)

    def test_ic_feasibility_checked(self, geometry_gains):
        with pytest.raises(DomainError):
            estimate_cells("IC", SystemConfig(1e8, beta=1e3), geometry_gains, 100, RngStream(0))

    def test_deterministic(self, geometry_gains):
        cfg = SystemConfig.from_db(60)
        a = estimate_cells("IL", cfg, geometry_gains, 5000, RngStream(4, 1), chunk_size=700)
        b = estimate_cells("IL", cfg, geometry_gains, 5000, RngStream(4, 1), chunk_size=700)
        assert a == b

    def test_workers_do_not_change_counts(self, geometry_gains):
        cfg = SystemConfig.from_db(60)
        serial = estimate_cells("IC", cfg, geometry_gains, 6000, RngStream(4), chunk_size=1000)
        pooled = estimate_cells("IC", cfg, geometry_gains, 6000, RngStream(4), chunk_size=1000,
                                workers=2)
        assert serial == pooled

    def test_monotone_in_rate_with_common_draws(self, geometry_gains):
        hits = []
        for r in (0.5, 1.0, 2.0, 3.0):
            cfg = SystemConfig.from_db(80, R_M=r, R_S=r)
            est = estimate_cells("IL", cfg, geometry_gains, 20000, RngStream(8))
            hits.append((est.macro.p_hat, est.small.p_hat))
        for (m0, s0), (m1, s1) in zip(hits, hits[1:]):
            assert m1 >= m0 and s1 >= s0

    def test_overall_error_uses_covariance(self):
        n = 1000
        est = CellEstimates(SopEstimate.from_count(300, n), SopEstimate.from_count(300, n), 300)
        # identical indicators: mean of the two equals either one
        value, err = est.overall(Combiner.MEAN)
        assert value == pytest.approx(0.3)
        assert err == pytest.approx(est.macro.stderr)
        value, err = est.overall(Combiner.PRODUCT)
        assert value == pytest.approx(0.09)
        assert err == pytest.approx(2 * 0.3 * est.macro.stderr)


class TestAgainstAnalytic:
    @pytest.mark.parametrize("scheme", ["OSS", "IL"])
    @pytest.mark.parametrize("db", [50, 80])
    def test_cells(self, scheme, db, geometry_gains):
        cfg = SystemConfig.from_db(db)
        est = estimate_cells(scheme, cfg, geometry_gains, 2 * 10 ** 5, RngStream(30, db))
        assert within(est.macro, sop(scheme, "macro", cfg, geometry_gains))
        assert within(est.small, sop(scheme, "small", cfg, geometry_gains))

    def test_ic_small(self, geometry_gains):
        cfg = SystemConfig.from_db(80)
        est = estimate_sop("IC", "small", cfg, geometry_gains, 5 * 10 ** 5, RngStream(31))
        assert within(est, sop("IC", "small", cfg, geometry_gains))

    def test_il_small_cell_rises_with_snr(self, geometry_gains):
        lo = estimate_sop("IL", "small", SystemConfig.from_db(80), geometry_gains, 10 ** 6,
                          RngStream(32, 0))
        hi = estimate_sop("IL", "small", SystemConfig.from_db(160), geometry_gains, 10 ** 6,
                          RngStream(32, 1))
        assert hi.p_hat - lo.p_hat > 4 * math.hypot(lo.stderr, hi.stderr)


class TestExactIcMacro:
    @pytest.mark.parametrize("db", [30, 45])
    def test_same_event_as_capacities(self, db, fig2_gains):
        cfg = SystemConfig.from_db(db)
        rng = RngStream(40, db)
        exact = estimate_sop_exact_ic_macro(cfg, fig2_gains, 3 * 10 ** 5, rng)
        caps = estimate_sop("IC", "macro", cfg, fig2_gains, 3 * 10 ** 5, rng)
        assert exact.p_hat == caps.p_hat

    def test_high_snr_integral_tracks_exact_event(self, fig2_gains):
        cfg = SystemConfig.from_db(40)
        est = estimate_sop_exact_ic_macro(cfg, fig2_gains, 10 ** 6, RngStream(41))
        assert est.p_hat == pytest.approx(sop("IC", "macro", cfg, fig2_gains), rel=0.05)

    def test_integral_drifts_at_low_snr(self, fig2_gains):
        # the integral drops 1/gamma_M terms, visible once gamma_M is small
        cfg = SystemConfig.from_db(10)
        est = estimate_sop_exact_ic_macro(cfg, fig2_gains, 10 ** 5, RngStream(42))
        assert not within(est, sop("IC", "macro", cfg, fig2_gains))
