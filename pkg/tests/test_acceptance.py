"""Acceptance gate.  Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion (see conftest.py)."""

import time

import numpy as np
import pytest

from hetsec.analytic import SystemConfig, il_kernel, il_macro_params, sop, sop_ic_macro
from hetsec.asymptotics import diversity_slope, ic_macro_bounds, il_macro_floor
from hetsec.channel import RngStream, sample_fading
from hetsec.experiments.config import parse_config
from hetsec.experiments.presets import PRESETS
from hetsec.experiments.runner import format_csv, run_sweep
from hetsec.montecarlo import (
    estimate_cells,
    estimate_sop,
    estimate_sop_exact_ic_macro,
    ic_cancellation_residual,
    ic_power_state,
)
from oracles import kernel_by_quadrature, random_params

N = 10 ** 6
Z_BAND = 3.0


def assert_within_band(est, ref, what):
    assert abs(est.p_hat - ref) <= Z_BAND * est.stderr, (
        f"{what}: MC {est.p_hat:.6g} +- {est.stderr:.2g} vs analytic {ref:.6g}")


def degenerate_gains(gains, cfg):
    """Move sigma2_Se so that the macro IL kernel sits exactly on b f = d (b e + 1)."""
    p = il_macro_params(cfg, gains)
    return gains.replace(Se=gains.Me * p.b * p.f / (cfg.gamma_S * (p.b * p.e + 1.0)))


@pytest.mark.criterion(1, "OSS analytic vs Monte-Carlo, 80-110 dB")
@pytest.mark.parametrize("i,db", list(enumerate([80, 90, 100, 110])))
def test_oss_oracle(i, db, geometry_gains):
    cfg = SystemConfig.from_db(db)
    start = time.perf_counter()
    est = estimate_cells("OSS", cfg, geometry_gains, N, RngStream(101, i))
    pm = sop("OSS", "macro", cfg, geometry_gains)
    ps = sop("OSS", "small", cfg, geometry_gains)
    elapsed = time.perf_counter() - start
    assert_within_band(est.macro, pm, f"macro at {db} dB")
    assert_within_band(est.small, ps, f"small at {db} dB")
    assert elapsed < 10.0


class TestIlOracle:
    @pytest.mark.criterion(2, "IL analytic vs Monte-Carlo and kernel vs quadrature")
    @pytest.mark.parametrize("i,db", list(enumerate([80, 90, 100, 110])))
    def test_defaults(self, i, db, geometry_gains):
        cfg = SystemConfig.from_db(db)
        est = estimate_cells("IL", cfg, geometry_gains, N, RngStream(102, i))
        assert_within_band(est.macro, sop("IL", "macro", cfg, geometry_gains), "macro")
        assert_within_band(est.small, sop("IL", "small", cfg, geometry_gains), "small")

    @pytest.mark.criterion(2, "IL analytic vs Monte-Carlo and kernel vs quadrature")
    @pytest.mark.parametrize("rel_shift", [0.0, 1e-4])
    @pytest.mark.parametrize("db", [80, 100])
    def test_degenerate_branch(self, db, rel_shift, geometry_gains):
        cfg = SystemConfig.from_db(db)
        gains = degenerate_gains(geometry_gains, cfg)
        gains = gains.replace(Se=gains.Se * (1.0 + rel_shift))
        p = il_macro_params(cfg, gains)
        assert abs(p.gap / (p.b * p.f)) <= max(2 * rel_shift, 1e-12)
        est = estimate_sop("IL", "macro", cfg, gains, N, RngStream(103, db + int(rel_shift > 0)))
        assert_within_band(est, sop("IL", "macro", cfg, gains), "degenerate macro")

    @pytest.mark.criterion(2, "IL analytic vs Monte-Carlo and kernel vs quadrature")
    def test_kernel_random_sets(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(50):
            p = random_params(rng)
            ref = kernel_by_quadrature(p)
            worst = max(worst, abs(il_kernel(p) - ref) / ref)
        assert worst <= 1e-6


@pytest.mark.criterion(3, "IC macro closed form and Monte-Carlo inside the bounds")
def test_ic_macro_sandwich(fig2_gains):
    grid = [40, 45, 50]
    closed, simulated = [], []
    for i, db in enumerate(grid):
        cfg = SystemConfig.from_db(db)
        lo, hi = ic_macro_bounds(cfg, fig2_gains)
        p = sop_ic_macro(cfg, fig2_gains)
        est = estimate_sop_exact_ic_macro(cfg, fig2_gains, 10 ** 7, RngStream(3, i))
        assert lo <= p <= hi, f"closed form outside bounds at {db} dB"
        assert lo <= est.p_hat <= hi, f"MC outside bounds at {db} dB"
        closed.append(p)
        simulated.append(est.p_hat)
    for p, q in zip(closed[-2:], simulated[-2:]):
        assert abs(p / q - 1.0) <= 0.05


@pytest.mark.criterion(4, "IC small-cell analytic vs Monte-Carlo")
@pytest.mark.parametrize("i,db", list(enumerate([80, 100, 120])))
def test_ic_small_oracle(i, db, geometry_gains):
    cfg = SystemConfig.from_db(db)
    est = estimate_sop("IC", "small", cfg, geometry_gains, N, RngStream(104, i))
    assert_within_band(est, sop("IC", "small", cfg, geometry_gains), f"{db} dB")


class TestCancellation:
    @pytest.mark.criterion(5, "interference cancellation identity")
    def test_residual(self, geometry_gains):
        cfg = SystemConfig.from_db(100)
        draw = sample_fading(geometry_gains, RngStream(105), n=10 ** 4)
        res = ic_cancellation_residual(draw, cfg, geometry_gains)
        # each of the two cancelling terms has this magnitude
        term = np.sqrt(cfg.gamma_S) * np.abs(draw.Sm) * np.abs(draw.Mm) / np.sqrt(geometry_gains.Mm)
        assert np.all(res <= 1e-12 * term)

    @pytest.mark.criterion(5, "interference cancellation identity")
    def test_power_mean(self, geometry_gains):
        cfg = SystemConfig.from_db(100)
        draw = sample_fading(geometry_gains, RngStream(106), n=N)
        state = ic_power_state(draw, cfg, geometry_gains)
        stderr = state.p_m.std(ddof=1) / np.sqrt(N)
        assert abs(state.p_m.mean() - state.p_bar_m) <= 4 * stderr


class TestDiversity:
    GRID = [120, 130, 140, 150, 160]

    @pytest.mark.criterion(6, "diversity slopes at 120-160 dB")
    @pytest.mark.parametrize("scheme", ["OSS", "IL"])
    def test_floors(self, scheme, geometry_gains):
        rep = diversity_slope(scheme, SystemConfig(1.0), geometry_gains, self.GRID)
        assert abs(rep.extrapolated) < 0.05

    @pytest.mark.criterion(6, "diversity slopes at 120-160 dB")
    def test_ic(self, geometry_gains):
        rep = diversity_slope("IC", SystemConfig(1.0), geometry_gains, self.GRID)
        assert 0.80 <= rep.extrapolated <= 1.05


@pytest.mark.criterion(7, "IL macro SOP reaches its floor at 160 dB")
def test_il_floor(geometry_gains):
    cfg = SystemConfig.from_db(160)
    p = sop("IL", "macro", cfg, geometry_gains)
    assert abs(p - il_macro_floor(geometry_gains, cfg.R_M, cfg.beta)) <= 1e-3


# -- presets -----------------------------------------------------------------

@pytest.fixture(scope="module")
def preset_runs():
    runs, start = {}, time.perf_counter()
    for name in sorted(PRESETS):
        runs[name] = run_sweep(parse_config(PRESETS[name]))
    runs["elapsed"] = time.perf_counter() - start
    return runs


def curves(rows, method):
    out = {}
    for r in rows:
        if r.method == method:
            assert r.error == "", r.error
            out.setdefault(r.scheme, []).append(r.p_overall)
    return out


class TestPresets:
    @pytest.mark.criterion(8, "preset figure shapes and run time")
    def test_runtime(self, preset_runs):
        assert preset_runs["elapsed"] < 15 * 60

    @pytest.mark.criterion(8, "preset figure shapes and run time")
    def test_fig3_crossing_and_floors(self, preset_runs):
        c = curves(preset_runs["fig3"], "analytic")
        ic, il, oss = c["IC"], c["IL"], c["OSS"]
        assert ic[0] > il[0] and ic[-1] < il[-1]
        assert ic[-1] < min(il[-1], oss[-1])

    @pytest.mark.criterion(8, "preset figure shapes and run time")
    @pytest.mark.parametrize("method", ["analytic", "mc"])
    def test_fig4_monotone_in_rate(self, preset_runs, method):
        for scheme, ys in curves(preset_runs["fig4"], method).items():
            assert all(b >= a for a, b in zip(ys, ys[1:])), scheme

    @pytest.mark.criterion(8, "preset figure shapes and run time")
    @pytest.mark.parametrize("name", ["fig5", "fig6"])
    @pytest.mark.parametrize("method", ["analytic", "mc"])
    def test_mean_combined_ic_lowest(self, preset_runs, name, method):
        c = curves(preset_runs[name], method)
        for k, p in enumerate(c["IC"]):
            assert p < c["IL"][k] and p < c["OSS"][k], f"point {k}"


@pytest.mark.criterion(9, "fig3 output is byte-identical across runs and workers")
def test_determinism(preset_runs):
    spec = parse_config(PRESETS["fig3"])
    first = format_csv(preset_runs["fig3"])
    assert format_csv(run_sweep(spec)) == first
    assert format_csv(run_sweep(spec, workers=8)) == first
