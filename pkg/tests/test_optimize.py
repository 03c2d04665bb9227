"""Tests for the coordinate-ascent optimizer and the lattice-search oracle."""

import numpy as np
import pytest

from mimo_ee.analytic import PowerModel, _ee_value
from mimo_ee.errors import (
    BracketingFailure,
    EmptyFeasibleSet,
    InfeasibleInterval,
    InvalidConfig,
)
from mimo_ee.optimize import (
    EeContext,
    OptimizerSettings,
    default_initial,
    golden_section_max,
    grid_search,
    iterate,
    optimize_beta,
    optimize_nt,
    optimize_ta,
)

SETTINGS = OptimizerSettings()


def make_context(snr=100.0, impairment=0.15, coherence=5760, power=None):
    return EeContext(snr=snr, impairment=impairment, coherence=coherence,
                     power=power or PowerModel.reference())


class TestGoldenSection:
    def test_parabola(self):
        x = golden_section_max(lambda x: -(x - 2.0) ** 2, 0.0, 10.0, 1e-9)
        assert x == pytest.approx(2.0, abs=1e-6)

    def test_increasing_function_hits_right_boundary(self):
        x = golden_section_max(lambda x: x, 0.0, 5.0, 1e-9)
        assert x == pytest.approx(5.0, abs=1e-6)

    def test_decreasing_function_hits_left_boundary(self):
        x = golden_section_max(lambda x: -x, 0.0, 5.0, 1e-9)
        assert x == pytest.approx(0.0, abs=1e-6)

    def test_degenerate_bracket_returns_point(self):
        assert golden_section_max(lambda x: x, 3.0, 3.0, 1e-6) == 3.0

    def test_reversed_bracket_raises(self):
        with pytest.raises(InfeasibleInterval):
            golden_section_max(lambda x: x, 2.0, 1.0, 1e-6)

    def test_asymmetric_unimodal(self):
        f = lambda x: np.log(x) - 0.1 * x   # max at x = 10
        assert golden_section_max(f, 0.5, 100.0, 1e-9) == pytest.approx(10.0, abs=1e-5)


class TestCoordinateSearches:
    def test_ta_matches_dense_scan(self):
        ctx = make_context()
        best = optimize_ta(20.0, 3.0, ctx, SETTINGS)
        grid = np.linspace(0.0, ctx.coherence - 20.0, 200001)
        dense = grid[np.argmax(_ee_value(20.0, 3.0, grid, ctx.snr, ctx.impairment,
                                         ctx.coherence, ctx.power))]
        assert abs(best - dense) < 0.1
        assert ctx.ee(20.0, 3.0, best) >= ctx.ee(20.0, 3.0, dense) - 1e-12

    def test_beta_matches_dense_scan(self):
        ctx = make_context()
        best = optimize_beta(20.0, 100.0, ctx, SETTINGS)
        grid = np.linspace(1.0 + 1e-9, 64.0, 200001)
        dense = grid[np.argmax(_ee_value(20.0, grid, 100.0, ctx.snr, ctx.impairment,
                                         ctx.coherence, ctx.power))]
        assert abs(best - dense) < 0.01

    def test_nt_matches_dense_scan(self):
        ctx = make_context()
        best = optimize_nt(3.0, 100.0, ctx, SETTINGS)
        grid = np.linspace(1.0, (ctx.coherence - 100.0) / 2, 200001)
        dense = grid[np.argmax(_ee_value(grid, 3.0, 100.0, ctx.snr, ctx.impairment,
                                         ctx.coherence, ctx.power))]
        assert abs(best - dense) / dense < 0.01

    def test_beta_bracket_expands_past_initial_cap(self):
        # a tiny receive-chain cost pushes the optimum far beyond beta_upper
        pm = PowerModel(p_tx=1.0, p_rx=1e-7, p_static=1.0, amp_efficiency=0.3,
                        noise_energy=1e-6, symbol_time=1.0)
        ctx = make_context(power=pm)
        best = optimize_beta(8.0, 64.0, ctx, SETTINGS)
        assert best > SETTINGS.beta_upper

    def test_beta_without_receive_cost_fails_to_bracket(self):
        pm = PowerModel(p_tx=1.0, p_rx=0.0, p_static=1.0, amp_efficiency=0.3,
                        noise_energy=1e-6, symbol_time=1.0)
        ctx = make_context(impairment=0.0, power=pm)
        with pytest.raises(BracketingFailure):
            optimize_beta(8.0, 64.0, ctx, SETTINGS)

    def test_infeasible_ta_interval(self):
        ctx = make_context(coherence=100)
        with pytest.raises(InfeasibleInterval):
            optimize_ta(200.0, 2.0, ctx, SETTINGS)


class TestIterate:
    def test_trace_is_nondecreasing(self):
        ctx = make_context()
        res = iterate(SETTINGS, default_initial(ctx), ctx)
        values = [ee for _, _, ee in res.trace]
        assert np.all(np.diff(values) >= -1e-12)
        assert res.converged

    def test_result_is_feasible_integer_point(self):
        ctx = make_context(snr=10.0, impairment=0.08)
        res = iterate(SETTINGS, default_initial(ctx), ctx)
        assert res.n_r_star > res.n_t_star >= 1
        assert res.t_p_star == res.n_t_star + int(res.t_a_star)
        assert res.n_t_star <= res.t_p_star <= ctx.coherence
        assert res.beta_star == pytest.approx(res.n_r_star / res.n_t_star)

    def test_fixed_point(self):
        # restarting from the solution must not move it
        ctx = make_context()
        res = iterate(SETTINGS, default_initial(ctx), ctx)
        again = iterate(SETTINGS, (res.relaxed_t_a, res.relaxed_beta,
                                   res.relaxed_n_t), ctx)
        assert again.ee_star == pytest.approx(res.ee_star, rel=1e-9)
        assert again.iterations <= 2

    def test_insensitive_to_start(self):
        ctx = make_context(snr=1.0, impairment=0.15)
        a = iterate(SETTINGS, default_initial(ctx), ctx)
        b = iterate(SETTINGS, (500.0, 8.0, 40.0), ctx)
        assert a.ee_star == pytest.approx(b.ee_star, rel=1e-6)

    def test_matches_relaxed_objective(self):
        ctx = make_context()
        res = iterate(SETTINGS, default_initial(ctx), ctx)
        assert res.relaxed_ee == pytest.approx(
            ctx.ee(res.relaxed_n_t, res.relaxed_beta, res.relaxed_t_a), rel=1e-12)
        # integer refinement sits close below the relaxed optimum
        assert res.ee_star <= res.relaxed_ee + 1e-12
        assert res.ee_star > 0.97 * res.relaxed_ee

    def test_settings_validation(self):
        with pytest.raises(InvalidConfig):
            OptimizerSettings(ee_threshold=0.0)
        with pytest.raises(InvalidConfig):
            OptimizerSettings(beta_upper=1.0)


class TestGridSearch:
    def test_matches_brute_force_on_tiny_lattice(self):
        ctx = make_context(snr=10.0, impairment=0.1, coherence=24)
        got = grid_search(ctx, nt_max=6, nr_max=12, tp_max=16)
        best = (-np.inf, None)
        for nt in range(1, 7):
            for nr in range(nt + 1, 13):
                for tp in range(nt, 17):
                    ee = ctx.ee(nt, nr / nt, tp - nt)
                    if ee > best[0]:
                        best = (ee, (nt, nr, tp))
        assert got.ee_star == pytest.approx(best[0], rel=1e-12)
        assert (got.n_t_star, got.n_r_star, got.t_p_star) == best[1]

    def test_oracle_dominates_iterative(self):
        for snr in (0.1, 10.0):
            for d in (0.0, 0.15):
                ctx = make_context(snr=snr, impairment=d, coherence=600)
                it = iterate(SETTINGS, default_initial(ctx), ctx)
                oracle = grid_search(ctx, nt_max=48, nr_max=160, tp_max=300)
                assert oracle.ee_star >= it.ee_star - 1e-12
                assert (oracle.ee_star - it.ee_star) / oracle.ee_star < 0.01

    def test_empty_lattice_raises(self):
        ctx = make_context()
        with pytest.raises(EmptyFeasibleSet):
            grid_search(ctx, nt_max=0, nr_max=10, tp_max=10)
