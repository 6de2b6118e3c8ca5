import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grwsim import (
    GridSpec,
    GrwParams,
    LgConfig,
    Region,
    ScenarioConfig,
    ValidationError,
    apply_jump,
    run_cat,
    run_leggett_garg,
    run_measurement_chain,
    run_single,
    run_wpr_baseline,
    sample_center,
    trajectory_stream,
    two_proportion_test,
)
from grwsim.config import chain_defaults
from grwsim.errors import NonConvergentError
from grwsim.qstate import position_moments, region_weight
from grwsim.scenarios import (
    entangled_state,
    initial_cat_state,
    matched_double_well,
    survival_scaling_points,
)

from _oracles import exponential_median, three_time_k

SPACING = math.pi / 3.0


def _lg(rate_n_eff: float | None) -> LgConfig:
    collapse = (
        None
        if rate_n_eff is None
        else GrwParams(tau=1.0, width=0.3, n_eff=rate_n_eff)
    )
    return LgConfig(
        omega=1.0, t1=SPACING, t2=2 * SPACING, t3=3 * SPACING, collapse=collapse
    )


def _chain() -> ScenarioConfig:
    return chain_defaults()


def test_config_validation():
    with pytest.raises(ValidationError):
        ScenarioConfig(kind="soup")
    with pytest.raises(ValidationError):
        ScenarioConfig(mode="classical")
    with pytest.raises(ValidationError):
        ScenarioConfig(weight_1=1.5)
    with pytest.raises(ValidationError):
        ScenarioConfig(
            region_1=Region(-8.0, 1.0), region_2=Region(0.0, 8.0)
        )


def test_matched_well_curvature():
    v = matched_double_well(0.25, 3.5)
    omega = 1.0 / (2.0 * 0.25**2)
    assert v.well_separation == 3.5
    assert v.barrier_height == pytest.approx(omega**2 * 3.5**2 / 8.0)
    # curvature formula gives back the same omega^2
    assert 8.0 * v.barrier_height / v.well_separation**2 == pytest.approx(omega**2)


def test_cat_state_puts_branch_one_on_the_left():
    cfg = ScenarioConfig(weight_1=0.7)
    psi = initial_cat_state(cfg)
    left = region_weight(psi, Region(-8.0, 0.0))
    assert left == pytest.approx(0.7, abs=1e-9)


def test_entangled_state_geometry():
    cfg = _chain()
    psi = entangled_state(cfg)
    assert psi.levels == 2
    w = psi.level_weights()
    assert w[0] == pytest.approx(0.5, abs=1e-9)
    mean0, _ = position_moments(
        type(psi)(psi.grid, np.vstack([psi.amplitudes[0], 0 * psi.amplitudes[0]]))
    )
    # level 0 (outcome 1) displaced to +separation/2
    assert mean0 == pytest.approx(cfg.separation / 2.0, abs=1e-6)


def test_entangled_state_needs_clear_separation():
    cfg = ScenarioConfig(
        kind="measurement_chain", separation=3.0, packet_width=0.25
    )
    with pytest.raises(ValidationError):
        entangled_state(cfg)


def test_wpr_single_is_exact_projection():
    cfg = ScenarioConfig(mode="wpr", weight_1=0.3)
    rec = run_single(cfg, 0, 5)
    assert rec.outcome in ("1", "2")
    assert rec.events == []
    assert rec.survival_time == cfg.measurement_time


def test_wpr_frequencies_match_weights():
    cfg = ScenarioConfig(mode="wpr", weight_1=0.3)
    tally = run_wpr_baseline(cfg, 4000, 9)
    assert tally.count_undecided == 0
    sd = math.sqrt(0.3 * 0.7 / 4000)
    assert tally.frequency(1) == pytest.approx(0.3, abs=3.5 * sd)


@pytest.mark.parametrize("weight", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_cat_outcome_rates_follow_the_initial_weights(weight):
    cfg = ScenarioConfig(weight_1=weight)
    n = 1000
    tally = run_cat(cfg, n, master_seed=29)
    assert tally.undecided_fraction <= 0.01
    sd = math.sqrt(weight * (1.0 - weight) / n)
    assert tally.frequency(1) == pytest.approx(weight, abs=max(3.5 * sd, 1e-12))


def test_grw_and_wpr_rates_are_statistically_indistinguishable():
    cfg = ScenarioConfig(weight_1=0.5)
    grw = run_cat(cfg, 1500, master_seed=101)
    wpr = run_wpr_baseline(cfg, 1500, master_seed=102)
    z, p = two_proportion_test(
        grw.count_1, grw.decided, wpr.count_1, wpr.decided
    )
    assert abs(z) < 3.29  # 99.9% two-sided band
    assert p > 1e-3


def test_nonconvergent_when_horizon_is_too_short():
    cfg = ScenarioConfig(
        collapse=GrwParams(tau=8.0, width=0.3, n_eff=1.0),  # rate 1/8
        horizon=0.2,
        prop=ScenarioConfig().prop,
    )
    with pytest.raises(NonConvergentError):
        run_cat(cfg, 120, master_seed=3)


def test_unitary_mode_reports_undecided_without_error():
    cfg = ScenarioConfig(mode="unitary")
    recs = [run_single(cfg, 4, i) for i in range(5)]
    assert all(r.outcome == "undecided" for r in recs)
    assert all(r.events == [] for r in recs)


def test_chain_median_survival_tracks_the_collective_rate():
    cfg = _chain()
    tally, stats = run_measurement_chain(cfg, 250, master_seed=17)
    assert tally.undecided_fraction <= 0.01
    sd_median = 1.0 / (cfg.collapse.rate * math.sqrt(250))
    want = exponential_median(cfg.collapse.rate)
    assert stats["median"] == pytest.approx(want, abs=3.5 * sd_median + cfg.prop.dt)
    sd = math.sqrt(0.25 / 250)
    assert tally.frequency(1) == pytest.approx(0.5, abs=3.5 * sd)


def test_survival_scaling_is_inverse_in_coordinate_count():
    points = survival_scaling_points(
        _chain(), n_eff_values=(1.0, 16.0), trajectories=120, master_seed=23
    )
    (n_a, med_a), (n_b, med_b) = points
    assert med_a / med_b == pytest.approx(n_b / n_a, rel=0.45)


def test_lg_unitary_hits_three_halves():
    res = run_leggett_garg(_lg(None), trajectories=20000, master_seed=31)
    assert res.c12 == pytest.approx(0.5, abs=3.5 * res.se_c12)
    assert res.c23 == pytest.approx(0.5, abs=3.5 * res.se_c23)
    assert res.c13 == pytest.approx(-0.5, abs=3.5 * res.se_c13)
    assert res.k == pytest.approx(1.5, abs=3.5 * res.se_k)
    assert three_time_k(1.0, SPACING, 0.0) == pytest.approx(1.5, abs=1e-12)


def test_lg_with_hits_matches_damped_envelope_oracle():
    rate = 1.5
    res = run_leggett_garg(_lg(rate), trajectories=8000, master_seed=37)
    want = three_time_k(1.0, SPACING, rate)
    assert res.k == pytest.approx(want, abs=3.5 * res.se_k)


def test_lg_is_reproducible():
    a = run_leggett_garg(_lg(2.0), 500, 5).as_dict()
    b = run_leggett_garg(_lg(2.0), 500, 5).as_dict()
    assert a == b


def test_lg_time_ordering_is_validated():
    with pytest.raises(ValidationError):
        LgConfig(omega=1.0, t1=2.0, t2=1.0, t3=3.0)
    with pytest.raises(ValidationError):
        LgConfig(omega=0.0, t1=1.0, t2=2.0, t3=3.0)


def test_grid_hits_equal_level_projections():
    """A hit on the far-separated pointer acts as an exact level readout:
    post-hit level weights are one-hot, '1' at the initial-weight rate."""
    cfg = ScenarioConfig(kind="measurement_chain", weight_1=0.3,
                         separation=10.0, grid=GridSpec(-10.0, 10.0, 512),
                         collapse=GrwParams(tau=1.0, width=0.2, n_eff=1.0))
    psi = entangled_state(cfg)
    n = 400
    wins = 0
    for i in range(n):
        gen = trajectory_stream(51, i).generator()
        center = sample_center(psi, cfg.collapse, gen)
        out, event = apply_jump(psi, center, cfg.collapse)
        assert max(event.post_branch_weights) > 1.0 - 1e-9
        wins += event.post_branch_weights[0] > 0.5
    sd = math.sqrt(0.3 * 0.7 / n)
    assert wins / n == pytest.approx(0.3, abs=3.5 * sd)


@settings(max_examples=15)
@given(seed=st.integers(0, 2**32 - 1), index=st.integers(0, 1000))
def test_trajectories_never_share_streams(seed, index):
    rec = run_single(ScenarioConfig(mode="wpr"), seed, index)
    assert (rec.seed, rec.stream_id) == (seed, index)
