"""Determinism, closure and pairing properties of the trial harness."""

import math

import numpy as np
import pytest

from iqsense.detection import (
    DetectorMode,
    analytic_detection,
    analytic_false_alarm,
    conditional_probabilities,
)
from iqsense.montecarlo import (
    SWEEP_AXES,
    SeedSpec,
    SensingScenario,
    TallyMatrix,
    _apply_axis,
    _chunk_layout,
    _isotonic_nondecreasing,
    compare_modes,
    empirical_metrics,
    estimate_component_variances,
    run_trials,
    scenario_rule,
    scenario_variances,
    substream,
    sweep,
)
from iqsense.signal_model import irr_to_mismatch


def scenario(**kw):
    kw.setdefault("tx_mismatch", irr_to_mismatch(-15.0))
    return SensingScenario.from_snr(
        kw.pop("snr1_db", 0.0), kw.pop("snr2_db", -10.0), **kw
    )


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(2**64)
    with pytest.raises(ValueError):
        SeedSpec(0, -3)
    assert SeedSpec(5).stream_index == 0


def test_substreams_are_addressed():
    a = substream(1, 0, 7).normal(size=4)
    b = substream(1, 0, 7).normal(size=4)
    c = substream(1, 1, 7).normal(size=4)
    d = substream(SeedSpec(1, 1), 0, 7).normal(size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_scenario_consistency_validation():
    sc = scenario()
    assert sc.pair.power_k == pytest.approx(1.0)
    assert sc.pair.power_mk == pytest.approx(0.1)
    assert sc.delta_snr_db == 10.0
    with pytest.raises(ValueError):
        SensingScenario(
            pair=sc.pair, tx_mismatch=sc.tx_mismatch, rx_mismatch=None,
            n_packets=1, mode=sc.mode, snr1_db=3.0, snr2_db=-10.0,
        )
    with pytest.raises(ValueError):
        scenario(snr1_db=math.nan)


def test_scenario_silent_subcarrier():
    sc = scenario(snr2_db=-math.inf)
    assert sc.pair.power_mk == 0.0
    v = scenario_variances(sc)
    assert v.sigma0_sq == v.sigma1_sq


def test_scenario_helpers():
    sc = scenario()
    moved = sc.with_snr(snr1_db=5.0)
    assert moved.snr1_db == 5.0 and moved.snr2_db == -10.0
    assert moved.pair.power_k == pytest.approx(10.0 ** 0.5)
    retuned = sc.with_irr(-20.0)
    assert retuned.tx_mismatch.epsilon == pytest.approx(0.1)
    assert retuned.rx_mismatch is None
    joint = scenario(rx_mismatch=irr_to_mismatch(-15.0))
    assert joint.is_joint
    assert joint.with_irr(-20.0).rx_mismatch.epsilon == pytest.approx(0.1)
    two = sc.with_mode(DetectorMode.two_level_bayes())
    assert two.mode.kind == "two-bayes"


def test_chunk_layout():
    assert _chunk_layout(10, 4) == [(0, 4), (1, 4), (2, 2)]
    assert _chunk_layout(4, 4) == [(0, 4)]
    assert _chunk_layout(1, 100) == [(0, 1)]


def test_isotonic_projection():
    assert _isotonic_nondecreasing([1.0, 2.0, 3.0]) == [1.0, 2.0, 3.0]
    out = _isotonic_nondecreasing([1.0, 3.0, 2.0])
    assert out == [1.0, 2.5, 2.5]
    # Mean is preserved and order restored, whatever the input.
    rng = np.random.default_rng(3)
    for _ in range(25):
        vals = rng.uniform(0.0, 1.0, size=6).tolist()
        out = _isotonic_nondecreasing(vals)
        assert all(b >= a for a, b in zip(out, out[1:]))
        assert sum(out) == pytest.approx(sum(vals))


def test_tally_matrix_algebra():
    a = TallyMatrix(np.arange(16).reshape(4, 4))
    b = TallyMatrix(np.ones((4, 4), dtype=int))
    s = a + b
    assert s.counts[0, 0] == 1 and s.counts[3, 3] == 16
    assert a == TallyMatrix(np.arange(16).reshape(4, 4))
    assert a != b
    with pytest.raises(ValueError):
        TallyMatrix(np.full((4, 4), -1))
    with pytest.raises(ValueError):
        TallyMatrix(np.zeros((3, 4)))


def test_empirical_metrics_math():
    counts = np.array([
        [80, 10, 6, 4],
        [70, 20, 6, 4],
        [10, 10, 50, 30],
        [5, 5, 30, 60],
    ])
    t = TallyMatrix(counts)
    paper = empirical_metrics(t, "paper-sum")
    assert paper.p_fa.value == pytest.approx(0.10 + 0.10)
    assert paper.p_d.value == pytest.approx(0.50 + 0.60)
    prior = empirical_metrics(t, "prior-weighted")
    assert prior.p_fa.value == pytest.approx(0.5 * (0.10 + 0.10))
    assert prior.p_d.value == pytest.approx(0.5 * (0.80 + 0.90))
    assert prior.p_fa.hi <= 1.0 and paper.p_fa.hi <= 2.0
    with pytest.raises(ValueError):
        empirical_metrics(TallyMatrix(np.zeros((4, 4))), "paper-sum")
    with pytest.raises(ValueError):
        empirical_metrics(t, "averaged")


def test_run_trials_deterministic():
    sc = scenario()
    a = run_trials(sc, 10_000, 42)
    b = run_trials(sc, 10_000, 42)
    c = run_trials(sc, 10_000, 43)
    assert a == b
    assert a != c
    assert a.trials_per_hypothesis.tolist() == [10_000] * 4


def test_run_trials_worker_invariance():
    sc = scenario()
    serial = run_trials(sc, 9_000, 5, chunk_size=2_048)
    parallel = run_trials(sc, 9_000, 5, chunk_size=2_048, workers=4)
    assert serial == parallel


def test_run_trials_closure():
    """Empirical conditional rates sit within 5 binomial SE of the
    closed forms (unit check; acceptance tightens this to 3 SE at 1e6)."""
    sc = scenario()
    n = 40_000
    tally = run_trials(sc, n, 9)
    v = scenario_variances(sc)
    rule = scenario_rule(sc)
    probs = conditional_probabilities(v, rule)
    rates = tally.conditional_rates()
    for i in range(4):
        for j in range(4):
            se = math.sqrt(probs[i, j] * (1 - probs[i, j]) / n)
            assert abs(rates[i, j] - probs[i, j]) <= max(5 * se, 1e-4)


def test_estimated_variances_match_analytic_for_tx_only():
    sc = scenario()
    est = estimate_component_variances(sc, 300_000, 1)
    ana = scenario_variances(sc)
    for e, a in zip(est.as_tuple(), ana.as_tuple()):
        assert e == pytest.approx(a, rel=0.02)


def test_joint_variances_require_seed():
    joint = scenario(rx_mismatch=irr_to_mismatch(-15.0))
    with pytest.raises(ValueError):
        scenario_variances(joint)
    v = scenario_variances(joint, 7, calibration_samples=50_000)
    assert v.sigma0_sq <= v.sigma1_sq <= v.sigma2_sq <= v.sigma3_sq
    # The receiver front end folds mirror noise in: the noise floor
    # exceeds the transmitter-only value.
    assert v.sigma0_sq > scenario_variances(scenario()).sigma0_sq


def test_compare_modes_is_paired():
    """The four-level busy region is a subset of the two-level Bayes
    one (its busy threshold crosses against sigma1 >= sigma0), so on
    common trials mode a=four never flags busy alone."""
    sc = scenario()
    cmp = compare_modes(
        sc, DetectorMode.four_level(), DetectorMode.two_level_bayes(), 20_000, 3
    )
    only_a = cmp.joint_counts[:, 1]
    assert np.all(only_a == 0)
    assert cmp.joint_counts.sum() == 4 * 20_000
    # Gap therefore equals the one-sided band count and is nonnegative.
    gap = cmp.p_fa_gap("prior-weighted")
    assert gap.value >= 0.0
    # busy_rate agrees with an independent tally on the same streams.
    tally = run_trials(sc, 20_000, 3)
    busy = tally.busy_counts
    for hyp in range(4):
        assert cmp.busy_rate("a", hyp) == pytest.approx(busy[hyp] / 20_000)


def test_sweep_axes_cover_model_knobs():
    sc = scenario()
    assert set(SWEEP_AXES) == {"irr_db", "snr1_db", "delta_snr_db", "snr_db_at_delta"}
    assert _apply_axis(sc, "irr_db", -20.0).tx_mismatch.epsilon == pytest.approx(0.1)
    assert _apply_axis(sc, "snr1_db", 4.0).snr1_db == 4.0
    d = _apply_axis(sc, "delta_snr_db", -10.0)
    assert d.snr1_db == pytest.approx(-20.0) and d.snr2_db == -10.0
    m = _apply_axis(sc, "snr_db_at_delta", 7.0)
    assert m.snr1_db == 7.0 and m.snr2_db == pytest.approx(-3.0)
    with pytest.raises(ValueError):
        _apply_axis(sc, "noise_var", 1.0)


def test_sweep_structure_and_pairing():
    sc = scenario()
    modes = [DetectorMode.four_level(), DetectorMode.two_level_bayes()]
    pts = sweep(sc, "irr_db", [-20.0, -10.0], 8_000, 11, modes=modes)
    assert len(pts) == 4
    assert [p.mode.kind for p in pts] == ["four", "two-bayes", "four", "two-bayes"]
    for p in pts:
        assert p.pfa_analytic_prior == pytest.approx(
            analytic_false_alarm(p.variances, p.rule, "prior-weighted"), rel=1e-12
        )
        assert p.pd_analytic_paper == pytest.approx(
            analytic_detection(p.variances, p.rule, "paper-sum"), rel=1e-12
        )
        assert p.tally.trials_per_hypothesis.tolist() == [8_000] * 4
    # Common random numbers: within each grid point the four-level busy
    # count never exceeds the two-level one on any truth row.
    for four_pt, two_pt in zip(pts[0::2], pts[1::2]):
        assert four_pt.value == two_pt.value
        assert np.all(four_pt.tally.busy_counts <= two_pt.tally.busy_counts)


def test_sweep_stream_path_isolates_curves():
    sc = scenario()
    base = sweep(sc, "irr_db", [-15.0], 4_000, 2)
    same = sweep(sc, "irr_db", [-15.0], 4_000, 2)
    moved = sweep(sc, "irr_db", [-15.0], 4_000, 2, stream_path=(1,))
    assert base[0].tally == same[0].tally
    assert base[0].tally != moved[0].tally


def test_sweep_point_independent_of_grid():
    sc = scenario()
    alone = sweep(sc, "snr1_db", [2.0], 4_000, 21)
    grid = sweep(sc, "snr1_db", [2.0, 4.0], 4_000, 21)
    assert alone[0].tally == grid[0].tally


def test_run_trials_argument_validation():
    sc = scenario()
    with pytest.raises(ValueError):
        run_trials(sc, 0, 1)
    with pytest.raises(ValueError):
        run_trials(sc, 10, 1, chunk_size=0)
    with pytest.raises(ValueError):
        run_trials(sc, 10, 1, workers=0)
    with pytest.raises(ValueError):
        sweep(sc, "irr_db", [], 10, 1)
    with pytest.raises(ValueError):
        sweep(sc, "irr_db", [-15.0], 10, 1, modes=[])
