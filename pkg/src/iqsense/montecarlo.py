"""Seeded Monte Carlo harness for the pair-sensing detectors.

Reproducibility contract: every random draw comes from a
``numpy.random.SeedSequence`` keyed by ``(stream_index, purpose, *path,
hypothesis, chunk)`` under a single master seed.  Work is partitioned
into fixed-size chunks whose tallies merge by integer addition, so
results are a pure function of (scenario, seed, trial count,
chunk size) -- bit-identical across runs and worker counts.

Detector modes evaluated at the same sweep point share the generation
streams (common random numbers): every mode classifies the same
simulated statistics, which makes mode-vs-mode gaps directly
comparable and lets :func:`compare_modes` attach paired-difference
confidence intervals that are much tighter than independent ones.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .detection import (
    DecisionRule,
    DetectorMode,
    Hypothesis,
    HypothesisVariances,
    analytic_detection,
    analytic_false_alarm,
    classify_batch,
    decision_rule,
    hypothesis_variances,
    two_level_rule,
)
from .signal_model import (
    IqMismatch,
    MismatchCoefficients,
    SubcarrierPairConfig,
    draw_noise,
    draw_rayleigh,
    mismatch_coefficients,
    receive,
    receive_joint,
)
from .stats import Estimate, Z_95, wilson_interval

__all__ = [
    "SeedSpec",
    "SensingScenario",
    "TallyMatrix",
    "Metrics",
    "SweepPoint",
    "ModeComparison",
    "substream",
    "scenario_variances",
    "scenario_rule",
    "estimate_component_variances",
    "run_trials",
    "empirical_metrics",
    "compare_modes",
    "sweep",
    "SWEEP_AXES",
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_CALIBRATION_SAMPLES",
]

DEFAULT_CHUNK_SIZE = 1 << 16
DEFAULT_CALIBRATION_SAMPLES = 1_000_000

# Purpose tags keeping independent uses of a seed on disjoint streams.
_TRIAL_STREAM = 0
_CALIBRATION_STREAM = 1
_FRAME_STREAM = 2

SWEEP_AXES = ("irr_db", "snr1_db", "delta_snr_db", "snr_db_at_delta")


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a stream index for independent experiments.

    Distinct (master_seed, stream_index) pairs yield statistically
    independent random streams; equal pairs reproduce each other
    exactly.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not isinstance(self.master_seed, int) or not (0 <= self.master_seed < 2**64):
            raise ValueError(f"master_seed must be an int in [0, 2**64), got {self.master_seed!r}")
        if not isinstance(self.stream_index, int) or self.stream_index < 0:
            raise ValueError(f"stream_index must be a nonnegative int, got {self.stream_index!r}")


def _as_seed(seed: "SeedSpec | int") -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


def substream(seed: "SeedSpec | int", *path: int) -> np.random.Generator:
    """Generator for one addressed substream of a seed."""
    seed = _as_seed(seed)
    ss = np.random.SeedSequence(
        entropy=seed.master_seed, spawn_key=(seed.stream_index, *path)
    )
    return np.random.default_rng(ss)


def _power_for(snr_db: float, noise_var: float) -> float:
    if snr_db == float("-inf"):
        return 0.0
    return 10.0 ** (snr_db / 10.0) * noise_var


@dataclass(frozen=True)
class SensingScenario:
    """One operating point of the sensing problem.

    ``snr1_db`` / ``snr2_db`` are the per-subcarrier SNRs
    P_k*|s|^2/noise_var and P_mk*|s|^2/noise_var in dB (PSK symbols are
    unit-modulus, so powers and SNRs coincide up to the noise floor);
    ``-inf`` denotes a permanently silent subcarrier.  ``rx_mismatch``
    switches between the transmitter-only model (None) and the joint
    model in which the sensing receiver's own front end folds the
    mirror observation into the statistic.
    """

    pair: SubcarrierPairConfig
    tx_mismatch: IqMismatch
    rx_mismatch: IqMismatch | None
    n_packets: int
    mode: DetectorMode
    snr1_db: float
    snr2_db: float

    def __post_init__(self):
        if not isinstance(self.n_packets, int) or self.n_packets < 1:
            raise ValueError(f"n_packets must be an int >= 1, got {self.n_packets!r}")
        for name, snr, power in (
            ("snr1_db", self.snr1_db, self.pair.power_k),
            ("snr2_db", self.snr2_db, self.pair.power_mk),
        ):
            if math.isnan(snr) or snr == float("inf"):
                raise ValueError(f"{name} must be finite or -inf, got {snr}")
            expected = _power_for(snr, self.pair.noise_var)
            if expected == 0.0:
                ok = power == 0.0
            else:
                ok = abs(power - expected) <= 1e-9 * expected
            if not ok:
                raise ValueError(
                    f"{name}={snr} inconsistent with configured power {power} "
                    f"(expected {expected})"
                )

    @classmethod
    def from_snr(
        cls,
        snr1_db: float,
        snr2_db: float,
        *,
        tx_mismatch: IqMismatch,
        rx_mismatch: IqMismatch | None = None,
        n_packets: int = 1,
        mode: DetectorMode | None = None,
        noise_var: float = 1.0,
        channel_var: float = 1.0,
        channel_var_mirror: float = 1.0,
        psk_order: int = 16,
    ) -> "SensingScenario":
        pair = SubcarrierPairConfig(
            power_k=_power_for(snr1_db, noise_var),
            power_mk=_power_for(snr2_db, noise_var),
            noise_var=noise_var,
            channel_var=channel_var,
            channel_var_mirror=channel_var_mirror,
            psk_order=psk_order,
        )
        return cls(
            pair=pair,
            tx_mismatch=tx_mismatch,
            rx_mismatch=rx_mismatch,
            n_packets=n_packets,
            mode=mode if mode is not None else DetectorMode.four_level(),
            snr1_db=float(snr1_db),
            snr2_db=float(snr2_db),
        )

    @property
    def is_joint(self) -> bool:
        return self.rx_mismatch is not None

    @property
    def delta_snr_db(self) -> float:
        return self.snr1_db - self.snr2_db

    def with_snr(self, snr1_db: float | None = None, snr2_db: float | None = None):
        s1 = self.snr1_db if snr1_db is None else float(snr1_db)
        s2 = self.snr2_db if snr2_db is None else float(snr2_db)
        pair = replace(
            self.pair,
            power_k=_power_for(s1, self.pair.noise_var),
            power_mk=_power_for(s2, self.pair.noise_var),
        )
        return replace(self, pair=pair, snr1_db=s1, snr2_db=s2)

    def with_irr(self, irr_db: float):
        """Same scenario with both front ends retuned to ``irr_db``
        (the receiver only when the scenario is joint)."""
        from .signal_model import irr_to_mismatch

        tx = irr_to_mismatch(irr_db)
        rx = irr_to_mismatch(irr_db) if self.is_joint else None
        return replace(self, tx_mismatch=tx, rx_mismatch=rx)

    def with_mode(self, mode: DetectorMode):
        return replace(self, mode=mode)


@dataclass(eq=False)
class TallyMatrix:
    """4x4 decision counts indexed [true hypothesis, decided hypothesis]."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (4, 4) or np.any(c < 0):
            raise ValueError(f"counts must be a nonnegative 4x4 matrix, got shape {c.shape}")
        self.counts = c

    @classmethod
    def zeros(cls) -> "TallyMatrix":
        return cls(np.zeros((4, 4), dtype=np.int64))

    @property
    def trials_per_hypothesis(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def busy_counts(self) -> np.ndarray:
        return self.counts[:, 2] + self.counts[:, 3]

    def conditional_rates(self) -> np.ndarray:
        """Empirical P(decide col | true row); rows need trials."""
        n = self.trials_per_hypothesis
        if np.any(n < 1):
            raise ValueError(f"every hypothesis row needs trials, have {n.tolist()}")
        return self.counts / n[:, None]

    def __add__(self, other: "TallyMatrix") -> "TallyMatrix":
        return TallyMatrix(self.counts + other.counts)

    def __eq__(self, other) -> bool:
        return isinstance(other, TallyMatrix) and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class Metrics:
    """False-alarm and detection estimates under one bookkeeping
    convention, with 95% intervals combined from per-row Wilson
    intervals in quadrature."""

    convention: str
    p_fa: Estimate
    p_d: Estimate


def _combined_estimate(parts: list[Estimate], weight: float, cap: float) -> Estimate:
    value = weight * sum(p.value for p in parts)
    hw = weight * math.sqrt(sum(p.half_width**2 for p in parts))
    return Estimate(value, max(0.0, value - hw), min(cap, value + hw))


def empirical_metrics(tally: TallyMatrix, convention: str = "paper-sum") -> Metrics:
    """Detector metrics from a tally.

    ``paper-sum``: p_fa = P(busy|H0) + P(busy|H1) and p_d = P(H2|H2) +
    P(H3|H3); ``prior-weighted``: uniform-prior busy averages over the
    idle and the occupied rows respectively.
    """
    if convention not in ("paper-sum", "prior-weighted"):
        raise ValueError(f"unknown convention {convention!r}")
    n = tally.trials_per_hypothesis
    if np.any(n < 1):
        raise ValueError(f"every hypothesis row needs trials, have {n.tolist()}")
    busy = tally.busy_counts
    fa_parts = [wilson_interval(int(busy[i]), int(n[i])) for i in (0, 1)]
    if convention == "paper-sum":
        pd_parts = [
            wilson_interval(int(tally.counts[2, 2]), int(n[2])),
            wilson_interval(int(tally.counts[3, 3]), int(n[3])),
        ]
        return Metrics(
            convention,
            _combined_estimate(fa_parts, 1.0, 2.0),
            _combined_estimate(pd_parts, 1.0, 2.0),
        )
    pd_parts = [wilson_interval(int(busy[i]), int(n[i])) for i in (2, 3)]
    return Metrics(
        convention,
        _combined_estimate(fa_parts, 0.5, 1.0),
        _combined_estimate(pd_parts, 0.5, 1.0),
    )


# --------------------------------------------------------------------------
# sample generation


def _mirrored(pair: SubcarrierPairConfig) -> SubcarrierPairConfig:
    return replace(
        pair,
        power_k=pair.power_mk,
        power_mk=pair.power_k,
        channel_var=pair.channel_var_mirror,
        channel_var_mirror=pair.channel_var,
    )


def _received_batch(
    sc: SensingScenario,
    tx_c: MismatchCoefficients,
    rx_c: MismatchCoefficients | None,
    hyp: int,
    count: int,
    n_packets: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """(count, n_packets) received samples under one true hypothesis.

    Draw order is fixed (symbols k, symbols -k, channel, noise, then
    the mirror-side channel and noise for the joint model) and both
    symbol arrays are always consumed, so a given substream yields the
    same draws for every hypothesis.
    """
    pair = sc.pair
    h = Hypothesis(hyp)
    m = pair.psk_order
    table = np.exp(2j * np.pi * np.arange(m) / m)
    size = (count, n_packets)
    sk = table[rng.integers(0, m, size)]
    smk = table[rng.integers(0, m, size)]
    if not h.own_active:
        sk = np.zeros(size, dtype=complex)
    if not h.mirror_active:
        smk = np.zeros(size, dtype=complex)
    ch = draw_rayleigh(pair.channel_var, rng, size)
    w = draw_noise(pair.noise_var, rng, size)
    y = receive(sk, smk, ch, w, pair, tx_c)
    if rx_c is None:
        return y
    ch_m = draw_rayleigh(pair.channel_var_mirror, rng, size)
    w_m = draw_noise(pair.noise_var, rng, size)
    y_m = receive(smk, sk, ch_m, w_m, _mirrored(pair), tx_c)
    return receive_joint(y, y_m, rx_c)


def _statistic_batch(sc, tx_c, rx_c, hyp, count, rng) -> np.ndarray:
    r = _received_batch(sc, tx_c, rx_c, hyp, count, sc.n_packets, rng)
    return np.mean(np.abs(r) ** 2, axis=1)


def _coefficients(sc: SensingScenario):
    tx_c = mismatch_coefficients(sc.tx_mismatch)
    rx_c = mismatch_coefficients(sc.rx_mismatch) if sc.is_joint else None
    return tx_c, rx_c


# --------------------------------------------------------------------------
# variances and rules


def _isotonic_nondecreasing(values: list[float]) -> list[float]:
    """Least-squares nondecreasing projection (pool adjacent violators)."""
    blocks: list[list[float]] = []  # [sum, weight]
    for v in values:
        blocks.append([v, 1.0])
        while len(blocks) > 1 and blocks[-2][0] / blocks[-2][1] > blocks[-1][0] / blocks[-1][1]:
            s, w = blocks.pop()
            blocks[-1][0] += s
            blocks[-1][1] += w
    out: list[float] = []
    for s, w in blocks:
        out.extend([s / w] * int(w))
    return out


def estimate_component_variances(
    sc: SensingScenario,
    samples: int,
    seed: "SeedSpec | int",
    stream_path: tuple[int, ...] = (),
) -> HypothesisVariances:
    """Per-component variances estimated from simulated received samples.

    Used for the joint transmitter+receiver model, whose statistic has
    no closed-form variance decomposition here.  One dedicated
    calibration substream per hypothesis keeps the estimate independent
    of the trial streams.  Sampling noise can leave adjacent estimates
    microscopically out of order; they are projected onto the
    nondecreasing cone (isotonic regression) before constructing the
    ordered variance set.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 calibration samples, got {samples}")
    seed = _as_seed(seed)
    tx_c, rx_c = _coefficients(sc)
    est = []
    for hyp in range(4):
        rng = substream(seed, _CALIBRATION_STREAM, *stream_path, hyp)
        r = _received_batch(sc, tx_c, rx_c, hyp, samples, 1, rng)
        est.append(float(np.mean(np.abs(r) ** 2)) / 2.0)
    return HypothesisVariances(*_isotonic_nondecreasing(est))


def scenario_variances(
    sc: SensingScenario,
    seed: "SeedSpec | int | None" = None,
    calibration_samples: int = DEFAULT_CALIBRATION_SAMPLES,
    stream_path: tuple[int, ...] = (),
) -> HypothesisVariances:
    """Variances the detector would use for this scenario: closed-form
    for the transmitter-only model, calibration estimates for the joint
    model (which then requires a seed)."""
    tx_c, _ = _coefficients(sc)
    if not sc.is_joint:
        return hypothesis_variances(sc.pair, tx_c)
    if seed is None:
        raise ValueError("joint-model variances are estimated; a seed is required")
    return estimate_component_variances(sc, calibration_samples, seed, stream_path)


def _rule_for_mode(v: HypothesisVariances, n_packets: int, mode: DetectorMode) -> DecisionRule:
    if mode.kind == "four":
        return decision_rule(v, n_packets)
    return two_level_rule(v, n_packets, mode)


def scenario_rule(
    sc: SensingScenario,
    seed: "SeedSpec | int | None" = None,
    calibration_samples: int = DEFAULT_CALIBRATION_SAMPLES,
    stream_path: tuple[int, ...] = (),
) -> DecisionRule:
    v = scenario_variances(sc, seed, calibration_samples, stream_path)
    return _rule_for_mode(v, sc.n_packets, sc.mode)


# --------------------------------------------------------------------------
# trial running


def _chunk_layout(total: int, chunk_size: int) -> list[tuple[int, int]]:
    return [
        (idx, min(chunk_size, total - idx * chunk_size))
        for idx in range((total + chunk_size - 1) // chunk_size)
    ]


def _chunk_task(args) -> tuple[int, np.ndarray]:
    """Simulate one chunk under one hypothesis and classify it with
    every rule; returns (hypothesis, per-rule decision bincounts)."""
    sc, rules, hyp, chunk_idx, count, seed, stream_path = args
    tx_c, rx_c = _coefficients(sc)
    rng = substream(seed, _TRIAL_STREAM, *stream_path, hyp, chunk_idx)
    z = _statistic_batch(sc, tx_c, rx_c, hyp, count, rng)
    out = np.zeros((len(rules), 4), dtype=np.int64)
    for r, rule in enumerate(rules):
        out[r] = np.bincount(classify_batch(z, rule), minlength=4)
    return hyp, out


def _tally_rules(
    sc: SensingScenario,
    rules: list[DecisionRule],
    per_hypothesis: int,
    seed: SeedSpec,
    stream_path: tuple[int, ...],
    workers: int,
    chunk_size: int,
) -> list[TallyMatrix]:
    tasks = [
        (sc, rules, hyp, idx, count, seed, stream_path)
        for hyp in range(4)
        for idx, count in _chunk_layout(per_hypothesis, chunk_size)
    ]
    counts = np.zeros((len(rules), 4, 4), dtype=np.int64)
    if workers == 1:
        results = map(_chunk_task, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            results = list(pool.map(_chunk_task, tasks, chunksize=4))
        finally:
            pool.shutdown()
    for hyp, arr in results:
        counts[:, hyp, :] += arr
    return [TallyMatrix(counts[r]) for r in range(len(rules))]


def run_trials(
    sc: SensingScenario,
    per_hypothesis: int,
    seed: "SeedSpec | int",
    *,
    rule: DecisionRule | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    calibration_samples: int = DEFAULT_CALIBRATION_SAMPLES,
    stream_path: tuple[int, ...] = (),
) -> TallyMatrix:
    """Simulate ``per_hypothesis`` trials under each true hypothesis and
    tally the scenario detector's decisions.

    Results depend only on (scenario, seed, per_hypothesis,
    chunk_size): chunk tallies merge by addition, so any worker count
    reproduces the serial run bit for bit.
    """
    if per_hypothesis < 1:
        raise ValueError(f"per_hypothesis must be >= 1, got {per_hypothesis}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    seed = _as_seed(seed)
    if rule is None:
        rule = scenario_rule(sc, seed, calibration_samples, stream_path)
    return _tally_rules(sc, [rule], per_hypothesis, seed, stream_path, workers, chunk_size)[0]


# --------------------------------------------------------------------------
# paired mode comparison


@dataclass(frozen=True)
class ModeComparison:
    """Joint busy/busy counts of two detector modes on common trials.

    ``joint_counts[h] = (both, only_a, only_b, neither)`` for true
    hypothesis h.  Because both modes classified the same statistics,
    gap estimates carry paired-difference intervals.
    """

    mode_a: DetectorMode
    mode_b: DetectorMode
    joint_counts: np.ndarray  # (4, 4) int64
    per_hypothesis: int

    def busy_rate(self, which: str, hyp: int) -> float:
        both, only_a, only_b, _ = self.joint_counts[hyp]
        extra = only_a if which == "a" else only_b
        return (both + extra) / self.per_hypothesis

    def _row_gap(self, hyp: int) -> tuple[float, float]:
        """Paired difference P_b(busy|h) - P_a(busy|h) and its SE."""
        n = self.per_hypothesis
        _, only_a, only_b, _ = self.joint_counts[hyp]
        p10, p01 = only_a / n, only_b / n
        d = p01 - p10
        var = max(p01 + p10 - d * d, 0.0) / n
        return d, math.sqrt(var)

    def busy_gap(self, rows: tuple[int, ...], weight: float) -> Estimate:
        """Weighted busy-rate gap (mode_b minus mode_a) over truth rows."""
        gaps = [self._row_gap(h) for h in rows]
        value = weight * sum(g for g, _ in gaps)
        hw = weight * Z_95 * math.sqrt(sum(se**2 for _, se in gaps))
        return Estimate(value, value - hw, value + hw)

    def p_fa_gap(self, convention: str = "prior-weighted") -> Estimate:
        w = 1.0 if convention == "paper-sum" else 0.5
        return self.busy_gap((0, 1), w)

    def p_d_gap(self, convention: str = "prior-weighted") -> Estimate:
        w = 1.0 if convention == "paper-sum" else 0.5
        return self.busy_gap((2, 3), w)


def compare_modes(
    sc: SensingScenario,
    mode_a: DetectorMode,
    mode_b: DetectorMode,
    per_hypothesis: int,
    seed: "SeedSpec | int",
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    calibration_samples: int = DEFAULT_CALIBRATION_SAMPLES,
    stream_path: tuple[int, ...] = (),
) -> ModeComparison:
    """Run both modes over identical simulated trials and record the
    joint busy decisions per true hypothesis."""
    if per_hypothesis < 1:
        raise ValueError(f"per_hypothesis must be >= 1, got {per_hypothesis}")
    seed = _as_seed(seed)
    v = scenario_variances(sc, seed, calibration_samples, stream_path)
    rule_a = _rule_for_mode(v, sc.n_packets, mode_a)
    rule_b = _rule_for_mode(v, sc.n_packets, mode_b)
    tx_c, rx_c = _coefficients(sc)
    joint = np.zeros((4, 4), dtype=np.int64)
    for hyp in range(4):
        for idx, count in _chunk_layout(per_hypothesis, chunk_size):
            rng = substream(seed, _TRIAL_STREAM, *stream_path, hyp, idx)
            z = _statistic_batch(sc, tx_c, rx_c, hyp, count, rng)
            busy_a = classify_batch(z, rule_a) >= 2
            busy_b = classify_batch(z, rule_b) >= 2
            joint[hyp, 0] += int(np.count_nonzero(busy_a & busy_b))
            joint[hyp, 1] += int(np.count_nonzero(busy_a & ~busy_b))
            joint[hyp, 2] += int(np.count_nonzero(~busy_a & busy_b))
            joint[hyp, 3] += int(np.count_nonzero(~busy_a & ~busy_b))
    return ModeComparison(mode_a, mode_b, joint, per_hypothesis)


# --------------------------------------------------------------------------
# parameter sweeps


@dataclass(frozen=True)
class SweepPoint:
    """One (grid value, detector mode) cell of a sweep.

    Analytic columns are closed forms evaluated at the variances the
    rule was built from (calibration estimates for the joint model), so
    empirical minus analytic measures Monte Carlo closure directly.
    """

    axis: str
    value: float
    mode: DetectorMode
    variances: HypothesisVariances
    rule: DecisionRule
    pfa_analytic_paper: float
    pfa_analytic_prior: float
    pd_analytic_paper: float
    pd_analytic_prior: float
    paper: Metrics
    prior: Metrics
    tally: TallyMatrix


def _apply_axis(sc: SensingScenario, axis: str, value: float) -> SensingScenario:
    if axis == "irr_db":
        return sc.with_irr(value)
    if axis == "snr1_db":
        return sc.with_snr(snr1_db=value)
    if axis == "delta_snr_db":
        return sc.with_snr(snr1_db=sc.snr2_db + value)
    if axis == "snr_db_at_delta":
        # Move the whole operating point, preserving the template's
        # SNR1 - SNR2 offset: value is the new SNR1.
        return sc.with_snr(snr1_db=value, snr2_db=value - sc.delta_snr_db)
    raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def sweep(
    sc: SensingScenario,
    axis: str,
    grid,
    per_hypothesis: int,
    seed: "SeedSpec | int",
    *,
    modes: list[DetectorMode] | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    calibration_samples: int = DEFAULT_CALIBRATION_SAMPLES,
    stream_path: tuple[int, ...] = (),
) -> list[SweepPoint]:
    """Evaluate the detector(s) along one parameter axis.

    Returns one :class:`SweepPoint` per (grid value, mode), modes
    paired on common random numbers within each grid point.  Grid point
    i draws from stream path ``(*stream_path, i)``, so results for a
    given point do not depend on the rest of the grid, and callers
    running several sweeps under one seed can keep them independent by
    passing distinct ``stream_path`` prefixes.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    seed = _as_seed(seed)
    modes = list(modes) if modes is not None else [sc.mode]
    if not modes:
        raise ValueError("modes must be nonempty")
    points: list[SweepPoint] = []
    for i, value in enumerate(grid):
        scn = _apply_axis(sc, axis, value)
        path = (*stream_path, i)
        v = scenario_variances(scn, seed, calibration_samples, path)
        rules = [_rule_for_mode(v, scn.n_packets, m) for m in modes]
        tallies = _tally_rules(scn, rules, per_hypothesis, seed, path, workers, chunk_size)
        for mode, rule, tally in zip(modes, rules, tallies):
            points.append(
                SweepPoint(
                    axis=axis,
                    value=value,
                    mode=mode,
                    variances=v,
                    rule=rule,
                    pfa_analytic_paper=analytic_false_alarm(v, rule, "paper-sum"),
                    pfa_analytic_prior=analytic_false_alarm(v, rule, "prior-weighted"),
                    pd_analytic_paper=analytic_detection(v, rule, "paper-sum"),
                    pd_analytic_prior=analytic_detection(v, rule, "prior-weighted"),
                    paper=empirical_metrics(tally, "paper-sum"),
                    prior=empirical_metrics(tally, "prior-weighted"),
                    tally=tally,
                )
            )
    return points
