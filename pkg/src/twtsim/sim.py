"""Mini-slot discrete-event loop over epochs.

Each epoch: draw fresh rates, snapshot queues, assign intervals, then walk
the epoch slot by slot.  A station assigned interval ``w`` slots wakes at
slot offsets w, 2w, ... within the epoch (offsets are 1-based, so the count
of wake slots is exactly ``slots_per_epoch // w``).  An awake station is
offered ``bits_per_session`` bits of service; the backlog recursion
``Q' = max(Q - offered, 0) + arrivals`` clamps partial service.  Energy is
charged per slot, session energy when awake and sleep energy otherwise,
which over the epoch reproduces the closed-form epoch energy exactly.

The loop only touches slots where something happens (a wake or an arrival);
queues are constant in the gaps, so skipping them changes nothing.  Per
epoch the loop records the drift diagnostics used by ``lemma1_check``: the
quadratic backlog change, the queue-weighted arrival and service sums, and
the realized energy, which together must satisfy the per-epoch drift bound
with constant ``b1`` for every feasible assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (EnergyParams, EpochTiming, epoch_energy, session_energy,
                    sleep_energy)
from .scheduler import (EpochAssignment, SchedulerParams, StationSnapshot,
                        jtwsa_assign, random_assign)
from .traffic import (RateModel, STREAM_ARRIVALS, STREAM_ASSIGN, STREAM_RATES,
                      TrafficParams, draw_arrivals_block, draw_rate,
                      service_bits_per_session, substream)

ALGORITHMS = ("jtwsa", "random")
SLEEP_SEMANTICS = ("full_sleep", "single_session")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending option."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config error [{key}]: {message}")
        self.key = key


class DriftBoundViolation(RuntimeError):
    """Raised when a per-epoch drift bound check fails during a run."""

    def __init__(self, epoch_index: int, lhs: float, rhs: float):
        super().__init__(f"drift bound violated at epoch {epoch_index}: "
                         f"{lhs} > {rhs}")
        self.epoch_index = epoch_index


@dataclass(frozen=True)
class SimConfig:
    num_stations: int
    timing: EpochTiming
    energy: EnergyParams
    traffic: TrafficParams
    rates: RateModel
    scheduler: SchedulerParams
    algorithm: str
    num_epochs: int
    seed: int
    sleep_semantics: str = "full_sleep"
    stability_threshold_frac: float = 0.01
    stability_window_frac: float = 0.5


@dataclass
class EpochStats:
    """Everything one epoch leaves behind.

    ``queue_start``/``queue_end`` are the per-station backlogs at the epoch
    boundaries, ``queue_totals`` the per-slot system backlog (start of
    slot), ``qa_sum``/``qr_sum`` the queue-weighted arrival and offered
    service sums, and ``drift_lhs <= drift_rhs`` is the per-epoch drift
    bound.  The optional traces hold per-slot arrays (slots x stations);
    ``queue_trace`` has one extra row for the end-of-epoch backlog.
    """

    epoch_index: int
    energy_per_station: np.ndarray
    queue_start: np.ndarray
    queue_end: np.ndarray
    n_sessions: np.ndarray
    qa_sum: float
    qr_sum: float
    queue_slot_sum: float
    queue_totals: np.ndarray
    drift_lhs: float
    drift_rhs: float
    arrival_trace: np.ndarray | None = None
    service_trace: np.ndarray | None = None
    queue_trace: np.ndarray | None = None


@dataclass(frozen=True)
class RunMetrics:
    avg_energy_per_epoch: float
    avg_queue_slotwise: float
    avg_queue_epoch_sampled: float
    stable: bool
    queue_slope: float


@dataclass(frozen=True)
class TheoremConstants:
    b1: float
    b2: float
    e_max: float


def derived_session_energy(cfg: SimConfig) -> float:
    return session_energy(cfg.energy)


def derived_sleep_energy(cfg: SimConfig) -> float:
    return sleep_energy(cfg.energy, cfg.timing.slot_len_s)


def max_service_bits_per_slot(cfg: SimConfig) -> float:
    return service_bits_per_session(max(cfg.rates.rate_set_bps), cfg.energy)


def theorem_constants_from_values(num_stations: int, slots_per_epoch: int,
                                  r_max_bits: float, a_max_bits: float,
                                  e_s: float) -> TheoremConstants:
    """Bounding constants of the drift analysis, in slot units."""
    quad = r_max_bits ** 2 + a_max_bits ** 2
    b1 = num_stations * slots_per_epoch * quad / 2.0
    b2 = num_stations * slots_per_epoch ** 2 * quad / 2.0
    e_max = num_stations * slots_per_epoch * e_s
    return TheoremConstants(b1=b1, b2=b2, e_max=e_max)


def theorem_constants(cfg: SimConfig) -> TheoremConstants:
    return theorem_constants_from_values(
        cfg.num_stations, cfg.timing.slots_per_epoch,
        max_service_bits_per_slot(cfg), cfg.traffic.max_bits_per_slot,
        derived_session_energy(cfg))


def queue_bound(cfg: SimConfig, epsilon_bits_per_slot: float) -> float:
    """Diagnostic long-run bound on the epoch-sampled total backlog for a
    caller-supplied stability slack; informational only."""
    if epsilon_bits_per_slot <= 0:
        raise ValueError("epsilon_bits_per_slot must be > 0")
    c = theorem_constants(cfg)
    return (c.b2 + cfg.scheduler.v * c.e_max) / epsilon_bits_per_slot


def validate_config(cfg: SimConfig) -> None:
    """Check cross-field invariants; nested types validate themselves."""
    if cfg.num_stations < 1:
        raise ConfigError("num_stations", "must be >= 1")
    if cfg.num_epochs < 1:
        raise ConfigError("num_epochs", "must be >= 1")
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigError("algorithm", f"must be one of {ALGORITHMS}")
    if cfg.sleep_semantics not in SLEEP_SEMANTICS:
        raise ConfigError("sleep_semantics", f"must be one of {SLEEP_SEMANTICS}")
    if not 0 < cfg.stability_threshold_frac:
        raise ConfigError("stability_threshold_frac", "must be > 0")
    if not 0 < cfg.stability_window_frac <= 1:
        raise ConfigError("stability_window_frac", "must be in (0, 1]")
    if abs(cfg.energy.t_up_session_s - cfg.timing.slot_len_s) > 1e-12:
        raise ConfigError("slot_len_s",
                          "mini-slot length must equal the session length t_up")
    e_s = derived_session_energy(cfg)
    e_sl = derived_sleep_energy(cfg)
    if e_s < e_sl:
        raise ConfigError("p_sleep_w",
                          "session energy must be >= sleep energy for the "
                          "wake threshold to be meaningful")
    expected_wake_cost = e_s - e_sl
    if abs(cfg.scheduler.wake_cost_j - expected_wake_cost) > 1e-12 * max(e_s, 1.0):
        raise ConfigError("v", "scheduler wake_cost_j does not match the "
                               "energy parameters")


def _wake_schedule(assignment: EpochAssignment, timing: EpochTiming,
                   sleep_semantics: str) -> tuple[dict[int, np.ndarray], np.ndarray]:
    """Map wake slot -> station indices, plus sessions per station."""
    s_per_epoch = timing.slots_per_epoch
    by_slot: dict[int, list[int]] = {}
    n_sessions = np.zeros(len(assignment.interval_index), dtype=np.int64)
    for idx, l in enumerate(assignment.interval_index):
        if l is None:
            if sleep_semantics != "single_session":
                continue
            w = s_per_epoch  # one session at the epoch's final slot
        else:
            w = timing.interval_slots[l]
        slots = range(w, s_per_epoch + 1, w)
        n_sessions[idx] = len(slots)
        for j in slots:
            by_slot.setdefault(j, []).append(idx)
    wake_map = {j: np.asarray(ids, dtype=np.int64) for j, ids in by_slot.items()}
    return wake_map, n_sessions


def run_epoch(queues: np.ndarray, assignment: EpochAssignment,
              bits_per_session: np.ndarray, cfg: SimConfig,
              arrival_rngs: list[np.random.Generator], epoch_index: int,
              record_traces: bool = False) -> tuple[np.ndarray, EpochStats]:
    """Advance all queues through one epoch under a fixed assignment.

    Returns the end-of-epoch backlogs and the epoch's statistics.  Fresh
    arrivals are drawn from each station's own stream, one block per epoch,
    so the draw order never depends on scheduling decisions.
    """
    timing = cfg.timing
    s_per_epoch = timing.slots_per_epoch
    m = cfg.num_stations
    assignment.validate_capacity(len(timing.interval_slots), cfg.scheduler.k_capacity)

    arrivals = np.column_stack([
        draw_arrivals_block(arrival_rngs[i], cfg.traffic, timing.slot_len_s,
                            s_per_epoch)
        for i in range(m)
    ])
    wake_map, n_sessions = _wake_schedule(assignment, timing, cfg.sleep_semantics)

    e_s = derived_session_energy(cfg)
    e_sl = derived_sleep_energy(cfg)
    energy = np.array([epoch_energy(int(n), e_s, e_sl, s_per_epoch)
                       for n in n_sessions])

    arrival_slots = np.nonzero(arrivals.any(axis=1))[0] + 1  # 1-based
    event_slots = sorted(set(arrival_slots.tolist()) | set(wake_map.keys()))

    if record_traces:
        service_trace = np.zeros((s_per_epoch, m))
        queue_trace = np.empty((s_per_epoch + 1, m))
    else:
        service_trace = queue_trace = None

    q = queues.astype(np.float64).copy()
    queue_start = q.copy()
    qa_sum = 0.0
    qr_sum = 0.0
    queue_slot_sum = 0.0
    queue_totals = np.empty(s_per_epoch)

    prev = 0
    for j in event_slots:
        gap = j - prev - 1
        if gap:
            tot = float(q.sum())
            queue_totals[prev:j - 1] = tot
            queue_slot_sum += tot * gap
            if record_traces:
                queue_trace[prev:j - 1] = q
        a = arrivals[j - 1]
        tot = float(q.sum())
        queue_totals[j - 1] = tot
        queue_slot_sum += tot
        if record_traces:
            queue_trace[j - 1] = q
        qa_sum += float(q @ a)
        awake = wake_map.get(j)
        if awake is not None:
            offered = bits_per_session[awake]
            qr_sum += float(q[awake] @ offered)
            if record_traces:
                service_trace[j - 1, awake] = offered
            q[awake] = np.maximum(q[awake] - offered, 0.0)
        q = q + a
        prev = j
    tail = s_per_epoch - prev
    if tail:
        tot = float(q.sum())
        queue_totals[prev:] = tot
        queue_slot_sum += tot * tail
        if record_traces:
            queue_trace[prev:s_per_epoch] = q
    if record_traces:
        queue_trace[s_per_epoch] = q

    v = cfg.scheduler.v
    b1 = theorem_constants(cfg).b1
    energy_total = float(energy.sum())
    drift_lhs = 0.5 * float((q ** 2 - queue_start ** 2).sum()) + v * energy_total
    drift_rhs = b1 + qa_sum - qr_sum + v * energy_total

    stats = EpochStats(
        epoch_index=epoch_index,
        energy_per_station=energy,
        queue_start=queue_start,
        queue_end=q.copy(),
        n_sessions=n_sessions,
        qa_sum=qa_sum,
        qr_sum=qr_sum,
        queue_slot_sum=queue_slot_sum,
        queue_totals=queue_totals,
        drift_lhs=drift_lhs,
        drift_rhs=drift_rhs,
        arrival_trace=arrivals if record_traces else None,
        service_trace=service_trace,
        queue_trace=queue_trace,
    )
    return q, stats


def lemma1_check(stats: EpochStats, cfg: SimConfig) -> bool:
    """Per-epoch drift bound, checked on the realized sample path.

    Quadratic backlog growth plus the weighted energy penalty must stay
    under the constant ``b1`` plus the queue-weighted arrival surplus (with
    the same energy term on both sides); any violation indicates a simulator
    or constants bug.
    """
    v = cfg.scheduler.v
    b1 = theorem_constants(cfg).b1
    energy_total = float(stats.energy_per_station.sum())
    lhs = 0.5 * float((stats.queue_end ** 2 - stats.queue_start ** 2).sum()) \
        + v * energy_total
    rhs = b1 + stats.qa_sum - stats.qr_sum + v * energy_total
    return lhs <= rhs


def _ls_slope(series: np.ndarray, window_frac: float) -> float:
    window = series[int(len(series) * (1 - window_frac)):]
    x = np.arange(len(window), dtype=np.float64)
    return float(np.polyfit(x, window, 1)[0])


def stability_check(queue_series: np.ndarray, threshold_bits_per_slot: float,
                    window_frac: float = 0.5) -> tuple[bool, float]:
    """Finite-run stability surrogate: least-squares slope of the tail.

    Fits a line to the trailing ``window_frac`` share of the per-slot total
    backlog series; the run counts as stable when the slope stays below the
    threshold (a small fraction of the mean per-slot arrival volume).
    """
    series = np.asarray(queue_series, dtype=np.float64)
    if len(series) < 1000:
        raise ValueError("queue series must cover at least 1000 slots")
    slope = _ls_slope(series, window_frac)
    return slope < threshold_bits_per_slot, slope


def mean_arrival_bits_per_slot(cfg: SimConfig) -> float:
    """System-wide expected arrival volume per mini-slot."""
    return (cfg.num_stations * cfg.traffic.lambda_files_per_s
            * cfg.timing.slot_len_s * cfg.traffic.file_size_bits)


def stability_threshold(cfg: SimConfig) -> float:
    thr = cfg.stability_threshold_frac * mean_arrival_bits_per_slot(cfg)
    return max(thr, 1e-9)  # keep a zero-traffic run classified as stable


def run_simulation(cfg: SimConfig, record_traces: bool = False,
                   check_drift_bound: bool = False
                   ) -> tuple[RunMetrics, list[EpochStats]]:
    """Run the configured number of epochs and aggregate run-level metrics.

    Deterministic for a given config (seed included).  With
    ``check_drift_bound`` the per-epoch drift bound is asserted after every
    epoch and a violation aborts the run.
    """
    validate_config(cfg)
    m = cfg.num_stations
    arrival_rngs = [substream(cfg.seed, STREAM_ARRIVALS, i) for i in range(m)]
    rate_rngs = [substream(cfg.seed, STREAM_RATES, i) for i in range(m)]
    assign_rng = substream(cfg.seed, STREAM_ASSIGN, 0)

    q = np.zeros(m)
    all_stats: list[EpochStats] = []
    for epoch in range(cfg.num_epochs):
        bps = np.array([service_bits_per_session(draw_rate(rate_rngs[i], cfg.rates),
                                                 cfg.energy)
                        for i in range(m)])
        snapshots = [StationSnapshot(i, float(q[i]), float(bps[i]))
                     for i in range(m)]
        if cfg.algorithm == "jtwsa":
            assignment = jtwsa_assign(snapshots, cfg.timing, cfg.scheduler)
        else:
            assignment = random_assign(assign_rng, snapshots, cfg.timing,
                                       cfg.scheduler.k_capacity)
        q, stats = run_epoch(q, assignment, bps, cfg, arrival_rngs, epoch,
                             record_traces=record_traces)
        if check_drift_bound and not lemma1_check(stats, cfg):
            raise DriftBoundViolation(epoch, stats.drift_lhs, stats.drift_rhs)
        all_stats.append(stats)

    s_per_epoch = cfg.timing.slots_per_epoch
    avg_energy = float(np.mean([st.energy_per_station.sum() for st in all_stats]))
    avg_queue_slotwise = (sum(st.queue_slot_sum for st in all_stats)
                          / (cfg.num_epochs * s_per_epoch))
    avg_queue_sampled = float(np.mean([st.queue_start.sum() for st in all_stats]))
    series = np.concatenate([st.queue_totals for st in all_stats])
    thr = stability_threshold(cfg)
    slope = _ls_slope(series, cfg.stability_window_frac) if len(series) >= 2 else 0.0
    metrics = RunMetrics(
        avg_energy_per_epoch=avg_energy,
        avg_queue_slotwise=avg_queue_slotwise,
        avg_queue_epoch_sampled=avg_queue_sampled,
        stable=slope < thr,
        queue_slope=slope,
    )
    return metrics, all_stats
