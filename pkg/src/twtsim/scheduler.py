"""Per-epoch assignment of stations to wake intervals.

At every epoch boundary each station either receives one interval from the
candidate set or sleeps through the whole epoch.  Two policies are provided:

* ``jtwsa_assign``: weight each station by
  ``backlog_bits * bits_per_session - v * wake_cost`` and hand the shortest
  interval (most sessions) to the heaviest stations, capacity ``k`` per
  interval; stations whose weight is not strictly positive sleep.  Because
  session counts shrink as intervals grow, pairing larger weights with larger
  session counts maximizes the epoch objective
  ``sum_m n_sessions(m) * weight(m)`` (rearrangement argument), which the
  exhaustive search in :mod:`twtsim.oracle` certifies on small instances.

* ``random_assign``: the benchmark, which fills intervals uniformly at
  random, ignoring queues and rates.

Ties in weight are broken by lowest station id so assignments are
reproducible.  Apart from the benchmark's generator these are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EpochTiming


@dataclass(frozen=True)
class StationSnapshot:
    """What the scheduler sees of one station at an epoch boundary."""

    station_id: int
    backlog_bits: float
    bits_per_session: float

    def __post_init__(self):
        if self.backlog_bits < 0:
            raise ValueError("backlog_bits must be >= 0")
        if self.bits_per_session < 0:
            raise ValueError("bits_per_session must be >= 0")


@dataclass(frozen=True)
class SchedulerParams:
    """Energy-delay tradeoff weight ``v``, per-interval capacity, and the
    extra joules one session costs over sleeping (``wake_cost``)."""

    v: float
    k_capacity: int
    wake_cost_j: float

    def __post_init__(self):
        if self.v < 0:
            raise ValueError("v must be >= 0")
        if self.k_capacity < 1:
            raise ValueError("k_capacity must be >= 1")
        if self.wake_cost_j < 0:
            raise ValueError("wake_cost_j must be >= 0")


@dataclass(frozen=True)
class EpochAssignment:
    """Interval choice per station: index into the interval set, or None to sleep."""

    station_ids: tuple[int, ...]
    interval_index: tuple[int | None, ...]

    def __post_init__(self):
        if len(self.station_ids) != len(self.interval_index):
            raise ValueError("station_ids and interval_index lengths differ")

    def counts_per_interval(self, num_intervals: int) -> list[int]:
        counts = [0] * num_intervals
        for l in self.interval_index:
            if l is not None:
                counts[l] += 1
        return counts

    def validate_capacity(self, num_intervals: int, k_capacity: int) -> None:
        for l, c in enumerate(self.counts_per_interval(num_intervals)):
            if c > k_capacity:
                raise ValueError(f"interval {l} holds {c} stations, capacity is {k_capacity}")


def sta_weight(s: StationSnapshot, p: SchedulerParams) -> float:
    """Scheduling weight: queue-rate product minus the scaled wake cost."""
    return s.backlog_bits * s.bits_per_session - p.v * p.wake_cost_j


def assign_by_weights(weights, station_ids, num_intervals: int,
                      k_capacity: int) -> list[int | None]:
    """Greedy core shared by jtwsa_assign and the verification harness.

    Sorts by descending weight (ties: lowest id first), keeps the top
    ``num_intervals * k_capacity`` stations, and walks them into intervals in
    ascending-interval order, k per interval.  Entries with weight <= 0 and
    everything beyond the capacity budget map to None (sleep).
    """
    n = len(weights)
    if n != len(station_ids):
        raise ValueError("weights and station_ids lengths differ")
    order = sorted(range(n), key=lambda i: (-weights[i], station_ids[i]))
    result: list[int | None] = [None] * n
    for pos, i in enumerate(order[: num_intervals * k_capacity]):
        if weights[i] > 0:
            result[i] = pos // k_capacity
    return result


def jtwsa_assign(stations: list[StationSnapshot], timing: EpochTiming,
                 params: SchedulerParams) -> EpochAssignment:
    """Assign intervals by descending weight, shortest interval first.

    The heaviest ``k`` stations get the first (shortest) interval and so the
    most sessions, the next ``k`` the second interval, and so on; any station
    whose weight is not strictly positive sleeps, as does everything past the
    ``L * k`` capacity budget.
    """
    if not stations:
        raise ValueError("stations must not be empty")
    ids = tuple(s.station_id for s in stations)
    weights = [sta_weight(s, params) for s in stations]
    iv = assign_by_weights(weights, ids, len(timing.interval_slots), params.k_capacity)
    return EpochAssignment(ids, tuple(iv))


def random_assign(rng: np.random.Generator, stations: list[StationSnapshot],
                  timing: EpochTiming, k_capacity: int) -> EpochAssignment:
    """Benchmark: uniform station choice, uniform interval slots, queues ignored.

    Picks ``min(M, L * k)`` stations without replacement, shuffles the
    ``L * k`` capacity slots (k copies of each interval), and matches stations
    to the first slots of the shuffle; everyone else sleeps.
    """
    if not stations:
        raise ValueError("stations must not be empty")
    n = len(stations)
    num_intervals = len(timing.interval_slots)
    n_assign = min(n, num_intervals * k_capacity)
    chosen = rng.choice(n, size=n_assign, replace=False)
    slot_pool = np.repeat(np.arange(num_intervals), k_capacity)
    slot_order = rng.permutation(num_intervals * k_capacity)[:n_assign]
    iv: list[int | None] = [None] * n
    for pick, slot in zip(chosen, slot_order):
        iv[int(pick)] = int(slot_pool[slot])
    return EpochAssignment(tuple(s.station_id for s in stations), tuple(iv))
