"""Deterministic timing, energy, and queue formulas for TWT power saving.

A station that holds a wake interval agreement wakes once per interval for a
session of length ``t_up`` seconds and sleeps otherwise.  Time is discretized
into mini-slots of length ``slot_len`` (one session fills one mini-slot), an
epoch spans ``slots_per_epoch`` mini-slots, and everything the simulator
charges or tracks reduces to four formulas:

    session energy   E_s     = P_d * t_d * t_up + P_u * t_u * t_up      [J]
    sleep energy     E_sleep = P_sleep * slot_len                       [J]
    epoch energy     E       = n * E_s + (slots_per_epoch - n) * E_sleep
    queue update     Q'      = max(Q - served, 0) + arrived             [bits]

where ``n`` is the number of sessions the station gets in the epoch,
``floor(epoch_len / interval)`` for its assigned interval.  Powers are in
watts, time in seconds, data in bits.  All functions here are pure and safe
to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance when snapping a duration to a whole number of slots.
_SLOT_SNAP_TOL = 1e-6


@dataclass(frozen=True)
class EnergyParams:
    """Power levels and session-time fractions of one station.

    ``frac_down`` and ``frac_up`` split the session between downlink and
    uplink; their sum may be below 1 (the remainder is idle listening,
    charged at the blended session rate implied by the formula above).
    """

    p_down_w: float
    p_up_w: float
    p_sleep_w: float
    t_up_session_s: float
    frac_down: float
    frac_up: float

    def __post_init__(self):
        for name in ("p_down_w", "p_up_w", "p_sleep_w"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.t_up_session_s <= 0:
            raise ValueError("t_up_session_s must be > 0")
        if self.frac_down < 0 or self.frac_up < 0:
            raise ValueError("session fractions must be >= 0")
        if self.frac_down + self.frac_up > 1 + 1e-12:
            raise ValueError("frac_down + frac_up must be <= 1")


@dataclass(frozen=True)
class EpochTiming:
    """Epoch and mini-slot layout plus the candidate wake-interval set.

    ``interval_set_s`` is strictly increasing; every interval is a whole
    number of slots and no longer than the epoch.  ``interval_slots`` holds
    the same intervals converted to slot counts.
    """

    epoch_len_s: float
    slot_len_s: float
    slots_per_epoch: int
    interval_set_s: tuple[float, ...]
    interval_slots: tuple[int, ...]

    @classmethod
    def from_seconds(cls, epoch_len_s: float, slot_len_s: float,
                     interval_set_s: tuple[float, ...] | list[float]) -> "EpochTiming":
        if slot_len_s <= 0:
            raise ValueError("slot_len_s must be > 0")
        slots = _snap_to_slots(epoch_len_s, slot_len_s, "epoch_len_s")
        intervals = tuple(float(x) for x in interval_set_s)
        if len(intervals) < 1:
            raise ValueError("interval_set_s must contain at least one interval")
        if any(b <= a for a, b in zip(intervals, intervals[1:])):
            raise ValueError("interval_set_s must be strictly increasing")
        interval_slots = []
        for iv in intervals:
            w = _snap_to_slots(iv, slot_len_s, "twt interval")
            if w > slots:
                raise ValueError(f"twt interval {iv} s exceeds the epoch length")
            interval_slots.append(w)
        return cls(float(epoch_len_s), float(slot_len_s), slots,
                   intervals, tuple(interval_slots))

    def session_counts(self) -> tuple[int, ...]:
        """Sessions per epoch for each interval, in interval order."""
        return tuple(self.slots_per_epoch // w for w in self.interval_slots)


@dataclass(frozen=True)
class QueueState:
    """Backlog of one station in bits; never negative."""

    backlog_bits: float

    def __post_init__(self):
        if self.backlog_bits < 0:
            raise ValueError("backlog_bits must be >= 0")


def _snap_to_slots(value_s: float, slot_len_s: float, what: str) -> int:
    """Convert a duration to a whole slot count, rejecting misaligned values."""
    ratio = value_s / slot_len_s
    n = round(ratio)
    if n < 1 or abs(ratio - n) > _SLOT_SNAP_TOL:
        raise ValueError(f"{what} ({value_s} s) is not a whole multiple of "
                         f"slot_len ({slot_len_s} s)")
    return int(n)


def session_energy(ep: EnergyParams) -> float:
    """Energy of one wake session in joules."""
    return (ep.p_down_w * ep.frac_down * ep.t_up_session_s
            + ep.p_up_w * ep.frac_up * ep.t_up_session_s)


def sleep_energy(ep: EnergyParams, slot_len_s: float) -> float:
    """Energy of one slept mini-slot in joules."""
    if slot_len_s <= 0:
        raise ValueError("slot_len_s must be > 0")
    return ep.p_sleep_w * slot_len_s


def sessions_per_epoch(epoch_len_s: float, interval_s: float) -> int:
    """Number of wake sessions an interval yields inside one epoch.

    floor(epoch_len / interval), with a tiny bias so exact ratios stored in
    binary floating point do not round down.  The interval must be positive
    and no longer than the epoch, so the result is always >= 1.
    """
    if interval_s <= 0:
        raise ValueError("interval_s must be > 0")
    if interval_s > epoch_len_s:
        raise ValueError("interval_s must not exceed epoch_len_s")
    return int(math.floor(epoch_len_s / interval_s + 1e-9))


def epoch_energy(n_sessions: int, e_s: float, e_sleep: float,
                 slots_per_epoch: int) -> float:
    """Epoch energy of one station: n sessions awake, the rest asleep."""
    if n_sessions < 0 or n_sessions > slots_per_epoch:
        raise ValueError("n_sessions must lie in [0, slots_per_epoch]")
    return e_s * n_sessions + (slots_per_epoch - n_sessions) * e_sleep


def queue_update(q: QueueState, served_bits: float, arrived_bits: float) -> QueueState:
    """One-slot backlog recursion: serve first (clamped at zero), then add arrivals."""
    if served_bits < 0 or arrived_bits < 0:
        raise ValueError("served_bits and arrived_bits must be >= 0")
    return QueueState(max(q.backlog_bits - served_bits, 0.0) + arrived_bits)
