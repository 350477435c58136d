"""Random file arrivals and per-epoch transmission-rate draws.

Arrivals are whole files: the number of files landing at one station in one
mini-slot is Poisson with mean ``lambda * slot_len``, truncated at a
configurable per-slot cap so that arrivals are bounded (the drift analysis
needs a finite worst case).  Transmission rates are redrawn once per epoch,
uniformly from a discrete rate set, and held constant within the epoch.

Every station owns independent random sub-streams derived deterministically
from (master seed, purpose tag, station id), so draws are reproducible and
independent across stations regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STREAM_ARRIVALS = 0
STREAM_RATES = 1
STREAM_ASSIGN = 2


@dataclass(frozen=True)
class TrafficParams:
    file_size_bits: float
    lambda_files_per_s: float
    arrival_cap_files_per_slot: int

    def __post_init__(self):
        if self.file_size_bits <= 0:
            raise ValueError("file_size_bits must be > 0")
        if self.lambda_files_per_s < 0:
            raise ValueError("lambda_files_per_s must be >= 0")
        if self.arrival_cap_files_per_slot < 1:
            raise ValueError("arrival_cap_files_per_slot must be >= 1")

    @property
    def max_bits_per_slot(self) -> float:
        """Hard per-slot arrival bound implied by the truncation cap."""
        return self.arrival_cap_files_per_slot * self.file_size_bits


@dataclass(frozen=True)
class RateModel:
    """Discrete set of supported link rates in bits per second, ascending."""

    rate_set_bps: tuple[float, ...]

    def __post_init__(self):
        if len(self.rate_set_bps) == 0:
            raise ValueError("rate_set_bps must not be empty")
        if any(r <= 0 for r in self.rate_set_bps):
            raise ValueError("all rates must be > 0")
        if any(b <= a for a, b in zip(self.rate_set_bps, self.rate_set_bps[1:])):
            raise ValueError("rate_set_bps must be strictly increasing")


def substream(master_seed: int, purpose: int, station_id: int) -> np.random.Generator:
    """Independent generator for (seed, purpose, station); deterministic."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(purpose, station_id))
    return np.random.default_rng(seq)


def draw_arrivals(rng: np.random.Generator, tp: TrafficParams, slot_len_s: float) -> float:
    """Bits arriving at one station in one mini-slot (a whole number of files)."""
    if slot_len_s <= 0:
        raise ValueError("slot_len_s must be > 0")
    k = rng.poisson(tp.lambda_files_per_s * slot_len_s)
    k = min(int(k), tp.arrival_cap_files_per_slot)
    return k * tp.file_size_bits


def draw_arrivals_block(rng: np.random.Generator, tp: TrafficParams,
                        slot_len_s: float, n_slots: int) -> np.ndarray:
    """Vectorized variant of draw_arrivals: one value per slot, same law."""
    if slot_len_s <= 0:
        raise ValueError("slot_len_s must be > 0")
    ks = rng.poisson(tp.lambda_files_per_s * slot_len_s, size=n_slots)
    np.minimum(ks, tp.arrival_cap_files_per_slot, out=ks)
    return ks.astype(np.float64) * tp.file_size_bits


def draw_rate(rng: np.random.Generator, rm: RateModel) -> float:
    """Uniform draw from the rate set; one per station per epoch."""
    return rm.rate_set_bps[int(rng.integers(len(rm.rate_set_bps)))]


def service_bits_per_session(rate_bps: float, ep) -> float:
    """Bits one wake session can move at the given rate (uplink share only)."""
    if rate_bps < 0:
        raise ValueError("rate_bps must be >= 0")
    return rate_bps * ep.frac_up * ep.t_up_session_s
