"""Exhaustive maximization of the per-epoch assignment objective.

Ground truth for the greedy scheduler on small instances: enumerate every
map station -> {interval_1..interval_L, sleep}, drop the capacity violators,
and keep the best objective value.  Test machinery only, so clarity beats
speed; the enumeration is chunked to keep memory bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scheduler import EpochAssignment, assign_by_weights

MAX_STATIONS = 12
MAX_MAPS = 10_000_000
_CHUNK = 1 << 16


@dataclass(frozen=True)
class AssignmentInstance:
    """One epoch's assignment problem: per-station weights, sessions per
    interval (nonincreasing, shortest interval first), per-interval capacity."""

    weights: tuple[float, ...]
    session_counts: tuple[int, ...]
    k_capacity: int

    def __post_init__(self):
        if not all(math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be finite")
        if any(n <= 0 for n in self.session_counts):
            raise ValueError("session_counts must be strictly positive")
        if self.k_capacity < 1:
            raise ValueError("k_capacity must be >= 1")


def objective_value(instance: AssignmentInstance, assignment: EpochAssignment) -> float:
    """sum_m n_sessions(m) * weight(m), with zero sessions for sleepers."""
    if len(assignment.interval_index) != len(instance.weights):
        raise ValueError("assignment does not match instance size")
    assignment.validate_capacity(len(instance.session_counts), instance.k_capacity)
    total = 0.0
    for w, l in zip(instance.weights, assignment.interval_index):
        if l is not None:
            total += instance.session_counts[l] * w
    return total


def brute_force_assign(instance: AssignmentInstance) -> tuple[EpochAssignment, float]:
    """Best feasible assignment and its objective value, by enumeration.

    Refuses instances beyond the enumeration budget (more than 12 stations
    or more than 1e7 candidate maps).  Sleeping everyone is always feasible,
    so the returned value is never negative.
    """
    m = len(instance.weights)
    num_l = len(instance.session_counts)
    if m > MAX_STATIONS:
        raise ValueError(f"too many stations to enumerate ({m} > {MAX_STATIONS})")
    total_maps = (num_l + 1) ** m
    if total_maps > MAX_MAPS:
        raise ValueError(f"instance needs {total_maps} maps, budget is {MAX_MAPS}")

    weights = np.asarray(instance.weights, dtype=np.float64)
    # index 0 means sleep; 1..L pick an interval
    sess = np.concatenate(([0], np.asarray(instance.session_counts, dtype=np.float64)))
    best_value = -np.inf
    best_code = 0
    for start in range(0, total_maps, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total_maps), dtype=np.int64)
        digits = np.empty((codes.size, m), dtype=np.int64)
        rem = codes
        for col in range(m):
            digits[:, col] = rem % (num_l + 1)
            rem = rem // (num_l + 1)
        feasible = np.ones(codes.size, dtype=bool)
        for l in range(1, num_l + 1):
            feasible &= (digits == l).sum(axis=1) <= instance.k_capacity
        values = (sess[digits] * weights).sum(axis=1)
        values[~feasible] = -np.inf
        idx = int(np.argmax(values))
        if values[idx] > best_value:
            best_value = float(values[idx])
            best_code = int(codes[idx])

    iv: list[int | None] = []
    rem = best_code
    for _ in range(m):
        d = rem % (num_l + 1)
        rem //= num_l + 1
        iv.append(None if d == 0 else d - 1)
    assignment = EpochAssignment(tuple(range(m)), tuple(iv))
    return assignment, best_value


@dataclass
class EquivalenceReport:
    """Outcome of comparing the greedy scheduler against the exhaustive optimum."""

    trials: int
    passes: int
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def random_instance(rng: np.random.Generator, max_m: int, max_l: int,
                    max_k: int, slots_per_epoch: int = 1000) -> AssignmentInstance:
    """Random small instance: uniform weights in [-10, 10], session counts
    derived from sorted random intervals inside a fixed epoch."""
    m = int(rng.integers(1, max_m + 1))
    num_l = int(rng.integers(1, max_l + 1))
    k = int(rng.integers(1, max_k + 1))
    intervals = np.sort(rng.choice(np.arange(1, slots_per_epoch + 1),
                                   size=num_l, replace=False))
    counts = tuple(int(slots_per_epoch // w) for w in intervals)
    weights = tuple(float(x) for x in rng.uniform(-10.0, 10.0, size=m))
    return AssignmentInstance(weights, counts, k)


def run_equivalence_trials(trials: int, max_m: int, max_l: int, max_k: int,
                           seed: int, assign_fn=None) -> EquivalenceReport:
    """Compare greedy and exhaustive objective values on random instances.

    ``assign_fn`` defaults to the production greedy; tests may inject a
    deliberately broken variant to confirm the harness catches it.
    """
    if assign_fn is None:
        assign_fn = assign_by_weights
    rng = np.random.default_rng(seed)
    report = EquivalenceReport(trials=trials, passes=0)
    for trial in range(trials):
        instance = random_instance(rng, max_m, max_l, max_k)
        ids = tuple(range(len(instance.weights)))
        iv = assign_fn(instance.weights, ids, len(instance.session_counts),
                       instance.k_capacity)
        greedy_value = objective_value(instance, EpochAssignment(ids, tuple(iv)))
        _, best_value = brute_force_assign(instance)
        scale = max(abs(best_value), 1.0)
        if abs(greedy_value - best_value) <= 1e-9 * scale:
            report.passes += 1
        else:
            report.failures.append({
                "trial": trial,
                "weights": instance.weights,
                "session_counts": instance.session_counts,
                "k_capacity": instance.k_capacity,
                "greedy_value": greedy_value,
                "optimal_value": best_value,
            })
    return report
