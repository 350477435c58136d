"""Discrete-event simulator and scheduling library for 802.11ax target wake
time (TWT) power saving.

Stations sleep between agreed wake intervals; once per epoch a scheduler
reassigns intervals from a discrete candidate set, at most k stations per
interval.  The library provides the energy and queue formulas, random
traffic and rate models, a greedy drift-plus-penalty scheduler with a random
benchmark, an exhaustive assignment oracle for verification, the mini-slot
simulation loop, and a CLI for runs and parameter sweeps.
"""

from .model import (EnergyParams, EpochTiming, QueueState, epoch_energy,
                    queue_update, session_energy, sessions_per_epoch,
                    sleep_energy)
from .oracle import (AssignmentInstance, EquivalenceReport, brute_force_assign,
                     objective_value, random_instance, run_equivalence_trials)
from .scheduler import (EpochAssignment, SchedulerParams, StationSnapshot,
                        assign_by_weights, jtwsa_assign, random_assign,
                        sta_weight)
from .sim import (ConfigError, DriftBoundViolation, EpochStats, RunMetrics,
                  SimConfig, TheoremConstants, lemma1_check,
                  mean_arrival_bits_per_slot, queue_bound, run_epoch,
                  run_simulation, stability_check, stability_threshold,
                  theorem_constants, theorem_constants_from_values,
                  validate_config)
from .traffic import (RateModel, TrafficParams, draw_arrivals,
                      draw_arrivals_block, draw_rate,
                      service_bits_per_session, substream)
from .cli import (SweepSpec, default_sim_config, default_sweep_spec,
                  parse_config, parse_config_text, rows_to_csv, run_sweep,
                  serialize_config)

__version__ = "0.1.0"
