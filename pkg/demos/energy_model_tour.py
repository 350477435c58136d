"""Tour of the timing and energy model.

Walks through the deterministic formulas with the default parameter set:
what one wake session costs, what sleeping costs, how many sessions each
candidate interval yields inside an epoch, and what a full epoch costs a
station as a function of its interval.
"""

from twtsim import (default_sim_config, epoch_energy, queue_bound,
                    session_energy, sessions_per_epoch, sleep_energy,
                    theorem_constants)

cfg = default_sim_config()
timing = cfg.timing
e_s = session_energy(cfg.energy)
e_sleep = sleep_energy(cfg.energy, timing.slot_len_s)

print(f"stations               : {cfg.num_stations}")
print(f"epoch                  : {timing.epoch_len_s} s "
      f"({timing.slots_per_epoch} mini-slots of {timing.slot_len_s} s)")
print(f"session energy  E_s    : {e_s * 1e3:.3f} mJ")
print(f"sleep energy    E_sleep: {e_sleep * 1e3:.3f} mJ per slot")
print(f"wake premium per session: {(e_s - e_sleep) * 1e3:.3f} mJ")
print()

print("interval   sessions/epoch   epoch energy (one station)")
for interval in timing.interval_set_s:
    n = sessions_per_epoch(timing.epoch_len_s, interval)
    e = epoch_energy(n, e_s, e_sleep, timing.slots_per_epoch)
    print(f"{interval * 1e3:6.0f} ms   {n:8d}         {e:.4f} J")

always_sleep = epoch_energy(0, e_s, e_sleep, timing.slots_per_epoch)
print(f"\nfull-epoch sleep costs {always_sleep:.4f} J; even the busiest "
      f"interval only adds {(epoch_energy(20, e_s, e_sleep, 1000) - always_sleep) * 1e3:.1f} mJ")

# The analysis constants scale the drift diagnostics and the (informational)
# long-run queue bound for a user-supplied stability slack.
c = theorem_constants(cfg)
print(f"\nconstants: b1 = {c.b1:.3e}, b2 = {c.b2:.3e}, e_max = {c.e_max:.1f} J")
for eps in (1e3, 1e4, 1e5):
    print(f"  queue bound at slack {eps:8.0f} bits/slot: "
          f"{queue_bound(cfg, eps):.3e} bits")
