"""Plain per-slot reference simulator used to cross-check the event loop.

Walks every mini-slot one by one with the scalar queue recursion and
per-slot energy charges; deliberately has no slot-skipping or vectorized
shortcuts so it stays an independent route to the same quantities.
"""

import numpy as np

from twtsim.model import QueueState, queue_update, session_energy, sleep_energy


def reference_epoch(queues, assignment, bits_per_session, cfg, arrivals_bits):
    """Run one epoch slot by slot; arrivals_bits is a (slots, stations) array."""
    timing = cfg.timing
    s_per_epoch = timing.slots_per_epoch
    m = cfg.num_stations

    wake = np.zeros((s_per_epoch, m), dtype=bool)
    n_sessions = np.zeros(m, dtype=int)
    for i, l in enumerate(assignment.interval_index):
        if l is None:
            if cfg.sleep_semantics != "single_session":
                continue
            w = s_per_epoch
        else:
            w = timing.interval_slots[l]
        for j in range(w, s_per_epoch + 1, w):
            wake[j - 1, i] = True
        n_sessions[i] = s_per_epoch // w

    e_s = session_energy(cfg.energy)
    e_sl = sleep_energy(cfg.energy, timing.slot_len_s)
    q = [QueueState(float(x)) for x in queues]
    queue_trace = np.empty((s_per_epoch + 1, m))
    service_trace = np.zeros((s_per_epoch, m))
    energy = np.zeros(m)
    queue_totals = np.empty(s_per_epoch)
    qa_sum = 0.0
    qr_sum = 0.0
    queue_slot_sum = 0.0

    for j in range(1, s_per_epoch + 1):
        row = np.array([x.backlog_bits for x in q])
        queue_trace[j - 1] = row
        queue_totals[j - 1] = row.sum()
        queue_slot_sum += row.sum()
        for i in range(m):
            served = float(bits_per_session[i]) if wake[j - 1, i] else 0.0
            arrived = float(arrivals_bits[j - 1, i])
            service_trace[j - 1, i] = served
            qa_sum += row[i] * arrived
            qr_sum += row[i] * served
            energy[i] += e_s if wake[j - 1, i] else e_sl
            q[i] = queue_update(q[i], served, arrived)
    queue_trace[s_per_epoch] = [x.backlog_bits for x in q]

    return {
        "queue_trace": queue_trace,
        "service_trace": service_trace,
        "queue_totals": queue_totals,
        "queue_slot_sum": queue_slot_sum,
        "qa_sum": qa_sum,
        "qr_sum": qr_sum,
        "energy": energy,
        "n_sessions": n_sessions,
    }
