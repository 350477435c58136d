import numpy as np
import pytest

from twtsim.model import EnergyParams
from twtsim.traffic import (RateModel, STREAM_ARRIVALS, STREAM_RATES,
                            TrafficParams, draw_arrivals, draw_arrivals_block,
                            draw_rate, service_bits_per_session, substream)

FILE_BITS = 200000.0


def make_traffic(lam=2.0, cap=10):
    return TrafficParams(file_size_bits=FILE_BITS, lambda_files_per_s=lam,
                         arrival_cap_files_per_slot=cap)


def test_zero_rate_never_arrives():
    tp = make_traffic(lam=0.0)
    rng = substream(1, STREAM_ARRIVALS, 0)
    assert all(draw_arrivals(rng, tp, 0.001) == 0.0 for _ in range(100))


def test_arrival_mean_matches_rate():
    # law of large numbers against lambda * slot * file_size
    tp = make_traffic(lam=2.0)
    rng = substream(123, STREAM_ARRIVALS, 0)
    draws = draw_arrivals_block(rng, tp, 0.001, 1_000_000)
    expected = 2.0 * 0.001 * FILE_BITS  # 400 bits per slot
    assert abs(draws.mean() - expected) / expected < 0.01


def test_arrival_cap_bounds_output():
    tp = make_traffic(lam=1e9, cap=3)
    rng = substream(5, STREAM_ARRIVALS, 0)
    draws = draw_arrivals_block(rng, tp, 0.001, 1000)
    assert draws.max() <= 3 * FILE_BITS
    assert (draws == 3 * FILE_BITS).all()  # truncation is certain at this rate
    assert tp.max_bits_per_slot == 3 * FILE_BITS


def test_arrivals_are_whole_files():
    tp = make_traffic(lam=500.0, cap=7)
    rng = substream(9, STREAM_ARRIVALS, 2)
    draws = draw_arrivals_block(rng, tp, 0.001, 5000)
    assert np.all(np.mod(draws, FILE_BITS) == 0)


def test_scalar_and_block_draws_share_the_law():
    tp = make_traffic(lam=800.0, cap=4)
    rng = substream(11, STREAM_ARRIVALS, 0)
    scalar = np.array([draw_arrivals(rng, tp, 0.001) for _ in range(20000)])
    rng = substream(12, STREAM_ARRIVALS, 0)
    block = draw_arrivals_block(rng, tp, 0.001, 20000)
    assert abs(scalar.mean() - block.mean()) / block.mean() < 0.02


def test_rate_singleton():
    rm = RateModel((1e8,))
    rng = substream(1, STREAM_RATES, 0)
    assert all(draw_rate(rng, rm) == 1e8 for _ in range(50))


def test_rate_uniformity():
    rates = (1e7, 2e7, 5e7, 1e8, 1.5e8, 2e8)
    rm = RateModel(rates)
    rng = substream(77, STREAM_RATES, 0)
    draws = np.fromiter((draw_rate(rng, rm) for _ in range(1_000_000)),
                        dtype=np.float64, count=1_000_000)
    for r in rates:
        freq = float(np.mean(draws == r))
        assert abs(freq - 1 / 6) < 0.01


def test_rate_draws_seeded_regression():
    # frozen from the first verified run; guards the substream derivation
    rm = RateModel((1e7, 2e7))
    rng = substream(42, STREAM_RATES, 0)
    draws = [draw_rate(rng, rm) for _ in range(8)]
    assert draws == [2e7, 2e7, 2e7, 2e7, 2e7, 2e7, 2e7, 2e7]
    rng = substream(42, STREAM_ARRIVALS, 0)
    tp = TrafficParams(FILE_BITS, 500.0, 3)
    arr = [draw_arrivals(rng, tp, 0.001) for _ in range(8)]
    assert arr == [200000.0, 200000.0, 0.0, 0.0, 200000.0, 0.0, 0.0, 0.0]


def test_draws_bit_identical_across_recreation():
    tp = make_traffic(lam=100.0)
    a = draw_arrivals_block(substream(3, STREAM_ARRIVALS, 4), tp, 0.001, 1000)
    b = draw_arrivals_block(substream(3, STREAM_ARRIVALS, 4), tp, 0.001, 1000)
    assert np.array_equal(a, b)


def test_stations_get_independent_streams():
    tp = make_traffic(lam=100.0)
    a = draw_arrivals_block(substream(3, STREAM_ARRIVALS, 0), tp, 0.001, 1000)
    b = draw_arrivals_block(substream(3, STREAM_ARRIVALS, 1), tp, 0.001, 1000)
    assert not np.array_equal(a, b)


def test_service_bits_per_session():
    ep = EnergyParams(p_down_w=0, p_up_w=1.0, p_sleep_w=0.15,
                      t_up_session_s=0.001, frac_down=0.0, frac_up=1.0)
    assert service_bits_per_session(2e8, ep) == pytest.approx(200000.0)
    assert service_bits_per_session(0.0, ep) == 0.0
    assert service_bits_per_session(1e7, ep) == pytest.approx(10000.0)
    with pytest.raises(ValueError):
        service_bits_per_session(-1.0, ep)


def test_params_invariants():
    with pytest.raises(ValueError):
        TrafficParams(0, 1.0, 1)
    with pytest.raises(ValueError):
        TrafficParams(1, -1.0, 1)
    with pytest.raises(ValueError):
        TrafficParams(1, 1.0, 0)
    with pytest.raises(ValueError):
        RateModel(())
    with pytest.raises(ValueError):
        RateModel((2e7, 1e7))
    with pytest.raises(ValueError):
        RateModel((0.0, 1e7))
