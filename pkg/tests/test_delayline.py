import numpy as np
import pytest

from delay_consensus.delayline import DelayLine, delay_steps
from delay_consensus.errors import NonCommensurateDelayError


def test_half_second_delay_at_five_ms_is_hundred_steps():
    assert delay_steps(0.5, 0.005) == 100


def test_zero_delay_is_zero_steps():
    assert delay_steps(0.0, 0.005) == 0


def test_non_commensurate_delay_rejected():
    with pytest.raises(NonCommensurateDelayError):
        delay_steps(0.0033, 0.005)


def test_bad_arguments_rejected():
    with pytest.raises(ValueError):
        delay_steps(0.5, 0.0)
    with pytest.raises(ValueError):
        delay_steps(-0.1, 0.005)
    with pytest.raises(ValueError):
        DelayLine(-1, 1)
    with pytest.raises(ValueError):
        DelayLine(3, 0)


def test_reads_zero_until_history_exists():
    line = DelayLine(2, 1)
    outs = [line.push_and_read(np.array([x])) for x in (1.0, 2.0, 3.0)]
    assert [o[0] for o in outs] == [0.0, 0.0, 1.0]


def test_zero_delay_passes_through():
    line = DelayLine(0, 1)
    assert line.push_and_read(np.array([7.0]))[0] == 7.0


def test_constant_input_switches_on_after_delay():
    line = DelayLine.from_delay(0.5, 0.005, 1)
    assert line.delay_steps == 100
    c = np.array([3.25])
    outs = [line.push_and_read(c)[0] for _ in range(250)]
    assert outs[:100] == [0.0] * 100
    assert outs[100:] == [3.25] * 150


def test_matches_naive_full_history_oracle():
    rng = np.random.default_rng(7)
    for steps in range(0, 9):
        line = DelayLine(steps, 2)
        history = []
        for k in range(200):
            x = rng.standard_normal(2)
            history.append(x.copy())
            out = line.push_and_read(x)
            expected = history[k - steps] if k - steps >= 0 else np.zeros(2)
            assert np.array_equal(out, expected)


def test_linearity_over_superposition():
    # integer-valued samples keep float addition exact
    rng = np.random.default_rng(3)
    xs = rng.integers(-5, 6, size=(60, 1)).astype(float)
    ys = rng.integers(-5, 6, size=(60, 1)).astype(float)
    la, lb, lc = DelayLine(4, 1), DelayLine(4, 1), DelayLine(4, 1)
    for x, y in zip(xs, ys):
        out_sum = la.push_and_read(x + 2.0 * y)
        out_x = lb.push_and_read(x)
        out_y = lc.push_and_read(y)
        assert np.array_equal(out_sum, out_x + 2.0 * out_y)


def test_storage_is_bounded_by_delay_plus_one():
    line = DelayLine(17, 3)
    for _ in range(100):
        line.push_and_read(np.zeros(3))
    assert line.capacity == 18
    assert line._buf.shape == (18, 3)
    assert line.steps_pushed == 100


def test_width_mismatch_rejected():
    line = DelayLine(2, 2)
    with pytest.raises(ValueError):
        line.push_and_read(np.zeros(3))
