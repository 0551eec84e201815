"""Fixed-step delayed-signal channels.

A channel returns the sample pushed exactly ``delay_steps`` pushes earlier
and exactly zero before that much history exists.  Delays must be integer
multiples of the step size; there is no interpolation, which keeps delayed
reads bit-exact and simulations deterministic.
"""
from __future__ import annotations

import numpy as np

from .errors import NonCommensurateDelayError

COMMENSURATE_RTOL = 1e-9


def delay_steps(delay: float, dt: float) -> int:
    """Number of dt-steps spanned by ``delay`` seconds.

    Raises NonCommensurateDelayError unless delay/dt is integral within
    a 1e-9 relative tolerance.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if delay < 0.0 or not np.isfinite(delay):
        raise ValueError(f"delay must be finite and nonnegative, got {delay}")
    ratio = delay / dt
    steps = round(ratio)
    if abs(ratio - steps) > COMMENSURATE_RTOL * max(1.0, abs(ratio)):
        raise NonCommensurateDelayError(
            f"delay {delay} s is not an integer multiple of dt {dt} s"
        )
    return int(steps)


class DelayLine:
    """Ring buffer of ``delay_steps + 1`` width-``m`` samples."""

    def __init__(self, steps: int, width: int):
        if steps < 0:
            raise ValueError(f"delay_steps must be nonnegative, got {steps}")
        if width < 1:
            raise ValueError(f"width must be positive, got {width}")
        self.delay_steps = int(steps)
        self.width = int(width)
        self._buf = np.zeros((self.delay_steps + 1, self.width))
        self._next = 0
        self.steps_pushed = 0

    @classmethod
    def from_delay(cls, delay: float, dt: float, width: int) -> "DelayLine":
        return cls(delay_steps(delay, dt), width)

    @property
    def capacity(self) -> int:
        return self._buf.shape[0]

    def push_and_read(self, x: np.ndarray) -> np.ndarray:
        """Append ``x`` and return the sample from ``delay_steps`` pushes ago (zero pre-history)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.width,):
            raise ValueError(f"expected shape ({self.width},), got {x.shape}")
        size = self._buf.shape[0]
        self._buf[self._next] = x
        out = self._buf[(self._next - self.delay_steps) % size].copy()
        self._next = (self._next + 1) % size
        self.steps_pushed += 1
        return out
