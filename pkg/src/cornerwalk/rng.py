"""Counter-based random number streams.

Every walker owns an addressable stream: draw ``k`` of walker ``i`` is a pure
function of ``(seed, i, k)``.  Campaigns are therefore bit-identical however
the walkers are batched or spread over worker processes, and partial results
merge by plain integer addition.

The generator is the splitmix64 finalizer applied to ``key + index * PHI``,
i.e. the ordinary splitmix64 output sequence positioned at ``index``, with a
per-walker key that is itself a mixed function of the campaign seed.  Draw
indices are striped over a small number of channels so that the angle draw
and the re-entry draw of the same step never collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_PHI = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF

# draw channels; a step consumes at most one draw per channel
CHANNEL_ANGLE = 0
CHANNEL_REENTRY = 1
CHANNEL_GENERAL = 2
_CHANNELS = 4


def mix64(z: np.ndarray) -> np.ndarray:
    """Splitmix64 finalizer on a uint64 array (wraps mod 2**64)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def _mix64_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def walker_keys(seed: int, indices: np.ndarray) -> np.ndarray:
    """Per-walker stream keys for a campaign seed and walker index array."""
    base = np.uint64(seed & _MASK)
    return mix64(base + indices.astype(np.uint64) * np.uint64(_PHI))


def uniform_batch(keys: np.ndarray, counters: np.ndarray, channel: int) -> np.ndarray:
    """One uniform draw in [0, 1) per walker at the given step counter/channel."""
    pos = counters.astype(np.uint64) * np.uint64(_CHANNELS) + np.uint64(channel)
    bits = mix64(keys + pos * np.uint64(_PHI))
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass
class RngStream:
    """Addressable uniform stream for a single walker (or any scalar consumer).

    ``draw(counter, channel)`` is pure; ``uniform()`` is a stateful
    convenience that walks the general channel.
    """

    seed: int
    stream_index: int = 0
    _auto: int = field(default=0, repr=False)

    def __post_init__(self):
        self._key = int(
            _mix64_int((self.seed & _MASK) + (self.stream_index & _MASK) * _PHI)
        )

    def draw(self, counter: int, channel: int = CHANNEL_GENERAL) -> float:
        pos = (counter * _CHANNELS + channel) & _MASK
        bits = _mix64_int(self._key + pos * _PHI)
        return (bits >> 11) * 2.0**-53

    def uniform(self) -> float:
        u = self.draw(self._auto, CHANNEL_GENERAL)
        self._auto += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        out = np.empty(n)
        for i in range(n):
            out[i] = self.uniform()
        return out
