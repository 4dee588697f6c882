"""Small-scale fading draws and counter-based random streams.

Every random quantity is drawn from its own Philox stream keyed by
``(seed, purpose, trial, ...)``, so a trial's draws never depend on which
other trials ran before it or on which worker ran it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "ChannelRealization",
    "draw_channels",
    "complex_normal",
    "CHANNEL",
    "PILOT_NOISE",
    "SYMBOLS",
    "PLACEMENT",
    "VALIDATION",
]

# stream purposes (first spawn-key component)
CHANNEL = 0
PILOT_NOISE = 1
SYMBOLS = 2
PLACEMENT = 3
VALIDATION = 4


@dataclass(frozen=True)
class RngStream:
    """Named position in the random-number tree rooted at ``seed``.

    ``RngStream(seed).child(CHANNEL, trial, l, j)`` identifies one substream;
    identical (seed, key) pairs always yield identical draws.
    """

    seed: int
    key: tuple = ()

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, size, var=1.0):
    """i.i.d. CN(0, var): real and imaginary parts each with variance var/2."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of every BS-to-cell channel.

    ``H[l, j]`` is the (M, K) channel from BS l to the users of cell j; its
    column k is ``h_ljk``.
    """

    H: np.ndarray  # (L, L, M, K)

    @property
    def own(self) -> np.ndarray:
        """``H[j, j]`` stacked to shape (L, M, K)."""
        idx = np.arange(self.H.shape[0])
        return self.H[idx, idx]


def draw_channels(scenario, rng: RngStream) -> ChannelRealization:
    """Draw ``H_lj = G_lj D_lj^{1/2}`` with i.i.d. CN(0, 1) small-scale fading.

    Each (l, j) block comes from substream ``rng.child(l, j)``.
    """
    L, K = scenario.L, scenario.K
    M = int(scenario.M)
    if M != scenario.M:
        raise ValueError(f"channel draws need an integer antenna count, got M={scenario.M}")
    sqrt_beta = np.sqrt(scenario.beta)
    H = np.empty((L, L, M, K), dtype=complex)
    for l in range(L):
        for j in range(L):
            G = complex_normal(rng.child(l, j).generator(), (M, K))
            H[l, j] = G * sqrt_beta[l, j][None, :]
    return ChannelRealization(H)
