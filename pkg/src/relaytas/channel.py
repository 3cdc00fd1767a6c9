"""Rayleigh-fading channel generation for the two-hop untrusted-relay link.

Every complex gain is circularly-symmetric complex Gaussian with unit
average power (real and imaginary parts each N(0, 1/2)).  The noise PSD is
fixed at 1, so the per-node SNR is carried entirely by the transmit powers
in :class:`SystemConfig`.

Reproducibility: sample index ``i`` of a batch draws from its own Philox
counter-based stream keyed by ``SeedSequence(entropy=seed, spawn_key=(i,))``.
Substreams depend only on (seed, index), never on batching or worker
layout, so a (cfg, count, seed) triple pins the output bits exactly.
"""

from dataclasses import dataclass

import numpy as np


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts and linear transmit powers of the three nodes.

    n_s source antennas, of which n_t are activated per transmission.
    p_s, p_d, p_r are the source / destination (jammer) / relay powers in
    linear scale; with unit noise PSD they equal the per-node SNR.
    """

    n_s: int
    n_t: int
    p_s: float
    p_d: float
    p_r: float

    def __post_init__(self):
        if self.n_s < 1 or self.n_t < 1 or self.n_t > self.n_s:
            raise ValueError(
                f"need 1 <= n_t <= n_s, got n_t={self.n_t}, n_s={self.n_s}"
            )
        if min(self.p_s, self.p_d, self.p_r) < 0:
            raise ValueError("transmit powers must be nonnegative")

    @classmethod
    def equal_power(cls, n_s, n_t, snr_db):
        """Common operating point with all three nodes at the same power."""
        p = float(db_to_linear(snr_db))
        return cls(n_s=n_s, n_t=n_t, p_s=p, p_d=p, p_r=p)


@dataclass(frozen=True, eq=False)
class ChannelSample:
    """One fading realization: source-relay vector h and relay-destination
    scalar g (reciprocal, so the same g serves both hops)."""

    h: np.ndarray  # complex128, shape (n_s,)
    g: complex

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.complex128)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", complex(self.g))
        if not (np.all(np.isfinite(h.view(np.float64))) and np.isfinite(abs(self.g))):
            raise ValueError("channel gains must be finite")


def substream(seed, index):
    """Philox stream for batch position `index` under base `seed`."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def _draw_gains(rng, count):
    # one row per gain; real then imaginary column, scaled to unit power
    z = rng.standard_normal((count, 2))
    return (z[:, 0] + 1j * z[:, 1]) * np.sqrt(0.5)


def sample_channel(cfg, rng):
    """Draw one channel realization from `rng`, advancing its state."""
    gains = _draw_gains(rng, cfg.n_s + 1)
    return ChannelSample(h=gains[:-1], g=gains[-1])


def sample_batch(cfg, count, seed):
    """Deterministic batch of `count` samples via per-index substreams."""
    h, g = sample_batch_arrays(cfg, count, seed)
    return [ChannelSample(h=h[i], g=g[i]) for i in range(count)]


def sample_batch_arrays(cfg, count, seed):
    """Array form of :func:`sample_batch`: (count, n_s) h matrix and
    (count,) g vector, bit-identical to the per-sample path."""
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    h = np.empty((count, cfg.n_s), dtype=np.complex128)
    g = np.empty(count, dtype=np.complex128)
    for i in range(count):
        gains = _draw_gains(substream(seed, i), cfg.n_s + 1)
        h[i] = gains[:-1]
        g[i] = gains[-1]
    return h, g
