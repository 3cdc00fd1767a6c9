"""Closed-form link analysis for the jamming-aided untrusted-relay channel.

First hop: the source beamforms over the selected antenna subset while the
destination jams the relay, so the relay decodes at SINR `gamma_r`.  Second
hop: the relay amplifies by `beta_sq` and forwards; after self-interference
cancellation the destination sees SINR `gamma_d`.  The secrecy rate is the
clamped log-ratio of the two, and exhaustive search over antenna subsets
gives the optimal selection label.

All SINR functions broadcast over numpy arrays; scalars in, float out.
Denominators are always >= 1 (unit noise PSD), so no special-casing.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np


def _check_nonneg(**named):
    for name, value in named.items():
        a = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(a)):
            raise ValueError(f"{name} must be finite")
        if np.any(a < 0):
            raise ValueError(f"{name} must be nonnegative")


def _as_out(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True, eq=False)
class ComboTable:
    """All size-n_t subsets of antennas 1..n_s in lexicographic order.

    Labels are the 1-based positions in that order; `mask[l-1]` is the
    boolean membership row of label l, used for vectorized norm sums.
    """

    n_s: int
    n_t: int
    combos: tuple  # tuple of tuples of 1-based antenna indices
    mask: np.ndarray  # bool, shape (n_combos, n_s)

    @property
    def size(self):
        return len(self.combos)


def enumerate_combos(n_s, n_t):
    if n_s < 1 or n_t < 1 or n_t > n_s:
        raise ValueError(f"need 1 <= n_t <= n_s, got n_t={n_t}, n_s={n_s}")
    combos = tuple(combinations(range(1, n_s + 1), n_t))
    mask = np.zeros((len(combos), n_s), dtype=bool)
    for row, combo in enumerate(combos):
        for antenna in combo:
            mask[row, antenna - 1] = True
    return ComboTable(n_s=n_s, n_t=n_t, combos=combos, mask=mask)


def gamma_r(cfg, h_norm_sq, g_mag_sq):
    """Relay SINR: beamformed signal power over jamming-plus-noise."""
    _check_nonneg(h_norm_sq=h_norm_sq, g_mag_sq=g_mag_sq)
    h_norm_sq = np.asarray(h_norm_sq, dtype=float)
    g_mag_sq = np.asarray(g_mag_sq, dtype=float)
    return _as_out((cfg.p_s / cfg.n_t) * h_norm_sq / (cfg.p_d * g_mag_sq + 1.0))


def beta_sq(cfg, h_norm_sq, g_mag_sq):
    """Squared amplification factor normalizing the relay's total receive power."""
    _check_nonneg(h_norm_sq=h_norm_sq, g_mag_sq=g_mag_sq)
    h_norm_sq = np.asarray(h_norm_sq, dtype=float)
    g_mag_sq = np.asarray(g_mag_sq, dtype=float)
    denom = (cfg.p_s / cfg.n_t) * h_norm_sq + cfg.p_d * g_mag_sq + 1.0
    return _as_out(cfg.p_r / denom)


def gamma_d(cfg, h_norm_sq, g_mag_sq):
    """Destination SINR after self-interference cancellation."""
    _check_nonneg(h_norm_sq=h_norm_sq, g_mag_sq=g_mag_sq)
    h_norm_sq = np.asarray(h_norm_sq, dtype=float)
    g_mag_sq = np.asarray(g_mag_sq, dtype=float)
    b2 = (cfg.p_r / ((cfg.p_s / cfg.n_t) * h_norm_sq + cfg.p_d * g_mag_sq + 1.0))
    num = (cfg.p_s / cfg.n_t) * b2 * h_norm_sq * g_mag_sq
    return _as_out(num / (b2 * g_mag_sq + 1.0))


@dataclass(frozen=True, eq=False)
class SecrecyBreakdown:
    """SINRs, amplification, and clamped secrecy rate for one (or a batch of)
    channel state(s).  Fields are floats for scalar inputs, arrays otherwise."""

    gamma_r: object
    gamma_d: object
    beta_sq: object
    r_s: object


def secrecy_rate(cfg, h_norm_sq, g_mag_sq):
    """Achievable secrecy rate [log2(1+gamma_d) - log2(1+gamma_r)]^+ with
    the full SINR breakdown."""
    gr = gamma_r(cfg, h_norm_sq, g_mag_sq)
    gd = gamma_d(cfg, h_norm_sq, g_mag_sq)
    b2 = beta_sq(cfg, h_norm_sq, g_mag_sq)
    rs = np.maximum(0.0, np.log2(1.0 + np.asarray(gd)) - np.log2(1.0 + np.asarray(gr)))
    return SecrecyBreakdown(gamma_r=gr, gamma_d=gd, beta_sq=b2, r_s=_as_out(rs))


def combo_rates(cfg, h_mag_sq, g_mag_sq, table):
    """Clamped secrecy rate of every antenna combination.

    h_mag_sq: (..., n_s) per-antenna |h_i|^2; g_mag_sq: (...,) |g|^2.
    Returns (..., n_combos).
    """
    if table.n_s != cfg.n_s or table.n_t != cfg.n_t:
        raise ValueError(
            f"combo table ({table.n_s},{table.n_t}) does not match "
            f"config ({cfg.n_s},{cfg.n_t})"
        )
    h_mag_sq = np.asarray(h_mag_sq, dtype=float)
    g_mag_sq = np.asarray(g_mag_sq, dtype=float)
    h_norm_sq = h_mag_sq @ table.mask.T.astype(float)
    return secrecy_rate(cfg, h_norm_sq, g_mag_sq[..., None]).r_s


def oracle_select(cfg, sample, table):
    """Exhaustive-search antenna selection: label of the rate-maximizing
    combination (ties to the smallest label) and the achieved rate."""
    rates = combo_rates(cfg, np.abs(sample.h) ** 2, np.abs(sample.g) ** 2, table)
    label = int(np.argmax(rates)) + 1
    return label, float(rates[label - 1])


def oracle_select_batch(cfg, h_mag_sq, g_mag_sq, table):
    """Vectorized oracle over a batch: (labels, best_rates) arrays."""
    rates = combo_rates(cfg, h_mag_sq, g_mag_sq, table)
    labels = rates.argmax(axis=-1) + 1  # first maximum = smallest label
    return labels.astype(np.int64), rates.max(axis=-1)


def closed_form_check(cfg, h_norm_sq, g_mag_sq):
    """Diagnostic identity for the unclamped rate.

    lhs is log2(1+gamma_d) - log2(1+gamma_r) through the SINR chain; rhs is
    the direct algebraic expansion in terms of c = p_s/n_t, x = ||h||^2,
    D = p_d|g|^2, a = p_r|g|^2.  The two must agree to rounding.
    """
    _check_nonneg(h_norm_sq=h_norm_sq, g_mag_sq=g_mag_sq)
    x = np.asarray(h_norm_sq, dtype=float)
    g2 = np.asarray(g_mag_sq, dtype=float)
    gr = np.asarray(gamma_r(cfg, x, g2))
    gd = np.asarray(gamma_d(cfg, x, g2))
    lhs = np.log2(1.0 + gd) - np.log2(1.0 + gr)

    c = cfg.p_s / cfg.n_t
    big_d = cfg.p_d * g2
    a = cfg.p_r * g2
    first = (big_d + 1.0) / (c * x + big_d + 1.0)
    second = (c * x * a + a + c * x + big_d + 1.0) / (a + c * x + big_d + 1.0)
    rhs = np.log2(first * second)
    return _as_out(lhs), _as_out(rhs)
