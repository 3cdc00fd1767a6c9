"""Independent reference implementations used as test oracles.

Everything here is deliberately written with the plain math module and
python loops, separate from the package's vectorized numpy paths.
"""

import math
from itertools import combinations


def ref_sinr_chain(p_s, p_d, p_r, n_t, h_norm_sq, g_mag_sq):
    """Relay SINR, squared amplification, destination SINR, clamped rate."""
    c = p_s / n_t
    gamma_r = c * h_norm_sq / (p_d * g_mag_sq + 1.0)
    b2 = p_r / (c * h_norm_sq + p_d * g_mag_sq + 1.0)
    gamma_d = c * b2 * h_norm_sq * g_mag_sq / (b2 * g_mag_sq + 1.0)
    rate = max(0.0, math.log2(1.0 + gamma_d) - math.log2(1.0 + gamma_r))
    return gamma_r, b2, gamma_d, rate


def ref_unclamped_rate(p_s, p_d, p_r, n_t, h_norm_sq, g_mag_sq):
    gamma_r, _, gamma_d, _ = ref_sinr_chain(p_s, p_d, p_r, n_t, h_norm_sq, g_mag_sq)
    return math.log2(1.0 + gamma_d) - math.log2(1.0 + gamma_r)


def ref_expansion(p_s, p_d, p_r, n_t, h_norm_sq, g_mag_sq):
    """Algebraic expansion of the unclamped rate (corrected first factor)."""
    c = p_s / n_t
    x = h_norm_sq
    dd = p_d * g_mag_sq
    a = p_r * g_mag_sq
    first = (dd + 1.0) / (c * x + dd + 1.0)
    second = (c * x * a + a + c * x + dd + 1.0) / (a + c * x + dd + 1.0)
    return math.log2(first * second)


def ref_combos(n_s, n_t):
    """Lexicographic list of 1-based antenna subsets."""
    return list(combinations(range(1, n_s + 1), n_t))


def ref_oracle_label(p_s, p_d, p_r, n_t, h_mags, g_mag):
    """Exhaustive-search label with strict-> comparison, so the first
    (smallest) label wins ties."""
    n_s = len(h_mags)
    g2 = g_mag * g_mag
    best_label = None
    best_rate = -1.0
    for pos, combo in enumerate(ref_combos(n_s, n_t), start=1):
        x = sum(h_mags[a - 1] ** 2 for a in combo)
        rate = ref_sinr_chain(p_s, p_d, p_r, n_t, x, g2)[3]
        if rate > best_rate:
            best_rate = rate
            best_label = pos
    return best_label, best_rate
