import numpy as np
import pytest

from reference_impl import (
    ref_combos,
    ref_expansion,
    ref_oracle_label,
    ref_sinr_chain,
    ref_unclamped_rate,
)
from relaytas.channel import ChannelSample, SystemConfig, sample_batch_arrays
from relaytas.secrecy import (
    beta_sq,
    closed_form_check,
    combo_rates,
    enumerate_combos,
    gamma_d,
    gamma_r,
    oracle_select,
    oracle_select_batch,
    secrecy_rate,
)


def _cfg(p, n_s=6, n_t=1):
    return SystemConfig(n_s=n_s, n_t=n_t, p_s=p, p_d=p, p_r=p)


class TestSinrFormulas:
    def test_gamma_r_zero_signal(self):
        assert gamma_r(SystemConfig(6, 1, 0.0, 2.0, 1.0), 1.3, 0.4) == 0.0

    def test_gamma_r_unit_case(self):
        assert gamma_r(SystemConfig(6, 1, 1.0, 1.0, 1.0), 1.0, 0.0) == 1.0

    def test_gamma_r_hand_value(self):
        # (4/2)*3 / (2*0.5 + 1) = 3
        cfg = SystemConfig(n_s=6, n_t=2, p_s=4.0, p_d=2.0, p_r=1.0)
        assert gamma_r(cfg, 3.0, 0.5) == pytest.approx(3.0, rel=1e-15)

    def test_beta_sq_zero_relay_power(self):
        assert beta_sq(SystemConfig(6, 1, 1.0, 1.0, 0.0), 1.0, 1.0) == 0.0

    def test_beta_sq_unit_denominator(self):
        assert beta_sq(SystemConfig(6, 1, 0.0, 0.0, 2.0), 5.0, 9.0) == 2.0

    def test_beta_sq_hand_value(self):
        assert beta_sq(_cfg(1.0), 2.0, 1.0) == pytest.approx(0.25, rel=1e-15)

    def test_gamma_d_zero_cases(self):
        assert gamma_d(_cfg(1.0), 1.0, 0.0) == 0.0
        assert gamma_d(SystemConfig(6, 1, 0.0, 1.0, 1.0), 1.0, 1.0) == 0.0

    def test_gamma_d_hand_value(self):
        assert gamma_d(_cfg(1.0), 1.0, 1.0) == pytest.approx(0.25, rel=1e-15)

    def test_rejects_negative_and_nonfinite(self):
        cfg = _cfg(1.0)
        for fn in (gamma_r, beta_sq, gamma_d):
            with pytest.raises(ValueError):
                fn(cfg, -0.1, 1.0)
            with pytest.raises(ValueError):
                fn(cfg, 1.0, np.inf)

    def test_broadcasting_matches_scalars(self):
        cfg = _cfg(10.0)
        xs = np.array([0.3, 1.7, 2.2])
        g2 = np.array([0.9, 0.1, 1.4])
        vec = secrecy_rate(cfg, xs, g2).r_s
        for i in range(3):
            assert vec[i] == secrecy_rate(cfg, xs[i], g2[i]).r_s


class TestSecrecyRate:
    def test_no_signal_no_rate(self):
        out = secrecy_rate(SystemConfig(6, 1, 0.0, 1.0, 1.0), 1.0, 1.0)
        assert out.gamma_r == out.gamma_d == out.r_s == 0.0

    def test_clamp_when_destination_blind(self):
        out = secrecy_rate(_cfg(2.0), 1.5, 0.0)
        assert out.gamma_d == 0.0 and out.gamma_r > 0.0 and out.r_s == 0.0

    def test_frozen_reference_value(self):
        # independently computed by chaining the four formulas by hand
        out = secrecy_rate(_cfg(10.0), 1.7, 0.9)
        assert out.r_s == pytest.approx(0.959358015502654, rel=1e-12)
        _, _, _, ref = ref_sinr_chain(10.0, 10.0, 10.0, 1, 1.7, 0.9)
        assert out.r_s == pytest.approx(ref, rel=1e-12)

    def test_rate_never_negative(self):
        cfg = _cfg(31.6227766)
        rng = np.random.default_rng(5)
        x = rng.exponential(size=2000)
        g2 = rng.exponential(size=2000)
        assert np.all(secrecy_rate(cfg, x, g2).r_s >= 0.0)

    def test_clamp_iff_gamma_d_below_gamma_r(self):
        cfg = _cfg(31.6227766)
        rng = np.random.default_rng(6)
        x = rng.exponential(size=2000)
        g2 = rng.exponential(size=2000)
        out = secrecy_rate(cfg, x, g2)
        clamped = out.r_s == 0.0
        assert np.array_equal(clamped, out.gamma_d <= out.gamma_r)


class TestComboTable:
    def test_six_choose_one(self):
        table = enumerate_combos(6, 1)
        assert table.size == 6
        assert table.combos == tuple((i,) for i in range(1, 7))

    def test_six_choose_two_lexicographic(self):
        table = enumerate_combos(6, 2)
        assert table.size == 15
        assert table.combos[0] == (1, 2)
        assert table.combos[14] == (5, 6)
        # full independent enumeration
        assert list(table.combos) == ref_combos(6, 2)
        assert len(set(table.combos)) == 15

    def test_full_selection_single_combo(self):
        table = enumerate_combos(4, 4)
        assert table.size == 1 and table.combos == ((1, 2, 3, 4),)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            enumerate_combos(3, 4)
        with pytest.raises(ValueError):
            enumerate_combos(3, 0)

    def test_mask_matches_combos(self):
        table = enumerate_combos(5, 2)
        for row, combo in zip(table.mask, table.combos):
            assert set(np.flatnonzero(row) + 1) == set(combo)


class TestOracle:
    def test_single_candidate(self):
        cfg = SystemConfig(n_s=3, n_t=3, p_s=5.0, p_d=5.0, p_r=5.0)
        table = enumerate_combos(3, 3)
        s = ChannelSample(h=np.array([1 + 1j, 2.0, 0.5j]), g=0.7 + 0.1j)
        label, best = oracle_select(cfg, s, table)
        assert label == 1
        assert best == pytest.approx(
            ref_sinr_chain(5.0, 5.0, 5.0, 3, float(np.sum(np.abs(s.h) ** 2)),
                           abs(s.g) ** 2)[3],
            rel=1e-12,
        )

    def test_tie_breaks_to_smallest_label(self):
        cfg = _cfg(10.0)
        table = enumerate_combos(6, 1)
        # axis-aligned phases keep the magnitudes exactly equal
        s = ChannelSample(h=np.array([0.9, -0.9, 0.9j, -0.9j, 0.9, -0.9]), g=1.1)
        label, _ = oracle_select(cfg, s, table)
        assert label == 1

    def test_table_must_match_config(self):
        cfg = _cfg(10.0)
        with pytest.raises(ValueError):
            combo_rates(cfg, np.ones(6), 1.0, enumerate_combos(6, 2))

    def test_optimality_over_all_combos(self):
        cfg = _cfg(31.6227766, n_t=2)
        table = enumerate_combos(6, 2)
        h, g = sample_batch_arrays(cfg, 100, seed=4)
        for i in range(100):
            s = ChannelSample(h=h[i], g=g[i])
            label, best = oracle_select(cfg, s, table)
            rates = combo_rates(cfg, np.abs(s.h) ** 2, np.abs(s.g) ** 2, table)
            assert np.all(rates <= best)
            assert rates[label - 1] == best

    def test_matches_reference_labeler_both_configs(self):
        for n_t in (1, 2):
            cfg = _cfg(31.6227766, n_t=n_t)
            table = enumerate_combos(6, n_t)
            h, g = sample_batch_arrays(cfg, 1000, seed=13 + n_t)
            labels, _ = oracle_select_batch(cfg, np.abs(h) ** 2, np.abs(g) ** 2, table)
            for i in range(1000):
                ref, _ = ref_oracle_label(
                    cfg.p_s, cfg.p_d, cfg.p_r, n_t, np.abs(h[i]), abs(g[i])
                )
                assert labels[i] == ref

    def test_high_power_coupling_witness(self):
        # the best antenna is not always the strongest one
        cfg = _cfg(1000.0)
        table = enumerate_combos(6, 1)
        h, g = sample_batch_arrays(cfg, 2000, seed=21)
        labels, _ = oracle_select_batch(cfg, np.abs(h) ** 2, np.abs(g) ** 2, table)
        argmax_h = np.argmax(np.abs(h), axis=1) + 1
        assert np.any(labels != argmax_h)


class TestMonotonicity:
    def test_sinrs_increase_with_signal_strength(self):
        cfg = _cfg(31.6227766)
        xs = np.linspace(0.01, 8.0, 300)
        gr = gamma_r(cfg, xs, 0.8 * np.ones_like(xs))
        gd = gamma_d(cfg, xs, 0.8 * np.ones_like(xs))
        assert np.all(np.diff(gr) > 0)
        assert np.all(np.diff(gd) > 0)

    def test_rate_not_monotone_at_high_power(self):
        cfg = _cfg(1000.0)
        xs = np.linspace(0.01, 8.0, 300)
        rs = secrecy_rate(cfg, xs, np.ones_like(xs)).r_s
        diffs = np.diff(rs)
        assert np.any(diffs > 0) and np.any(diffs < 0)


class TestClosedFormIdentity:
    def test_pointwise_identity(self):
        cfg = _cfg(31.6227766)
        lhs, rhs = closed_form_check(cfg, 1.7, 0.9)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
        assert lhs == pytest.approx(
            ref_unclamped_rate(cfg.p_s, cfg.p_d, cfg.p_r, 1, 1.7, 0.9), rel=1e-12
        )
        assert rhs == pytest.approx(
            ref_expansion(cfg.p_s, cfg.p_d, cfg.p_r, 1, 1.7, 0.9), rel=1e-12
        )

    def test_zero_signal_both_zero(self):
        cfg = SystemConfig(6, 1, 0.0, 3.0, 2.0)
        lhs, rhs = closed_form_check(cfg, 1.0, 1.0)
        assert lhs == 0.0 and rhs == 0.0

    def test_monte_carlo_sweep(self):
        cfg = _cfg(31.6227766, n_t=2)
        rng = np.random.default_rng(3)
        x = rng.exponential(size=10000) * 2
        g2 = rng.exponential(size=10000)
        lhs, rhs = closed_form_check(cfg, x, g2)
        rel = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))
        assert rel.max() <= 1e-9
