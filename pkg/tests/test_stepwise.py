import itertools

import numpy as np
import pytest

from wiretap_tas import stepwise
from wiretap_tas.metrics import terms_for_selection, user_log_ratios
from wiretap_tas.model import (
    ChannelPair,
    DegenerateChannelError,
    InvalidSelectionError,
    generate_channels,
    mrt_precoder,
)
from wiretap_tas.stepwise import (
    CacheDriftError,
    alpha_factor,
    check_cache,
    eval_candidate,
    eval_candidates,
    extend_state,
    growth_terms,
    init_state,
)

S2M, S2E = 0.1, 0.1


def one_plus(terms, p):
    main = (1 + p / S2M * (terms.t_main + terms.u_main)) / (1 + p / S2M * terms.u_main)
    return main, 1 + p / S2E * terms.t_eve


def grown_state(ch, order, p=0.5):
    state = init_state(ch, order[0], p)
    for i in order[1:]:
        state = extend_state(state, i)
    return state


class TestInitState:
    def test_real_two_antennas(self):
        ch = ChannelPair(np.array([[1.0], [2.0]]), np.zeros((2, 1)))
        s = init_state(ch, 1, 1.0)
        np.testing.assert_allclose(s.h_eff, [[2.0]])
        assert s.beta == pytest.approx(0.5)
        np.testing.assert_allclose(s.precoder.w_matrix, [[1.0]])
        np.testing.assert_allclose(s.sinr_terms.t_main, [4.0])
        scratch = terms_for_selection(ch, (1,))
        np.testing.assert_allclose(s.sinr_terms.t_main, scratch.t_main)

    def test_no_leakage(self):
        ch = ChannelPair(np.array([[1.0]]), np.array([[0.0]]))
        s = init_state(ch, 0, 3.0)
        assert s.sinr_terms.t_eve[0] == 0.0

    @pytest.mark.parametrize("bad", [-1, 2])
    def test_invalid_index(self, bad):
        ch = ChannelPair(np.ones((2, 1)), np.ones((2, 1)))
        with pytest.raises(InvalidSelectionError):
            init_state(ch, bad, 1.0)

    def test_zero_row(self):
        ch = ChannelPair(np.array([[0.0], [1.0]]), np.ones((2, 1)))
        with pytest.raises(DegenerateChannelError):
            init_state(ch, 0, 1.0)


class TestAlpha:
    def test_zero_row(self):
        assert alpha_factor(0.7, np.zeros(3)) == 1.0

    def test_arithmetic(self):
        assert alpha_factor(1.0, np.array([1.0, 1.0, 1.0])) == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(10))
    def test_beta_ratio(self, seed):
        r = np.random.default_rng(seed)
        ch = generate_channels(7, 3, 2, r)
        s = grown_state(ch, [0, 3, 5])
        a = alpha_factor(s.beta, ch.h_main[6])
        fresh = mrt_precoder(ch.h_main[[0, 3, 5, 6]])
        assert a * s.beta == pytest.approx(fresh.beta, rel=1e-12)
        assert 0 < a < 1


class TestEvalCandidate:
    def test_dead_antenna(self, rng):
        h = rng.standard_normal((3, 2)) + 0j
        h[2] = 0
        g = rng.standard_normal((3, 2)) + 0j
        g[2] = 0
        s = init_state(ChannelPair(h, g), 0, 0.8)
        ev = eval_candidate(s, 2, 0.8, [0.5, 0.5], S2M, S2E)
        assert ev.alpha2 == 1.0
        np.testing.assert_allclose(ev.theta_main, 1.0, rtol=1e-14)
        np.testing.assert_allclose(ev.theta_eve, 1.0, rtol=1e-14)
        assert ev.growth == pytest.approx(0.0, abs=1e-14)

    def test_already_selected(self, rng):
        ch = generate_channels(4, 2, 1, rng)
        s = grown_state(ch, [0, 1])
        with pytest.raises(InvalidSelectionError):
            eval_candidate(s, 1, 0.5, [0.5, 0.5], S2M, S2E)
        with pytest.raises(InvalidSelectionError):
            extend_state(s, 0)

    @pytest.mark.parametrize("seed", range(30))
    def test_theta_identities_single_user(self, seed):
        r = np.random.default_rng(seed)
        ch = generate_channels(6, 1, 2, r)
        s = grown_state(ch, [2, 4])
        p = r.uniform(0.01, 1)
        m0, e0 = one_plus(s.sinr_terms, p)
        for cand in (0, 1, 3, 5):
            ev = eval_candidate(s, cand, p, [1.0], S2M, S2E)
            m1, e1 = one_plus(terms_for_selection(ch, (2, 4, cand)), p)
            np.testing.assert_allclose(ev.theta_main * m0, m1, rtol=1e-9)
            np.testing.assert_allclose(ev.theta_eve * e0, e1, rtol=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_argmax_matches_direct_gain(self, seed):
        r = np.random.default_rng(seed)
        ch = generate_channels(6, 3, 2, r)
        w = np.full(3, 1 / 3)
        p = 0.6
        for size in range(1, 5):
            s = grown_state(ch, list(range(size)), p)
            before = user_log_ratios(s.sinr_terms, p, S2M, S2E) @ w
            cands = list(range(size, 6))
            growth = [eval_candidate(s, c, p, w, S2M, S2E).growth for c in cands]
            direct = [user_log_ratios(terms_for_selection(ch, s.selection + (c,)), p, S2M, S2E) @ w
                      - before for c in cands]
            assert int(np.argmax(growth)) == int(np.argmax(direct))
            np.testing.assert_allclose(growth, direct, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_batched_matches_single(self, seed):
        r = np.random.default_rng(seed)
        ch = generate_channels(9, 3, 4, r)
        s = grown_state(ch, [8, 1, 4])
        cands = [0, 2, 3, 5, 6, 7]
        w = r.dirichlet(np.ones(3))
        a2, tm, te, gr = eval_candidates(s, cands, 0.3, w, S2M, S2E)
        for n, c in enumerate(cands):
            ev = eval_candidate(s, c, 0.3, w, S2M, S2E)
            assert ev.alpha2 == pytest.approx(a2[n], rel=1e-14)
            assert ev.growth == pytest.approx(gr[n], rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("seed", range(20))
    def test_closed_form_growth_terms(self, seed):
        # the epsilon/psi route reproduces theta independently of the batched path
        r = np.random.default_rng(seed)
        k = int(r.integers(1, 5))
        ch = generate_channels(8, k, int(r.integers(1, 4)), r)
        s = grown_state(ch, [int(i) for i in r.permutation(8)[:3]])
        p = r.uniform(0.01, 1)
        for cand in set(range(8)) - set(s.selection):
            ev = eval_candidate(s, cand, p, np.ones(k) / k, S2M, S2E)
            eps_m, psi_m, eps_e = growth_terms(s, cand, p, S2M, S2E)
            a2 = ev.alpha2
            np.testing.assert_allclose((a2 + eps_m) / (a2 + psi_m), ev.theta_main, rtol=1e-10)
            np.testing.assert_allclose(a2 + eps_e, ev.theta_eve, rtol=1e-10)

    def test_thetas_positive(self):
        r = np.random.default_rng(3)
        for _ in range(200):
            ch = generate_channels(8, 3, 2, r)
            s = grown_state(ch, [0, 1, 2])
            for c in range(3, 8):
                ev = eval_candidate(s, c, 0.5, np.ones(3) / 3, S2M, S2E)
                assert np.all(ev.theta_main > 0) and np.all(ev.theta_eve > 0)
                assert 0 < ev.alpha2 <= 1

    def test_theta_eve_lower_bound_can_fail(self):
        # leakage cancellation: g chosen so the appended row nulls B for the user
        h = np.array([[1.0], [1.0]], dtype=complex)
        s0 = init_state(ChannelPair(h, np.array([[1.0], [0.0]])), 0, 1.0)
        b = s0.cross_eve[0, 0]
        g_new = -b / (s0.beta * np.conj(h[1, 0]))
        ch = ChannelPair(h, np.array([[1.0], [g_new]]))
        s = init_state(ch, 0, 1.0)
        ev = eval_candidate(s, 1, 1.0, [1.0], S2M, S2E)
        assert ev.theta_eve[0] < ev.alpha2


class TestExtendState:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches_rebuild(self, seed):
        r = np.random.default_rng(seed)
        ch = generate_channels(10, 3, 2, r)
        order = [int(i) for i in r.permutation(10)]
        s = init_state(ch, order[0], 0.4)
        for i in order[1:]:
            s = extend_state(s, i, validate=False)
            fresh = mrt_precoder(ch.h_main[list(s.selection)])
            np.testing.assert_allclose(s.precoder.w_matrix, fresh.w_matrix, rtol=1e-9, atol=1e-15)
            assert abs(s.precoder.power - 1) <= 1e-12
            check_cache(s)

    def test_zero_row(self, rng):
        h = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        h[1] = 0
        ch = ChannelPair(h, rng.standard_normal((3, 1)))
        s0 = init_state(ch, 0, 1.0)
        s1 = extend_state(s0, 1)
        np.testing.assert_array_equal(s1.precoder.w_matrix[:1], s0.precoder.w_matrix)
        np.testing.assert_array_equal(s1.precoder.w_matrix[1], 0)

    @pytest.mark.parametrize("order", list(itertools.permutations(range(4)))[:8])
    def test_beta_order_invariant(self, order):
        h = np.arange(8, dtype=float).reshape(4, 2) + 1j
        ch = ChannelPair(h, np.ones((4, 1)))
        s = grown_state(ch, list(order))
        assert s.beta == pytest.approx(1 / np.linalg.norm(h), rel=1e-12)

    def test_long_run_with_refresh(self):
        r = np.random.default_rng(11)
        ch = generate_channels(64, 4, 8, r)
        s = init_state(ch, 0, 1.0)
        for i in range(1, 64):
            s = extend_state(s, i)
            assert s.steps_since_refresh < stepwise.REFRESH_INTERVAL
        check_cache(s)

    def test_drift_detected(self, rng):
        ch = generate_channels(5, 2, 1, rng)
        s = grown_state(ch, [0, 1])
        bad = type(s)(**{**s.__dict__, "cross_main": s.cross_main * 1.01})
        bad = type(s)(**{**bad.__dict__, "sinr_terms": type(s.sinr_terms)(
            s.sinr_terms.t_main * 1.01, s.sinr_terms.u_main, s.sinr_terms.t_eve)})
        with pytest.raises(CacheDriftError):
            check_cache(bad)

    def test_immutable(self, rng):
        ch = generate_channels(5, 2, 1, rng)
        s0 = init_state(ch, 0, 1.0)
        s1 = extend_state(s0, 3)
        assert s0.selection == (0,) and s1.selection == (0, 3)
        assert s0.h_eff.shape == (1, 2)


def test_additive_rate_update(rng):
    for _ in range(50):
        m = int(rng.integers(4, 12))
        k = int(rng.integers(1, 5))
        ch = generate_channels(m, k, int(rng.integers(1, 5)), rng)
        w = rng.dirichlet(np.ones(k))
        p = float(rng.uniform(0.01, 1))
        s = grown_state(ch, [0, 1], p)
        before = user_log_ratios(s.sinr_terms, p, S2M, S2E) @ w
        for c in range(2, m):
            ev = eval_candidate(s, c, p, w, S2M, S2E)
            after = user_log_ratios(terms_for_selection(ch, s.selection + (c,)), p, S2M, S2E) @ w
            assert before + ev.growth == pytest.approx(after, rel=1e-9, abs=1e-12)
