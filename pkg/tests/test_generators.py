"""Generator contracts: quantile transforms, recursions, noise geometry,
and full sample assembly. Hand-derived oracle values are computed inline.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremepls.errors import ConfigError, DataError
from extremepls.generators import (
    ArmaParams,
    BurrParams,
    EstarParams,
    GarchParams,
    GeneratorConfig,
    SampleSet,
    assemble_sample,
    beta_sine,
    burr_sample,
    classic_burr_sample,
    gen_arma,
    gen_estar,
    gen_garch,
    gen_toeplitz_gaussian,
    toeplitz_correlation,
)


def iid_config(**overrides):
    base = dict(
        setup="IidIid",
        burr=BurrParams(0.4),
        kappa=0.5,
        n=200,
        p=5,
        seed=12345,
        resp_params=None,
        noise_params=None,
        rho_c=0.5,
    )
    base.update(overrides)
    return GeneratorConfig(**base)


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

class TestParams:
    def test_burr_requires_positive_gamma(self):
        with pytest.raises(ConfigError):
            BurrParams(gamma=0.0)
        with pytest.raises(ConfigError):
            BurrParams(gamma=-0.3)

    def test_burr_requires_negative_rho(self):
        with pytest.raises(ConfigError):
            BurrParams(gamma=0.5, rho=0.0)
        BurrParams(gamma=0.5, rho=-2.0)  # fine

    def test_arma_requires_stationary_phi(self):
        with pytest.raises(ConfigError):
            ArmaParams(phi=1.0, theta=0.0)
        ArmaParams(phi=0.99, theta=-0.98)  # boundary inside

    def test_garch_validation(self):
        with pytest.raises(ConfigError):
            GarchParams(omega=0.0, alpha=0.1, beta=0.1)
        with pytest.raises(ConfigError):
            GarchParams(omega=1.0, alpha=-0.1, beta=0.1)
        with pytest.raises(ConfigError):
            GarchParams(omega=1.0, alpha=0.6, beta=0.5)

    def test_garch_warns_when_nearly_integrated(self):
        with pytest.warns(RuntimeWarning):
            GarchParams(omega=0.05, alpha=0.05, beta=0.94)

    def test_config_rejects_mismatched_params(self):
        with pytest.raises(ConfigError):
            iid_config(resp_params=ArmaParams(0.5, 0.0))
        with pytest.raises(ConfigError):
            iid_config(setup="ArmaRespGarchNoise")  # needs ArmaParams/GarchParams

    def test_config_rejects_bad_scalars(self):
        with pytest.raises(ConfigError):
            iid_config(kappa=0.0)
        with pytest.raises(ConfigError):
            iid_config(rho_c=1.0)
        with pytest.raises(ConfigError):
            iid_config(setup="Bogus")


# ---------------------------------------------------------------------------
# Burr quantile transforms
# ---------------------------------------------------------------------------

class TestBurrSample:
    def test_gamma_one_median(self):
        # (1/u - 1)^gamma at gamma=1, u=0.5
        assert burr_sample(BurrParams(1.0), 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_sqrt3_oracle(self):
        # survival (1 + y^2)^(-1) = 0.25  =>  y = sqrt(3)
        assert burr_sample(BurrParams(0.5), 0.25) == pytest.approx(np.sqrt(3.0), abs=1e-12)

    def test_left_endpoint(self):
        # u -> 1 maps toward 0: y = ((1-u)/u)^gamma ~ 1e-12^0.1 ~ 0.063
        assert burr_sample(BurrParams(0.1), 1.0 - 1e-12) == pytest.approx(
            1e-12**0.1, rel=1e-3
        )

    def test_domain_errors(self):
        for bad in (0.0, -0.5, 1.0 + 1e-9, np.nan):
            with pytest.raises(DataError):
                burr_sample(BurrParams(0.5), bad)

    def test_survival_inversion_general_rho(self):
        # S(y) = (1 + y^(-rho/gamma))^(1/rho) evaluated at the sampled y
        params = BurrParams(gamma=0.3, rho=-2.0)
        u = np.array([0.05, 0.2, 0.5, 0.9])
        y = burr_sample(params, u)
        surv = (1.0 + y ** (-params.rho / params.gamma)) ** (1.0 / params.rho)
        np.testing.assert_allclose(surv, u, rtol=1e-12)

    @given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
    @settings(max_examples=50, deadline=None)
    def test_monotone_decreasing_in_u(self, u1, u2):
        lo, hi = sorted((u1, u2))
        params = BurrParams(0.4)
        assert burr_sample(params, lo) >= burr_sample(params, hi)


class TestClassicBurrSample:
    def test_hand_quantiles(self):
        # survival (1 + y)^(-1/gamma); u = S(y)  =>  y = u^(-gamma) - 1
        assert classic_burr_sample(BurrParams(0.5), 0.25) == pytest.approx(1.0, abs=1e-14)
        assert classic_burr_sample(BurrParams(1.0), 0.5) == pytest.approx(1.0, abs=1e-14)
        assert classic_burr_sample(BurrParams(0.4), 0.01) == pytest.approx(
            10.0**0.8 - 1.0, rel=1e-12
        )

    def test_survival_inversion_general_rho(self):
        params = BurrParams(gamma=0.3, rho=-2.5)
        u = np.array([0.03, 0.4, 0.77])
        y = classic_burr_sample(params, u)
        surv = (1.0 + y ** (-params.rho)) ** (-1.0 / params.gamma)
        np.testing.assert_allclose(surv, u, rtol=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DataError):
            classic_burr_sample(BurrParams(0.5), 0.0)
        with pytest.raises(DataError):
            classic_burr_sample(BurrParams(0.5), 1.1)

    def test_marginal_survival_mc(self):
        # empirical survival at y in {1, 2, 5} within 3 binomial standard
        # errors of (1 + y)^(-1/gamma) over 1e5 draws
        params = BurrParams(0.4)
        rng = np.random.default_rng(7)
        y = classic_burr_sample(params, 1.0 - rng.random(10**5))
        for level in (1.0, 2.0, 5.0):
            theo = (1.0 + level) ** (-1.0 / params.gamma)
            se = np.sqrt(theo * (1.0 - theo) / y.size)
            assert abs((y > level).mean() - theo) <= 3.0 * se

    def test_same_tail_index_both_conventions(self):
        # both laws have survival ~ y^(-1/gamma); compare log-survival slopes
        params = BurrParams(0.4)
        y_far = np.array([50.0, 500.0])
        for sampler_surv in (
            lambda y: (1.0 + y ** (-params.rho / params.gamma)) ** (1.0 / params.rho),
            lambda y: (1.0 + y ** (-params.rho)) ** (-1.0 / params.gamma),
        ):
            s = sampler_surv(y_far)
            slope = (np.log(s[1]) - np.log(s[0])) / (np.log(y_far[1]) - np.log(y_far[0]))
            assert slope == pytest.approx(-1.0 / params.gamma, rel=0.02)


# ---------------------------------------------------------------------------
# recursions
# ---------------------------------------------------------------------------

class TestGenArma:
    def test_degenerate_is_identity(self):
        eta = np.array([0.3, -1.2, 2.0, 0.1])
        np.testing.assert_array_equal(gen_arma(4, ArmaParams(0.0, 0.0), eta), eta)

    def test_impulse_response(self):
        # unroll Y_i = 0.8 Y_{i-1} - 0.3 eta_{i-1} + eta_i from (1, 0, 0, ...)
        eta = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        got = gen_arma(5, ArmaParams(0.8, -0.3), eta)
        want = np.array([1.0, 0.5, 0.4, 0.32, 0.256])
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_pathological_fixed_point(self):
        # y = 0.99 y - 0.98 + 1  =>  y = 2.0
        y = gen_arma(50, ArmaParams(0.99, -0.98), np.ones(2000))
        np.testing.assert_allclose(y, 2.0, atol=1e-6)

    def test_burn_in_discard(self):
        eta = np.arange(1.0, 11.0)
        full = gen_arma(10, ArmaParams(0.5, 0.2), eta)
        trimmed = gen_arma(6, ArmaParams(0.5, 0.2), eta)
        np.testing.assert_array_equal(trimmed, full[4:])

    def test_too_few_innovations(self):
        with pytest.raises(ConfigError):
            gen_arma(5, ArmaParams(0.5, 0.0), np.ones(3))

    def test_matrix_innovations_columnwise(self):
        eta = np.random.default_rng(0).standard_normal((20, 3))
        got = gen_arma(20, ArmaParams(0.6, -0.1), eta)
        for j in range(3):
            np.testing.assert_allclose(got[:, j], gen_arma(20, ArmaParams(0.6, -0.1), eta[:, j]))


class TestGenGarch:
    def test_constant_unit_variance(self):
        eta = np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(gen_garch(3, GarchParams(1.0, 0.0, 0.0), eta), eta)

    def test_transient_hand_chain(self):
        # omega=1, alpha=beta=0.5, eta=(1,1,1): sigma2_0 = omega = 1 since
        # alpha + beta = 1, then sigma2 = (1, 2, 3) by hand
        with pytest.warns(RuntimeWarning):
            params = GarchParams(1.0, 0.5, 0.5)
        got = gen_garch(3, params, np.ones(3))
        np.testing.assert_allclose(got, np.sqrt([1.0, 2.0, 3.0]), rtol=1e-12)

    def test_stationary_start_no_feedback(self):
        # alpha=0: sigma2 stays at omega/(1-beta) = 1/3 exactly
        eta = np.ones(4)
        got = gen_garch(4, GarchParams(0.05, 0.0, 0.85), eta)
        np.testing.assert_allclose(got, np.sqrt(0.05 / 0.15), rtol=1e-12)

    def test_decay_recursion_hand_values(self):
        # the (0.05, 0.1, 0.85) recursion from sigma2_0 = 1 with zeroed
        # feedback: sigma2 = 1, 0.9, 0.815, 0.74275; observe via eta = 1
        # on the step of interest and alpha * eps^2 removed by eta = 0 before
        params = GarchParams(0.05, 0.1, 0.85)
        for steps, sigma2_want in ((1, 0.9), (2, 0.815), (3, 0.74275)):
            eta = np.zeros(steps + 1)
            eta[-1] = 1.0
            got = gen_garch(steps + 1, params, eta)
            assert got[-1] == pytest.approx(np.sqrt(sigma2_want), rel=1e-12)

    def test_long_run_variance(self):
        # sample variance of eps ~ omega/(1-alpha-beta) = 0.05/0.05 = 1
        rng = np.random.default_rng(11)
        eps = gen_garch(10**6, GarchParams(0.05, 0.1, 0.85), rng.standard_normal(10**6))
        assert eps.var() == pytest.approx(1.0, rel=0.05)


class TestGenEstar:
    def test_first_step_passthrough(self):
        got = gen_estar(2, EstarParams(0.2, 0.95), np.array([2.0, 0.0]))
        assert got[0] == pytest.approx(2.0)

    def test_one_step_hand_value(self):
        # Y2 = 0.2*2 + 0.95*2*(1 - exp(-4))
        got = gen_estar(2, EstarParams(0.2, 0.95), np.array([2.0, 0.0]))
        want = 0.2 * 2.0 + 0.95 * 2.0 * (1.0 - np.exp(-4.0))
        assert got[1] == pytest.approx(want, rel=1e-12)
        assert got[1] == pytest.approx(2.2652, abs=5e-5)

    def test_large_state_effective_ar(self):
        # at |Y| >= 10 the AR coefficient is phi_low + phi_high within 1e-6
        params = EstarParams(0.2, 0.95)
        got = gen_estar(2, params, np.array([10.0, 0.0]))
        assert got[1] == pytest.approx((params.phi_low + params.phi_high) * 10.0, abs=1e-5)


# ---------------------------------------------------------------------------
# noise geometry and the true direction
# ---------------------------------------------------------------------------

class TestToeplitzGaussian:
    def test_independent_columns_at_zero(self):
        rng = np.random.default_rng(5)
        z = gen_toeplitz_gaussian(10**5, 4, 0.0, rng)
        corr = np.corrcoef(z, rowvar=False)
        off = corr[~np.eye(4, dtype=bool)]
        assert np.abs(off).max() < 0.02

    def test_toeplitz_target_correlation(self):
        target = np.array([[1.0, 0.8, 0.64], [0.8, 1.0, 0.8], [0.64, 0.8, 1.0]])
        np.testing.assert_allclose(toeplitz_correlation(3, 0.8), target, rtol=1e-15)
        rng = np.random.default_rng(6)
        z = gen_toeplitz_gaussian(10**5, 3, 0.8, rng)
        np.testing.assert_allclose(np.corrcoef(z, rowvar=False), target, atol=0.01)

    def test_single_column_unit_variance(self):
        rng = np.random.default_rng(8)
        z = gen_toeplitz_gaussian(10**5, 1, 0.0, rng)
        assert z.var() == pytest.approx(1.0, abs=0.01)

    def test_rho_out_of_range(self):
        with pytest.raises(ConfigError):
            gen_toeplitz_gaussian(10, 2, 1.0, np.random.default_rng(0))


class TestBetaSine:
    def test_p4_quarter_turns(self):
        np.testing.assert_allclose(
            beta_sine(4), [np.sqrt(2.0), 0.0, -np.sqrt(2.0), 0.0], atol=1e-15
        )

    def test_p101_norm_and_last_zero(self):
        b = beta_sine(101)
        assert abs(b[-1]) < 1e-12
        assert np.count_nonzero(np.abs(b) > 1e-12) == 100
        assert b @ b == pytest.approx(101.0, rel=1e-12)

    def test_even_p_antisymmetry(self):
        b = beta_sine(10)
        np.testing.assert_allclose(b[:5], -b[5:], atol=1e-12)


# ---------------------------------------------------------------------------
# full assembly
# ---------------------------------------------------------------------------

class TestAssembleSample:
    def test_exact_reconstruction(self):
        s = assemble_sample(iid_config())
        recon = s.g_values[:, None] * s.beta[None, :] + (s.g_values[:, None] / 10.0) * s.eps
        assert np.array_equal(recon, s.x)

    def test_reconstruction_all_setups(self):
        configs = [
            iid_config(),
            iid_config(
                setup="ArmaRespGarchNoise",
                resp_params=ArmaParams(0.8, -0.3),
                noise_params=GarchParams(0.05, 0.1, 0.85),
            ),
            iid_config(
                setup="GarchRespArmaNoise",
                resp_params=GarchParams(0.05, 0.1, 0.85),
                noise_params=ArmaParams(0.8, -0.3),
            ),
            iid_config(
                setup="EstarRespGarchNoise",
                resp_params=EstarParams(0.2, 0.95),
                noise_params=GarchParams(0.05, 0.1, 0.85),
            ),
        ]
        for config in configs:
            s = assemble_sample(config)
            assert s.y.shape == (config.n,)
            assert s.x.shape == (config.n, config.p)
            recon = s.g_values[:, None] * s.beta[None, :] + (s.g_values[:, None] / 10.0) * s.eps
            assert np.array_equal(recon, s.x)

    def test_deterministic_given_seed(self):
        a = assemble_sample(iid_config())
        b = assemble_sample(iid_config())
        assert np.array_equal(a.y, b.y) and np.array_equal(a.x, b.x)
        c = assemble_sample(iid_config(seed=999))
        assert not np.array_equal(a.y, c.y)

    def test_iid_response_is_classic_burr(self):
        # repeat the sampler's own stream derivation and margins
        config = iid_config(n=1000)
        s = assemble_sample(config)
        ss = np.random.SeedSequence(config.seed)
        resp_seq, _ = ss.spawn(2)
        rng = np.random.default_rng(resp_seq)
        eta = classic_burr_sample(config.burr, 1.0 - rng.random(config.n + config.burn_in))
        np.testing.assert_array_equal(s.y, eta[config.burn_in:])

    def test_g_is_abs_power(self):
        s = assemble_sample(iid_config())
        np.testing.assert_array_equal(s.g_values, np.abs(s.y) ** 0.5)

    def test_tail_moment_ratio_lemma_sanity(self):
        # i.i.d. heavy-tailed Y at gamma = 0.4: E[Y 1{Y>=y}]/(S(y) y) near
        # 1/(1-gamma) = 5/3 at the empirical 99% quantile (+-10%)
        rng = np.random.default_rng(42)
        y = classic_burr_sample(BurrParams(0.4), 1.0 - rng.random(10**6))
        q = np.quantile(y, 0.99)
        ratio = (y * (y >= q)).mean() / ((y >= q).mean() * q)
        assert ratio == pytest.approx(5.0 / 3.0, rel=0.10)

    def test_sample_set_shape_validation(self):
        with pytest.raises(DataError):
            SampleSet(y=np.ones(3), x=np.ones((4, 2)))
