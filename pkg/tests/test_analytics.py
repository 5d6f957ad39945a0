import math

import numpy as np
import pytest
from scipy import integrate

from loblab import (
    DEFAULT_QUADRATURE,
    ModelParams,
    QuadratureConfig,
    bessel_i,
    conditional_fpt_density_D,
    conditional_fpt_density_E,
    derive_constants,
    exit_probs,
    h_l,
    identity_7_62,
    kernel_K,
    kernel_p0,
    metzler_density,
    p_vstar_density,
    p_vstar_total,
    p_ystar_density,
    p_ystar_total,
    quadrant_params,
    renewal_cf,
    renewal_down_prob,
    renewal_intensities,
)
from loblab.analytics import FLAG_SERIES_CAP, FLAG_TAIL, _cf_table


@pytest.fixture(scope="module")
def constants():
    return derive_constants(ModelParams())


@pytest.fixture(scope="module")
def q_default(constants):
    return quadrant_params(constants.kappa_L, constants.kappa_R, constants)


class TestQuadratureConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.abs_tol == 1e-10
        assert cfg.rel_tol == 1e-8
        assert cfg.series_terms_max == 200
        assert cfg.tail_cut == (1e-4, 1e3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"abs_tol": 0.0},
            {"rel_tol": -1e-8},
            {"series_terms_max": 0},
            {"tail_cut": (0.0, 1e3)},
            {"tail_cut": (1.0, 0.5)},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureConfig(**kwargs)


class TestBesselI:
    def test_at_zero(self):
        assert bessel_i(0.0, 0.0) == 1.0
        assert bessel_i(0.5, 0.0) == 0.0
        assert bessel_i(7.0, 0.0) == 0.0

    @pytest.mark.parametrize("z", [0.5, 1.0, 5.0])
    def test_half_order_closed_form(self, z):
        # I_{1/2}(z) = sqrt(2/(pi z)) sinh(z)
        closed = math.sqrt(2.0 / (math.pi * z)) * math.sinh(z)
        assert bessel_i(0.5, z) == pytest.approx(closed, rel=1e-10)

    def test_thirty_term_partial_sum(self):
        # at z = 1 the 30-term ascending series is converged far beyond
        # double precision, so it is an exact oracle
        acc = 0.0
        for k in range(29, -1, -1):
            acc += 0.25**k / (math.factorial(k) ** 2)
        assert bessel_i(0.0, 1.0) == pytest.approx(acc, rel=1e-12)

    @pytest.mark.parametrize(
        "nu, z, ref",
        [
            # fixed-precision references computed at 50 significant digits
            (1.6, 2.5, 1.746557836059550647762948),
            (7.0, 0.25, 9.479549397593002254963543e-11),
            (0.0, 30.0, 781672297823.9774897173898),
            (2.5, 120.0, 4.631852009201816428324068e50),
            (15.0, 40.0, 892647993920712.7536064324),
        ],
    )
    def test_reference_values(self, nu, z, ref):
        assert bessel_i(nu, z) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize(
        "nu, z, ref",
        [
            # log-scale references, covering the large-argument branch and
            # the order-comparable-to-argument corner
            (30.0, 300.0, 294.7283373198206613),
            (3.0, 400.0, 396.07437803727885332),
            (0.0, 800.0, 795.73891195074501878),
        ],
    )
    def test_log_mode(self, nu, z, ref):
        assert bessel_i(nu, z, log=True) == pytest.approx(ref, rel=1e-12)

    def test_overflow_raises_without_log(self):
        with pytest.raises(OverflowError):
            bessel_i(0.0, 800.0)

    @pytest.mark.parametrize("nu", [0.0, 0.5, 2.0, 7.3])
    def test_monotone_in_argument(self, nu):
        # grid straddles the series/asymptotic switch
        grid = np.geomspace(0.01, 500.0, 60)
        vals = [bessel_i(nu, float(z), log=True) for z in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("nu, z", [(-1.0, 2.0), (math.inf, 1.0), (1.0, -0.5)])
    def test_rejects_bad_domain(self, nu, z):
        with pytest.raises(ValueError):
            bessel_i(nu, z)


class TestQuadrantParams:
    def test_default_geometry(self, q_default):
        # alpha = atan2(sqrt(33)/7, 4/7); the default start point sits on
        # the wedge bisector with squared radius exactly 3/4
        assert q_default.alpha == pytest.approx(0.9625507478846870011, rel=1e-15)
        assert q_default.theta0 == pytest.approx(0.5 * q_default.alpha, rel=1e-14)
        assert q_default.r0 == pytest.approx(math.sqrt(0.75), rel=1e-14)

    def test_explicit_coefficients_override(self):
        q = quadrant_params(0.6, -0.9, sigma_plus=2.0, sigma_minus=1.5, rho=0.0)
        assert q.alpha == pytest.approx(math.pi / 2.0, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"v1": -1.0, "x1": -0.75},
            {"v1": 0.0, "x1": -0.75},
            {"v1": 0.75, "x1": 0.5},
            {"v1": 0.75, "x1": 0.0},
            {"v1": math.nan, "x1": -0.75},
        ],
    )
    def test_rejects_bad_start(self, constants, kwargs):
        with pytest.raises(ValueError):
            quadrant_params(constants=constants, **kwargs)

    def test_rejects_bad_coefficients(self):
        with pytest.raises(ValueError):
            quadrant_params(1.0, -1.0, sigma_plus=0.0, sigma_minus=1.0, rho=0.0)
        with pytest.raises(ValueError):
            quadrant_params(1.0, -1.0, sigma_plus=1.0, sigma_minus=1.0, rho=-1.0)
        with pytest.raises(ValueError):
            quadrant_params(1.0, -1.0)

    def test_wedge_interior_invariant(self):
        # any start strictly inside the quadrant must land strictly inside
        # the wedge, for arbitrary admissible diffusion coefficients
        rng = np.random.default_rng(20260821)
        for _ in range(1000):
            v1 = math.exp(rng.uniform(-3.0, 3.0))
            x1 = -math.exp(rng.uniform(-3.0, 3.0))
            sp = math.exp(rng.uniform(-1.5, 1.5))
            sm = math.exp(rng.uniform(-1.5, 1.5))
            rho = rng.uniform(-0.95, 0.95)
            q = quadrant_params(v1, x1, sigma_plus=sp, sigma_minus=sm, rho=rho)
            assert 0.0 < q.theta0 < q.alpha
            p_d, p_e = exit_probs(q)
            assert 0.0 < p_d < 1.0
            assert abs(p_d + p_e - 1.0) <= 1e-15


class TestExitProbs:
    def test_default_is_even_split(self, q_default):
        p_d, p_e = exit_probs(q_default)
        assert p_d == pytest.approx(0.5, abs=1e-15)
        assert p_e == pytest.approx(0.5, abs=1e-15)

    def test_uncorrelated_closed_form(self):
        # for rho = 0 the exit split reduces to (2/pi) arctan of the
        # scaled coordinate ratio
        q = quadrant_params(0.6, -0.9, sigma_plus=2.0, sigma_minus=1.5, rho=0.0)
        assert exit_probs(q)[0] == pytest.approx(0.7048327646991335, rel=1e-14)

    def test_far_start_never_exits_v_first(self, constants):
        q = quadrant_params(1e12, -0.75, constants)
        assert exit_probs(q)[0] < 1e-11


class TestMetzlerDensity:
    @pytest.mark.parametrize(
        "s, t, ref",
        [
            # fixed-precision references computed at 50 significant digits
            (0.3, 0.7, 0.1894935685504857959822),
            (0.7, 0.3, 0.1894935685504857959822),
            (0.05, 0.9, 0.6919603079818329971028),
            (1.5, 2.0, 0.001828923543863795800005),
        ],
    )
    def test_reference_values(self, q_default, s, t, ref):
        assert metzler_density(s, t, q_default) == pytest.approx(ref, rel=1e-9)

    def test_branch_symmetry_on_bisector(self, q_default):
        # the default start lies on the wedge bisector, so the joint law is
        # exchangeable
        a = metzler_density(0.42, 1.13, q_default)
        b = metzler_density(1.13, 0.42, q_default)
        assert a == pytest.approx(b, rel=1e-12)

    def test_nonnegative_on_grid(self, q_default):
        grid = np.linspace(0.02, 3.0, 50)
        for s in grid:
            for t in grid:
                if s != t:
                    assert metzler_density(float(s), float(t), q_default) >= 0.0

    def test_term_cap_flags_partial_value(self, q_default):
        flags = []
        val = metzler_density(0.3, 0.7, q_default,
                              config=QuadratureConfig(series_terms_max=2),
                              flags=flags)
        assert FLAG_SERIES_CAP in flags
        assert math.isfinite(val)

    @pytest.mark.parametrize("s, t", [(0.5, 0.5), (0.0, 1.0), (-0.2, 0.5), (0.5, 0.0)])
    def test_rejects_bad_domain(self, q_default, s, t):
        with pytest.raises(ValueError):
            metzler_density(s, t, q_default)


def _branch_mass(dens, q):
    """Integral over (0, inf) of a conditional passage-time density."""
    body, _ = integrate.quad(lambda s: dens(s, q), 1e-8, 40.0,
                             points=[0.05, 0.3, 1.0, 5.0], limit=200)
    tail, _ = integrate.quad(lambda u: 2.0 * dens(u ** -2, q) * u ** -3,
                             1e-8, 40.0 ** -0.5, limit=100)
    return body + tail


class TestConditionalDensities:
    def test_normalizations_and_mass_identities(self, q_default):
        p_d, p_e = exit_probs(q_default)
        norm_d = _branch_mass(conditional_fpt_density_D, q_default)
        norm_e = _branch_mass(conditional_fpt_density_E, q_default)
        assert abs(norm_d - 1.0) <= 1e-3
        assert abs(norm_e - 1.0) <= 1e-3
        # joint-density mass on each side of the diagonal, and in total
        assert abs(p_d * norm_d - p_d) <= 2e-3
        assert abs(p_e * norm_e - p_e) <= 2e-3
        assert abs(p_d * norm_d + p_e * norm_e - 1.0) <= 2e-3

    def test_pointwise_values_nonnegative(self, q_default):
        for s in (0.05, 0.3, 1.0, 4.0):
            assert conditional_fpt_density_D(s, q_default) >= 0.0
            assert conditional_fpt_density_E(s, q_default) >= 0.0

    def test_rejects_nonpositive_times(self, q_default):
        with pytest.raises(ValueError):
            conditional_fpt_density_D(0.0, q_default)
        with pytest.raises(ValueError):
            conditional_fpt_density_E(-1.0, q_default)


class TestExcursionKernels:
    def test_interior_normalization(self):
        val, _ = integrate.quad(lambda b: h_l(1.0, 0.2, 0.5, 0.7, b), 0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_entrance_normalization(self):
        val, _ = integrate.quad(lambda b: h_l(1.0, 0.0, 0.0, 0.3, b), 0.0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_absorbed_semigroup(self):
        s, t, x, z = 0.3, 0.4, 1.0, 0.5
        val, _ = integrate.quad(lambda y: kernel_p0(s, x, y) * kernel_p0(t, y, z),
                                0.0, np.inf)
        assert val == pytest.approx(kernel_p0(s + t, x, z), abs=1e-8)

    def test_first_passage_kernel_values(self):
        assert kernel_K(1.0, 0.0) == 0.0
        assert kernel_K(2.0, 1.5) == pytest.approx(
            math.sqrt(2.0 / (math.pi * 8.0)) * 1.5 * math.exp(-1.5 ** 2 / 4.0),
            rel=1e-15)

    def test_rejects_domain_violations(self):
        with pytest.raises(ValueError):
            kernel_K(0.0, 1.0)
        with pytest.raises(ValueError):
            kernel_p0(-1.0, 0.5, 0.5)
        with pytest.raises(ValueError):
            kernel_p0(1.0, -0.5, 0.5)
        with pytest.raises(ValueError):
            h_l(1.0, 0.5, 0.3, 0.5, 0.2)   # s == t
        with pytest.raises(ValueError):
            h_l(1.0, 0.6, 0.3, 0.5, 0.2)   # s > t
        with pytest.raises(ValueError):
            h_l(1.0, 0.2, 0.3, 1.0, 0.2)   # t == ell
        with pytest.raises(ValueError):
            h_l(1.0, 0.0, 0.3, 0.5, 0.2)   # entrance needs a = 0
        with pytest.raises(ValueError):
            h_l(1.0, 0.2, 0.0, 0.5, 0.2)   # interior needs a > 0
        with pytest.raises(ValueError):
            h_l(1.0, 0.2, 0.3, 0.5, -0.1)  # negative target


class TestHitDensities:
    @pytest.mark.parametrize(
        "s, ell, ref",
        [
            # fixed-precision references computed at 50 significant digits
            (0.4, 1.0, 0.2906641295405466014598),
            (0.05, 1.0, 7.590856876665251824778),
            (0.95, 1.0, 0.01694390186219174754924),
            (2.0, 6.0, 0.01121148979041624333498),
        ],
    )
    def test_reference_values(self, constants, s, ell, ref):
        assert p_vstar_density(s, ell, constants) == pytest.approx(ref, rel=1e-12)

    def test_symmetric_sides_agree_exactly(self, constants):
        for s, ell in [(0.05, 1.0), (0.4, 1.0), (2.0, 6.0)]:
            assert (p_ystar_density(s, ell, constants)
                    == p_vstar_density(s, ell, constants))

    def test_vanishes_at_excursion_end(self, constants):
        vals = [p_vstar_density(s, 1.0, constants)
                for s in (0.9, 0.99, 0.999, 0.9999)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-3

    def test_rejects_bad_times(self, constants):
        for s, ell in [(0.0, 1.0), (1.0, 1.0), (1.5, 1.0), (0.5, 0.0)]:
            with pytest.raises(ValueError):
                p_vstar_density(s, ell, constants)
        with pytest.raises(ValueError):
            p_vstar_total(0.0, constants)


class TestHitTotals:
    @pytest.mark.parametrize(
        "ell, ref",
        [
            # adaptive-quadrature references over the verified density
            # (two independent integrators agree to 4e-10)
            (1.0, 0.912483616464),
            (4.0, 0.980774812642),
        ],
    )
    def test_reference_values(self, constants, ell, ref):
        assert p_vstar_total(ell, constants) == pytest.approx(ref, rel=1e-7)
        assert p_ystar_total(ell, constants) == pytest.approx(ref, rel=1e-7)

    def test_monotone_and_bounded(self, constants):
        prev = 0.0
        for ell in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
            val = p_vstar_total(ell, constants)
            assert 0.0 <= val <= 1.0
            assert val >= prev
            prev = val

    def test_small_length_envelope(self, constants):
        # short excursions: bounded by the free-component reflection regime
        st2 = (1.0 - constants.rho ** 2) * constants.sigma_plus ** 2
        for ell in (0.01, 0.02, 0.05):
            bound = math.exp(-constants.kappa_L ** 2 / (4.0 * st2 * ell))
            assert p_vstar_total(ell, constants) <= bound


class TestRenewalIntensities:
    def test_symmetric_model_gives_equal_rates(self, constants):
        lam_minus, lam_plus = renewal_intensities(constants)
        assert lam_minus == lam_plus
        assert lam_minus > 0.0
        assert math.isfinite(lam_minus)

    def test_regression_value(self, constants):
        lam_minus, _ = renewal_intensities(constants)
        assert lam_minus == pytest.approx(1.1367733690588226, rel=1e-6)

    def test_tail_uncertainty_is_reported(self, constants):
        flags = []
        renewal_intensities(constants, flags=flags)
        assert FLAG_TAIL in flags

    def test_agrees_with_transform_table(self, constants):
        # same quantity by a second quadrature route
        lam_minus, _ = renewal_intensities(constants)
        tab_v, _ = _cf_table(constants, DEFAULT_QUADRATURE)
        assert tab_v.lam_tab == pytest.approx(lam_minus, rel=1e-6)


class TestRenewalDownProb:
    def test_symmetric_model_is_exactly_half(self, constants):
        assert renewal_down_prob(constants) == 0.5

    def test_complement_identity(self, constants):
        lam_minus, lam_plus = renewal_intensities(constants)
        down = lam_minus / (lam_minus + lam_plus)
        up = lam_plus / (lam_minus + lam_plus)
        assert down + up == pytest.approx(1.0, abs=1e-15)

    def test_doubled_buy_cancellation_scaling(self):
        # halving the left start gap doubles the down intensity by Brownian
        # scaling (length measure has a 3/2 power law), so the down
        # probability must be exactly 2/3
        c2 = derive_constants(ModelParams(theta_b=2.0))
        assert c2.kappa_L == pytest.approx(0.375, abs=0)
        assert renewal_down_prob(c2) == pytest.approx(2.0 / 3.0, abs=5e-7)
        assert renewal_down_prob(c2) > 0.5


class TestRenewalCf:
    def test_at_zero_is_exactly_one(self, constants):
        assert renewal_cf(0.0, constants) == (1.0 + 0.0j, 1.0 + 0.0j, 1.0 + 0.0j)

    @pytest.mark.parametrize("alpha", [0.25, 1.0, 4.0])
    def test_conjugate_symmetry_and_modulus(self, constants, alpha):
        plus = renewal_cf(alpha, constants)
        minus = renewal_cf(-alpha, constants)
        for a, b in zip(plus, minus):
            assert abs(a - b.conjugate()) <= 1e-10
            assert abs(a) <= 1.0 + 1e-9
            assert abs(b) <= 1.0 + 1e-9

    def test_mixture_identity(self, constants):
        lam_minus, lam_plus = renewal_intensities(constants)
        total = lam_minus + lam_plus
        for alpha in (0.25, 1.0, 4.0):
            cf_down, cf_up, cf_all = renewal_cf(alpha, constants)
            mix = (lam_minus * cf_down + lam_plus * cf_up) / total
            assert abs(mix - cf_all) <= 1e-12

    def test_regression_value(self, constants):
        cf_down, _, cf_all = renewal_cf(0.5, constants)
        assert cf_all == pytest.approx(0.970150 + 0.146579j, abs=1e-4)
        # symmetric model: both conditional transforms coincide
        assert cf_down == pytest.approx(cf_all, rel=1e-12)

    def test_denominator_against_direct_quadrature(self, constants):
        # rebuild the transform denominator from the complementary identity:
        # total rates plus the transform of the no-hit length measure
        alpha = 0.5
        lam_minus, lam_plus = renewal_intensities(constants)
        lmax = DEFAULT_QUADRATURE.tail_cut[1]
        tab_v, tab_y = _cf_table(constants, DEFAULT_QUADRATURE)
        root = math.sqrt(alpha) * complex(1.0, -1.0)
        d_tab = (tab_v.denominator_part(alpha, lmax)
                 + tab_y.denominator_part(alpha, lmax)
                 + (tab_v.weight + tab_y.weight) * root)

        def miss(ell):
            return 1.0 - p_vstar_total(ell, constants)

        def re_part(ell):
            return (1.0 - math.cos(alpha * ell)) * miss(ell) / math.sqrt(
                2.0 * math.pi * ell ** 3)

        def im_part(ell):
            return -math.sin(alpha * ell) * miss(ell) / math.sqrt(
                2.0 * math.pi * ell ** 3)

        pts = [0.02, 0.1, 0.5, 2.0, 10.0, 60.0, 300.0]
        re_val, _ = integrate.quad(re_part, 0.0, lmax, points=pts, limit=300)
        im_val, _ = integrate.quad(im_part, 0.0, lmax, points=pts, limit=300)
        d_alt = (lam_minus + lam_plus
                 + (tab_v.weight + tab_y.weight) * complex(re_val, im_val))
        assert abs(d_tab - d_alt) / abs(d_tab) <= 1e-4

    def test_flags_and_domain(self, constants):
        flags = []
        renewal_cf(1.0, constants, flags=flags)
        assert FLAG_TAIL in flags
        with pytest.raises(ValueError):
            renewal_cf(math.nan, constants)


class TestLengthMeasureIdentity:
    @pytest.mark.parametrize(
        "alpha, ref",
        [
            (1.0, 1.0 - 1.0j),
            (-1.0, 1.0 + 1.0j),
            (4.0, 2.0 - 2.0j),
            (0.25, 0.5 - 0.5j),
        ],
    )
    def test_closed_form_examples(self, alpha, ref):
        numeric, closed = identity_7_62(alpha)
        assert closed == pytest.approx(ref, rel=1e-15)
        assert abs(numeric - closed) <= 1e-5

    @pytest.mark.parametrize("alpha", [0.25, 0.7, 1.0, 2.0, 4.0])
    def test_contract_tolerance_band(self, alpha):
        for a in (alpha, -alpha):
            numeric, closed = identity_7_62(a)
            assert abs(numeric - closed) <= 1e-4

    def test_conjugation(self):
        plus, _ = identity_7_62(1.7)
        minus, _ = identity_7_62(-1.7)
        assert abs(plus - minus.conjugate()) <= 1e-8

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            identity_7_62(0.0)
