"""Marginal laws: exponent values, cumulants, measures, marks, increments.

Expected values are closed forms derived by hand (noted inline) or
recomputed in the test body through an independent route (scipy
quadrature, plain Monte Carlo with generous sigma bounds).
"""

import numpy as np
import pytest
from scipy import integrate

from idcoverage import levy
from idcoverage.errors import PreconditionError, QuadratureError, UnsupportedMomentError
from idcoverage.rng import child_rng

# log CF of the unit-mean gamma law at theta=1: -log(1-i) with the
# principal branch, i.e. -(log sqrt(2) - i pi/4)
GAMMA_PSI_1 = complex(-0.5 * np.log(2.0), np.pi / 4.0)


def test_gamma_exponent_at_one():
    law = levy.gamma_law()
    assert law.eval(1.0) == pytest.approx(GAMMA_PSI_1, abs=1e-15)


def test_exponent_vanishes_at_zero():
    marks = levy.MarkDistribution.discrete([1.0, -2.0], [0.6, 0.4])
    laws = [
        levy.gaussian(0.3, 1.7),
        levy.poisson(2.5),
        levy.compound_poisson(1.2, marks),
        levy.gamma_law(),
        levy.spectrally_positive(levy.LevyMeasure.atomic([0.5, 2.0], [1.0, 0.25])),
    ]
    for law in laws:
        assert law.eval(0.0) == 0.0


def test_exponent_shapes_follow_input():
    law = levy.gamma_law()
    flat = law.eval(np.array([0.5, -0.5, 2.0]))
    assert flat.shape == (3,)
    stacked = law.eval(np.array([[0.5, -0.5], [2.0, 0.0]]))
    assert stacked.shape == (2, 2)
    assert stacked[0, 0] == flat[0]
    assert stacked[1, 1] == 0.0


def test_density_exponent_handles_matrix_theta():
    law = levy.spectrally_positive(levy.reciprocal_measure(0.5))
    theta = np.array([[0.5, 1.0], [-0.5, 0.0]])
    out = law.eval(theta)
    assert out.shape == (2, 2)
    assert out[0, 1] == law.eval(1.0)
    assert out[1, 0] == np.conj(out[0, 0])


def test_gaussian_exponent_and_cumulants():
    beta, sigma2 = 0.7, 2.3
    law = levy.gaussian(beta, sigma2)
    th = 1.3
    assert law.eval(th) == pytest.approx(1j * beta * th - 0.5 * sigma2 * th * th)
    assert law.mean() == beta
    assert law.variance() == sigma2
    assert law.fourth_cumulant() == 0.0


def test_poisson_exponent_and_cumulants():
    law = levy.poisson(3.25)
    th = -0.8
    assert law.eval(th) == pytest.approx(3.25 * (np.exp(1j * th) - 1.0))
    # all cumulants of a Poisson law equal the rate
    assert law.mean() == law.variance() == law.fourth_cumulant() == 3.25


def test_compound_poisson_matches_manual_sum():
    mark = levy.MarkDistribution.discrete([1.0, 3.0, -0.5], [0.5, 0.2, 0.3])
    law = levy.compound_poisson(2.0, mark)
    th = 0.9
    manual = 2.0 * (
        0.5 * np.exp(1j * th * 1.0)
        + 0.2 * np.exp(1j * th * 3.0)
        + 0.3 * np.exp(1j * th * -0.5)
        - 1.0
    )
    assert law.eval(th) == pytest.approx(manual, abs=1e-15)
    assert law.mean() == pytest.approx(2.0 * (0.5 + 0.6 - 0.15))
    assert law.variance() == pytest.approx(2.0 * (0.5 + 1.8 + 0.075))
    assert law.fourth_cumulant() == pytest.approx(2.0 * (0.5 + 0.2 * 81 + 0.3 * 0.0625))


def test_gamma_cumulants():
    law = levy.gamma_law()
    # unit shape and rate: kappa_q = (q-1)!
    assert law.mean() == 1.0
    assert law.variance() == 1.0
    assert law.fourth_cumulant() == 6.0


def test_atomic_spectrally_positive_equals_compound_poisson():
    locs = np.array([0.5, 1.0, 2.0])
    masses = np.array([0.4, 0.9, 0.2])
    sp = levy.spectrally_positive(levy.LevyMeasure.atomic(locs, masses))
    rate = masses.sum()
    cp = levy.compound_poisson(
        rate, levy.MarkDistribution.discrete(locs, masses / rate))
    for th in (-1.7, 0.3, 2.2):
        assert sp.eval(th) == pytest.approx(cp.eval(th), abs=1e-14)
    assert sp.mean() == pytest.approx(cp.mean())
    assert sp.variance() == pytest.approx(cp.variance())
    assert sp.fourth_cumulant() == pytest.approx(cp.fourth_cumulant())


class TestReciprocalMeasure:
    """Density c/x on (0,1] with c = 1/log(1/b): everything closed-form."""

    def setup_method(self):
        self.b = 0.5
        self.c = 1.0 / np.log(2.0)
        self.nu = levy.reciprocal_measure(self.b)

    def test_moments(self):
        for q in (1, 2, 3, 4):
            assert self.nu.moment(q) == pytest.approx(self.c / q, rel=1e-10)

    def test_tail(self):
        for x in (0.25, 0.5, 0.75):
            assert self.nu.tail(x) == pytest.approx(np.log(1.0 / x) * self.c, rel=1e-10)
        assert self.nu.tail(1.5) == 0.0

    def test_first_moment_tail(self):
        for x in (0.25, 0.5, 0.75):
            assert self.nu.first_moment_tail(x) == pytest.approx((1.0 - x) * self.c, rel=1e-10)

    def test_truncated_first_moment(self):
        for eps in (0.1, 0.05):
            assert self.nu.truncated_first_moment(eps) == pytest.approx(eps * self.c, rel=1e-10)

    def test_exponent_value_against_direct_quadrature(self):
        th = 1.7
        re, _ = integrate.quad(lambda x: (np.cos(th * x) - 1.0) / (x * np.log(2.0)), 0, 1)
        im, _ = integrate.quad(lambda x: np.sin(th * x) / (x * np.log(2.0)), 0, 1)
        assert self.nu.exponent_value(th) == pytest.approx(complex(re, im), abs=1e-10)

    def test_scale(self):
        doubled = self.nu.scale(2.0)
        assert doubled.moment(1) == pytest.approx(2.0 * self.c, rel=1e-10)
        assert doubled.tail(0.5) == pytest.approx(2.0 * self.c * np.log(2.0), rel=1e-10)


def test_atomic_measure_bookkeeping():
    nu = levy.LevyMeasure.atomic([0.5, 1.0, 2.0], [0.4, 0.9, 0.2])
    assert nu.moment(1) == pytest.approx(0.2 + 0.9 + 0.4)
    assert nu.tail(1.0) == pytest.approx(1.1)
    assert nu.first_moment_tail(1.0) == pytest.approx(1.3)
    assert nu.truncated_first_moment(1.0) == pytest.approx(0.2)


def test_measure_validation():
    with pytest.raises(PreconditionError):
        levy.LevyMeasure.atomic([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(PreconditionError):
        levy.LevyMeasure.atomic([1.0], [-1.0])
    with pytest.raises(PreconditionError):
        levy.LevyMeasure.from_density(lambda x: 1.0, 0.0, np.inf)
    with pytest.raises(PreconditionError):
        levy.reciprocal_measure(1.0)


def test_infinite_first_moment_rejected():
    # x^{-2.5} near zero: int x * nu(dx) diverges, so no law can be built
    nu = levy.LevyMeasure.from_density(lambda x: x**-2.5, 0.0, 1.0)
    with pytest.raises((PreconditionError, QuadratureError)):
        levy.spectrally_positive(nu)


def test_mark_moments_against_normal_closed_form():
    m, v = 0.6, 1.9
    mark = levy.MarkDistribution.normal(m, v)
    assert mark.moment(1) == pytest.approx(m)
    assert mark.moment(2) == pytest.approx(m * m + v)
    assert mark.moment(3) == pytest.approx(m**3 + 3 * m * v)
    assert mark.moment(4) == pytest.approx(m**4 + 6 * m * m * v + 3 * v * v)
    with pytest.raises(UnsupportedMomentError):
        mark.moment(5)


def test_mark_cf_values():
    pm = levy.MarkDistribution.point_mass(2.0)
    assert pm.cf(0.7) == pytest.approx(np.exp(1.4j))
    disc = levy.MarkDistribution.discrete([1.0, -1.0], [0.5, 0.5])
    assert disc.cf(0.9) == pytest.approx(np.cos(0.9))
    norm = levy.MarkDistribution.normal(0.0, 4.0)
    assert norm.cf(0.5) == pytest.approx(np.exp(-0.5))


def test_point_mass_marks_consume_no_randomness():
    mark = levy.MarkDistribution.point_mass(1.0)
    counts = np.array([0, 3, 7])
    r1 = child_rng(99)
    r2 = child_rng(99)
    out = mark.sample_sum(counts, r1)
    np.testing.assert_array_equal(out, counts)
    # identical stream position afterwards
    assert r1.integers(1 << 30) == r2.integers(1 << 30)


def test_discrete_mark_sums_have_exact_conditional_moments():
    mark = levy.MarkDistribution.discrete([1.0, 4.0], [0.75, 0.25])
    counts = np.full(200_000, 10)
    sums = mark.sample_sum(counts, child_rng(7))
    mean = 10 * mark.moment(1)
    var = 10 * (mark.moment(2) - mark.moment(1) ** 2)
    assert sums.mean() == pytest.approx(mean, abs=4 * np.sqrt(var / counts.size))
    assert sums.var(ddof=1) == pytest.approx(var, rel=0.05)


def test_increment_sampling_moments():
    cases = [
        levy.gaussian(0.5, 2.0),
        levy.poisson(1.5),
        levy.compound_poisson(2.0, levy.MarkDistribution.discrete([1.0, -1.0], [0.3, 0.7])),
        levy.gamma_law(),
        levy.spectrally_positive(levy.LevyMeasure.atomic([0.5, 1.5], [1.0, 0.5])),
    ]
    t = 0.7
    n = 200_000
    for i, law in enumerate(cases):
        x = law.sample_increment(t, child_rng(1000 + i), size=(n,))
        mu, var = t * law.mean(), t * law.variance()
        assert x.mean() == pytest.approx(mu, abs=4 * np.sqrt(var / n)), law.kind
        assert x.var(ddof=1) == pytest.approx(var, rel=0.05), law.kind


def test_increment_at_time_zero_is_zero_and_free():
    law = levy.poisson(2.0)
    r1, r2 = child_rng(5), child_rng(5)
    x = law.sample_increment(0.0, r1, size=(4,))
    np.testing.assert_array_equal(x, np.zeros(4))
    assert r1.integers(1 << 30) == r2.integers(1 << 30)


def test_truncated_density_sampler_preserves_mean():
    # small jumps below eps are swept into a deterministic drift, so the
    # increment mean must stay exact while jumps stay above eps
    nu = levy.reciprocal_measure(0.5)
    law = levy.spectrally_positive(nu, trunc_eps=1e-4)
    info = law.truncation_info()
    assert info["eps"] == 1e-4
    assert info["rate"] == pytest.approx(nu.tail(1e-4), rel=1e-8)
    assert info["compensator_mean"] == pytest.approx(
        nu.truncated_first_moment(1e-4), rel=1e-6)
    n = 400_000
    x = law.sample_increment(1.0, child_rng(42), size=(n,))
    mu, var = law.mean(), law.variance()
    assert x.mean() == pytest.approx(mu, abs=4 * np.sqrt(var / n))
    assert x.var(ddof=1) == pytest.approx(var, rel=0.05)


def test_gamma_increments_match_numpy_gamma():
    law = levy.gamma_law()
    t = 0.4
    x = law.sample_increment(t, child_rng(8), size=(100_000,))
    assert (x >= 0).all()
    assert x.mean() == pytest.approx(t, abs=4 * np.sqrt(t / 100_000))
    # shape-t gamma: E[X^2] = t(t+1)
    assert (x**2).mean() == pytest.approx(t * (t + 1), rel=0.05)


def test_law_validation():
    with pytest.raises(PreconditionError):
        levy.gaussian(0.0, -1.0)
    with pytest.raises(PreconditionError):
        levy.poisson(-2.0)
    with pytest.raises(PreconditionError):
        levy.LevyExponent("weibull")
    with pytest.raises(PreconditionError):
        levy.spectrally_positive(levy.reciprocal_measure(0.5), trunc_eps=0.0)
