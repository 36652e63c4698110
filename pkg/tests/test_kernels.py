import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lensdet import kernels
from lensdet.kernels import (CharacterConventionError, GeneralLensSpec, HigherLensSpec, LensSpec,
                             PoleProximityError, degeneracies_oracle, general_k, harmonic_degeneracies,
                             higher_k, homogeneous_dk, homogeneous_h, homogeneous_k, pole_gap,
                             series_coefficients)

# sum_l l e^{-l} and sum_l l^2 e^{-l}, 30 digits from mpmath
H_SPHERE_AT_1 = 0.92067359420779231894541352
K_SPHERE_AT_1 = 1.99229476712498739292601661


def _series(coeffs, tau):
    l = np.arange(1, len(coeffs) + 1)
    return np.sum(np.asarray(coeffs, dtype=float) * np.exp(-l * tau))


def test_frozen_sphere_values_against_mpmath():
    with mpmath.workdps(35):
        h = mpmath.nsum(lambda l: l * mpmath.e ** -l, [1, mpmath.inf])
        k = mpmath.nsum(lambda l: l * l * mpmath.e ** -l, [1, mpmath.inf])
        closed = mpmath.cosh(0.5) / (4 * mpmath.sinh(0.5) ** 3)
    assert abs(h - H_SPHERE_AT_1) < 1e-15
    assert abs(k - K_SPHERE_AT_1) < 1e-15
    assert abs(closed - K_SPHERE_AT_1) < 1e-15


class TestHomogeneous:
    def test_sphere_h(self):
        assert homogeneous_h(LensSpec(1), 1.0) == pytest.approx(H_SPHERE_AT_1, rel=1e-14)

    def test_sphere_k(self):
        assert homogeneous_k(LensSpec(1), 1.0) == pytest.approx(K_SPHERE_AT_1, rel=1e-14)

    def test_untwisted_reduces_to_coth_form(self):
        tau = np.array([0.3 + 0.2j, 1.1, 2.5 - 0.4j])
        for q in (2, 3, 7):
            want = 1 / np.tanh(q * tau / 2) / (2 * np.sinh(tau))
            np.testing.assert_allclose(homogeneous_h(LensSpec(q), tau), want, rtol=1e-13)

    def test_large_tau_is_leading_mode(self):
        tau = 40.0
        assert homogeneous_h(LensSpec(2), tau) / math.exp(-tau) == pytest.approx(1.0, rel=1e-12)

    def test_twisted_against_oracle(self):
        spec = LensSpec(4, 2)
        d = degeneracies_oracle(spec, 200)
        assert homogeneous_h(spec, 0.7) == pytest.approx(_series(d, 0.7), rel=1e-12)

    def test_projective_space_keeps_odd_levels(self):
        odd = sum(l * l * math.exp(-l) for l in range(1, 200, 2))
        assert homogeneous_k(LensSpec(2), 1.0) == pytest.approx(odd, rel=1e-12)

    def test_large_real_part_does_not_overflow(self):
        val = homogeneous_k(LensSpec(3, 1), 800.0 + 0.3j)
        assert np.isfinite(val)

    @pytest.mark.parametrize("tau", [1e-2, 1e-4, 1e-6])
    def test_small_tau_accuracy(self, tau):
        for q, r in ((1, 0), (4, 0), (5, 2)):
            with mpmath.workdps(40):
                t = mpmath.mpf(tau)
                d = mpmath.mpf(r) / q - mpmath.mpf(1) / 2
                h = lambda x: mpmath.cosh(q * x * d) / (2 * mpmath.sinh(x) * mpmath.sinh(q * x / 2))
                want_h = float(h(t))
                want_k = float(-mpmath.diff(h, t))
            got_h = homogeneous_h(LensSpec(q, r), tau)
            got_k = homogeneous_k(LensSpec(q, r), tau)
            assert abs(got_h / want_h - 1) < 1e-13
            assert abs(got_k / want_k - 1) < 1e-12

    @pytest.mark.parametrize("q", [1, 2, 3, 6])
    def test_small_tau_leading_term(self, q):
        tau = 1e-5
        assert homogeneous_k(LensSpec(q), tau) * q * tau ** 3 == pytest.approx(2.0, rel=1e-8)

    @pytest.mark.parametrize("tau", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("spec", [LensSpec(1), LensSpec(4, 1), LensSpec(7, 3), LensSpec(2.5, 0.7)])
    def test_k_is_minus_h_derivative(self, spec, tau):
        # five-point central stencil; the three-point one has truncation
        # error h^2 K''/6 ~ 1.3e-6 at tau = 0.5 on the sphere
        h = 1e-4
        f = lambda t: homogeneous_h(spec, t)
        fd = -(-f(tau + 2 * h) + 8 * f(tau + h) - 8 * f(tau - h) + f(tau - 2 * h)) / (12 * h)
        assert abs(homogeneous_k(spec, tau) - fd) <= 1e-6

    @pytest.mark.parametrize("spec", [LensSpec(1), LensSpec(5, 2), LensSpec(3.3, 1.2)])
    def test_dk_matches_finite_difference(self, spec):
        tau, step = 0.9 + 0.2j, 1e-5
        fd = (homogeneous_k(spec, tau + step) - homogeneous_k(spec, tau - step)) / (2 * step)
        assert abs(homogeneous_dk(spec, tau) - fd) < 1e-6

    def test_pole_proximity(self):
        with pytest.raises(PoleProximityError):
            homogeneous_k(LensSpec(4), 0.5j * math.pi + 1e-10)
        with pytest.raises(PoleProximityError):
            homogeneous_h(LensSpec(1), 0.0)

    def test_zero_twist_is_untwisted(self):
        spec = LensSpec(6, 0)
        assert spec.delta == -0.5 and spec.untwisted

    @pytest.mark.parametrize("args", [(0, 0), (3, 3), (3, -1), (float("nan"), 0)])
    def test_invalid_spec(self, args):
        with pytest.raises(ValueError):
            LensSpec(*args)


class TestTwoSided:
    def test_sphere_reduction(self):
        assert general_k(GeneralLensSpec(1), 1.0) == pytest.approx(K_SPHERE_AT_1, rel=1e-13)

    def test_nu_one_is_homogeneous(self):
        tau = 0.8 + 0.3j
        a = general_k(GeneralLensSpec(5, 1, 1), tau)
        b = homogeneous_k(LensSpec(5), tau)
        assert abs(a - b) <= 1e-12 * abs(b)

    def test_against_oracle(self):
        spec = GeneralLensSpec(5, 1, 2)
        d = degeneracies_oracle(spec, 200)
        assert general_k(spec, 1.2) == pytest.approx(_series(d, 1.2), rel=1e-10)

    def test_far_tail_switches_form(self):
        spec = GeneralLensSpec(7, 1, 3)
        tau = 310.0 + 0.2j
        scaled = kernels._cyclic_k_scaled(7, spec.nus, np.asarray(tau - 300.0))
        got = general_k(spec, tau)
        # the kernel is translation-covariant only through its leading mode,
        # so just demand a finite, tiny value of the right size
        assert np.isfinite(got) and abs(got) < abs(scaled)

    def test_dk_matches_finite_difference(self):
        spec = GeneralLensSpec(7, 1, 3)
        tau, step = 0.7 - 0.15j, 1e-5
        fd = (general_k(spec, tau + step) - general_k(spec, tau - step)) / (2 * step)
        assert abs(kernels.general_dk(spec, tau) - fd) < 1e-6

    def test_inverse_labels(self):
        spec = GeneralLensSpec(29, 3, 7)
        assert (spec.lambda1 * 3) % 29 == 1 and (spec.lambda2 * 7) % 29 == 1

    def test_rejects_non_coprime(self):
        with pytest.raises(ValueError):
            GeneralLensSpec(6, 1, 2)

    @settings(max_examples=40, deadline=None)
    @given(q=st.integers(2, 30), a=st.integers(1, 60), b=st.integers(1, 60),
           x=st.floats(0.05, 3.0), y=st.floats(-0.3, 0.3))
    def test_normalization_invariance(self, q, a, b, x, y):
        if math.gcd(a, q) != 1 or math.gcd(b, q) != 1:
            return
        spec = GeneralLensSpec(q, a, b)
        norm = spec.normalize()
        assert norm.nu1 == 1
        tau = complex(x, y * pole_gap(spec) / 0.3 * 0.25)
        v, w = general_k(spec, tau), general_k(norm, tau)
        assert abs(v - w) <= 1e-13 * max(1.0, abs(v))


class TestHigher:
    def test_e2_matches_two_sided(self):
        tau = 0.9
        assert higher_k(HigherLensSpec(7, (1, 3)), tau) == pytest.approx(
            general_k(GeneralLensSpec(7, 1, 3), tau), rel=1e-14)

    def test_s5_coefficients_are_harmonic_multiplicities(self):
        coeffs = series_coefficients(lambda t: higher_k(HigherLensSpec(1, (1, 1, 1)), t), 30)
        assert np.all(coeffs > -1e-8)
        # degree-n harmonics on S^5 sit at level l = n + 2
        want = [0] + [(n + 1) * (n + 2) ** 2 * (n + 3) // 12 for n in range(29)]
        np.testing.assert_allclose(coeffs, want, atol=1e-6)

    def test_oracle_agreement(self):
        spec = HigherLensSpec(5, (1, 2, 3))
        coeffs = series_coefficients(lambda t: higher_k(spec, t), 30)
        np.testing.assert_allclose(coeffs, harmonic_degeneracies(spec, 30), atol=1e-6)

    def test_odd(self):
        spec = HigherLensSpec(3, (1, 1, 2))
        tau = 0.4 + 0.1j
        assert higher_k(spec, -tau) == pytest.approx(-higher_k(spec, tau), rel=1e-13)

    def test_rejects_e_one(self):
        with pytest.raises(ValueError):
            HigherLensSpec(3, (1,))


class TestOracle:
    def test_constant_mode(self):
        for q in range(1, 13):
            assert degeneracies_oracle(LensSpec(q), 1) == [1]

    def test_sphere(self):
        assert degeneracies_oracle(LensSpec(1), 20) == list(range(1, 21))

    def test_projective(self):
        assert degeneracies_oracle(LensSpec(2), 5) == [1, 0, 3, 0, 5]

    @settings(max_examples=30, deadline=None)
    @given(q=st.integers(1, 12), l_max=st.integers(1, 30))
    def test_twist_sum_rule(self, q, l_max):
        total = np.sum([degeneracies_oracle(LensSpec(q, r), l_max) for r in range(q)], axis=0)
        assert list(total) == list(range(1, l_max + 1))

    @pytest.mark.parametrize("q", range(1, 13))
    def test_generating_function_agreement(self, q):
        for r in range(q):
            spec = LensSpec(q, r)
            coeffs = series_coefficients(lambda t: homogeneous_h(spec, t), 30)
            d = degeneracies_oracle(spec, 30)
            assert np.all(np.asarray(d) >= 0)
            np.testing.assert_allclose(coeffs, d, atol=1e-6)

    @pytest.mark.parametrize("q", [5, 7, 9, 29])
    def test_character_sum_matches_harmonic_count(self, q):
        for nu in range(1, q):
            if math.gcd(nu, q) == 1:
                spec = GeneralLensSpec(q, 1, nu)
                assert degeneracies_oracle(spec, 30) == harmonic_degeneracies(spec, 30)

    def test_real_twist_rejected(self):
        with pytest.raises(ValueError):
            degeneracies_oracle(LensSpec(4, 0.5), 5)

    def test_convention_error_is_raised_for_non_integers(self):
        with pytest.raises(CharacterConventionError):
            kernels._round_checked([1.5 + 0j], "probe")


class TestParity:
    @pytest.mark.parametrize("spec", [LensSpec(1), LensSpec(4, 1), LensSpec(6, 2.5),
                                      GeneralLensSpec(5, 1, 2), HigherLensSpec(3, (1, 1, 2))])
    def test_odd_at_random_points(self, spec):
        rng = np.random.default_rng(7)
        gap = pole_gap(spec)
        tau = rng.uniform(0.05, 3, 50) + 1j * rng.uniform(-0.8, 0.8, 50) * gap
        k = kernels.cylinder_kernel(spec)
        np.testing.assert_allclose(k(-tau), -k(tau), rtol=1e-12)


class TestPoleGap:
    def test_examples(self):
        assert pole_gap(LensSpec(4)) == pytest.approx(math.pi / 2)
        assert pole_gap(LensSpec(1)) == pytest.approx(math.pi)
        assert pole_gap(GeneralLensSpec(5, 1, 2)) == pytest.approx(2 * math.pi / 5)

    def test_kernel_is_finite_inside_gap(self):
        spec = GeneralLensSpec(29, 1, 12)
        gap = pole_gap(spec)
        x = np.linspace(0.01, 5, 200)
        assert np.all(np.isfinite(general_k(spec, x + 0.99j * gap)))


def test_series_coefficients_on_known_function():
    # 1/(1-t) - 1 has every coefficient equal to one
    c = series_coefficients(lambda tau: 1 / (1 - np.exp(-tau)) - 1, 20)
    np.testing.assert_allclose(c, np.ones(20), atol=1e-12)
