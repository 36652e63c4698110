import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lensdet import detcore
from lensdet.contour import default_line
from lensdet.detcore import (Coupling, minimal_logdet, small_tau_bracket,
                             subtracted_resolvent, subtracted_zprime0, z1_closed_form_even, z_at_1,
                             zprime0)
from lensdet.kernels import GeneralLensSpec, HigherLensSpec, LensSpec, degeneracies_oracle

C4, C3 = Coupling.conformal4(), Coupling.conformal3()


class TestCoupling:
    def test_named(self):
        assert (C4.alpha_sq, C3.alpha_sq, Coupling.minimal().alpha_sq) == (0.0, 0.25, 1.0)
        assert Coupling.mass(2.0).alpha_sq == pytest.approx(-3.75)
        assert Coupling.imaginary_mass(3).alpha == 3j
        assert Coupling.mass(0.3).mu == pytest.approx(0.3)


class TestZPrime0:
    def test_sphere_conformal4_closed_form(self):
        # ln det on S^3 for the conformal-in-four operator is zeta(3)/(2 pi^2)
        want = -float(mpmath.zeta(3)) / (2 * math.pi ** 2)
        assert zprime0(LensSpec(1), C4).value == pytest.approx(want, abs=1e-12)

    def test_result_fields(self):
        r = zprime0(LensSpec(3), C3)
        assert r.logdet == -r.value and r.det == pytest.approx(math.exp(-r.value))
        d = r.to_dict()
        assert d["convention"] == {"field": "real-scalar", "normalization": "canonical"}
        assert d["spec"]["formula_extended"] is True

    def test_weyl_projective_example(self):
        r = zprime0(LensSpec(2), Coupling.imaginary_mass(10))
        assert r.value == pytest.approx(math.pi * 1000 / 6, rel=1e-4)

    @pytest.mark.parametrize("q", [1, 2, 3])
    @pytest.mark.parametrize("m,tol", [(6, 1e-3), (10, 1e-4)])
    def test_weyl_law(self, q, m, tol):
        r = zprime0(LensSpec(q), Coupling.imaginary_mass(m))
        assert abs(r.value * 3 * q / (math.pi * m ** 3) - 1) <= tol

    def test_nu_one_is_homogeneous(self):
        a = zprime0(GeneralLensSpec(5, 1, 1), C4)
        b = zprime0(LensSpec(5), C4)
        assert abs(a.value - b.value) <= 2 * (a.abs_error_estimate + b.abs_error_estimate)

    def test_higher_e2_is_two_sided(self):
        a = zprime0(HigherLensSpec(7, (1, 3)), C3)
        b = zprime0(GeneralLensSpec(7, 1, 3), C3)
        assert a.value == pytest.approx(b.value, abs=1e-10)

    @pytest.mark.parametrize("nu", [2, 5, 12])
    def test_lens_isomorphisms(self, nu):
        vals = [zprime0(GeneralLensSpec(29, 1, n), C4) for n in (nu, 29 - nu, pow(nu, -1, 29))]
        for v in vals[1:]:
            assert abs(v.value - vals[0].value) <= 2 * (v.abs_error_estimate + vals[0].abs_error_estimate)

    @pytest.mark.parametrize("spec", [LensSpec(4), LensSpec(6, 2), GeneralLensSpec(7, 1, 2),
                                      HigherLensSpec(5, (1, 2, 2))])
    @pytest.mark.parametrize("coupling", [C4, C3, Coupling.mass(1.5)])
    def test_delta_independence(self, spec, coupling):
        from lensdet.kernels import pole_gap

        res = [zprime0(spec, coupling, default_line(spec, coupling, delta=f * pole_gap(spec)))
               for f in (0.25, 0.5, 0.75)]
        spread = max(r.value for r in res) - min(r.value for r in res)
        assert spread <= 10 * sum(r.abs_error_estimate for r in res)

    def test_twist_continuity_and_periodicity(self):
        rs = np.linspace(0, 4, 51)[:-1]
        vals = np.array([zprime0(LensSpec(4, r), C3).value for r in rs])
        # neighbours differ by a small amount and the r -> 4 limit returns to r = 0
        assert np.max(np.abs(np.diff(vals))) < 0.1
        near_end = zprime0(LensSpec(4, 4 - 1e-7), C3).value
        assert near_end == pytest.approx(vals[0], abs=1e-6)

    def test_twist_reflection(self):
        a = zprime0(LensSpec(6, 1), C4).value
        b = zprime0(LensSpec(6, 5), C4).value
        assert a == pytest.approx(b, abs=1e-12)

    def test_frozen_twisted_values(self):
        # computed once with this pipeline and cross-checked against the
        # polyhedral published determinants, which are sums of these blocks
        frozen = {(2, 1): -0.24358765647, (4, 2): -0.49177643689, (6, 3): -0.94270507807,
                  (10, 5): -2.40104075065, (10, 1): 2.12670256507}
        for (q, r), v in frozen.items():
            assert zprime0(LensSpec(q, r), C4).value == pytest.approx(v, abs=2e-10)

    def test_rejects_minimal(self):
        with pytest.raises(ValueError):
            zprime0(LensSpec(2), Coupling.minimal())

    def test_rejects_real_axis(self):
        from lensdet.contour import ContourLine

        with pytest.raises(Exception):
            zprime0(LensSpec(2), C4, ContourLine(delta=0.0))


class TestZAt1:
    def test_projective_vanishes(self):
        assert abs(z_at_1(LensSpec(2), C4).value) <= 1e-9

    @pytest.mark.parametrize("two_q", [2, 4, 6, 8, 10, 12])
    def test_closed_form(self, two_q):
        assert z_at_1(LensSpec(two_q), C4).value == pytest.approx(z1_closed_form_even(two_q), abs=1e-9)

    def test_closed_form_examples(self):
        assert z1_closed_form_even(2) == 0
        assert z1_closed_form_even(4) == pytest.approx(math.pi / 8)
        assert z1_closed_form_even(6) == pytest.approx(math.pi / (3 * math.sqrt(3)))
        want = math.pi / 24 * (2 + 2 * 2 / math.sqrt(3) + 1 + 2)
        assert z1_closed_form_even(12) == pytest.approx(want, rel=1e-15)

    def test_closed_form_rejects_odd(self):
        with pytest.raises(ValueError):
            z1_closed_form_even(5)

    def test_rejects_general(self):
        with pytest.raises(TypeError):
            z_at_1(GeneralLensSpec(5, 1, 2), C4)


class TestMinimal:
    def test_projective_value(self):
        assert minimal_logdet(LensSpec(2)).value == pytest.approx(-0.695171, abs=1e-5)

    def test_projective_from_sphere(self):
        cross = minimal_logdet(LensSpec(1)).value - 4 * zprime0(LensSpec(1), C3).value
        assert cross == pytest.approx(minimal_logdet(LensSpec(2)).value, abs=1e-7)

    @pytest.mark.parametrize("q", [1, 2, 3, 7])
    def test_half_alpha_against_contour(self, q):
        bar = subtracted_zprime0(LensSpec(q), 0.5).value
        assert bar == pytest.approx(zprime0(LensSpec(q), C3).value + math.log(0.75), abs=1e-8)

    @pytest.mark.parametrize("q", [1, 2, 5])
    @pytest.mark.parametrize("alpha", [0.3, 0.6])
    def test_zero_mode_identity(self, q, alpha):
        bar = subtracted_zprime0(LensSpec(q), alpha).value
        full = zprime0(LensSpec(q), Coupling(alpha * alpha)).value
        assert bar - full == pytest.approx(math.log(1 - alpha * alpha), abs=1e-8)

    def test_rejects_twisted(self):
        with pytest.raises(ValueError):
            minimal_logdet(LensSpec(4, 1))
        with pytest.raises(ValueError):
            minimal_logdet(GeneralLensSpec(5, 1, 2))

    def test_non_integer_q_runs(self):
        r = minimal_logdet(LensSpec(2.5))
        assert math.isfinite(r.value)

    @pytest.mark.parametrize("q", [1, 3])
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_resolvent_against_direct_sum(self, q, alpha):
        L = 20000
        l = np.arange(1, L + 1, dtype=float)
        D = l * np.asarray(degeneracies_oracle(LensSpec(q), L), dtype=float)
        terms = D[1:] / (l[1:] ** 2 - alpha ** 2) ** 2
        # remainder: D_l averages l^2/q, so sum_{l>L} ~ (1/q)(1/L - 1/(2L^2))
        tail = (1 / L - 1 / (2 * L * L)) / q
        direct = math.fsum(terms) + tail
        got = subtracted_resolvent(LensSpec(q), alpha).value
        assert got == pytest.approx(direct, abs=1e-6)


class TestBracket:
    def test_zero(self):
        assert small_tau_bracket(1.0, 0.0) == 0.0

    def test_small_argument(self):
        with mpmath.workdps(50):
            y = mpmath.mpf("1e-3")
            ref = 2 * y * mpmath.sinh(y) - 2 * mpmath.cosh(y) + 2 - y * y
        assert small_tau_bracket(1.0, 1e-3) == pytest.approx(float(ref), rel=1e-8)
        assert float(ref) == pytest.approx(2.5e-13, rel=1e-5)

    def test_direct_region(self):
        with mpmath.workdps(50):
            ref = 4 * mpmath.sinh(2) - 2 * mpmath.cosh(2) + 2 - 4
        assert small_tau_bracket(1.0, 2.0) == pytest.approx(float(ref), rel=1e-14)
        assert float(ref) == pytest.approx(4.983050249, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(alpha=st.floats(0.01, 2.0), tau=st.floats(1e-6, 5.0))
    def test_matches_extended_precision(self, alpha, tau):
        # y >= 1e-8 keeps the 80-digit reference itself free of cancellation
        with mpmath.workdps(80):
            y = mpmath.mpf(alpha) * mpmath.mpf(tau)
            ref = float(2 * y * mpmath.sinh(y) - 2 * mpmath.cosh(y) + 2 - y * y)
        got = small_tau_bracket(alpha, tau)
        assert abs(got - ref) <= 1e-14 * abs(ref)

    def test_vectorised(self):
        t = np.array([0.0, 1e-4, 0.5, 3.0])
        out = small_tau_bracket(1.0, t)
        assert out.shape == t.shape


def test_cache_returns_identical_objects():
    a = zprime0(LensSpec(4), C4)
    b = zprime0(LensSpec(4), C4)
    assert a.value == b.value


def test_factor_two_tampering_breaks_published_checks(monkeypatch):
    from lensdet import verify

    original = detcore._weighted
    monkeypatch.setattr(detcore, "_weighted", lambda *a: 0.5 * original(*a))
    detcore._zprime0_cached.cache_clear()
    try:
        assert not verify.check_a1().passed
        assert not verify.check_a2().passed
    finally:
        monkeypatch.undo()
        detcore._zprime0_cached.cache_clear()
    assert verify.check_a1().passed
