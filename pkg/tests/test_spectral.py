"""Padded-transform engine: embedding, DFT pair, spectral derivatives."""

import math

import numpy as np
import pytest

from ktm.grid import DomainSpec, FourierGrid, mesh_points, practical_padding
from ktm.spectral import (
    ScalarField,
    SpectrumField,
    forward_dft,
    inverse_dft,
    padded_domain,
    restrict,
    spectral_derivative,
    zero_pad_embed,
)

RNG = np.random.default_rng(719)


def _field_1d(L, N, fn):
    domain = DomainSpec(L=L, gamma=(1.0,), N=(N,))
    (x,) = mesh_points(domain)
    return ScalarField(domain=domain, values=fn(x))


class TestEmbedRestrict:
    def test_1d_embed_offsets(self):
        # N = 4 into padded 8: samples land at offsets 2..5, zeros elsewhere
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(4,))
        plan = practical_padding(domain, override=(2.0,))
        field = ScalarField(domain=domain, values=np.array([1.0, 2.0, 3.0, 4.0]))
        big = zero_pad_embed(field, plan)
        np.testing.assert_array_equal(
            big.values, [0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 0.0, 0.0]
        )

    def test_embed_preserves_sum(self):
        domain = DomainSpec(L=2.0, gamma=(1.0, 1.0), N=(8, 8))
        plan = practical_padding(domain)
        vals = RNG.standard_normal((8, 8))
        big = zero_pad_embed(ScalarField(domain=domain, values=vals), plan)
        assert big.values.sum() == pytest.approx(vals.sum(), rel=1e-15)

    def test_restrict_inverts_embed_exactly(self):
        domain = DomainSpec(L=2.0, gamma=(1.0, 0.5), N=(8, 8))
        plan = practical_padding(domain)
        vals = RNG.standard_normal((8, 8))
        field = ScalarField(domain=domain, values=vals)
        back = restrict(zero_pad_embed(field, plan), domain)
        np.testing.assert_array_equal(back.values, vals)
        assert back.domain == domain

    def test_padded_domain_geometry(self):
        domain = DomainSpec(L=8.0, gamma=(1.0, 0.5), N=(16, 16))
        plan = practical_padding(domain)
        pdom = padded_domain(domain, plan)
        assert pdom.N == plan.paddedN
        assert pdom.half_widths == pytest.approx(
            tuple(s * 8.0 * g for s, g in zip(plan.S, domain.gamma))
        )
        # mesh spacing is unchanged by padding
        assert pdom.h == pytest.approx(domain.h)

    def test_restrict_to_larger_domain_rejected(self):
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(4,))
        big = DomainSpec(L=2.0, gamma=(1.0,), N=(8,))
        field = ScalarField(domain=domain, values=np.zeros(4))
        with pytest.raises(ValueError):
            restrict(field, big)


class TestScalarField:
    def test_shape_mismatch_rejected(self):
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(4,))
        with pytest.raises(ValueError):
            ScalarField(domain=domain, values=np.zeros(6))

    def test_non_finite_rejected(self):
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(4,))
        with pytest.raises(ValueError):
            ScalarField(domain=domain, values=np.array([0.0, np.nan, 0.0, 0.0]))


class TestDFTPair:
    def test_constant_field_is_single_coefficient(self):
        field = _field_1d(1.0, 16, lambda x: np.full_like(x, 3.0))
        spec = forward_dft(field)
        assert spec.coeffs[0] == pytest.approx(3.0, rel=1e-15)
        assert np.max(np.abs(spec.coeffs[1:])) < 1e-15

    def test_single_cosine_mode(self):
        # cos(pi x / W) puts 1/2 into mode indices +1 and -1
        field = _field_1d(1.0, 16, lambda x: np.cos(np.pi * x))
        c = forward_dft(field).coeffs
        assert c[1] == pytest.approx(0.5, abs=1e-15)
        assert c[-1] == pytest.approx(0.5, abs=1e-15)
        others = np.delete(c, [1, len(c) - 1])
        assert np.max(np.abs(others)) < 1e-15

    def test_hermitian_symmetry_of_real_input(self):
        vals = RNG.standard_normal(16)
        field = _field_1d(1.0, 16, lambda x: vals)
        c = forward_dft(field).coeffs
        for k in range(16):
            assert c[(-k) % 16] == pytest.approx(np.conj(c[k]), abs=1e-15)

    def test_parseval(self):
        vals = RNG.standard_normal((8, 8))
        domain = DomainSpec(L=1.0, gamma=(1.0, 1.0), N=(8, 8))
        c = forward_dft(ScalarField(domain=domain, values=vals)).coeffs
        assert np.sum(np.abs(c) ** 2) == pytest.approx(
            np.mean(vals**2), rel=1e-13
        )

    def test_round_trip_identity(self):
        vals = RNG.standard_normal((8, 6))
        domain = DomainSpec(L=2.0, gamma=(1.0, 0.75), N=(8, 6))
        field = ScalarField(domain=domain, values=vals)
        back = inverse_dft(forward_dft(field))
        np.testing.assert_allclose(back.values, vals, atol=1e-14)
        assert back.domain.half_widths == pytest.approx(domain.half_widths)

    def test_non_hermitian_spectrum_raises_when_checked(self):
        grid = FourierGrid(paddedN=(8,), scale=(math.pi,))
        coeffs = np.zeros(8, dtype=complex)
        coeffs[1] = 1.0  # no conjugate partner: synthesis is complex
        spec = SpectrumField(grid=grid, coeffs=coeffs)
        with pytest.raises(ValueError):
            inverse_dft(spec, max_imag_ratio=1e-10)
        # without the check the real part is returned silently
        inverse_dft(spec)


class TestSpectralDerivative:
    def test_cosine_derivative(self):
        # on the padded box of half-width SL, d/dx cos(k x) = -k sin(k x);
        # use a mode supported on the original box for an exact answer
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(32,))
        plan = practical_padding(domain, override=(1.0,))
        (x,) = mesh_points(domain)
        k = 3.0 * math.pi  # integer mode of the (unpadded) box
        field = ScalarField(domain=domain, values=np.cos(k * x))
        deriv = spectral_derivative(field, plan, (1,))
        np.testing.assert_allclose(deriv.values, -k * np.sin(k * x), atol=1e-12)

    def test_gaussian_derivative(self):
        sigma2 = 1.2
        domain = DomainSpec(L=8.0, gamma=(1.0,), N=(64,))
        plan = practical_padding(domain)
        (x,) = mesh_points(domain)
        rho = np.exp(-(x**2) / sigma2)
        deriv = spectral_derivative(ScalarField(domain, rho), plan, (1,))
        exact = -2.0 * x / sigma2 * rho
        assert np.max(np.abs(deriv.values - exact)) < 1e-12

    def test_mixed_partial_2d_gaussian(self):
        sigma2 = 1.2
        domain = DomainSpec(L=8.0, gamma=(1.0, 1.0), N=(64, 64))
        plan = practical_padding(domain)
        x, y = np.meshgrid(*mesh_points(domain), indexing="ij")
        rho = np.exp(-(x**2 + y**2) / sigma2)
        deriv = spectral_derivative(ScalarField(domain, rho), plan, (1, 1))
        exact = (4.0 * x * y / sigma2**2) * rho
        assert np.max(np.abs(deriv.values - exact)) < 1e-11

    def test_second_derivative_gaussian(self):
        sigma2 = 1.2
        domain = DomainSpec(L=8.0, gamma=(1.0,), N=(64,))
        plan = practical_padding(domain)
        (x,) = mesh_points(domain)
        rho = np.exp(-(x**2) / sigma2)
        deriv = spectral_derivative(ScalarField(domain, rho), plan, (2,))
        exact = (4.0 * x**2 / sigma2**2 - 2.0 / sigma2) * rho
        assert np.max(np.abs(deriv.values - exact)) < 1e-11

    def test_linearity(self):
        domain = DomainSpec(L=8.0, gamma=(1.0,), N=(32,))
        plan = practical_padding(domain)
        f = RNG.standard_normal(32)
        g = RNG.standard_normal(32)
        a, b = 1.7, -0.3
        lhs = spectral_derivative(ScalarField(domain, a * f + b * g), plan, (1,))
        rhs = a * spectral_derivative(ScalarField(domain, f), plan, (1,)).values
        rhs = rhs + b * spectral_derivative(ScalarField(domain, g), plan, (1,)).values
        scale = np.max(np.abs(rhs))
        assert np.max(np.abs(lhs.values - rhs)) < 1e-13 * max(scale, 1.0)

    def test_odd_order_annihilates_nyquist_mode(self):
        # the pure Nyquist mode (-1)^p has no well-defined odd derivative on
        # the real subspace; the convention is to zero it exactly
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(8,))
        plan = practical_padding(domain, override=(1.0,))
        field = ScalarField(domain, (-1.0) ** np.arange(8))
        deriv = spectral_derivative(field, plan, (1,))
        np.testing.assert_array_equal(deriv.values, np.zeros(8))

    def test_even_order_keeps_nyquist_mode(self):
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(8,))
        plan = practical_padding(domain, override=(1.0,))
        vals = (-1.0) ** np.arange(8)
        field = ScalarField(domain, vals)
        deriv = spectral_derivative(field, plan, (2,))
        k_nyq = math.pi / 1.0 * 4  # scale * N/2
        np.testing.assert_allclose(deriv.values, -(k_nyq**2) * vals, rtol=1e-13)

    def test_order_cap_and_dimension_check(self):
        domain = DomainSpec(L=1.0, gamma=(1.0,), N=(8,))
        plan = practical_padding(domain)
        field = ScalarField(domain, np.zeros(8))
        with pytest.raises(ValueError):
            spectral_derivative(field, plan, (5,))
        with pytest.raises(ValueError):
            spectral_derivative(field, plan, (1, 1))


def _upsample(coeffs, fine_n):
    """Exact trigonometric interpolation: pad a spectrum with zeros."""
    n = coeffs.size
    out = np.zeros(fine_n, dtype=complex)
    out[: n // 2] = coeffs[: n // 2]
    out[fine_n - n // 2 + 1 :] = coeffs[n // 2 + 1 :]
    out[n // 2] = 0.5 * coeffs[n // 2]
    out[fine_n - n // 2] = 0.5 * coeffs[n // 2]
    return out


class TestInterpolationOrder:
    """Trigonometric interpolation of a C^(m-1) bump converges at order m."""

    @pytest.mark.parametrize("m", [2, 3])
    def test_bump_interpolation_rate(self, m):
        from ktm.analysis import fit_convergence_order

        L, fine_n = 2.0, 512
        fine_dom = DomainSpec(L=L, gamma=(1.0,), N=(fine_n,))
        (xf,) = mesh_points(fine_dom)
        exact = np.where(np.abs(xf) < 1.0, (1.0 - xf**2) ** m, 0.0)

        Ns = [16, 32, 64, 128]
        errors = []
        for n in Ns:
            dom = DomainSpec(L=L, gamma=(1.0,), N=(n,))
            (x,) = mesh_points(dom)
            vals = np.where(np.abs(x) < 1.0, (1.0 - x**2) ** m, 0.0)
            c = forward_dft(ScalarField(dom, vals)).coeffs
            fine_spec = SpectrumField(
                grid=FourierGrid(paddedN=(fine_n,), scale=(math.pi / L,)),
                coeffs=_upsample(c, fine_n),
            )
            interp = inverse_dft(fine_spec).values
            errors.append(float(np.max(np.abs(interp - exact))))
        order = fit_convergence_order(Ns, errors)
        assert abs(order - m) < 0.6
