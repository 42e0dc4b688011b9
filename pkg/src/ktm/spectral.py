"""DFT engine, zero-padding embedding/restriction, spectral differentiation.

Conventions (fixed globally):

* Fields live on the centered mesh ``x_{j,p} = (-N_j/2 + p) h_j``.
* ``forward_dft`` returns coefficients in engine-native (DC-first) frequency
  order with normalization ``1 / prod_j paddedN_j``; ``inverse_dft`` applies
  no prefactor, so the round trip is the identity.  The native-order index
  ``idx`` maps to the mode set via ``numpy.fft.fftfreq``-style integers
  ``-paddedN_j/2 .. paddedN_j/2 - 1``; coefficient ``c[idx]`` multiplies
  ``exp(i k x)`` with physical wavenumber ``k = idx * pi / (S_j L gamma_j)``.
* Odd-order derivatives zero the Nyquist mode per differentiated axis, which
  keeps real fields exactly real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import DomainSpec, FourierGrid, PaddingPlan

__all__ = [
    "ScalarField",
    "SpectrumField",
    "zero_pad_embed",
    "restrict",
    "forward_dft",
    "inverse_dft",
    "spectral_derivative",
    "padded_domain",
]


@dataclass(frozen=True)
class ScalarField:
    """Real samples of a function on a domain's uniform mesh."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != tuple(self.domain.N):
            raise ValueError(f"values shape {v.shape} != domain N {self.domain.N}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite entries")


@dataclass(frozen=True)
class SpectrumField:
    """Complex Fourier coefficients on a padded grid, engine-native order."""

    grid: FourierGrid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if c.shape != tuple(self.grid.paddedN):
            raise ValueError(f"coeffs shape {c.shape} != paddedN {self.grid.paddedN}")


def padded_domain(domain: DomainSpec, plan: PaddingPlan) -> DomainSpec:
    """The equispaced domain covering the padded box (same mesh spacing)."""
    hw = tuple(s * domain.L * g for s, g in zip(plan.S, domain.gamma))
    return DomainSpec.from_half_widths(hw, plan.paddedN)


def _centered_slices(big: tuple[int, ...], small: tuple[int, ...]) -> tuple[slice, ...]:
    out = []
    for b, s in zip(big, small):
        if b < s:
            raise ValueError(f"padded count {b} smaller than field count {s}")
        lo = (b - s) // 2
        out.append(slice(lo, lo + s))
    return tuple(out)


def zero_pad_embed(field: ScalarField, plan: PaddingPlan) -> ScalarField:
    """Embed a field in the centered block of the padded grid, zeros outside."""
    dom = field.domain
    if len(plan.paddedN) != dom.d:
        raise ValueError("plan dimension does not match field")
    big = np.zeros(plan.paddedN, dtype=float)
    big[_centered_slices(plan.paddedN, dom.N)] = field.values
    return ScalarField(domain=padded_domain(dom, plan), values=big)


def restrict(field: ScalarField, domain: DomainSpec) -> ScalarField:
    """Extract the centered block of a padded field onto the target domain."""
    sl = _centered_slices(field.domain.N, domain.N)
    return ScalarField(domain=domain, values=field.values[sl].copy())


def _grid_for(domain: DomainSpec) -> FourierGrid:
    """Fourier grid of a domain treated as its own (already padded) box."""
    scale = tuple(math.pi / w for w in domain.half_widths)
    return FourierGrid(paddedN=tuple(domain.N), scale=scale)


def forward_dft(field: ScalarField) -> SpectrumField:
    """Normalized forward transform of a (typically padded) field."""
    m = float(np.prod(field.domain.N))
    coeffs = np.fft.fftn(np.fft.ifftshift(field.values)) / m
    return SpectrumField(grid=_grid_for(field.domain), coeffs=coeffs)


def inverse_dft(spectrum: SpectrumField, max_imag_ratio: float | None = None) -> ScalarField:
    """Unnormalized inverse transform back to the centered mesh.

    The synthesis of a Hermitian spectrum is real up to roundoff; the
    imaginary residue is discarded.  If ``max_imag_ratio`` is given, raise
    when ``max|imag| > max_imag_ratio * max|real|`` (non-Hermitian input).
    """
    m = float(np.prod(spectrum.grid.paddedN))
    complex_vals = np.fft.fftshift(np.fft.ifftn(spectrum.coeffs)) * m
    real_vals = complex_vals.real
    if max_imag_ratio is not None:
        scale = float(np.max(np.abs(real_vals)))
        residue = float(np.max(np.abs(complex_vals.imag)))
        if residue > max_imag_ratio * max(scale, np.finfo(float).tiny):
            raise ValueError(
                f"imaginary residue {residue:.3e} exceeds "
                f"{max_imag_ratio:.1e} * max|real| = {max_imag_ratio * scale:.3e}"
            )
    hw = spectrum.grid
    half_widths = tuple(math.pi / s for s in hw.scale)
    domain = DomainSpec.from_half_widths(half_widths, hw.paddedN)
    return ScalarField(domain=domain, values=real_vals.copy())


def _derivative_multiplier(grid: FourierGrid, alpha: tuple[int, ...]) -> np.ndarray:
    """Broadcast product of (i k_j)^alpha_j with Nyquist zeroed on odd orders."""
    mult = np.ones((1,) * grid.d, dtype=complex)
    for axis, order in enumerate(alpha):
        if order == 0:
            continue
        k = grid.wavenumbers(axis)
        factor = (1j * k) ** order
        if order % 2 == 1:
            factor[grid.paddedN[axis] // 2] = 0.0  # Nyquist slot in native order
        shape = [1] * grid.d
        shape[axis] = grid.paddedN[axis]
        mult = mult * factor.reshape(shape)
    return mult


def spectral_derivative(
    field: ScalarField, plan: PaddingPlan, alpha: tuple[int, ...]
) -> ScalarField:
    """Partial derivative of given multi-index order via the padded transform.

    Embeds the field per the plan, multiplies coefficients by
    ``prod_j (i k_j)^alpha_j``, transforms back, restricts to the original
    mesh.  Orders up to |alpha| = 4 are supported.
    """
    if len(alpha) != field.domain.d:
        raise ValueError("alpha length does not match field dimension")
    if sum(alpha) > 4:
        raise ValueError(f"total derivative order {sum(alpha)} exceeds 4")
    spec = forward_dft(zero_pad_embed(field, plan))
    mult = _derivative_multiplier(spec.grid, tuple(int(a) for a in alpha))
    deriv = SpectrumField(grid=spec.grid, coeffs=spec.coeffs * mult)
    return restrict(inverse_dft(deriv), field.domain)
