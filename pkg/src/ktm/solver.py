"""Planning and applying truncated-kernel convolutions on uniform grids.

Two interchangeable execution paths:

* plain path (``plan_ktm`` / ``apply_ktm``): zero-pad the density by the
  plan's padding factors, multiply by the truncated-kernel transform in
  Fourier space, restrict back.  Per-solve cost scales with the padded size.

* tensor path (``plan_tensor`` / ``apply_tensor``): collapse the padded
  transform once into a discrete convolution tensor supported on offsets
  |p - q| < N, stored as its length-2N FFT per axis.  Per-solve cost then
  depends only on the output grid (twice the points per axis), independent
  of padding factors and anisotropy.

Derivative-type kernels (the dipolar interactions) are folded into the plan:
their polynomial factor in k multiplies the truncated-kernel transform at
plan time, and any pointwise density term is added after the convolution.
Both paths therefore run the identical multiplier and agree to rounding
error on every kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import DomainSpec, FourierGrid, PaddingPlan, mesh_grids, practical_padding
from .kernels import (
    DDI3D,
    KernelSpec,
    QuasiDDI2D,
    TruncatedKernelFT,
    derivative_factor,
    local_scale,
    uhat_grid,
    uhat_truncated,
)
from .spectral import (
    ScalarField,
    SpectrumField,
    _derivative_multiplier,
    forward_dft,
    inverse_dft,
    restrict,
    zero_pad_embed,
)

__all__ = [
    "KTMPlan",
    "ConvolutionPlan",
    "plan_ktm",
    "apply_ktm",
    "plan_tensor",
    "apply_tensor",
    "solve_derivative",
    "direct_convolution_oracle",
    "estimate_memory",
]

_ORACLE_MAX_POINTS = 4096


@dataclass(frozen=True)
class KTMPlan:
    """Padded-grid samples of the truncated-kernel transform, ready to apply."""

    kernel: KernelSpec
    domain: DomainSpec
    padding: PaddingPlan
    grid: FourierGrid
    uhat: TruncatedKernelFT


@dataclass(frozen=True)
class ConvolutionPlan:
    """Discrete convolution tensor (FFT of the folded kernel responses).

    ``that`` has shape (2 N_1, ..., 2 N_d); per axis, slot j < N holds the
    response at offset +j, slot N is zero (offset -N never contributes), and
    slot N + j holds offset j - N.
    """

    kernel: KernelSpec
    domain: DomainSpec
    padding: PaddingPlan
    that: np.ndarray


def _as_padding(domain: DomainSpec, S) -> PaddingPlan:
    if S is None:
        return practical_padding(domain)
    if np.ndim(S) == 0:
        S = (float(S),) * domain.d
    return practical_padding(domain, override=tuple(float(s) for s in S))


def plan_ktm(kernel: KernelSpec, domain: DomainSpec, S=None) -> KTMPlan:
    """Build the padded Fourier grid and sample the spectral multiplier.

    ``S`` overrides the padding factors (scalar or per-axis); by default the
    smallest half-integer factors above the alias-free optimum are used.
    Derivative-type kernels get their polynomial factor in k folded into the
    stored multiplier here, once.
    """
    if kernel.d != domain.d:
        raise ValueError(f"kernel {kernel.tag} is {kernel.d}D but the domain has {domain.d} axes")
    padding = _as_padding(domain, S)
    grid = FourierGrid.for_plan(domain, padding)
    uhat = uhat_grid(kernel, padding, grid)
    extra = derivative_factor(kernel, grid)
    if extra is not None:
        values = uhat.values
        values *= extra  # fold in place; uhat_grid output is never shared
        uhat = TruncatedKernelFT(values=values, G=uhat.G, kernel=kernel)
    return KTMPlan(kernel=kernel, domain=domain, padding=padding, grid=grid, uhat=uhat)


def _convolve(plan: KTMPlan, field: ScalarField) -> np.ndarray:
    spec = forward_dft(zero_pad_embed(field, plan.padding))
    coeffs = spec.coeffs
    coeffs *= plan.uhat.values  # transient spectrum; in-place saves a padded array
    return restrict(inverse_dft(spec), field.domain).values


def _check_input(plan, rho: ScalarField) -> None:
    if rho.domain != plan.domain:
        raise ValueError("density field does not match the plan's domain")


def apply_ktm(plan: KTMPlan, rho: ScalarField) -> ScalarField:
    """Evaluate the potential of ``rho`` through the padded-grid path."""
    _check_input(plan, rho)
    values = _convolve(plan, rho)
    scale = local_scale(plan.kernel)
    if scale != 0.0:
        values += scale * rho.values
    return ScalarField(domain=rho.domain, values=values)


def plan_tensor(kernel: KernelSpec, domain: DomainSpec, S=None) -> ConvolutionPlan:
    """Collapse a padded-grid plan into a discrete convolution tensor.

    Requires every padding factor >= 2 so that all offsets |p - q| < N are
    represented.  The padded intermediates are released before returning;
    the retained tensor holds 2^d complex values per output point.
    """
    kplan = plan_ktm(kernel, domain, S)
    if any(s < 2 for s in kplan.padding.S):
        raise ValueError(f"tensor path needs padding factors >= 2, got {kplan.padding.S}")
    N = kplan.domain.N
    responses = np.fft.fftshift(np.fft.ifftn(kplan.uhat.values).real)
    centers = tuple(n // 2 for n in kplan.padding.paddedN)
    block = responses[tuple(slice(c - n, c + n) for c, n in zip(centers, N))]
    del responses
    folded = np.fft.ifftshift(block)
    for axis, n in enumerate(N):
        idx = [slice(None)] * len(N)
        idx[axis] = n
        folded[tuple(idx)] = 0.0
    that = np.fft.fftn(folded)
    del folded
    return ConvolutionPlan(kernel=kernel, domain=domain, padding=kplan.padding, that=that)


def _tensor_convolve(plan: ConvolutionPlan, field: ScalarField) -> np.ndarray:
    N = plan.domain.N
    big = np.zeros(tuple(2 * n for n in N), dtype=complex)
    corner = tuple(slice(0, n) for n in N)
    big[corner] = field.values
    out = np.fft.ifftn(np.fft.fftn(big) * plan.that)
    return np.ascontiguousarray(out[corner].real)


def apply_tensor(plan: ConvolutionPlan, rho: ScalarField) -> ScalarField:
    """Evaluate the potential of ``rho`` through the convolution-tensor path.

    Cost is a fixed pair of length-2N FFTs regardless of the padding factors
    the plan was built with.
    """
    _check_input(plan, rho)
    values = _tensor_convolve(plan, rho)
    scale = local_scale(plan.kernel)
    if scale != 0.0:
        values += scale * rho.values
    return ScalarField(domain=rho.domain, values=values)


def solve_derivative(plan: KTMPlan, rho: ScalarField, alpha) -> ScalarField:
    """Evaluate a mixed partial derivative of the potential spectrally.

    ``alpha`` is a per-axis multi-index of orders (|alpha| <= 4); the
    derivative multiplier rides along with the kernel transform in a single
    spectral pass.
    """
    _check_input(plan, rho)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != plan.domain.d or any(a < 0 for a in alpha) or sum(alpha) > 4:
        raise ValueError(f"invalid derivative multi-index {alpha}")

    spec = forward_dft(zero_pad_embed(rho, plan.padding))
    coeffs = spec.coeffs
    coeffs *= plan.uhat.values
    coeffs *= _derivative_multiplier(spec.grid, alpha)
    values = restrict(inverse_dft(spec), rho.domain).values

    scale = local_scale(plan.kernel)
    if scale != 0.0:
        values += scale * _spectral_derivative_padded(rho, plan.padding, alpha)
    return ScalarField(domain=rho.domain, values=values)


def _spectral_derivative_padded(rho: ScalarField, padding: PaddingPlan, alpha) -> np.ndarray:
    spec = forward_dft(zero_pad_embed(rho, padding))
    coeffs = spec.coeffs
    coeffs *= _derivative_multiplier(spec.grid, alpha)
    return restrict(inverse_dft(spec), rho.domain).values


def direct_convolution_oracle(kernel: KernelSpec, domain: DomainSpec, rho: ScalarField, S=None) -> ScalarField:
    """Reference solve by explicit double sums (no FFTs, no layout tricks).

    Builds the padded-grid Fourier coefficients of the density by a direct
    O(M N) matrix sum, applies the pointwise transform values, and sums the
    series at the output points.  Limited to 4096 padded points; rejects the
    dipolar variants (their multiplier is not the bare radial transform).
    """
    if isinstance(kernel, (DDI3D, QuasiDDI2D)):
        raise ValueError("the direct oracle covers plain convolution kernels only")
    if rho.domain != domain:
        raise ValueError("density field does not match the domain")
    padding = _as_padding(domain, S)
    total = math.prod(padding.paddedN)
    if total > _ORACLE_MAX_POINTS:
        raise ValueError(f"{total} padded points exceeds the oracle limit {_ORACLE_MAX_POINTS}")
    grid = FourierGrid.for_plan(domain, padding)
    kmesh = np.meshgrid(*(grid.wavenumbers(a) for a in range(domain.d)), indexing="ij")
    K = np.stack([c.ravel() for c in kmesh], axis=1)
    X = np.stack([np.broadcast_to(g, domain.N).ravel() for g in mesh_grids(domain)], axis=1)
    rho_flat = rho.values.ravel()
    rho_hat = np.exp(-1j * (K @ X.T)) @ rho_flat / total
    uh = np.array([uhat_truncated(kernel, padding.G, kv) for kv in K])
    phi = (np.exp(1j * (X @ K.T)) @ (uh * rho_hat)).real
    return ScalarField(domain=domain, values=phi.reshape(domain.N))


_MEMORY_MODES = ("plain", "tensor-precompute", "tensor-execute")


def estimate_memory(domain: DomainSpec, S=None, mode: str = "plain") -> int:
    """Bytes of the dominant array for one solve/plan step.

    plain / tensor-precompute: one real float64 array on the padded grid.
    tensor-execute: one complex128 array on the doubled output grid
    (independent of the padding factors).
    """
    if mode not in _MEMORY_MODES:
        raise ValueError(f"mode must be one of {_MEMORY_MODES}, got {mode!r}")
    if mode == "tensor-execute":
        return 16 * math.prod(2 * n for n in domain.N)
    padding = _as_padding(domain, S)
    return 8 * math.prod(padding.paddedN)
