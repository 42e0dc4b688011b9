"""Uniform domains, meshes, Fourier grids, and optimal zero-padding factors.

The physical box is a d-dimensional rectangle with half-width ``L * gamma[j]``
in axis j, discretized by ``N[j]`` equally spaced points

    x_{j,p} = (-N_j/2 + p) * h_j,   h_j = 2 L gamma_j / N_j,   p = 0 .. N_j - 1.

Free-space convolution on this box requires truncating the kernel to the ball
of radius G (the box diameter) and extending the grid by a per-axis padding
factor S_j before transforming.  The exact optimal factors are

    S_j = 1 + sqrt(sum_i gamma_i^2) / gamma_j,

which reduces to ``sqrt(d) + 1`` on isotropic boxes.  Practical factors round
each S_j up to a multiple of 1/2 such that S_j * N_j stays an even integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "DomainSpec",
    "PaddingPlan",
    "FourierGrid",
    "optimal_padding_exact",
    "practical_padding",
    "mesh_points",
    "padded_mesh_points",
]

_MAX_PADDING = 64.0


@dataclass(frozen=True)
class DomainSpec:
    """Axis-aligned box with half-widths ``L * gamma[j]`` and grid counts N.

    Parameters
    ----------
    L : float
        Base half-width of the first (widest) axis.
    gamma : tuple of float
        Per-axis anisotropy factors, ``gamma[0] == 1`` and ``0 < gamma[j] <= 1``.
    N : tuple of int
        Per-axis grid counts, each even and at least 2.
    """

    L: float
    gamma: tuple[float, ...]
    N: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        object.__setattr__(self, "N", tuple(int(n) for n in self.N))
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        d = len(self.gamma)
        if d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
        if len(self.N) != d:
            raise ValueError(f"N has {len(self.N)} axes but gamma has {d}")
        if self.gamma[0] != 1.0:
            raise ValueError(f"gamma[0] must equal 1, got {self.gamma[0]}")
        for j, g in enumerate(self.gamma):
            if not 0 < g <= 1:
                raise ValueError(f"gamma[{j}] = {g} outside (0, 1]")
        for j, n in enumerate(self.N):
            if n < 2 or n % 2 != 0:
                raise ValueError(f"N[{j}] = {n} must be even and >= 2")

    @property
    def d(self) -> int:
        return len(self.gamma)

    @property
    def half_widths(self) -> tuple[float, ...]:
        """Canonical per-axis half-widths ``L * gamma[j]``."""
        return tuple(self.L * g for g in self.gamma)

    @property
    def h(self) -> tuple[float, ...]:
        """Per-axis mesh spacings ``2 L gamma_j / N_j``."""
        return tuple(2 * self.L * g / n for g, n in zip(self.gamma, self.N))

    @classmethod
    def from_half_widths(cls, half_widths: Sequence[float], N: Sequence[int]) -> "DomainSpec":
        """Build a spec from raw half-widths; axis 0 must be the widest."""
        hw = tuple(float(w) for w in half_widths)
        if any(w > hw[0] for w in hw):
            raise ValueError(f"axis 0 must have the largest half-width, got {hw}")
        return cls(L=hw[0], gamma=tuple(w / hw[0] for w in hw), N=tuple(N))

    def anisotropy_strength(self) -> float:
        """Product of inverse anisotropy factors, prod_j 1/gamma_j."""
        return float(np.prod([1.0 / g for g in self.gamma]))


@dataclass(frozen=True)
class PaddingPlan:
    """Per-axis padding factors with the induced padded grid and radius G.

    ``S[j]`` is a positive multiple of 1/2 with ``paddedN[j] = S[j] * N[j]``
    an even integer, and ``G = 2 L sqrt(sum_j gamma_j^2)`` is the diameter of
    the physical box (the kernel truncation radius).
    """

    S: tuple[float, ...]
    paddedN: tuple[int, ...]
    G: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "S", tuple(float(s) for s in self.S))
        object.__setattr__(self, "paddedN", tuple(int(n) for n in self.paddedN))
        if not self.G > 0:
            raise ValueError(f"G must be positive, got {self.G}")
        for j, s in enumerate(self.S):
            if s < 1.0:
                raise ValueError(f"S[{j}] = {s} must be >= 1")
            if (round(2 * s) - 2 * s) != 0:
                raise ValueError(f"S[{j}] = {s} is not a multiple of 1/2")
        for j, n in enumerate(self.paddedN):
            if n % 2 != 0:
                raise ValueError(f"paddedN[{j}] = {n} must be even")


@dataclass(frozen=True)
class FourierGrid:
    """Discrete wavenumber grid of the padded box.

    Axis j holds integer mode indices ``-paddedN_j/2 .. paddedN_j/2 - 1``; the
    physical wavenumber of index k is ``k * scale[j]`` with
    ``scale[j] = pi / (S_j L gamma_j)`` (pi over the padded half-width).
    """

    paddedN: tuple[int, ...]
    scale: tuple[float, ...]

    @classmethod
    def for_plan(cls, domain: DomainSpec, plan: PaddingPlan) -> "FourierGrid":
        scale = tuple(
            math.pi / (s * domain.L * g) for s, g in zip(plan.S, domain.gamma)
        )
        return cls(paddedN=plan.paddedN, scale=scale)

    @property
    def d(self) -> int:
        return len(self.paddedN)

    def indices(self, axis: int) -> np.ndarray:
        """Integer mode indices of one axis in engine-native (DC-first) order."""
        n = self.paddedN[axis]
        return np.fft.fftfreq(n, 1.0 / n).astype(np.int64)

    def wavenumbers(self, axis: int) -> np.ndarray:
        """Physical wavenumbers of one axis in engine-native order."""
        return self.indices(axis) * self.scale[axis]

    def wavenumber_mesh(self) -> list[np.ndarray]:
        """Broadcastable physical wavenumber arrays, one per axis, native order."""
        return list(
            np.meshgrid(*(self.wavenumbers(a) for a in range(self.d)),
                        indexing="ij", sparse=True)
        )


def optimal_padding_exact(domain: DomainSpec) -> tuple[float, ...]:
    """Exact optimal padding factors ``S_j = 1 + sqrt(sum gamma_i^2)/gamma_j``.

    All components equal ``sqrt(d) + 1`` on isotropic domains.
    """
    root = math.sqrt(sum(g * g for g in domain.gamma))
    return tuple(1.0 + root / g for g in domain.gamma)


def truncation_radius(domain: DomainSpec) -> float:
    """Diameter of the physical box, ``G = 2 L sqrt(sum_j gamma_j^2)``."""
    return 2.0 * domain.L * math.sqrt(sum(g * g for g in domain.gamma))


def practical_padding(
    domain: DomainSpec,
    exact: Sequence[float] | None = None,
    override: Sequence[float] | None = None,
) -> PaddingPlan:
    """Round exact padding factors to practical ones and build the plan.

    Each S_j is the smallest multiple of 1/2 with ``S_j >= exact_j`` and
    ``S_j * N_j`` an even integer.  ``override`` bypasses the rounding with
    explicit per-axis factors (still validated as half-multiples yielding even
    padded counts); this is how deliberately sub-optimal or hand-rounded
    factors are requested.
    """
    if exact is None:
        exact = optimal_padding_exact(domain)
    if len(exact) != domain.d:
        raise ValueError(f"exact has {len(exact)} axes, domain has {domain.d}")

    if override is not None:
        if len(override) != domain.d:
            raise ValueError(f"override has {len(override)} axes, domain has {domain.d}")
        S = tuple(float(s) for s in override)
        paddedN = []
        for j, (s, n) in enumerate(zip(S, domain.N)):
            pn = Fraction(s).limit_denominator(2) * n
            if pn.denominator != 1 or pn.numerator % 2 != 0:
                raise ValueError(
                    f"override S[{j}] = {s} with N[{j}] = {n} does not give an "
                    "even integer padded count"
                )
            paddedN.append(int(pn))
        return PaddingPlan(S=S, paddedN=tuple(paddedN), G=truncation_radius(domain))

    S: list[float] = []
    paddedN: list[int] = []
    for j, (e, n) in enumerate(zip(exact, domain.N)):
        if e < 1.0:
            raise ValueError(f"exact S[{j}] = {e} must be >= 1")
        twice = math.ceil(2.0 * e - 1e-12)  # smallest half-multiple >= exact
        while True:
            if twice / 2.0 > _MAX_PADDING:
                raise ValueError(
                    f"no padding factor <= {_MAX_PADDING} makes S * N[{j}] even "
                    f"(N[{j}] = {n})"
                )
            num = twice * n  # 2 * S * N
            if num % 2 == 0 and (num // 2) % 2 == 0:
                S.append(twice / 2.0)
                paddedN.append(num // 2)
                break
            twice += 1
    return PaddingPlan(S=tuple(S), paddedN=tuple(paddedN), G=truncation_radius(domain))


def mesh_points(domain: DomainSpec) -> tuple[np.ndarray, ...]:
    """Per-axis coordinate arrays ``(-N_j/2 + p) h_j`` for p = 0 .. N_j - 1."""
    out = []
    for g, n in zip(domain.gamma, domain.N):
        h = 2 * domain.L * g / n
        out.append((np.arange(n) - n // 2) * h)
    return tuple(out)


def padded_mesh_points(domain: DomainSpec, plan: PaddingPlan) -> tuple[np.ndarray, ...]:
    """Per-axis coordinates of the padded grid (same spacing, more points)."""
    out = []
    for g, n, pn in zip(domain.gamma, domain.N, plan.paddedN):
        h = 2 * domain.L * g / n
        out.append((np.arange(pn) - pn // 2) * h)
    return tuple(out)


def mesh_grids(domain: DomainSpec) -> list[np.ndarray]:
    """Broadcastable coordinate arrays spanning the full mesh."""
    return list(np.meshgrid(*mesh_points(domain), indexing="ij", sparse=True))
