"""Kernel variants, truncated-kernel Fourier transforms, effective densities.

Truncating a free-space kernel U to the ball of radius G turns its Fourier
transform into an entire function sampled exactly on the padded grid:

    Uhat_G(k) = integral over B_G of U(y) exp(-i k.y) dy.

For radial U this reduces to a one-dimensional integral per |k|:

    d=1:  2 int_0^G U(r) cos(kr) dr
    d=2:  2 pi int_0^G J_0(kr) U(r) r dr
    d=3:  4 pi int_0^G sinc(kr) U(r) r^2 dr

Closed forms are used where available (with series branches replacing the
cancellation-prone regions); the generic quadrature path is canonical for
custom kernels and doubles as the test oracle for every closed form.

Dipolar variants are reformulated as convolutions against a plain radial
kernel with a derivative-based effective density; the transform stored in
their plans is the one of that reformulated radial kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy import special as _sp

from . import specfun
from .grid import DomainSpec, FourierGrid, PaddingPlan

__all__ = [
    "KernelSpec",
    "Poisson1D",
    "Poisson2D",
    "Poisson3D",
    "Coulomb2D",
    "DDI3D",
    "QuasiDDI2D",
    "Quadrupolar3D",
    "CustomRadial",
    "TruncatedKernelFT",
    "uhat_truncated",
    "uhat_quadrature",
    "uhat_grid",
    "quadrupolar_radial_factor",
    "quasi2d_kernel_profile",
    "quasi2d_kernel_profile_quadrature",
    "derivative_factor",
    "local_scale",
]


# ---------------------------------------------------------------------------
# kernel variants
# ---------------------------------------------------------------------------

def _check_unit(v: tuple[float, ...], name: str) -> tuple[float, ...]:
    v = tuple(float(x) for x in v)
    if len(v) != 3:
        raise ValueError(f"{name} must be a 3-vector")
    norm = math.sqrt(sum(x * x for x in v))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"{name} must have unit norm, got |{name}| = {norm!r}")
    return v


@dataclass(frozen=True)
class KernelSpec:
    """Base class for kernel variants; use the concrete subclasses."""

    tag = "abstract"
    d = 0

    def spec_key(self) -> dict:
        """JSON-compatible identity used for plan caching."""
        return {"tag": self.tag}


@dataclass(frozen=True)
class Poisson1D(KernelSpec):
    """U(x) = -|x| / 2 (free-space 1D Poisson)."""

    tag = "poisson1d"
    d = 1


@dataclass(frozen=True)
class Poisson2D(KernelSpec):
    """U(x) = -ln|x| / (2 pi) (free-space 2D Poisson)."""

    tag = "poisson2d"
    d = 2


@dataclass(frozen=True)
class Poisson3D(KernelSpec):
    """U(x) = 1 / (4 pi |x|) (free-space 3D Poisson)."""

    tag = "poisson3d"
    d = 3


@dataclass(frozen=True)
class Coulomb2D(KernelSpec):
    """U(x) = 1 / (2 pi |x|) in the plane."""

    tag = "coulomb2d"
    d = 2


@dataclass(frozen=True)
class DDI3D(KernelSpec):
    """3D dipole-dipole interaction with unit orientation vectors m and n.

    Solved as Phi = -(m.n) rho - 3 * Poisson3D * (d_n d_m rho); the plan
    stores the Poisson3D transform.
    """

    m: tuple[float, float, float] = (0.0, 0.0, 1.0)
    n: tuple[float, float, float] = (0.0, 0.0, 1.0)
    tag = "ddi3d"
    d = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", _check_unit(self.m, "m"))
        object.__setattr__(self, "n", _check_unit(self.n, "n"))

    def spec_key(self) -> dict:
        return {"tag": self.tag, "m": list(self.m), "n": list(self.n)}


@dataclass(frozen=True)
class QuasiDDI2D(KernelSpec):
    """Planar dipole-dipole interaction of a tightly confined layer.

    The radial kernel is

        Utilde(r) = (2 pi)^{-3/2} int_R exp(-s^2/2) / sqrt(r^2 + eps^2 s^2) ds
                  = exp(z) K_0(z) / ((2 pi)^{3/2} eps),   z = r^2 / (4 eps^2),

    convolved against the effective density
    -(3/2) (d_{n_perp n_perp} - n_3^2 Laplace) rho.
    """

    eps: float = 1.0
    n: tuple[float, float, float] = (0.0, 0.0, 1.0)
    tag = "quasiddi2d"
    d = 2

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "n", _check_unit(self.n, "n"))

    def spec_key(self) -> dict:
        return {"tag": self.tag, "eps": self.eps, "n": list(self.n)}


@dataclass(frozen=True)
class Quadrupolar3D(KernelSpec):
    """U(x) = Y_4^0(theta) / r^5, the 3D quadrupole-quadrupole interaction."""

    tag = "quadrupolar3d"
    d = 3


@dataclass(frozen=True)
class CustomRadial(KernelSpec):
    """A user-supplied radial kernel U(r), handled by adaptive quadrature.

    ``U`` must accept a float array of radii and return values; the absolute
    integrability of U over the truncation ball is checked at plan time.
    Custom kernels are excluded from disk caching (no stable identity).
    """

    U: Callable[[np.ndarray], np.ndarray] = None  # type: ignore[assignment]
    dim: int = 0
    tag = "custom"

    def __post_init__(self) -> None:
        if self.U is None or not callable(self.U):
            raise ValueError("CustomRadial requires a callable U(r)")
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")

    @property
    def d(self) -> int:  # type: ignore[override]
        return self.dim

    def spec_key(self) -> dict:
        raise TypeError("custom radial kernels have no stable cache identity")


@dataclass(frozen=True)
class TruncatedKernelFT:
    """Real spectral multiplier samples over a padded Fourier grid.

    For plain kernels this is Uhat_G itself; for derivative-type kernels it
    is Uhat_G composed with the kernel's polynomial factor in k (engine-native
    mode ordering either way).
    """

    values: np.ndarray
    G: float
    kernel: KernelSpec

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# radial symbols (vectorized over |k|); k = 0 entries handled by exact limits
# ---------------------------------------------------------------------------

def _sym_poisson1d(G: float, kmag: np.ndarray) -> np.ndarray:
    k = np.asarray(kmag, dtype=float)
    X = G * k
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(X / 2)
        out = G * G * (2 * s * s / (X * X) - np.sin(X) / X)
    return np.where(k == 0, -G * G / 2.0, out)


# (1 - J0(X)) / X^2 ascending series, exact to 1e-16 for X < 0.5 at 8 terms
_P2D_SERIES = [(-1.0) ** (n + 1) / (4.0**n * math.factorial(n) ** 2) for n in range(1, 9)]


def _sym_poisson2d(G: float, kmag: np.ndarray) -> np.ndarray:
    k = np.asarray(kmag, dtype=float)
    X = G * k
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = (1.0 - specfun.j0(X)) / (k * k)
        small = X < 0.5
        if np.any(small):
            Xs = X[small]
            acc = np.zeros_like(Xs)
            for c in reversed(_P2D_SERIES):
                acc = acc * (Xs * Xs) + c
            lead[small] = G * G * acc
        tail = np.where(X > 0, specfun.j1(X) / np.where(X > 0, X, 1.0), 0.5)
    out = lead - G * G * math.log(G) * tail
    return np.where(k == 0, G * G / 4.0 - (G * G / 2.0) * math.log(G), out)


def _sym_poisson3d(G: float, kmag: np.ndarray) -> np.ndarray:
    k = np.asarray(kmag, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(G * k / 2.0)
        out = 2.0 * s * s / (k * k)
    return np.where(k == 0, G * G / 2.0, out)


def _sym_coulomb2d(G: float, kmag: np.ndarray) -> np.ndarray:
    k = np.asarray(kmag, dtype=float)
    X = G * k
    pos = X > 0
    out = np.full(k.shape, float(G))
    if np.any(pos):
        Xp = X[pos]
        out[pos] = G * specfun.itj0(Xp) / Xp
    return out


# int_0^X j4(u)/u^3 du ascending series coefficients (14 terms, X <= 2.5)
def _dfact(n: int) -> int:
    r = 1
    while n > 1:
        r *= n
        n -= 2
    return r


_Q3D_SERIES = [
    (-1.0) ** n / ((2 * n + 2) * 2.0**n * math.factorial(n) * _dfact(2 * n + 9))
    for n in range(14)
]


def quadrupolar_radial_factor(G: float, kmag: np.ndarray) -> np.ndarray:
    """Radial factor B(k) = int_0^G j_4(kr) r^{-3} dr of the quadrupolar symbol.

    Series branch for G|k| <= 2.5 (the closed bracket cancels catastrophically
    there), closed bracket beyond; both agree to ~1e-15 relative at the seam.
    """
    k = np.asarray(kmag, dtype=float)
    X = G * k
    out = np.zeros(k.shape)
    small = (X <= 2.5) & (k > 0)
    if np.any(small):
        Xs = X[small]
        acc = np.zeros_like(Xs)
        for c in reversed(_Q3D_SERIES):
            acc = acc * (Xs * Xs) + c
        out[small] = k[small] ** 2 * (Xs * Xs) * acc
    big = X > 2.5
    if np.any(big):
        kb = k[big]
        Xb = X[big]
        out[big] = (
            kb * kb / 105.0
            - (Xb * Xb - 15.0) * np.cos(Xb) / (G**6 * kb**4)
            + 3.0 * (2.0 * Xb * Xb - 5.0) * np.sin(Xb) / (G**7 * kb**5)
        )
    return out


def quasi2d_kernel_profile(r: np.ndarray, eps: float) -> np.ndarray:
    """Radial profile Utilde(r) of the quasi-2D kernel, scaled-Bessel form.

    Utilde(r) = exp(z) K_0(z) / ((2 pi)^{3/2} eps) with z = r^2 / (4 eps^2);
    logarithmically singular at r = 0 and decaying like 1/(2 pi r).
    """
    r = np.asarray(r, dtype=float)
    z = r * r / (4.0 * eps * eps)
    out = np.empty(z.shape)
    pos = z > 0
    out[pos] = specfun.k0e(z[pos]) / ((2.0 * np.pi) ** 1.5 * eps)
    out[~pos] = np.inf
    return out


def quasi2d_kernel_profile_quadrature(r: float, eps: float) -> float:
    """Utilde(r) by direct quadrature of the defining s-integral (oracle)."""
    f = lambda s: math.exp(-s * s / 2.0) / math.sqrt(r * r + eps * eps * s * s)
    val, _ = integrate.quad(f, -12.0, 12.0, limit=200, epsabs=1e-15, epsrel=1e-14)
    return val / (2.0 * np.pi) ** 1.5


def _de_log_nodes(delta: float, h: float = 0.08, vmax: float = 3.4):
    """Double-exponential nodes on (0, delta) absorbing endpoint singularities."""
    v = np.arange(-vmax, vmax + h / 2.0, h)
    u = 0.5 * np.pi * np.sinh(v)
    e = np.exp(-2.0 * u)
    t = delta / (1.0 + e)
    w = delta * (2.0 * e / (1.0 + e) ** 2) * (0.5 * np.pi * np.cosh(v)) * h
    return t, w


def _gl_panel_nodes(a: float, b: float, kmax: float, npts: int = 12):
    """Composite Gauss-Legendre nodes on [a, b] with doubly capped panels.

    Panel widths stay below a half period pi/kmax of the fastest Bessel
    oscillation AND below a fixed fraction of the distance from the origin,
    so algebraically varying radial profiles (variation scale ~ t) stay
    resolved even when the oscillation cap alone would allow wide panels.
    """
    osc = np.pi / max(kmax, 1e-30)
    edges = [a]
    while edges[-1] < b:
        t = edges[-1]
        step = min(osc, 0.4 * t) if t > 0 else osc
        edges.append(min(t + step, b))
    edges = np.asarray(edges)
    xg, wg = np.polynomial.legendre.leggauss(npts)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    hw = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + hw * xg[None, :]).ravel(), (hw * wg[None, :]).ravel()


def _sym_quasi2d(G: float, kmag: np.ndarray, eps: float) -> np.ndarray:
    """2 pi int_0^G J0(k t) Utilde(t) t dt, shared-node vectorized quadrature."""
    ks = np.asarray(kmag, dtype=float)
    kmax = float(ks.max()) if ks.size else 1.0
    # the endpoint-singular region must stay below the fastest oscillation's
    # half period, or the double-exponential nodes cannot resolve J0 inside it
    delta = min(2.0 * eps, G / 8.0, 0.5 * np.pi / max(kmax, 1e-30))
    t1, w1 = _de_log_nodes(delta)
    t2, w2 = _gl_panel_nodes(delta, G, kmax)
    t = np.concatenate([t1, t2])
    base = quasi2d_kernel_profile(t, eps) * t * np.concatenate([w1, w2])
    block = max(1, int(2e7) // max(t.size, 1))
    flat = ks.ravel()
    res = np.empty(flat.shape)
    for s in range(0, flat.size, block):
        kk = flat[s:s + block]
        res[s:s + block] = specfun.j0(kk[:, None] * t[None, :]) @ base
    return 2.0 * np.pi * res.reshape(ks.shape)


# ---------------------------------------------------------------------------
# generic quadrature path (canonical for CustomRadial, oracle for closed forms)
# ---------------------------------------------------------------------------

def _oscillatory_panels(f, a: float, b: float, k: float) -> float:
    """Adaptive quadrature of f over [a, b] split at half periods of k."""
    if k <= 0 or (b - a) * k <= np.pi:
        val, _ = integrate.quad(f, a, b, limit=200, epsabs=1e-15, epsrel=1e-14)
        return val
    n = int(np.ceil((b - a) * k / np.pi))
    edges = np.linspace(a, b, n + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, lo, hi, limit=60, epsabs=1e-15, epsrel=1e-13)
        total += val
    return total


def _radial_u(kernel: KernelSpec) -> Callable[[np.ndarray], np.ndarray]:
    """The radial profile U(r) integrated by the quadrature path."""
    if isinstance(kernel, Poisson1D):
        return lambda r: -0.5 * r
    if isinstance(kernel, Poisson2D):
        return lambda r: -np.log(r) / (2.0 * np.pi)
    if isinstance(kernel, (Poisson3D, DDI3D)):
        return lambda r: 1.0 / (4.0 * np.pi * r)
    if isinstance(kernel, Coulomb2D):
        return lambda r: 1.0 / (2.0 * np.pi * r)
    if isinstance(kernel, QuasiDDI2D):
        eps = kernel.eps
        return lambda r: quasi2d_kernel_profile(r, eps)
    if isinstance(kernel, CustomRadial):
        return kernel.U
    raise TypeError(f"kernel {kernel.tag} has no plain radial profile")


def _weighted_trig(g, G: float, k: float, trig: str) -> float:
    """Integrate g(r)*trig(k r) over [0, G] without sampling r = 0.

    QUADPACK's oscillatory-weight rule evaluates the integrand at the
    interval endpoints, which breaks kernels singular at the origin.  A
    short head piece [0, cut] uses the plain adaptive rule (open Gauss
    points only) with the trig factor written out; the tail [cut, G]
    uses the weighted rule, which handles many oscillations cheaply.
    """
    cut = min(1.0, 0.5 * G)
    w = math.cos if trig == "cos" else math.sin
    # tolerances sit at the QUADPACK floor on purpose; the roundoff
    # warning it emits there carries no information
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(
            lambda r: g(r) * w(k * r), 0.0, cut, limit=200, epsabs=1e-16, epsrel=1e-14
        )
        tail, _ = integrate.quad(
            g, cut, G, weight=trig, wvar=k, limit=200, epsabs=1e-16, epsrel=1.3e-14
        )
    return head + tail


def _bessel_chunked(f, G: float, k: float) -> float:
    """Integrate f (carrying a J0(k r) factor) over [0, G] chunk by chunk.

    Chunks run between consecutive zeros of J0(k r), where the integrand is
    sign-definite, so adaptive quadrature sees no internal cancellation; the
    chunk values are summed exactly.  Falls back to one adaptive call when
    the interval holds no zero.
    """
    if k <= 0:
        val, _ = integrate.quad(f, 0.0, G, limit=200, epsabs=1e-15, epsrel=1e-14)
        return val
    count = int(G * k / np.pi) + 2
    zeros = _sp.jn_zeros(0, count) / k
    edges = [0.0] + [z for z in zeros if z < G] + [G]
    vals = []
    # per-chunk epsrel sits just above the QUADPACK minimum so the summed
    # noise over hundreds of chunks stays near machine scale; the roundoff
    # warning emitted at that floor carries no information
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, _ = integrate.quad(f, lo, hi, limit=60, epsabs=1e-16, epsrel=1.3e-14)
            vals.append(v)
    return math.fsum(vals)


def uhat_quadrature(kernel: KernelSpec, G: float, k: float) -> float:
    """Uhat_G(k) by adaptive quadrature of the 1D radial reduction.

    Canonical evaluation for ``CustomRadial``; independent oracle for every
    closed form.  The trigonometric reductions (d = 1 and 3) use the
    oscillatory-weight quadrature rules, and the 2D reduction is summed over
    sign-definite stretches between consecutive J0 zeros, so the oracle's
    absolute error stays near machine scale even when many oscillations
    nearly cancel.  For the quadrupolar kernel ``k`` only fixes |k|: the
    value returned is the radial factor times 4 pi (the angular factor
    Y_4^0 is exact and common to both paths), evaluated as
    4 pi int j_4(kr) r^{-3} dr.
    """
    if not G > 0:
        raise ValueError("G must be positive")
    k = float(k)
    if not np.isfinite(k) or k < 0:
        raise ValueError(f"wavenumber magnitude must be finite and >= 0, got {k}")
    if isinstance(kernel, Quadrupolar3D):
        if k == 0:
            return 0.0
        f = lambda r: specfun.sph_j4(k * r) / r**3
        return 4.0 * np.pi * _oscillatory_panels(f, 0.0, G, k)
    U = _radial_u(kernel)
    u1 = lambda r: float(np.asarray(U(np.asarray([r], dtype=float))).ravel()[0])
    d = kernel.d
    if d == 1:
        if k == 0:
            val, _ = integrate.quad(
                lambda r: 2.0 * u1(r), 0.0, G, limit=200, epsabs=1e-15, epsrel=1e-14
            )
            return val
        return _weighted_trig(lambda r: 2.0 * u1(r), G, k, "cos")
    if d == 2:
        f = lambda r: 2.0 * np.pi * float(specfun.j0(k * r)) * u1(r) * r
        return _bessel_chunked(f, G, k)
    if k == 0:
        f0 = lambda r: 4.0 * np.pi * u1(r) * r * r
        val, _ = integrate.quad(f0, 0.0, G, limit=200, epsabs=1e-15, epsrel=1e-14)
        return val
    return _weighted_trig(lambda r: 4.0 * np.pi * r * u1(r) / k, G, k, "sin")


def _symbol_on_magnitudes(kernel: KernelSpec, G: float, kmag: np.ndarray) -> np.ndarray:
    """Dispatch the vectorized radial symbol for |k| arrays."""
    if isinstance(kernel, Poisson1D):
        return _sym_poisson1d(G, kmag)
    if isinstance(kernel, Poisson2D):
        return _sym_poisson2d(G, kmag)
    if isinstance(kernel, (Poisson3D, DDI3D)):
        return _sym_poisson3d(G, kmag)
    if isinstance(kernel, Coulomb2D):
        return _sym_coulomb2d(G, kmag)
    if isinstance(kernel, QuasiDDI2D):
        return _sym_quasi2d(G, kmag, kernel.eps)
    if isinstance(kernel, CustomRadial):
        flat = np.asarray(kmag, dtype=float).ravel()
        vals = np.array([uhat_quadrature(kernel, G, kk) for kk in flat])
        return vals.reshape(np.shape(kmag))
    raise TypeError(f"no radial symbol for kernel {kernel.tag}")


def uhat_truncated(kernel: KernelSpec, G: float, k) -> float:
    """Point evaluation of Uhat_G at one wavenumber.

    ``k`` is a nonnegative magnitude for radial kernels, or a d-vector (any
    kernel; required for the quadrupolar variant, whose symbol depends on the
    polar angle of k).
    """
    if not G > 0:
        raise ValueError("G must be positive")
    kv = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(kv)):
        raise ValueError("wavenumber has non-finite components")
    if kv.ndim == 1:
        kmag = float(np.sqrt(np.sum(kv**2)))
    elif kv.ndim == 0:
        kmag = float(kv)
        if kmag < 0:
            raise ValueError("wavenumber magnitude must be >= 0")
    else:
        raise ValueError("k must be a scalar magnitude or a d-vector")
    if isinstance(kernel, Quadrupolar3D):
        if kv.ndim != 1:
            raise ValueError("the quadrupolar symbol needs a k vector (angle-dependent)")
        radial = quadrupolar_radial_factor(G, np.array([kmag]))[0]
        if kmag == 0:
            return 0.0
        cos_t = kv[2] / kmag
        return float(4.0 * np.pi * specfun.y40_from_cos(cos_t) * radial)
    return float(_symbol_on_magnitudes(kernel, G, np.array([kmag]))[0])


_UNIQUE_KERNELS = (Coulomb2D, QuasiDDI2D, Quadrupolar3D, CustomRadial)


def uhat_grid(kernel: KernelSpec, plan: PaddingPlan, grid: FourierGrid) -> TruncatedKernelFT:
    """Sample Uhat_G over the whole padded Fourier grid (native order).

    Kernels with expensive radial symbols are evaluated once per distinct
    |k|^2 and scattered back; cheap closed forms are evaluated directly.
    """
    if tuple(grid.paddedN) != tuple(plan.paddedN):
        raise ValueError("Fourier grid does not match padding plan")
    if kernel.d != len(plan.paddedN):
        raise ValueError(
            f"kernel {kernel.tag} is {kernel.d}D but the plan has {len(plan.paddedN)} axes"
        )
    if isinstance(kernel, CustomRadial):
        _check_integrable(kernel, plan.G)
    mesh = grid.wavenumber_mesh()
    k2 = np.zeros(grid.paddedN)
    for comp in mesh:
        k2 = k2 + comp * comp
    if isinstance(kernel, _UNIQUE_KERNELS):
        uniq, inverse = np.unique(k2, return_inverse=True)
        kmag_u = np.sqrt(uniq)
        if isinstance(kernel, Quadrupolar3D):
            radial_u = quadrupolar_radial_factor(plan.G, kmag_u)
            radial = radial_u[inverse].reshape(grid.paddedN)
            kmag = np.sqrt(k2)
            with np.errstate(divide="ignore", invalid="ignore"):
                cos_t = np.where(kmag > 0, mesh[2] / np.where(kmag > 0, kmag, 1.0), 0.0)
            vals = 4.0 * np.pi * specfun.y40_from_cos(cos_t) * radial
            vals[k2 == 0] = 0.0
        else:
            vals_u = _symbol_on_magnitudes(kernel, plan.G, kmag_u)
            vals = vals_u[inverse].reshape(grid.paddedN)
    else:
        vals = _symbol_on_magnitudes(kernel, plan.G, np.sqrt(k2))
    return TruncatedKernelFT(values=vals, G=plan.G, kernel=kernel)


def _check_integrable(kernel: CustomRadial, G: float) -> None:
    """Reject custom kernels whose |U| is not integrable over the ball.

    Adaptive quadrature alone can return a finite (garbage) value on a
    divergent integrand, so the origin is probed with geometrically
    shrinking lower limits: for an integrable singularity the added mass
    below the cutoff decays, while any divergence keeps contributing
    non-shrinking increments.
    """
    U = kernel.U
    d = kernel.d
    weight = {1: lambda r: 2.0, 2: lambda r: 2.0 * np.pi * r, 3: lambda r: 4.0 * np.pi * r * r}[d]
    f = lambda r: abs(float(U(np.array([r]))[0])) * weight(r)
    r0 = min(1.0, G)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if G > r0:
                bulk, _ = integrate.quad(f, r0, G, limit=200)
            else:
                bulk = 0.0
            probes = [
                integrate.quad(f, r0 * 2.0**-i, r0, limit=200)[0] for i in (10, 20, 30)
            ]
    except Exception as exc:  # pragma: no cover - quadpack failure modes vary
        raise ValueError(f"custom kernel integrability check failed: {exc}") from exc
    total = bulk + probes[-1]
    if not np.isfinite(total) or min(probes) < -1e-12 * (1.0 + abs(total)):
        raise ValueError("custom kernel is not absolutely integrable over the ball")
    inc1 = probes[1] - probes[0]
    inc2 = probes[2] - probes[1]
    floor = 1e-12 * (1.0 + abs(total))
    if inc2 > floor and inc2 > 0.7 * max(inc1, 0.0):
        raise ValueError(
            "custom kernel is not absolutely integrable over the ball "
            "(origin mass keeps growing as the cutoff shrinks)"
        )


# ---------------------------------------------------------------------------
# effective densities for the dipolar variants
# ---------------------------------------------------------------------------

def _derivative_wavenumbers(grid: FourierGrid) -> list[np.ndarray]:
    """Per-axis wavenumbers with the Nyquist mode zeroed (odd-degree safe)."""
    comps = []
    for axis in range(grid.d):
        k = grid.wavenumbers(axis).copy()
        k[grid.paddedN[axis] // 2] = 0.0
        shape = [1] * grid.d
        shape[axis] = k.size
        comps.append(k.reshape(shape))
    return comps


def _broadcast_wavenumbers(grid: FourierGrid) -> list[np.ndarray]:
    """Per-axis wavenumbers shaped for broadcasting, all modes included."""
    comps = []
    for axis in range(grid.d):
        k = grid.wavenumbers(axis)
        shape = [1] * grid.d
        shape[axis] = k.size
        comps.append(k.reshape(shape))
    return comps


def derivative_factor(kernel: KernelSpec, grid: FourierGrid) -> np.ndarray | None:
    """Polynomial-in-k factor composed with Uhat_G for derivative-type kernels.

    The dipolar potentials are a local multiple of the density plus a
    convolution whose spectral multiplier is Uhat_G times a quadratic in k;
    returning that quadratic here lets both execution paths fold it into a
    single multiplier, with no intermediate field and hence no extra
    restriction error.  The quadratics are even, so every mode (Nyquist
    included) carries its factor and the multiplier stays real-symmetric.
    Returns None for plain kernels.
    """
    if isinstance(kernel, DDI3D):
        ks = _broadcast_wavenumbers(grid)
        km = sum(mi * ki for mi, ki in zip(kernel.m, ks))
        kn = sum(ni * ki for ni, ki in zip(kernel.n, ks))
        # FT of -3 * d_n d_m rho carries (-3)(ik.m)(ik.n) = 3 (k.m)(k.n)
        return 3.0 * km * kn
    if isinstance(kernel, QuasiDDI2D):
        ks = _broadcast_wavenumbers(grid)
        n = np.asarray(kernel.n)
        kperp = n[0] * ks[0] + n[1] * ks[1]
        k2 = ks[0] ** 2 + ks[1] ** 2
        return 1.5 * (kperp * kperp - n[2] ** 2 * k2)
    return None


def local_scale(kernel: KernelSpec) -> float:
    """Coefficient of the pointwise density term in the potential (0 if none)."""
    if isinstance(kernel, DDI3D):
        return float(-np.dot(kernel.m, kernel.n))
    return 0.0
