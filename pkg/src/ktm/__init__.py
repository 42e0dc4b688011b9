"""Free-space convolution potentials on uniform grids via kernel truncation.

The library evaluates Phi = U * rho for nonlocal interaction kernels U
(Poisson, Coulomb, dipolar, quadrupolar) and compactly supported densities
rho sampled on uniform anisotropic boxes.  The kernel is truncated to the
box diameter, the density zero-padded by per-axis factors just large enough
to keep the circular convolution alias-free, and the product evaluated with
FFTs at spectral accuracy.  A precomputed discrete convolution tensor offers
an execution path whose per-solve cost is independent of the padding.

Typical use::

    from ktm import Poisson3D, DomainSpec, ScalarField, plan_ktm, apply_ktm

    domain = DomainSpec(L=8.0, gamma=(1, 1, 1), N=(64, 64, 64))
    plan = plan_ktm(Poisson3D(), domain)
    phi = apply_ktm(plan, rho)    # rho: ScalarField on the same domain
"""

from .analysis import (
    ERROR_FLOOR,
    ErrorReport,
    fit_convergence_order,
    relative_max_error,
    run_density_derivative,
    run_fixture,
    run_fixture_derivative,
)
from .fixtures import REGISTRY, FixtureCase, fixture_names, get_fixture
from .grid import (
    DomainSpec,
    FourierGrid,
    PaddingPlan,
    mesh_grids,
    mesh_points,
    optimal_padding_exact,
    practical_padding,
    truncation_radius,
)
from .gridio import (
    cache_dir,
    cached_plan_ktm,
    load_plan,
    plan_cache_key,
    read_grid,
    save_plan,
    write_grid,
)
from .kernels import (
    DDI3D,
    Coulomb2D,
    CustomRadial,
    KernelSpec,
    Poisson1D,
    Poisson2D,
    Poisson3D,
    Quadrupolar3D,
    QuasiDDI2D,
    TruncatedKernelFT,
    uhat_quadrature,
    uhat_truncated,
)
from .solver import (
    ConvolutionPlan,
    KTMPlan,
    apply_ktm,
    apply_tensor,
    direct_convolution_oracle,
    estimate_memory,
    plan_ktm,
    plan_tensor,
    solve_derivative,
)
from .spectral import ScalarField, spectral_derivative

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # grids and padding
    "DomainSpec", "PaddingPlan", "FourierGrid",
    "optimal_padding_exact", "practical_padding", "truncation_radius",
    "mesh_points", "mesh_grids",
    # kernels
    "KernelSpec", "Poisson1D", "Poisson2D", "Poisson3D", "Coulomb2D",
    "DDI3D", "QuasiDDI2D", "Quadrupolar3D", "CustomRadial",
    "TruncatedKernelFT", "uhat_truncated", "uhat_quadrature",
    # solver
    "KTMPlan", "ConvolutionPlan", "plan_ktm", "apply_ktm",
    "plan_tensor", "apply_tensor", "solve_derivative",
    "direct_convolution_oracle", "estimate_memory",
    # fields
    "ScalarField", "spectral_derivative",
    # fixtures and analysis
    "FixtureCase", "REGISTRY", "fixture_names", "get_fixture",
    "ErrorReport", "ERROR_FLOOR", "relative_max_error",
    "run_fixture", "run_fixture_derivative", "run_density_derivative",
    "fit_convergence_order",
    # persistence
    "write_grid", "read_grid", "cache_dir", "plan_cache_key",
    "save_plan", "load_plan", "cached_plan_ktm",
]
