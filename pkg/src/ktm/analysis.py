"""Error measurement, fixture runs, and convergence-order fitting."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .fixtures import FixtureCase
from .grid import practical_padding
from .solver import apply_ktm, apply_tensor, estimate_memory, plan_ktm, plan_tensor, solve_derivative
from .spectral import spectral_derivative

__all__ = [
    "ErrorReport",
    "relative_max_error",
    "run_fixture",
    "run_fixture_derivative",
    "run_density_derivative",
    "fit_convergence_order",
]

ERROR_FLOOR = 1e-13


@dataclass(frozen=True)
class ErrorReport:
    """Outcome of solving one fixture on one grid."""

    rel_max_error: float
    N: tuple[int, ...]
    h: tuple[float, ...]
    S: tuple[float, ...]
    kernel: str
    fixture: str
    wall_time: float
    est_memory: int


def relative_max_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """max |approx - exact| / max |exact| (absolute error if exact is zero)."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if approx.shape != exact.shape:
        raise ValueError(f"shape mismatch {approx.shape} vs {exact.shape}")
    num = float(np.max(np.abs(approx - exact)))
    den = float(np.max(np.abs(exact)))
    return num / den if den > 0 else num


def run_fixture(case: FixtureCase, N: int, S=None, tensor: bool = False) -> ErrorReport:
    """Solve one fixture at N points per axis and report the relative error.

    ``wall_time`` covers planning plus one apply.
    """
    domain = case.domain(N)
    rho = case.density_field(domain)
    t0 = time.perf_counter()
    if tensor:
        plan = plan_tensor(case.kernel, domain, S)
        phi = apply_tensor(plan, rho)
    else:
        plan = plan_ktm(case.kernel, domain, S)
        phi = apply_ktm(plan, rho)
    elapsed = time.perf_counter() - t0
    err = relative_max_error(phi.values, case.exact_values(domain))
    mode = "tensor-execute" if tensor else "plain"
    return ErrorReport(
        rel_max_error=err,
        N=domain.N,
        h=domain.h,
        S=plan.padding.S,
        kernel=case.kernel.tag,
        fixture=case.name,
        wall_time=elapsed,
        est_memory=estimate_memory(domain, plan.padding.S, mode),
    )


def run_fixture_derivative(case: FixtureCase, N: int, S=None) -> ErrorReport:
    """Like run_fixture but for the x-derivative of the potential."""
    domain = case.domain(N)
    rho = case.density_field(domain)
    alpha = (1,) + (0,) * (case.d - 1)
    t0 = time.perf_counter()
    plan = plan_ktm(case.kernel, domain, S)
    dphi = solve_derivative(plan, rho, alpha)
    elapsed = time.perf_counter() - t0
    err = relative_max_error(dphi.values, case.exact_dx_values(domain))
    return ErrorReport(
        rel_max_error=err,
        N=domain.N,
        h=domain.h,
        S=plan.padding.S,
        kernel=case.kernel.tag,
        fixture=case.name,
        wall_time=elapsed,
        est_memory=estimate_memory(domain, plan.padding.S, "plain"),
    )


def run_density_derivative(case: FixtureCase, N: int) -> ErrorReport:
    """Error of the trigonometric x-derivative of the density itself.

    The density is differentiated on its own (unpadded) mesh; fixtures are
    compactly supported inside the box, so the periodic extension is the
    function itself and the error is purely the smoothness-limited
    truncation of the Fourier series.
    """
    domain = case.domain(N)
    rho = case.density_field(domain)
    alpha = (1,) + (0,) * (case.d - 1)
    unpadded = practical_padding(domain, override=(1.0,) * case.d)
    t0 = time.perf_counter()
    drho = spectral_derivative(rho, unpadded, alpha)
    elapsed = time.perf_counter() - t0
    err = relative_max_error(drho.values, case.density_dx_values(domain))
    return ErrorReport(
        rel_max_error=err,
        N=domain.N,
        h=domain.h,
        S=unpadded.S,
        kernel=case.kernel.tag,
        fixture=case.name,
        wall_time=elapsed,
        est_memory=estimate_memory(domain, unpadded.S, "plain"),
    )


def fit_convergence_order(Ns, errors, floor: float = ERROR_FLOOR) -> float:
    """Least-squares slope of log(error) against log(N), sign-flipped.

    Errors at or below ``floor`` (rounding plateau) are excluded; at least
    two surviving points are required.  The fit is scale-invariant in the
    errors.
    """
    Ns = np.asarray(list(Ns), dtype=float)
    errors = np.asarray(list(errors), dtype=float)
    if Ns.shape != errors.shape or Ns.size < 2:
        raise ValueError("need matching N/error sequences with at least two entries")
    keep = errors > floor
    if int(np.sum(keep)) < 2:
        raise ValueError("fewer than two errors above the rounding floor; cannot fit an order")
    slope = np.polyfit(np.log(Ns[keep]), np.log(errors[keep]), 1)[0]
    return float(-slope)
