"""Binary grid files and the on-disk plan cache.

Grid file layout (all little-endian):

    magic   4 bytes   b"KTMG"
    version u32       format version (currently 1)
    dim     u32       number of axes d (1, 2 or 3)
    counts  u32[d]    per-axis sample counts
    widths  f64[d]    per-axis half-widths of the box
    payload f64[...]  row-major (C-order) samples, prod(counts) values

Plans are cached as a grid file holding the sampled kernel transform plus a
JSON sidecar recording the kernel identity, domain, and padding.  The cache
key is a SHA-256 hash of that identity, so any change to the kernel, domain,
padding factors, truncation radius, or format version misses cleanly.  The
cache directory defaults to ``~/.cache/ktm`` and can be redirected with the
``KTM_CACHE_DIR`` environment variable.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

import numpy as np

from .grid import DomainSpec, FourierGrid
from .kernels import KernelSpec, TruncatedKernelFT
from .solver import KTMPlan, _as_padding, plan_ktm
from .spectral import ScalarField

__all__ = [
    "FORMAT_VERSION",
    "write_grid",
    "read_grid",
    "cache_dir",
    "plan_cache_key",
    "save_plan",
    "load_plan",
    "cached_plan_ktm",
]

MAGIC = b"KTMG"
FORMAT_VERSION = 1


def write_grid(path, counts_or_field, half_widths=None, values=None) -> Path:
    """Write samples on a uniform box to a binary grid file.

    Accepts either a ScalarField or the raw ``(counts, half_widths, values)``
    triple; the raw form exists so padded-grid data whose widest axis is not
    axis 0 can still be stored.
    """
    if isinstance(counts_or_field, ScalarField):
        field = counts_or_field
        counts = field.domain.N
        half_widths = field.domain.half_widths
        values = field.values
    else:
        counts = tuple(int(n) for n in counts_or_field)
        half_widths = tuple(float(w) for w in half_widths)
        values = np.asarray(values, dtype=float)
    d = len(counts)
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    if len(half_widths) != d:
        raise ValueError(f"{len(half_widths)} half-widths for {d} axes")
    if values.shape != counts:
        raise ValueError(f"values shape {values.shape} != counts {counts}")

    path = Path(path)
    header = MAGIC + struct.pack("<II", FORMAT_VERSION, d)
    header += struct.pack(f"<{d}I", *counts)
    header += struct.pack(f"<{d}d", *half_widths)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    os.replace(tmp, path)
    return path


def _read_header(f, path) -> tuple[tuple[int, ...], tuple[float, ...], int]:
    """Parse a grid file header; returns ``(counts, half_widths, offset)``
    where offset is the payload's byte position."""
    head = f.read(12)
    if len(head) < 12 or head[:4] != MAGIC:
        raise ValueError(f"{path} is not a grid file (bad magic)")
    version, d = struct.unpack("<II", head[4:])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    if d not in (1, 2, 3):
        raise ValueError(f"{path}: bad dimension {d}")
    counts = struct.unpack(f"<{d}I", f.read(4 * d))
    half_widths = struct.unpack(f"<{d}d", f.read(8 * d))
    return counts, half_widths, 12 + 4 * d + 8 * d


def read_grid_raw(path) -> tuple[tuple[int, ...], tuple[float, ...], np.ndarray]:
    """Read a grid file into ``(counts, half_widths, values)`` without
    interpreting the box (no axis-ordering constraints)."""
    path = Path(path)
    with open(path, "rb") as f:
        counts, half_widths, offset = _read_header(f, path)
        n_total = int(np.prod(counts))
        values = np.fromfile(f, dtype="<f8", count=n_total)
        trailing = f.read(1)
    if values.size != n_total or trailing:
        actual = 8 * values.size + len(trailing)
        raise ValueError(
            f"{path}: payload holds {actual}+ bytes, expected {8 * n_total}"
        )
    return counts, half_widths, values.astype(float, copy=False).reshape(counts)


def read_grid(path) -> ScalarField:
    """Read a grid file as a field on its domain (axis 0 must be widest)."""
    counts, half_widths, values = read_grid_raw(path)
    domain = DomainSpec.from_half_widths(half_widths, counts)
    return ScalarField(domain=domain, values=values)


def cache_dir() -> Path:
    """Plan cache directory: ``$KTM_CACHE_DIR`` or ``~/.cache/ktm``."""
    env = os.environ.get("KTM_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ktm"


def plan_cache_key(kernel: KernelSpec, domain: DomainSpec, S=None) -> str:
    """Content hash identifying one sampled kernel transform.

    Covers the kernel identity, the domain, the resolved padding factors and
    truncation radius, and the file format version.  Raises TypeError for
    kernels without a stable identity (custom callables).
    """
    padding = _as_padding(domain, S)
    ident = {
        "format": FORMAT_VERSION,
        "kernel": kernel.spec_key(),
        "L": domain.L,
        "gamma": list(domain.gamma),
        "N": list(domain.N),
        "S": list(padding.S),
        "G": padding.G,
    }
    blob = json.dumps(ident, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def save_plan(plan: KTMPlan, directory=None) -> Path:
    """Store a plan's sampled kernel transform for later reuse.

    Writes ``<key>.ktmg`` (the samples) and ``<key>.json`` (the identity)
    in the cache directory; returns the grid file path.
    """
    directory = Path(directory) if directory is not None else cache_dir()
    directory.mkdir(parents=True, exist_ok=True)
    key = plan_cache_key(plan.kernel, plan.domain, plan.padding.S)
    padded_hw = tuple(
        s * plan.domain.L * g for s, g in zip(plan.padding.S, plan.domain.gamma)
    )
    grid_path = directory / f"{key}.ktmg"
    write_grid(grid_path, plan.padding.paddedN, padded_hw, plan.uhat.values)
    sidecar = {
        "format": FORMAT_VERSION,
        "kernel": plan.kernel.spec_key(),
        "L": plan.domain.L,
        "gamma": list(plan.domain.gamma),
        "N": list(plan.domain.N),
        "S": list(plan.padding.S),
        "paddedN": list(plan.padding.paddedN),
        "G": plan.padding.G,
    }
    tmp = directory / f"{key}.json.tmp"
    tmp.write_text(json.dumps(sidecar, sort_keys=True, indent=1))
    os.replace(tmp, directory / f"{key}.json")
    return grid_path


def load_plan(kernel: KernelSpec, domain: DomainSpec, S=None, directory=None) -> KTMPlan | None:
    """Rebuild a cached plan, or return None on a cache miss.

    The multiplier payload is memory-mapped read-only rather than read
    eagerly, so a hit costs no bulk IO at plan time; pages stream in on
    first use.  Plan multipliers are never mutated after construction,
    which makes the read-only view safe to share.
    """
    directory = Path(directory) if directory is not None else cache_dir()
    try:
        key = plan_cache_key(kernel, domain, S)
    except TypeError:
        return None
    grid_path = directory / f"{key}.ktmg"
    if not grid_path.exists():
        return None
    padding = _as_padding(domain, S)
    with open(grid_path, "rb") as f:
        counts, _, offset = _read_header(f, grid_path)
    if counts != padding.paddedN:
        return None
    n_total = int(np.prod(counts))
    if grid_path.stat().st_size != offset + 8 * n_total:
        return None
    values = np.memmap(grid_path, dtype="<f8", mode="r", offset=offset, shape=counts)
    grid = FourierGrid.for_plan(domain, padding)
    uhat = TruncatedKernelFT(values=values, G=padding.G, kernel=kernel)
    return KTMPlan(kernel=kernel, domain=domain, padding=padding, grid=grid, uhat=uhat)


def cached_plan_ktm(kernel: KernelSpec, domain: DomainSpec, S=None, directory=None) -> tuple[KTMPlan, bool]:
    """Build a plan through the cache; returns ``(plan, hit)``.

    A cache hit skips sampling the kernel transform entirely.  Kernels
    without a stable identity bypass the cache (always a miss, not stored).
    """
    plan = load_plan(kernel, domain, S, directory)
    if plan is not None:
        return plan, True
    plan = plan_ktm(kernel, domain, S)
    try:
        save_plan(plan, directory)
    except TypeError:
        pass
    return plan, False
