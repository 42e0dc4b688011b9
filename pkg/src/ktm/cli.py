"""Command-line driver: solve, table, convergence, and bench workflows.

Subcommands
-----------
solve
    Evaluate one potential (named fixture or density grid file in, grid file
    plus JSON report out).
table
    Error sweeps as CSV: padding factors down and mesh sizes across for one
    fixture, or anisotropy down for a fixture family.
convergence
    Mesh-refinement error curves and fitted orders for the nonsmooth density
    families, as CSV.
bench
    Plan/apply timing and memory estimates against anisotropy, as CSV.

Every subcommand accepts ``--config FILE`` naming an INI file whose section
matches the subcommand; command-line flags override config values.  CSV
output is deterministic for a fixed configuration (timing columns aside).
"""

from __future__ import annotations

import argparse
import configparser
import json
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .analysis import (
    fit_convergence_order,
    relative_max_error,
    run_density_derivative,
    run_fixture_derivative,
)
from .fixtures import get_fixture
from .grid import DomainSpec, mesh_grids
from .gridio import cached_plan_ktm, read_grid, write_grid
from .kernels import (
    DDI3D,
    Coulomb2D,
    KernelSpec,
    Poisson1D,
    Poisson2D,
    Poisson3D,
    Quadrupolar3D,
    QuasiDDI2D,
)
from .solver import (
    apply_ktm,
    apply_tensor,
    estimate_memory,
    plan_ktm,
    plan_tensor,
)
from .spectral import ScalarField

__all__ = ["main"]


class CLIError(Exception):
    """User-facing failure with an exit code."""

    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# option plumbing: one table per command drives both argparse and config files
# ---------------------------------------------------------------------------


def _conv_str(text: str) -> str:
    return text


def _conv_float(text: str) -> float:
    return float(text)


def _conv_int(text: str) -> int:
    return int(text)


def _conv_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _conv_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _conv_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class _Opt:
    name: str  # dest / config key
    conv: Callable | None  # None marks a boolean flag
    default: object
    help: str

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


_COMMON = [
    _Opt("config", _conv_str, None, "INI file; the section named after the subcommand supplies defaults"),
]

_OPTIONS: dict[str, list[_Opt]] = {
    "solve": _COMMON + [
        _Opt("fixture", _conv_str, None, "named test case (density, kernel, and exact solution)"),
        _Opt("input", _conv_str, None, "density grid file (alternative to --fixture)"),
        _Opt("kernel", _conv_str, None,
             "kernel tag for --input mode: poisson1d|poisson2d|poisson3d|coulomb2d|quadrupolar3d|ddi3d|quasiddi2d"),
        _Opt("eps", _conv_float, None, "layer thickness for the quasiddi2d kernel"),
        _Opt("orient_m", _conv_floats, None, "first dipole orientation (comma floats, ddi3d)"),
        _Opt("orient_n", _conv_floats, None, "second dipole orientation (comma floats, ddi3d/quasiddi2d)"),
        _Opt("N", _conv_int, None, "points per axis (fixture mode)"),
        _Opt("h", _conv_float, None, "axis-0 mesh size (fixture mode, alternative to --N)"),
        _Opt("S", _conv_str, "auto", "padding factors: 'auto', a scalar, or comma-separated per-axis values"),
        _Opt("tensor", None, False, "use the precomputed-tensor execution path"),
        _Opt("output", _conv_str, None, "potential grid file (default <fixture>-phi.ktmg)"),
        _Opt("report", _conv_str, None, "also write the JSON report to this path"),
        _Opt("cache_dir", _conv_str, None, "plan cache directory (default $KTM_CACHE_DIR or ~/.cache/ktm)"),
        _Opt("no_cache", None, False, "bypass the plan cache"),
    ],
    "table": _COMMON + [
        _Opt("fixture", _conv_str, None, "fixture for a padding-sweep table (rows = S values)"),
        _Opt("family", _conv_str, None, "fixture family for an anisotropy-sweep table (rows = gamma values)"),
        _Opt("gammas", _conv_floats, None, "anisotropy values (family mode)"),
        _Opt("S", _conv_str, "auto",
             "rows for fixture mode (comma scalars); per-row factors for family mode "
             "(semicolon-separated rows of comma-separated per-axis values, or 'auto')"),
        _Opt("h", _conv_floats, None, "axis-0 mesh sizes, one column each"),
        _Opt("tensor", None, False, "use the precomputed-tensor execution path"),
        _Opt("out", _conv_str, None, "CSV path (default stdout)"),
    ],
    "convergence": _COMMON + [
        _Opt("family", _conv_str, "coulomb2d-bump",
             "density family: poisson1d-bump|poisson2d-bump|poisson3d-bump|coulomb2d-bump"),
        _Opt("m", _conv_ints, [2, 3, 4], "smoothness exponents"),
        _Opt("N", _conv_ints, [16, 32, 64, 128], "points per axis, one error row each"),
        _Opt("shifted", None, False, "use the off-center variants"),
        _Opt("out", _conv_str, None, "CSV path (default stdout)"),
    ],
    "bench": _COMMON + [
        _Opt("gammas", _conv_floats, [1.0, 0.5, 0.25, 0.125], "axis-2 anisotropy values, one row each"),
        _Opt("N", _conv_int, 32, "points per axis"),
        _Opt("L", _conv_float, 12.0, "axis-0 half-width"),
        _Opt("repeats", _conv_int, 3, "apply-phase repetitions (median reported, minimum 3)"),
        _Opt("tensor", None, False, "benchmark the precomputed-tensor path"),
        _Opt("out", _conv_str, None, "CSV path (default stdout)"),
        _Opt("cache_dir", _conv_str, None, "plan cache directory (default $KTM_CACHE_DIR or ~/.cache/ktm)"),
        _Opt("no_cache", None, False, "bypass the plan cache"),
    ],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ktm",
        description="Free-space convolution potentials on uniform grids via kernel truncation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, opts in _OPTIONS.items():
        p = sub.add_parser(command, help=f"{command} workflow")
        for opt in opts:
            if opt.conv is None:
                p.add_argument(opt.flag, dest=opt.name, action="store_true",
                               default=argparse.SUPPRESS, help=opt.help)
            else:
                p.add_argument(opt.flag, dest=opt.name, type=opt.conv,
                               default=argparse.SUPPRESS, metavar="V", help=opt.help)
    return parser


def _load_config_section(path: str, command: str, opts: list[_Opt]) -> dict:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # option names are case-sensitive (N, L, S, ...)
    read = parser.read(path)
    if not read:
        raise CLIError(f"config file not found: {path}")
    if not parser.has_section(command):
        return {}
    known = {o.name: o for o in opts}
    out: dict = {}
    for key, raw in parser.items(command):
        name = key.replace("-", "_")
        if name not in known:
            raise CLIError(f"unknown config key [{command}] {key}")
        opt = known[name]
        try:
            out[name] = _conv_bool(raw) if opt.conv is None else opt.conv(raw)
        except ValueError as exc:
            raise CLIError(f"bad config value [{command}] {key} = {raw!r}: {exc}")
    return out


def _merge_config(namespace: argparse.Namespace) -> dict:
    """defaults <- config file <- explicit flags (flags win)."""
    command = namespace.command
    opts = _OPTIONS[command]
    merged = {o.name: o.default for o in opts}
    given = {k: v for k, v in vars(namespace).items() if k != "command"}
    config_path = given.get("config", merged.get("config"))
    if config_path:
        merged.update(_load_config_section(config_path, command, opts))
    merged.update(given)
    merged["command"] = command
    return merged


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

_KERNEL_TAGS = {
    "poisson1d": Poisson1D,
    "poisson2d": Poisson2D,
    "poisson3d": Poisson3D,
    "coulomb2d": Coulomb2D,
    "quadrupolar3d": Quadrupolar3D,
}


def _build_kernel(cfg: dict) -> KernelSpec:
    tag = cfg.get("kernel")
    if not tag:
        raise CLIError("--kernel is required when solving from an input grid")
    if tag in _KERNEL_TAGS:
        return _KERNEL_TAGS[tag]()
    if tag == "ddi3d":
        if not cfg.get("orient_m") or not cfg.get("orient_n"):
            raise CLIError("ddi3d requires --orient-m and --orient-n")
        return DDI3D(m=_unit(cfg["orient_m"]), n=_unit(cfg["orient_n"]))
    if tag == "quasiddi2d":
        if cfg.get("eps") is None or not cfg.get("orient_n"):
            raise CLIError("quasiddi2d requires --eps and --orient-n")
        return QuasiDDI2D(eps=cfg["eps"], n=_unit(cfg["orient_n"]))
    raise CLIError(f"unknown kernel tag {tag!r} (known: {', '.join(sorted(_KERNEL_TAGS) + ['ddi3d', 'quasiddi2d'])})")


def _unit(vec: list[float]) -> tuple[float, ...]:
    arr = np.asarray(vec, dtype=float)
    norm = float(np.linalg.norm(arr))
    if norm == 0:
        raise CLIError("orientation vector must be nonzero")
    return tuple(arr / norm)


def _parse_S_single(text: str | None):
    """'auto' -> None, scalar -> float, comma list -> per-axis tuple."""
    if text is None or text.strip().lower() == "auto":
        return None
    parts = [float(tok) for tok in text.split(",") if tok.strip()]
    if not parts:
        raise CLIError(f"empty padding specification {text!r}")
    return parts[0] if len(parts) == 1 else tuple(parts)


def _parse_S_rows(text: str | None, nrows: int):
    """Per-row padding for family tables; see the --S help text."""
    if text is None or text.strip().lower() == "auto":
        return [None] * nrows
    if ";" in text:
        rows = [_parse_S_single(tok) for tok in text.split(";") if tok.strip()]
        if len(rows) != nrows:
            raise CLIError(f"--S lists {len(rows)} rows but the sweep has {nrows}")
        return rows
    return [_parse_S_single(text)] * nrows


def _fixture_or_fail(name: str):
    try:
        return get_fixture(name)
    except ValueError as exc:
        raise CLIError(str(exc))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt_sci(x: float) -> str:
    return f"{x:.6E}"


def _fmt_g(x: float) -> str:
    return f"{x:g}"


def _fmt_S(S: tuple[float, ...]) -> str:
    return "x".join(_fmt_g(s) for s in S)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def cmd_solve(cfg: dict) -> int:
    tensor = cfg["tensor"]
    S = _parse_S_single(cfg["S"])
    fixture_name = cfg.get("fixture")

    if fixture_name:
        case = _fixture_or_fail(fixture_name)
        kernel = case.kernel
        if cfg.get("N") is not None:
            domain = case.domain(cfg["N"])
        elif cfg.get("h") is not None:
            domain = case.domain_for_h(cfg["h"])
        else:
            raise CLIError("fixture mode requires --N or --h")
        rho = case.density_field(domain)
    else:
        input_path = cfg.get("input")
        if not input_path:
            raise CLIError("solve requires --fixture or --input")
        if not Path(input_path).exists():
            raise CLIError(f"input grid file not found: {input_path}")
        rho = read_grid(input_path)
        domain = rho.domain
        kernel = _build_kernel(cfg)
        case = None

    t0 = time.perf_counter()
    if tensor:
        plan = plan_tensor(kernel, domain, S)
        padding = plan.padding
        plan_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        phi = apply_tensor(plan, rho)
    else:
        if cfg.get("no_cache"):
            plan = plan_ktm(kernel, domain, S)
        else:
            plan, _ = cached_plan_ktm(kernel, domain, S, cfg.get("cache_dir"))
        padding = plan.padding
        plan_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        phi = apply_ktm(plan, rho)
    apply_seconds = time.perf_counter() - t0

    output = cfg.get("output") or f"{fixture_name or Path(cfg['input']).stem}-phi.ktmg"
    write_grid(output, phi)

    mode = "tensor-execute" if tensor else "plain"
    report = {
        "command": "solve",
        "kernel": kernel.tag,
        "fixture": fixture_name,
        "N": list(domain.N),
        "h": list(domain.h),
        "S": list(padding.S),
        "padded_N": list(padding.paddedN),
        "G": padding.G,
        "tensor": tensor,
        "est_memory_bytes": estimate_memory(domain, padding.S, mode),
        "output": str(output),
        "plan_seconds": plan_seconds,
        "apply_seconds": apply_seconds,
    }
    if case is not None:
        report["rel_max_error"] = relative_max_error(phi.values, case.exact_values(domain))
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.get("report"):
        Path(cfg["report"]).write_text(text)
    sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def _table_cell(case, h: float, S, tensor: bool) -> float:
    domain = case.domain_for_h(h)
    rho = case.density_field(domain)
    if tensor:
        plan = plan_tensor(case.kernel, domain, S)
        phi = apply_tensor(plan, rho)
    else:
        plan = plan_ktm(case.kernel, domain, S)
        phi = apply_ktm(plan, rho)
    return relative_max_error(phi.values, case.exact_values(domain))


def cmd_table(cfg: dict) -> int:
    hs = cfg.get("h")
    if not hs:
        raise CLIError("table requires --h (comma-separated mesh sizes)")
    tensor = cfg["tensor"]
    fixture_name = cfg.get("fixture")
    family = cfg.get("family")
    if bool(fixture_name) == bool(family):
        raise CLIError("table requires exactly one of --fixture or --family")

    lines = []
    if fixture_name:
        case = _fixture_or_fail(fixture_name)
        S_text = cfg["S"]
        if S_text is None or S_text.strip().lower() == "auto":
            raise CLIError("fixture tables require an explicit --S row list")
        S_rows = [float(tok) for tok in S_text.split(",") if tok.strip()]
        if not S_rows:
            raise CLIError(f"empty --S list {cfg['S']!r}")
        lines.append("S," + ",".join(f"h={_fmt_g(h)}" for h in hs))
        for S in S_rows:
            cells = [_fmt_sci(_table_cell(case, h, S, tensor)) for h in hs]
            lines.append(_fmt_g(S) + "," + ",".join(cells))
    else:
        gammas = cfg.get("gammas")
        if not gammas:
            raise CLIError("family tables require --gammas")
        S_rows = _parse_S_rows(cfg["S"], len(gammas))
        lines.append("gamma,S," + ",".join(f"h={_fmt_g(h)}" for h in hs))
        for g, S in zip(gammas, S_rows):
            case = _fixture_or_fail(f"{family}-g{_fmt_g(g)}")
            row = [_fmt_g(g)]
            resolved = None
            cells = []
            for h in hs:
                domain = case.domain_for_h(h)
                rho = case.density_field(domain)
                if tensor:
                    plan = plan_tensor(case.kernel, domain, S)
                    phi = apply_tensor(plan, rho)
                else:
                    plan = plan_ktm(case.kernel, domain, S)
                    phi = apply_ktm(plan, rho)
                resolved = plan.padding.S
                cells.append(_fmt_sci(relative_max_error(phi.values, case.exact_values(domain))))
            row.append(_fmt_S(resolved))
            lines.append(",".join(row + cells))

    _emit("\n".join(lines) + "\n", cfg.get("out"))
    return 0


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

_FAMILY_MS = {
    "poisson1d-bump": (1, 2, 3, 4, 5),
    "poisson2d-bump": (1, 2, 3, 4, 5),
    "poisson3d-bump": (1, 2, 3, 4, 5),
    "coulomb2d-bump": (2, 3, 4),
}


def cmd_convergence(cfg: dict) -> int:
    family = cfg["family"]
    if family not in _FAMILY_MS:
        raise CLIError(f"unknown family {family!r} (known: {', '.join(sorted(_FAMILY_MS))})")
    ms = cfg["m"]
    Ns = cfg["N"]
    if not ms or not Ns:
        raise CLIError("convergence requires non-empty --m and --N lists")
    bad = [m for m in ms if m not in _FAMILY_MS[family]]
    if bad:
        raise CLIError(f"family {family} has no m = {bad[0]} case")
    suffix = "-shifted" if cfg["shifted"] else ""

    lines = ["quantity,m,N,error,fitted_order"]
    for quantity in ("drho", "dphi"):
        for m in ms:
            case = _fixture_or_fail(f"{family}-m{m}{suffix}")
            errors = []
            for N in Ns:
                if quantity == "drho":
                    report = run_density_derivative(case, N)
                else:
                    report = run_fixture_derivative(case, N)
                errors.append(report.rel_max_error)
            order = fit_convergence_order(Ns, errors)
            for N, err in zip(Ns, errors):
                lines.append(f"{quantity},{m},{N},{_fmt_sci(err)},{order:.4f}")

    _emit("\n".join(lines) + "\n", cfg.get("out"))
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def cmd_bench(cfg: dict) -> int:
    gammas = cfg["gammas"]
    if not gammas:
        raise CLIError("bench requires a non-empty --gammas list")
    N = cfg["N"]
    L = cfg["L"]
    tensor = cfg["tensor"]
    repeats = max(3, cfg["repeats"])
    sigma = L / 6.0

    lines = ["gamma_f,S,plan_time,apply_time,est_memory"]
    for g in gammas:
        domain = DomainSpec(L=L, gamma=(1.0, 1.0, float(g)), N=(N, N, N))
        grids = mesh_grids(domain)
        r2 = sum(x * x for x in grids)
        rho = ScalarField(domain=domain, values=np.exp(-r2 / sigma**2))

        t0 = time.perf_counter()
        if tensor:
            plan = plan_tensor(Poisson3D(), domain)
            padding = plan.padding
        else:
            if cfg.get("no_cache"):
                plan = plan_ktm(Poisson3D(), domain)
            else:
                plan, _ = cached_plan_ktm(Poisson3D(), domain, None, cfg.get("cache_dir"))
            padding = plan.padding
        plan_time = time.perf_counter() - t0

        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            if tensor:
                apply_tensor(plan, rho)
            else:
                apply_ktm(plan, rho)
            times.append(time.perf_counter() - t0)
        apply_time = statistics.median(times)

        mode = "tensor-execute" if tensor else "plain"
        mem = estimate_memory(domain, padding.S, mode)
        gamma_f = domain.anisotropy_strength()
        lines.append(
            f"{_fmt_g(gamma_f)},{_fmt_S(padding.S)},{plan_time:.6f},{apply_time:.6f},{mem}"
        )

    _emit("\n".join(lines) + "\n", cfg.get("out"))
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "solve": cmd_solve,
    "table": cmd_table,
    "convergence": cmd_convergence,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    try:
        cfg = _merge_config(namespace)
        return _COMMANDS[cfg["command"]](cfg)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
