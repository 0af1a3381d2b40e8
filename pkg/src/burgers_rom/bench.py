"""Benchmark driver: full pipeline from configuration to a CSV report.

The pipeline runs (or loads from cache) the full-order solve, extracts the
POD basis, and for every requested rank r integrates the plain Galerkin
model plus one calibrated model per truncation-rank policy, recording the
time-averaged L2 error against the stored snapshots together with offline
(calibration) and online (integration) wall-clock seconds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import recordio
from .closure import (
    assemble_normal_matrices,
    build_cfrom,
    compute_gsnap,
    solve_calibration,
    solve_calibration_quadratic,
)
from .errors import ConfigError, NumericsError
from .fe_core import TriDiagMatrix, assemble_mass
from .fom import FomConfig, SnapshotSet, read_snapshots, run_fom, write_snapshots
from .galerkin import assemble_rom_operators, snapshot_coefficients
from .integrate import RomTrajectory, integrate_forward_euler, reconstruct
from .pod import PodBasis, compute_pod

REPORT_FORMAT_VERSION = 1
REPORT_HEADER = "method,r,m_tag,error,offline_s,online_s"

M_POLICY_TAGS = ("r", "r+1", "2r", "3r", "d")


@dataclass(frozen=True)
class BenchConfig:
    fom: FomConfig = field(default_factory=FomConfig)
    r_list: tuple[int, ...] = (6, 10, 15)
    m_policies: tuple[str, ...] = M_POLICY_TAGS
    ansatz: str = "linear"
    closure_sign: int = -1
    rom_dt: float = 1e-4
    rank_cutoff: float = 1e-12
    reg: float = 0.0
    cond_limit: float = 1e12
    output_path: str = "report.csv"
    cache_dir: str | None = None

    def __post_init__(self):
        if self.rom_dt <= 0:
            raise ConfigError(f"rom_dt must be positive, got {self.rom_dt}")
        if self.ansatz not in ("linear", "quadratic"):
            raise ConfigError(f"ansatz must be linear or quadratic, got {self.ansatz!r}")
        if self.closure_sign not in (-1, 1):
            raise ConfigError(f"closure_sign must be -1 or +1, got {self.closure_sign}")
        if any(r < 1 for r in self.r_list):
            raise ConfigError(f"ranks must be >= 1, got {self.r_list}")
        for tag in self.m_policies:
            if tag not in M_POLICY_TAGS:
                raise ConfigError(
                    f"unknown m policy {tag!r}; choose from {', '.join(M_POLICY_TAGS)}"
                )


@dataclass(frozen=True)
class BenchRow:
    method: str
    r: int
    m_tag: str
    error: float
    offline_s: float
    online_s: float


@dataclass(frozen=True)
class BenchReport:
    rows: list[BenchRow]
    format_version: int = REPORT_FORMAT_VERSION

    def body_lines(self) -> list[str]:
        return [
            f"{row.method},{row.r},{row.m_tag},{row.error:.17g},"
            f"{row.offline_s:.17g},{row.online_s:.17g}"
            for row in self.rows
        ]

    def to_csv(self) -> str:
        return "\n".join([REPORT_HEADER] + self.body_lines()) + "\n"

    def write(self, path: str) -> None:
        Path(path).write_text(self.to_csv())


def resolve_m(tag: str, r: int, d: int) -> int:
    """Truncation rank for a symbolic policy tag, capped at the basis size."""
    values = {"r": r, "r+1": r + 1, "2r": 2 * r, "3r": 3 * r, "d": d}
    if tag not in values:
        raise ConfigError(f"unknown m policy {tag!r}")
    return min(values[tag], d)


_CONFIG_KEYS = {
    "nu": float,
    "dt": float,
    "t_end": float,
    "n_elements": int,
    "snapshot_stride": int,
    "newton_tol": float,
    "newton_max_iter": int,
    "r_list": "int_list",
    "m_policies": "str_list",
    "ansatz": str,
    "closure_sign": int,
    "rom_dt": float,
    "rank_cutoff": float,
    "reg": float,
    "cond_limit": float,
    "output_path": str,
    "cache_dir": str,
}

_FOM_KEYS = {f.name for f in fields(FomConfig)}


def parse_config(path: str) -> BenchConfig:
    """Read a ``key = value`` configuration file. Lines starting with (or
    trailing after) ``#`` are comments; lists are comma separated."""
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value

    fom_kwargs = {}
    bench_kwargs = {}
    for key, value in raw.items():
        kind = _CONFIG_KEYS[key]
        try:
            if kind == "int_list":
                parsed = tuple(int(v) for v in value.split(","))
            elif kind == "str_list":
                parsed = tuple(v.strip() for v in value.split(","))
            else:
                parsed = kind(value)
        except ValueError as exc:
            raise ConfigError(f"{path}: bad value for {key}: {value!r}") from exc
        if key in _FOM_KEYS:
            fom_kwargs[key] = parsed
        else:
            bench_kwargs[key] = parsed
    return BenchConfig(fom=FomConfig(**fom_kwargs), **bench_kwargs)


def rom_error(
    traj: RomTrajectory,
    snaps: SnapshotSet,
    basis: PodBasis,
    mass: TriDiagMatrix,
) -> float:
    """Spatial L2 error against the snapshots, averaged over snapshot times."""
    fields_at = reconstruct(traj, basis, snaps.times)
    total = 0.0
    for field_j, snap_j in zip(fields_at, snaps.snapshots):
        diff = field_j.coeffs - snap_j.coeffs
        total += float(np.sqrt(diff @ mass.matvec(diff)))
    return total / len(snaps)


def _cached_snapshots(cfg: BenchConfig) -> SnapshotSet:
    if cfg.cache_dir is None:
        return run_fom(cfg.fom)
    base = str(Path(cfg.cache_dir) / "snapshots")
    if recordio.exists(base):
        snaps, stored_cfg = read_snapshots(base)
        # the header carries no Newton settings; the cache is keyed on the
        # physical and discretization parameters it stores
        keyed = replace(
            stored_cfg,
            newton_tol=cfg.fom.newton_tol,
            newton_max_iter=cfg.fom.newton_max_iter,
        )
        if keyed == cfg.fom:
            return snaps
    Path(cfg.cache_dir).mkdir(parents=True, exist_ok=True)
    snaps = run_fom(cfg.fom)
    write_snapshots(snaps, cfg.fom, base)
    return snaps


def _calibrate(cfg: BenchConfig, coeffs, basis, r: int, m: int):
    """Algorithm steps: closure target, normal matrices, least-squares fit."""
    target = compute_gsnap(coeffs, basis, r, m)
    if cfg.ansatz == "linear":
        D, E = assemble_normal_matrices(coeffs.a[:r], target)
        return solve_calibration(
            D,
            E,
            reg=cfg.reg,
            cond_limit=cfg.cond_limit,
            sign=cfg.closure_sign,
            target_sq_norm=float(np.sum(target.g**2)),
        )
    return solve_calibration_quadratic(
        coeffs.a[:r], target, reg=cfg.reg, sign=cfg.closure_sign
    )


def run_pipeline(cfg: BenchConfig) -> BenchReport:
    """Snapshots (cached or fresh), POD, then one report row per
    (method, r, m) combination. The report is also written to
    ``cfg.output_path``."""
    snaps = _cached_snapshots(cfg)
    mass = assemble_mass(snaps.mesh)
    basis = compute_pod(snaps, mass, cfg.rank_cutoff)
    coeffs = snapshot_coefficients(snaps, basis, basis.d)

    rows: list[BenchRow] = []
    for r in cfg.r_list:
        if r > basis.d:
            raise ConfigError(f"r={r} exceeds the snapshot rank d={basis.d}")
        a0 = coeffs.a[:r, 0]

        tic = time.perf_counter()
        ops = assemble_rom_operators(basis, r, cfg.fom.nu)
        offline = time.perf_counter() - tic
        try:
            tic = time.perf_counter()
            traj = integrate_forward_euler(ops, a0, cfg.rom_dt, cfg.fom.t_end)
            online = time.perf_counter() - tic
        except NumericsError as exc:
            raise type(exc)(f"G-ROM r={r}: {exc}") from exc
        rows.append(
            BenchRow("G-ROM", r, "-", rom_error(traj, snaps, basis, mass), offline, online)
        )

        for tag in cfg.m_policies:
            m = resolve_m(tag, r, basis.d)
            try:
                tic = time.perf_counter()
                model = _calibrate(cfg, coeffs, basis, r, m)
                offline = time.perf_counter() - tic
                cf_ops = build_cfrom(ops, model)
                tic = time.perf_counter()
                traj = integrate_forward_euler(cf_ops, a0, cfg.rom_dt, cfg.fom.t_end)
                online = time.perf_counter() - tic
            except NumericsError as exc:
                raise type(exc)(f"CF-ROM r={r} m={tag}: {exc}") from exc
            rows.append(
                BenchRow(
                    "CF-ROM", r, tag, rom_error(traj, snaps, basis, mass), offline, online
                )
            )

    report = BenchReport(rows)
    report.write(cfg.output_path)
    return report
