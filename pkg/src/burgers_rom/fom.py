"""Full-order model: backward-Euler/Newton finite element solver for the
viscous Burgers equation u_t - nu u_xx + u u_x = 0 on [0, 1] with
homogeneous Dirichlet boundary conditions.

The initial condition is the exact L2 projection of a step profile (height
on (0, jump], zero after) onto the interior hat space. Snapshots of the
trajectory are collected every ``snapshot_stride`` steps, the initial state
included.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import recordio
from .errors import ConfigError, DivergenceError, NewtonError
from .fe_core import (
    FeFunction,
    Mesh1D,
    TriDiagMatrix,
    assemble_mass,
    assemble_stiffness,
    build_mesh,
    convection_form,
    nonlinear_jacobian,
)


@dataclass(frozen=True)
class FomConfig:
    nu: float = 1e-3
    dt: float = 1e-3
    t_end: float = 1.0
    n_elements: int = 1024
    snapshot_stride: int = 10
    newton_tol: float = 1e-12
    newton_max_iter: int = 25

    def __post_init__(self):
        if self.nu <= 0:
            raise ConfigError(f"nu must be positive, got {self.nu}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ConfigError(
                f"snapshot_stride must be >= 1, got {self.snapshot_stride}"
            )
        if self.newton_max_iter < 1:
            raise ConfigError("newton_max_iter must be >= 1")


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    """Stored solver states with their time stamps, all on one mesh."""

    snapshots: list[FeFunction]
    times: np.ndarray
    mesh: Mesh1D

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        if len(self.snapshots) != self.times.size:
            raise ValueError("snapshot/time count mismatch")
        if self.times.size and (self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must start at 0 and increase strictly")

    def __len__(self) -> int:
        return len(self.snapshots)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Interior nodal values, one snapshot per column."""
        return np.column_stack([u.coeffs for u in self.snapshots])


def project_initial_condition(
    mesh: Mesh1D, height: float = 1.0, jump_at: float = 0.5
) -> FeFunction:
    """L2 projection of the step profile onto the interior hat space.

    The right-hand side integrals are evaluated exactly, splitting the
    element that contains the jump.
    """
    h = mesh.h
    edges = np.arange(mesh.n_elements) * h
    # covered fraction of each element, measured from its left edge
    z = np.clip((jump_at - edges) / h, 0.0, 1.0)
    rhs_full = np.zeros(mesh.n_elements + 1)
    rhs_full[:-1] += height * h * (z - 0.5 * z**2)
    rhs_full[1:] += height * h * (0.5 * z**2)
    mass = assemble_mass(mesh)
    return FeFunction(mesh, mass.solve(rhs_full[1:-1]))


def _newton_solve(
    u_old: np.ndarray,
    cfg: FomConfig,
    mass: TriDiagMatrix,
    stiffness: TriDiagMatrix,
    mesh: Mesh1D,
) -> np.ndarray:
    """One implicit step: find v with M(v - u_old)/dt + nu K v + N(v) = 0."""
    dt = cfg.dt
    scale = max(1.0, float(np.linalg.norm(u_old)))
    v = u_old.copy()
    for iteration in range(cfg.newton_max_iter + 1):
        residual = (
            mass.matvec(v - u_old) / dt
            + cfg.nu * stiffness.matvec(v)
            + convection_form(v, mesh.h)
        )
        if not np.all(np.isfinite(residual)):
            raise DivergenceError("non-finite residual in Newton iteration")
        res_norm = float(np.linalg.norm(residual))
        if res_norm <= cfg.newton_tol * scale:
            return v
        if iteration == cfg.newton_max_iter:
            break
        jac_n = nonlinear_jacobian(FeFunction(mesh, v))
        jac = TriDiagMatrix(
            sub=mass.sub / dt + cfg.nu * stiffness.sub + jac_n.sub,
            diag=mass.diag / dt + cfg.nu * stiffness.diag + jac_n.diag,
            sup=mass.sup / dt + cfg.nu * stiffness.sup + jac_n.sup,
        )
        v = v - jac.solve(residual)
        if not np.all(np.isfinite(v)):
            raise DivergenceError("non-finite state in Newton iteration")
    raise NewtonError(
        f"Newton stalled at residual {res_norm:.3e} "
        f"after {cfg.newton_max_iter} iterations",
        residual=res_norm,
    )


def step_backward_euler(
    u_old: FeFunction,
    cfg: FomConfig,
    mass: TriDiagMatrix | None = None,
    stiffness: TriDiagMatrix | None = None,
) -> FeFunction:
    """Advance one backward-Euler step with a Newton solve.

    The mass and stiffness matrices may be passed in to avoid reassembly
    inside time loops.
    """
    mesh = u_old.mesh
    if mass is None:
        mass = assemble_mass(mesh)
    if stiffness is None:
        stiffness = assemble_stiffness(mesh)
    return FeFunction(mesh, _newton_solve(u_old.coeffs, cfg, mass, stiffness, mesh))


def _step_count(t_end: float, dt: float) -> int:
    steps = round(t_end / dt)
    if abs(t_end / dt - steps) > 1e-9:
        raise ConfigError(f"t_end={t_end} is not an integer multiple of dt={dt}")
    return steps


def run_fom(cfg: FomConfig) -> SnapshotSet:
    """Integrate from the projected initial condition to t_end, storing every
    snapshot_stride-th state (the initial state included)."""
    mesh = build_mesh(cfg.n_elements)
    mass = assemble_mass(mesh)
    stiffness = assemble_stiffness(mesh)
    n_steps = _step_count(cfg.t_end, cfg.dt)

    u = project_initial_condition(mesh)
    snapshots = [u]
    times = [0.0]
    for k in range(1, n_steps + 1):
        try:
            u = step_backward_euler(u, cfg, mass, stiffness)
        except NewtonError as exc:
            raise NewtonError(
                f"step to t={k * cfg.dt:.6g} failed: {exc}",
                residual=exc.residual,
                time=k * cfg.dt,
            ) from exc
        except DivergenceError as exc:
            raise DivergenceError(f"step to t={k * cfg.dt:.6g} failed: {exc}") from exc
        if k % cfg.snapshot_stride == 0:
            snapshots.append(u)
            times.append(k * cfg.dt)
    return SnapshotSet(snapshots, np.array(times), mesh)


def write_snapshots(snaps: SnapshotSet, cfg: FomConfig, base: str) -> None:
    """Store a snapshot set as a text header plus float64 records, one record
    of interior nodal values per snapshot."""
    recordio.write_header(
        base,
        {
            "n_elements": cfg.n_elements,
            "nu": repr(cfg.nu),
            "dt": repr(cfg.dt),
            "t_end": repr(cfg.t_end),
            "snapshot_stride": cfg.snapshot_stride,
            "count": len(snaps),
        },
    )
    recordio.write_floats(base, snaps.matrix.T)


def read_snapshots(base: str) -> tuple[SnapshotSet, FomConfig]:
    header = recordio.read_header(base)
    try:
        cfg = FomConfig(
            nu=float(header["nu"]),
            dt=float(header["dt"]),
            t_end=float(header["t_end"]),
            n_elements=int(header["n_elements"]),
            snapshot_stride=int(header["snapshot_stride"]),
        )
        count = int(header["count"])
    except KeyError as exc:
        raise ConfigError(f"{recordio.header_path(base)}: missing field {exc}") from exc
    mesh = build_mesh(cfg.n_elements)
    records = recordio.read_floats(base, count * mesh.n_interior)
    records = records.reshape(count, mesh.n_interior)
    times = (np.arange(count) * cfg.snapshot_stride) * cfg.dt
    snapshots = [FeFunction(mesh, row) for row in records]
    return SnapshotSet(snapshots, times, mesh), cfg
