"""Forward-Euler integration of the reduced dynamics and reconstruction of
finite element fields from reduced trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ConfigError
from .fe_core import FeFunction
from .galerkin import RomOperators
from .pod import PodBasis

_GRID_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RomTrajectory:
    """Reduced coefficients at the uniform grid k*dt, one column per step."""

    a: np.ndarray    # (r, n_steps + 1)
    dt: float

    @property
    def n_steps(self) -> int:
        return self.a.shape[1] - 1

    def times(self) -> np.ndarray:
        return np.arange(self.a.shape[1]) * self.dt

    def index_of(self, t: float) -> int:
        k = int(round(t / self.dt))
        if k < 0 or k > self.n_steps or abs(t - k * self.dt) > _GRID_TOL:
            raise ValueError(f"t={t} is not on the trajectory grid (dt={self.dt})")
        return k


def rom_rhs(ops: RomOperators, a: np.ndarray) -> np.ndarray:
    """Right-hand side b + A a + B : (a x a)."""
    a = np.asarray(a, dtype=float)
    if a.shape != (ops.r,):
        raise ValueError(f"expected state of length {ops.r}, got shape {a.shape}")
    return ops.b + ops.A @ a + ops.B.reshape(ops.r, -1) @ np.outer(a, a).ravel()


def integrate_forward_euler(
    ops: RomOperators, a0: np.ndarray, dt: float, t_end: float
) -> RomTrajectory:
    """Explicit Euler from a0 to t_end; aborts loudly on blow-up."""
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    n_steps = round(t_end / dt)
    if t_end < 0 or abs(t_end / dt - n_steps) > _GRID_TOL:
        raise ConfigError(f"t_end={t_end} is not an integer multiple of dt={dt}")

    a0 = np.asarray(a0, dtype=float)
    if a0.shape != (ops.r,):
        raise ValueError(f"expected initial state of length {ops.r}, got {a0.shape}")

    out = np.empty((ops.r, n_steps + 1))
    out[:, 0] = a0
    b, A, B2 = ops.b, ops.A, ops.B.reshape(ops.r, -1)
    a = a0.copy()
    quad = np.empty((ops.r, ops.r))
    # overflow is diagnosed through the finiteness check, not warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_steps + 1):
            np.multiply(a[:, None], a[None, :], out=quad)
            a = a + dt * (b + A @ a + B2 @ quad.ravel())
            if not np.all(np.isfinite(a)):
                raise BlowUpError(f"non-finite ROM state at step {k}", step=k)
            out[:, k] = a
    return RomTrajectory(a=out, dt=dt)


def reconstruct(traj: RomTrajectory, basis: PodBasis, at_times) -> list[FeFunction]:
    """Finite element fields sum_j a_j(t) phi_j at the requested grid times."""
    r = traj.a.shape[0]
    if r > basis.d:
        raise ValueError(f"trajectory rank {r} exceeds basis size {basis.d}")
    phi = basis.mode_matrix[:, :r]
    fields = []
    for t in np.atleast_1d(np.asarray(at_times, dtype=float)):
        k = traj.index_of(float(t))
        fields.append(FeFunction(basis.mesh, phi @ traj.a[:, k]))
    return fields
