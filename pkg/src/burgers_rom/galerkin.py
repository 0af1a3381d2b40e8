"""Galerkin ROM operators for Burgers, snapshot coefficients, and the
ROM-projection spatial filter.

The reduced dynamics are da_i/dt = b_i + sum_m A_im a_m + sum_mn B_imn a_m a_n
with A the (negated, viscosity-scaled) stiffness of the modes, B the
convective triple products, and b = 0 for the homogeneous Dirichlet problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fe_core import FeFunction, assemble_stiffness, pad_boundary
from .fom import SnapshotSet
from .pod import PodBasis


@dataclass(frozen=True, eq=False)
class RomOperators:
    """Constant, linear, and quadratic terms of the reduced dynamics."""

    r: int
    b: np.ndarray    # (r,)
    A: np.ndarray    # (r, r)
    B: np.ndarray    # (r, r, r), indexed [i, m, n]
    nu: float


@dataclass(frozen=True, eq=False)
class SnapCoeffs:
    """Snapshot coefficients against the POD modes, one column per time."""

    a: np.ndarray        # (up_to, M)
    times: np.ndarray    # (M,)


def _check_rank(r: int, d: int) -> None:
    if not 1 <= r <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {r}")


def assemble_rom_operators(basis: PodBasis, r: int, nu: float) -> RomOperators:
    """Project the Burgers weak form onto the leading r modes.

    B_imn integrates -phi_m phi_n' phi_i; the integrand is piecewise
    quadratic, so the per-element closed form below is exact.
    """
    _check_rank(r, basis.d)
    phi = basis.mode_matrix[:, :r]
    stiffness = assemble_stiffness(basis.mesh)
    A = -nu * (phi.T @ stiffness.matvec(phi))

    full = pad_boundary(phi)            # (n_nodes, r)
    left = full[:-1]
    right = full[1:]
    jump = right - left                 # h * slope of mode n per element
    B = -(
        2.0 * np.einsum("ei,em,en->imn", left, left, jump)
        + np.einsum("ei,em,en->imn", left, right, jump)
        + np.einsum("ei,em,en->imn", right, left, jump)
        + 2.0 * np.einsum("ei,em,en->imn", right, right, jump)
    ) / 6.0
    return RomOperators(r=r, b=np.zeros(r), A=A, B=B, nu=nu)


def snapshot_coefficients(snaps: SnapshotSet, basis: PodBasis, up_to: int) -> SnapCoeffs:
    """Mass inner products of each snapshot with the leading up_to modes."""
    _check_rank(up_to, basis.d)
    a = basis.mode_matrix[:, :up_to].T @ basis.mass.matvec(snaps.matrix)
    return SnapCoeffs(a=a, times=snaps.times.copy())


def rom_project(u: FeFunction, basis: PodBasis, r: int) -> FeFunction:
    """Spatial filter: mass-orthogonal projection onto the leading r modes."""
    _check_rank(r, basis.d)
    phi = basis.mode_matrix[:, :r]
    coeffs = phi.T @ basis.mass.matvec(u.coeffs)
    return FeFunction(u.mesh, phi @ coeffs)
