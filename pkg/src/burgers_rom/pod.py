"""POD basis construction by the method of snapshots.

The M x M Gram matrix of the snapshots in the mass inner product is
eigendecomposed and each retained eigenvector is lifted back to the finite
element space, which is algebraically equivalent to the N x N snapshot
eigenvalue problem restricted to its nonzero spectrum but far cheaper when
M << N. Retained modes are re-orthonormalized in the mass inner product
(two Gram-Schmidt passes): the lifted vectors are orthonormal only up to
roughly eps * lambda_1 / lambda_d, which is far worse than the 1e-10
orthonormality this artifact guarantees once trailing eigenvalues approach
the rank cutoff. The pass is an algebraic no-op (same span, same modes in
exact arithmetic).

Modes are sign-canonicalized so that each mode's entry of largest magnitude
is positive, making repeated runs agree bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from . import recordio
from .errors import ConfigError, EmptyBasisError
from .fe_core import FeFunction, Mesh1D, TriDiagMatrix, assemble_mass, build_mesh
from .fom import SnapshotSet


@dataclass(frozen=True, eq=False)
class PodBasis:
    """Mass-orthonormal modes with their descending eigenvalues."""

    modes: list[FeFunction]
    eigenvalues: np.ndarray
    mesh: Mesh1D
    mass: TriDiagMatrix

    @property
    def d(self) -> int:
        return len(self.modes)

    @cached_property
    def mode_matrix(self) -> np.ndarray:
        """Interior nodal values, one mode per column."""
        return np.column_stack([m.coeffs for m in self.modes])


def _mass_orthonormalize(phi: np.ndarray, mass: TriDiagMatrix) -> np.ndarray:
    for _ in range(2):
        for j in range(phi.shape[1]):
            v = phi[:, j]
            if j:
                v = v - phi[:, :j] @ (phi[:, :j].T @ mass.matvec(v))
            norm = np.sqrt(v @ mass.matvec(v))
            if not np.isfinite(norm) or norm == 0.0:
                raise EmptyBasisError("snapshot directions collapsed during orthonormalization")
            phi[:, j] = v / norm
    return phi


def compute_pod(
    snaps: SnapshotSet, mass: TriDiagMatrix, rank_cutoff: float = 1e-12
) -> PodBasis:
    """Basis of the snapshot span, truncated at relative eigenvalue
    ``rank_cutoff``."""
    if len(snaps) < 1:
        raise ValueError("need at least one snapshot")
    snapshots = snaps.matrix
    gram = snapshots.T @ mass.matvec(snapshots)
    gram = 0.5 * (gram + gram.T)
    lam, vecs = scipy.linalg.eigh(gram)
    lam = lam[::-1]
    vecs = vecs[:, ::-1]

    if lam[0] <= 0.0:
        raise EmptyBasisError("all snapshots are numerically zero")
    keep = lam >= rank_cutoff * lam[0]
    keep &= lam > 0.0
    d = int(np.count_nonzero(keep))
    if d == 0:
        raise EmptyBasisError("no eigenvalue above the rank cutoff")

    phi = snapshots @ (vecs[:, :d] / np.sqrt(lam[:d]))
    phi = _mass_orthonormalize(phi, mass)
    # sign canonicalization: largest-magnitude entry positive
    for j in range(d):
        peak = np.argmax(np.abs(phi[:, j]))
        if phi[peak, j] < 0.0:
            phi[:, j] = -phi[:, j]

    modes = [FeFunction(snaps.mesh, phi[:, j].copy()) for j in range(d)]
    return PodBasis(modes, lam[:d].copy(), snaps.mesh, mass)


def pod_energy(basis: PodBasis, r: int) -> float:
    """Fraction of snapshot energy captured by the leading r modes."""
    if not 1 <= r <= basis.d:
        raise ValueError(f"r must lie in [1, {basis.d}], got {r}")
    total = float(np.sum(basis.eigenvalues))
    return float(np.sum(basis.eigenvalues[:r])) / total


def write_basis(basis: PodBasis, base: str) -> None:
    """Header (n_elements, d) plus float64 records: the d modes, then one
    record of eigenvalues."""
    recordio.write_header(
        base, {"n_elements": basis.mesh.n_elements, "d": basis.d}
    )
    payload = np.concatenate([basis.mode_matrix.T.ravel(), basis.eigenvalues])
    recordio.write_floats(base, payload)


def read_basis(base: str) -> PodBasis:
    header = recordio.read_header(base)
    try:
        n_elements = int(header["n_elements"])
        d = int(header["d"])
    except KeyError as exc:
        raise ConfigError(f"{recordio.header_path(base)}: missing field {exc}") from exc
    mesh = build_mesh(n_elements)
    n = mesh.n_interior
    payload = recordio.read_floats(base, d * n + d)
    modes = [FeFunction(mesh, payload[j * n : (j + 1) * n]) for j in range(d)]
    eigenvalues = payload[d * n :]
    return PodBasis(modes, eigenvalues, mesh, assemble_mass(mesh))
