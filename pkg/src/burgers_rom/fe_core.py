"""Linear finite elements on a uniform grid over [0, 1].

Homogeneous Dirichlet conditions are imposed by eliminating the two boundary
nodes, so every coefficient vector and every assembled matrix lives on the
``n_elements - 1`` interior nodes. All element integrals use a fixed 3-point
Gauss-Legendre rule, which is exact for polynomials up to degree 5 and hence
for every product of piecewise-linear factors (and one derivative) needed
here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidMeshError

# 3-point Gauss-Legendre rule on the reference element [0, 1].
GAUSS_POINTS = np.array([0.5 - np.sqrt(0.15), 0.5, 0.5 + np.sqrt(0.15)])
GAUSS_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh on [0, 1]; node i sits at i*h."""

    n_elements: int

    def __post_init__(self):
        if self.n_elements < 2:
            raise InvalidMeshError(
                f"need n_elements >= 2 for an interior node, got {self.n_elements}"
            )

    @property
    def h(self) -> float:
        return 1.0 / self.n_elements

    @property
    def n_interior(self) -> int:
        return self.n_elements - 1

    def interior_nodes(self) -> np.ndarray:
        return np.arange(1, self.n_elements) * self.h


@dataclass(frozen=True, eq=False)
class FeFunction:
    """Piecewise-linear function with zero boundary values, stored by its
    interior nodal coefficients."""

    mesh: Mesh1D
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (self.mesh.n_interior,):
            raise ValueError(
                f"expected {self.mesh.n_interior} interior coefficients, "
                f"got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True, eq=False)
class TriDiagMatrix:
    """Tridiagonal operator on the interior nodes.

    ``sub[i]`` is entry (i+1, i) and ``sup[i]`` is entry (i, i+1).
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        n = self.diag.size
        if self.sub.size != n - 1 or self.sup.size != n - 1:
            raise ValueError("off-diagonals must have length n - 1")

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply to a vector, or column-wise to a matrix."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            y = self.diag * x
            y[:-1] += self.sup * x[1:]
            y[1:] += self.sub * x[:-1]
        else:
            y = self.diag[:, None] * x
            y[:-1] += self.sup[:, None] * x[1:]
            y[1:] += self.sub[:, None] * x[:-1]
        return y

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.sup
        ab[1] = self.diag
        ab[2, :-1] = self.sub
        return solve_banded((1, 1), ab, rhs)

    def toarray(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.sub, k=-1)
            + np.diag(self.sup, k=1)
        )


def build_mesh(n_elements: int) -> Mesh1D:
    """Uniform mesh with n_elements cells; requires at least one interior node."""
    return Mesh1D(int(n_elements))


def assemble_mass(mesh: Mesh1D) -> TriDiagMatrix:
    """Consistent mass matrix of the interior hat functions."""
    h = mesh.h
    n = mesh.n_interior
    return TriDiagMatrix(
        sub=np.full(n - 1, h / 6.0),
        diag=np.full(n, 2.0 * h / 3.0),
        sup=np.full(n - 1, h / 6.0),
        symmetric=True,
    )


def assemble_stiffness(mesh: Mesh1D) -> TriDiagMatrix:
    """Dirichlet stiffness matrix (gradient-gradient products)."""
    h = mesh.h
    n = mesh.n_interior
    return TriDiagMatrix(
        sub=np.full(n - 1, -1.0 / h),
        diag=np.full(n, 2.0 / h),
        sup=np.full(n - 1, -1.0 / h),
        symmetric=True,
    )


def pad_boundary(coeffs: np.ndarray) -> np.ndarray:
    """Extend interior coefficients (vector or matrix of columns) with the
    zero boundary values."""
    coeffs = np.asarray(coeffs, dtype=float)
    shape = (coeffs.shape[0] + 2,) + coeffs.shape[1:]
    full = np.zeros(shape)
    full[1:-1] = coeffs
    return full


def convection_form(coeffs: np.ndarray, h: float) -> np.ndarray:
    """Entries of the nonlinear Burgers form against the interior hats.

    For interior coefficients ``c`` of u (a single vector or a matrix whose
    columns are independent fields), returns the vector(s) with i-th entry
    the integral of u u' phi_i over [0, 1].
    """
    full = pad_boundary(coeffs)
    left = full[:-1]
    right = full[1:]
    slope = (right - left) / h
    out = np.zeros_like(full)
    for xg, wg in zip(GAUSS_POINTS, GAUSS_WEIGHTS):
        f = (h * wg) * (left + (right - left) * xg) * slope
        out[:-1] += f * (1.0 - xg)
        out[1:] += f * xg
    return out[1:-1]


def nonlinear_form(u: FeFunction) -> np.ndarray:
    """Vector with i-th entry the integral of u u' phi_i."""
    return convection_form(u.coeffs, u.mesh.h)


def nonlinear_jacobian(u: FeFunction) -> TriDiagMatrix:
    """Derivative of ``nonlinear_form`` with respect to the coefficients.

    Tridiagonal because hat functions only overlap their neighbours; assembled
    with the same Gauss rule as the form itself, so the two are consistent to
    machine precision.
    """
    mesh = u.mesh
    h = mesh.h
    full = pad_boundary(u.coeffs)
    left = full[:-1]
    right = full[1:]
    slope = (right - left) / h

    n_nodes = mesh.n_elements + 1
    diag_full = np.zeros(n_nodes)
    sup_full = np.zeros(n_nodes - 1)   # entry (e, e+1)
    sub_full = np.zeros(n_nodes - 1)   # entry (e+1, e)
    for xg, wg in zip(GAUSS_POINTS, GAUSS_WEIGHTS):
        uval = left + (right - left) * xg
        # d(u u')/d(node value) for the left and right node of each element
        dleft = (1.0 - xg) * slope - uval / h
        dright = xg * slope + uval / h
        diag_full[:-1] += (h * wg) * dleft * (1.0 - xg)
        diag_full[1:] += (h * wg) * dright * xg
        sup_full += (h * wg) * dright * (1.0 - xg)
        sub_full += (h * wg) * dleft * xg

    n = mesh.n_interior
    return TriDiagMatrix(
        sub=sub_full[1:n],
        diag=diag_full[1:-1],
        sup=sup_full[1:n],
        symmetric=False,
    )
