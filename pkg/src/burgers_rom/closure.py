"""Closure calibration: measure the subfilter contribution of the truncated
modes from snapshot data and fit a correction term to it by least squares.

For each snapshot time the closure signal is

    g_i(t_j) = (u_m u_m' , phi_i) - (u_r u_r' , phi_i),      i = 1..r,

where u_m and u_r are the rank-m and rank-r reconstructions of the snapshot.
The first term equals the i-th coefficient of the rank-r projection of
u_m u_m', so g is exactly the projected convective contribution that the
plain rank-r model cannot see. With m = r the two reconstructions coincide
and g vanishes identically. Using m < d trades accuracy of the target for
assembly cost; m = 2r is the default compromise.

The fitted term enters the reduced dynamics as da/dt = F(a) + sign * G(a).
The default sign is -1 ("dynamics consistent"): with the target defined as
above, the exact resolved dynamics carry the subfilter term on the right-hand
side with a minus sign. sign = +1 is exposed for the opposite convention.

A linear ansatz G(a) = A~ a leads to the normal equations A~ D = E with
D = sum_j a a^T and E = sum_j g a^T. A quadratic ansatz adds a symmetric
tensor contracted with a x a; it stays linear in the unknown coefficients, so
both fits reduce to (possibly regularized) linear least squares.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import recordio
from .errors import ConfigError, DegenerateDataError
from .fe_core import convection_form
from .galerkin import RomOperators, SnapCoeffs
from .pod import PodBasis

_PINV_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class ClosureTarget:
    """Snapshot closure signal g[i, j] = G_i(t_j) for ranks (r, m)."""

    g: np.ndarray    # (r, M)
    m: int
    r: int


@dataclass(frozen=True, eq=False)
class ClosureModel:
    """Calibrated correction, its sign convention, and fit diagnostics."""

    A_tilde: np.ndarray            # (r, r)
    B_tilde: np.ndarray | None     # (r, r, r) for the quadratic ansatz
    sign: int
    fit_residual: float
    cond_D: float
    method: str

    @property
    def r(self) -> int:
        return self.A_tilde.shape[0]

    @property
    def ansatz(self) -> str:
        return "linear" if self.B_tilde is None else "quadratic"


def compute_gsnap(coeffs: SnapCoeffs, basis: PodBasis, r: int, m: int) -> ClosureTarget:
    """Closure signal of the snapshots with truncation rank m."""
    if not 1 <= r <= m <= basis.d:
        raise ValueError(f"need 1 <= r <= m <= d, got r={r}, m={m}, d={basis.d}")
    if coeffs.a.shape[0] < m:
        raise ValueError(f"coefficients carry {coeffs.a.shape[0]} rows, need {m}")
    h = basis.mesh.h
    u_m = basis.mode_matrix[:, :m] @ coeffs.a[:m]
    u_r = basis.mode_matrix[:, :r] @ coeffs.a[:r]
    g = basis.mode_matrix[:, :r].T @ (convection_form(u_m, h) - convection_form(u_r, h))
    return ClosureTarget(g=g, m=m, r=r)


def assemble_normal_matrices(
    coeffs_r: np.ndarray, target: ClosureTarget
) -> tuple[np.ndarray, np.ndarray]:
    """Accumulated moments D = sum_j a a^T and E = sum_j g a^T."""
    a = np.asarray(coeffs_r, dtype=float)
    if a.ndim != 2 or a.shape[0] != target.r or a.shape[1] != target.g.shape[1]:
        raise ValueError(
            f"coefficient matrix {a.shape} does not match target {target.g.shape}"
        )
    return a @ a.T, target.g @ a.T


def _spectral_pinv_solve(D: np.ndarray, E: np.ndarray) -> np.ndarray:
    lam, vecs = scipy.linalg.eigh(D)
    if lam[-1] <= 0.0:
        raise DegenerateDataError("normal matrix D has no positive spectrum")
    inv = np.where(lam >= _PINV_CUTOFF * lam[-1], 1.0, 0.0)
    inv = np.divide(inv, lam, out=inv, where=inv > 0.0)
    return (E @ vecs) * inv @ vecs.T


def solve_calibration(
    D: np.ndarray,
    E: np.ndarray,
    reg: float = 0.0,
    cond_limit: float = 1e12,
    sign: int = -1,
    target_sq_norm: float = 0.0,
) -> ClosureModel:
    """Linear-ansatz calibration A~ D = E.

    With reg > 0 a ridge term is added; otherwise D is factorized directly
    when its condition estimate stays below cond_limit and inverted through a
    truncated spectral pseudo-inverse when it does not. ``target_sq_norm``
    is sum_j |g(t_j)|^2, needed only to report the absolute fit residual.
    """
    D = np.asarray(D, dtype=float)
    E = np.asarray(E, dtype=float)
    if not np.any(D):
        raise DegenerateDataError("normal matrix D is identically zero")

    lam = scipy.linalg.eigvalsh(D)
    cond = float(lam[-1] / lam[0]) if lam[0] > 0.0 else np.inf
    if reg > 0.0:
        shifted = D + reg * np.eye(D.shape[0])
        A_tilde = scipy.linalg.solve(shifted, E.T, assume_a="pos").T
        method = "ridge"
    elif cond <= cond_limit:
        A_tilde = scipy.linalg.solve(D, E.T, assume_a="pos").T
        method = "direct"
    else:
        A_tilde = _spectral_pinv_solve(D, E)
        method = "spectral-pinv"

    fit = float(
        np.einsum("im,mn,in->", A_tilde, D, A_tilde)
        - 2.0 * np.sum(A_tilde * E)
        + target_sq_norm
    )
    return ClosureModel(
        A_tilde=A_tilde,
        B_tilde=None,
        sign=int(sign),
        fit_residual=max(fit, 0.0),
        cond_D=cond,
        method=method,
    )


def _pair_indices(r: int) -> list[tuple[int, int]]:
    return [(m, n) for m in range(r) for n in range(m, r)]


def solve_calibration_quadratic(
    coeffs_r: np.ndarray,
    target: ClosureTarget,
    reg: float = 0.0,
    sign: int = -1,
) -> ClosureModel:
    """Quadratic-ansatz calibration.

    The regressor per snapshot time is [a_1..a_r, {a_m a_n}_{m<=n}]; fitting
    its coefficients is an ordinary linear least-squares problem. Only the
    upper triangle of B~ is identifiable (a_m a_n is symmetric), so the fit
    determines it and the tensor is mirrored.
    """
    a = np.asarray(coeffs_r, dtype=float)
    g = target.g
    r, M = a.shape
    pairs = _pair_indices(r)
    p = r + len(pairs)
    if M < p:
        warnings.warn(
            f"only {M} snapshots for {p} regression coefficients; "
            "the quadratic fit is underdetermined",
            stacklevel=2,
        )

    Z = np.empty((p, M))
    Z[:r] = a
    for idx, (m, n) in enumerate(pairs):
        Z[r + idx] = a[m] * a[n]

    gram = Z @ Z.T
    lam = scipy.linalg.eigvalsh(gram)
    cond = float(lam[-1] / lam[0]) if lam[0] > 0.0 else np.inf
    if reg > 0.0:
        theta = scipy.linalg.solve(gram + reg * np.eye(p), Z @ g.T, assume_a="pos").T
        method = "ridge"
    else:
        theta_t, _, rank, _ = np.linalg.lstsq(Z.T, g.T, rcond=None)
        theta = theta_t.T
        method = "lstsq" if rank == p else "lstsq-minnorm"

    A_tilde = theta[:, :r].copy()
    B_tilde = np.zeros((r, r, r))
    for idx, (m, n) in enumerate(pairs):
        col = theta[:, r + idx]
        if m == n:
            B_tilde[:, m, m] = col
        else:
            B_tilde[:, m, n] = 0.5 * col
            B_tilde[:, n, m] = 0.5 * col
    fit = float(np.sum((theta @ Z - g) ** 2))
    return ClosureModel(
        A_tilde=A_tilde,
        B_tilde=B_tilde,
        sign=int(sign),
        fit_residual=fit,
        cond_D=cond,
        method=method,
    )


def build_cfrom(ops: RomOperators, model: ClosureModel) -> RomOperators:
    """Merge the calibrated correction into the reduced operators."""
    if model.A_tilde.shape != (ops.r, ops.r):
        raise ValueError(
            f"closure rank {model.A_tilde.shape} does not match operators r={ops.r}"
        )
    A = ops.A + model.sign * model.A_tilde
    B = ops.B + model.sign * model.B_tilde if model.B_tilde is not None else ops.B.copy()
    return RomOperators(r=ops.r, b=ops.b.copy(), A=A, B=B, nu=ops.nu)


def write_closure_model(model: ClosureModel, base: str) -> None:
    recordio.write_header(
        base, {"r": model.r, "sign": model.sign, "ansatz": model.ansatz}
    )
    blocks = [model.A_tilde.ravel()]
    if model.B_tilde is not None:
        blocks.append(model.B_tilde.ravel())
    recordio.write_floats(base, np.concatenate(blocks))


def read_closure_model(base: str) -> ClosureModel:
    header = recordio.read_header(base)
    try:
        r = int(header["r"])
        sign = int(header["sign"])
        ansatz = header["ansatz"]
    except KeyError as exc:
        raise ConfigError(f"{recordio.header_path(base)}: missing field {exc}") from exc
    if ansatz not in ("linear", "quadratic"):
        raise ConfigError(f"unknown ansatz {ansatz!r}")
    count = r * r if ansatz == "linear" else r * r + r**3
    payload = recordio.read_floats(base, count)
    A_tilde = payload[: r * r].reshape(r, r)
    B_tilde = payload[r * r :].reshape(r, r, r) if ansatz == "quadratic" else None
    return ClosureModel(
        A_tilde=A_tilde,
        B_tilde=B_tilde,
        sign=sign,
        fit_residual=np.nan,
        cond_D=np.nan,
        method="loaded",
    )
