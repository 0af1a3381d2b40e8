"""Reduced order modeling workbench for the 1D viscous Burgers equation:
full-order finite element solver, POD basis extraction, Galerkin reduced
models, and least-squares closure calibration."""

from .bench import BenchConfig, BenchReport, BenchRow, parse_config, rom_error, run_pipeline
from .closure import (
    ClosureModel,
    ClosureTarget,
    assemble_normal_matrices,
    build_cfrom,
    compute_gsnap,
    solve_calibration,
    solve_calibration_quadratic,
)
from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateDataError,
    DivergenceError,
    EmptyBasisError,
    InvalidMeshError,
    NewtonError,
    NumericsError,
)
from .fe_core import (
    FeFunction,
    Mesh1D,
    TriDiagMatrix,
    assemble_mass,
    assemble_stiffness,
    build_mesh,
    nonlinear_form,
    nonlinear_jacobian,
)
from .fom import (
    FomConfig,
    SnapshotSet,
    project_initial_condition,
    read_snapshots,
    run_fom,
    step_backward_euler,
    write_snapshots,
)
from .galerkin import (
    RomOperators,
    SnapCoeffs,
    assemble_rom_operators,
    rom_project,
    snapshot_coefficients,
)
from .integrate import RomTrajectory, integrate_forward_euler, reconstruct, rom_rhs
from .pod import PodBasis, compute_pod, pod_energy, read_basis, write_basis

__all__ = [name for name in dir() if not name.startswith("_")]
