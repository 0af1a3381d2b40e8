"""Shared fixtures. The benchmark-scale full-order runs are expensive, so
they are computed once per session and shared."""

import numpy as np
import pytest

from burgers_rom.fe_core import assemble_mass
from burgers_rom.fom import FomConfig, SnapshotSet, run_fom
from burgers_rom.galerkin import snapshot_coefficients
from burgers_rom.pod import compute_pod


@pytest.fixture(scope="session")
def paper_cfg():
    return FomConfig()


@pytest.fixture(scope="session")
def paper_snaps(paper_cfg):
    """Benchmark snapshot set: 101 states on [0, 1]."""
    return run_fom(paper_cfg)


@pytest.fixture(scope="session")
def paper_snaps_fine(paper_cfg):
    """Same trajectory stored at every solver step (1001 states)."""
    cfg = FomConfig(
        nu=paper_cfg.nu,
        dt=paper_cfg.dt,
        t_end=paper_cfg.t_end,
        n_elements=paper_cfg.n_elements,
        snapshot_stride=1,
    )
    return run_fom(cfg)


@pytest.fixture(scope="session")
def paper_mass(paper_snaps):
    return assemble_mass(paper_snaps.mesh)


@pytest.fixture(scope="session")
def paper_basis(paper_snaps, paper_mass):
    return compute_pod(paper_snaps, paper_mass)


@pytest.fixture(scope="session")
def paper_coeffs(paper_snaps, paper_basis):
    return snapshot_coefficients(paper_snaps, paper_basis, paper_basis.d)


@pytest.fixture(scope="session")
def small_snaps():
    """Random low-dimensional snapshot set for operator-level tests."""
    from burgers_rom.fe_core import FeFunction, build_mesh

    mesh = build_mesh(16)
    rng = np.random.default_rng(42)
    fields = [FeFunction(mesh, rng.normal(size=mesh.n_interior)) for _ in range(8)]
    times = np.arange(8) * 0.1
    return SnapshotSet(fields, times, mesh)


@pytest.fixture(scope="session")
def small_basis(small_snaps):
    return compute_pod(small_snaps, assemble_mass(small_snaps.mesh))


def mass_norm(mass, vec):
    return float(np.sqrt(vec @ mass.matvec(vec)))
