#!/usr/bin/env python3
"""Plot the full-order Burgers solution and compare it with the plain and
calibrated reduced models at a chosen rank.

Usage:
    python scripts/plot_solutions.py [--r 15] [--outdir plots]

Writes dns.png (space-time waterfall) and rom_comparison.png (full-order vs
reduced solutions at a few times).
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from burgers_rom.closure import (
    assemble_normal_matrices,
    build_cfrom,
    compute_gsnap,
    solve_calibration,
)
from burgers_rom.fe_core import assemble_mass, pad_boundary
from burgers_rom.fom import FomConfig, run_fom
from burgers_rom.galerkin import assemble_rom_operators, snapshot_coefficients
from burgers_rom.integrate import integrate_forward_euler, reconstruct
from burgers_rom.pod import compute_pod


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--r", type=int, default=15, help="retained rank")
    parser.add_argument("--outdir", default="plots", help="output directory")
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    cfg = FomConfig()
    print("running the full-order solve ...")
    snaps = run_fom(cfg)
    mass = assemble_mass(snaps.mesh)
    basis = compute_pod(snaps, mass)
    coeffs = snapshot_coefficients(snaps, basis, basis.d)

    r = args.r
    ops = assemble_rom_operators(basis, r, cfg.nu)
    target = compute_gsnap(coeffs, basis, r, min(2 * r, basis.d))
    D, E = assemble_normal_matrices(coeffs.a[:r], target)
    model = solve_calibration(D, E, target_sq_norm=float(np.sum(target.g**2)))
    cf_ops = build_cfrom(ops, model)

    a0 = coeffs.a[:r, 0]
    print("integrating the reduced models ...")
    plain = integrate_forward_euler(ops, a0, 1e-4, cfg.t_end)
    calibrated = integrate_forward_euler(cf_ops, a0, 1e-4, cfg.t_end)

    x = np.concatenate([[0.0], snaps.mesh.interior_nodes(), [1.0]])

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for j in range(0, len(snaps), 10):
        ax.plot(x, pad_boundary(snaps.snapshots[j].coeffs), lw=1.0,
                label=f"t={snaps.times[j]:.1f}" if j % 20 == 0 else None)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title("full-order solution")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(outdir / "dns.png", dpi=150)
    print(f"wrote {outdir / 'dns.png'}")

    show_times = [0.2, 0.5, 0.8, 1.0]
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2), sharey=True)
    for ax, traj, name in ((axes[0], plain, f"G-ROM r={r}"),
                           (axes[1], calibrated, f"CF-ROM r={r}, m=2r")):
        fields = reconstruct(traj, basis, show_times)
        for t in show_times:
            j = int(round(t / 0.01))
            ax.plot(x, pad_boundary(snaps.snapshots[j].coeffs), "k-", lw=0.8)
        for t, field in zip(show_times, fields):
            ax.plot(x, pad_boundary(field.coeffs), "--", lw=1.2, label=f"t={t}")
        ax.set_title(name)
        ax.set_xlabel("x")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("u")
    fig.suptitle("full-order (solid) vs reduced (dashed)")
    fig.tight_layout()
    fig.savefig(outdir / "rom_comparison.png", dpi=150)
    print(f"wrote {outdir / 'rom_comparison.png'}")


if __name__ == "__main__":
    main()
