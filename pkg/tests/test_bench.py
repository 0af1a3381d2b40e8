"""Pipeline orchestration, config and report formats, caching, and the CLI."""

import numpy as np
import pytest

from burgers_rom.bench import (
    REPORT_HEADER,
    BenchConfig,
    parse_config,
    resolve_m,
    rom_error,
    run_pipeline,
)
from burgers_rom.cli import main
from burgers_rom.errors import ConfigError
from burgers_rom.fe_core import FeFunction, assemble_mass, build_mesh
from burgers_rom.fom import FomConfig, SnapshotSet
from burgers_rom.galerkin import snapshot_coefficients
from burgers_rom.integrate import RomTrajectory, integrate_forward_euler
from burgers_rom.pod import compute_pod

SMALL_FOM = dict(n_elements=64, t_end=0.2)


def small_config(**overrides):
    fields = dict(
        fom=FomConfig(**SMALL_FOM),
        r_list=(2, 3),
        m_policies=("r", "2r", "d"),
        rom_dt=1e-3,
    )
    fields.update(overrides)
    return BenchConfig(**fields)


class TestRomError:
    def test_identical_fields_give_zero(self, small_basis, small_snaps):
        coeffs = snapshot_coefficients(small_snaps, small_basis, small_basis.d)
        # trajectory whose grid contains the snapshot times and whose states
        # reproduce the snapshots exactly at those times
        dt = 0.05
        a = np.zeros((small_basis.d, int(round(0.7 / dt)) + 1))
        for j, t in enumerate(small_snaps.times):
            a[:, int(round(t / dt))] = coeffs.a[:, j]
        traj = RomTrajectory(a=a, dt=dt)
        err = rom_error(traj, small_snaps, small_basis, small_basis.mass)
        assert err <= 1e-7

    def test_exact_match_gives_exact_zero(self):
        # snapshot lying in the basis span, trajectory reproducing it bitwise
        mesh = build_mesh(16)
        mass = assemble_mass(mesh)
        rng = np.random.default_rng(51)
        u = rng.normal(size=mesh.n_interior)
        snaps = SnapshotSet([FeFunction(mesh, u)], np.array([0.0]), mesh)
        basis = compute_pod(snaps, mass)
        coeffs = snapshot_coefficients(snaps, basis, 1)
        traj = RomTrajectory(a=coeffs.a[:, :1] * np.ones((1, 2)), dt=1.0)
        mode_err = rom_error(traj, snaps, basis, mass)
        assert mode_err <= 1e-12

    def test_hand_computed_constant_offset(self):
        # two equal snapshot times, difference field of mass norm 0.3
        mesh = build_mesh(16)
        mass = assemble_mass(mesh)
        rng = np.random.default_rng(50)
        base = rng.normal(size=mesh.n_interior)
        snaps = SnapshotSet(
            [FeFunction(mesh, base), FeFunction(mesh, base)],
            np.array([0.0, 1.0]),
            mesh,
        )
        basis = compute_pod(snaps, mass)
        coeffs = snapshot_coefficients(snaps, basis, basis.d)
        offset = 0.3
        a = np.tile(coeffs.a[:, :1], (1, 2)) + np.array([[offset, offset]])
        traj = RomTrajectory(a=a, dt=1.0)
        err = rom_error(traj, snaps, basis, mass)
        assert err == pytest.approx(offset, rel=1e-10)


class TestResolveM:
    def test_policy_values(self):
        assert resolve_m("r", 6, 101) == 6
        assert resolve_m("r+1", 6, 101) == 7
        assert resolve_m("2r", 6, 101) == 12
        assert resolve_m("3r", 6, 101) == 18
        assert resolve_m("d", 6, 101) == 101

    def test_capped_at_basis_size(self):
        assert resolve_m("3r", 6, 10) == 10

    def test_unknown_tag(self):
        with pytest.raises(ConfigError):
            resolve_m("4r", 6, 101)


class TestConfigFile:
    def test_full_round_trip(self, tmp_path):
        path = tmp_path / "bench.cfg"
        path.write_text(
            "# benchmark configuration\n"
            "n_elements = 128\n"
            "nu = 2e-3\n"
            "dt = 1e-3\n"
            "t_end = 0.5   # half horizon\n"
            "snapshot_stride = 5\n"
            "r_list = 4, 6\n"
            "m_policies = r, r+1, 2r\n"
            "ansatz = quadratic\n"
            "closure_sign = 1\n"
            "rom_dt = 2e-4\n"
            "output_path = out.csv\n"
        )
        cfg = parse_config(str(path))
        assert cfg.fom.n_elements == 128
        assert cfg.fom.nu == 2e-3
        assert cfg.fom.t_end == 0.5
        assert cfg.fom.snapshot_stride == 5
        assert cfg.r_list == (4, 6)
        assert cfg.m_policies == ("r", "r+1", "2r")
        assert cfg.ansatz == "quadratic"
        assert cfg.closure_sign == 1
        assert cfg.rom_dt == 2e-4
        assert cfg.output_path == "out.csv"

    def test_defaults_when_empty(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing but comments\n\n")
        cfg = parse_config(str(path))
        assert cfg == BenchConfig()
        assert cfg.r_list == (6, 10, 15)
        assert cfg.closure_sign == -1

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("viscosity = 1e-3\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(str(path))

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("n_elements = many\n")
        with pytest.raises(ConfigError, match="bad value"):
            parse_config(str(path))

    def test_missing_file_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("/nonexistent/path.cfg")

    def test_bad_policy_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("m_policies = r, 5r\n")
        with pytest.raises(ConfigError):
            parse_config(str(path))


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench") / "report.csv"
    cfg = small_config(output_path=str(out))
    return run_pipeline(cfg), out, cfg


class TestRunPipeline:
    def test_row_structure(self, small_report):
        report, _, cfg = small_report
        assert len(report.rows) == len(cfg.r_list) * (1 + len(cfg.m_policies))
        combos = [(row.method, row.r, row.m_tag) for row in report.rows]
        assert len(set(combos)) == len(combos)
        for r in cfg.r_list:
            assert ("G-ROM", r, "-") in combos
            for tag in cfg.m_policies:
                assert ("CF-ROM", r, tag) in combos

    def test_csv_format(self, small_report):
        report, out, _ = small_report
        lines = out.read_text().splitlines()
        assert lines[0] == REPORT_HEADER
        assert len(lines) == 1 + len(report.rows)
        first = lines[1].split(",")
        assert first[0] == "G-ROM"
        # floats survive a text round trip exactly (17 significant digits)
        assert float(first[3]) == report.rows[0].error

    def test_m_equals_r_row_reproduces_grom(self, small_report):
        report, _, cfg = small_report
        for r in cfg.r_list:
            grom = next(x for x in report.rows if x.method == "G-ROM" and x.r == r)
            degenerate = next(
                x for x in report.rows if x.method == "CF-ROM" and x.r == r and x.m_tag == "r"
            )
            assert abs(grom.error - degenerate.error) <= 1e-12

    def test_calibrated_rows_improve(self, small_report):
        report, _, cfg = small_report
        for r in cfg.r_list:
            grom = next(x for x in report.rows if x.method == "G-ROM" and x.r == r)
            improved = next(
                x
                for x in report.rows
                if x.method == "CF-ROM" and x.r == r and x.m_tag == "2r"
            )
            assert improved.error < grom.error

    def test_rank_one_single_policy(self, tmp_path):
        # degenerate benchmark: one rank, m = r only
        cfg = small_config(
            r_list=(1,), m_policies=("r",), output_path=str(tmp_path / "r.csv")
        )
        report = run_pipeline(cfg)
        assert len(report.rows) == 2
        assert abs(report.rows[0].error - report.rows[1].error) <= 1e-12

    def test_degenerate_closure_trajectory_bitwise_identical(self):
        # m = r: the fitted correction is exactly zero, so the calibrated
        # operators and trajectory agree bitwise with the plain model
        from burgers_rom.closure import (
            assemble_normal_matrices,
            build_cfrom,
            compute_gsnap,
            solve_calibration,
        )
        from burgers_rom.fom import run_fom
        from burgers_rom.galerkin import assemble_rom_operators

        snaps = run_fom(FomConfig(**SMALL_FOM))
        mass = assemble_mass(snaps.mesh)
        basis = compute_pod(snaps, mass)
        coeffs = snapshot_coefficients(snaps, basis, basis.d)
        ops = assemble_rom_operators(basis, 3, nu=1e-3)
        target = compute_gsnap(coeffs, basis, 3, 3)
        D, E = assemble_normal_matrices(coeffs.a[:3], target)
        model = solve_calibration(D, E)
        assert np.array_equal(model.A_tilde, np.zeros((3, 3)))
        cf_ops = build_cfrom(ops, model)
        assert np.array_equal(cf_ops.A, ops.A)
        a0 = coeffs.a[:3, 0]
        plain = integrate_forward_euler(ops, a0, 1e-3, 0.2)
        calibrated = integrate_forward_euler(cf_ops, a0, 1e-3, 0.2)
        assert np.array_equal(plain.a, calibrated.a)

    def test_quadratic_ansatz_runs(self, tmp_path):
        # the quadratic correction needs a better-resolved target than the
        # 64-cell case to stay stable under explicit integration
        cfg = small_config(
            fom=FomConfig(n_elements=128, t_end=0.2),
            r_list=(3,),
            m_policies=("2r",),
            ansatz="quadratic",
            rom_dt=2e-4,
            output_path=str(tmp_path / "q.csv"),
        )
        report = run_pipeline(cfg)
        grom = report.rows[0].error
        assert report.rows[1].error < grom

    def test_rank_beyond_basis_rejected(self, tmp_path):
        cfg = small_config(r_list=(200,), output_path=str(tmp_path / "x.csv"))
        with pytest.raises(ConfigError):
            run_pipeline(cfg)


class TestCache:
    def test_warm_cache_reproduces_report_body(self, tmp_path):
        cache = tmp_path / "cache"
        kwargs = dict(cache_dir=str(cache))
        first_out = tmp_path / "first.csv"
        second_out = tmp_path / "second.csv"
        first = run_pipeline(small_config(output_path=str(first_out), **kwargs))
        stamp = (cache / "snapshots.f64").stat().st_mtime_ns
        second = run_pipeline(small_config(output_path=str(second_out), **kwargs))
        # the cache was not rewritten
        assert (cache / "snapshots.f64").stat().st_mtime_ns == stamp
        # non-timing columns agree bitwise
        for a, b in zip(first.rows, second.rows):
            assert (a.method, a.r, a.m_tag) == (b.method, b.r, b.m_tag)
            assert f"{a.error:.17g}" == f"{b.error:.17g}"

    def test_stale_cache_recomputed(self, tmp_path):
        cache = tmp_path / "cache"
        run_pipeline(small_config(output_path=str(tmp_path / "a.csv"), cache_dir=str(cache)))
        other_fom = FomConfig(n_elements=32, t_end=0.2)
        report = run_pipeline(
            small_config(
                fom=other_fom,
                output_path=str(tmp_path / "b.csv"),
                cache_dir=str(cache),
            )
        )
        assert len(report.rows) == 8
        # the cache now holds the new mesh size
        from burgers_rom.fom import read_snapshots

        _, cached_cfg = read_snapshots(str(cache / "snapshots"))
        assert cached_cfg.n_elements == 32


def write_small_cfg(path, **extra):
    lines = ["n_elements = 64", "t_end = 0.2", "r_list = 2, 3", "m_policies = r, 2r",
             "rom_dt = 1e-3"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    path.write_text("\n".join(lines) + "\n")


class TestCli:
    def test_fom_pod_calibrate(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        write_small_cfg(cfg)
        snaps_base = str(tmp_path / "snaps")
        basis_base = str(tmp_path / "basis")
        model_base = str(tmp_path / "model")
        assert main(["fom", "--config", str(cfg), "--out", snaps_base]) == 0
        assert (tmp_path / "snaps.header").exists()
        assert (tmp_path / "snaps.f64").exists()
        assert main(["pod", snaps_base, "--out", basis_base]) == 0
        assert (tmp_path / "basis.header").exists()
        assert main(
            ["calibrate", snaps_base, basis_base, "--r", "2", "--out", model_base]
        ) == 0
        assert (tmp_path / "model.header").exists()

    def test_bench_subcommand(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        write_small_cfg(cfg)
        out = tmp_path / "report.csv"
        code = main(
            [
                "--seed",
                "7",
                "bench",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--cache",
                str(tmp_path / "cache"),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == REPORT_HEADER
        assert len(lines) == 7

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense = 1\n")
        assert main(["bench", "--config", str(bad)]) == 2

    def test_numerical_failure_exit_code(self, tmp_path):
        cfg = tmp_path / "stall.cfg"
        # one huge implicit step with a single Newton iteration cannot converge
        cfg.write_text(
            "n_elements = 32\ndt = 1000\nt_end = 1000\nnewton_max_iter = 1\n"
        )
        assert main(["fom", "--config", str(cfg), "--out", str(tmp_path / "s")]) == 3

    def test_missing_snapshot_file_exit_code(self, tmp_path):
        assert main(["pod", str(tmp_path / "missing"), "--out", str(tmp_path / "b")]) == 2
