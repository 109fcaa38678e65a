"""Config parsing, CLI subcommands, determinism, sweep, mutation check."""

import numpy as np
import pytest

from oldroyd2d import checks, cli
from oldroyd2d import operators as ops
from oldroyd2d.config import parse_config, with_override
from oldroyd2d.errors import ConfigError
from oldroyd2d.fields import ScalarField
from oldroyd2d.runner import read_ndjson, run, sweep

MINIMAL = """
[grid]
n = 16

[stepping]
t_end = 0.0

[initial]
kind = taylor_green
amplitude = 0.5

[output]
dir = {out}
"""

SMALL_RUN = """
[grid]
n = 32

[model]
nu = 0.0
mu = 1.0
k = 1.0
alpha = 1.0
beta = 0.1
variant = q_zero

[stepping]
scheme = ifrk2
cfl = 0.5
dt_max = 0.05
t_end = 0.3

[initial]
kind = random_band_limited
amplitude = 0.5
band_lo = 1
band_hi = 4
seed = 5

[initial_tau]
kind = random_band_limited
amplitude = 0.5
band_lo = 1
band_hi = 4
seed = 6

[output]
dir = {out}
observe_every = 0.1
snapshot_times = 0.15

[diagnostics]
eps = 0.5
hs = 3
"""


class TestParseConfig:
    def test_minimal_defaults(self, tmp_path):
        cfg = parse_config(MINIMAL.format(out=tmp_path))
        assert cfg.grid.n == 16
        assert cfg.params.mu == 1.0
        assert cfg.step.scheme == "ifrk4"
        assert cfg.diag.eps == 0.5
        assert cfg.tau_initial.kind == "zero"

    def test_negative_mu_names_constraint_and_line(self):
        text = "[grid]\nn = 16\n\n[model]\nmu = -1\n"
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        msg = str(exc.value)
        assert "mu" in msg and "line" in msg

    def test_duplicate_key(self):
        text = "[grid]\nn = 16\nn = 32\n"
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(text)

    def test_unknown_key_and_section(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[grid]\nbogus = 3\n")
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[nope]\nx = 1\n")

    def test_type_mismatch_names_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("[grid]\nn = pony\n")

    def test_errors_collected(self):
        text = "[grid]\nn = pony\n[model]\nmu = -3\nbogus = 1\n"
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        assert len(exc.value.messages) >= 2

    def test_with_override(self, tmp_path):
        cfg = parse_config(MINIMAL.format(out=tmp_path))
        cfg2 = with_override(cfg, "model.mu", "2.5")
        assert cfg2.params.mu == 2.5
        cfg3 = with_override(cfg, "initial.delta", 0.1)
        assert cfg3.initial.delta == 0.1
        with pytest.raises(ConfigError):
            with_override(cfg, "model.bogus", 1)


class TestRunner:
    def test_t_end_zero_single_record(self, tmp_path):
        cfg = parse_config(MINIMAL.format(out=tmp_path / "r"))
        result = run(cfg)
        assert result.ok
        assert len(result.records) == 1
        assert result.records[0].t == 0.0
        lines = read_ndjson(result.out_dir / "diagnostics.ndjson")
        assert "summary" in lines[-1]

    def test_rerun_byte_identical(self, tmp_path):
        for sub in ("a", "b"):
            cfg = parse_config(SMALL_RUN.format(out=tmp_path / sub))
            assert run(cfg).ok
        a = (tmp_path / "a" / "diagnostics.ndjson").read_bytes()
        b = (tmp_path / "b" / "diagnostics.ndjson").read_bytes()
        assert a == b
        sa = (tmp_path / "a" / "snapshot_000.bin").read_bytes()
        sb = (tmp_path / "b" / "snapshot_000.bin").read_bytes()
        assert sa == sb

    def test_records_at_cadence_with_finite_values(self, tmp_path):
        cfg = parse_config(SMALL_RUN.format(out=tmp_path / "c"))
        result = run(cfg)
        ts = [r.t for r in result.records]
        assert ts == pytest.approx([0.0, 0.1, 0.15, 0.2, 0.3], abs=1e-9)
        accums = [r.bkm_accum for r in result.records]
        assert all(b2 >= b1 for b1, b2 in zip(accums, accums[1:]))

    def test_output_root_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OLDROYD2D_OUT", str(tmp_path / "root"))
        cfg = parse_config(MINIMAL.format(out="rel_dir"))
        result = run(cfg)
        assert result.out_dir == tmp_path / "root" / "rel_dir"
        assert (result.out_dir / "diagnostics.ndjson").exists()

    def test_failure_preserves_partial_output(self, tmp_path):
        cfg = parse_config(SMALL_RUN.format(out=tmp_path / "boom"))
        cfg = with_override(cfg, "initial.amplitude", 1e130)
        with np.errstate(over="ignore", invalid="ignore"):
            result = run(cfg)
        assert not result.ok
        lines = read_ndjson(result.out_dir / "diagnostics.ndjson")
        assert "failure" in lines[-1]
        assert "t" in lines[0]  # the initial record was still written


class TestSweep:
    def test_single_value_sweep_matches_run(self, tmp_path):
        cfg = parse_config(SMALL_RUN.format(out=tmp_path / "plain"))
        plain = run(cfg)

        cfg_sweep = parse_config(SMALL_RUN.format(out=tmp_path / "sw"))
        ok, csv_path = sweep(cfg_sweep, "initial.amplitude", [0.5])
        assert ok and csv_path.exists()
        rows = csv_path.read_text().strip().splitlines()
        assert len(rows) == 2  # header + one value
        sub = read_ndjson(tmp_path / "sw" / "initial_amplitude_0.5" / "diagnostics.ndjson")
        assert sub[-1]["summary"]["final_n_value"] == plain.summary["final_n_value"]

    def test_failed_value_recorded_and_continues(self, tmp_path):
        cfg = parse_config(SMALL_RUN.format(out=tmp_path / "sf"))
        with np.errstate(over="ignore", invalid="ignore"):
            ok, csv_path = sweep(cfg, "initial.amplitude", [1e130, 0.5])
        rows = csv_path.read_text().strip().splitlines()
        assert not ok
        assert rows[1].startswith("1e+130,failed")
        assert rows[2].startswith("0.5,ok")


class TestCli:
    def test_run_exit_codes(self, tmp_path, capsys):
        path = tmp_path / "ok.cfg"
        path.write_text(SMALL_RUN.format(out=tmp_path / "cli_run"))
        assert cli.main(["run", str(path)]) == 0

        bad = tmp_path / "bad.cfg"
        bad.write_text("[model]\nmu = -2\n")
        assert cli.main(["run", str(bad)]) == 2
        assert "mu" in capsys.readouterr().err

    def test_norms_subcommand(self, tmp_path, capsys):
        path = tmp_path / "ok.cfg"
        path.write_text(SMALL_RUN.format(out=tmp_path / "cli_norms"))
        assert cli.main(["run", str(path)]) == 0
        snap = tmp_path / "cli_norms" / "snapshot_000.bin"
        assert cli.main(["norms", str(snap), "--norm", "u_l2,gamma_b0inf1"]) == 0
        out = capsys.readouterr().out
        assert "u_l2" in out and "gamma_b0inf1" in out

        assert cli.main(["norms", str(snap), "--norm", "bogus_norm"]) == 2

    def test_norms_zero_snapshot(self, tmp_path, capsys):
        from oldroyd2d.grid import Grid
        from oldroyd2d.model import ModelParams, make_state
        from oldroyd2d.fields import SymTensorField
        from oldroyd2d.snapshots import save_snapshot

        grid = Grid(16)
        state = make_state(0.0, ScalarField.zeros(grid), SymTensorField.zeros(grid))
        snap = tmp_path / "zero.bin"
        save_snapshot(state, ModelParams(), snap)
        assert cli.main(["norms", str(snap), "--norm", "u_l2,tau_l2,omega_linf"]) == 0
        out = capsys.readouterr().out
        assert "0.0" in out


class TestMutationSensitivity:
    def test_flipped_riesz_sign_fails_cancellation(self, monkeypatch):
        true_riesz = ops.riesz_r

        def flipped(tau):
            out = true_riesz(tau)
            return ScalarField(out.grid, -out.coeffs)

        monkeypatch.setattr(ops, "riesz_r", flipped)
        result = checks.check_cancellation(quick=True)
        assert not result.passed

    def test_unpatched_passes(self):
        assert checks.check_cancellation(quick=True).passed
