"""Experiment orchestration: run and sweep, NDJSON diagnostics, snapshots.

Diagnostics are written as NDJSON, one object per observation, with field
names exactly as in DiagnosticsRecord; a final line holds a single
"summary" object (or "failure" when integration aborts, with partial
output preserved). Reruns of the same config are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

from . import diagnostics as diag
from .config import ExperimentConfig, with_override
from .errors import IntegrationError
from .initial_data import make_initial_data
from .snapshots import save_snapshot
from .stepping import integrate

DIAGNOSTICS_FILE = "diagnostics.ndjson"


@dataclass
class RunResult:
    ok: bool
    records: list
    summary: dict
    out_dir: Path
    error: str | None = None


class _Observer:
    """Writes one record per observation and snapshots at configured times."""

    def __init__(self, config: ExperimentConfig, out_dir: Path, stream):
        self.config = config
        self.out_dir = out_dir
        self.stream = stream
        self.records: list[diag.DiagnosticsRecord] = []
        self.bkm_accum = 0.0
        self._last = None  # (t, grad_u_linf)
        self._pending_snaps = sorted(config.output.snapshot_times)
        self._snap_index = 0
        self.enstrophy_ledger: list[tuple[float, float]] = []

    def __call__(self, state) -> None:
        rec = self._record(state)
        self.records.append(rec)
        self.stream.write(json.dumps(rec.to_dict()) + "\n")
        self.stream.flush()

        eps = 1e-9 * max(1.0, abs(state.t))
        while self._pending_snaps and state.t >= self._pending_snaps[0] - eps:
            self._pending_snaps.pop(0)
            path = self.out_dir / f"snapshot_{self._snap_index:03d}.bin"
            save_snapshot(state, self.config.params, path)
            self._snap_index += 1

    def _record(self, state) -> diag.DiagnosticsRecord:
        params = self.config.params
        rec = diag.compute_record(state, params, self.config.diag, self.bkm_accum)
        if self._last is not None:
            t0, v0 = self._last
            if state.t > t0:
                self.bkm_accum += 0.5 * (v0 + rec.grad_u_linf) * (state.t - t0)
                rec.bkm_accum = self.bkm_accum
        self._last = (state.t, rec.grad_u_linf)
        if not params.q_enabled and params.variant != "stokes_toy":
            bal = diag.enstrophy_balance(state, params)
            self.enstrophy_ledger.append(bal)
        return rec


def _summarize(config: ExperimentConfig, obs: _Observer) -> dict:
    records = obs.records
    params = config.params
    ts = [r.t for r in records]
    summary: dict = {
        "records": len(records),
        "t_final": ts[-1] if ts else None,
        "bkm_integral": obs.bkm_accum,
        "lambda_theory": params.gamma_damping_rate if params.mu > 0 else None,
        "max_omega_linf": max((r.omega_linf for r in records), default=None),
        "max_gamma_b0inf1": max((r.gamma_b0inf1 for r in records), default=None),
        "final_n_value": records[-1].n_value if records else None,
        "final_energy_weighted": records[-1].energy_weighted if records else None,
    }

    def fit_of(values):
        vals = [v for v in values]
        if len(vals) >= 10 and all(v > 0 for v in vals):
            f = diag.decay_fit(ts, vals)
            return {"rate": f.rate, "r_squared": f.r_squared}
        return None

    summary["decay_grad_u_l2"] = fit_of([r.grad_u_l2 for r in records])
    summary["decay_tau_l2"] = fit_of([r.tau_l2 for r in records])

    ratios = [
        lhs / maj for lhs, maj in obs.enstrophy_ledger if maj > 1e-14 and lhs > 0
    ]
    summary["enstrophy_ledger_c"] = max(ratios) if ratios else None

    bkm_ratios = [
        v for v in (diag.bkm_log_check(r) for r in records) if v is not None
    ]
    summary["bkm_log_ratio_max"] = max(bkm_ratios) if bkm_ratios else None
    return summary


def run(config: ExperimentConfig) -> RunResult:
    """Integrate the configured experiment, writing diagnostics and snapshots."""
    out_dir = config.output.resolved_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    state = make_initial_data(config.initial, config.tau_initial, config.grid,
                              config.params)

    path = out_dir / DIAGNOSTICS_FILE
    with open(path, "w", encoding="utf-8") as stream:
        obs = _Observer(config, out_dir, stream)
        try:
            integrate(
                state, config.params, config.step,
                observer=obs,
                observe_every=config.output.observe_every,
                land_times=config.output.snapshot_times,
            )
        except IntegrationError as exc:
            stream.write(json.dumps({"failure": {"t": exc.t, "error": str(exc)}}) + "\n")
            return RunResult(
                ok=False, records=obs.records, summary={}, out_dir=out_dir,
                error=str(exc),
            )
        summary = _summarize(config, obs)
        stream.write(json.dumps({"summary": summary}) + "\n")
    return RunResult(ok=True, records=obs.records, summary=summary, out_dir=out_dir)


SWEEP_FILE = "sweep.csv"


def sweep(config: ExperimentConfig, param: str, values) -> tuple[bool, Path]:
    """Run the experiment once per parameter value; emit a CSV of summaries.

    Individual run failures are recorded and the sweep continues.
    """
    base_dir = config.output.resolved_dir()
    base_dir.mkdir(parents=True, exist_ok=True)
    csv_path = base_dir / SWEEP_FILE
    all_ok = True
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["value", "status", "final_n_value", "decay_rate", "decay_r2",
             "max_gamma_b0inf1", "lambda_theory"]
        )
        for value in values:
            sub = with_override(config, param, value)
            slug = f"{param.replace('.', '_')}_{value:g}"
            sub = replace(
                sub, output=replace(sub.output, directory=str(base_dir / slug))
            )
            result = run(sub)
            if not result.ok:
                all_ok = False
                writer.writerow([f"{value:g}", "failed", "", "", "", "", ""])
                continue
            s = result.summary
            fit = s.get("decay_grad_u_l2") or {}
            writer.writerow([
                f"{value:g}", "ok",
                _fmt(s.get("final_n_value")),
                _fmt(fit.get("rate")),
                _fmt(fit.get("r_squared")),
                _fmt(s.get("max_gamma_b0inf1")),
                _fmt(s.get("lambda_theory")),
            ])
    return all_ok, csv_path


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def read_ndjson(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
