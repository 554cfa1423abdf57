"""Experiment orchestration behind the command line: coefficient tables,
convergence studies, omega sweeps, and single runs with snapshots."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .coeffs import (
    InvalidOmega,
    SplitCoefficients,
    discriminant,
    named_scheme,
    third_order_family,
)
from .grid import Field
from .operators import CutoffPolicy, ModelParams
from .problems import (
    SpinodalSpec,
    TravelingWaveSpec,
    spinodal_initial,
    traveling_wave_field,
)
from .report import ErrorReport, RunRow
from .solver import RunConfig, Trajectory, relative_l2_error, run

__all__ = [
    "coeffs_table",
    "omega_sweep",
    "scheme_from_string",
    "single_run",
    "spinodal_convergence",
    "wave_convergence",
]

_SCHEME_RE = re.compile(
    r"^(S1|S4U|S4V|S3X|S3Y|S3Z)$"
    r"|^S2\((?P<w2>[^)]+)\)$"
    r"|^S3\((?P<w3>[^,)]+),(?P<br>[+-])\)$",
    re.IGNORECASE,
)


def scheme_from_string(text: str) -> SplitCoefficients:
    """Parse a scheme id: S1, S2(w), S3X/S3Y/S3Z, S3(w,+|-), S4U, S4V."""
    m = _SCHEME_RE.match(text.strip())
    if m is None:
        raise ValueError(f"cannot parse scheme {text!r}")
    if m.group("w2") is not None:
        return named_scheme("S2", omega=float(m.group("w2")))
    if m.group("w3") is not None:
        return named_scheme("S3", omega=float(m.group("w3")), branch=m.group("br"))
    return named_scheme(m.group(1))


def _base_metadata(**extra) -> dict[str, str]:
    meta = {"version": __version__, "backend": BACKEND}
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def _sorted_rows(rows: list[RunRow]) -> list[RunRow]:
    return sorted(rows, key=lambda r: (r.scheme, -r.dt))


def wave_convergence(
    schemes: list[SplitCoefficients],
    dt_list: list[float],
    cells: int = 128,
    epsilon: float = 0.03 * np.sqrt(2.0),
    length: float = 4.0,
    k_tol: float = 1e9,
    record_energy: bool = False,
) -> ErrorReport:
    """Error at t_final = 1/s against the exact traveling front, per (scheme, dt)."""
    spec = TravelingWaveSpec(epsilon, length)
    grid = spec.grid(cells)
    model = ModelParams(epsilon)
    cutoff = CutoffPolicy(k_tol)
    f0 = traveling_wave_field(grid, 0.0, spec)
    reference = traveling_wave_field(grid, spec.t_final, spec)
    rows = []
    for scheme in schemes:
        for dt in dt_list:
            cfg = RunConfig(scheme, dt, spec.t_final, model, cutoff, record_energy=record_energy)
            traj = run(f0.copy(), cfg)
            err = relative_l2_error(traj.final, reference) if traj.completed else float("nan")
            rows.append(RunRow(scheme.label, dt, len(traj.times) - 1, err, traj.status))
    report = ErrorReport(
        _sorted_rows(rows),
        _base_metadata(
            problem="traveling-wave",
            epsilon=repr(float(epsilon)),
            cells=cells,
            length=repr(float(length)),
            k_tol=repr(float(k_tol)),
            t_final=repr(float(spec.t_final)),
        ),
    )
    report.fit_slopes()
    return report


def spinodal_convergence(
    schemes: list[SplitCoefficients],
    dt_list: list[float],
    spec: SpinodalSpec,
    t_final: float = 0.01,
    k_tol: float = 1e9,
    ref_dt: float | None = None,
) -> ErrorReport:
    """Self-convergence against a reference computed with the six-stage
    fourth-order scheme at ``ref_dt`` (default: a quarter of the finest dt)."""
    from .coeffs import fourth_order_v

    if ref_dt is None:
        ref_dt = min(dt_list) / 4.0
    if ref_dt > min(dt_list) / 2.0:
        raise ValueError("reference dt must be at least 2x finer than the finest run")
    model = ModelParams(spec.epsilon)
    cutoff = CutoffPolicy(k_tol)
    f0 = spinodal_initial(spec)
    ref_cfg = RunConfig(fourth_order_v(), ref_dt, t_final, model, cutoff, record_energy=False)
    ref = run(f0.copy(), ref_cfg)
    if not ref.completed:
        raise RuntimeError("reference run diverged; refusing to compare against it")
    rows = []
    for scheme in schemes:
        for dt in dt_list:
            cfg = RunConfig(scheme, dt, t_final, model, cutoff, record_energy=False)
            traj = run(f0.copy(), cfg)
            err = relative_l2_error(traj.final, ref.final) if traj.completed else float("nan")
            rows.append(RunRow(scheme.label, dt, len(traj.times) - 1, err, traj.status))
    report = ErrorReport(
        _sorted_rows(rows),
        _base_metadata(
            problem="spinodal",
            epsilon=repr(float(spec.epsilon)),
            amplitude=repr(float(spec.amplitude)),
            seed=spec.seed,
            cells=spec.cells,
            dims=spec.dims,
            length=repr(float(spec.length)),
            k_tol=repr(float(k_tol)),
            t_final=repr(float(t_final)),
            ref_dt=repr(float(ref_dt)),
            ref_scheme="S4V",
        ),
    )
    report.fit_slopes()
    return report


def omega_sweep(
    branch: str,
    omegas: list[float],
    dt: float,
    cells: int = 128,
    epsilon: float = 0.03 * np.sqrt(2.0),
    length: float = 4.0,
    k_tols: tuple[float, ...] = (1e4, 1e9),
) -> tuple[list[dict], dict[str, str]]:
    """Traveling-wave error as a function of the third-order free parameter.

    Returns one record per omega with the error under each clamp value;
    singular omegas carry an error marker instead of numbers.
    """
    spec = TravelingWaveSpec(epsilon, length)
    grid = spec.grid(cells)
    model = ModelParams(epsilon)
    f0 = traveling_wave_field(grid, 0.0, spec)
    reference = traveling_wave_field(grid, spec.t_final, spec)
    records = []
    for omega in omegas:
        rec: dict = {"omega": float(omega)}
        try:
            sol = third_order_family(omega, branch)
        except InvalidOmega as err:
            rec["marker"] = str(err)
            records.append(rec)
            continue
        rec["max_coeff"] = sol.coefficients.max_magnitude()
        for k_tol in k_tols:
            cfg = RunConfig(
                sol.coefficients, dt, spec.t_final, model, CutoffPolicy(k_tol),
                record_energy=False,
            )
            traj = run(f0.copy(), cfg)
            key = f"ktol_{k_tol:g}"
            rec[f"err_{key}"] = (
                relative_l2_error(traj.final, reference) if traj.completed else float("nan")
            )
            rec[f"status_{key}"] = traj.status
        records.append(rec)
    meta = _base_metadata(
        problem="omega-sweep",
        branch=branch,
        epsilon=repr(float(epsilon)),
        cells=cells,
        length=repr(float(length)),
        dt=repr(float(dt)),
        k_tols=",".join(f"{k:g}" for k in k_tols),
        t_final=repr(float(spec.t_final)),
    )
    return records, meta


def omega_sweep_csv(records: list[dict], meta: dict[str, str], k_tols=(1e4, 1e9)) -> str:
    buf = io.StringIO()
    buf.write("# acsplit-omega-sweep v1\n")
    for key, value in sorted(meta.items()):
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    keys = [f"ktol_{k:g}" for k in k_tols]
    writer.writerow(
        ["omega", "max_coeff"]
        + [col for key in keys for col in (f"err_{key}", f"status_{key}")]
        + ["marker"]
    )
    for rec in records:
        row = [repr(rec["omega"])]
        if "marker" in rec:
            row += [""] * (1 + 2 * len(keys)) + [rec["marker"]]
        else:
            row.append(repr(rec["max_coeff"]))
            for key in keys:
                err = rec[f"err_{key}"]
                row.append("" if np.isnan(err) else repr(err))
                row.append(rec[f"status_{key}"])
            row.append("")
        writer.writerow(row)
    return buf.getvalue()


def coeffs_table(
    family: str | None = None,
    omegas: list[float] | None = None,
    scheme: str | None = None,
) -> str:
    """CSV table of splitting coefficients.

    Either a single named scheme row, or a sweep of the third-order family
    ('S3+' / 'S3-') over the given omegas with discriminant and coefficient
    bounds per row.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["omega", "a1", "b1", "a2", "b2", "a3", "b3", "D", "min", "max", "bounded", "marker"]
    buf.write("# acsplit-coeffs v1\n")
    if scheme is not None:
        coeffs = scheme_from_string(scheme)
        writer.writerow(["label", "order"] + [f"a{j+1}" for j in range(coeffs.p)] + [f"b{j+1}" for j in range(coeffs.p)])
        writer.writerow(
            [coeffs.label, coeffs.claimed_order]
            + [repr(v) for v in coeffs.a]
            + [repr(v) for v in coeffs.b]
        )
        return buf.getvalue()
    if family not in ("S3+", "S3-") or omegas is None:
        raise ValueError("sweeps support family='S3+' or 'S3-' with an omega grid")
    branch = family[-1]
    writer.writerow(header)
    for omega in omegas:
        try:
            sol = third_order_family(omega, branch)
        except InvalidOmega as err:
            writer.writerow([repr(float(omega))] + [""] * 9 + ["", str(err)])
            continue
        c = sol.coefficients
        flat = [c.a[0], c.b[0], c.a[1], c.b[1], c.a[2], c.b[2]]
        lo, hi = min(c.a + c.b), max(c.a + c.b)
        writer.writerow(
            [repr(float(omega))]
            + [repr(v) for v in flat]
            + [repr(sol.discriminant), repr(lo), repr(hi), str(bool(max(abs(lo), abs(hi)) <= 1.0)), ""]
        )
    return buf.getvalue()


@dataclass
class SingleRunResult:
    trajectory: Trajectory
    diagnostics_csv: str
    snapshots: dict[float, Field]


def single_run(f0: Field, cfg: RunConfig, meta: dict[str, str]) -> SingleRunResult:
    """Run once and render the per-step diagnostics CSV."""
    traj = run(f0, cfg)
    buf = io.StringIO()
    buf.write("# acsplit-diagnostics v1\n")
    for key, value in sorted({**_base_metadata(), **meta}.items()):
        buf.write(f"# {key}={value}\n")
    buf.write(f"# status={traj.status}\n")
    if traj.status == "diverged":
        buf.write(f"# diverged_step={traj.diverged_step}\n")
        buf.write(f"# diverged_cell={','.join(str(c) for c in traj.diverged_cell)}\n")
    if traj.shortened_final_step:
        buf.write("# shortened_final_step=true\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "phi_min", "phi_max", "energy"])
    for t, lo, hi, en in zip(traj.times, traj.phi_min, traj.phi_max, traj.energies):
        writer.writerow(
            [repr(float(t)), repr(float(lo)), repr(float(hi)),
             "" if np.isnan(en) else repr(float(en))]
        )
    return SingleRunResult(traj, buf.getvalue(), traj.snapshots)


PLOT_SCRIPT = """\
#!/usr/bin/env python3
# Convenience plot for an acsplit error report; the CSV is the canonical output.
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
series = defaultdict(list)
with open(path) as fh:
    rows = csv.DictReader(line for line in fh if not line.startswith("#"))
    for row in rows:
        if row["status"] == "completed" and row["rel_l2_error"]:
            series[row["scheme"]].append((float(row["dt"]), float(row["rel_l2_error"])))
for label, pts in series.items():
    pts.sort()
    plt.loglog(*zip(*pts), marker="o", label=label)
plt.xlabel("dt")
plt.ylabel("relative l2 error")
plt.legend()
plt.grid(True, which="both", alpha=0.3)
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"""
