"""Command line interface.

Subcommands: ``coeffs``, ``run``, ``converge``, ``sweep-omega``.  Every
experiment can be driven from a JSON config document (``--config``) whose
keys mirror the long flag names; explicit flags override config values.
Exit codes: 0 success, 2 bad usage or config, 3 a single run diverged,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, harness
from .operators import CutoffPolicy, ModelParams
from .problems import SpinodalSpec, TravelingWaveSpec, spinodal_initial, traveling_wave_field
from .solver import RunConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

DEFAULT_WAVE_EPSILON = 0.03 * np.sqrt(2.0)


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _merge(args: argparse.Namespace, key: str, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    config = getattr(args, "_config", {})
    if key in config:
        return config[key]
    return default


def _require(args, key: str):
    value = _merge(args, key)
    if value is None:
        raise CliError(f"missing required option --{key.replace('_', '-')} (or config key {key!r})")
    return value


def _load_config(args: argparse.Namespace) -> None:
    config = {}
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text())
        except OSError as err:
            raise CliError(f"cannot read config: {err}", EXIT_IO)
        except json.JSONDecodeError as err:
            raise CliError(f"config is not valid JSON: {err}")
        if not isinstance(config, dict):
            raise CliError("config must be a JSON object")
    args._config = config


def _omega_grid(args) -> list[float]:
    explicit = _merge(args, "omegas")
    if explicit is not None:
        return list(explicit) if not isinstance(explicit, str) else _float_list(explicit)
    lo = _merge(args, "omega_min")
    hi = _merge(args, "omega_max")
    step = _merge(args, "omega_step")
    if lo is None or hi is None or step is None:
        raise CliError("need --omegas or --omega-min/--omega-max/--omega-step")
    n = int(round((float(hi) - float(lo)) / float(step)))
    return [float(lo) + i * float(step) for i in range(n + 1)]


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    except OSError as err:
        raise CliError(f"cannot write {path}: {err}", EXIT_IO)


def cmd_coeffs(args) -> int:
    scheme = _merge(args, "scheme")
    family = _merge(args, "family")
    if scheme is not None:
        text = harness.coeffs_table(scheme=scheme)
    elif family is not None:
        text = harness.coeffs_table(family=family, omegas=_omega_grid(args))
    else:
        raise CliError("coeffs needs --scheme or --family")
    _write(_merge(args, "out"), text)
    return EXIT_OK


def _wave_setup(args):
    epsilon = float(_merge(args, "epsilon", DEFAULT_WAVE_EPSILON))
    cells = int(_merge(args, "cells", 128))
    length = float(_merge(args, "length", 4.0))
    return TravelingWaveSpec(epsilon, length), cells


def cmd_run(args) -> int:
    problem = _require(args, "problem")
    scheme = harness.scheme_from_string(_require(args, "scheme"))
    k_tol = float(_merge(args, "k_tol", 1e9))
    out_dir = Path(_merge(args, "out_dir", "."))
    snapshots = _merge(args, "snapshots", [])
    if isinstance(snapshots, str):
        snapshots = _float_list(snapshots)
    phi_max = float(_merge(args, "phi_max", 10.0))

    if problem == "wave":
        spec, cells = _wave_setup(args)
        f0 = traveling_wave_field(spec.grid(cells), 0.0, spec)
        model = ModelParams(spec.epsilon)
        t_final = float(_merge(args, "t_final", spec.t_final))
        meta = {"problem": "wave", "epsilon": repr(spec.epsilon), "cells": cells}
    elif problem == "spinodal":
        spec = SpinodalSpec(
            epsilon=float(_merge(args, "epsilon", 0.015)),
            amplitude=float(_merge(args, "amplitude", 0.005)),
            seed=int(_merge(args, "seed", 0)),
            cells=int(_merge(args, "cells", 64)),
            length=float(_merge(args, "length", 1.0)),
        )
        f0 = spinodal_initial(spec)
        model = ModelParams(spec.epsilon)
        t_final = float(_require(args, "t_final"))
        meta = {
            "problem": "spinodal",
            "epsilon": repr(spec.epsilon),
            "seed": spec.seed,
            "cells": spec.cells,
            "amplitude": repr(spec.amplitude),
        }
    else:
        raise CliError(f"unknown problem {problem!r}")

    dt = float(_require(args, "dt"))
    cfg = RunConfig(
        scheme,
        dt,
        t_final,
        model,
        CutoffPolicy(k_tol),
        snapshot_times=tuple(snapshots),
        phi_max=phi_max,
    )
    meta.update({"scheme": scheme.label, "dt": repr(dt), "t_final": repr(t_final), "k_tol": repr(k_tol)})
    result = harness.single_run(f0, cfg, {k: str(v) for k, v in meta.items()})

    from .fieldio import save_field

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "diagnostics.csv").write_text(result.diagnostics_csv)
        for t_req, snap in result.snapshots.items():
            save_field(out_dir / f"snapshot_t{t_req:g}.acf", snap)
    except OSError as err:
        raise CliError(f"cannot write outputs: {err}", EXIT_IO)

    if not result.trajectory.completed:
        print(
            f"run diverged at step {result.trajectory.diverged_step}, "
            f"cell {result.trajectory.diverged_cell}",
            file=sys.stderr,
        )
        return EXIT_DIVERGED
    return EXIT_OK


def _dt_list(args, speed: float | None) -> list[float]:
    dts = _merge(args, "dt_list")
    if dts is not None:
        return _float_list(dts) if isinstance(dts, str) else [float(v) for v in dts]
    pow2 = _merge(args, "dt_pow2")
    if pow2 is not None and speed is not None:
        lo, _, hi = str(pow2).partition(":")
        return [2.0 ** (-k) / speed for k in range(int(lo), int(hi) + 1)]
    raise CliError("need --dt-list (or --dt-pow2 for the wave problem)")


def cmd_converge(args) -> int:
    problem = _require(args, "problem")
    schemes = [harness.scheme_from_string(s) for s in str(_require(args, "schemes")).split(",")]
    k_tol = float(_merge(args, "k_tol", 1e9))
    out = _merge(args, "out", "converge")

    if problem == "wave":
        spec, cells = _wave_setup(args)
        report = harness.wave_convergence(
            schemes,
            _dt_list(args, spec.speed),
            cells=cells,
            epsilon=spec.epsilon,
            length=spec.length,
            k_tol=k_tol,
        )
    elif problem == "spinodal":
        spec = SpinodalSpec(
            epsilon=float(_merge(args, "epsilon", 0.015)),
            amplitude=float(_merge(args, "amplitude", 0.005)),
            seed=int(_merge(args, "seed", 0)),
            cells=int(_merge(args, "cells", 32)),
            length=float(_merge(args, "length", 1.0)),
        )
        ref_dt = _merge(args, "ref_dt")
        report = harness.spinodal_convergence(
            schemes,
            _dt_list(args, None),
            spec,
            t_final=float(_merge(args, "t_final", 0.01)),
            k_tol=k_tol,
            ref_dt=float(ref_dt) if ref_dt is not None else None,
        )
    else:
        raise CliError(f"unknown problem {problem!r}")

    _write(f"{out}.errors.csv", report.to_csv())
    _write(f"{out}.slopes.csv", report.slopes_to_csv())
    if _merge(args, "plot_script", False):
        _write(f"{out}.plot.py", harness.PLOT_SCRIPT.format(csv_path=f"{out}.errors.csv"))
    return EXIT_OK


def cmd_sweep_omega(args) -> int:
    branch = _require(args, "branch")
    spec, cells = _wave_setup(args)
    dt = _merge(args, "dt")
    if dt is None:
        factor = float(_merge(args, "dt_factor", 2.0**-4))
        dt = factor / spec.speed
    k_tols = _merge(args, "k_tols", (1e4, 1e9))
    if isinstance(k_tols, str):
        k_tols = tuple(_float_list(k_tols))
    records, meta = harness.omega_sweep(
        branch,
        _omega_grid(args),
        float(dt),
        cells=cells,
        epsilon=spec.epsilon,
        length=spec.length,
        k_tols=tuple(k_tols),
    )
    _write(_merge(args, "out"), harness.omega_sweep_csv(records, meta, tuple(k_tols)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acsplit",
        description="Operator-splitting cosine-spectral integrators for the Allen-Cahn equation.",
    )
    parser.add_argument("--version", action="version", version=f"acsplit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")

    p = sub.add_parser("coeffs", parents=[common], help="print splitting coefficients as CSV")
    p.add_argument("--scheme", help="named scheme, e.g. S3X or S2(1) or S3(0.62,-)")
    p.add_argument("--family", choices=["S3+", "S3-"], help="sweep a third-order branch")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-step", type=float)
    p.add_argument("--omegas", help="comma-separated omega list")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("run", parents=[common], help="run one experiment, write snapshots + diagnostics")
    p.add_argument("--problem", choices=["wave", "spinodal"])
    p.add_argument("--scheme")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--k-tol", type=float)
    p.add_argument("--phi-max", type=float)
    p.add_argument("--snapshots", help="comma-separated times")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("converge", parents=[common], help="convergence study, write error/slope CSVs")
    p.add_argument("--problem", choices=["wave", "spinodal"])
    p.add_argument("--schemes", help="comma-separated scheme ids")
    p.add_argument("--dt-list", help="comma-separated step sizes")
    p.add_argument("--dt-pow2", help="K1:K2 meaning dt = 2^-k / s for k = K1..K2 (wave only)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--t-final", type=float)
    p.add_argument("--k-tol", type=float)
    p.add_argument("--ref-dt", type=float, help="spinodal reference step (default min(dt)/4)")
    p.add_argument("--out", help="output prefix")
    p.add_argument("--plot-script", action="store_true", help="emit a convenience plot script")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("sweep-omega", parents=[common], help="error vs omega for a third-order branch")
    p.add_argument("--branch", choices=["+", "-"])
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-step", type=float)
    p.add_argument("--omegas", help="comma-separated omega list")
    p.add_argument("--dt", type=float)
    p.add_argument("--dt-factor", type=float, help="dt = factor / s (default 2^-4)")
    p.add_argument("--k-tols", help="comma-separated clamp values (default 1e4,1e9)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_sweep_omega)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _load_config(args)
        return args.func(args)
    except CliError as err:
        print(f"acsplit: error: {err}", file=sys.stderr)
        return err.code
    except (ValueError, RuntimeError) as err:
        print(f"acsplit: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
