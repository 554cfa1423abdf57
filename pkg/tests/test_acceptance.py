"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a PASS line on success (visible with ``pytest -rA``); a
failing criterion shows up as an ordinary test failure.
"""

import time

import numpy as np
import pytest

from acsplit import (
    CutoffPolicy,
    Field,
    GridSpec,
    ModelParams,
    SpinodalSpec,
    TravelingWaveSpec,
    first_order,
    fourth_order_u,
    fourth_order_v,
    free_energy_evolve,
    heat_evolve,
    named_scheme,
    second_order_family,
    special_omegas,
    spinodal_initial,
    third_order_family,
    traveling_wave_field,
)
from acsplit.coeffs import OMEGA_U, OMEGA_V, InvalidOmega, order_residuals
from acsplit.fieldio import save_field
from acsplit.harness import omega_sweep, spinodal_convergence, wave_convergence
from acsplit.report import MAX_FIT_RESIDUAL
from acsplit.solver import RunConfig, relative_l2_error, run

from oracles import TABLE_ROWS, fd_heat_1d, reaction_ode

EPS = 0.03 * np.sqrt(2.0)
WAVE = TravelingWaveSpec(EPS)
MODEL = ModelParams(EPS)


def flat(c):
    return tuple(v for pair in zip(c.a, c.b) for v in pair)


def test_criterion_01_coefficient_reproduction():
    t0 = time.perf_counter()
    for sol in special_omegas():
        np.testing.assert_allclose(
            flat(sol.coefficients), TABLE_ROWS[sol.coefficients.label], rtol=0, atol=1e-5
        )
    u = fourth_order_u()
    assert OMEGA_U == pytest.approx(1.0 / (2.0 - 2.0 ** (1.0 / 3.0)), abs=1e-14)
    assert u.a[0] * 2 == pytest.approx(1.3512, abs=1e-4)
    assert u.a[1] == pytest.approx(-0.1756, abs=1e-4)
    assert u.b[1] == pytest.approx(-1.7024, abs=1e-4)
    v = fourth_order_v()
    assert OMEGA_V == pytest.approx(1.0 / (4.0 - 4.0 ** (1.0 / 3.0)), abs=1e-14)
    assert v.a[1] == pytest.approx(0.4145, abs=1e-4)
    assert v.a[2] == pytest.approx(-0.1217, abs=1e-4)
    assert v.b[2] == pytest.approx(-0.6580, abs=1e-4)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"ACCEPTANCE 1 PASS: table rows to 1e-5, fourth-order constants to 1e-4 ({elapsed:.3f}s)")


def test_criterion_02_order_condition_residuals():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)

    def sample_branch(branch):
        count = 0
        while count < 200:
            omega = rng.uniform(0.251, 3.0)
            if abs(omega - 1.0 / 3.0) < 2e-3 or abs(omega - 1.0) < 2e-3:
                continue
            c = third_order_family(omega, branch).coefficients
            assert max(abs(r) for r in order_residuals(c)) < 1e-10, f"omega={omega}"
            count += 1

    sample_branch("+")
    sample_branch("-")
    named = [
        (first_order(), 2),
        (second_order_family(1.0), 4),
        (named_scheme("S3X"), 6),
        (named_scheme("S3Y"), 6),
        (named_scheme("S3Z"), 6),
        (fourth_order_u(), 6),
        (fourth_order_v(), 6),
    ]
    for scheme, n_applicable in named:
        r = order_residuals(scheme)
        assert max(abs(v) for v in r[:n_applicable]) < 1e-10, scheme.label
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"ACCEPTANCE 2 PASS: residuals < 1e-10 on 200 omegas/branch + named schemes ({elapsed:.3f}s)")


def test_criterion_03_limit_cases():
    c = third_order_family(1.0, "-").coefficients
    assert flat(c) == (7 / 24, 2 / 3, 3 / 4, -2 / 3, -1 / 24, 1.0)
    for branch in ("+", "-"):
        sol = third_order_family(0.25 + 1e-8, branch).coefficients
        assert abs(sol.a[1]) < 1e-6
        assert sol.a[0] == pytest.approx(1 / 3, abs=1e-4)
        assert sol.b[0] + sol.b[1] == pytest.approx(3 / 4, abs=1e-4)
        assert sol.a[2] == pytest.approx(2 / 3, abs=1e-4)
        assert sol.b[2] == pytest.approx(1 / 4, abs=1e-4)
    print("ACCEPTANCE 3 PASS: exact negative-branch limit at omega=1; quarter-point degeneration")


def test_criterion_04_traveling_wave_convergence():
    t0 = time.perf_counter()
    schemes = [
        (first_order(), 1.0, 0.2),
        (second_order_family(1.0), 2.0, 0.2),
        (named_scheme("S3X"), 3.0, 0.3),
        (named_scheme("S3Y"), 3.0, 0.3),
        (named_scheme("S3Z"), 3.0, 0.3),
        (fourth_order_u(), 4.0, 0.4),
        (fourth_order_v(), 4.0, 0.4),
    ]
    dts = [2.0**-k / WAVE.speed for k in range(2, 11)]
    report = wave_convergence([s for s, _, _ in schemes], dts, cells=128, epsilon=EPS, k_tol=1e9)
    lines = []
    for scheme, order, tol in schemes:
        fit = report.slopes[scheme.label]
        assert fit.slope == pytest.approx(order, abs=tol), scheme.label
        assert fit.residual <= MAX_FIT_RESIDUAL, scheme.label
        rows = [
            r
            for r in report.completed(scheme.label)
            if fit.dt_min <= r.dt <= fit.dt_max
        ]
        errs = [r.error for r in sorted(rows, key=lambda r: -r.dt)]
        assert all(a > b for a, b in zip(errs, errs[1:])), f"{scheme.label}: not monotone"
        lines.append(f"{scheme.label}={fit.slope:.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"ACCEPTANCE 4 PASS: slopes {' '.join(lines)} ({elapsed:.1f}s)")


def test_criterion_05_unconditional_boundedness():
    # grid and interface chosen so the cosine interpolant resolves both the
    # random data's smoothed descendants and the interfaces the flow forms;
    # this is the regime in which the exact-flow bound survives sampling
    t0 = time.perf_counter()
    eps = 0.15
    model = ModelParams(eps)
    grid = GridSpec.line(1.0, 64)
    rng = np.random.default_rng(2026)
    schemes = [first_order()] + [second_order_family(w) for w in (0.3, 0.7, 1.0)]
    worst = 0.0
    for trial in range(100):
        values = rng.uniform(-1.0, 1.0, 64)
        for scheme in schemes:
            for dt_factor in (1e-3, 1.0, 1e3):
                dt = dt_factor * eps * eps
                # phi_max is loosened: omega = 0.3 has a backward diffusion
                # substep whose clamped amplification is a huge transient the
                # next forward reaction substep contracts; the criterion is
                # about the final state
                cfg = RunConfig(
                    scheme, dt, 32 * dt, model, phi_max=1e12, record_energy=False
                )
                traj = run(Field(grid, values.copy()), cfg)
                assert traj.completed, (scheme.label, dt_factor, trial)
                worst = max(worst, float(np.max(np.abs(traj.final.values))) - 1.0)
    assert worst <= 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"ACCEPTANCE 5 PASS: max|phi|-1 <= {worst:.2e} over 1200 runs ({elapsed:.1f}s)")


def test_criterion_06_operator_oracles():
    t0 = time.perf_counter()
    # reaction flow vs adaptive ODE integration on a 10 x 10 (phi, tau) grid
    phis = np.linspace(-0.99, 0.99, 10)
    taus = np.linspace(-5 * EPS**2, 5 * EPS**2, 10)
    worst = 0.0
    for phi0 in phis:
        f = Field(GridSpec.line(1.0, 2), np.full(2, phi0))
        for tau in taus:
            ours = free_energy_evolve(f, tau, MODEL).values[0]
            ref = reaction_ode(float(phi0), float(tau), EPS)
            worst = max(worst, abs(ours - ref))
    assert worst <= 1e-8

    # diffusion flow: analytic single-mode decay
    grid = GridSpec.line(1.0, 64)
    ll = np.arange(64)
    for k in (1, 3, 11):
        f = Field(grid, np.cos(np.pi * k * (ll + 0.5) / 64))
        out = heat_evolve(f, 0.01)
        np.testing.assert_allclose(
            out.values, np.exp(-((np.pi * k) ** 2) * 0.01) * f.values, rtol=0, atol=1e-10
        )

    # diffusion flow vs explicit finite-difference march (M = 64)
    from acsplit import SpectralField, dct_inverse

    rng = np.random.default_rng(6)
    coeffs = np.exp(-np.arange(64)) * rng.standard_normal(64)
    f = dct_inverse(SpectralField(grid, coeffs))
    ref = fd_heat_1d(f.values, 1e-3, 1.0)
    ours = heat_evolve(f, 1e-3).values
    rel = np.linalg.norm(ours - ref) / np.linalg.norm(ref)
    assert rel <= 1e-4
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    print(
        f"ACCEPTANCE 6 PASS: reaction vs ODE oracle {worst:.1e} <= 1e-8; "
        f"mode decay 1e-10; FD oracle {rel:.1e} <= 1e-4 ({elapsed:.1f}s)"
    )


def _s3y_run(cells, dt, k_tol):
    grid = WAVE.grid(cells)
    f0 = traveling_wave_field(grid, 0.0, WAVE)
    cfg = RunConfig(
        named_scheme("S3Y"), dt, WAVE.t_final, MODEL, CutoffPolicy(k_tol), record_energy=False
    )
    return run(f0, cfg)


def test_criterion_07a_unclamped_run_diverges():
    traj = _s3y_run(1024, 2.0**-2 / WAVE.speed, np.inf)
    reference = traveling_wave_field(WAVE.grid(1024), WAVE.t_final, WAVE)
    diverged = traj.status == "diverged" or relative_l2_error(traj.final, reference) >= 1.0
    assert diverged
    print("ACCEPTANCE 7a PASS: K_tol=inf at dt=2^-2/s, M=1024 diverges")


def test_criterion_07b_clamped_run_completes():
    # As specified: the same run must complete with K_tol = 1e9.  Measured
    # behaviour is divergence (see notes/decisions.md): the reaction substep
    # sharpens the profile, and a 1e9 clamp still admits a ~50x overshoot
    # that the next backward reaction substep turns into a blow-up.
    # K_tol = 1e4 does complete here, and 1e9 completes for dt <= 2^-3/s.
    traj = _s3y_run(1024, 2.0**-2 / WAVE.speed, 1e9)
    assert traj.completed, (
        "spec'd outcome 'completes' is not attainable: K_tol=1e9 admits "
        f"amplified mid-band content and the run diverged at step {traj.diverged_step}"
    )
    print("ACCEPTANCE 7b PASS: K_tol=1e9 at dt=2^-2/s, M=1024 completes")


def test_criterion_07b_companion_finite_clamp_rescues():
    # the true protective behaviour at the spec'd parameters: a clamp sized
    # per the measured amplification completes, and 1e9 completes one
    # halving down
    t0 = time.perf_counter()
    traj = _s3y_run(1024, 2.0**-2 / WAVE.speed, 1e4)
    assert traj.completed
    traj = _s3y_run(1024, 2.0**-3 / WAVE.speed, 1e9)
    assert traj.completed
    print(f"ACCEPTANCE 7b' PASS (companion): K_tol=1e4 completes at 2^-2/s; 1e9 at 2^-3/s ({time.perf_counter()-t0:.1f}s)")


def test_criterion_07c_clamp_insensitive_below_eps2():
    t0 = time.perf_counter()
    for k in (5, 6):
        dt = 2.0**-k / WAVE.speed
        assert dt <= EPS**2
        a = _s3y_run(1024, dt, 1e4)
        b = _s3y_run(1024, dt, 1e9)
        assert a.completed and b.completed
        diff = relative_l2_error(a.final, b.final)
        assert diff < 1e-10, f"dt=2^-{k}/s: {diff}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"ACCEPTANCE 7c PASS: K_tol 1e4 vs 1e9 fields differ < 1e-10 for dt <= eps^2 ({elapsed:.1f}s)")


def test_criterion_08_omega_sweep_shape():
    t0 = time.perf_counter()
    omegas = [0.2505, 0.2510, 0.2515] + [0.2525 + 0.0025 * i for i in range(380)]
    records, _ = omega_sweep("+", omegas, 2.0**-4 / WAVE.speed, cells=128, epsilon=EPS)
    err = {}
    for rec in records:
        if "marker" in rec:
            continue
        e = rec["err_ktol_1e+09"]
        err[rec["omega"]] = np.inf if rec["status_ktol_1e+09"] == "diverged" else e

    window = {w: e for w, e in err.items() if 0.26376 <= w <= 0.29167}
    w_min = min(window, key=window.get)
    floor = window[w_min]
    omega_x = special_omegas()[0].omega
    assert abs(w_min - omega_x) <= 0.005, f"window minimum at {w_min}, expected near {omega_x}"

    spike_quarter = max(e for w, e in err.items() if w <= 0.2515)
    assert spike_quarter >= 4.0 * floor, "no error spike approaching omega = 1/4"
    spike_third = max(e for w, e in err.items() if abs(w - 1.0 / 3.0) <= 0.006)
    assert spike_third >= 50.0 * floor, "no error spike near omega = 1/3"

    near_one = {w: e for w, e in err.items() if 0.97 <= w <= 1.03}
    assert near_one and all(not np.isfinite(e) or e >= 0.5 for e in near_one.values())
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    print(
        f"ACCEPTANCE 8 PASS: min at omega={w_min:.4f} (X={omega_x:.4f}); spikes "
        f"{spike_quarter/floor:.0f}x / {spike_third/floor:.0f}x; failure region at 1 ({elapsed:.1f}s)"
    )


def test_criterion_09_spinodal_self_convergence():
    t0 = time.perf_counter()
    spec = SpinodalSpec(epsilon=0.015, amplitude=0.005, seed=20260808, cells=32)
    schemes = [
        (first_order(), 1.0),
        (second_order_family(1.0), 2.0),
        (named_scheme("S3X"), 3.0),
        (named_scheme("S3Y"), 3.0),
        (named_scheme("S3Z"), 3.0),
        (fourth_order_u(), 4.0),
        (fourth_order_v(), 4.0),
    ]
    dts = [1e-3 / 2**j for j in range(1, 6)]
    report = spinodal_convergence(
        [s for s, _ in schemes], dts, spec, t_final=0.01, k_tol=1e9, ref_dt=1e-3 / 2**7
    )
    lines = []
    for scheme, order in schemes:
        fit = report.slopes[scheme.label]
        assert fit.slope == pytest.approx(order, abs=0.5), scheme.label
        assert fit.residual <= MAX_FIT_RESIDUAL, scheme.label
        lines.append(f"{scheme.label}={fit.slope:.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    print(f"ACCEPTANCE 9 PASS: 32^3 slopes {' '.join(lines)} ({elapsed:.1f}s)")


def test_criterion_10_determinism(tmp_path):
    spec = SpinodalSpec(seed=7, cells=32)
    model = ModelParams(spec.epsilon)
    paths = []
    for tag in ("a", "b"):
        f0 = spinodal_initial(spec)
        cfg = RunConfig(fourth_order_v(), 1e-4, 8e-4, model, record_energy=False)
        traj = run(f0, cfg)
        assert traj.completed
        path = tmp_path / f"final_{tag}.acf"
        save_field(path, traj.final)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    print("ACCEPTANCE 10 PASS: repeated seeded runs produce bitwise-identical saved fields")
