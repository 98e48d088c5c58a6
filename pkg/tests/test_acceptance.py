"""Acceptance suite: one verdict line per criterion, at the stated tolerances.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as they
are produced; they are also repeated in the terminal summary.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from qsl_lab import dynamics as dyn
from qsl_lab import matrix2 as m2
from qsl_lab import qsl
from qsl_lab.dynamics import ModelParams
from qsl_lab.sweep import FIGURE_DELTAS, figure_specs, run, window_row

pytestmark = pytest.mark.acceptance

PANEL = (0.0, 0.4, 0.9, 0.999, 1.0, 1.001, 1.1, 2.5, -1.0, -2.5)


@pytest.fixture(scope="session")
def fig1_rows():
    start = time.perf_counter()
    rows = run(figure_specs(1)[0])
    return rows, time.perf_counter() - start


@pytest.fixture(scope="session")
def scan_rows():
    """All tau-scan presets, keyed by (figure, delta)."""
    start = time.perf_counter()
    out = {}
    for fig in sorted(FIGURE_DELTAS):
        for spec in figure_specs(fig):
            out[fig, spec.delta] = run(spec)
    return out, time.perf_counter() - start


def test_route_equivalence(acceptance):
    dyn.integrate_ode(dyn.excited(), ModelParams(), 1e-3, 2)  # compile outside the timer
    start = time.perf_counter()
    worst = 0.0
    for delta in PANEL:
        p = ModelParams.from_delta(delta)
        for t in (0.1, 1.0, 5.0):
            closed = dyn.evolve_closed_form(dyn.excited(), p, t)
            prop = dyn.evolve_propagator(dyn.excited(), p, t)
            ode = dyn.integrate_ode(dyn.excited(), p, t, 100_000).states[-1]
            worst = max(worst, m2.max_entry(closed - prop), m2.max_entry(closed - ode),
                        m2.max_entry(prop - ode))
    elapsed = time.perf_counter() - start
    acceptance.check(
        "1", "route equivalence", worst < 1e-8 and elapsed < 5.0,
        f"max entry diff {worst:.2e} (< 1e-8), {elapsed:.2f} s (< 5 s)",
    )


def test_conservation(acceptance):
    rng = np.random.default_rng(2024)
    n = 10_000
    deltas = rng.uniform(-15, 15, n)
    times = rng.uniform(0, 20, n)
    times[times == 0] = 20.0
    v = rng.normal(size=(n, 3))
    v *= (rng.uniform(0, 1, n) ** (1 / 3) / np.linalg.norm(v, axis=1))[:, None]
    rho0 = 0.5 * m2.mat(1 + v[:, 2], v[:, 0] - 1j * v[:, 1], v[:, 0] + 1j * v[:, 1], 1 - v[:, 2])
    start = time.perf_counter()
    tr = herm = 0.0
    min_eig = 1.0
    for d, t, r in zip(deltas, times, rho0):
        out = dyn.evolve_closed_form(r, ModelParams.from_delta(d), t)
        tr = max(tr, abs(m2.trace(out) - 1))
        herm = max(herm, m2.max_entry(out - m2.adjoint(out)))
        hermitized = 0.5 * (out + m2.adjoint(out))
        min_eig = min(min_eig, m2.hermitian_eigensystem(hermitized)[0][1])
    elapsed = time.perf_counter() - start
    ok = tr <= 1e-10 and herm <= 1e-10 and min_eig >= -1e-10 and elapsed < 10.0
    acceptance.check(
        "2", "conservation", ok,
        f"{n} samples: |Tr-1| {tr:.1e}, hermiticity {herm:.1e}, min eig {min_eig:.1e}, {elapsed:.2f} s",
    )


def test_bound_validity(acceptance, fig1_rows, scan_rows):
    rows1, t1 = fig1_rows
    scans, t2 = scan_rows
    all_rows = list(rows1) + [r for rows in scans.values() for r in rows]
    violations = sum(r.tau_qsl > 1.0 + 1e-9 or r.tau_qsl < 0 for r in all_rows)
    worst = max(r.tau_qsl for r in all_rows)
    elapsed = t1 + t2
    acceptance.check(
        "3", "bound validity", violations == 0 and elapsed < 60.0,
        f"{len(all_rows)} rows, {violations} violations, max tau_qsl/tau_d {worst:.4f}, {elapsed:.1f} s",
    )


def test_pure_state_reduction(acceptance):
    worst, count = 0.0, 0
    for delta in (-2.5, -1.0, -0.5, 0.0, 0.4, 0.9, 1.0, 1.001, 1.5, 4.0):
        p = ModelParams.from_delta(delta)
        for tau in np.linspace(0.0, 2.0, 10):
            mixed = qsl.window_bound(dyn.excited(), p, tau, 1.0)
            pure = qsl.window_bound(dyn.excited(), p, tau, 1.0, pure=True)
            if mixed.tau_qsl == pure.tau_qsl == 0.0:
                rel = 0.0
            else:
                rel = abs(mixed.tau_qsl - pure.tau_qsl) / max(abs(pure.tau_qsl), abs(mixed.tau_qsl))
            worst = max(worst, rel)
            count += 1
    acceptance.check(
        "4", "pure-state reduction", worst < 1e-9,
        f"{count} windows, max relative difference {worst:.2e} (< 1e-9)",
    )


def test_rabi_anchor(acceptance):
    res = qsl.qsl_pure(dyn.excited(), ModelParams(), math.pi / 2)
    ok = (
        abs(res.distinguishability - 1) <= 1e-9
        and abs(res.lambda_inf - 1) <= 1e-6
        and abs(res.tau_qsl - 1) <= 1e-6
    )
    acceptance.check(
        "5", "Rabi anchor", ok,
        f"sin^2 B = {res.distinguishability:.12f}, Lambda_inf = {res.lambda_inf:.12f}, "
        f"tau_qsl = {res.tau_qsl:.12f}",
    )


def _fig1_arrays(fig1_rows):
    rows, _ = fig1_rows
    return (
        np.array([r.delta for r in rows]),
        np.array([r.population for r in rows]),
        np.array([r.tau_qsl for r in rows]),
    )


def test_fig1_population_monotone(acceptance, fig1_rows):
    delta, pop, _ = _fig1_arrays(fig1_rows)
    inside = (delta > -3) & (delta < 1.5)
    steps = np.diff(pop[inside])
    bad = delta[inside][1:][steps >= 0]
    acceptance.check(
        "6a", "Fig. 1 p strictly decreasing on (-3, 1.5)", bad.size == 0,
        f"{bad.size} non-decreasing steps, first at delta = {bad[0] if bad.size else float('nan'):.3g}; "
        f"p(1) = {pop[np.isclose(delta, 1.0)][0]:.3g}, p(1.45) = {pop[np.isclose(delta, 1.45)][0]:.3g}",
    )


def test_fig1_population_vanishes(acceptance, fig1_rows):
    delta, pop, _ = _fig1_arrays(fig1_rows)
    p15 = pop[np.isclose(delta, 15.0)][0]
    acceptance.check("6b", "Fig. 1 p(15) < 0.01", p15 < 0.01, f"p(15) = {p15:.4g}")


def test_fig1_interior_maximum(acceptance, fig1_rows):
    delta, _, tq = _fig1_arrays(fig1_rows)
    idx = [i for i in range(1, len(delta) - 1)
           if -3 < delta[i] < 1.5 and tq[i] > tq[i - 1] and tq[i] >= tq[i + 1]]
    acceptance.check(
        "6c", "Fig. 1 interior tau_qsl maximum in (-3, 1.5)", bool(idx),
        f"local maxima at delta = {[round(float(delta[i]), 3) for i in idx]}",
    )


def test_fig1_plateau(acceptance, fig1_rows):
    delta, _, tq = _fig1_arrays(fig1_rows)
    q15 = tq[np.isclose(delta, 15.0)][0]
    q14 = tq[np.isclose(delta, 14.0)][0]
    rel = abs(q15 - q14) / q15
    acceptance.check("6d", "Fig. 1 plateau", rel < 0.02, f"|q(15) - q(14)| / q(15) = {rel:.2e} (< 0.02)")


def _measured_period(delta):
    p = ModelParams.from_delta(delta)

    def pop(t):
        return float(dyn.excited_population(dyn.evolve_closed_form(dyn.excited(), p, t)))

    grid = np.linspace(0, 15, 3001)
    vals = dyn.excited_population(dyn.evolve_closed_form(dyn.excited(), p, grid))
    minima = []
    for i in range(1, len(grid) - 1):
        if vals[i] <= vals[i - 1] and vals[i] < vals[i + 1]:
            res = minimize_scalar(pop, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            minima.append(res.x)
    return float(np.mean(np.diff(minima))), len(minima)


def test_fig2_shape(acceptance, scan_rows):
    scans, _ = scan_rows
    details, ok = [], True
    for delta in (0.4, 0.9):
        expected = math.pi / math.sqrt(1 - delta**2)
        period, n = _measured_period(delta)
        # tau_qsl repeats after one period
        shift = max(
            abs(window_row(delta, tau, 1.0).tau_qsl - window_row(delta, tau + expected, 1.0).tau_qsl)
            for tau in (0.5, 1.7, 2.9)
        )
        ok &= abs(period - expected) < 1e-4 and shift < 1e-4
        details.append(f"delta {delta}: P {period:.7f} vs {expected:.7f} ({n} minima), tau_qsl shift {shift:.1e}")
    m04 = min(r.tau_qsl for r in scans[2, 0.4])
    m09 = min(r.tau_qsl for r in scans[2, 0.9])
    ok &= m09 < m04
    details.append(f"min tau_qsl {m09:.4f} (0.9) < {m04:.4f} (0.4)")
    acceptance.check("7", "Fig. 2 shape", ok, "; ".join(details))


def test_fig3_shape(acceptance, scan_rows):
    scans, _ = scan_rows
    details, ok, p_inf = [], True, {}
    for delta in (1.1, 2.5):
        p = ModelParams.from_delta(delta)
        last = scans[3, delta][-1]
        rho50 = dyn.evolve_closed_form(dyn.excited(), p, 50.0)
        gen = m2.schatten_norm(dyn.generator(rho50, p), np.inf)
        p_inf[delta] = float(dyn.excited_population(rho50))
        ok &= last.tau == 15.0 and last.tau_qsl < 1e-3 and gen < 1e-6
        details.append(f"delta {delta}: tau_qsl(15) {last.tau_qsl:.1e}, |L rho|(50) {gen:.1e}")
    ok &= p_inf[2.5] < p_inf[1.1]
    details.append(f"p_inf {p_inf[2.5]:.4f} (2.5) < {p_inf[1.1]:.4f} (1.1)")
    acceptance.check("8", "Fig. 3 shape", ok, "; ".join(details))


def test_infinite_speed_witness(acceptance, scan_rows):
    scans, _ = scan_rows
    found = {}
    for fig, delta in ((4, 0.9), (5, 1.0), (5, -1.0)):
        hits = [r for r in scans[fig, delta] if r.tau_qsl < 0.01 and r.trace_distance > 0.1]
        found[delta] = len(hits)
    acceptance.check(
        "9", "infinite-speed witness", all(found.values()),
        ", ".join(f"delta {d}: {n} rows" for d, n in found.items()),
    )


def test_orders(acceptance):
    worst = 0.0
    for delta in PANEL:
        p = ModelParams.from_delta(delta)
        for rho0, tau in ((dyn.excited(), 0.0), (dyn.mixed(0.6), 3.0)):
            base = qsl.window_bound(rho0, p, tau, 1.0)
            finer = qsl.window_bound(rho0, p, tau, 1.0, nodes=2 * base.nodes - 1, refine=False)
            for k in qsl.NORMS:
                worst = max(worst, abs(base.lambda_p[k] - finer.lambda_p[k]))
    p = ModelParams.from_delta(0.9)
    exact = dyn.evolve_closed_form(dyn.excited(), p, 5.0)
    e1 = m2.max_entry(dyn.integrate_ode(dyn.excited(), p, 5.0, 1000).states[-1] - exact)
    e2 = m2.max_entry(dyn.integrate_ode(dyn.excited(), p, 5.0, 2000).states[-1] - exact)
    ratio = e1 / e2
    acceptance.check(
        "10", "quadrature and integrator orders", worst < 1e-8 and abs(ratio - 16) <= 0.3 * 16,
        f"Simpson doubling max change {worst:.1e} (< 1e-8), RK4 ratio {ratio:.2f} (16 +- 30%)",
    )


def _cli_sweep(figure, workers, dest):
    subprocess.run(
        [sys.executable, "-m", "qsl_lab", "sweep", "--figure", str(figure),
         "--workers", str(workers), "--out", str(dest / f"fig{figure}.csv")],
        check=True, capture_output=True,
    )
    return {p.name: p.read_bytes() for p in sorted(dest.glob(f"fig{figure}*.csv"))}


def test_determinism(acceptance, tmp_path):
    mismatched = []
    files = 0
    for figure in range(1, 6):
        outs = []
        for k, workers in enumerate((1, 1, 3)):
            d = tmp_path / f"run{k}"
            d.mkdir(exist_ok=True)
            outs.append(_cli_sweep(figure, workers, d))
        files += len(outs[0])
        if not (outs[0] == outs[1] == outs[2]) or not outs[0]:
            mismatched.append(figure)
    acceptance.check(
        "11", "determinism", not mismatched,
        f"{files} CSV files byte-identical across 2 serial runs and a 3-worker run"
        if not mismatched else f"figures {mismatched} differ",
    )
