"""Parameter sweeps behind the detuning and initial-time scans, with CSV output.

Two kinds of sweep:

``fig1``
    Scan the detuning ``delta`` at fixed driving time, starting from the
    excited state; one row per ``delta``.
``tau-scan``
    Fix ``delta`` and move the start ``tau`` of the window
    ``[tau, tau + tau_d]`` along one continuous evolution from t = 0.

Rows are computed independently (optionally in worker processes) and sorted
by key before they are returned, so output never depends on scheduling.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

import numpy as np

from .dynamics import (
    ModelParams,
    Regime,
    evolve_closed_form,
    excited_population,
    parse_initial,
)
from .qsl import relative_purity, trace_distance, window_bound

FIG1 = "fig1"
TAU_SCAN = "tau-scan"

CSV_HEADER = (
    "delta",
    "tau",
    "tau_qsl",
    "population",
    "trace_distance",
    "relative_purity",
    "lambda_inf",
    "regime",
)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep. ``initial`` is ``"excited"``, ``"ground"`` or ``"mixed:<p>"``."""

    kind: str = FIG1
    delta: float = 0.0
    delta_min: float = -15.0
    delta_max: float = 15.0
    delta_steps: int = 601
    tau_d: float = 1.0
    tau_max: float = 15.0
    tau_steps: int = 400
    initial: str = "excited"
    nodes: int | None = None
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in (FIG1, TAU_SCAN):
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if not self.tau_d > 0:
            raise ValueError("tau_d must be positive")
        if self.kind == FIG1:
            if self.delta_steps < 2 or not self.delta_max > self.delta_min:
                raise ValueError("fig1 needs delta_steps >= 2 and delta_max > delta_min")
            if self.initial != "excited":
                raise ValueError("fig1 sweeps start from the excited state")
        else:
            if self.tau_steps < 2 or not self.tau_max > 0:
                raise ValueError("tau-scan needs tau_steps >= 2 and tau_max > 0")
        if self.nodes is not None and (self.nodes < 3 or self.nodes % 2 == 0):
            raise ValueError("nodes must be odd and >= 3")
        parse_initial(self.initial)

    def grid(self) -> np.ndarray:
        if self.kind == FIG1:
            return np.linspace(self.delta_min, self.delta_max, self.delta_steps)
        return np.linspace(0.0, self.tau_max, self.tau_steps)


@dataclass(frozen=True)
class SweepRow:
    delta: float
    tau: float | None
    tau_qsl: float
    population: float
    trace_distance: float
    relative_purity: float
    lambda_inf: float
    regime: Regime

    def key(self):
        return (self.delta, -1.0 if self.tau is None else self.tau)


def fig1_row(delta: float, spec: SweepSpec) -> SweepRow:
    params = ModelParams.from_delta(float(delta), spec.omega)
    rho0 = parse_initial(spec.initial)
    res = window_bound(rho0, params, 0.0, spec.tau_d, spec.nodes, pure=True)
    rho_end = evolve_closed_form(rho0, params, spec.tau_d)
    return SweepRow(
        delta=float(delta),
        tau=None,
        tau_qsl=res.tau_qsl,
        population=float(excited_population(rho_end)),
        trace_distance=float(trace_distance(rho0, rho_end)),
        relative_purity=relative_purity(rho0, rho_end),
        lambda_inf=res.lambda_inf,
        regime=params.regime,
    )


def window_row(
    delta: float,
    tau: float,
    tau_d: float,
    initial: str = "excited",
    nodes: int | None = None,
    omega: float = 1.0,
) -> SweepRow:
    """One row for the window [tau, tau + tau_d] of the orbit started at t = 0."""
    params = ModelParams.from_delta(float(delta), omega)
    rho0 = parse_initial(initial)
    tau = float(tau)
    # the pure-state bound is used for the very first window of a pure start
    pure = tau == 0.0 and initial in ("excited", "ground")
    res = window_bound(rho0, params, tau, tau_d, nodes, pure=pure)
    rho_tau, rho_end = evolve_closed_form(rho0, params, np.array([tau, tau + tau_d]))
    return SweepRow(
        delta=float(delta),
        tau=tau,
        tau_qsl=res.tau_qsl,
        population=float(excited_population(rho_tau)),
        trace_distance=float(trace_distance(rho_tau, rho_end)),
        relative_purity=relative_purity(rho_tau, rho_end),
        lambda_inf=res.lambda_inf,
        regime=params.regime,
    )


def tau_row(tau: float, spec: SweepSpec) -> SweepRow:
    return window_row(spec.delta, tau, spec.tau_d, spec.initial, spec.nodes, spec.omega)


def _rows_chunk(args) -> list[SweepRow]:
    kind, points, spec = args
    fn = fig1_row if kind == FIG1 else tau_row
    return [fn(x, spec) for x in points]


def _run(spec: SweepSpec, workers: int) -> list[SweepRow]:
    points = spec.grid()
    if workers <= 1:
        rows = _rows_chunk((spec.kind, points, spec))
    else:
        chunks = [c for c in np.array_split(points, 4 * workers) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_rows_chunk, [(spec.kind, c, spec) for c in chunks])
            rows = [r for part in parts for r in part]
    return sorted(rows, key=SweepRow.key)


def run_fig1(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Pure-state bound and final population for every delta on the grid."""
    if spec.kind != FIG1:
        raise ValueError("run_fig1 needs a fig1 spec")
    return _run(spec, workers)


def run_tau_scan(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Bound, population, trace distance and relative purity along tau."""
    if spec.kind != TAU_SCAN:
        raise ValueError("run_tau_scan needs a tau-scan spec")
    return _run(spec, workers)


def run(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    return run_fig1(spec, workers) if spec.kind == FIG1 else run_tau_scan(spec, workers)


# -- figure presets -----------------------------------------------------------------

FIGURE_DELTAS = {2: (0.4, 0.9), 3: (1.1, 2.5), 4: (0.6, 0.9), 5: (1.0, -1.0)}


def figure_specs(figure: int, **overrides) -> list[SweepSpec]:
    """Specs reproducing one figure; one spec per delta for figures 2-5.

    Keyword overrides replace preset fields. Overriding ``delta`` collapses
    the preset list to that single value.
    """
    if figure == 1:
        return [replace(SweepSpec(kind=FIG1), **overrides)]
    if figure not in FIGURE_DELTAS:
        raise ValueError(f"no preset for figure {figure}")
    base = dict(kind=TAU_SCAN, tau_d=1.0, tau_steps=400)
    if figure in (2, 3):
        base.update(tau_max=15.0, initial="excited")
    else:
        base.update(tau_max=20.0, initial="mixed:0.6")
    deltas = FIGURE_DELTAS[figure]
    if "delta" in overrides:
        deltas = (overrides.pop("delta"),)
    base.update(overrides)
    return [SweepSpec(delta=d, **base) for d in deltas]


# -- CSV ------------------------------------------------------------------------------


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in sweep row")
    out = format(x, ".12g")
    return "0" if out == "-0" else out


def format_row(row: SweepRow) -> list[str]:
    return [
        _fmt(row.delta),
        "" if row.tau is None else _fmt(row.tau),
        _fmt(row.tau_qsl),
        _fmt(row.population),
        _fmt(row.trace_distance),
        _fmt(row.relative_purity),
        _fmt(row.lambda_inf),
        row.regime.value,
    ]


def write_csv(rows: Iterable[SweepRow], stream: TextIO, header: bool = True):
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(format_row(row))


def emit_csv(rows: list[SweepRow], destination) -> None:
    """Write rows as CSV to a path or an open text stream.

    Formatting is fixed (12 significant digits, ``\\n`` line endings), so
    identical rows give byte-identical output.

    Raises:
        OSError: if the destination cannot be written.
    """
    if not rows:
        raise ValueError("no rows to write")
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, destination)


def to_csv_string(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    emit_csv(rows, buf)
    return buf.getvalue()
