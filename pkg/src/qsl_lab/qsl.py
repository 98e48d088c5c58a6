"""Distinguishability measures and quantum-speed-limit bounds.

Two bounds are provided:

* :func:`qsl_pure` -- pure initial state, time-averaged Schatten norms of the
  generator and the Bures angle to the target state;
* :func:`qsl_mixed` -- arbitrary initial state, relative purity and the
  singular values of both the generator and the initial state.

Time averages use composite Simpson quadrature. Unless refinement is switched off,
the grid is refined (N -> 2N - 1) until successive averages agree to 1e-8.

Reference case (no detuning, start in |1><1|): the Bloch vector rotates
rigidly, L_t rho_t = i [sigma_x, rho_t] has singular values (1, 1) at every
time, so Lambda^1 = 2, Lambda^2 = sqrt(2) and Lambda^inf = 1. The overlap with
the start is cos^2 t, so at tau_d = pi/2 the states are orthogonal, sin^2 B = 1
and tau_qsl = 1 exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from . import matrix2 as m2
from .dynamics import (
    ModelParams,
    Trajectory,
    check_state,
    evolve_closed_form,
    sample_trajectory,
)
from .errors import (
    BadGrid,
    DegeneratePurity,
    NotPure,
    NumericalDomain,
    QuadratureNonconvergent,
)

PURITY_ATOL = 1e-8
CLAMP_ATOL = 1e-12
IDENTICAL_ATOL = 1e-14
QUADRATURE_TOL = 1e-8
NODES_PER_UNIT = 200
MIN_NODES = 201
MAX_NODES = 3201
NORMS = (1, 2, math.inf)


class BoundKind(enum.Enum):
    PURE_STATE = "pure_state"
    MIXED_STATE = "mixed_state"


@dataclass(frozen=True)
class QslResult:
    """Outcome of one bound evaluation.

    ``lambda_p`` maps the Schatten index (1, 2, ``math.inf``) to the
    time-averaged generator norm. ``mixed_terms`` holds the averages of
    sum(sigma_i * varrho_i) and sqrt(sum(sigma_i**2)) for the mixed bound.
    """

    tau_d: float
    lambda_p: dict
    distinguishability: float
    tau_qsl: float
    bound_kind: BoundKind
    mixed_terms: tuple[float, float] | None = None
    nodes: int = 0

    @property
    def lambda_inf(self) -> float:
        return self.lambda_p[math.inf]


def _clamp(x: float, lo: float, hi: float, what: str) -> float:
    if x < lo - CLAMP_ATOL or x > hi + CLAMP_ATOL:
        raise NumericalDomain(f"{what} = {x!r} outside [{lo}, {hi}]")
    return min(max(x, lo), hi)


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(m2.trace(rho @ rho)))


def bures_angle(psi0, rho) -> float:
    """arccos sqrt(<psi0|rho|psi0>) for a pure reference state ``psi0``."""
    psi0 = check_state(psi0)
    rho = check_state(rho)
    if purity(psi0) < 1.0 - PURITY_ATOL:
        raise NotPure(f"reference state has purity {purity(psi0):.3e}")
    overlap = _clamp(float(np.real(m2.trace(psi0 @ rho))), 0.0, 1.0, "overlap")
    return math.acos(math.sqrt(overlap))


def relative_purity(rho_tau, rho_end) -> float:
    """Tr(rho_end rho_tau) / Tr(rho_tau^2)."""
    rho_tau = np.asarray(rho_tau, dtype=complex)
    pur = purity(rho_tau)
    if not pur > IDENTICAL_ATOL:
        raise DegeneratePurity(f"Tr(rho^2) = {pur:.3e}")
    return float(np.real(m2.trace(np.asarray(rho_end) @ rho_tau))) / pur


def trace_distance(rho1, rho2):
    """Half the sum of |eigenvalues| of rho1 - rho2; broadcasts over stacks."""
    diff = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)
    values, _ = m2.hermitian_eigensystem(diff)
    return 0.5 * np.sum(np.abs(values), axis=-1)


def _check_grid(traj: Trajectory):
    n = len(traj)
    if n < 3 or n % 2 == 0:
        raise BadGrid(f"Simpson needs an odd node count >= 3, got {n}")


def time_average(traj: Trajectory, values: np.ndarray) -> float:
    """Composite-Simpson mean of ``values`` over the trajectory window."""
    _check_grid(traj)
    return float(simpson(values, x=traj.times) / traj.duration)


def averaged_schatten(traj: Trajectory, p) -> float:
    """Time average of ||L_t rho_t||_p over the trajectory window."""
    _check_grid(traj)
    return time_average(traj, m2.schatten_norm(traj.generators, p))


def default_nodes(tau_d: float) -> int:
    return max(MIN_NODES, 2 * math.ceil(0.5 * NODES_PER_UNIT * tau_d) + 1)


def _refine(sample: Callable[[int], Trajectory], averages, nodes: int, refine: bool):
    """Evaluate ``averages`` on successively doubled grids until stable.

    Starts at ``nodes`` and goes N -> 2N - 1 until two consecutive grids agree
    to QUADRATURE_TOL. Returns the finest trajectory and its averages.
    """
    if nodes < 3 or nodes % 2 == 0:
        raise BadGrid(f"Simpson needs an odd node count >= 3, got {nodes}")
    traj = sample(nodes)
    prev = averages(traj)
    if not refine:
        return traj, prev
    cap = max(MAX_NODES, 16 * (nodes - 1) + 1)
    n = nodes
    while True:
        n = 2 * n - 1
        if n > cap:
            raise QuadratureNonconvergent(
                f"averages still moving by > {QUADRATURE_TOL:g} at {cap} nodes"
            )
        traj = sample(n)
        cur = averages(traj)
        if np.max(np.abs(cur - prev)) < QUADRATURE_TOL:
            return traj, cur
        prev = cur


def _norm_averages(traj: Trajectory) -> np.ndarray:
    s = m2.singular_values(traj.generators)
    norms = np.stack([s[:, 0] + s[:, 1], np.hypot(s[:, 0], s[:, 1]), s[:, 0]])
    return np.array([time_average(traj, row) for row in norms])


def _check_norm_order(lam: np.ndarray):
    l1, l2, linf = lam
    slack = 1e-12 * (1.0 + l1)
    if not (linf <= l2 + slack and l2 <= l1 + slack):
        raise NumericalDomain(f"averaged norms out of order: {lam}")


def _pure_from(sample, tau_d: float, nodes: int, refine: bool) -> QslResult:
    traj, lam = _refine(sample, _norm_averages, nodes, refine)
    _check_norm_order(lam)
    psi0, rho_end = traj.states[0], traj.states[-1]
    if purity(psi0) < 1.0 - PURITY_ATOL:
        raise NotPure(f"initial state has purity {purity(psi0):.3e}")
    # sin^2 of the Bures angle, 1 - <psi0|rho|psi0>, formed from the state
    # difference so that a window with no motion gives exactly zero
    dist = _clamp(float(np.real(m2.trace((psi0 - rho_end) @ psi0))), 0.0, 1.0, "1 - overlap")
    if dist < IDENTICAL_ATOL:
        tau_qsl = 0.0
    else:
        tau_qsl = dist * float(max(1.0 / lam[0], 1.0 / lam[1], 1.0 / lam[2]))
    return QslResult(
        tau_d=tau_d,
        lambda_p=dict(zip(NORMS, map(float, lam))),
        distinguishability=dist,
        tau_qsl=tau_qsl,
        bound_kind=BoundKind.PURE_STATE,
        nodes=len(traj),
    )


def _mixed_averages(weights: np.ndarray):
    def averages(traj: Trajectory) -> np.ndarray:
        s = m2.singular_values(traj.generators)
        paired = s @ weights
        root = np.hypot(s[:, 0], s[:, 1])
        return np.concatenate(
            [_norm_averages(traj), [time_average(traj, paired), time_average(traj, root)]]
        )

    return averages


def _mixed_from(
    sample, rho_tau: np.ndarray, tau_d: float, nodes: int, refine: bool
) -> QslResult:
    values, _ = m2.hermitian_eigensystem(rho_tau)
    # descending eigenvalues are the singular values of a positive matrix
    weights = np.clip(values, 0.0, None)
    traj, avg = _refine(sample, _mixed_averages(weights), nodes, refine)
    lam, paired, root = avg[:3], avg[3], avg[4]
    _check_norm_order(lam)
    if paired > root * (1.0 + 1e-12) + 1e-15:
        raise NumericalDomain(f"Cauchy-Schwarz violated: {paired} > {root}")
    pur = purity(rho_tau)
    if not pur > IDENTICAL_ATOL:
        raise DegeneratePurity(f"Tr(rho^2) = {pur:.3e}")
    rho_end = traj.states[-1]
    # |f - 1| Tr(rho^2) = |Tr((rho_end - rho_tau) rho_tau)|, without cancellation
    dist = abs(float(np.real(m2.trace((rho_end - rho_tau) @ rho_tau))))
    if dist < IDENTICAL_ATOL:
        tau_qsl = 0.0
    else:
        tau_qsl = dist * float(max(1.0 / paired, 1.0 / root))
    return QslResult(
        tau_d=tau_d,
        lambda_p=dict(zip(NORMS, map(float, lam))),
        distinguishability=dist,
        tau_qsl=tau_qsl,
        bound_kind=BoundKind.MIXED_STATE,
        mixed_terms=(float(paired), float(root)),
        nodes=len(traj),
    )


def qsl_pure(
    psi0, params: ModelParams, tau_d: float, nodes: int | None = None, *, refine: bool = True
) -> QslResult:
    """Speed-limit time from a pure state over the driving time ``tau_d``.

    ``nodes`` is the starting Simpson grid (default: 201 per unit of
    ``tau_d``). With ``refine`` the grid is doubled until the averaged norms
    settle; otherwise it is used as given.
    """
    psi0 = check_state(psi0)
    if purity(psi0) < 1.0 - PURITY_ATOL:
        raise NotPure(f"initial state has purity {purity(psi0):.3e}")
    if not tau_d > 0:
        raise ValueError("tau_d must be positive")
    nodes = default_nodes(tau_d) if nodes is None else nodes
    return _pure_from(
        lambda n: sample_trajectory(psi0, params, 0.0, tau_d, n), tau_d, nodes, refine
    )


def qsl_mixed(
    rho_tau,
    params: ModelParams,
    tau: float,
    tau_d: float,
    nodes: int | None = None,
    *,
    refine: bool = True,
) -> QslResult:
    """Relative-purity bound for the window [tau, tau + tau_d].

    ``rho_tau`` is the state at time ``tau``; the window is evolved onward
    from it. The dynamics is time-homogeneous, so ``tau`` only labels the
    trajectory times.
    """
    rho_tau = check_state(rho_tau)
    if tau < 0 or not tau_d > 0:
        raise ValueError("need tau >= 0 and tau_d > 0")

    def sample(n):
        return sample_trajectory(rho_tau, params, 0.0, tau_d, n).shifted(tau)

    nodes = default_nodes(tau_d) if nodes is None else nodes
    return _mixed_from(sample, rho_tau, tau_d, nodes, refine)


def window_bound(
    rho0,
    params: ModelParams,
    tau: float,
    tau_d: float,
    nodes: int | None = None,
    *,
    pure: bool = False,
    refine: bool = True,
) -> QslResult:
    """Bound on [tau, tau + tau_d] sampled from one continuous evolution of rho0.

    This is what the sweeps use: every window shares the orbit that starts at
    t = 0. ``pure=True`` selects the pure-state bound.
    """
    rho0 = check_state(rho0)
    if tau < 0 or not tau_d > 0:
        raise ValueError("need tau >= 0 and tau_d > 0")

    def sample(n):
        return sample_trajectory(rho0, params, tau, tau + tau_d, n)

    nodes = default_nodes(tau_d) if nodes is None else nodes
    if pure:
        return _pure_from(sample, tau_d, nodes, refine)
    rho_tau = evolve_closed_form(rho0, params, tau)
    return _mixed_from(sample, rho_tau, tau_d, nodes, refine)
