"""Qubit dynamics under the non-Hermitian detuning Hamiltonian.

    H = -omega * sigma_x - i * gamma * sigma_z = H_plus - i * Gamma

Basis convention: ``|1> = (1, 0)`` is the excited level and
``sigma_z |1> = +|1>``, so positive ``gamma`` drains the excited population.

States are evolved three ways:

* :func:`evolve_closed_form` -- explicit matrix elements in terms of
  ``gamma1 = sqrt(delta**2 - 1)``;
* :func:`evolve_propagator` -- ``U rho U^dag / Tr(U rho U^dag)`` with
  ``U = exp(-i H t)``;
* :func:`integrate_ode` -- fixed-step RK4 on the normalized equation of
  motion, used as an independent oracle.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from . import matrix2 as m2
from .errors import BadGrid, DegenerateNormalization, InvalidState, StepOverflow

STATE_ATOL = 1e-10
EXCEPTIONAL_ATOL = 1e-12
# below this |gamma1| the closed form switches to its series limit
SERIES_CUTOFF = 1e-4
MIN_NORMALIZATION = 1e-14
OVERFLOW_LIMIT = 1e12


class Regime(enum.Enum):
    PT_SYMMETRIC = "pt_symmetric"
    EXCEPTIONAL_POINT = "exceptional_point"
    PT_BROKEN = "pt_broken"


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``omega`` and non-Hermitian detuning ``gamma`` (hbar = 1)."""

    omega: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.gamma)):
            raise ValueError("omega and gamma must be finite")
        if self.omega == 0:
            raise ValueError("omega must be nonzero")

    @classmethod
    def from_delta(cls, delta: float, omega: float = 1.0) -> "ModelParams":
        return cls(omega=omega, gamma=delta * omega)

    @property
    def delta(self) -> float:
        return self.gamma / self.omega

    @property
    def gamma1(self) -> complex:
        """Principal sqrt(delta^2 - 1): imaginary inside |delta| < 1, real outside."""
        return cmath.sqrt(complex(self.delta**2 - 1.0, 0.0))

    @property
    def regime(self) -> Regime:
        a = abs(self.delta)
        if abs(a - 1.0) <= EXCEPTIONAL_ATOL:
            return Regime.EXCEPTIONAL_POINT
        return Regime.PT_SYMMETRIC if a < 1.0 else Regime.PT_BROKEN


@dataclass(frozen=True)
class Trajectory:
    """States and generator values ``L_t rho_t`` on a uniform time grid."""

    times: np.ndarray
    states: np.ndarray
    generators: np.ndarray

    def __len__(self):
        return len(self.times)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def shifted(self, offset: float) -> "Trajectory":
        return Trajectory(self.times + offset, self.states, self.generators)


# -- states -----------------------------------------------------------------


def excited() -> np.ndarray:
    return m2.mat(1, 0, 0, 0)


def ground() -> np.ndarray:
    return m2.mat(0, 0, 0, 1)


def mixed(p: float) -> np.ndarray:
    """(1 - p/2)|1><1| + (p/2)|0><0| for 0 < p < 1."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"mixing parameter must lie in (0, 1), got {p}")
    return m2.mat(1.0 - 0.5 * p, 0, 0, 0.5 * p)


def parse_initial(text: str) -> np.ndarray:
    """Initial state from ``excited``, ``ground`` or ``mixed:<p>``."""
    name, _, arg = text.partition(":")
    if name == "excited" and not arg:
        return excited()
    if name == "ground" and not arg:
        return ground()
    if name == "mixed" and arg:
        try:
            p = float(arg)
        except ValueError:
            raise ValueError(f"bad mixing parameter {arg!r}") from None
        return mixed(p)
    raise ValueError(f"unknown initial state {text!r}")


def state_violation(rho: np.ndarray) -> np.ndarray:
    """Worst of Hermiticity error, trace error and negative eigenvalue depth."""
    rho = m2.as_matrix(rho)
    herm = m2.max_entry(rho - m2.adjoint(rho))
    tr = np.abs(m2.trace(rho) - 1.0)
    hs = 0.5 * (rho + m2.adjoint(rho))
    # smallest eigenvalue of the Hermitian part, closed form
    a, d = hs[..., 0, 0].real, hs[..., 1, 1].real
    lam_min = 0.5 * (a + d) - np.hypot(0.5 * (a - d), np.abs(hs[..., 0, 1]))
    return np.maximum(np.maximum(herm, tr), -lam_min)


def check_state(rho, atol: float = STATE_ATOL) -> np.ndarray:
    """Return ``rho`` as an array, or raise InvalidState."""
    rho = m2.as_matrix(rho)
    if not np.all(np.isfinite(rho)):
        raise InvalidState("density matrix has non-finite entries")
    worst = float(np.max(state_violation(rho)))
    if worst > atol:
        raise InvalidState(f"not a density matrix (violation {worst:.3e})")
    return rho


def excited_population(rho: np.ndarray):
    """Real part of rho[0, 0], clamped to [0, 1]."""
    return np.clip(np.asarray(rho)[..., 0, 0].real, 0.0, 1.0)


# -- model --------------------------------------------------------------------


def hamiltonian(params: ModelParams) -> np.ndarray:
    d = params.delta
    return -params.omega * m2.mat(1j * d, 1, 1, -1j * d)


def hermitian_part(params: ModelParams) -> np.ndarray:
    return -params.omega * m2.SIGMA_X


def decay_operator(params: ModelParams) -> np.ndarray:
    return params.gamma * m2.SIGMA_Z


def energy_eigenvalues(params: ModelParams) -> tuple[complex, complex]:
    e = params.omega * cmath.sqrt(complex(1.0 - params.delta**2, 0.0))
    return e, -e


def propagator(params: ModelParams, t) -> np.ndarray:
    """U = exp(-i H t); non-unitary whenever gamma != 0."""
    t = np.asarray(t, dtype=float)
    return m2.expm(-1j * t[..., None, None] * hamiltonian(params))


# -- evolution ------------------------------------------------------------------


def _window_functions(z: float, s: np.ndarray):
    """cosh^2(g s), sinh^2(g s)/g^2 and sinh(2 g s)/g with g = sqrt(z), z real.

    All three are multiplied by a common factor exp(-2|Re g s|); the factor
    cancels on normalization and keeps large |g s| finite.
    """
    g = math.sqrt(abs(z))
    x = g * s
    if g < SERIES_CUTOFF:
        # z * s^2 is (g s)^2 with sign: positive for real g, negative for imaginary
        u = z * s * s
        c = 1.0 + u / 2.0 + u * u / 24.0
        sq = s * s * (1.0 + u / 3.0 + 2.0 * u * u / 45.0)
        return c * c, sq, 2.0 * s * (1.0 + 2.0 * u / 3.0 + 2.0 * u * u / 15.0)
    if z < 0.0:
        return np.cos(x) ** 2, np.sin(x) ** 2 / g**2, np.sin(2.0 * x) / g
    e = np.exp(-2.0 * np.abs(x))
    ch = 0.5 * (1.0 + e)
    sh = 0.5 * (1.0 - e)
    return ch * ch, sh * sh / z, np.sign(x) * (1.0 - e * e) / (2.0 * g)


def _closed_form(rho0: np.ndarray, params: ModelParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    d = params.delta
    z = d * d - 1.0
    c2, sq, x = _window_functions(z, params.omega * t)
    r11 = rho0[..., 0, 0]
    r12 = rho0[..., 0, 1]
    r21 = rho0[..., 1, 0]
    r22 = rho0[..., 1, 1]
    coh = r12 - r21
    n11 = r11 * c2 + (1.0 + z * r11 + 1j * d * coh) * sq - (d * r11 + 0.5j * coh) * x
    n12 = r12 * c2 + (1j * d - d * d * r12 + r21) * sq + 0.5j * (1.0 - 2.0 * r11) * x
    n22 = r22 * c2 + (r11 + 1j * d * coh + d * d * r22) * sq + (d * r22 + 0.5j * coh) * x
    norm = (n11 + n22).real
    if np.any(~(norm >= MIN_NORMALIZATION)):
        raise DegenerateNormalization(
            f"Tr(U rho U^dag) = {np.min(norm):.3e} at delta={d}"
        )
    p11 = n11.real / norm
    p12 = n12 / norm
    return m2.mat(p11, p12, np.conj(p12), 1.0 - p11)


def evolve_closed_form(rho0, params: ModelParams, t) -> np.ndarray:
    """Normalized state at time(s) ``t`` from the explicit matrix elements.

    ``t`` may be an array; the result then has shape ``t.shape + (2, 2)``.
    Near the exceptional point (|gamma1| < 1e-4) the hyperbolic functions are
    replaced by their series limits.
    """
    rho0 = check_state(rho0)
    return _closed_form(rho0, params, t)


def evolve_propagator(rho0, params: ModelParams, t) -> np.ndarray:
    rho0 = check_state(rho0)
    # overflow surfaces as a non-finite norm and is reported below
    with np.errstate(over="ignore", invalid="ignore"):
        u = propagator(params, t)
        out = u @ rho0 @ m2.adjoint(u)
        norm = m2.trace(out).real
    if np.any(~(norm >= MIN_NORMALIZATION)) or not np.all(np.isfinite(out)):
        raise DegenerateNormalization(f"Tr(U rho U^dag) = {np.min(norm):.3e}")
    out = out / norm[..., None, None]
    return 0.5 * (out + m2.adjoint(out))


def generator(rho: np.ndarray, params: ModelParams) -> np.ndarray:
    """L rho = -i[H_plus, rho] - {Gamma, rho} + 2 Tr(rho Gamma) rho."""
    rho = m2.as_matrix(rho)
    w, g = params.omega, params.gamma
    a, b = rho[..., 0, 0], rho[..., 0, 1]
    c, d = rho[..., 1, 0], rho[..., 1, 1]
    # entrywise: -i[H_plus, rho] = i w [sx, rho]; {Gamma, rho} = g diag(2a, -2d)
    tr = 2.0 * g * (a - d)
    return m2.mat(
        1j * w * (c - b) + (tr - 2.0 * g) * a,
        1j * w * (d - a) + tr * b,
        1j * w * (a - d) + tr * c,
        1j * w * (b - c) + (tr + 2.0 * g) * d,
    )


def sample_trajectory(
    rho0, params: ModelParams, t_start: float, t_end: float, nodes: int
) -> Trajectory:
    """Closed-form states on ``nodes`` equally spaced times in [t_start, t_end].

    The states come from one continuous evolution of ``rho0`` starting at
    t = 0, so ``t_start > 0`` samples a later window of the same orbit.
    """
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    if nodes < 3 or nodes % 2 == 0:
        raise BadGrid(f"nodes must be odd and >= 3, got {nodes}")
    times = np.linspace(t_start, t_end, nodes)
    states = evolve_closed_form(rho0, params, times)
    return Trajectory(times, states, generator(states, params))


@numba.njit(cache=True)
def _rhs(a, b, c, d, omega, gamma):
    # entries of L rho for rho = [[a, b], [c, d]]; -i[-omega sx, rho] = i omega [sx, rho]
    w = 1j * omega
    tr = 2.0 * gamma * (a - d)
    return (
        w * (c - b) - 2.0 * gamma * a + tr * a,
        w * (d - a) + tr * b,
        w * (a - d) + tr * c,
        w * (b - c) + 2.0 * gamma * d + tr * d,
    )


@numba.njit(cache=True)
def _rk4(rho0, omega, gamma, dt, steps, limit):
    out = np.empty((steps + 1, 2, 2), dtype=np.complex128)
    out[0] = rho0
    a, b, c, d = rho0[0, 0], rho0[0, 1], rho0[1, 0], rho0[1, 1]
    h = 0.5 * dt
    for n in range(steps):
        k1a, k1b, k1c, k1d = _rhs(a, b, c, d, omega, gamma)
        k2a, k2b, k2c, k2d = _rhs(
            a + h * k1a, b + h * k1b, c + h * k1c, d + h * k1d, omega, gamma
        )
        k3a, k3b, k3c, k3d = _rhs(
            a + h * k2a, b + h * k2b, c + h * k2c, d + h * k2d, omega, gamma
        )
        k4a, k4b, k4c, k4d = _rhs(
            a + dt * k3a, b + dt * k3b, c + dt * k3c, d + dt * k3d, omega, gamma
        )
        w = dt / 6.0
        a = a + w * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + w * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        c = c + w * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        d = d + w * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        if not (abs(a) <= limit and abs(b) <= limit and abs(c) <= limit and abs(d) <= limit):
            return out, n + 1
        # re-Hermitize, then rescale to unit trace
        off = 0.5 * (b + np.conj(c))
        norm = a.real + d.real
        a = a.real / norm + 0j
        d = d.real / norm + 0j
        b = off / norm
        c = np.conj(b)
        out[n + 1, 0, 0] = a
        out[n + 1, 0, 1] = b
        out[n + 1, 1, 0] = c
        out[n + 1, 1, 1] = d
    return out, -1


def integrate_ode(rho0, params: ModelParams, t_end: float, steps: int) -> Trajectory:
    """Classical RK4 on the normalized equation of motion.

    The state is re-Hermitized and rescaled to unit trace after every step.
    Global error is O(steps**-4).

    Raises:
        StepOverflow: if an intermediate entry grows past 1e12.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    rho0 = np.ascontiguousarray(check_state(rho0))
    dt = t_end / steps
    states, failed = _rk4(
        rho0, float(params.omega), float(params.gamma), dt, int(steps), OVERFLOW_LIMIT
    )
    if failed >= 0:
        raise StepOverflow(f"state entry exceeded {OVERFLOW_LIMIT:g} at step {failed}")
    times = np.linspace(0.0, t_end, steps + 1)
    return Trajectory(times, states, generator(states, params))
