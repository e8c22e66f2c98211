"""Relativistic point charges driven by pulse fields.

The equation of motion is integrated in Cartesian coordinates, where the
connection coefficients vanish, with proper time ``tau`` (units ``ell0/c``)
as the independent variable::

    dx^mu/dtau = V^mu
    dV^mu/dtau = sign * F^mu_nu V^nu

``F`` already carries the amplitude ``lam``, so the reduced equation depends
on the particle only through the charge sign. This follows from choosing the
SI fields as::

    E = (m c^2 / (|q| ell0)) e(x/ell0, c t/ell0)
    B = (m c   / (|q| ell0)) b(x/ell0, c t/ell0)

Substituting into ``d(gamma m v)/dt = q (E + v x B)`` with ``t = ell0 T/c``
gives the reduced form above; :func:`integrate_si` integrates the dimensional
equations directly and is used to check this mapping.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np
from scipy import constants
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .chiral import METRIC, EMFieldSample, Pulse, SuperpositionSpec, assemble_tensor
from .scalar import PulseParams

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    """Integration stopped early; ``last_state`` is the last accepted state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class FieldSource(Protocol):
    def fields(self, t, x, y, z) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class UniformField:
    """Constant ``e`` and ``b``; handy for analytic checks."""

    e: tuple = (0.0, 0.0, 0.0)
    b: tuple = (0.0, 0.0, 0.0)

    def fields(self, t, x, y, z):
        shape = np.broadcast(np.asarray(t), np.asarray(x), np.asarray(y), np.asarray(z)).shape
        e = np.broadcast_to(np.asarray(self.e, float), shape + (3,))
        b = np.broadcast_to(np.asarray(self.b, float), shape + (3,))
        return e, b


def minkowski_dot(a, b):
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


@dataclass(frozen=True)
class ParticleState:
    """4-position ``xi = (t, x, y, z)``, 4-velocity ``v`` and proper time ``tau``."""

    xi: np.ndarray
    v: np.ndarray
    tau: float = 0.0

    @classmethod
    def at(cls, position, velocity=(0.0, 0.0, 0.0), t: float = 0.0, tau: float = 0.0) -> ParticleState:
        """On-shell state from a position and a 3-velocity in units of ``c``."""
        beta = np.asarray(velocity, dtype=float)
        speed2 = float(beta @ beta)
        if speed2 >= 1.0:
            raise ValueError(f"speed must be below c, got |v| = {np.sqrt(speed2)}")
        gamma = 1.0 / np.sqrt(1.0 - speed2)
        xi = np.concatenate([[t], np.asarray(position, dtype=float)])
        return cls(xi=xi, v=np.concatenate([[gamma], gamma * beta]), tau=tau)

    @property
    def gamma(self) -> float:
        return float(self.v[0])

    @property
    def shell_error(self) -> float:
        return float(abs(minkowski_dot(self.v, self.v) + 1.0))


@dataclass(frozen=True)
class CouplingSpec:
    """Field amplitude and charge sign entering the reduced equation of motion."""

    lam: float
    sign: int = -1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("charge sign must be +1 or -1")
        if not self.lam >= 0:
            raise ValueError("lam must be non-negative")

    @classmethod
    def from_params(cls, params: PulseParams, sign: int = -1) -> CouplingSpec:
        return cls(params.lam, sign)


def lorentz_acceleration(v, field: EMFieldSample, sign: int = -1) -> np.ndarray:
    """``a^mu = sign * F^mu_nu V^nu`` from a field sample (lower-index ``F``)."""
    F = assemble_tensor(field.e, field.b)
    return sign * (METRIC @ F @ np.asarray(v, dtype=float))


def _rhs_factory(source: FieldSource, sign: int):
    def rhs(tau, y):
        e, b = source.fields(y[0], y[1], y[2], y[3])
        e, b = np.asarray(e, float).reshape(3), np.asarray(b, float).reshape(3)
        v0, v = y[4], y[5:8]
        out = np.empty(8)
        out[:4] = y[4:]
        out[4] = sign * (e @ v)
        out[5:8] = sign * (e * v0 + np.cross(v, b))
        return out

    return rhs


@dataclass
class Trajectory:
    """Samples of a world-line; all arrays share the first axis."""

    tau: np.ndarray
    xi: np.ndarray
    v: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def lab_time(self) -> np.ndarray:
        return self.xi[:, 0]

    @property
    def gamma(self) -> np.ndarray:
        return self.v[:, 0]

    @property
    def positions(self) -> np.ndarray:
        return self.xi[:, 1:]

    @property
    def initial(self) -> ParticleState:
        return ParticleState(self.xi[0].copy(), self.v[0].copy(), float(self.tau[0]))

    @property
    def final(self) -> ParticleState:
        return ParticleState(self.xi[-1].copy(), self.v[-1].copy(), float(self.tau[-1]))

    def shell_drift(self) -> float:
        return float(np.max(np.abs(minkowski_dot(self.v, self.v) + 1.0)))

    def rows(self) -> np.ndarray:
        """``(lab_time, x, y, z, vx, vy, vz, gamma)`` with ``v`` the 3-velocity / c."""
        beta = self.v[:, 1:] / self.v[:, :1]
        return np.column_stack([self.lab_time, self.positions, beta, self.gamma])


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-9
    atol: float = 1e-12
    method: str = "RK45"
    max_step: float = np.inf
    renormalize: bool = False
    renormalize_every: float = 1.0
    n_output: int = 201


def _resolve_source(pulse, coupling: CouplingSpec) -> FieldSource:
    if isinstance(pulse, tuple):
        params, spec = pulse
        if coupling.lam == 0:
            return UniformField()
        return Pulse(replace(params, lam=coupling.lam), spec, allow_zero=True)
    return pulse


def field_magnitude(source: FieldSource, xi) -> np.ndarray:
    """``sqrt(e.e + b.b)`` at 4-positions ``xi[..., 4]``."""
    xi = np.asarray(xi, dtype=float)
    e, b = source.fields(xi[..., 0], xi[..., 1], xi[..., 2], xi[..., 3])
    return np.sqrt(np.sum(np.asarray(e) ** 2, axis=-1) + np.sum(np.asarray(b) ** 2, axis=-1))


def _reach(target):
    def event(tau, y):
        return y[0] - target

    event.terminal = True
    event.direction = 1
    return event


def integrate_trajectory(initial: ParticleState, pulse, coupling: CouplingSpec, t_end: float,
                         cfg: IntegratorConfig = IntegratorConfig(), output_times=None,
                         settle_ratio: float | None = None, max_lab_time: float | None = None) -> Trajectory:
    """Integrate from ``initial`` until lab time ``t_end``.

    ``pulse`` is a ``(PulseParams, SuperpositionSpec)`` pair, whose amplitude
    is replaced by ``coupling.lam``, or any object with a vectorized
    ``fields(t, x, y, z)`` method (used as is).

    With ``settle_ratio`` set, the run is extended (doubling the span) until the
    field magnitude at the particle is below ``settle_ratio`` times the largest
    value met along the path, or ``max_lab_time`` is reached.

    Dense output is sampled at ``output_times`` (default ``cfg.n_output``
    equally spaced lab times over the final span); the last sample is always
    the exact final state.
    """
    source = _resolve_source(pulse, coupling)
    t_start = float(initial.xi[0])
    if not t_end > t_start:
        raise ValueError("t_end must exceed the initial lab time")
    rhs = _rhs_factory(source, coupling.sign)

    y = np.concatenate([initial.xi, initial.v]).astype(float)
    tau = float(initial.tau)
    segments = []
    renorms = 0
    nfev = 0
    seg_len = cfg.renormalize_every if cfg.renormalize else np.inf
    peak = float(field_magnitude(source, y[:4]))
    settled = None
    while True:
        target = min(y[0] + seg_len, t_end)
        # Lab time never advances slower than proper time, so this tau span suffices.
        sol = solve_ivp(rhs, (tau, tau + (target - y[0]) * 1.0001 + 1e-9), y, method=cfg.method,
                        rtol=cfg.rtol, atol=cfg.atol, dense_output=True, events=_reach(target),
                        max_step=cfg.max_step)
        nfev += sol.nfev
        if sol.status == -1:
            last = ParticleState(sol.y[:4, -1], sol.y[4:, -1], float(sol.t[-1]))
            raise IntegrationError(f"integration failed: {sol.message}", last_state=last)
        if sol.status == 1:
            tau, y = float(sol.t_events[0][0]), sol.y_events[0][0].copy()
            # The root sits within rounding of the target; snap so the loop terminates.
            y[0] = target
        else:
            tau, y = float(sol.t[-1]), sol.y[:, -1].copy()
        segments.append((sol, tau))
        peak = max(peak, float(np.max(field_magnitude(source, sol.y[:4].T))))
        if y[0] >= t_end:
            if settle_ratio is None:
                break
            ratio = float(field_magnitude(source, y[:4])) / peak if peak > 0 else 0.0
            settled = ratio <= settle_ratio
            limit = np.inf if max_lab_time is None else max_lab_time
            if settled or t_end >= limit:
                break
            t_end = min(t_start + 2 * (t_end - t_start), limit)
            continue
        if cfg.renormalize and y[0] < t_end:
            y[4] = np.sqrt(1.0 + y[5:8] @ y[5:8])
            renorms += 1
            log.info("mass shell renormalized at lab time %.6g", y[0])

    step_v = np.concatenate([s.y[4:] for s, _ in segments], axis=1).T
    max_drift = float(np.max(np.abs(minkowski_dot(step_v, step_v) + 1.0)))

    if output_times is None:
        output_times = np.linspace(t_start, t_end, cfg.n_output)
    output_times = np.asarray(output_times, dtype=float)
    taus, states = [], []
    for tl in output_times:
        if tl <= t_start:
            taus.append(float(initial.tau))
            states.append(np.concatenate([initial.xi, initial.v]))
            continue
        if tl >= y[0]:
            taus.append(tau)
            states.append(y)
            continue
        sol, tau_hi = next((sg for sg in segments if sg[0].sol(sg[1])[0] >= tl), segments[-1])
        tq = brentq(lambda s_: sol.sol(s_)[0] - tl, sol.t[0], tau_hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)
        taus.append(tq)
        states.append(sol.sol(tq))
    states = np.array(states)
    meta = {
        "nfev": int(nfev),
        "steps": int(step_v.shape[0]),
        "max_shell_drift": max_drift,
        "renormalizations": renorms,
        "rtol": cfg.rtol,
        "atol": cfg.atol,
        "method": cfg.method,
        "peak_field": peak,
        "final_field": float(field_magnitude(source, y[:4])),
        "field_settled": settled,
        "t_end": float(y[0]),
    }
    return Trajectory(tau=np.array(taus), xi=states[:, :4], v=states[:, 4:], metadata=meta)


@dataclass(frozen=True)
class RingConfig:
    """Charges equally spaced on a circle in the plane ``z = z_plane``."""

    n_particles: int = 12
    radius: float = 5.0
    z_plane: float = 0.0
    initial_velocity: tuple = (0.0, 0.0, 0.0)
    t_start: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("ring needs at least one particle")
        if self.radius < 0:
            raise ValueError("ring radius must be non-negative")


def ring_ensemble(config: RingConfig) -> list[ParticleState]:
    angles = config.phase + 2 * np.pi * np.arange(config.n_particles) / config.n_particles
    return [
        ParticleState.at((config.radius * np.cos(a), config.radius * np.sin(a), config.z_plane),
                         config.initial_velocity, t=config.t_start)
        for a in angles
    ]


def kinetic_energy_trace(traj: Trajectory) -> np.ndarray:
    """Rows ``(lab_time, gamma - 1)``."""
    return np.column_stack([traj.lab_time, traj.gamma - 1.0])


def angular_momentum_z(state: ParticleState) -> float:
    """``L_z / (m c ell0) = x V^y - y V^x``."""
    return float(state.xi[1] * state.v[2] - state.xi[2] * state.v[1])


def angular_momentum_transfer(trajectories) -> float:
    """Total change of ``L_z`` over an ensemble, from initial and final states."""
    return float(sum(angular_momentum_z(tr.final) - angular_momentum_z(tr.initial) for tr in trajectories))


def integrate_si(position_m, velocity, pulse: Pulse, ell0: float, t_start_s: float, t_end_s: float,
                 charge: float = -constants.e, mass: float = constants.m_e, rtol: float = 1e-11,
                 atol_fraction: float = 1e-14):
    """Reference integration of ``d(gamma m v)/dt = q (E + v x B)`` in SI units.

    Returns ``(t [s], position [m], u = gamma v / c)`` at ``t_end_s``.
    """
    c = constants.c
    e_scale = mass * c**2 / (abs(charge) * ell0)
    b_scale = mass * c / (abs(charge) * ell0)
    beta = np.asarray(velocity, float)
    u0 = beta / np.sqrt(1 - beta @ beta)

    def rhs(t, y):
        pos, u = y[:3], y[3:]
        gamma = np.sqrt(1 + u @ u)
        v = c * u / gamma
        e, b = pulse.fields(c * t / ell0, pos[0] / ell0, pos[1] / ell0, pos[2] / ell0)
        E, B = e_scale * np.asarray(e).reshape(3), b_scale * np.asarray(b).reshape(3)
        du = charge * (E + np.cross(v, B)) / (mass * c)
        return np.concatenate([v, du])

    y0 = np.concatenate([np.asarray(position_m, float), u0])
    atol = np.concatenate([np.full(3, atol_fraction * ell0 * 1e3), np.full(3, 1e-14)])
    sol = solve_ivp(rhs, (t_start_s, t_end_s), y0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(sol.message)
    return sol.t[-1], sol.y[:3, -1], sol.y[3:, -1]
