"""Energy bookkeeping and pulse characterization.

Internally ``eps0 = mu0 = c = 1`` so the energy density is
``rho = (e.e + b.b) / 2`` and the Poynting vector is ``e x b``. Both energy
integrals are reduced to two dimensions: the azimuthal integral is done with
an equally spaced rule that is exact here, because for any superposition of
``kappa in {-1, 0, 1}`` modes a rotation-invariant quadratic of the fields
is a trigonometric polynomial of degree at most 2 in ``theta``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import constants
from scipy.integrate import cubature
from scipy.optimize import bisect, brentq, minimize_scalar

from .chiral import METRIC, Pulse, SuperpositionSpec
from .quadrature import Axis, QuadratureError, QuadResult, integrate
from .scalar import PulseParams

C_LIGHT = constants.c
PICOSECOND = 1e-12

# Exact for azimuthal frequencies below this count.
_N_THETA = 4


class CharacterizationError(RuntimeError):
    """A stage of the characterization pipeline failed; ``stage`` names it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def energy_density(sample=None, *, e=None, b=None):
    """``rho = (e.e + b.b)/2``; pass an :class:`EMFieldSample` or arrays."""
    if sample is not None:
        e, b = sample.e, sample.b
    e, b = np.asarray(e), np.asarray(b)
    return 0.5 * (np.sum(e * e, axis=-1) + np.sum(b * b, axis=-1))


def poynting(e, b):
    return np.cross(e, b)


def stress_energy_tensor(F_real):
    """``T_mn = F_ma F_n^a - g_mn F_ab F^ab / 4`` (lower indices)."""
    F = np.asarray(F_real, dtype=float)
    invariant = np.einsum("...ab,...ab->...", F, METRIC @ F @ METRIC)  # F_ab F^ab
    return F @ METRIC @ np.swapaxes(F, -1, -2) - 0.25 * METRIC * invariant[..., None, None]


def _theta_nodes(spec: SuperpositionSpec) -> np.ndarray:
    n = 1 if spec.is_axisymmetric else _N_THETA
    return 2 * np.pi * np.arange(n) / n


def _azimuthal(pulse: Pulse, t, r, z, quantity: str) -> np.ndarray:
    """``int dtheta`` of rho or S_z at the broadcast (t, r, z) points."""
    thetas = _theta_nodes(pulse.spec)
    t, r, z = np.broadcast_arrays(np.asarray(t, float), np.asarray(r, float), np.asarray(z, float))
    th = thetas.reshape((-1,) + (1,) * r.ndim)
    e, b = pulse.fields(t[None], r[None] * np.cos(th), r[None] * np.sin(th), z[None])
    if quantity == "rho":
        vals = energy_density(e=e, b=b)
    else:
        vals = poynting(e, b)[..., 2]
    return vals.mean(axis=0) * 2 * np.pi


def transverse_scale(params: PulseParams, t: float = 0.0) -> float:
    """Radial extent of the dominant ridge at time ``t``."""
    p1, p2 = params.psi1, params.psi2
    return math.sqrt(min(p1 * math.hypot(p2, 2 * t), p2 * math.hypot(p1, 2 * t)))


def axial_scale(params: PulseParams) -> float:
    return min(params.psi1, params.psi2)


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-6
    max_subdivisions: int = 20000
    atol: float = 0.0


def volume_energy(params: PulseParams, spec: SuperpositionSpec, t: float = 0.0,
                  quad: QuadratureConfig = QuadratureConfig()) -> QuadResult:
    """Total energy ``int rho dV`` at time ``t``."""
    pulse = Pulse(params, spec)

    def integrand(x):
        z, r = x[:, 0], x[:, 1]
        return r * _azimuthal(pulse, t, r, z, "rho")

    axes = [Axis.line(0.0, max(axial_scale(params), 1.0)), Axis.half(transverse_scale(params, t))]
    return integrate(integrand, axes, rtol=quad.rtol, atol=quad.atol, max_subdivisions=quad.max_subdivisions)


def axial_momentum(params: PulseParams, spec: SuperpositionSpec, t: float = 0.0,
                   quad: QuadratureConfig = QuadratureConfig()) -> QuadResult:
    """``int (e x b)_z dV``; its sign gives the net propagation direction."""
    pulse = Pulse(params, spec)

    def integrand(x):
        z, r = x[:, 0], x[:, 1]
        return r * _azimuthal(pulse, t, r, z, "sz")

    axes = [Axis.line(0.0, max(axial_scale(params), 1.0)), Axis.half(transverse_scale(params, t))]
    return integrate(integrand, axes, rtol=quad.rtol, atol=quad.atol, max_subdivisions=quad.max_subdivisions)


def poynting_flux_energy(params: PulseParams, spec: SuperpositionSpec, z0: float,
                         quad: QuadratureConfig = QuadratureConfig(), t_center: float | None = None) -> QuadResult:
    """``int dt int (e x b) . dS`` through the plane ``z = z0``, all time.

    ``t_center`` is where the time axis is compactified around; it defaults
    to ``z0``, the crossing time of a pulse moving towards ``+z``.
    """
    t_center = z0 if t_center is None else t_center
    pulse = Pulse(params, spec)

    def integrand(x):
        t, r = x[:, 0], x[:, 1]
        return r * _azimuthal(pulse, t, r, z0, "sz")

    axes = [Axis.line(t_center, max(axial_scale(params), 1.0)), Axis.half(transverse_scale(params, z0))]
    return integrate(integrand, axes, rtol=quad.rtol, atol=quad.atol, max_subdivisions=quad.max_subdivisions)


def axial_energy_profile(params: PulseParams, spec: SuperpositionSpec, t: float, z_grid,
                         quad: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    """Energy per unit length ``E(t, z) = int r dr dtheta rho`` on ``z_grid``."""
    return _profile(Pulse(params, spec), t, np.atleast_1d(np.asarray(z_grid, float)), quad)


def _profile(pulse: Pulse, t: float, zs: np.ndarray, quad: QuadratureConfig) -> np.ndarray:
    scale = transverse_scale(pulse.params, t)

    def integrand(v):
        v = v[:, 0]
        sec2 = 1.0 / np.cos(v) ** 2
        r = scale * np.tan(v)
        vals = _azimuthal(pulse, t, r[:, None], zs[None, :], "rho")
        out = (r * scale * sec2)[:, None] * vals
        return np.where(np.isfinite(out), out, 0.0)

    res = cubature(integrand, [0.0], [np.pi / 2], rtol=quad.rtol, atol=quad.atol,
                   max_subdivisions=quad.max_subdivisions)
    if res.status != "converged":
        raise QuadratureError("axial profile quadrature did not converge", estimate=res.estimate, error=res.error)
    return np.asarray(res.estimate, dtype=float)


@dataclass(frozen=True)
class EnergyReport:
    j_flux: float
    e_volume: float
    gamma_factor: float
    quadrature_error: float
    z0: float = 1.0
    t: float = 0.0
    evaluations: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def gamma_factor(j_hat: float, charge: float = -constants.e, mass: float = constants.m_e) -> float:
    """``Gamma`` in J/m such that the pulse energy is ``ell0 * Gamma``.

    The SI electric field is ``(m c^2 / (|q| ell0)) e`` (see
    :mod:`chiralpulse.dynamics`), so the energy ``eps0/2 int (E^2 + c^2 B^2)``
    is ``eps0 (m c^2 / q)^2 ell0 * j_hat``.
    """
    return constants.epsilon_0 * (mass * C_LIGHT**2 / abs(charge)) ** 2 * j_hat


def energy_report(params: PulseParams, spec: SuperpositionSpec, z0: float = 1.0, t: float = 0.0,
                  quad: QuadratureConfig = QuadratureConfig()) -> EnergyReport:
    flux = poynting_flux_energy(params, spec, z0, quad)
    vol = volume_energy(params, spec, t, quad)
    return EnergyReport(
        j_flux=flux.estimate,
        e_volume=vol.estimate,
        gamma_factor=gamma_factor(flux.estimate),
        quadrature_error=flux.error + vol.error,
        z0=z0,
        t=t,
        evaluations=flux.evaluations + vol.evaluations,
    )


# ---------------------------------------------------------------------------
# MKS conversion


@dataclass(frozen=True)
class MKSCharacteristics:
    ell0: float
    energy: float
    z_rg: float
    z_w: float
    r_s: float
    t0: float
    speed: float


def mks_from_dimensionless(*, beta: float, z_w: float, z_rg: float, r_s: float, gamma: float,
                           n_picoseconds: float, phi: float = 1.0, xi: float = 1.0) -> MKSCharacteristics:
    """Picosecond-unit conversion.

    Inputs are in visualization units (``Z = z/(xi ell0)``, ``R = r/(phi ell0)``).
    """
    ell0 = C_LIGHT * beta * n_picoseconds / z_w * PICOSECOND
    return MKSCharacteristics(
        ell0=ell0,
        energy=gamma * ell0,
        z_rg=xi * beta * C_LIGHT * n_picoseconds * z_rg / z_w * PICOSECOND,
        z_w=xi * C_LIGHT * beta * n_picoseconds * PICOSECOND,
        r_s=C_LIGHT * beta * n_picoseconds * phi * r_s / z_w * PICOSECOND,
        t0=ell0 * (z_w / beta) / C_LIGHT,
        speed=xi * beta * C_LIGHT,
    )


def dimensionless_from_mks(mks: MKSCharacteristics, *, n_picoseconds: float, phi: float = 1.0,
                           xi: float = 1.0) -> dict[str, float]:
    """Invert :func:`mks_from_dimensionless`."""
    beta = mks.speed / (xi * C_LIGHT)
    z_w = mks.z_w / (xi * mks.ell0)
    return {
        "beta": beta,
        "z_w": z_w,
        "z_rg": mks.z_rg / (xi * mks.ell0),
        "r_s": mks.r_s / (phi * mks.ell0),
        "gamma": mks.energy / mks.ell0,
        "t0": mks.t0 * C_LIGHT / mks.ell0,
        "n_picoseconds": mks.t0 / PICOSECOND,
    }


# ---------------------------------------------------------------------------
# Characterization


@dataclass(frozen=True)
class PulseCharacteristics:
    """Dimensionless pulse figures (internal units, ``phi = xi = 1``) plus MKS.

    ``z_rg`` is the signed displacement of the tracked peak between ``t = 0``
    and ``t1``; ``beta = z_rg / t1`` is therefore negative for pulses that
    travel towards ``-z``. MKS values use ``|beta|``.
    """

    z_rg: float
    t1: float
    z_w: float
    beta: float
    t0: float
    spot_radius: float
    spot_spread: float
    spot_z: float
    z_peak0: float
    peak0: float
    width0: float
    direction: int
    out_of_regime: bool
    gamma_factor: float
    j_hat: float
    n_picoseconds: float
    visual: dict = field(default_factory=dict)
    mks: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass(frozen=True)
class CharacterizeConfig:
    coarse_points: int = 41
    bisect_xtol: float = 1e-8
    golden_xtol: float = 1e-7
    n_spot_angles: int = 32
    deformation_limit: float = 0.2
    max_time_factor: float = 50.0
    quad: QuadratureConfig = QuadratureConfig(rtol=1e-9)
    energy_quad: QuadratureConfig = QuadratureConfig()
    energy: str = "flux"  # or "volume"


class _PeakTracker:
    def __init__(self, pulse: Pulse, cfg: CharacterizeConfig):
        self.pulse = pulse
        self.cfg = cfg

    def profile(self, t, zs):
        return _profile(self.pulse, t, np.atleast_1d(np.asarray(zs, float)), self.cfg.quad)

    def value(self, t, z):
        return float(self.profile(t, [z])[0])

    def peak_in(self, t, lo, hi, prefer=0):
        """Golden-section refined maximum of the profile on ``[lo, hi]``."""
        zs = np.linspace(lo, hi, self.cfg.coarse_points)
        vals = self.profile(t, zs)
        top = vals.max()
        candidates = np.flatnonzero(vals >= top * (1 - 1e-9))
        k = candidates[np.argmax(prefer * zs[candidates])] if prefer else candidates[0]
        if k == 0 or k == len(zs) - 1:
            raise CharacterizationError("peak-search", f"maximum at window edge z={zs[k]:.6g} at t={t:.6g}")
        res = minimize_scalar(lambda z: -self.value(t, z), bracket=(zs[k - 1], zs[k], zs[k + 1]),
                              method="golden", options={"xtol": self.cfg.golden_xtol})
        z = float(res.x)
        return z, self.value(t, z)

    def half_crossing(self, t, z_peak, level, step, sign):
        """First ``z`` beyond ``z_peak`` (direction ``sign``) where the profile drops to ``level``."""
        a = z_peak
        for _ in range(400):
            b = a + sign * step
            if self.value(t, b) < level:
                return brentq(lambda z: self.value(t, z) - level, min(a, b), max(a, b), xtol=1e-10)
            a = b
        raise CharacterizationError("width", f"profile does not fall to half height near z={z_peak:.6g}")

    def fwhm(self, t, z_peak, value, step):
        left = self.half_crossing(t, z_peak, 0.5 * value, step, -1)
        right = self.half_crossing(t, z_peak, 0.5 * value, step, +1)
        return right - left


def _spot_radius(pulse: Pulse, t: float, z: float, n_angles: int, r_max: float):
    """Radius of the principal maximum of ``P = r S_z`` per angle."""
    radii = []
    rs = np.linspace(r_max / 400, r_max, 400)
    for theta in 2 * np.pi * np.arange(n_angles) / n_angles:
        c, s = np.cos(theta), np.sin(theta)

        def power(r):
            e, b = pulse.fields(t, r * c, r * s, z)
            return r * poynting(e, b)[..., 2]

        vals = np.abs(power(rs))
        k = int(np.argmax(vals))
        lo, hi = rs[max(k - 1, 0)], rs[min(k + 1, len(rs) - 1)]
        res = minimize_scalar(lambda r: -abs(float(power(r))), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10 * r_max})
        radii.append(float(res.x))
    radii = np.array(radii)
    return float(radii.mean()), float(radii.max() - radii.min())


def characterize(params: PulseParams, spec: SuperpositionSpec, n_picoseconds: float,
                 spot_z: float | None = None, cfg: CharacterizeConfig = CharacterizeConfig()) -> PulseCharacteristics:
    """Range, width, speed, duration and spot size of the dominant peak.

    The peak of the axial energy profile is tracked from ``t = 0`` in the
    direction of the net axial momentum until its height drops to half the
    initial value; the crossing time ``t1`` is solved by bisection.
    """
    pulse = Pulse(params, spec)
    tracker = _PeakTracker(pulse, cfg)
    width_scale = axial_scale(params)

    try:
        p_z = axial_momentum(params, spec, 0.0, cfg.quad).estimate
    except QuadratureError as exc:
        raise CharacterizationError("direction", str(exc)) from exc
    direction = 1 if p_z >= 0 else -1

    half_window = 4 * max(width_scale, 1.0)
    z0, peak0 = tracker.peak_in(0.0, -half_window, half_window, prefer=direction)
    width0 = tracker.fwhm(0.0, z0, peak0, 0.05 * width_scale)
    level = 0.5 * peak0

    # Coarse march until the tracked peak falls below half height.
    t_prev, z_prev = 0.0, z0
    t_max = cfg.max_time_factor * max(params.psi1, params.psi2)
    track = {0.0: z0}
    while True:
        dt = max(0.5 * width0, 0.1 * t_prev)
        t = t_prev + dt
        if t > t_max:
            raise CharacterizationError("peak-tracking", f"peak never dropped to half height before t={t_max:.6g}")
        centre = z_prev + direction * dt
        pad = dt + 3 * width0
        z_pk, val = tracker.peak_in(t, centre - pad, centre + pad, prefer=direction)
        track[t] = z_pk
        if val < level:
            break
        t_prev, z_prev = t, z_pk

    def peak_at(tq):
        # Linear prediction between the bracketing coarse samples.
        frac = (tq - t_prev) / (t - t_prev)
        centre = z_prev + frac * (track[t] - z_prev)
        pad = 3 * width0
        return tracker.peak_in(tq, centre - pad, centre + pad, prefer=direction)

    try:
        t1 = bisect(lambda tq: peak_at(tq)[1] - level, t_prev, t, xtol=cfg.bisect_xtol)
    except ValueError as exc:
        raise CharacterizationError("half-height", f"bracket [{t_prev}, {t}] invalid: {exc}") from exc
    z1, val1 = peak_at(t1)
    z_rg = z1 - z0
    beta = z_rg / t1
    z_w = tracker.fwhm(t1, z1, val1, 0.05 * width0)
    out_of_regime = abs(z_w - width0) > cfg.deformation_limit * width0
    t0 = z_w / abs(beta)

    spot_z = z1 if spot_z is None else spot_z
    spot_t = spot_z / beta
    r_max = 6 * transverse_scale(params, spot_t)
    r_s, spread = _spot_radius(pulse, spot_t, spot_z, cfg.n_spot_angles, r_max)

    if cfg.energy == "flux":
        j_hat = direction * poynting_flux_energy(params, spec, float(direction), cfg.energy_quad,
                                                 t_center=1.0).estimate
    else:
        j_hat = volume_energy(params, spec, 0.0, cfg.energy_quad).estimate
    gamma = gamma_factor(j_hat)

    visual = {
        "z_rg": z_rg / params.xi,
        "z_w": z_w / params.xi,
        "beta": beta / params.xi,
        "t0": t0,
        "spot_radius": r_s / params.phi,
        "speed_over_c": abs(beta),
    }
    mks = mks_from_dimensionless(beta=abs(visual["beta"]), z_w=visual["z_w"], z_rg=abs(visual["z_rg"]),
                                 r_s=visual["spot_radius"], gamma=gamma, n_picoseconds=n_picoseconds,
                                 phi=params.phi, xi=params.xi)
    return PulseCharacteristics(
        z_rg=z_rg, t1=t1, z_w=z_w, beta=beta, t0=t0, spot_radius=r_s, spot_spread=spread, spot_z=spot_z,
        z_peak0=z0, peak0=peak0, width0=width0, direction=direction, out_of_regime=bool(out_of_regime),
        gamma_factor=gamma, j_hat=j_hat, n_picoseconds=n_picoseconds, visual=visual, mks=asdict(mks),
    )
