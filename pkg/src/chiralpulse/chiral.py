"""Chiral Hertz tensors, vector potential and Maxwell field of a pulse.

Conventions (fixed here and used everywhere):

* coordinates ``(t, x, y, z)`` in units of ``ell0`` with ``c = 1``;
* metric ``diag(-1, 1, 1, 1)`` and orientation ``eps_{txyz} = +1``;
* Hodge dual of a 2-form ``(*P)_{mn} = 1/2 eps_{mnrs} P^{rs}``;
* the potential is ``A_d = lam * d_g(alpha P_{mb}) eps^{gmb}_d`` summed over
  all index values, and ``F_{bd} = d_b A_d - d_d A_b``;
* real fields come from ``Re F``: ``e_i = F_{i t}`` and
  ``F_{ij} = eps_{ijk} b_k``, i.e. ``b = (F_yz, F_zx, F_xy)``. With these the
  Lorentz force on a unit charge is ``e + v x b``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .scalar import ComplexJet2, PulseParams, SpacetimePoint, alpha_jet

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])


class ConfigurationError(ValueError):
    """Invalid pulse configuration, e.g. a superposition with no modes."""


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        eps[perm] = np.linalg.det(np.eye(4)[list(perm)])
    return eps


#: ``eps_{abcd}`` with all indices down, ``eps_{txyz} = +1``.
EPS_DOWN = _levi_civita()
#: ``eps^{abc}_d``: first three indices raised with the metric.
EPS_MIXED = np.einsum("abcd,ai,bj,ck->ijkd", EPS_DOWN, METRIC, METRIC, METRIC)


def hodge(form: np.ndarray) -> np.ndarray:
    """Hodge dual of an antisymmetric 4x4 array of lower components."""
    raised = METRIC @ form @ METRIC
    return 0.5 * np.einsum("mnrs,rs->mn", EPS_DOWN, raised)


class Family(str, enum.Enum):
    CE = "CE"
    CM = "CM"


@dataclass(frozen=True, order=True)
class ChiralMode:
    family: Family
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.kappa not in (-1, 0, 1):
            raise ValueError(f"kappa must be -1, 0 or 1, got {self.kappa!r}")

    @classmethod
    def parse(cls, label: str) -> ChiralMode:
        """Parse labels like ``"CE,+1"``, ``"CM-1"`` or ``"CM,0"``."""
        text = label.replace(" ", "").replace(",", "").upper()
        fam, kap = text[:2], text[2:]
        try:
            return cls(Family(fam), int(kap))
        except ValueError as exc:
            raise ValueError(f"cannot parse chiral mode label {label!r}") from exc

    @property
    def label(self) -> str:
        return f"{self.family.value},{self.kappa:+d}" if self.kappa else f"{self.family.value},0"

    def __str__(self):
        return self.label


ALL_MODES = tuple(ChiralMode(f, k) for f in Family for k in (-1, 0, 1))


@dataclass(frozen=True)
class ConstantTwoForm:
    """Constant antisymmetric tensor, lower Cartesian components."""

    comp: np.ndarray

    def __post_init__(self):
        comp = np.asarray(self.comp, dtype=complex)
        if comp.shape != (4, 4) or np.any(comp + comp.T != 0):
            raise ValueError("two-form components must be an exactly antisymmetric 4x4 array")
        object.__setattr__(self, "comp", comp)


def _wedge(u, v) -> np.ndarray:
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    return np.outer(u, v) - np.outer(v, u)


_DT, _DX, _DY, _DZ = np.eye(4)


def hertz_tensor(mode: ChiralMode) -> ConstantTwoForm:
    """Basis tensor: ``d(x +- i y) ^ dt`` and ``dz ^ dt`` for CE, duals for CM."""
    if mode.kappa == 0:
        ce = _wedge(_DZ, _DT)
    else:
        ce = _wedge(_DX + mode.kappa * 1j * _DY, _DT)
    comp = ce if mode.family is Family.CE else hodge(ce)
    return ConstantTwoForm(comp)


# Generator of rotations about z acting on covector indices: K[rho, mu] = d_mu xi^rho
# for xi = -y d_x + x d_y.
_ROT_GENERATOR = np.zeros((4, 4))
_ROT_GENERATOR[1, 2] = -1.0
_ROT_GENERATOR[2, 1] = 1.0


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    rot = np.eye(4)
    rot[1:3, 1:3] = [[c, -s], [s, c]]
    return rot


def eigenphase_check(mode: ChiralMode, form: ConstantTwoForm, step: float = 1e-5) -> float:
    """Max deviation of ``-i L_theta form`` from ``kappa * form``.

    The Lie derivative is evaluated twice, once exactly from the rotation
    generator and once by central differencing of finitely rotated pullbacks;
    the larger deviation is returned.
    """
    comp = form.comp
    target = mode.kappa * comp
    lie = _ROT_GENERATOR.T @ comp + comp @ _ROT_GENERATOR
    exact = np.max(np.abs(-1j * lie - target))

    def pullback(theta):
        rot = rotation_matrix(theta)
        return rot.T @ comp @ rot

    lie_fd = (pullback(step) - pullback(-step)) / (2 * step)
    finite = np.max(np.abs(-1j * lie_fd - target))
    return float(max(exact, finite))


def potential_matrix(form: np.ndarray) -> np.ndarray:
    """``M^g_d = P_{mb} eps^{gmb}_d`` so that ``A_d = d_g alpha M^g_d``."""
    return np.einsum("mb,gmbd->gd", form, EPS_MIXED)


@dataclass(frozen=True)
class SuperpositionSpec:
    """Complex coefficients of the six chiral modes; absent modes are zero."""

    coeffs: Mapping[ChiralMode, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mode, c in dict(self.coeffs).items():
            mode = mode if isinstance(mode, ChiralMode) else ChiralMode.parse(mode)
            clean[mode] = complex(c)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def single(cls, mode, coeff: complex = 1.0) -> SuperpositionSpec:
        return cls({mode: coeff})

    def __mul__(self, scale) -> SuperpositionSpec:
        return SuperpositionSpec({m: c * scale for m, c in self.coeffs.items()})

    __rmul__ = __mul__

    @property
    def active(self) -> dict[ChiralMode, complex]:
        return {m: c for m, c in self.coeffs.items() if c != 0}

    @property
    def is_zero(self) -> bool:
        return not self.active

    @property
    def is_axisymmetric(self) -> bool:
        return all(m.kappa == 0 for m in self.active)

    def two_form(self) -> np.ndarray:
        total = np.zeros((4, 4), dtype=complex)
        for mode, c in self.coeffs.items():
            total += c * hertz_tensor(mode).comp
        return total

    def matrix(self) -> np.ndarray:
        return potential_matrix(self.two_form())

    def to_dict(self) -> dict[str, list[float]]:
        return {m.label: [c.real, c.imag] for m, c in self.coeffs.items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> SuperpositionSpec:
        coeffs = {}
        for label, value in data.items():
            if isinstance(value, (list, tuple)):
                value = complex(value[0], value[1])
            coeffs[ChiralMode.parse(label)] = complex(value)
        return cls(coeffs)


@dataclass(frozen=True)
class EMFieldSample:
    """Complex field tensor ``F`` (lower indices) and real ``e``, ``b``."""

    F: np.ndarray
    e: np.ndarray
    b: np.ndarray


def split_fields(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real ``(e, b)`` from complex ``F[..., 4, 4]``."""
    Fr = F.real
    e = Fr[..., 1:, 0]
    b = np.stack([Fr[..., 2, 3], Fr[..., 3, 1], Fr[..., 1, 2]], axis=-1)
    return e, b


def assemble_tensor(e, b) -> np.ndarray:
    """Real ``F[..., 4, 4]`` with lower indices from ``e`` and ``b``."""
    e, b = np.asarray(e, dtype=float), np.asarray(b, dtype=float)
    F = np.zeros(np.broadcast_shapes(e.shape, b.shape)[:-1] + (4, 4))
    F[..., 1:, 0] = e
    F[..., 0, 1:] = -e
    F[..., 2, 3], F[..., 3, 1], F[..., 1, 2] = b[..., 0], b[..., 1], b[..., 2]
    F[..., 3, 2], F[..., 1, 3], F[..., 2, 1] = -b[..., 0], -b[..., 1], -b[..., 2]
    return F


class Pulse:
    """Vectorized field evaluator for one parameter set and superposition."""

    def __init__(self, params: PulseParams, spec: SuperpositionSpec, allow_zero: bool = False):
        if spec.is_zero and not allow_zero:
            raise ConfigurationError("superposition has no nonzero chiral coefficient")
        self.params = params
        self.spec = spec
        self._M = params.lam * spec.matrix()

    def jet(self, t, x, y, z) -> ComplexJet2:
        return alpha_jet(self.params, t, x, y, z)

    def potential(self, t, x, y, z) -> np.ndarray:
        return self.jet(t, x, y, z).grad @ self._M

    def tensor(self, t, x, y, z) -> np.ndarray:
        hm = self.jet(t, x, y, z).hess @ self._M
        return hm - np.swapaxes(hm, -1, -2)

    def fields(self, t, x, y, z) -> tuple[np.ndarray, np.ndarray]:
        return split_fields(self.tensor(t, x, y, z))

    def sample(self, p: SpacetimePoint) -> EMFieldSample:
        F = self.tensor(p.t, p.x, p.y, p.z)
        e, b = split_fields(F)
        return EMFieldSample(F=F, e=e, b=b)


def potential_A(params: PulseParams, spec: SuperpositionSpec, p: SpacetimePoint) -> np.ndarray:
    return Pulse(params, spec, allow_zero=True).potential(p.t, p.x, p.y, p.z)


def field_tensor(params: PulseParams, spec: SuperpositionSpec, p: SpacetimePoint) -> EMFieldSample:
    return Pulse(params, spec).sample(p)


def cylindrical_components(F: np.ndarray, theta) -> np.ndarray:
    """Components of ``F`` in the orthonormal frame ``(t, r, theta, z)``."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    frame = np.zeros(theta.shape + (4, 4))
    frame[..., 0, 0] = 1.0
    frame[..., 3, 3] = 1.0
    frame[..., 1, 1], frame[..., 2, 1] = c, s
    frame[..., 1, 2], frame[..., 2, 2] = -s, c
    return np.swapaxes(frame, -1, -2) @ F @ frame


def field_eigenphase_deviation(pulse: Pulse, kappa: int, t, r, z, theta) -> np.ndarray:
    """Relative deviation of the cylindrical field components from ``e^{i kappa theta}`` times their ``theta = 0`` values."""
    t, r, z, theta = np.broadcast_arrays(*(np.asarray(v, float) for v in (t, r, z, theta)))
    ref = cylindrical_components(pulse.tensor(t, r, np.zeros_like(r), z), np.zeros_like(theta))
    rot = cylindrical_components(pulse.tensor(t, r * np.cos(theta), r * np.sin(theta), z), theta)
    diff = rot - np.exp(1j * kappa * theta)[..., None, None] * ref
    scale = np.max(np.abs(ref), axis=(-1, -2))
    return np.max(np.abs(diff), axis=(-1, -2)) / np.where(scale > 0, scale, 1.0)


@dataclass(frozen=True)
class MaxwellResiduals:
    """Vacuum Maxwell residuals and the field-derivative scale they are judged by."""

    div_e: np.ndarray
    div_b: np.ndarray
    faraday: np.ndarray
    ampere: np.ndarray
    scale: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.div_e, self.div_b, self.faraday, self.ampere], axis=-1)

    def relative(self) -> np.ndarray:
        return self.as_array() / self.scale[..., None]

    def ok(self, tol: float = 1e-5) -> bool:
        return bool(np.all(self.relative() <= tol))


# Fourth-order central difference: (8 (f1 - f-1) - (f2 - f-2)) / 12h
_FD_OFFSETS = (1, -1, 2, -2)
_FD_WEIGHTS = (8.0, -8.0, -1.0, 1.0)


def field_jacobians(field_fn, points: np.ndarray, h: float):
    """``J_e[..., mu, i] = d_mu e_i`` (same for b) by fourth-order differences.

    ``field_fn(t, x, y, z) -> (e, b)``; ``points`` has shape ``(..., 4)``.
    """
    points = np.asarray(points, dtype=float)
    je = np.zeros(points.shape[:-1] + (4, 3))
    jb = np.zeros_like(je)
    for mu in range(4):
        for k, w in zip(_FD_OFFSETS, _FD_WEIGHTS):
            q = points.copy()
            q[..., mu] += k * h
            e, b = field_fn(q[..., 0], q[..., 1], q[..., 2], q[..., 3])
            je[..., mu, :] += w * e
            jb[..., mu, :] += w * b
    return je / (12 * h), jb / (12 * h)


def _curl(j):
    return np.stack(
        [j[..., 2, 2] - j[..., 3, 1], j[..., 3, 0] - j[..., 1, 2], j[..., 1, 1] - j[..., 2, 0]],
        axis=-1,
    )


def residuals_from_jacobians(je, jb) -> MaxwellResiduals:
    div_e = np.abs(je[..., 1, 0] + je[..., 2, 1] + je[..., 3, 2])
    div_b = np.abs(jb[..., 1, 0] + jb[..., 2, 1] + jb[..., 3, 2])
    faraday = np.linalg.norm(_curl(je) + jb[..., 0, :], axis=-1)
    ampere = np.linalg.norm(_curl(jb) - je[..., 0, :], axis=-1)
    scale = np.maximum(np.abs(je).max(axis=(-2, -1)), np.abs(jb).max(axis=(-2, -1)))
    return MaxwellResiduals(div_e, div_b, faraday, ampere, np.maximum(scale, np.finfo(float).tiny))


def default_fd_step(params: PulseParams) -> float:
    return 1e-3 * min(1.0, params.psi1, params.psi2)


def maxwell_residuals_batch(pulse: Pulse, points: np.ndarray, h: float | None = None, field_fn=None) -> MaxwellResiduals:
    h = default_fd_step(pulse.params) if h is None else h
    je, jb = field_jacobians(field_fn or pulse.fields, points, h)
    return residuals_from_jacobians(je, jb)


def maxwell_residuals(params: PulseParams, spec: SuperpositionSpec, p: SpacetimePoint, h: float | None = None) -> MaxwellResiduals:
    """``|div e|, |div b|, |curl e + d_t b|, |curl b - d_t e|`` at ``p``."""
    return maxwell_residuals_batch(Pulse(params, spec), p.as_array(), h)


def sample_grid(pulse: Pulse, t: float, xs, ys, zs) -> np.ndarray:
    """Rows ``(t, x, y, z, e_x, e_y, e_z, b_x, b_y, b_z)`` on a tensor grid."""
    gx, gy, gz = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), np.asarray(zs, float), indexing="ij")
    gx, gy, gz = gx.ravel(), gy.ravel(), gz.ravel()
    gt = np.full_like(gx, float(t))
    e, b = pulse.fields(gt, gx, gy, gz)
    return np.column_stack([gt, gx, gy, gz, e, b])
