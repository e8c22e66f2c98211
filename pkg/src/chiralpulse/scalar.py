"""Closed-form localized scalar wave and its derivatives.

All coordinates are dimensionless and measured in units of the length scale
``ell0``: ``t`` stands for ``c t / ell0`` and ``x, y, z`` for ``x / ell0`` etc.
In these units the scalar is

    alpha = 1 / (R^2 + (psi1 + i(Z - T)) (psi2 - i(Z + T)))

which is exactly the dimensional ``ell0^2 / (r^2 + ...)`` evaluated at the
corresponding physical point, so no prefactor is dropped: the ``ell0^2`` in the
numerator is what makes the scalar dimensionless. Every field amplitude in the
package is built from this dimensionless scalar, and the dimensional scale
enters only through ``lam`` (see :mod:`chiralpulse.dynamics` for the mapping
to SI fields).

The visualization scales ``phi`` and ``xi`` never enter the wave operator.
Internally ``R`` and ``Z`` are plain ``r/ell0`` and ``z/ell0``; the helpers
:meth:`PulseParams.to_visual` and :meth:`PulseParams.from_visual` relabel
coordinates for reporting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Coordinate order used for every 4-vector and 4x4 array: (t, x, y, z).
T, X, Y, Z = range(4)

# Hessian of the denominator D is constant: diag(-2, 2, 2, 2).
_DENOM_HESS = np.diag([-2.0, 2.0, 2.0, 2.0]).astype(complex)


@dataclass(frozen=True)
class PulseParams:
    """Shape and strength parameters of a pulse.

    ``lam`` sets the field amplitude, ``psi1``/``psi2`` the two shape lengths
    (in units of ``ell0``), ``phi``/``xi`` the radial and axial visualization
    scales, and ``ell0`` the length scale in metres.
    """

    lam: float = 1.0
    psi1: float = 1.0
    psi2: float = 100.0
    phi: float = 1.0
    xi: float = 1.0
    ell0: float = 1.0e-6

    def __post_init__(self):
        for name in ("lam", "psi1", "psi2", "phi", "xi", "ell0"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"PulseParams.{name} must be finite and > 0, got {value!r}")

    def to_visual(self, r, z):
        """Map internal ``(r/ell0, z/ell0)`` to visualization ``(R, Z)``."""
        return np.asarray(r) / self.phi, np.asarray(z) / self.xi

    def from_visual(self, R, Z):
        """Inverse of :meth:`to_visual`."""
        return np.asarray(R) * self.phi, np.asarray(Z) * self.xi


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.t, self.x, self.y, self.z)):
            raise ValueError(f"non-finite spacetime point {self!r}")

    @classmethod
    def cylindrical(cls, t, r, z, theta=0.0) -> SpacetimePoint:
        return cls(t, r * np.cos(theta), r * np.sin(theta), z)

    @property
    def r(self) -> float:
        return float(np.hypot(self.x, self.y))

    @property
    def theta(self) -> float:
        return float(np.arctan2(self.y, self.x))

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class ComplexJet2:
    """Value, gradient and Hessian of the complex scalar.

    ``grad[..., mu]`` is the partial along coordinate ``mu`` in (t, x, y, z)
    order and ``hess[..., mu, nu]`` the symmetric matrix of second partials.
    Leading axes broadcast over point batches.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


def denominator(params: PulseParams, t, x, y, z):
    """The complex denominator ``D`` of the scalar; ``|D| >= psi1*psi2``."""
    t, x, y, z = (np.asarray(c, dtype=float) for c in (t, x, y, z))
    u = params.psi1 + 1j * (z - t)
    w = params.psi2 - 1j * (z + t)
    return x * x + y * y + u * w


def alpha_jet(params: PulseParams, t, x, y, z) -> ComplexJet2:
    """Vectorized jet of the scalar at arrays of points.

    Uses ``alpha = 1/D`` with the polynomial partials of ``D``::

        d alpha = -dD / D^2
        dd alpha = (2 dD dD - D ddD) / D^3
    """
    t, x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (t, x, y, z)))
    u = params.psi1 + 1j * (z - t)
    w = params.psi2 - 1j * (z + t)
    d = x * x + y * y + u * w
    dd = np.stack([-1j * (u + w), 2.0 * x + 0j, 2.0 * y + 0j, 1j * (w - u)], axis=-1)
    inv = 1.0 / d
    grad = -dd * (inv * inv)[..., None]
    dn = d[..., None, None]
    hess = (2.0 * dd[..., :, None] * dd[..., None, :] - dn * _DENOM_HESS) * (inv**3)[..., None, None]
    # Vectorized products can round differently per entry; force exact symmetry.
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    return ComplexJet2(value=inv, grad=grad, hess=hess)


def scalar_alpha(params: PulseParams, p: SpacetimePoint) -> complex:
    return complex(1.0 / denominator(params, p.t, p.x, p.y, p.z))


def scalar_alpha_jet(params: PulseParams, p: SpacetimePoint) -> ComplexJet2:
    return alpha_jet(params, p.t, p.x, p.y, p.z)


def wave_residual(jet: ComplexJet2):
    """d'Alembertian ``(-d_tt + d_xx + d_yy + d_zz) alpha`` from a jet."""
    h = jet.hess
    return -h[..., T, T] + h[..., X, X] + h[..., Y, Y] + h[..., Z, Z]


def hessian_scale(jet: ComplexJet2):
    """Largest absolute second partial; the natural scale for residuals."""
    return np.max(np.abs(jet.hess), axis=(-2, -1))
