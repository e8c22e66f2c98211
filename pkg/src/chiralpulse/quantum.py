"""Free evolution of bi-qutrit pulse states.

A state lives in ``L2(R^3, C^3) (x) L2(R^3, C^3)`` and is stored as a sum of
product terms ``w * (packet1 (x) c1) (x) (packet2 (x) c2)`` where each
``packet`` is a momentum-space amplitude and each ``c`` a unit 3-vector.

The free Hamiltonian is diagonal in momentum and the identity on the
internal ``C^3`` factors, so evolution multiplies every momentum amplitude by
``exp(-i E_n(p) t / hbar)`` and leaves the internal vectors alone.

Two packet representations share one interface:

* :class:`GaussianPacket` - ``exp(c + sum_j (-a_j p_j^2 + b_j p_j))`` with
  complex coefficients. Nonrelativistic evolution only shifts ``a`` by
  ``i t / (2 mu hbar)``, so it is exact, and every matrix element used by
  :func:`observables` has a closed form.
* :class:`GridPacket` - amplitudes on a uniform momentum grid. Supports the
  relativistic dispersion; position observables come from an FFT.

Reduced units default to ``hbar = c = 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np

from .chiral import ChiralMode, Family


class ResolutionError(ValueError):
    """The momentum grid cannot resolve the requested evolution."""


def dispersion(p, mu: float, relativistic: bool = False, c: float = 1.0):
    """Kinetic energy ``|p|^2/(2 mu)`` or ``sqrt(p^2 c^2 + mu^2 c^4) - mu c^2``."""
    if not mu > 0:
        raise ValueError("mass parameter mu must be positive")
    p = np.asarray(p, dtype=float)
    p2 = np.sum(p * p, axis=-1)
    if not relativistic:
        return p2 / (2 * mu)
    # Written to avoid cancellation: sqrt(m^2c^4 + p^2c^2) - mc^2 = p^2c^2 / (sqrt(...) + mc^2)
    rest = mu * c * c
    return p2 * c * c / (np.sqrt(rest * rest + p2 * c * c) + rest)


@dataclass(frozen=True)
class EvolutionSpec:
    mu1: float = 1.0
    mu2: float = 1.0
    hbar: float = 1.0
    c: float = 1.0
    relativistic: bool = False
    t: float = 0.0

    def __post_init__(self):
        if not (self.mu1 > 0 and self.mu2 > 0):
            raise ValueError("mass parameters mu1, mu2 must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")


class InteractionPotential(Protocol):
    """Hermitian ``3x3``-matrix-valued function of position (extension point)."""

    def __call__(self, x: np.ndarray) -> np.ndarray: ...


def check_hermitian(potential: InteractionPotential, points) -> float:
    """Largest anti-Hermitian part of ``potential`` over ``points[..., 3]``."""
    v = np.asarray(potential(np.asarray(points, float)))
    return float(np.max(np.abs(v - np.conj(np.swapaxes(v, -1, -2)))))


# ---------------------------------------------------------------------------
# Gaussian packets


def _gauss_moments(a1, b1, a2, b2):
    """Per-axis ``int conj(g1) g2 p^k dp`` for k = 0, 1, 2 (without the ``c`` factors)."""
    A = np.conj(a1) + a2
    B = np.conj(b1) + b2
    m0 = np.sqrt(np.pi / A) * np.exp(B * B / (4 * A))
    m1 = B / (2 * A) * m0
    m2 = (1 / (2 * A) + B * B / (4 * A * A)) * m0
    return m0, m1, m2


@dataclass(frozen=True)
class GaussianPacket:
    a: np.ndarray
    b: np.ndarray
    c: complex = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex).reshape(3)
        if np.any(a.real <= 0):
            raise ValueError("Gaussian packet needs Re(a) > 0 on every axis")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=complex).reshape(3))
        object.__setattr__(self, "c", complex(self.c))

    @classmethod
    def from_moments(cls, momentum=(0.0, 0.0, 0.0), width=(1.0, 1.0, 1.0), position=(0.0, 0.0, 0.0),
                     phase: float = 0.0, hbar: float = 1.0) -> GaussianPacket:
        """Normalized minimum-uncertainty packet.

        ``width`` is the momentum standard deviation per axis; the position
        standard deviation is ``hbar / (2 width)``.
        """
        p0 = np.asarray(momentum, float)
        s = np.asarray(width, float) * np.ones(3)
        x0 = np.asarray(position, float)
        a = 1 / (4 * s * s)
        b = p0 / (2 * s * s) - 1j * x0 / hbar
        log_norm = -0.25 * np.sum(np.log(2 * np.pi * s * s))
        c = log_norm - np.sum(p0 * p0 / (4 * s * s)) + 1j * phase
        return cls(a, b, c)

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        return np.exp(self.c + np.sum(-self.a * p * p + self.b * p, axis=-1))

    def evolved(self, t: float, mu: float, hbar: float = 1.0, relativistic: bool = False, c: float = 1.0):
        if relativistic:
            raise NotImplementedError("relativistic dispersion needs a GridPacket")
        return replace(self, a=self.a + 1j * t / (2 * mu * hbar))

    def _factors(self, other: GaussianPacket):
        m0, m1, m2 = _gauss_moments(self.a, self.b, other.a, other.b)
        scale = np.exp(np.conj(self.c) + other.c)
        return scale, m0, m1, m2

    def overlap(self, other: GaussianPacket) -> complex:
        scale, m0, _, _ = self._factors(other)
        return complex(scale * np.prod(m0))

    def matrix_element(self, other: GaussianPacket, op: str, axis: int, hbar: float = 1.0) -> complex:
        """``<self| O_axis |other>`` for O in ``p``, ``p2``, ``x``, ``x2``."""
        scale, m0, m1, m2 = self._factors(other)
        rest = scale * np.prod(np.delete(m0, axis))
        a1, b1, a2, b2 = self.a[axis], self.b[axis], other.a[axis], other.b[axis]
        j0, j1, j2 = m0[axis], m1[axis], m2[axis]
        if op == "p":
            val = j1
        elif op == "p2":
            val = j2
        elif op == "x":
            # x = i hbar d/dp acting on the ket
            val = 1j * hbar * (-2 * a2 * j1 + b2 * j0)
        elif op == "x2":
            # <d g1 | d g2> hbar^2 after integrating by parts
            ca1, cb1 = np.conj(a1), np.conj(b1)
            val = hbar**2 * (4 * ca1 * a2 * j2 - 2 * (ca1 * b2 + cb1 * a2) * j1 + cb1 * b2 * j0)
        else:
            raise ValueError(f"unknown operator {op!r}")
        return complex(rest * val)

    def to_grid(self, axes) -> GridPacket:
        grids = np.meshgrid(*axes, indexing="ij")
        return GridPacket(tuple(np.asarray(ax, float) for ax in axes), self(np.stack(grids, axis=-1)))

    def to_dict(self) -> dict:
        return {"kind": "gaussian", "a": _cplx_list(self.a), "b": _cplx_list(self.b), "c": [self.c.real, self.c.imag]}


# ---------------------------------------------------------------------------
# Grid packets


def momentum_axis(center: float, half_width: float, n: int) -> np.ndarray:
    """Uniform momentum nodes (endpoint excluded so the FFT period is exact)."""
    return center - half_width + 2 * half_width * np.arange(n) / n


@dataclass(frozen=True)
class GridPacket:
    axes: tuple
    amp: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(ax, float) for ax in self.axes)
        amp = np.asarray(self.amp, dtype=complex)
        if len(axes) != 3 or amp.shape != tuple(len(ax) for ax in axes):
            raise ValueError("grid packet needs three axes matching the amplitude shape")
        for ax in axes:
            if len(ax) > 1 and not np.allclose(np.diff(ax), ax[1] - ax[0], rtol=1e-9, atol=0):
                raise ValueError("momentum axes must be uniform")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "amp", amp)

    @property
    def steps(self) -> np.ndarray:
        return np.array([ax[1] - ax[0] for ax in self.axes])

    @property
    def cell(self) -> float:
        return float(np.prod(self.steps))

    def momenta(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def phase_step(self, t: float, mu: float, hbar: float, relativistic: bool, c: float) -> float:
        """Largest energy-phase jump between neighbouring occupied nodes."""
        energy = dispersion(self.momenta(), mu, relativistic, c)
        # nodes below 1e-12 of the peak probability cannot move observables at the 1e-10 level
        occupied = np.abs(self.amp) ** 2 > 1e-12 * np.max(np.abs(self.amp) ** 2)
        worst = 0.0
        for k in range(3):
            jump = np.abs(np.diff(energy, axis=k)) * abs(t) / hbar
            mask = np.logical_or(np.delete(occupied, 0, axis=k), np.delete(occupied, -1, axis=k))
            if jump.size and mask.any():
                worst = max(worst, float(jump[mask].max()))
        return worst

    def evolved(self, t: float, mu: float, hbar: float = 1.0, relativistic: bool = False, c: float = 1.0):
        jump = self.phase_step(t, mu, hbar, relativistic, c)
        if jump > np.pi:
            raise ResolutionError(f"energy phase jumps by {jump:.3g} rad between grid nodes; refine the grid")
        energy = dispersion(self.momenta(), mu, relativistic, c)
        return replace(self, amp=self.amp * np.exp(-1j * energy * (t / hbar)))

    def _check(self, other: GridPacket):
        if not isinstance(other, GridPacket) or any(
            a.shape != b.shape or not np.array_equal(a, b) for a, b in zip(self.axes, other.axes)
        ):
            raise TypeError("grid packets must share the same momentum axes")

    def overlap(self, other: GridPacket) -> complex:
        self._check(other)
        return complex(np.vdot(self.amp, other.amp) * self.cell)

    def position_amplitude(self, axis: int, hbar: float = 1.0):
        """Amplitude transformed to position along ``axis`` and the position nodes.

        Normalized so that sums of ``conj(u) v`` reproduce momentum-space
        overlaps; positions are periodic with period ``2 pi hbar / dp``.
        """
        dp = self.steps[axis]
        n = self.amp.shape[axis]
        trans = np.fft.ifft(self.amp, axis=axis, norm="ortho") * np.sqrt(self.cell)
        x = 2 * np.pi * hbar * np.fft.fftfreq(n, d=dp)
        return trans, x

    def matrix_element(self, other: GridPacket, op: str, axis: int, hbar: float = 1.0) -> complex:
        self._check(other)
        if op in ("p", "p2"):
            p = self.momenta()[..., axis]
            weight = p if op == "p" else p * p
            return complex(np.vdot(self.amp, weight * other.amp) * self.cell)
        if op in ("x", "x2"):
            u, x = self.position_amplitude(axis, hbar)
            v, _ = other.position_amplitude(axis, hbar)
            shape = [1, 1, 1]
            shape[axis] = -1
            x = x.reshape(shape)
            weight = x if op == "x" else x * x
            return complex(np.vdot(u, weight * v))
        raise ValueError(f"unknown operator {op!r}")

    def edge_density(self, axis: int, hbar: float = 1.0) -> float:
        """Fraction of position density in the outer 5% of the periodic box."""
        u, x = self.position_amplitude(axis, hbar)
        dens = np.abs(u) ** 2
        other = tuple(k for k in range(3) if k != axis)
        profile = dens.sum(axis=other)
        edge = np.abs(x) > 0.45 * (np.abs(x).max() * 2)
        return float(profile[edge].sum() / profile.sum())

    def to_dict(self) -> dict:
        return {
            "kind": "grid",
            "axes": [ax.tolist() for ax in self.axes],
            "amp_re": self.amp.real.tolist(),
            "amp_im": self.amp.imag.tolist(),
        }


# ---------------------------------------------------------------------------
# States


def _cplx_list(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, complex).ravel()]


def _from_cplx_list(v) -> np.ndarray:
    return np.array([complex(re, im) for re, im in v])


def packet_from_dict(data: dict):
    if data["kind"] == "gaussian":
        return GaussianPacket(_from_cplx_list(data["a"]), _from_cplx_list(data["b"]), complex(*data["c"]))
    if data["kind"] == "grid":
        return GridPacket(tuple(np.array(ax, float) for ax in data["axes"]), np.array(data["amp_re"]) + 1j * np.array(data["amp_im"]))
    raise ValueError(f"unknown packet kind {data['kind']!r}")


@dataclass(frozen=True)
class QutritFactorState:
    packet: GaussianPacket | GridPacket
    internal: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.internal, dtype=complex).reshape(3)
        norm = np.linalg.norm(c)
        if not np.isclose(norm, 1.0, rtol=0, atol=1e-12):
            raise ValueError(f"internal qutrit amplitudes must have unit norm, got {norm}")
        object.__setattr__(self, "internal", c)

    def overlap(self, other: QutritFactorState) -> complex:
        return self.packet.overlap(other.packet) * complex(np.vdot(self.internal, other.internal))

    def to_dict(self) -> dict:
        return {"packet": self.packet.to_dict(), "internal": _cplx_list(self.internal)}

    @classmethod
    def from_dict(cls, data: dict) -> QutritFactorState:
        return cls(packet_from_dict(data["packet"]), _from_cplx_list(data["internal"]))


def basis_vector(level: int) -> np.ndarray:
    v = np.zeros(3, dtype=complex)
    v[level] = 1.0
    return v


@dataclass(frozen=True)
class BiQutritState:
    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(w), f1, f2) for w, f1, f2 in self.terms)
        if not terms:
            raise ValueError("a state needs at least one term")
        object.__setattr__(self, "terms", terms)

    def inner(self, other: BiQutritState) -> complex:
        total = 0j
        for w1, f1, g1 in self.terms:
            for w2, f2, g2 in other.terms:
                total += np.conj(w1) * w2 * f1.overlap(f2) * g1.overlap(g2)
        return complex(total)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def normalized(self) -> BiQutritState:
        n = self.norm()
        return BiQutritState(tuple((w / n, f1, f2) for w, f1, f2 in self.terms))

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"weight": [w.real, w.imag], "factor1": f1.to_dict(), "factor2": f2.to_dict()}
                for w, f1, f2 in self.terms
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> BiQutritState:
        return cls(tuple(
            (complex(*t["weight"]), QutritFactorState.from_dict(t["factor1"]), QutritFactorState.from_dict(t["factor2"]))
            for t in data["terms"]
        ))


def evolve(state: BiQutritState, spec: EvolutionSpec, potential: InteractionPotential | None = None,
           norm_tol: float = 1e-9) -> BiQutritState:
    """Apply ``exp(-i H t / hbar)`` with ``H = H1 (x) I + I (x) H2``."""
    if potential is not None:
        raise NotImplementedError("only free evolution is implemented; the potential hook is an extension point")
    norm = state.norm()
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"state must be normalized, got norm {norm}")
    if spec.t == 0:
        return state
    kw = dict(hbar=spec.hbar, relativistic=spec.relativistic, c=spec.c)
    terms = []
    for w, f1, f2 in state.terms:
        p1 = f1.packet.evolved(spec.t, spec.mu1, **kw)
        p2 = f2.packet.evolved(spec.t, spec.mu2, **kw)
        terms.append((w, replace(f1, packet=p1), replace(f2, packet=p2)))
    return BiQutritState(tuple(terms))


def _factor_expectation(state: BiQutritState, which: int, op: str, axis: int, hbar: float) -> complex:
    total = 0j
    for w1, f1, g1 in state.terms:
        for w2, f2, g2 in state.terms:
            if which == 0:
                a = f1.packet.matrix_element(f2.packet, op, axis, hbar) * np.vdot(f1.internal, f2.internal)
                rest = g1.overlap(g2)
            else:
                a = g1.packet.matrix_element(g2.packet, op, axis, hbar) * np.vdot(g1.internal, g2.internal)
                rest = f1.overlap(f2)
            total += np.conj(w1) * w2 * a * rest
    return total


def reduced_internal_density(state: BiQutritState, which: int) -> np.ndarray:
    """3x3 internal density matrix of one factor, tracing out everything else."""
    rho = np.zeros((3, 3), dtype=complex)
    for wj, fj, gj in state.terms:
        for wk, fk, gk in state.terms:
            if which == 0:
                weight = fk.packet.overlap(fj.packet) * gk.overlap(gj)
                cj, ck = fj.internal, fk.internal
            else:
                weight = gk.packet.overlap(gj.packet) * fk.overlap(fj)
                cj, ck = gj.internal, gk.internal
            rho += wj * np.conj(wk) * weight * np.outer(cj, np.conj(ck))
    return rho / np.trace(rho).real


def observables(state: BiQutritState, hbar: float = 1.0) -> dict:
    """Norm, per-factor momentum/position means and variances, internal density matrices."""
    n2 = state.inner(state).real
    out = {"norm": float(np.sqrt(n2))}
    for which, name in ((0, "factor1"), (1, "factor2")):
        p = np.array([_factor_expectation(state, which, "p", k, hbar).real for k in range(3)]) / n2
        p2 = np.array([_factor_expectation(state, which, "p2", k, hbar).real for k in range(3)]) / n2
        x = np.array([_factor_expectation(state, which, "x", k, hbar).real for k in range(3)]) / n2
        x2 = np.array([_factor_expectation(state, which, "x2", k, hbar).real for k in range(3)]) / n2
        out[name] = {
            "momentum": p,
            "momentum_var": p2 - p * p,
            "position": x,
            "position_var": x2 - x * x,
            "internal_density": reduced_internal_density(state, which),
        }
    return out


def observables_to_json(obs: dict) -> str:
    def conv(v):
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        if isinstance(v, np.ndarray):
            if np.iscomplexobj(v):
                return {"re": v.real.tolist(), "im": v.imag.tolist()}
            return v.tolist()
        return v

    return json.dumps(conv(obs), indent=2, sort_keys=True)


def spreading_law(sigma0: float, t: float, mu: float, hbar: float = 1.0) -> float:
    """Position variance of a free minimum-uncertainty packet at time ``t``."""
    return sigma0**2 + (hbar * t / (2 * mu * sigma0)) ** 2


# ---------------------------------------------------------------------------
# Chiral labels


#: Convention, not a canonical correspondence: family picks the level of
#: factor 2 (CE -> 0, CM -> 1) and kappa the level of factor 1 (kappa + 1).
DEFAULT_LABELING = {
    ChiralMode(f, k): (k + 1, 0 if f is Family.CE else 1) for f in Family for k in (-1, 0, 1)
}


def state_from_modes(coeffs: dict, packet1, packet2, labeling: dict | None = None) -> BiQutritState:
    """Normalized bi-qutrit state ``sum_m C_m |packets> (x) |l1(m)> |l2(m)>``."""
    labeling = DEFAULT_LABELING if labeling is None else labeling
    if len(set(labeling.values())) != len(labeling):
        raise ValueError("labeling must map modes to distinct basis pairs")
    terms = []
    for mode, coeff in coeffs.items():
        mode = mode if isinstance(mode, ChiralMode) else ChiralMode.parse(mode)
        l1, l2 = labeling[mode]
        terms.append((coeff, QutritFactorState(packet1, basis_vector(l1)), QutritFactorState(packet2, basis_vector(l2))))
    return BiQutritState(tuple(terms)).normalized()
