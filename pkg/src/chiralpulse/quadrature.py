"""Adaptive cubature over unbounded boxes.

Each unbounded axis is compactified with an arctangent substitution before
handing the box to :func:`scipy.integrate.cubature`:

* whole line:  ``x = center + scale * tan(u)``, ``u in (-pi/2, pi/2)``
* half line:   ``x = scale * tan(v)``, ``v in [0, pi/2)``

with Jacobian ``scale / cos(u)^2``. The scale should be comparable to the
width of the integrand so the adaptive rule spends its nodes where the
mass is. Gauss-Kronrod nodes are interior, so the endpoints where the map
diverges are never evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cubature


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget is exhausted before convergence."""

    def __init__(self, message, estimate=None, error=None, evaluations=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.evaluations = evaluations


@dataclass(frozen=True)
class Axis:
    kind: str  # "line", "half", or "finite"
    center: float = 0.0
    scale: float = 1.0
    lo: float = 0.0
    hi: float = 1.0

    @classmethod
    def line(cls, center=0.0, scale=1.0) -> Axis:
        return cls("line", center=center, scale=scale)

    @classmethod
    def half(cls, scale=1.0) -> Axis:
        return cls("half", scale=scale)

    @classmethod
    def finite(cls, lo, hi) -> Axis:
        return cls("finite", lo=lo, hi=hi)

    def limits(self) -> tuple[float, float]:
        if self.kind == "line":
            return -np.pi / 2, np.pi / 2
        if self.kind == "half":
            return 0.0, np.pi / 2
        return self.lo, self.hi

    def map(self, u):
        if self.kind == "finite":
            return u, np.ones_like(u)
        sec2 = 1.0 / np.cos(u) ** 2
        x = self.scale * np.tan(u)
        if self.kind == "line":
            x = x + self.center
        return x, self.scale * sec2


@dataclass(frozen=True)
class QuadResult:
    estimate: float
    error: float
    evaluations: int
    subdivisions: int


def integrate(func, axes: list[Axis], rtol: float = 1e-6, atol: float = 0.0,
              max_subdivisions: int = 20000, rule: str = "gk21") -> QuadResult:
    """Integrate ``func(points[n, d]) -> values[n]`` over the given axes.

    Raises :class:`QuadratureError` (carrying the partial estimate) when the
    subdivision budget runs out.
    """
    axes = list(axes)
    lo, hi = zip(*(a.limits() for a in axes))
    count = [0]

    def mapped(u):
        x = np.empty_like(u)
        jac = np.ones(u.shape[0])
        for k, axis in enumerate(axes):
            x[:, k], jk = axis.map(u[:, k])
            jac *= jk
        count[0] += u.shape[0]
        out = func(x) * jac
        # inf * 0 only occurs at the compactified ends, where the integrand has decayed
        return np.where(np.isfinite(out), out, 0.0)

    res = cubature(mapped, np.array(lo), np.array(hi), rule=rule, rtol=rtol, atol=atol,
                   max_subdivisions=max_subdivisions)
    estimate, error = float(res.estimate), float(res.error)
    if res.status != "converged":
        raise QuadratureError(
            f"cubature did not converge within {max_subdivisions} subdivisions "
            f"(estimate {estimate:.6e} +/- {error:.2e})",
            estimate=estimate, error=error, evaluations=count[0],
        )
    return QuadResult(estimate, error, count[0], int(res.subdivisions))
