"""Pulse energy from two independent integrals, and the electron gain as the amplitude grows."""
from __future__ import annotations

from chiralpulse.chiral import SuperpositionSpec
from chiralpulse.diagnostics import gamma_factor, poynting_flux_energy, volume_energy
from chiralpulse.dynamics import CouplingSpec, ParticleState, integrate_trajectory
from chiralpulse.scalar import PulseParams

spec = SuperpositionSpec.single("CM,-1")

for lam in (20.0, 40.0, 80.0):
    params = PulseParams(lam=lam)
    flux = poynting_flux_energy(params, spec, z0=1.0)
    vol = volume_energy(params, spec, t=0.0)
    tr = integrate_trajectory(ParticleState.at((3.0, 0.0, 0.0), t=-10.0), (params, spec),
                              CouplingSpec(lam=lam), 10.0, settle_ratio=1e-8, max_lab_time=1e5)
    print(f"Lambda={lam:5.1f}  J={flux.estimate:.6e} (+-{flux.error:.1e})  E={vol.estimate:.6e}  "
          f"Gamma={gamma_factor(flux.estimate):.3e}  final gamma-1={tr.gamma[-1] - 1:.4e}")
