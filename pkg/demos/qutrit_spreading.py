"""Free evolution of an entangled bi-qutrit state: drift, spreading, untouched internal state."""
from __future__ import annotations

import numpy as np

from chiralpulse.quantum import EvolutionSpec, GaussianPacket, evolve, observables, spreading_law, state_from_modes

width, mu = 0.25, 2.0
packet = GaussianPacket.from_moments(momentum=(0.5, 0.0, 0.0), width=width)
state = state_from_modes({"CM,+1": 1.0, "CM,-1": 1.0j}, packet, packet)

for t in (0.0, 10.0, 100.0, 1000.0):
    obs = observables(evolve(state, EvolutionSpec(mu1=mu, mu2=mu, t=t)))
    f1 = obs["factor1"]
    law = spreading_law(1 / (2 * width), t, mu)
    print(f"t={t:7.1f}  norm={obs['norm']:.15f}  <x>={f1['position'][0]:9.3f}  "
          f"var x={f1['position_var'][0]:.6e} (law {law:.6e})")
print("reduced internal density of factor 1:")
print(np.round(f1["internal_density"].real, 12))
