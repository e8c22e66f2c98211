"""Kick a ring of electrons with left- and right-handed pulses and compare the torque."""
from __future__ import annotations

import numpy as np

from chiralpulse.chiral import SuperpositionSpec
from chiralpulse.dynamics import (
    CouplingSpec,
    RingConfig,
    angular_momentum_transfer,
    integrate_trajectory,
    ring_ensemble,
)
from chiralpulse.scalar import PulseParams

params = PulseParams(lam=1.0)
ring = RingConfig(n_particles=12, radius=5.0, t_start=-10.0)

for label in ("CM,+1", "CM,-1", "CM,0"):
    spec = SuperpositionSpec.single(label)
    trajs = [
        integrate_trajectory(p0, (params, spec), CouplingSpec(lam=params.lam), 10.0,
                             settle_ratio=1e-8, max_lab_time=1e5)
        for p0 in ring_ensemble(ring)
    ]
    dlz = angular_momentum_transfer(trajs)
    gain = np.mean([t.gamma[-1] - 1 for t in trajs])
    drift = max(t.shell_drift() for t in trajs)
    print(f"{label:6s}  dLz = {dlz:+.4e}   <gamma-1> = {gain:.4e}   shell drift {drift:.1e}")
