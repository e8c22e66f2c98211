"""Command-line front end.

    chiralpulse <experiment> [--config run.json] [--out DIR] [--seed N]
                [--deterministic] [--set key.path=value ...]

Every run writes its outputs plus ``manifest.json`` into ``--out``. The exit
code is 0 only if every contract checked by the experiment holds; 1 means a
contract was violated, 2 an invalid configuration, 3 a computation failure
(outputs written before the failure are listed but marked invalid).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .chiral import (
    ALL_MODES,
    ConfigurationError,
    Pulse,
    SuperpositionSpec,
    field_eigenphase_deviation,
    maxwell_residuals_batch,
    sample_grid,
)
from .config import EXPERIMENTS, ConfigError, RunConfig, load_config
from .diagnostics import (
    CharacterizationError,
    CharacterizeConfig,
    QuadratureConfig,
    characterize,
    dimensionless_from_mks,
    gamma_factor,
    poynting_flux_energy,
    volume_energy,
)
from .dynamics import (
    CouplingSpec,
    IntegrationError,
    IntegratorConfig,
    ParticleState,
    RingConfig,
    angular_momentum_transfer,
    integrate_trajectory,
    ring_ensemble,
)
from .diagnostics import MKSCharacteristics
from .quadrature import QuadratureError
from .quantum import (
    BiQutritState,
    EvolutionSpec,
    GaussianPacket,
    ResolutionError,
    evolve,
    momentum_axis,
    observables,
    spreading_law,
    state_from_modes,
)
from .scalar import alpha_jet, hessian_scale, wave_residual

log = logging.getLogger("chiralpulse")

COMPUTATION_ERRORS = (QuadratureError, IntegrationError, CharacterizationError, ResolutionError,
                      ConfigurationError, NotImplementedError)


@dataclass
class Contract:
    name: str
    value: float
    limit: float
    ok: bool


@dataclass
class Run:
    """Output directory bookkeeping for one experiment."""

    out: Path
    outputs: dict = field(default_factory=dict)
    contracts: list = field(default_factory=list)
    stages: dict = field(default_factory=dict)

    def _record(self, name: str) -> None:
        self.outputs[name] = hashlib.sha256((self.out / name).read_bytes()).hexdigest()

    def write_csv(self, name: str, header, rows) -> None:
        with open(self.out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
        self._record(name)

    def write_json(self, name: str, obj) -> None:
        (self.out / name).write_text(json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")
        self._record(name)

    def check(self, name: str, value: float, limit: float, ok: bool | None = None) -> bool:
        value = float(value)
        ok = bool(value <= limit) if ok is None else bool(ok)
        self.contracts.append(Contract(name, value, float(limit), ok))
        if not ok:
            log.warning("contract %s violated: %.6g (limit %.6g)", name, value, limit)
        return ok


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": _plain(obj.real.tolist()), "im": _plain(obj.imag.tolist())}
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _axis(block) -> np.ndarray:
    return np.linspace(block.lo, block.hi, block.n)


# ---------------------------------------------------------------------------
# Experiments


def run_fields(cfg: RunConfig, run: Run) -> None:
    pulse = Pulse(cfg.pulse.build(), cfg.superposition())
    fb = cfg.fields
    rows = np.concatenate([sample_grid(pulse, t, _axis(fb.x), _axis(fb.y), _axis(fb.z)) for t in fb.t])
    run.write_csv("fields.csv", ["t", "x", "y", "z", "ex", "ey", "ez", "bx", "by", "bz"], rows)
    run.stages["fields"] = {"samples": int(rows.shape[0])}
    run.check("fields_finite", float(np.sum(~np.isfinite(rows))), 0.0)


def _random_spec(rng) -> SuperpositionSpec:
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    return SuperpositionSpec(dict(zip(ALL_MODES, c)))


def run_verify(cfg: RunConfig, run: Run) -> None:
    vb = cfg.verify
    rng = np.random.default_rng(cfg.seed)
    lo, hi = np.log(vb.psi_range[0]), np.log(vb.psi_range[1])
    pairs = np.exp(rng.uniform(lo, hi, size=(vb.n_shape_pairs, 2)))
    rows = []
    worst = {"wave": 0.0, "maxwell": 0.0, "eigenphase": 0.0}
    violations = {"wave": 0, "maxwell": 0, "eigenphase": 0}
    n_checks = {"wave": 0, "maxwell": 0, "eigenphase": 0}

    for ip, (p1, p2) in enumerate(pairs):
        params = cfg.pulse.build(psi1=float(p1), psi2=float(p2))
        pts = rng.uniform(-vb.box, vb.box, size=(vb.n_points, 4))
        jet = alpha_jet(params, *pts.T)
        rel = np.abs(wave_residual(jet)) / hessian_scale(jet)
        rows.append(["wave", ip, p1, p2, "alpha", float(rel.max()), int(np.sum(rel > vb.wave_tol))])
        worst["wave"] = max(worst["wave"], float(rel.max()))
        violations["wave"] += int(np.sum(rel > vb.wave_tol))
        n_checks["wave"] += rel.size

        specs = [(m.label, SuperpositionSpec.single(m)) for m in ALL_MODES]
        specs += [(f"random{k}", _random_spec(rng)) for k in range(vb.n_superpositions)]
        for label, spec in specs:
            res = maxwell_residuals_batch(Pulse(params, spec), pts)
            rel = np.max(res.relative(), axis=-1)
            rows.append(["maxwell", ip, p1, p2, label, float(rel.max()), int(np.sum(rel > vb.maxwell_tol))])
            worst["maxwell"] = max(worst["maxwell"], float(rel.max()))
            violations["maxwell"] += int(np.sum(rel > vb.maxwell_tol))
            n_checks["maxwell"] += rel.size

        for mode in ALL_MODES:
            n = vb.n_points
            dev = field_eigenphase_deviation(
                Pulse(params, SuperpositionSpec.single(mode)), mode.kappa,
                rng.uniform(-vb.box, vb.box, n), rng.uniform(0, vb.box, n),
                rng.uniform(-vb.box, vb.box, n), rng.uniform(0, 2 * np.pi, n),
            )
            rows.append(["eigenphase", ip, p1, p2, mode.label, float(dev.max()), int(np.sum(dev > vb.eigenphase_tol))])
            worst["eigenphase"] = max(worst["eigenphase"], float(dev.max()))
            violations["eigenphase"] += int(np.sum(dev > vb.eigenphase_tol))
            n_checks["eigenphase"] += dev.size

    run.write_csv("verify.csv", ["check", "pair", "psi1", "psi2", "spec", "max_relative", "violations"], rows)
    summary = {"worst": worst, "violations": violations, "checks": n_checks,
               "tolerances": {"wave": vb.wave_tol, "maxwell": vb.maxwell_tol, "eigenphase": vb.eigenphase_tol}}
    run.write_json("verify.json", summary)
    run.stages["verify"] = {"checks": n_checks}
    run.check("wave_violations", violations["wave"], 0)
    run.check("maxwell_violations", violations["maxwell"], 0)
    run.check("eigenphase_violations", violations["eigenphase"], 0)


def run_energy(cfg: RunConfig, run: Run) -> None:
    params, spec = cfg.pulse.build(), cfg.superposition()
    eb = cfg.energy
    quad = QuadratureConfig(rtol=eb.quad.rtol, max_subdivisions=eb.quad.max_subdivisions)
    flux = [(z0, poynting_flux_energy(params, spec, z0, quad)) for z0 in eb.planes]
    vol = [(t, volume_energy(params, spec, t, quad)) for t in eb.times]
    rows = [["flux", z0, r.estimate, r.error, r.evaluations] for z0, r in flux]
    rows += [["volume", t, r.estimate, r.error, r.evaluations] for t, r in vol]
    run.write_csv("energy.csv", ["method", "plane_or_time", "value", "error", "evaluations"], rows)
    j, e = flux[0][1], vol[0][1]
    report = {
        "j_flux": j.estimate,
        "e_volume": e.estimate,
        "gamma_factor": gamma_factor(j.estimate),
        "relative_difference": abs(j.estimate - e.estimate) / abs(e.estimate),
        "planes": {repr(z0): asdict(r) for z0, r in flux},
        "times": {repr(t): asdict(r) for t, r in vol},
    }
    run.write_json("energy.json", report)
    run.stages["energy"] = {"evaluations": sum(r.evaluations for _, r in flux + vol)}
    run.check("flux_volume_consistency", report["relative_difference"], eb.consistency_tol)
    for label, series in (("plane", flux), ("time", vol)):
        ref = series[0][1]
        for _, r in series[1:]:
            run.check(f"{label}_independence", abs(r.estimate - ref.estimate), r.error + ref.error)


def run_characterize(cfg: RunConfig, run: Run) -> None:
    params, spec = cfg.pulse.build(), cfg.superposition()
    cb = cfg.characterize
    ccfg = CharacterizeConfig(quad=QuadratureConfig(rtol=cb.quad_rtol))
    res = characterize(params, spec, cb.n_picoseconds, spot_z=cb.spot_z, cfg=ccfg)
    run.write_json("characteristics.json", asdict(res))
    run.stages["characterize"] = {"t1": res.t1, "direction": res.direction}
    run.check("speed_bound", abs(res.beta), 1.0 + cb.beta_tol)
    back = dimensionless_from_mks(MKSCharacteristics(**res.mks), n_picoseconds=cb.n_picoseconds,
                                  phi=params.phi, xi=params.xi)
    expect = {"beta": abs(res.visual["beta"]), "z_w": res.visual["z_w"], "z_rg": abs(res.visual["z_rg"]),
              "r_s": res.visual["spot_radius"], "gamma": res.gamma_factor}
    err = max(abs(back[k] - v) / max(abs(v), 1e-300) for k, v in expect.items())
    run.check("mks_roundtrip", err, cb.roundtrip_tol)
    if res.out_of_regime:
        log.warning("pulse deforms by more than %.0f%% before half height", 100 * ccfg.deformation_limit)


def _integrator(block) -> IntegratorConfig:
    return IntegratorConfig(rtol=block.rtol, atol=block.atol, method=block.method, n_output=block.n_output)


def _congruence(trajs, radius: float) -> float:
    """Largest mismatch after rotating every ring member onto the first."""
    ref = trajs[0]
    a0 = math.atan2(ref.xi[0, 2], ref.xi[0, 1])
    worst = 0.0
    scale = max(radius, 1.0)
    for tr in trajs[1:]:
        if tr.lab_time.shape != ref.lab_time.shape or not np.allclose(tr.lab_time, ref.lab_time, rtol=0, atol=1e-9):
            return math.inf
        ang = a0 - math.atan2(tr.xi[0, 2], tr.xi[0, 1])
        c, s = math.cos(ang), math.sin(ang)
        rot = np.array([[c, -s], [s, c]])
        dx = np.abs(tr.xi[:, 1:3] @ rot.T - ref.xi[:, 1:3]) / scale
        dz = np.abs(tr.xi[:, 3] - ref.xi[:, 3]) / scale
        dv = np.abs(tr.v[:, 1:3] @ rot.T - ref.v[:, 1:3])
        dvz = np.abs(tr.v[:, 3] - ref.v[:, 3])
        worst = max(worst, float(max(dx.max(), dz.max(), dv.max(), dvz.max())))
    return worst


def run_trace(cfg: RunConfig, run: Run) -> None:
    tb = cfg.trace
    params = cfg.pulse.build()
    coupling = CouplingSpec(lam=params.lam, sign=tb.charge_sign)
    icfg = _integrator(tb.integrator)
    ring_cfg = RingConfig(t_start=tb.t_start, **tb.ring.model_dump())
    traj_rows, gamma_rows, summary = [], [], {}
    nfev = 0
    for label in tb.modes:
        spec = SuperpositionSpec.single(label)
        trajs = [
            integrate_trajectory(p0, (params, spec), coupling, tb.t_end, icfg,
                                 settle_ratio=tb.settle_ratio, max_lab_time=tb.max_lab_time)
            for p0 in ring_ensemble(ring_cfg)
        ]
        for k, tr in enumerate(trajs):
            nfev += tr.metadata["nfev"]
            for row in tr.rows():
                traj_rows.append([label, k, *row])
                gamma_rows.append([label, k, row[0], row[-1] - 1.0])
        drift = max(tr.metadata["max_shell_drift"] for tr in trajs)
        entry = {
            "delta_lz": angular_momentum_transfer(trajs),
            "final_gamma_minus_1": [float(tr.gamma[-1] - 1.0) for tr in trajs],
            "max_shell_drift": drift,
            "settled": all(tr.metadata["field_settled"] is not False for tr in trajs),
            "t_end": max(tr.metadata["t_end"] for tr in trajs),
        }
        run.check(f"shell_drift[{label}]", drift, tb.shell_tol)
        if tb.settle_ratio is not None:
            run.check(f"field_settled[{label}]", 0.0 if entry["settled"] else 1.0, 0.0)
        if spec.is_axisymmetric and not any(tb.ring.initial_velocity[:2]):
            entry["congruence_error"] = _congruence(trajs, tb.ring.radius)
            run.check(f"congruence[{label}]", entry["congruence_error"], tb.congruence_tol)
        summary[label] = entry

    for fam in ("CE", "CM"):
        plus, minus = summary.get(f"{fam},+1"), summary.get(f"{fam},-1")
        if plus and minus:
            a, b = plus["delta_lz"], minus["delta_lz"]
            run.check(f"opposite_sign[{fam}]", a * b, 0.0, ok=a * b < 0)
            run.check(f"equal_magnitude[{fam}]", abs(abs(a) - abs(b)) / max(abs(a), abs(b)), tb.symmetry_tol)

    header = ["mode", "particle", "lab_time", "x", "y", "z", "vx", "vy", "vz", "gamma"]
    run.write_csv("trajectories.csv", header, traj_rows)
    run.write_csv("gamma.csv", ["mode", "particle", "lab_time", "gamma_minus_1"], gamma_rows)
    run.write_json("trace.json", summary)
    run.stages["trace"] = {"nfev": nfev, "method": icfg.method, "rtol": icfg.rtol, "atol": icfg.atol}


def run_scan(cfg: RunConfig, run: Run) -> None:
    sb = cfg.scan
    quad = QuadratureConfig(rtol=sb.quad.rtol, max_subdivisions=sb.quad.max_subdivisions)
    icfg = _integrator(sb.integrator)
    rows, summary = [], {}
    nfev = evals = 0
    for label in sb.modes:
        spec = SuperpositionSpec.single(label)
        series = []
        for lam in sb.lams:
            params = cfg.pulse.build(lam=lam)
            flux = poynting_flux_energy(params, spec, sb.energy_plane, quad)
            p0 = ParticleState.at(sb.particle, t=sb.t_start)
            tr = integrate_trajectory(p0, (params, spec), CouplingSpec(lam=lam, sign=sb.charge_sign), sb.t_end, icfg,
                                      settle_ratio=sb.settle_ratio, max_lab_time=sb.max_lab_time)
            nfev += tr.metadata["nfev"]
            evals += flux.evaluations
            g1 = float(tr.gamma[-1] - 1.0)
            series.append({"lam": lam, "j_flux": flux.estimate, "j_error": flux.error, "gamma_minus_1": g1,
                           "shell_drift": tr.metadata["max_shell_drift"], "t_end": tr.metadata["t_end"]})
            rows.append([label, lam, flux.estimate, flux.error, g1, tr.metadata["max_shell_drift"]])
            run.check(f"shell_drift[{label},{lam!r}]", tr.metadata["max_shell_drift"], sb.shell_tol)
        ref = series[0]
        for s in series[1:]:
            expected = (s["lam"] / ref["lam"]) ** 2
            run.check(f"energy_scaling[{label},{s['lam']!r}]", abs(s["j_flux"] / ref["j_flux"] / expected - 1.0),
                      sb.scaling_tol)
        if sb.expect_monotone:
            ordered = sorted(series, key=lambda s: s["lam"])
            gains = [s["gamma_minus_1"] for s in ordered]
            mono = all(b > a for a, b in zip(gains, gains[1:]))
            run.check(f"monotone_gain[{label}]", 0.0 if mono else 1.0, 0.0)
        summary[label] = series
    run.write_csv("scan.csv", ["mode", "lam", "j_flux", "j_error", "gamma_minus_1", "shell_drift"], rows)
    run.write_json("scan.json", summary)
    run.stages["scan"] = {"nfev": nfev, "quadrature_evaluations": evals}


def _packet(block, qb, grid):
    g = GaussianPacket.from_moments(block.momentum, block.width, block.position, hbar=qb.hbar)
    if grid is None:
        return g
    axes = [momentum_axis(block.momentum[k], grid.half_width_sigmas * block.width[k], grid.n[k]) for k in range(3)]
    return g.to_grid(axes)


def _quantum_row(t, obs):
    row = [t, obs["norm"]]
    for name in ("factor1", "factor2"):
        f = obs[name]
        row += list(f["position"]) + list(f["position_var"]) + list(f["momentum"])
    return row


def run_quantum(cfg: RunConfig, run: Run) -> None:
    qb = cfg.quantum
    if qb.relativistic and qb.grid is None:
        raise ConfigError("relativistic evolution needs a momentum grid", "quantum.grid")
    p1 = _packet(qb.packet1, qb, qb.grid)
    p2 = _packet(qb.packet2, qb, qb.grid)
    coeffs = {label: complex(*v) for label, v in qb.modes.items()}
    state = state_from_modes(coeffs, p1, p2)
    base = observables(state, qb.hbar)

    def spec_at(t):
        return EvolutionSpec(mu1=qb.mu1, mu2=qb.mu2, hbar=qb.hbar, c=qb.c, relativistic=qb.relativistic, t=t)

    rows, reports, states = [], {}, {}
    for t in qb.times:
        st = evolve(state, spec_at(t))
        obs = observables(st, qb.hbar)
        rows.append(_quantum_row(t, obs))
        reports[repr(t)] = obs
        states[t] = st
        run.check(f"norm[{t!r}]", abs(st.norm() - 1.0), qb.norm_tol)
        for name in ("factor1", "factor2"):
            dp = np.max(np.abs(obs[name]["momentum"] - base[name]["momentum"]))
            drho = np.max(np.abs(obs[name]["internal_density"] - base[name]["internal_density"]))
            run.check(f"momentum_conserved[{name},{t!r}]", dp, 1e-12 * max(1.0, np.max(np.abs(qb.packet1.width))))
            run.check(f"internal_invariant[{name},{t!r}]", drho, 1e-12)
        if qb.grid is None:
            for name, pb, mu in (("factor1", qb.packet1, qb.mu1), ("factor2", qb.packet2, qb.mu2)):
                sigma0 = qb.hbar / (2 * np.asarray(pb.width))
                expect = spreading_law(sigma0, t, mu, qb.hbar)
                err = np.max(np.abs(obs[name]["position_var"] / expect - 1.0))
                run.check(f"spreading_law[{name},{t!r}]", err, 1e-8)

    ts = sorted(qb.times)
    if len(ts) >= 2 and ts[-2] != 0:
        t_a, t_b = ts[-2], ts[-1]
        two_step = evolve(states[t_a], spec_at(t_b - t_a))
        fid = abs(states[t_b].inner(two_step) - 1.0)
        run.check("composition", fid, 1e-12)

    header = ["t", "norm"]
    for n in ("1", "2"):
        header += [f"x{n}_{a}" for a in "xyz"] + [f"varx{n}_{a}" for a in "xyz"] + [f"p{n}_{a}" for a in "xyz"]
    run.write_csv("quantum.csv", header, rows)
    run.write_json("quantum.json", reports)
    (run.out / "state0.json").write_text(state.to_json() + "\n")
    run._record("state0.json")
    run.stages["quantum"] = {"representation": "grid" if qb.grid else "gaussian", "terms": len(state.terms)}


RUNNERS = {
    "fields": run_fields,
    "verify": run_verify,
    "energy": run_energy,
    "characterize": run_characterize,
    "trace": run_trace,
    "scan": run_scan,
    "quantum": run_quantum,
}


def run(cfg: RunConfig, out: str | Path, experiment: str | None = None, deterministic: bool = False) -> dict:
    """Execute one experiment, write outputs and ``manifest.json``; returns the manifest."""
    experiment = experiment or cfg.experiment
    if experiment not in RUNNERS:
        raise ConfigError(f"unknown experiment {experiment!r}", "experiment")
    if cfg.experiment not in (None, experiment):
        raise ConfigError(f"config is for {cfg.experiment!r}, not {experiment!r}", "experiment")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    r = Run(out)
    start = time.perf_counter()
    error = None
    try:
        RUNNERS[experiment](cfg, r)
    except COMPUTATION_ERRORS as exc:
        error = {"stage": experiment, "type": type(exc).__name__, "message": str(exc)}
        log.error("%s failed: %s", experiment, exc)
    manifest = {
        "toolkit": "chiralpulse",
        "version": __version__,
        "experiment": experiment,
        "deterministic": deterministic,
        "seed": cfg.seed,
        "config": json.loads(cfg.to_json()),
        # timing is the one nondeterministic field; omit it so manifests compare bit-identical
        "wall_clock_s": None if deterministic else time.perf_counter() - start,
        "stages": r.stages,
        "contracts": [asdict(c) for c in r.contracts],
        "outputs": r.outputs,
        "valid": error is None,
        "error": error,
        "ok": error is None and all(c.ok for c in r.contracts),
    }
    (out / "manifest.json").write_text(json.dumps(_plain(manifest), indent=2, sort_keys=True) + "\n")
    return manifest


def _parse_set(items) -> dict:
    overrides = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            overrides[key] = json.loads(raw)
        except json.JSONDecodeError:
            overrides[key] = raw
    return overrides


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chiralpulse", description="Chiral pulse experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", default="out", help="output directory (default: out)")
    ap.add_argument("--seed", type=int, help="seed for randomized sweeps (overrides the config)")
    ap.add_argument("--deterministic", action="store_true", help="reproducible outputs for identical config and seed")
    ap.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key, e.g. scan.lams=[1,2]")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        overrides = _parse_set(args.set)
        if args.seed is not None:
            overrides["seed"] = args.seed
        cfg = load_config(args.config, overrides)
        manifest = run(cfg, args.out, args.experiment, args.deterministic)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    if not manifest["valid"]:
        print(f"{args.experiment} failed: {manifest['error']['message']}", file=sys.stderr)
        return 3
    failed = [c["name"] for c in manifest["contracts"] if not c["ok"]]
    for c in manifest["contracts"]:
        log.info("%-40s %.3e <= %.3e %s", c["name"], c["value"], c["limit"], "ok" if c["ok"] else "FAIL")
    if failed:
        print(f"contracts violated: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
