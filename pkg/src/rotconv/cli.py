"""Command-line drivers.

Subcommands: run, check-multipliers, sweep-epsilon, sweep-resolution, twin.
Run configuration is a JSON document mirroring the SimConfig field names.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict
from pathlib import Path

from .evolution import InitialSpec, SimConfig, run
from .grid import Grid, inverse_transform
from .invariants import gronwall_envelopes
from .meanstate import mean_profile
from .velocity import (
    CATALOG,
    empirical_lp_ratio,
    hypothesis_check,
    lattice_sup,
)


def load_config(path) -> SimConfig:
    raw = json.loads(Path(path).read_text())
    grid = Grid(raw["grid"]["nx"], raw["grid"]["ny"], raw["grid"]["nz"])
    init_raw = raw.get("initial", {})
    initial = InitialSpec(
        kind=init_raw.get("kind", "random-band-limited"),
        mode=tuple(init_raw.get("mode", (1, 0, 0))),
        amplitude=init_raw.get("amplitude", 0.1),
        band=tuple(init_raw.get("band", (1, 6))),
        seed=init_raw.get("seed", 0),
    )
    return SimConfig(
        grid=grid,
        epsilon=raw.get("epsilon", 0.0),
        dt=raw.get("dt", "auto"),
        t_end=raw.get("t_end", 1.0),
        integrator=raw.get("integrator", "if-rk4"),
        dealias=raw.get("dealias", True),
        initial=initial,
        diagnostics_every=raw.get("diagnostics_every", 1),
        seed=raw.get("seed", 0),
        safety=raw.get("safety", 0.5),
        mode_cap=raw.get("mode_cap"),
    )


def config_echo(config: SimConfig) -> dict:
    d = asdict(config)
    d["grid"] = {"nx": config.grid.nx, "ny": config.grid.ny, "nz": config.grid.nz}
    d["initial"]["mode"] = list(config.initial.mode)
    d["initial"]["band"] = list(config.initial.band)
    return d


def cmd_run(args) -> int:
    from .io import write_profile_csv, write_series_csv, write_snapshot
    from .velocity import solve_velocity

    config = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj = run(config, store_states=True)
    env = gronwall_envelopes(traj.reports)
    write_series_csv(out / "series.csv", traj.reports, env)
    for state in (traj.states[0], traj.final_state):
        theta_p = inverse_transform(state.theta)
        w_p = inverse_transform(solve_velocity(state.theta).w)
        write_profile_csv(out / f"profile_{state.t:.6f}.csv",
                          mean_profile(theta_p, w_p))
        write_snapshot(out / f"theta_{state.t:.6f}.rcs", "theta_prime", theta_p)
    print(f"run complete: t = {traj.final_state.t:.6g}, "
          f"{len(traj.reports)} samples -> {out}")
    return 0


def cmd_check_multipliers(args) -> int:
    from .io import write_csv

    rows = []
    for entry in CATALOG:
        rows.append([
            entry.name,
            hypothesis_check(entry.spec),
            lattice_sup(entry.spec, args.K),
            empirical_lp_ratio(entry.spec, args.p, args.trials, args.seed),
        ])
    header = ["entry", "hypothesis", "lattice_sup", "empirical_ratio"]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(
                f"{v:.17g}" if isinstance(v, float) else str(v) for v in row
            ))
    return 0


def cmd_sweep_epsilon(args) -> int:
    from .experiments import sweep_epsilon
    from .io import write_sweep_outputs

    config = load_config(args.config)
    eps = [float(s) for s in args.eps.split(",")]
    mode = {"matched": "matched", "scaled": "eps-scaled"}[args.mode]
    result = sweep_epsilon(config, eps, mode)
    write_sweep_outputs(args.out, result, config_echo(config), "epsilon")
    print(f"epsilon sweep done, slope = {result.slope}")
    return 0


def cmd_sweep_resolution(args) -> int:
    from .experiments import sweep_resolution
    from .io import write_sweep_outputs

    config = load_config(args.config)
    modes = [int(s) for s in args.modes.split(",")]
    result = sweep_resolution(config, modes)
    write_sweep_outputs(args.out, result, config_echo(config), "modes")
    print("resolution sweep done")
    return 0


def cmd_twin(args) -> int:
    from .experiments import twin_run
    from .io import write_csv

    config = load_config(args.config)
    mode = tuple(int(s) for s in args.delta_mode.split(","))
    report = twin_run(config, args.delta_amp, mode)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "twin.csv", ["t", "err_l2", "err_dual"],
              zip(report.times, report.err_l2, report.err_dual))
    payload = {
        "fitted_rate": report.fitted_rate,
        "response_ratio": report.response_ratio,
        "in_linear_regime": report.in_linear_regime,
        "config": config_echo(config),
    }
    (out / "twin.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"twin run done, fitted rate = {report.fitted_rate:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotconv")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="integrate one configuration")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=cmd_run)

    pm = sub.add_parser("check-multipliers", help="audit the multiplier catalog")
    pm.add_argument("--K", type=int, default=128)
    pm.add_argument("--p", type=float, default=3.0)
    pm.add_argument("--seed", type=int, default=42)
    pm.add_argument("--trials", type=int, default=20)
    pm.add_argument("--out", default=None)
    pm.set_defaults(func=cmd_check_multipliers)

    pe = sub.add_parser("sweep-epsilon", help="vanishing-diffusivity sweep")
    pe.add_argument("--config", required=True)
    pe.add_argument("--eps", required=True)
    pe.add_argument("--mode", choices=["matched", "scaled"], default="matched")
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_sweep_epsilon)

    ps = sub.add_parser("sweep-resolution", help="Galerkin truncation sweep")
    ps.add_argument("--config", required=True)
    ps.add_argument("--modes", required=True)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_sweep_resolution)

    pt = sub.add_parser("twin", help="continuous-dependence twin run")
    pt.add_argument("--config", required=True)
    pt.add_argument("--delta-amp", type=float, default=1e-6)
    pt.add_argument("--delta-mode", default="1,1,1")
    pt.add_argument("--out", required=True)
    pt.set_defaults(func=cmd_twin)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
