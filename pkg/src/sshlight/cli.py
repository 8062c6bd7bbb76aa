"""Command-line entry points: bands, transport, beamsplitter, disorder,
optimize, verify."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import (ConfigError, ExperimentConfig, PRESET_NAMES, load_config,
                     preset)
from .protocols import (beamsplitter_experiment, disorder_ensemble,
                        optimize_slope, transport_experiment,
                        transport_transmission)
from .serialize import (write_band_csv, write_ensemble_csv, write_meta,
                        write_trajectory_csv)
from .spectral import band_sweep


def _load(args) -> ExperimentConfig:
    token = args.config
    cfg = preset(token) if token in PRESET_NAMES else load_config(token)
    if args.dz is not None:
        cfg = replace(cfg, dz=args.dz)
    if args.seed is not None and cfg.disorder is not None:
        cfg = replace(cfg, disorder=replace(cfg.disorder, seed=args.seed))
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_bands(args) -> int:
    cfg = _load(args)
    deltas = np.linspace(args.delta_min, args.delta_max, args.delta_count)
    sweep = band_sweep(cfg.spec(), deltas)
    out = _outdir(args)
    csv_path = write_band_csv(sweep, out / f"{cfg.label}_bands.csv")
    write_meta(out / f"{cfg.label}_bands.meta.json", cfg,
               {"command": "bands", "deltas": list(map(float, deltas))})
    print(f"wrote {csv_path}")
    return 0


def cmd_transport(args) -> int:
    cfg = _load(args)
    traj = transport_experiment(cfg)
    out = _outdir(args)
    csv_path = write_trajectory_csv(traj, out / f"{cfg.label}_transport.csv")
    write_meta(out / f"{cfg.label}_transport.meta.json", cfg, {
        "command": "transport",
        "seed": cfg.disorder.seed if cfg.disorder else None,
        "dz": cfg.dz,
        "warnings": traj.meta["warnings"],
        "runtime_s": traj.meta["runtime_s"],
        "xname": "z",
        "injection_sites": traj.meta["injection_sites"],
        "targets": {str(k): v for k, v in traj.meta["targets"].items()},
    })
    print(f"wrote {csv_path}")
    print(f"transmission = {transport_transmission(traj):.4f}")
    for w in traj.meta["warnings"]:
        print(f"warning: {w}")
    return 0


def cmd_beamsplitter(args) -> int:
    cfg = _load(args)
    traj = beamsplitter_experiment(cfg)
    out = _outdir(args)
    csv_path = write_trajectory_csv(traj, out / f"{cfg.label}_beamsplitter.csv")
    write_meta(out / f"{cfg.label}_beamsplitter.meta.json", cfg, {
        "command": "beamsplitter",
        "dz": cfg.dz,
        "warnings": traj.meta["warnings"],
        "runtime_s": traj.meta["runtime_s"],
        "xname": "uz_int",
        "outputs": traj.meta["outputs"],
        "uz_offset_estimate": traj.meta["uz_offset_estimate"],
    })
    print(f"wrote {csv_path}")
    print(f"effective extra interaction phase ~ {traj.meta['uz_offset_estimate']:.3f}")
    return 0


def cmd_disorder(args) -> int:
    cfg = _load(args)
    res = disorder_ensemble(cfg, threads=args.threads)
    out = _outdir(args)
    tag = f"{cfg.label}_disorder_{res.meta['kind']}"
    csv_path = write_ensemble_csv(res, out / f"{tag}.csv")
    write_meta(out / f"{tag}.meta.json", cfg, {
        "command": "disorder",
        "seed": res.meta["base_seed"],
        "dz": cfg.dz,
        "warnings": res.meta["warnings"],
        "failures": res.failures,
        "runtime_s": res.meta["runtime_s"],
        "xname": "uz_int",
        "outputs": res.meta["outputs"],
    })
    print(f"wrote {csv_path} ({res.meta['repetitions']} repetitions, "
          f"{len(res.failures)} failures)")
    return 0


def cmd_optimize(args) -> int:
    cfg = _load(args)
    s_grid = np.linspace(args.s_min, args.s_max, args.s_count)
    s_star, curve = optimize_slope(cfg, s_grid)
    out = _outdir(args)
    path = out / f"{cfg.label}_optimize.csv"
    with path.open("w") as fh:
        fh.write("s,transmission\n")
        for s, t in curve:
            fh.write(f"{s!r},{t!r}\n")
    write_meta(out / f"{cfg.label}_optimize.meta.json", cfg,
               {"command": "optimize", "s_star": s_star})
    print(f"wrote {path}")
    print(f"best slope s = {s_star} "
          f"(transmission {dict(curve)[s_star]:.4f})")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification

    failures = run_verification(verbose=True)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sshlight",
        description="Non-classical light in SSH lattices with movable domain walls")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default="topo32",
                       help=f"config file (.yaml/.json) or preset: {', '.join(PRESET_NAMES)}")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="disorder base seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--dz", type=float, default=None, help="step length in cm")

    p = sub.add_parser("bands", help="band structure and IPR vs coupling ratio")
    common(p)
    p.add_argument("--delta-min", type=float, default=0.2)
    p.add_argument("--delta-max", type=float, default=6.0)
    p.add_argument("--delta-count", type=int, default=59)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("transport", help="move a domain wall and track the light")
    common(p)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("beamsplitter", help="two-wall interaction-length sweep")
    common(p)
    p.set_defaults(func=cmd_beamsplitter)

    p = sub.add_parser("disorder", help="disorder ensemble over the beam splitter")
    common(p)
    p.set_defaults(func=cmd_disorder)

    p = sub.add_parser("optimize", help="scan the bend slope for transmission")
    common(p)
    p.add_argument("--s-min", type=float, default=0.5)
    p.add_argument("--s-max", type=float, default=4.0)
    p.add_argument("--s-count", type=int, default=8)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="engine vs truncated-Fock oracle checks")
    common(p)
    p.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        rc = args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(f"done in {time.perf_counter() - t0:.1f} s")
    return rc


if __name__ == "__main__":
    raise SystemExit(main())
