"""Command-line entry point.

Subcommands: ``sweep``, ``phase-diagram``, ``fidelity``, ``fit-noise``,
``oracle-check``.  Every option can also come from a plain key=value config
file (``--config``); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import experiments, observables, oracles, sampler
from .decoder import PlaquetteDecoder, decode_chain_batch
from .experiments import SweepConfig, _geometry
from .geometry import build_brickwall, build_chain, build_hexagon

# Reference readout-noise rates (p_s, p_sigma) for the three bundled
# device sizes, keyed by brickwall height.
DEVICE_NOISE = {2: (0.042, 0.012), 3: (0.051, 0.018), 4: (0.056, 0.023)}
# GHZ fidelity sampling parameters (S stabilizers, k resampling instances).
FIDELITY_TRIPLES = {2: (30, 500), 3: (75, 500), 4: (100, 500)}


def _parse_number(token: str) -> float:
    token = token.strip()
    if token.endswith("pi"):
        return float(token[:-2] or "1") * math.pi
    return float(token)


def parse_grid(text: str):
    """Grid syntax: comma list ("0,0.1pi,0.25pi") or linspace ("lo:hi:count")."""
    text = text.strip()
    if ":" in text:
        lo, hi, count = text.split(":")
        return tuple(np.linspace(_parse_number(lo), _parse_number(hi), int(count)))
    return tuple(_parse_number(tok) for tok in text.split(","))


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _add_sweep_flags(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--kind", choices=["brickwall", "chain"])
    p.add_argument("--sizes", help="comma-separated sizes (L_y or chain N)")
    p.add_argument("--t-a-grid", dest="t_a_grid", help="t_A grid (radians; 'pi' suffix ok)")
    p.add_argument("--p-s-grid", dest="p_s_grid", help="injected p_s grid")
    p.add_argument("--p-sigma", dest="p_sigma", type=float)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--output")
    p.add_argument("--hist-out", dest="hist_output",
                   help="also write a decoded-magnetization histogram CSV")
    p.add_argument("--dump-shots", dest="dump_shots",
                   help="directory for bit-packed per-point shot dumps")


def _sweep_config(args) -> SweepConfig:
    values = {}
    if args.config:
        values.update(_load_config_file(args.config))
    for key in ("kind", "sizes", "t_a_grid", "p_s_grid", "p_sigma", "shots",
                "seed", "workers", "output", "hist_output", "dump_shots"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    kw = {}
    if "kind" in values:
        kw["kind"] = values["kind"]
    if "sizes" in values:
        v = values["sizes"]
        kw["sizes"] = tuple(int(x) for x in str(v).split(",")) if isinstance(v, str) else v
    if "t_a_grid" in values:
        v = values["t_a_grid"]
        kw["t_A_grid"] = parse_grid(v) if isinstance(v, str) else v
    if "p_s_grid" in values:
        v = values["p_s_grid"]
        kw["p_s_grid"] = parse_grid(v) if isinstance(v, str) else v
    for key, cast in (("p_sigma", float), ("shots", int), ("seed", int),
                      ("workers", int)):
        if key in values:
            kw[key] = cast(values[key])
    for key in ("output", "hist_output", "dump_shots"):
        if key in values:
            kw[key] = values[key]
    return SweepConfig(**kw)


def _dump_shots(config: SweepConfig):
    import os

    os.makedirs(config.dump_shots, exist_ok=True)
    for kind, size, t_A, p_s, p_sigma, shots, seed in experiments._grid_points(config):
        geom = _geometry(kind, size)
        params = sampler.ProtocolParams(t_A=t_A, p_s=p_s, p_sigma=p_sigma,
                                        shots=shots, seed=seed)
        shot = sampler.sample_noisy_shots(geom, params, np.arange(shots))
        name = f"{kind}-{size}-tA{t_A:.6g}-ps{p_s:.6g}.shots"
        sampler.write_shots(os.path.join(config.dump_shots, name), geom, params, shot)


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    rows = experiments.run_sweep(config)
    if config.dump_shots:
        _dump_shots(config)
    print(f"wrote {len(rows)} rows to {config.output}")
    return 0


def cmd_phase_diagram(args) -> int:
    config = _sweep_config(args)
    rows = experiments.phase_diagram(config)
    _, meta, _ = experiments.read_csv(config.output)
    print(f"wrote {len(rows)} rows to {config.output}")
    print(f"ridge t_A at min p_s: {meta['ridge_t_A_at_min_p_s']}")
    print(f"ridge p_s at max t_A: {meta['ridge_p_s_at_max_t_A']}")
    return 0


def cmd_fidelity(args) -> int:
    sizes = tuple(int(x) for x in args.sizes.split(","))
    rows = []
    for L_y in sizes:
        geom = build_brickwall(L_y)
        if args.p_s is not None:
            p_s, p_sigma = args.p_s, args.p_sigma or 0.0
        else:
            p_s, p_sigma = DEVICE_NOISE.get(L_y, (0.0, 0.0))
        S, k = FIDELITY_TRIPLES.get(L_y, (args.S, args.k))
        if args.S:
            S = args.S
        if args.k:
            k = args.k
        rand = np.random.default_rng(np.random.SeedSequence([args.seed, L_y]))
        samples = observables.sample_ghz_stabilizers(
            geom, S, args.shots, rand, p_s=p_s, p_sigma=p_sigma)
        est = observables.estimate_fidelity(samples, S, k, rand)
        rows.append({
            "kind": "brickwall", "size": L_y, "n_sites": geom.n_sites,
            "p_s": f"{p_s:.12g}", "p_sigma": f"{p_sigma:.12g}",
            "S": S, "k": k, "shots": args.shots, "seed": args.seed,
            "F": f"{est.F_hat:.12g}", "F_err": f"{est.stderr:.12g}",
        })
        print(f"L_y={L_y} N={geom.n_sites}: F = {est.F_hat:.4f} +- {est.stderr:.4f}")
    if args.output:
        experiments._write_csv(
            args.output, "nishimori-fidelity-v1", {},
            ["kind", "size", "n_sites", "p_s", "p_sigma", "S", "k", "shots",
             "seed", "F", "F_err"], rows)
    return 0


def cmd_fit_noise(args) -> int:
    geom = build_brickwall(args.size)
    t_grid = parse_grid(args.t_a_grid)
    zxz_means = []
    w_means = []
    zxz_rows = []
    for t_A in t_grid:
        params = sampler.ProtocolParams(t_A=float(t_A), p_s=args.p_s,
                                        p_sigma=args.p_sigma,
                                        shots=args.shots, seed=args.seed)
        shot = sampler.sample_noisy_shots(geom, params, np.arange(args.shots))
        zxz, w = observables.bond_plaquette_means(geom, shot.sigma_readout, shot.s_prime)
        zxz_means.append(float(zxz.mean()))
        w_means.append(float(w.mean()))
        zxz_rows.append((float(t_A), zxz, w))
    fit = observables.fit_noise_model(t_grid, zxz_means, w_means)
    print(f"p_s_hat = {fit.p_s_hat:.5f} +- {fit.p_s_err:.5f}")
    print(f"p_sigma_hat = {fit.p_sigma_hat:.5f} +- {fit.p_sigma_err:.5f}")
    if args.sitemap_out:
        rows = []
        for t_A, zxz, w in zxz_rows:
            for b, v in enumerate(zxz):
                rows.append({"t_A": f"{t_A:.12g}", "element": "bond",
                             "index": b, "value": f"{v:.12g}"})
            for p, v in enumerate(w):
                rows.append({"t_A": f"{t_A:.12g}", "element": "plaquette",
                             "index": p, "value": f"{v:.12g}"})
        experiments._write_csv(args.sitemap_out, experiments.SCHEMA_SITEMAP, {},
                               ["t_A", "element", "index", "value"], rows)
    return 0


def cmd_oracle_check(args) -> int:
    geoms = [
        ("bond", build_chain(2)),
        ("hexagon", build_hexagon()),
        ("two-hexagon", build_brickwall(2)),
    ]
    angles = [0.0, math.pi / 8, math.pi / 6, math.pi / 4]
    worst = 0.0
    ok = True
    for name, geom in geoms:
        for t_A in angles:
            spec = oracles.build_circuit_spec(geom, t_A)
            exact = oracles.statevector_distribution(spec)
            closed = oracles.closed_form_distribution(geom, t_A, 0.0)
            tv = oracles.total_variation(exact, closed)
            worst = max(worst, tv)
            status = "ok" if tv < args.tolerance else "FAIL"
            if tv >= args.tolerance:
                ok = False
            print(f"{name:12s} t_A={t_A:.6f}  TV={tv:.3e}  {status}")
    print(f"worst TV = {worst:.3e} (tolerance {args.tolerance:g})")
    if not ok:
        print("oracle check failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nishimori",
        description="Measurement-induced Ising order: sampling, decoding, sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a (size, t_A, p_s) grid sweep")
    _add_sweep_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase-diagram", help="2D (t_A, p_s) grid with ridge columns")
    _add_sweep_flags(p)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("fidelity", help="GHZ fidelity from stabilizer sampling")
    p.add_argument("--sizes", default="2,3,4")
    p.add_argument("--S", type=int, default=0, help="stabilizers per size (0 = built-in)")
    p.add_argument("--k", type=int, default=0, help="resampling instances (0 = built-in)")
    p.add_argument("--shots", type=int, default=200, help="shots per stabilizer")
    p.add_argument("--p-s", dest="p_s", type=float, default=None)
    p.add_argument("--p-sigma", dest="p_sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("fit-noise", help="recover noise rates from observables")
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--t-a-grid", dest="t_a_grid", default="0.05:0.25pi:11")
    p.add_argument("--p-s", dest="p_s", type=float, default=0.056)
    p.add_argument("--p-sigma", dest="p_sigma", type=float, default=0.023)
    p.add_argument("--shots", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sitemap-out", dest="sitemap_out",
                   help="per-bond / per-plaquette means CSV")
    p.set_defaults(func=cmd_fit_noise)

    p = sub.add_parser("oracle-check", help="statevector vs closed-form distributions")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.set_defaults(func=cmd_oracle_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
