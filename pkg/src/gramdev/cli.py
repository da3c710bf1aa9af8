"""Batch command-line front end.

Subcommands: sample | norm | net | theorem1 | example.  Parameters come from
a flat ``key = value`` config file (optional section headers in brackets,
'#' comments) overridden by command-line flags; unknown keys fail closed.
Every run writes run_manifest.json next to its outputs, also on failure.

Exit codes: 0 success, 2 invalid config, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (PooledSpec, REGIMES, bilinear_bound_check, compute_bk,
                           compute_btilde, sweep_min_m, write_sweep_csv)
from .families import FamilySpec, export_ensemble_csv, sample_ensemble
from .montecarlo import (CLAIM_QUAD, CLAIM_SPEC, ExperimentConfig, fit_decay,
                         InsufficientData, mc_failure, estimate_rows,
                         union_bound_gap, write_estimates_csv,
                         write_estimates_json, write_union_gap_csv)
from .nets import build_net, export_net_csv, export_net_meta_json, verify_covering
from .norms import NumericFailure, subexponential_norm_scalar, subgaussian_norm_scalar

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


def parse_config_text(text: str) -> dict:
    """Flat key = value lines; bracketed section headers allowed and ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val.strip()
    return values


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config not found")
    return parse_config_text(p.read_text())


def _merge(config: dict, args: argparse.Namespace, known: dict) -> dict:
    """Apply config then flag overrides; reject unknown config keys."""
    unknown = set(config) - set(known)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, (typ, default) in known.items():
        if getattr(args, key, None) is not None:
            out[key] = getattr(args, key)
        elif key in config:
            try:
                out[key] = typ(config[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
        else:
            out[key] = default
    missing = [k for k, v in out.items() if v is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required keys: {missing}")
    return out


_REQUIRED = object()


def _parse_bool(s) -> bool:
    if isinstance(s, bool):
        return s
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int_list(s) -> tuple:
    if isinstance(s, tuple):
        return s
    return tuple(int(v) for v in str(s).replace(",", " ").split())


def _parse_float_list(s) -> tuple:
    if isinstance(s, tuple):
        return s
    return tuple(float(v) for v in str(s).replace(",", " ").split())


def make_family(kind: str, dim: int, variances=None, scales=None) -> FamilySpec:
    kind = kind.strip().lower()
    if kind == "standard_gaussian":
        return FamilySpec.standard_gaussian(dim)
    if kind == "rademacher":
        return FamilySpec.rademacher(dim)
    if kind == "anisotropic_gaussian":
        if variances is None:
            raise ConfigError("anisotropic_gaussian requires variances")
        return FamilySpec.anisotropic_gaussian(variances)
    if kind == "scaled_gaussian":
        if scales is None:
            raise ConfigError("scaled_gaussian requires scales")
        return FamilySpec.scaled_gaussian(dim, scales)
    raise ConfigError(f"unknown family {kind!r}")


class Manifest:
    def __init__(self, command: str, config_path, outdir: Path):
        self.data = {
            "command": command,
            "config_path": str(config_path) if config_path else None,
            "resolved_config": None,
            "git_or_build_id": f"gramdev-{__version__}",
            "started_at": _now(),
            "finished_at": None,
            "output_paths": [],
            "error": None,
        }
        self.outdir = outdir

    def write(self):
        self.data["finished_at"] = _now()
        self.outdir.mkdir(parents=True, exist_ok=True)
        with open(self.outdir / "run_manifest.json", "w") as fh:
            json.dump(self.data, fh, indent=2, default=_json_default)
            fh.write("\n")


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


# -- subcommands -------------------------------------------------------------

_SAMPLE_KEYS = {
    "family": (str, "standard_gaussian"),
    "dim": (int, _REQUIRED),
    "N": (int, _REQUIRED),
    "seed": (int, 0),
    "variances": (_parse_float_list, None),
    "scales": (_parse_float_list, None),
}


def cmd_sample(args, config, manifest) -> int:
    p = _merge(config, args, _SAMPLE_KEYS)
    manifest.data["resolved_config"] = p
    family = make_family(p["family"], p["dim"], p["variances"], p["scales"])
    ens = sample_ensemble(family, p["N"], p["seed"])
    out = manifest.outdir / "ensemble.csv"
    manifest.outdir.mkdir(parents=True, exist_ok=True)
    export_ensemble_csv(ens, out)
    manifest.data["output_paths"].append(str(out))
    return EXIT_OK


_NORM_KEYS = {
    "dist": (str, "gaussian"),
    "alpha": (int, 2),
    "scale": (float, 1.0),
    "p_max": (int, 16),
    "samples": (int, 10**6),
    "seed": (int, 0),
}

_SCALAR_DISTS = {
    "gaussian": lambda size, rng: rng.standard_normal(size),
    "rademacher": lambda size, rng: rng.integers(0, 2, size) * 2.0 - 1.0,
    "gaussian_squared": lambda size, rng: rng.standard_normal(size) ** 2,
}


def cmd_norm(args, config, manifest) -> int:
    p = _merge(config, args, _NORM_KEYS)
    manifest.data["resolved_config"] = p
    if p["dist"] not in _SCALAR_DISTS:
        raise ConfigError(f"unknown dist {p['dist']!r}; options {sorted(_SCALAR_DISTS)}")
    base = _SCALAR_DISTS[p["dist"]]
    scale = p["scale"]
    sampler = lambda size, rng: scale * base(size, rng)
    if p["alpha"] == 2:
        est = subgaussian_norm_scalar(sampler, p["p_max"], p["samples"], p["seed"])
    elif p["alpha"] == 1:
        est = subexponential_norm_scalar(sampler, p["p_max"], p["samples"], p["seed"])
    else:
        raise ConfigError("alpha must be 1 (sub-exponential) or 2 (sub-Gaussian)")
    out = manifest.outdir / "norm_estimate.json"
    manifest.outdir.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(est.to_json_dict(), fh, indent=2)
        fh.write("\n")
    manifest.data["output_paths"].append(str(out))
    return EXIT_OK


_NET_KEYS = {
    "dim": (int, _REQUIRED),
    "eps": (float, 0.25),
    "seed": (int, 0),
    "saturation": (int, None),
    "max_points": (int, None),
    "probes": (int, 10**5),
}


def cmd_net(args, config, manifest) -> int:
    p = _merge(config, args, _NET_KEYS)
    manifest.data["resolved_config"] = p
    net = build_net(p["dim"], p["eps"], p["seed"], p["saturation"], p["max_points"])
    gap = verify_covering(net, p["probes"], seed=p["seed"] + 1)
    manifest.outdir.mkdir(parents=True, exist_ok=True)
    csv_path = manifest.outdir / "net.csv"
    meta_path = manifest.outdir / "net_meta.json"
    export_net_csv(net, csv_path)
    export_net_meta_json(net, meta_path)
    with open(meta_path) as fh:
        meta = json.load(fh)
    meta["probed_max_gap"] = gap
    meta["probes"] = p["probes"]
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    manifest.data["output_paths"] += [str(csv_path), str(meta_path)]
    return EXIT_OK


_THEOREM1_KEYS = {
    "mode": (str, "decay"),  # decay | union
    "family": (str, "standard_gaussian"),
    "dim": (int, 8),
    "variances": (_parse_float_list, None),
    "scales": (_parse_float_list, None),
    "eps": (float, 0.5),
    "claim": (str, CLAIM_QUAD),
    "N_grid": (_parse_int_list, (25, 50, 100, 200, 400)),
    "n_grid": (_parse_int_list, (4, 8, 16)),
    "N_fixed": (int, 64),
    "trials": (int, 1000),
    "seed": (int, 0),
    "fit": (_parse_bool, True),
}


def cmd_theorem1(args, config, manifest) -> int:
    p = _merge(config, args, _THEOREM1_KEYS)
    manifest.data["resolved_config"] = p
    manifest.outdir.mkdir(parents=True, exist_ok=True)
    threads = args.threads or 1
    if p["mode"] == "union":
        fam = lambda n: make_family(p["family"], n, p["variances"], p["scales"])
        rows = union_bound_gap(fam, p["n_grid"], p["eps"], p["trials"], p["seed"],
                               N_fixed=p["N_fixed"], threads=threads)
        out = manifest.outdir / "union_gap.csv"
        write_union_gap_csv(out, rows)
        manifest.data["output_paths"].append(str(out))
        if args.json:
            jout = manifest.outdir / "union_gap.json"
            with open(jout, "w") as fh:
                json.dump(rows, fh, indent=2)
                fh.write("\n")
            manifest.data["output_paths"].append(str(jout))
        return EXIT_OK
    if p["mode"] != "decay":
        raise ConfigError("mode must be decay or union")
    if p["claim"] not in (CLAIM_QUAD, CLAIM_SPEC):
        raise ConfigError(f"claim must be {CLAIM_QUAD} or {CLAIM_SPEC}")
    family = make_family(p["family"], p["dim"], p["variances"], p["scales"])
    cfg = ExperimentConfig(family=family, N_grid=p["N_grid"], eps=p["eps"],
                           trials=p["trials"], master_seed=p["seed"], claim=p["claim"])
    ests = mc_failure(cfg, threads=threads)
    fit = None
    if p["fit"]:
        try:
            fit = fit_decay(ests, p["eps"])
        except InsufficientData:
            fit = None
    rows = estimate_rows(cfg, ests, fit)
    out = manifest.outdir / "theorem1.csv"
    write_estimates_csv(out, rows)
    manifest.data["output_paths"].append(str(out))
    if args.json:
        jout = manifest.outdir / "theorem1.json"
        write_estimates_json(jout, rows)
        manifest.data["output_paths"].append(str(jout))
    return EXIT_OK


_EXAMPLE_KEYS = {
    "op": (str, _REQUIRED),  # bk | btilde | sweep | bilinear
    "dim": (int, 16),
    "q": (int, 1),
    "m": (int, 100),
    "m_grid": (_parse_int_list, (8, 16, 32, 64, 128, 256, 512, 1024)),
    "scales": (_parse_float_list, None),
    "regime": (str, "per_vector_quad"),
    "eps_target": (float, 0.5),
    "delta": (float, 0.05),
    "trials": (int, 500),
    "N": (int, 400),
    "eps": (float, 0.5),
    "seed": (int, 0),
    "x_norm": (float, 1.0),
}


def cmd_example(args, config, manifest) -> int:
    p = _merge(config, args, _EXAMPLE_KEYS)
    manifest.data["resolved_config"] = p
    manifest.outdir.mkdir(parents=True, exist_ok=True)
    op = p["op"]
    scales = np.asarray(p["scales"], dtype=float) if p["scales"] else np.ones(p["q"])
    if op == "bk":
        rng = np.random.default_rng(p["seed"])
        x = rng.standard_normal(p["dim"])
        x *= p["x_norm"] / np.linalg.norm(x)
        val = compute_bk(x, p["m"], p["seed"])
        out = manifest.outdir / "bk.json"
        with open(out, "w") as fh:
            json.dump({"b_k": val, "m": p["m"], "dim": p["dim"], "x_norm": p["x_norm"],
                       "seed": p["seed"]}, fh, indent=2)
            fh.write("\n")
        manifest.data["output_paths"].append(str(out))
        return EXIT_OK
    if op == "btilde":
        spec = PooledSpec(n=p["dim"], q=p["q"], m=p["m"], scales=scales, seed=p["seed"])
        val = compute_btilde(spec)
        out = manifest.outdir / "btilde.json"
        with open(out, "w") as fh:
            json.dump({"btilde": val, "n": p["dim"], "q": p["q"], "m": p["m"],
                       "scales": scales.tolist(), "seed": p["seed"]}, fh, indent=2)
            fh.write("\n")
        manifest.data["output_paths"].append(str(out))
        return EXIT_OK
    if op == "sweep":
        if p["regime"] not in REGIMES:
            raise ConfigError(f"regime must be one of {REGIMES}")
        res = sweep_min_m(p["regime"], p["dim"], p["q"], p["eps_target"], p["delta"],
                          p["m_grid"], p["trials"], p["seed"], scales=scales)
        out = manifest.outdir / "sweep.csv"
        write_sweep_csv(out, res)
        manifest.data["output_paths"].append(str(out))
        return EXIT_OK
    if op == "bilinear":
        family = make_family("standard_gaussian", p["dim"])
        rng = np.random.default_rng(p["seed"])
        z1 = rng.standard_normal(p["dim"])
        z2 = rng.standard_normal(p["dim"])
        z1 /= np.linalg.norm(z1)
        z2 /= np.linalg.norm(z2)
        res = bilinear_bound_check(family, z1, z2, p["N"], p["eps"], p["trials"], p["seed"])
        out = manifest.outdir / "bilinear.json"
        with open(out, "w") as fh:
            json.dump(res, fh, indent=2)
            fh.write("\n")
        manifest.data["output_paths"].append(str(out))
        return EXIT_OK
    raise ConfigError(f"unknown op {op!r}")


_COMMANDS = {
    "sample": (cmd_sample, _SAMPLE_KEYS),
    "norm": (cmd_norm, _NORM_KEYS),
    "net": (cmd_net, _NET_KEYS),
    "theorem1": (cmd_theorem1, _THEOREM1_KEYS),
    "example": (cmd_example, _EXAMPLE_KEYS),
}

_FLAG_TYPES = {int: int, float: float, str: str}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gramdev",
                                     description="concentration experiments for sums of "
                                                 "sub-Gaussian outer products")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, keys) in _COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default="out")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--json", action="store_true")
        for key, (typ, _) in keys.items():
            flag = "--" + key.replace("_", "-")
            if typ is _parse_bool:
                sp.add_argument(flag, dest=key, type=_parse_bool, default=None)
            elif typ in (_parse_int_list, _parse_float_list):
                sp.add_argument(flag, dest=key, type=typ, default=None)
            else:
                sp.add_argument(flag, dest=key, type=_FLAG_TYPES.get(typ, str), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outdir = Path(args.out)
    manifest = Manifest(args.command, args.config, outdir)
    handler = _COMMANDS[args.command][0]
    try:
        config = load_config(args.config)
        code = handler(args, config, manifest)
    except (ConfigError, ValueError) as exc:
        manifest.data["error"] = str(exc)
        manifest.write()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        manifest.data["error"] = str(exc)
        manifest.write()
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest.write()
    return code


if __name__ == "__main__":
    sys.exit(main())
