"""Command-line interface.

Subcommands: gen-graph, gen-data, recover, sweep, bounds, diagnose,
ingest-check. All flags are long-form; a JSON config file can provide any
flag's value (explicit flags win). ``--seed`` is mandatory for stochastic
commands. Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 size-guard refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec, sample
from .errors import ConfigError, GmrecError, NumericalError, SizeGuardError
from .graphs import (
    Field,
    build_graph_matrix,
    read_graph_csv,
    read_matrix_csv,
    write_graph_csv,
    write_matrix_csv,
)
from .harness import Grid, ScanUp, TrialSpec, emit_recovery, emit_sweep, ingest, sample_complexity_sweep
from .measurement import sample_generator, save_measurements, synthesize
from .recovery import SCHEMES, RecoveryConfig, RecoveryStatus, recover
from .rng import stream
from .solver import SolverOptions, operator_norm, ric, spark, xi


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults <- config file <- explicit flags."""
    explicit = {k: v for k, v in vars(args).items() if k not in ("config", "command")}
    cfg = dict(defaults)
    cfg.update(_load_config(getattr(args, "config", None)))
    cfg.update(explicit)
    return cfg


def _require_seed(cfg: dict) -> int:
    if cfg.get("seed") is None:
        raise ConfigError("--seed is mandatory for stochastic commands")
    return int(cfg["seed"])


def _ensemble_from(cfg: dict) -> EnsembleSpec:
    if cfg.get("graph"):
        graph, _ = read_graph_csv(cfg["graph"], n=cfg.get("n"))
        return EnsembleSpec(kind="fixed", n=graph.n, graph=graph)
    if not cfg.get("ensemble"):
        raise ConfigError("either --ensemble or --graph is required")
    if cfg.get("n") is None:
        raise ConfigError("--n is required with --ensemble")
    return EnsembleSpec(kind=cfg["ensemble"], n=int(cfg["n"]), p=cfg.get("p"))


def _field_from(cfg: dict) -> Field:
    try:
        return Field(cfg.get("field", "complex"))
    except ValueError as exc:
        raise ConfigError(f"unknown field {cfg.get('field')!r}") from exc


def _ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


# ---------------------------------------------------------------------------


def _cmd_gen_graph(args) -> int:
    cfg = _merge(args, {"p": None, "n": None, "graph": None, "ensemble": None, "out": None, "seed": None})
    seed = _require_seed(cfg)
    spec = _ensemble_from(cfg)
    g = sample(spec, stream(seed, 0))
    out = cfg.get("out") or "graph.csv"
    weights = None
    if cfg.get("weights") == "sampled":
        field_tag = _field_from(cfg)
        Y = build_graph_matrix(g, stream(seed, 1), field_tag=field_tag)
        weights = {e: Y.values[e] for e in g.sorted_edges()}
    write_graph_csv(g, out, weights)
    print(f"wrote {out}: n={g.n}, edges={g.num_edges}")
    return 0


def _cmd_gen_data(args) -> int:
    cfg = _merge(args, {
        "p": None, "n": None, "graph": None, "ensemble": None, "m": None,
        "field": "complex", "sigma_s": 1.0, "sigma_n": 0.0, "b_mean_re": None,
        "out_dir": "data", "prefix": "", "emit_truth": False, "seed": None,
    })
    seed = _require_seed(cfg)
    if cfg.get("m") is None:
        raise ConfigError("--m is required")
    spec = _ensemble_from(cfg)
    field_tag = _field_from(cfg)
    m = int(cfg["m"])
    g = sample(spec, stream(seed, 0))
    Y = build_graph_matrix(g, stream(seed, 1), field_tag=field_tag)
    mean_re = cfg.get("b_mean_re")
    if mean_re is None:
        mean_re = 1.0 if field_tag is Field.COMPLEX else 0.0
    B = sample_generator(m, g.n, field_tag, float(cfg["sigma_s"]), stream(seed, 2), mean_re=float(mean_re))
    ms = synthesize(B, Y, float(cfg["sigma_n"]), stream(seed, 3), sigma_S=float(cfg["sigma_s"]))
    manifest = save_measurements(ms, cfg["out_dir"], prefix=cfg.get("prefix", ""), seed=seed)
    if cfg.get("emit_truth"):
        write_matrix_csv(Y.values, Path(cfg["out_dir"]) / f"{cfg.get('prefix', '')}Y.csv")
    print(f"wrote {manifest}")
    return 0


def _cmd_recover(args) -> int:
    cfg = _merge(args, {
        "manifest": None, "scheme": "three-stage", "gamma": None, "k": 0, "s": None,
        "cones": None, "out_prefix": "out/", "seed": None, "max_iters": 20000,
    })
    seed = _require_seed(cfg)
    if not cfg.get("manifest"):
        raise ConfigError("--manifest is required")
    ms = ingest(cfg["manifest"])
    gamma = cfg.get("gamma")
    if gamma is None:
        gamma = 0.0 if ms.sigma_N == 0 else bounds_mod.default_noise_radius(ms.n, ms.sigma_N)
    rec_cfg = RecoveryConfig(
        scheme=cfg["scheme"],
        gamma=float(gamma),
        K=int(cfg.get("k", 0)),
        s=None if cfg.get("s") is None else int(cfg["s"]),
        solver=SolverOptions(max_iters=int(cfg.get("max_iters", 20000))),
        seed=seed,
        cone_pattern=cfg.get("cones"),
    )
    result = recover(ms, rec_cfg)
    x_path, status_path = emit_recovery(result, cfg.get("out_prefix", "out/"))
    print(f"status={result.status.value} wrote {x_path} {status_path}")
    return 0 if result.status is RecoveryStatus.SUCCESS else 3


def _cmd_sweep(args) -> int:
    cfg = _merge(args, {
        "p": None, "graph": None, "ensemble": None, "n_list": None, "scheme": "heuristic",
        "field": "complex", "sigma_s": 1.0, "sigma_n": 0.0, "gamma": None, "k": 0, "s": None,
        "trials": 20, "q": 0.9, "m_start": 1, "m_max": None, "grid": None,
        "out": "sweep.csv", "seed": None, "jobs": 1, "timing": False, "cones": None,
    })
    seed = _require_seed(cfg)
    if cfg.get("n_list") is None:
        raise ConfigError("--n-list is required")
    n_list = _ints(cfg["n_list"])
    base_ens = dict(cfg)
    base_ens["n"] = n_list[0]
    spec = TrialSpec(
        ensemble=_ensemble_from(base_ens),
        m=max(1, int(cfg.get("m_start", 1))),
        field_tag=_field_from(cfg),
        sigma_S=float(cfg["sigma_s"]),
        sigma_N=float(cfg["sigma_n"]),
        recovery=RecoveryConfig(
            scheme=cfg["scheme"], K=int(cfg.get("k", 0)),
            s=None if cfg.get("s") is None else int(cfg["s"]),
            cone_pattern=cfg.get("cones"),
        ),
        trials=int(cfg["trials"]),
        seed=seed,
        gamma=None if cfg.get("gamma") is None else float(cfg["gamma"]),
        jobs=int(cfg.get("jobs", 1)),
    )
    if cfg.get("grid"):
        strategy = Grid(m_values=tuple(_ints(cfg["grid"])))
    else:
        strategy = ScanUp(q=float(cfg["q"]), m_start=int(cfg["m_start"]),
                          m_max=None if cfg.get("m_max") is None else int(cfg["m_max"]))
    result = sample_complexity_sweep(spec, n_list, strategy)
    emit_sweep(result, cfg["out"], timing=bool(cfg.get("timing", False)))
    print(f"wrote {cfg['out']}")
    if result.minimal_m:
        for n, m in sorted(result.minimal_m.items()):
            print(f"n={n}: minimal m = {m if m is not None else 'saturated'}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = _merge(args, {
        "n": None, "m": 1, "sigma_s": 1.0, "sigma_n": 0.0, "ybar": 1.0,
        "entropy_model": None, "entropy": None, "p": None, "mu": None, "k": None,
        "epsilon_target": None,
    })
    if cfg.get("n") is None:
        raise ConfigError("--n is required")
    n = int(cfg["n"])
    model = cfg.get("entropy_model")
    if cfg.get("entropy") is not None:
        entropy = float(cfg["entropy"])
    elif model == "tree":
        entropy = bounds_mod.entropy_uniform_trees(n)
    elif model == "er":
        if cfg.get("p") is None:
            raise ConfigError("--p is required with --entropy-model er")
        entropy = bounds_mod.entropy_er(n, float(cfg["p"]))
    else:
        raise ConfigError("provide --entropy or --entropy-model {tree,er}")
    inputs = bounds_mod.BoundInputs(
        n=n, m=int(cfg["m"]), sigma_S=float(cfg["sigma_s"]), sigma_N=float(cfg["sigma_n"]),
        Y_bar=float(cfg["ybar"]), entropy_nats=entropy,
    )
    out: dict = {
        "n": n, "m": inputs.m, "entropy_nats": entropy,
        "fano_floor_noiseless": bounds_mod.fano_floor_noiseless(inputs),
    }
    if inputs.sigma_N > 0:
        out["fano_floor_noisy"] = bounds_mod.fano_floor_noisy(inputs)
    if cfg.get("epsilon_target") is not None:
        out["min_measurements"] = bounds_mod.min_measurements(inputs, float(cfg["epsilon_target"]))
    if cfg.get("mu") is not None and cfg.get("k") is not None:
        suff = bounds_mod.sufficient_m_noiseless(int(cfg["mu"]), int(cfg["k"]), n)
        out["sufficient_m_noiseless"] = suff.m
        out["sufficient_m_valid_regime"] = suff.valid
        out["tree_profile_rho"] = bounds_mod.tree_sparsity_profile(
            max(1, int(cfg["mu"])), max(1, int(cfg["k"]))
        ).rho
    if cfg.get("p") is not None and cfg.get("k") is not None:
        prof = bounds_mod.er_sparsity_profile(n, float(cfg["p"]), int(cfg["k"]))
        out["er_profile"] = {"mu_min": prof.mu, "K": prof.K, "rho": prof.rho}
    print(json.dumps(out, indent=2))
    return 0


def _cmd_diagnose(args) -> int:
    cfg = _merge(args, {
        "manifest": None, "b_file": None, "field": "complex",
        "spark": False, "ric_mu": None, "xi_k": None,
    })
    if cfg.get("manifest"):
        B = ingest(cfg["manifest"]).B
    elif cfg.get("b_file"):
        B = read_matrix_csv(cfg["b_file"], _field_from(cfg))
    else:
        raise ConfigError("provide --manifest or --b-file")
    out: dict = {"m": B.shape[0], "n": B.shape[1], "operator_norm": operator_norm(B)}
    if cfg.get("spark"):
        out["spark"] = spark(B)
    if cfg.get("ric_mu") is not None:
        out["ric"] = {"mu": int(cfg["ric_mu"]), "delta": ric(B, int(cfg["ric_mu"]))}
    if cfg.get("xi_k") is not None:
        val = xi(B, int(cfg["xi_k"]))
        out["xi"] = {"K": int(cfg["xi_k"]), "value": "inf" if np.isinf(val) else val}
    print(json.dumps(out, indent=2))
    return 0


def _cmd_ingest_check(args) -> int:
    cfg = _merge(args, {"manifest": None})
    if not cfg.get("manifest"):
        raise ConfigError("--manifest is required")
    ms = ingest(cfg["manifest"])
    print(json.dumps({
        "m": ms.m, "n": ms.n, "field": ms.field_tag.value,
        "sigma_S": ms.sigma_S, "sigma_N": ms.sigma_N,
        "b_fro": float(np.linalg.norm(ms.B)), "a_fro": float(np.linalg.norm(ms.A)),
    }, indent=2))
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def add(p, *names, **kw):
        kw.setdefault("default", S)
        p.add_argument(*names, **kw)

    p = sub.add_parser("gen-graph", help="sample a graph and write its CSV")
    add(p, "--ensemble", choices=ENSEMBLE_KINDS)
    add(p, "--n", type=int)
    add(p, "--p", type=float)
    add(p, "--graph", help="existing graph CSV (fixed ensemble)")
    add(p, "--weights", choices=["unit", "sampled"])
    add(p, "--field", choices=["real", "complex"])
    add(p, "--seed", type=int)
    add(p, "--out")
    add(p, "--config")
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("gen-data", help="synthesize Y, B, A and a manifest")
    add(p, "--ensemble", choices=ENSEMBLE_KINDS)
    add(p, "--n", type=int)
    add(p, "--p", type=float)
    add(p, "--graph")
    add(p, "--m", type=int)
    add(p, "--field", choices=["real", "complex"])
    add(p, "--sigma-s", dest="sigma_s", type=float)
    add(p, "--sigma-n", dest="sigma_n", type=float)
    add(p, "--b-mean-re", dest="b_mean_re", type=float)
    add(p, "--out-dir", dest="out_dir")
    add(p, "--prefix")
    add(p, "--emit-truth", dest="emit_truth", action="store_true")
    add(p, "--seed", type=int)
    add(p, "--config")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("recover", help="run a recovery scheme on ingested data")
    add(p, "--manifest")
    add(p, "--scheme", choices=SCHEMES)
    add(p, "--gamma", type=float)
    add(p, "--k", type=int)
    add(p, "--s", type=int)
    add(p, "--cones", choices=["admittance"])
    add(p, "--max-iters", dest="max_iters", type=int)
    add(p, "--out-prefix", dest="out_prefix")
    add(p, "--seed", type=int)
    add(p, "--config")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("sweep", help="Monte-Carlo sample-complexity sweep")
    add(p, "--ensemble", choices=ENSEMBLE_KINDS)
    add(p, "--graph")
    add(p, "--p", type=float)
    add(p, "--n-list", dest="n_list")
    add(p, "--scheme", choices=SCHEMES)
    add(p, "--field", choices=["real", "complex"])
    add(p, "--sigma-s", dest="sigma_s", type=float)
    add(p, "--sigma-n", dest="sigma_n", type=float)
    add(p, "--gamma", type=float)
    add(p, "--k", type=int)
    add(p, "--s", type=int)
    add(p, "--cones", choices=["admittance"])
    add(p, "--trials", type=int)
    add(p, "--q", type=float)
    add(p, "--m-start", dest="m_start", type=int)
    add(p, "--m-max", dest="m_max", type=int)
    add(p, "--grid", help="comma-separated m values (grid strategy)")
    add(p, "--jobs", type=int)
    add(p, "--timing", action="store_true", help="write wall-clock runtimes (breaks byte determinism)")
    add(p, "--out")
    add(p, "--seed", type=int)
    add(p, "--config")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bounds", help="print bound values as JSON")
    add(p, "--n", type=int)
    add(p, "--m", type=int)
    add(p, "--sigma-s", dest="sigma_s", type=float)
    add(p, "--sigma-n", dest="sigma_n", type=float)
    add(p, "--ybar", type=float)
    add(p, "--entropy", type=float, help="entropy in nats (overrides --entropy-model)")
    add(p, "--entropy-model", dest="entropy_model", choices=["tree", "er"])
    add(p, "--p", type=float)
    add(p, "--mu", type=int)
    add(p, "--k", type=int)
    add(p, "--epsilon-target", dest="epsilon_target", type=float)
    add(p, "--config")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("diagnose", help="brute-force diagnostics of a generator matrix")
    add(p, "--manifest")
    add(p, "--b-file", dest="b_file")
    add(p, "--field", choices=["real", "complex"])
    add(p, "--spark", action="store_true")
    add(p, "--ric-mu", dest="ric_mu", type=int)
    add(p, "--xi-k", dest="xi_k", type=int)
    add(p, "--config")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("ingest-check", help="validate a measurement manifest")
    add(p, "--manifest")
    add(p, "--config")
    p.set_defaults(func=_cmd_ingest_check)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, GmrecError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
