"""Command-line front end.

Subcommands: generate-csbm, train, attack, evaluate, spectrum, homophily,
experiment, verify. Configuration comes from a TOML file (key/value with
nested tables) plus ``--set section.key=value`` overrides; every output
file is byte-reproducible for a fixed seed (volatile timing goes to
stderr only). ``verify`` exits nonzero iff a property check fails.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import io
from .attacks import AttackSpec, dice_evasion, random_attack
from .graph import edge_homophily, normalized_laplacian_dense, unnormalized_laplacian_dense
from .harness import (
    ExperimentConfig,
    dataset_summary,
    load_dataset,
    run_attack_curves,
    run_generalization,
    save_results,
)
from .homophily import format_gap_report, homophily_gap_report, write_gap_report_csv
from .model import ModelParams, TrainConfig, evaluate, train
from .properties import run_property_suite
from .spectral import eigendecompose, feature_spectrum, label_spectrum
from .synth import CsbmParams, generate_csbm


def _parse_scalar(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    return raw


def _apply_overrides(config: dict, sets) -> dict:
    for item in sets or ():
        path, sep, raw = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects key.path=value, got {item!r}")
        node = config
        keys = path.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = _parse_scalar(raw)
    return config


def _load_config(path, sets) -> dict:
    config = {}
    if path:
        with open(path, "rb") as fh:
            config = tomllib.load(fh)
    return _apply_overrides(config, sets)


def _train_config(d: dict) -> TrainConfig:
    return TrainConfig(**d.get("train", {}))


def _csbm_params(d: dict) -> CsbmParams:
    c = dict(d["csbm"])
    c["n"] = int(c["n"])
    c["f"] = int(c["f"])
    return CsbmParams(**c)


def _cmd_generate_csbm(args) -> int:
    params = CsbmParams(n=args.n, f=args.f, d=args.d, phi=args.phi,
                        epsilon=args.epsilon, m_const=args.m_const,
                        direction_seed=args.direction_seed)
    g, x, labels = generate_csbm(params, args.seed)
    manifest = {"generator": "csbm", "seed": args.seed, "params": params.to_dict()}
    io.save_dataset(args.out, g, x, labels, manifest)
    summary = dataset_summary(g, x, labels)
    io.write_json(Path(args.out) / "summary.json", summary)
    print(f"wrote {args.out}: {summary['nodes']} nodes, {summary['edges']} edges, "
          f"homophily {summary['edge_homophily']:.4f}")
    return 0


def _cmd_train(args) -> int:
    config = _load_config(args.config, args.set)
    cfg = _train_config(config)
    if args.seed is not None:
        cfg.seed = args.seed
    g_tr, x_tr, y_tr = load_dataset(args.train_dir)
    g_va, x_va, y_va = load_dataset(args.val_dir)
    if x_tr is None or x_va is None:
        raise SystemExit("training requires feature files in both dataset directories")
    params, report = train(cfg, g_tr, x_tr, y_tr, g_va, x_va, y_va, variant=args.variant)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "model.json", params.to_json_dict())
    io.write_json(out / "report.json", report.to_json_dict())
    (out / "report.csv").write_text(report.to_csv_text(), encoding="utf-8")
    print(f"best validation accuracy {report.best_val_accuracy:.4f} "
          f"at epoch {report.best_epoch} ({report.epochs_run} epochs run)")
    print(f"wall clock: {report.wall_clock_sec:.2f}s", file=sys.stderr)
    return 0


def _cmd_evaluate(args) -> int:
    params = ModelParams.from_json_dict(io.read_json(args.model))
    g, x, labels = load_dataset(args.data)
    acc = evaluate(params, g, x, labels)
    print(f"accuracy {acc:.6f}")
    if args.out:
        io.write_json(args.out, {"accuracy": acc, "nodes": g.num_nodes,
                                 "variant": params.variant})
    return 0


def _cmd_attack(args) -> int:
    g, x, labels = load_dataset(args.data)
    protected = frozenset()
    if args.protected:
        protected = frozenset(int(v) for v in args.protected.split(","))
    spec = AttackSpec(kind=args.kind, perturb_ratio=args.ratio,
                      protected=protected, seed=args.seed)
    before = edge_homophily(g, labels)
    if args.kind == "dice":
        attacked, ledger = dice_evasion(g, labels, spec)
    else:
        attacked, ledger = random_attack(g, spec)
    after = edge_homophily(attacked, labels) if attacked.num_edges else None
    out = Path(args.out)
    io.save_dataset(out, attacked, x, labels)
    ledger.to_csv(out / "ledger.csv")
    io.write_json(out / "summary.json", {
        "kind": args.kind, "ratio": args.ratio, "seed": args.seed,
        "operations": len(ledger.ops), "removals": ledger.removals,
        "additions": ledger.additions, "budget_exhausted": ledger.exhausted,
        "homophily_before": before, "homophily_after": after,
    })
    print(f"{len(ledger.ops)} operations; homophily {before:.4f} -> "
          f"{after if after is None else format(after, '.4f')}")
    if ledger.exhausted:
        print("warning: move types exhausted before the budget was spent", file=sys.stderr)
    return 0


def _cmd_spectrum(args) -> int:
    g, x, labels = load_dataset(args.data)
    lap = unnormalized_laplacian_dense(g) if args.unnormalized \
        else normalized_laplacian_dense(g)
    dec = eigendecompose(lap)
    alpha = label_spectrum(dec, labels.label_difference()) if labels.num_classes == 2 else None
    beta = None
    if x is not None:
        beta = feature_spectrum(dec, x[:, args.feature_col])
    io.write_spectrum_csv(args.out, dec.eigenvalues, alpha, beta)
    print(f"wrote {args.out} ({dec.size} eigenpairs)")
    return 0


def _cmd_homophily(args) -> int:
    g, _, labels = load_dataset(args.data)
    hops = tuple(int(h) for h in args.hops.split(","))
    if args.data2:
        g2, _, labels2 = load_dataset(args.data2)
        rows = homophily_gap_report(g, g2, labels, labels2, hops)
    else:
        rows = homophily_gap_report(g, g, labels, labels, hops)
    print(format_gap_report(rows))
    if args.out:
        write_gap_report_csv(args.out, rows)
    return 0


def _cmd_experiment(args) -> int:
    config = _load_config(args.config, args.set)
    kind = config.get("kind", "generalization")
    exp = ExperimentConfig(
        kind=kind,
        csbm=_csbm_params(config),
        variants=tuple(config.get("variants", ("evennet", "fullorder", "mlp"))),
        train=_train_config(config),
        trials=int(config.get("trials", 10)),
        base_seed=int(config.get("base_seed", 0)),
        attack_kind=config.get("attack_kind", "dice"),
        ratios=tuple(config.get("ratios", (0.0, 0.4, 0.8, 1.2, 1.6))),
    )
    started = time.perf_counter()
    table = run_generalization(exp) if kind == "generalization" else run_attack_curves(exp)
    save_results(args.out, table, config_dict=config)
    print(table.to_csv_text(), end="")
    print(f"elapsed: {time.perf_counter() - started:.1f}s", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    report = run_property_suite()
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        tol = "" if check["tolerance"] is None else f" (tol {check['tolerance']:g})"
        measured = "" if check["measured"] is None else f" measured {check['measured']:.3e}"
        print(f"[{status}] {check['name']}{measured}{tol}")
    if args.out:
        io.write_json(args.out, report)
    print("all properties hold" if report["passed"] else "PROPERTY FAILURES DETECTED")
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evennet",
                                     description="Spectral graph-learning laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-csbm", help="draw a contextual-SBM dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=4.23)
    p.add_argument("--m-const", type=float, default=3.0 * np.sqrt(3.0) / 2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--direction-seed", type=int,
                   help="pin the class-mean feature direction so separately "
                        "generated graphs stay mutually predictive")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate_csbm)

    p = sub.add_parser("train", help="train a variant on train/validation datasets")
    p.add_argument("--train-dir", required=True)
    p.add_argument("--val-dir", required=True)
    p.add_argument("--variant", default="evennet",
                   choices=("evennet", "fullorder", "mlp", "fixed_lowpass", "evenreg"))
    p.add_argument("--config", help="TOML config with a [train] table")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="accuracy of a saved model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("attack", help="perturb a dataset's graph structure")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=("dice", "random"), default="dice")
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--protected", help="comma-separated node ids left untouched")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("spectrum", help="dump (index, eigenvalue, alpha, beta) CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--unnormalized", action="store_true")
    p.add_argument("--feature-col", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("homophily", help="per-hop homophily (and train/test gaps)")
    p.add_argument("--data", required=True)
    p.add_argument("--data2", help="second dataset for a gap report")
    p.add_argument("--hops", default="1,2")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_homophily)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--out", help="write the machine-readable report here")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
