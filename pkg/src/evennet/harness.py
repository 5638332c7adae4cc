"""Experiment orchestration: generalization tables and attack curves.

Each trial owns RNG streams derived from (base seed, trial index, role),
and the matched/mismatched arms of the generalization protocol consume
identical generator seeds so their accuracy gaps are paired rather than
confounded. Identical config + seed therefore produces byte-identical
result tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io
from .attacks import DICE, AttackSpec, dice_evasion, random_attack
from .graph import Graph, LabelAssignment, edge_homophily
from .model import TrainConfig, evaluate, train
from .synth import CsbmParams, generate_csbm

_ROLES = {"train_graph": 0, "val_graph": 1, "test_graph": 2, "model": 3, "attack": 4,
          "direction": 5, "split": 6}


def derive_seed(base_seed: int, trial: int, role: str, extra: int = 0) -> int:
    """Deterministic 64-bit stream seed for (base, trial, role, extra)."""
    ss = np.random.SeedSequence([base_seed, trial, _ROLES[role], extra])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    kind: str  # "generalization" | "attack"
    csbm: CsbmParams
    variants: tuple = ("evennet", "fullorder", "mlp")
    train: TrainConfig = field(default_factory=TrainConfig)
    trials: int = 10
    base_seed: int = 0
    attack_kind: str = DICE
    ratios: tuple = (0.0, 0.4, 0.8, 1.2, 1.6)

    def __post_init__(self):
        if self.kind not in ("generalization", "attack"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")
        if not self.variants:
            raise ValueError("at least one model variant is required")


@dataclass
class ResultRow:
    variant: str
    phi_train: float
    phi_test: float | None = None
    ratio: float | None = None
    mean_accuracy: float = 0.0
    std_accuracy: float = 0.0
    trials: int = 0
    gap: float | None = None
    train_homophily: float | None = None
    test_homophily: float | None = None
    homophily_gap: float | None = None


_COLUMNS = ("variant", "phi_train", "phi_test", "ratio", "mean_accuracy",
            "std_accuracy", "trials", "gap", "train_homophily",
            "test_homophily", "homophily_gap")


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    # per-trial accuracy lists keyed by (variant, arm-or-ratio); not part of
    # the CSV surface, carried for paired per-trial analyses
    per_trial: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return format(v, ".17g")
            return str(v)

        lines = [",".join(_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(fmt(getattr(row, c)) for c in _COLUMNS))
        return "\n".join(lines) + "\n"

    def select(self, **criteria) -> list:
        out = []
        for row in self.rows:
            if all(getattr(row, k) == v for k, v in criteria.items()):
                out.append(row)
        return out


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), std


def _train_eval(cfg: TrainConfig, variant: str, train_data, val_data, test_data) -> float:
    g_tr, x_tr, y_tr = train_data
    g_va, x_va, y_va = val_data
    g_te, x_te, y_te = test_data
    params, _ = train(cfg, g_tr, x_tr, y_tr, g_va, x_va, y_va, variant=variant)
    return evaluate(params, g_te, x_te, y_te)


def run_generalization(config: ExperimentConfig) -> ResultTable:
    """Paired matched/mismatched accuracy per variant on cSBM triples.

    Per trial, the training graph is drawn at phi_train while validation
    and test graphs share phi_test, which equals +phi_train in the matched
    arm and -phi_train in the mismatched arm. Both arms reuse the same
    generator and model seeds.
    """
    if config.kind != "generalization":
        raise ValueError("config.kind must be 'generalization'")
    phi = config.csbm.phi
    accs: dict = {(v, arm): [] for v in config.variants for arm in ("matched", "mismatched")}
    for trial in range(config.trials):
        # All graphs of a trial (both arms) share the feature direction.
        p_train = replace(config.csbm,
                          direction_seed=derive_seed(config.base_seed, trial, "direction"))
        train_data = generate_csbm(p_train, derive_seed(config.base_seed, trial, "train_graph"))
        model_seed = derive_seed(config.base_seed, trial, "model")
        for arm, phi_test in (("matched", phi), ("mismatched", -phi)):
            p_test = replace(p_train, phi=phi_test)
            val_data = generate_csbm(p_test, derive_seed(config.base_seed, trial, "val_graph"))
            test_data = generate_csbm(p_test, derive_seed(config.base_seed, trial, "test_graph"))
            for variant in config.variants:
                cfg = replace(config.train, seed=model_seed)
                accs[(variant, arm)].append(
                    _train_eval(cfg, variant, train_data, val_data, test_data))
    table = ResultTable()
    table.per_trial = {k: list(v) for k, v in accs.items()}
    for variant in config.variants:
        matched = np.array(accs[(variant, "matched")])
        mismatched = np.array(accs[(variant, "mismatched")])
        gap = float(np.mean(np.abs(matched - mismatched)))
        for arm, phi_test, values in (("matched", phi, matched),
                                      ("mismatched", -phi, mismatched)):
            mean, std = _mean_std(values)
            table.rows.append(ResultRow(
                variant=variant, phi_train=phi, phi_test=phi_test,
                mean_accuracy=mean, std_accuracy=std,
                trials=config.trials, gap=gap))
    return table


def transductive_split(num_nodes: int, seed: int,
                       train_frac: float = 0.1, val_frac: float = 0.1):
    """Disjoint boolean masks (train, val, test) over a shuffled node order."""
    order = np.random.default_rng(seed).permutation(num_nodes)
    n_tr = int(round(train_frac * num_nodes))
    n_va = int(round(val_frac * num_nodes))
    masks = []
    for sel in (order[:n_tr], order[n_tr:n_tr + n_va], order[n_tr + n_va:]):
        m = np.zeros(num_nodes, dtype=bool)
        m[sel] = True
        masks.append(m)
    return tuple(masks)


def run_attack_curves(config: ExperimentConfig) -> ResultTable:
    """Clean-train / attacked-evaluation accuracy and homophily per ratio.

    Evasion protocol on one graph per trial with a 10/10/80 node split:
    models train on the clean graph (loss on train nodes, early stopping
    on validation nodes), the attack perturbs the graph while the labeled
    (train + validation) induced subgraph is protected, and accuracy is
    read off the test nodes of the attacked graph. Ratio 0 rows reproduce
    the clean evaluation exactly.
    """
    if config.kind != "attack":
        raise ValueError("config.kind must be 'attack'")
    phi = config.csbm.phi
    accs: dict = {(v, r): [] for v in config.variants for r in config.ratios}
    homs: dict = {r: [] for r in config.ratios}
    for trial in range(config.trials):
        p_trial = replace(config.csbm,
                          direction_seed=derive_seed(config.base_seed, trial, "direction"))
        g, x, labels = generate_csbm(p_trial, derive_seed(config.base_seed, trial, "train_graph"))
        m_tr, m_va, m_te = transductive_split(
            g.num_nodes, derive_seed(config.base_seed, trial, "split"))
        protected = frozenset(np.flatnonzero(m_tr | m_va).tolist())
        h_clean = edge_homophily(g, labels)
        model_seed = derive_seed(config.base_seed, trial, "model")
        trained = {}
        for variant in config.variants:
            cfg = replace(config.train, seed=model_seed)
            params, _ = train(cfg, g, x, labels, g, x, labels, variant=variant,
                              train_mask=m_tr, val_mask=m_va)
            trained[variant] = params
        for ridx, ratio in enumerate(config.ratios):
            spec = AttackSpec(kind=config.attack_kind, perturb_ratio=ratio,
                              protected=protected,
                              seed=derive_seed(config.base_seed, trial, "attack", ridx))
            if ratio == 0.0:
                attacked = g
            elif config.attack_kind == DICE:
                attacked, _ = dice_evasion(g, labels, spec)
            else:
                attacked, _ = random_attack(g, spec)
            h_test = edge_homophily(attacked, labels)
            homs[ratio].append((h_clean, h_test, abs(h_clean - h_test)))
            for variant in config.variants:
                accs[(variant, ratio)].append(
                    evaluate(trained[variant], attacked, x, labels, mask=m_te))
    table = ResultTable()
    table.per_trial = {k: list(v) for k, v in accs.items()}
    for variant in config.variants:
        clean_mean = float(np.mean(accs[(variant, 0.0)])) \
            if 0.0 in config.ratios else None
        for ratio in config.ratios:
            mean, std = _mean_std(accs[(variant, ratio)])
            h = np.array(homs[ratio])
            gap = None if clean_mean is None else abs(clean_mean - mean)
            table.rows.append(ResultRow(
                variant=variant, phi_train=phi, ratio=ratio,
                mean_accuracy=mean, std_accuracy=std, trials=config.trials,
                gap=gap,
                train_homophily=float(h[:, 0].mean()),
                test_homophily=float(h[:, 1].mean()),
                homophily_gap=float(h[:, 2].mean())))
    return table


def load_dataset(data_dir) -> tuple[Graph, np.ndarray | None, LabelAssignment]:
    """Ingest a dataset directory (edges.tsv, labels.csv, features.*)."""
    return io.load_dataset_dir(data_dir)


def dataset_summary(g: Graph, features, labels: LabelAssignment) -> dict:
    return {
        "nodes": g.num_nodes,
        "edges": g.num_edges,
        "classes": labels.num_classes,
        "feature_dim": None if features is None else features.shape[1],
        "edge_homophily": edge_homophily(g, labels) if g.num_edges else None,
    }


def save_results(out_dir, table: ResultTable, config_dict: dict | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table.to_csv(out / "results.csv")
    payload = {"rows": [
        {c: getattr(r, c) for c in _COLUMNS} for r in table.rows
    ]}
    if config_dict is not None:
        payload["config"] = config_dict
    io.write_json(out / "results.json", payload)


def run_property_suite() -> dict:
    """Run every registered library invariant; see :mod:`evennet.properties`."""
    from . import properties  # imported here: properties builds on this module

    return properties.run_property_suite()
