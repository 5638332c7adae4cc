"""Structural perturbation engines with replayable ledgers.

Budgets count unit operations (one edge added or removed each) relative
to the undirected edge count, so perturb ratios above 1 are legal. Edges
whose endpoints both lie in the protected node set are never touched.
Every attack returns a ledger whose replay on the clean graph reproduces
the attacked graph exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, LabelAssignment, build_graph

DICE = "dice"
RANDOM = "random"

_REJECTION_CAP = 2000


@dataclass
class AttackSpec:
    kind: str
    perturb_ratio: float
    protected: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (DICE, RANDOM):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.perturb_ratio < 0:
            raise ValueError("perturb ratio must be >= 0")
        self.protected = frozenset(int(v) for v in self.protected)


@dataclass
class PerturbationLedger:
    """Ordered (op, u, v) edits; ``exhausted`` flags an underspent budget.

    For DICE the removal counter covers intra-class edges only and the
    addition counter inter-class pairs only, by construction.
    """

    ops: list = field(default_factory=list)
    removals: int = 0
    additions: int = 0
    exhausted: bool = False

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("op,u,v\n")
            for op, u, v in self.ops:
                fh.write(f"{op},{u},{v}\n")

    @classmethod
    def from_csv(cls, path) -> "PerturbationLedger":
        ledger = cls()
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if header.strip() != "op,u,v":
                raise ValueError(f"{path}: unexpected ledger header {header!r}")
            for line in fh:
                op, u, v = line.strip().split(",")
                ledger.ops.append((op, int(u), int(v)))
        return ledger


def replay_ledger(g: Graph, ledger: PerturbationLedger) -> Graph:
    """Apply the recorded edits to a clean graph; validates each edit."""
    edges = {tuple(e) for e in map(tuple, g.edge_array())}
    for op, u, v in ledger.ops:
        key = (min(u, v), max(u, v))
        if op == "remove":
            if key not in edges:
                raise ValueError(f"ledger removes missing edge {key}")
            edges.remove(key)
        elif op == "add":
            if key in edges:
                raise ValueError(f"ledger adds existing edge {key}")
            edges.add(key)
        else:
            raise ValueError(f"unknown ledger op {op!r}")
    return build_graph(sorted(edges), g.num_nodes)


class _EdgePool:
    """Uniform O(1) sampling and deletion over a dynamic set of pairs."""

    def __init__(self, pairs):
        self.items = list(pairs)
        self.index = {e: i for i, e in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def __contains__(self, e):
        return e in self.index

    def sample(self, rng):
        return self.items[int(rng.integers(len(self.items)))]

    def remove(self, e):
        i = self.index.pop(e)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.index[last] = i

    def add(self, e):
        self.index[e] = len(self.items)
        self.items.append(e)


def _protected_pair(u: int, v: int, protected: frozenset) -> bool:
    return u in protected and v in protected


def _absent_pair_sampler(n: int, edges: set, protected: frozenset, rng,
                         want_inter=None, classes=None):
    """Uniform absent (non-protected) pair, optionally inter-class only.

    Rejection sampling with a cap, falling back to explicit complement
    enumeration (exact, and the detector for exhaustion).
    """
    for _ in range(_REJECTION_CAP):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in edges or _protected_pair(*key, protected):
            continue
        if want_inter and classes[u] == classes[v]:
            continue
        return key
    candidates = []
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) in edges or _protected_pair(u, v, protected):
                continue
            if want_inter and classes[u] == classes[v]:
                continue
            candidates.append((u, v))
    if not candidates:
        return None
    return candidates[int(rng.integers(len(candidates)))]


def _run_attack(g: Graph, spec: AttackSpec, classes: np.ndarray | None):
    if spec.protected and max(spec.protected) >= g.num_nodes:
        raise ValueError(
            f"protected node {max(spec.protected)} outside 0..{g.num_nodes - 1}")
    rng = np.random.default_rng(spec.seed)
    budget = int(round(spec.perturb_ratio * g.num_edges))
    all_edges = {tuple(e) for e in map(tuple, g.edge_array())}
    ledger = PerturbationLedger()

    if spec.kind == DICE:
        removable = _EdgePool(
            e for e in sorted(all_edges)
            if classes[e[0]] == classes[e[1]] and not _protected_pair(*e, spec.protected)
        )
        want_inter = True
    else:
        removable = _EdgePool(
            e for e in sorted(all_edges) if not _protected_pair(*e, spec.protected)
        )
        want_inter = None

    additions_exhausted = False
    for _ in range(budget):
        do_remove = rng.random() < 0.5
        if do_remove and len(removable) == 0:
            do_remove = False
        if not do_remove and additions_exhausted:
            do_remove = len(removable) > 0
        if not do_remove and not additions_exhausted:
            pair = _absent_pair_sampler(g.num_nodes, all_edges, spec.protected, rng,
                                        want_inter=want_inter, classes=classes)
            if pair is None:
                additions_exhausted = True
                do_remove = len(removable) > 0
                if not do_remove:
                    ledger.exhausted = True
                    break
            else:
                all_edges.add(pair)
                if spec.kind == RANDOM:
                    removable.add(pair)
                ledger.ops.append(("add", pair[0], pair[1]))
                ledger.additions += 1
                continue
        if do_remove:
            pair = removable.sample(rng)
            removable.remove(pair)
            all_edges.remove(pair)
            ledger.ops.append(("remove", pair[0], pair[1]))
            ledger.removals += 1
            if spec.kind == RANDOM:
                # a removal frees an absent pair, so additions are possible again
                additions_exhausted = False
        else:
            ledger.exhausted = True
            break

    attacked = build_graph(sorted(all_edges), g.num_nodes)
    return attacked, ledger


def dice_evasion(g: Graph, labels: LabelAssignment, spec: AttackSpec):
    """Remove random intra-class edges / add random absent inter-class edges.

    Each unit operation is a fair coin flip between the two move types,
    pivoting to the other type when one is exhausted; the true labels are
    available to the attacker. Returns ``(attacked_graph, ledger)``; the
    ledger's ``exhausted`` flag marks a budget that could not be spent.
    """
    if spec.kind != DICE:
        raise ValueError("spec.kind must be 'dice'")
    if labels.num_nodes != g.num_nodes:
        raise ValueError("labels must cover all nodes")
    return _run_attack(g, spec, labels.classes)


def random_attack(g: Graph, spec: AttackSpec):
    """Delete or add uniformly random (non-protected) edges with equal probability."""
    if spec.kind != RANDOM:
        raise ValueError("spec.kind must be 'random'")
    return _run_attack(g, spec, None)
