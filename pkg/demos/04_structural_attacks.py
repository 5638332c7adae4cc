"""Structural attacks: homophily injection and the even-filter defense.

Runs the evasion DICE attack (delete intra-class edges, add inter-class
edges) against models trained on the clean graph, sweeping the perturb
budget. The attack drives edge homophily down through the uninformative
0.5 region and out the other side; once the graph turns informatively
heterophilic the even-order filter rebounds while the full-order one
keeps misreading the flipped structure. A random attack with the same
budget barely moves homophily by comparison.
"""

from evennet import (
    AttackSpec,
    ExperimentConfig,
    dice_evasion,
    edge_homophily,
    random_attack,
    run_attack_curves,
)
from evennet.model import TrainConfig
from evennet.synth import CsbmParams, generate_csbm

# --- how the two attacks move homophily -------------------------------------
params = CsbmParams(n=400, f=40, d=5.0, phi=0.75)
g, _, labels = generate_csbm(params, seed=0)
clean_h = edge_homophily(g, labels)
print(f"clean graph: h = {clean_h:.3f}, |E| = {g.num_edges}")
print(f"{'ratio':>6s} {'DICE h':>8s} {'random h':>9s}")
for ratio in (0.4, 0.8, 1.2, 1.6):
    dice_g, _ = dice_evasion(g, labels, AttackSpec("dice", ratio, seed=1))
    rand_g, _ = random_attack(g, AttackSpec("random", ratio, seed=1))
    print(f"{ratio:6.1f} {edge_homophily(dice_g, labels):8.3f} "
          f"{edge_homophily(rand_g, labels):9.3f}")
print("every DICE edit targets the label structure; random edits only dilute it.\n")

# --- defense curves ----------------------------------------------------------
config = ExperimentConfig(
    kind="attack",
    csbm=CsbmParams(n=300, f=120, d=5.0, phi=0.75),
    variants=("evennet", "fullorder"),
    train=TrainConfig(hidden=32, max_epochs=400, patience=100, filter_order=10),
    trials=3,
    base_seed=0,
    attack_kind="dice",
    ratios=(0.0, 0.8, 1.6),
)
table = run_attack_curves(config)
print(f"{'variant':12s} {'ratio':>6s} {'accuracy':>9s} {'test h':>7s}")
for row in table.rows:
    print(f"{row.variant:12s} {row.ratio:6.1f} {row.mean_accuracy:9.3f} "
          f"{row.test_homophily:7.3f}")

even = {round(r.ratio, 1): r.mean_accuracy for r in table.select(variant="evennet")}
full = {round(r.ratio, 1): r.mean_accuracy for r in table.select(variant="fullorder")}
print(f"\nat budget 1.6 the attacked graph is strongly heterophilic; the even "
      f"filter keeps {even[1.6]:.3f} accuracy while the full-order filter "
      f"falls to {full[1.6]:.3f}.")
